//! Transcribed coefficient tables and the list of published forms.
//!
//! Table files are stored block by block, as printed: a `columns a-b` line
//! followed by rows `KEY v_a ... v_b`. Rows are stitched by key; rows whose
//! blocks repeat a key or never complete are quarantined rather than loaded.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::bases::SpaceId;
use crate::error::{Error, Result};
use crate::rational::{parse_rational, Rational};
use crate::solver::QuadraticForm;

pub const TABLE_IDS: [u8; 8] = [3, 4, 5, 6, 7, 8, 9, 10];

const EMBEDDED: [(u8, &str); 8] = [
    (3, include_str!("../data/tables/table03.txt")),
    (4, include_str!("../data/tables/table04.txt")),
    (5, include_str!("../data/tables/table05.txt")),
    (6, include_str!("../data/tables/table06.txt")),
    (7, include_str!("../data/tables/table07.txt")),
    (8, include_str!("../data/tables/table08.txt")),
    (9, include_str!("../data/tables/table09.txt")),
    (10, include_str!("../data/tables/table10.txt")),
];

const FORMS: &str = include_str!("../data/tables/forms.txt");

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Quarantined {
    pub key: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublishedTable {
    pub id: u8,
    pub space: SpaceId,
    /// Complete rows in order of first appearance.
    pub rows: Vec<(String, Vec<Rational>)>,
    pub quarantined: Vec<Quarantined>,
}

impl PublishedTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut id = None;
        let mut space: Option<SpaceId> = None;
        let mut columns: Option<(usize, usize)> = None;
        let mut order: Vec<String> = Vec::new();
        let mut cells: BTreeMap<String, Vec<Option<Rational>>> = BTreeMap::new();
        let mut bad: BTreeMap<String, String> = BTreeMap::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Parse(format!("line {}: {msg}", lineno + 1));
            let mut words = line.split_whitespace();
            let head = words.next().expect("nonempty line");
            match head {
                "table" => {
                    id = Some(
                        words
                            .next()
                            .and_then(|w| w.parse::<u8>().ok())
                            .ok_or_else(|| err("bad table id".into()))?,
                    )
                }
                "space" => {
                    space = Some(words.next().ok_or_else(|| err("missing space".into()))?.parse()?)
                }
                "columns" => {
                    let spec = words.next().ok_or_else(|| err("missing range".into()))?;
                    let (a, b) = spec
                        .split_once('-')
                        .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
                        .filter(|&(a, b): &(usize, usize)| a >= 1 && a <= b)
                        .ok_or_else(|| err(format!("bad column range {spec:?}")))?;
                    columns = Some((a, b));
                }
                key => {
                    let sp = space.ok_or_else(|| err("row before space line".into()))?;
                    let (a, b) = columns.ok_or_else(|| err("row before columns line".into()))?;
                    let dim = sp.dimension();
                    if b > dim {
                        return Err(err(format!("columns {a}-{b} exceed dimension {dim}")));
                    }
                    let values: Vec<Rational> = words
                        .map(parse_rational)
                        .collect::<Result<_>>()
                        .map_err(|e| err(e.to_string()))?;
                    if !cells.contains_key(key) {
                        order.push(key.to_string());
                    }
                    let row = cells
                        .entry(key.to_string())
                        .or_insert_with(|| vec![None; dim]);
                    if values.len() != b - a + 1 {
                        bad.entry(key.to_string()).or_insert(format!(
                            "{} values in block {a}-{b}",
                            values.len()
                        ));
                        continue;
                    }
                    for (offset, v) in values.into_iter().enumerate() {
                        let slot = &mut row[a - 1 + offset];
                        if slot.is_some() {
                            bad.entry(key.to_string())
                                .or_insert(format!("key repeated in block {a}-{b}"));
                        }
                        *slot = Some(v);
                    }
                }
            }
        }

        let id = id.ok_or_else(|| Error::Parse("missing table line".into()))?;
        let space = space.ok_or_else(|| Error::Parse("missing space line".into()))?;
        let mut rows = Vec::new();
        let mut quarantined = Vec::new();
        for key in order {
            let row = cells.remove(&key).expect("recorded key");
            if let Some(reason) = bad.remove(&key) {
                quarantined.push(Quarantined { key, reason });
            } else if row.iter().any(Option::is_none) {
                let missing = row.iter().filter(|c| c.is_none()).count();
                quarantined.push(Quarantined {
                    key,
                    reason: format!("{missing} constants missing"),
                });
            } else {
                rows.push((key, row.into_iter().map(Option::unwrap).collect()));
            }
        }
        Ok(Self {
            id,
            space,
            rows,
            quarantined,
        })
    }

    /// The shipped transcription of table `id`.
    pub fn embedded(id: u8) -> Result<Self> {
        let text = EMBEDDED
            .iter()
            .find(|(t, _)| *t == id)
            .map(|(_, s)| *s)
            .ok_or_else(|| Error::MissingRow {
                table: id,
                key: String::new(),
            })?;
        Self::parse(text)
    }

    /// Loads `tableNN.txt` from `dir`.
    pub fn from_dir(dir: &Path, id: u8) -> Result<Self> {
        let text = std::fs::read_to_string(dir.join(format!("table{id:02}.txt")))?;
        Self::parse(&text)
    }

    pub fn load(dir: Option<&Path>, id: u8) -> Result<Self> {
        match dir {
            Some(d) => Self::from_dir(d, id),
            None => Self::embedded(id),
        }
    }

    pub fn row(&self, key: &str) -> Result<&[Rational]> {
        if let Some((_, r)) = self.rows.iter().find(|(k, _)| k == key) {
            return Ok(r);
        }
        match self.quarantined.iter().find(|q| q.key == key) {
            Some(q) => Err(Error::QuarantinedRow {
                table: self.id,
                key: key.to_string(),
                reason: q.reason.clone(),
            }),
            None => Err(Error::MissingRow {
                table: self.id,
                key: key.to_string(),
            }),
        }
    }

    /// Whether keys are `ijkl` (tables for `m = 0`) rather than `ijklm`.
    pub fn short_keys(&self) -> bool {
        self.id <= 6
    }
}

/// Table holding the constants for `form`, if it is a published case.
pub fn table_for(form: &QuadraticForm, space: SpaceId) -> Option<u8> {
    let base = if form.exponents()[4] == 0 { 3 } else { 7 };
    let offset = match space {
        SpaceId::M4_48_triv => 0,
        SpaceId::M4_48_chi8 => 1,
        SpaceId::M4_48_chi12 => 2,
        SpaceId::M4_48_chi24 => 3,
        SpaceId::M4_16_chi8 => return None,
    };
    Some(base + offset)
}

/// A form enumerated in the case lists, with the space printed next to it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ListedForm {
    pub list: u8,
    pub space: SpaceId,
    pub form: QuadraticForm,
}

pub fn parse_forms(text: &str) -> Result<Vec<ListedForm>> {
    let mut list = None;
    let mut out = Vec::new();
    for line in text.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut words = line.split_whitespace();
        let head = words.next().expect("nonempty line");
        if head == "table" {
            list = words.next().and_then(|w| w.parse().ok());
            continue;
        }
        let list = list.ok_or_else(|| Error::Parse("form list before table line".into()))?;
        let space: SpaceId = head.parse()?;
        for w in words {
            out.push(ListedForm {
                list,
                space,
                form: w.parse()?,
            });
        }
    }
    Ok(out)
}

/// All forms of the two published case lists (84 + 203).
pub fn published_forms() -> Vec<ListedForm> {
    parse_forms(FORMS).expect("shipped form list parses")
}

/// The forms of the theorem on `N(1^i, 2^j, 4^k; n)`, as `(i, j, 0, k, 0)`.
pub const LEVEL16_CASES: [(u8, u8, u8); 12] = [
    (1, 1, 6),
    (1, 3, 4),
    (1, 5, 2),
    (2, 1, 5),
    (2, 3, 3),
    (2, 5, 1),
    (3, 1, 4),
    (3, 3, 2),
    (4, 1, 3),
    (4, 3, 1),
    (5, 1, 2),
    (6, 1, 1),
];

pub fn level16_forms() -> Vec<QuadraticForm> {
    LEVEL16_CASES
        .iter()
        .map(|&(i, j, k)| QuadraticForm::new(i, j, 0, k, 0).expect("sums to 8"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;
    use crate::solver::classify_space;

    #[test]
    fn every_table_loads_with_full_rows() {
        for id in TABLE_IDS {
            let t = PublishedTable::embedded(id).unwrap();
            assert_eq!(t.id, id);
            assert!(!t.rows.is_empty());
            for (k, r) in &t.rows {
                assert_eq!(r.len(), t.space.dimension(), "table {id} row {k}");
            }
        }
    }

    #[test]
    fn spot_entries() {
        let t3 = PublishedTable::embedded(3).unwrap();
        assert_eq!(t3.row("0062").unwrap()[0], frac(1, 1200));
        let t4 = PublishedTable::embedded(4).unwrap();
        assert_eq!(t4.row("4121").unwrap()[1], frac(-26, 451));
        let t7 = PublishedTable::embedded(7).unwrap();
        assert_eq!(t7.row("00026").unwrap()[1], frac(1, 600));
    }

    #[test]
    fn table10_duplicate_key_is_quarantined() {
        let t = PublishedTable::embedded(10).unwrap();
        assert!(matches!(t.row("10025"), Err(Error::QuarantinedRow { .. })));
        assert!(t.quarantined.iter().any(|q| q.key == "14021"));
    }

    #[test]
    fn short_block_is_quarantined() {
        let text = "table 3\nspace M4_16_chi8\ncolumns 1-4\nA 1 2 3 4\nB 1 2\ncolumns 5-8\nA 5 6 7 8\nB 1 2 3 4\n";
        let t = PublishedTable::parse(text).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.quarantined[0].key, "B");
    }

    #[test]
    fn listed_forms_match_classification() {
        let forms = published_forms();
        assert_eq!(forms.iter().filter(|f| f.list == 1).count(), 84);
        assert_eq!(forms.iter().filter(|f| f.list == 2).count(), 203);
        for f in &forms {
            assert_eq!(classify_space(&f.form).unwrap(), f.space, "{}", f.form);
        }
    }

    #[test]
    fn table_rows_are_listed_or_rescaled() {
        let forms = published_forms();
        for id in TABLE_IDS {
            let t = PublishedTable::embedded(id).unwrap();
            for (k, _) in &t.rows {
                let f: QuadraticForm = k.parse().unwrap();
                let listed = forms.iter().any(|l| l.form == f);
                assert!(listed || f.is_rescaled(), "table {id} row {k}");
                assert_eq!(table_for(&f, t.space), Some(id));
            }
        }
    }
}
