use std::fmt::Write as _;
use std::io::{self, Write};
use std::process::ExitCode;

use octoform::bases::{write_basis_csv, BasisElement, RankReport, SpaceId};
use octoform::solver::FormulaDocument;
use octoform::verify::{write_summary_csv, RowComparison, Status, VerificationReport};
use octoform::QSeries;
use serde::Serialize;

use crate::Format;

/// How a command ended.
#[derive(Debug)]
pub enum Outcome {
    Success,
    /// A mismatch, refusal or blocked comparison.
    Finding(String),
    /// Bad arguments or configuration.
    Usage(String),
}

impl Outcome {
    pub fn finding(msg: String) -> Self {
        Outcome::Finding(msg)
    }

    pub fn usage(msg: String) -> Self {
        Outcome::Usage(msg)
    }

    fn code(&self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::Finding(_) => 1,
            Outcome::Usage(_) => 2,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code())
    }
}

fn status_str(s: Status) -> &'static str {
    match s {
        Status::Match => "match",
        Status::Mismatch => "mismatch",
        Status::Refused => "refused",
        Status::Blocked => "blocked",
    }
}

pub struct Emitter {
    format: Format,
}

impl Emitter {
    pub fn new(format: Format) -> Self {
        Emitter { format }
    }

    fn print(&self, text: &str) {
        let mut stdout = io::stdout().lock();
        // A closed pipe is not worth a panic.
        let _ = stdout.write_all(text.as_bytes());
        let _ = stdout.flush();
    }

    fn json<T: Serialize + ?Sized>(&self, value: &T) {
        let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
        s.push('\n');
        self.print(&s);
    }

    fn csv_with(&self, f: impl FnOnce(&mut Vec<u8>) -> octoform::Result<()>) {
        let mut buf = Vec::new();
        f(&mut buf).expect("writing csv to memory");
        self.print(&String::from_utf8(buf).expect("csv output is utf-8"));
    }

    fn csv_rows<T: Serialize>(&self, rows: &[T]) {
        self.csv_with(|buf| {
            let mut w = csv::Writer::from_writer(buf);
            for r in rows {
                w.serialize(r).expect("row serializes");
            }
            w.flush()?;
            Ok(())
        });
    }

    pub fn error(&self, outcome: Outcome) -> Outcome {
        let (kind, msg) = match &outcome {
            Outcome::Success => return outcome,
            Outcome::Finding(m) => ("finding", m),
            Outcome::Usage(m) => ("usage", m),
        };
        match self.format {
            Format::Json => {
                #[derive(Serialize)]
                struct Doc<'a> {
                    error: &'a str,
                    kind: &'a str,
                    exit_code: u8,
                }
                self.json(&Doc { error: msg, kind, exit_code: outcome.code() });
            }
            Format::Csv => self.csv_rows(&[ErrorRow { error: msg, kind }]),
            Format::Pretty => eprintln!("error: {msg}"),
        }
        outcome
    }

    pub fn series(&self, name: &str, series: &QSeries) -> Outcome {
        let coeffs = series.dump();
        match self.format {
            Format::Json => {
                #[derive(Serialize)]
                struct Doc<'a> {
                    name: &'a str,
                    precision: usize,
                    coefficients: Vec<&'a str>,
                }
                self.json(&Doc {
                    name,
                    precision: series.prec(),
                    coefficients: coeffs.iter().map(|(_, c)| c.as_str()).collect(),
                });
            }
            Format::Csv => {
                #[derive(Serialize)]
                struct Row<'a> {
                    n: usize,
                    coefficient: &'a str,
                }
                let rows: Vec<Row> = coeffs.iter().map(|(n, c)| Row { n: *n, coefficient: c }).collect();
                self.csv_rows(&rows);
            }
            Format::Pretty => {
                let mut s = String::new();
                for (n, c) in &coeffs {
                    let _ = writeln!(s, "{n:>4}  {c}");
                }
                self.print(&s);
            }
        }
        Outcome::Success
    }

    pub fn formula(&self, doc: &FormulaDocument) -> Outcome {
        match self.format {
            Format::Json => self.json(doc),
            Format::Csv => self.csv_rows(&doc.terms),
            Format::Pretty => {
                let [i, j, k, l, m] = doc.form;
                let mut s = format!(
                    "theta(z)^{i} theta(2z)^{j} theta(3z)^{k} theta(4z)^{l} theta(6z)^{m} in {} (precision {})\n",
                    doc.space, doc.precision
                );
                let width = doc.terms.iter().map(|t| t.coefficient.len()).max().unwrap_or(0);
                for t in &doc.terms {
                    let _ = write!(s, "  {:>width$}  {:<4} {}", t.coefficient, t.symbol, t.label);
                    if let Some(d) = &t.divisor_sum {
                        let _ = write!(s, "  [divisor sum {d}]");
                    }
                    s.push('\n');
                }
                self.print(&s);
            }
        }
        Outcome::Success
    }

    pub fn reports(&self, reports: &[VerificationReport], batch: bool) -> Outcome {
        match self.format {
            Format::Json if batch => self.json(reports),
            Format::Json => self.json(&reports[0]),
            Format::Csv => self.csv_with(|buf| write_summary_csv(reports, buf)),
            Format::Pretty => {
                let mut s = String::new();
                for r in reports {
                    let space = r.space.map(|s| s.as_str()).unwrap_or("-");
                    let _ = write!(s, "{}  {space}  {}  n<={}", r.form, status_str(r.status), r.n_max);
                    if let Some(t) = &r.table {
                        let _ = write!(s, "  table {} row {}: {}", t.table, t.key, status_str(t.status));
                    }
                    s.push('\n');
                    if let Some(d) = &r.detail {
                        let _ = writeln!(s, "    {d}");
                    }
                    if let Some(p) = &r.first_mismatch {
                        let _ = writeln!(s, "    first mismatch at n={}: formula {} vs count {}", p.n, p.formula, p.oracle);
                    }
                    if let Some(t) = &r.table {
                        write_entry_mismatches(&mut s, t);
                    }
                }
                if batch {
                    let count = |st: Status| reports.iter().filter(|r| r.status == st).count();
                    let _ = writeln!(
                        s,
                        "{} forms: {} match, {} mismatch, {} refused, {} blocked",
                        reports.len(),
                        count(Status::Match),
                        count(Status::Mismatch),
                        count(Status::Refused),
                        count(Status::Blocked)
                    );
                }
                self.print(&s);
            }
        }
        let bad = reports.iter().filter(|r| !is_clean(r)).count();
        if bad == 0 {
            Outcome::Success
        } else {
            Outcome::Finding(format!("{bad} of {} forms did not verify", reports.len()))
        }
    }

    pub fn table_audit(&self, rows: &[RowComparison]) -> Outcome {
        match self.format {
            Format::Json => self.json(rows),
            Format::Csv => {
                let mut out = Vec::new();
                for r in rows {
                    let base = AuditRow {
                        table: r.table,
                        key: &r.key,
                        status: status_str(r.status),
                        detail: r.detail.as_deref().unwrap_or(""),
                        ..Default::default()
                    };
                    let bad: Vec<_> = r.mismatches().collect();
                    if bad.is_empty() {
                        out.push(base);
                        continue;
                    }
                    for e in bad {
                        out.push(AuditRow {
                            position: Some(e.position),
                            symbol: &e.symbol,
                            derived: &e.derived,
                            published: &e.published,
                            ..base.clone()
                        });
                    }
                }
                self.csv_rows(&out);
            }
            Format::Pretty => {
                let mut s = String::new();
                for r in rows {
                    let _ = write!(s, "table {} row {}: {}", r.table, r.key, status_str(r.status));
                    if let Some(d) = &r.detail {
                        let _ = write!(s, " ({d})");
                    }
                    s.push('\n');
                    write_entry_mismatches(&mut s, r);
                }
                let ok = rows.iter().filter(|r| r.status == Status::Match).count();
                let _ = writeln!(s, "{ok} of {} rows match", rows.len());
                self.print(&s);
            }
        }
        let bad = rows.iter().filter(|r| r.status != Status::Match).count();
        if bad == 0 {
            Outcome::Success
        } else {
            Outcome::Finding(format!("{bad} table rows differ or are blocked"))
        }
    }

    pub fn count(&self, coeffs: &[u64], n: u64, count: u128) -> Outcome {
        #[derive(Serialize)]
        struct Doc<'a> {
            coefficients: &'a [u64],
            n: u64,
            count: String,
        }
        let doc = Doc { coefficients: coeffs, n, count: count.to_string() };
        match self.format {
            Format::Json => self.json(&doc),
            Format::Csv => {
                #[derive(Serialize)]
                struct Row {
                    coefficients: String,
                    n: u64,
                    count: String,
                }
                let coefficients = coeffs.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
                self.csv_rows(&[Row { coefficients, n, count: doc.count }]);
            }
            Format::Pretty => self.print(&format!("{count}\n")),
        }
        Outcome::Success
    }

    pub fn basis(&self, space: SpaceId, basis: &[BasisElement]) -> Outcome {
        match self.format {
            Format::Json => {
                #[derive(Serialize)]
                struct Element<'a> {
                    symbol: &'a str,
                    label: &'a str,
                    recipe: String,
                    coefficients: Vec<String>,
                }
                #[derive(Serialize)]
                struct Doc<'a> {
                    space: SpaceId,
                    elements: Vec<Element<'a>>,
                }
                let elements = basis
                    .iter()
                    .map(|b| Element {
                        symbol: &b.symbol,
                        label: &b.label,
                        recipe: b.recipe.to_string(),
                        coefficients: b.series.dump().into_iter().map(|(_, c)| c).collect(),
                    })
                    .collect();
                self.json(&Doc { space, elements });
            }
            Format::Csv => self.csv_with(|buf| write_basis_csv(basis, buf)),
            Format::Pretty => {
                let mut s = format!("{space}: {} elements\n", basis.len());
                for b in basis {
                    let head: Vec<String> = b.series.dump().into_iter().take(8).map(|(_, c)| c).collect();
                    let _ = writeln!(s, "  {:<4} {:<28} {}, ...", b.symbol, b.label, head.join(", "));
                }
                self.print(&s);
            }
        }
        Outcome::Success
    }

    pub fn ranks(&self, reports: &[RankReport]) -> Outcome {
        match self.format {
            Format::Json => self.json(reports),
            Format::Csv => {
                #[derive(Serialize)]
                struct Row {
                    space: SpaceId,
                    precision: usize,
                    dimension: usize,
                    rank: usize,
                    dependencies: String,
                }
                let rows: Vec<Row> = reports
                    .iter()
                    .map(|r| Row {
                        space: r.space,
                        precision: r.prec,
                        dimension: r.dimension,
                        rank: r.rank,
                        dependencies: r.dependencies.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "),
                    })
                    .collect();
                self.csv_rows(&rows);
            }
            Format::Pretty => {
                let mut s = String::new();
                for r in reports {
                    let _ = writeln!(s, "{}  rank {}/{} at precision {}", r.space, r.rank, r.dimension, r.prec);
                    for d in &r.dependencies {
                        let _ = writeln!(s, "    {d}");
                    }
                }
                self.print(&s);
            }
        }
        let deficient = reports.iter().filter(|r| !r.is_full()).count();
        if deficient == 0 {
            Outcome::Success
        } else {
            Outcome::Finding(format!("{deficient} spaces are rank deficient"))
        }
    }
}

#[derive(Serialize)]
struct ErrorRow<'a> {
    error: &'a str,
    kind: &'a str,
}

#[derive(Serialize, Clone, Default)]
struct AuditRow<'a> {
    table: u8,
    key: &'a str,
    status: &'a str,
    detail: &'a str,
    position: Option<usize>,
    symbol: &'a str,
    derived: &'a str,
    published: &'a str,
}

fn is_clean(r: &VerificationReport) -> bool {
    r.all_match() && r.table.as_ref().is_none_or(|t| t.status != Status::Mismatch)
}

fn write_entry_mismatches(s: &mut String, row: &RowComparison) {
    for e in row.mismatches() {
        let _ = writeln!(
            s,
            "    position {} ({}): derived {} vs published {}",
            e.position, e.symbol, e.derived, e.published
        );
    }
}
