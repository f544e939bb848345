//! Frozen results of comparing derived constants with the transcribed tables.

use std::collections::BTreeSet;

use octoform::rational::parse_rational;
use octoform::tables::PublishedTable;
use octoform::verify::{audit_table, Status};
use octoform::{derive_formula, QuadraticForm, Rational, DEFAULT_PRECISION};

fn mismatched_cells(id: u8) -> BTreeSet<(String, usize)> {
    let table = PublishedTable::embedded(id).unwrap();
    audit_table(&table, DEFAULT_PRECISION)
        .iter()
        .flat_map(|r| r.mismatches().map(|e| (r.key.clone(), e.position)).collect::<Vec<_>>())
        .collect()
}

fn cells(list: &[(&str, usize)]) -> BTreeSet<(String, usize)> {
    list.iter().map(|(k, p)| (k.to_string(), *p)).collect()
}

#[test]
fn trivial_and_chi12_tables_differ_only_in_known_cells() {
    assert_eq!(mismatched_cells(3), cells(&[]));
    assert_eq!(
        mismatched_cells(5),
        cells(&[("5012", 3), ("0251", 12), ("3032", 30), ("3212", 30)])
    );
    assert_eq!(mismatched_cells(7), cells(&[("02222", 20)]));
    assert_eq!(mismatched_cells(9), cells(&[]));
}

#[test]
fn sign_typos_are_pure_sign_flips() {
    let table = PublishedTable::embedded(5).unwrap();
    for (key, pos) in [("5012", 3), ("0251", 12), ("3032", 30), ("3212", 30)] {
        let form: QuadraticForm = key.parse().unwrap();
        let derived = &derive_formula(&form, DEFAULT_PRECISION).unwrap().coeffs[pos - 1];
        let published = &table.row(key).unwrap()[pos - 1];
        assert_eq!(&-derived.clone(), published, "{key} position {pos}");
    }
}

/// The level-8 newform pair used by the χ8 tables spans the same space as the
/// registered one; their second form is (f1 - f2)/4.
fn reconcile_chi8(derived: &[Rational]) -> Vec<Rational> {
    let mut out = derived.to_vec();
    let minus_four = parse_rational("-4").unwrap();
    for k in 0..4 {
        out[8 + k] = &derived[8 + k] + &derived[12 + k];
        out[12 + k] = &derived[12 + k] * &minus_four;
    }
    out
}

#[test]
fn chi8_tables_reconcile_after_newform_change() {
    let mut odd = BTreeSet::new();
    let mut rows = 0;
    for id in [4u8, 8] {
        let table = PublishedTable::embedded(id).unwrap();
        for (key, published) in &table.rows {
            let form: QuadraticForm = key.parse().unwrap();
            let derived = derive_formula(&form, DEFAULT_PRECISION).unwrap().coeffs;
            let reconciled = reconcile_chi8(&derived);
            rows += 1;
            for (p, (a, b)) in reconciled.iter().zip(published).enumerate() {
                if a != b {
                    odd.insert((key.clone(), p + 1));
                }
            }
        }
    }
    assert_eq!(rows, 64);
    assert_eq!(odd, cells(&[("0341", 10), ("0323", 23), ("2141", 18)]));
}

#[test]
fn chi24_tables_are_blocked() {
    for id in [6u8, 10] {
        let table = PublishedTable::embedded(id).unwrap();
        let audit = audit_table(&table, DEFAULT_PRECISION);
        assert!(audit.iter().all(|r| r.status == Status::Blocked), "table {id}");
    }
}
