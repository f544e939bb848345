//! The five explicit bases, in the order the coefficient tables use.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::characters::DirichletCharacter as D;
use crate::error::{Error, Result};
use crate::linalg;
use crate::modforms::{lookup, EisensteinSpec, Recipe};
use crate::qseries::QSeries;
use crate::rational::{format_rational, Rational};

#[allow(non_camel_case_types)]
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SpaceId {
    M4_16_chi8,
    M4_48_triv,
    M4_48_chi8,
    M4_48_chi12,
    M4_48_chi24,
}

impl SpaceId {
    pub const ALL: [SpaceId; 5] = [
        SpaceId::M4_16_chi8,
        SpaceId::M4_48_triv,
        SpaceId::M4_48_chi8,
        SpaceId::M4_48_chi12,
        SpaceId::M4_48_chi24,
    ];

    pub fn dimension(self) -> usize {
        match self {
            SpaceId::M4_16_chi8 => 8,
            SpaceId::M4_48_triv | SpaceId::M4_48_chi12 => 30,
            SpaceId::M4_48_chi8 | SpaceId::M4_48_chi24 => 28,
        }
    }

    pub fn level(self) -> u64 {
        match self {
            SpaceId::M4_16_chi8 => 16,
            _ => 48,
        }
    }

    pub fn character(self) -> D {
        match self {
            SpaceId::M4_48_triv => D::TRIVIAL,
            SpaceId::M4_16_chi8 | SpaceId::M4_48_chi8 => D::CHI8,
            SpaceId::M4_48_chi12 => D::CHI12,
            SpaceId::M4_48_chi24 => D::CHI24,
        }
    }

    /// Letter used for the basis symbols (`f_α`, `g_α`, ...).
    pub fn symbol_prefix(self) -> &'static str {
        match self {
            SpaceId::M4_16_chi8 => "e",
            SpaceId::M4_48_triv => "f",
            SpaceId::M4_48_chi8 => "g",
            SpaceId::M4_48_chi12 => "h",
            SpaceId::M4_48_chi24 => "F",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SpaceId::M4_16_chi8 => "M4_16_chi8",
            SpaceId::M4_48_triv => "M4_48_triv",
            SpaceId::M4_48_chi8 => "M4_48_chi8",
            SpaceId::M4_48_chi12 => "M4_48_chi12",
            SpaceId::M4_48_chi24 => "M4_48_chi24",
        }
    }
}

impl fmt::Display for SpaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SpaceId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase();
        SpaceId::ALL
            .into_iter()
            .find(|sp| sp.as_str().to_ascii_lowercase() == key)
            .ok_or_else(|| Error::UnknownName {
                name: s.to_string(),
                suggestions: SpaceId::ALL.iter().map(|s| s.to_string()).collect(),
            })
    }
}

#[derive(Clone, Debug)]
pub struct BasisElement {
    /// 1-based position in the basis.
    pub index: usize,
    /// `f13`, `g5`, `F9`, ...
    pub symbol: String,
    /// e.g. `f_{4,6}(2z)`
    pub label: String,
    pub recipe: Recipe,
    pub series: QSeries,
}

impl BasisElement {
    pub fn coefficient(&self, n: usize) -> Result<&Rational> {
        self.series.coefficient(n)
    }
}

fn named(name: &str) -> Recipe {
    lookup(name)
        .unwrap_or_else(|| panic!("{name} is registered"))
        .recipe
        .clone()
}

fn eis(chi: D, psi: D) -> (String, Recipe) {
    let spec = EisensteinSpec::new(4, chi, psi).expect("admissible");
    (spec.to_string(), Recipe::Eisenstein(spec))
}

fn at(name: &str, recipe: Recipe, t: usize) -> (String, Recipe) {
    let label = if t == 1 {
        format!("{name}(z)")
    } else {
        format!("{name}({t}z)")
    };
    (label, recipe.dilate(t))
}

fn form(name: &str, t: usize) -> (String, Recipe) {
    at(name, named(name), t)
}

/// Labels and recipes in basis order.
pub fn basis_recipes(space: SpaceId) -> Vec<(String, Recipe)> {
    let mut out = Vec::new();
    match space {
        SpaceId::M4_16_chi8 => {
            for (chi, psi) in [(D::TRIVIAL, D::CHI8), (D::CHI8, D::TRIVIAL)] {
                let (name, r) = eis(chi, psi);
                for t in [1, 2] {
                    out.push(at(&name, r.clone(), t));
                }
            }
            for j in 1..=2 {
                for t in [1, 2] {
                    out.push(form(&format!("f_{{4,8,chi8;{j}}}"), t));
                }
            }
        }
        SpaceId::M4_48_triv => {
            for t in [1, 2, 3, 4, 6, 8, 12, 16, 24, 48] {
                out.push(at("E_4", Recipe::ClassicalE4, t));
            }
            let (name, r) = eis(D::CHI_M4, D::CHI_M4);
            for t in [1, 3] {
                out.push(at(&name, r.clone(), t));
            }
            for (name, ts) in [
                ("f_{4,6}", &[1, 2, 4, 8][..]),
                ("f_{4,8}", &[1, 2, 3, 6]),
                ("f_{4,12}", &[1, 2, 4]),
                ("f_{4,16}", &[1, 3]),
            ] {
                for &t in ts {
                    out.push(form(name, t));
                }
            }
            for t in [1, 2] {
                let r = named("f_{4,24}").twist(D::CHI4);
                out.push(at("f_{4,24}⊗chi4", r, t));
            }
            for name in ["f_{4,6}", "f_{4,12}", "f_{4,24}"] {
                out.push(at(&format!("{name}⊗chi-4"), named(name).twist(D::CHI_M4), 1));
            }
        }
        SpaceId::M4_48_chi8 => {
            for (chi, psi) in [(D::TRIVIAL, D::CHI8), (D::CHI8, D::TRIVIAL)] {
                let (name, r) = eis(chi, psi);
                for t in [1, 2, 3, 6] {
                    out.push(at(&name, r.clone(), t));
                }
            }
            for j in 1..=2 {
                for t in [1, 2, 3, 6] {
                    out.push(form(&format!("f_{{4,8,chi8;{j}}}"), t));
                }
            }
            for j in 1..=6 {
                for t in [1, 2] {
                    out.push(form(&format!("f_{{4,24,chi8;{j}}}"), t));
                }
            }
        }
        SpaceId::M4_48_chi12 => {
            let specs = [
                eis(D::TRIVIAL, D::CHI12),
                eis(D::CHI12, D::TRIVIAL),
                eis(D::CHI_M4, D::CHI_M3),
                eis(D::CHI_M3, D::CHI_M4),
            ];
            for t in [1, 2, 4] {
                for (name, r) in &specs {
                    out.push(at(name, r.clone(), t));
                }
            }
            for t in [1, 2, 4] {
                for j in 1..=4 {
                    out.push(form(&format!("f_{{4,12,chi12;{j}}}"), t));
                }
            }
            for j in 1..=6 {
                out.push(form(&format!("f_{{4,48,chi12;{j}}}"), 1));
            }
        }
        SpaceId::M4_48_chi24 => {
            for (chi, psi) in [
                (D::TRIVIAL, D::CHI24),
                (D::CHI_M8, D::CHI_M3),
                (D::CHI24, D::TRIVIAL),
                (D::CHI_M3, D::CHI_M8),
            ] {
                let (name, r) = eis(chi, psi);
                for t in [1, 2] {
                    out.push(at(&name, r.clone(), t));
                }
            }
            for j in 1..=10 {
                for t in [1, 2] {
                    out.push(form(&format!("f_{{4,24,chi24;{j}}}"), t));
                }
            }
        }
    }
    debug_assert_eq!(out.len(), space.dimension());
    out
}

type Cache = Mutex<HashMap<(SpaceId, usize), Arc<Vec<BasisElement>>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn build(space: SpaceId, prec: usize) -> Result<Vec<BasisElement>> {
    basis_recipes(space)
        .into_iter()
        .enumerate()
        .map(|(i, (label, recipe))| {
            let series = recipe.expand(prec).map_err(|e| Error::BasisConstruction {
                label: label.clone(),
                source: Box::new(e),
            })?;
            Ok(BasisElement {
                index: i + 1,
                symbol: format!("{}{}", space.symbol_prefix(), i + 1),
                label,
                recipe,
                series,
            })
        })
        .collect()
}

/// The ordered basis of `space` expanded to `prec` terms (memoized).
pub fn basis_for_space(space: SpaceId, prec: usize) -> Result<Arc<Vec<BasisElement>>> {
    if prec < crate::DEFAULT_PRECISION {
        return Err(Error::PrecisionTooLow {
            prec,
            required: crate::DEFAULT_PRECISION,
        });
    }
    if let Some(b) = cache().lock().expect("cache lock").get(&(space, prec)) {
        return Ok(Arc::clone(b));
    }
    let built = Arc::new(build(space, prec)?);
    let mut guard = cache().lock().expect("cache lock");
    Ok(Arc::clone(guard.entry((space, prec)).or_insert(built)))
}

/// Uncached construction, for checking the cache.
pub fn basis_for_space_uncached(space: SpaceId, prec: usize) -> Result<Vec<BasisElement>> {
    build(space, prec)
}

/// `prec × dim` matrix: row `n` holds the `qⁿ` coefficients of every element.
pub fn coefficient_matrix(basis: &[BasisElement], rows: usize) -> Vec<Vec<Rational>> {
    (0..rows)
        .map(|n| basis.iter().map(|b| b.series.coeffs()[n].clone()).collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Dependency {
    /// Nonzero entries `(symbol, coefficient)` of a kernel vector.
    pub terms: Vec<(String, String)>,
}

impl fmt::Display for Dependency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(s, c)| format!("({c})*{s}"))
            .collect();
        write!(f, "{} = 0", parts.join(" + "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankReport {
    pub space: SpaceId,
    pub prec: usize,
    pub dimension: usize,
    pub rank: usize,
    /// Empty exactly when the rank is full.
    pub dependencies: Vec<Dependency>,
}

impl RankReport {
    pub fn is_full(&self) -> bool {
        self.rank == self.dimension
    }

    /// Symbols occurring in some dependency.
    pub fn dependent_symbols(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .dependencies
            .iter()
            .flat_map(|d| d.terms.iter().map(|t| t.0.clone()))
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

/// Exact rank of the coefficient matrix on `q⁰..q^{prec-1}`, with a kernel
/// basis as certificate when it is deficient.
pub fn verify_rank(space: SpaceId, prec: usize) -> Result<RankReport> {
    let basis = basis_for_space(space, prec)?;
    let m = coefficient_matrix(&basis, prec);
    let dim = basis.len();
    let kernel = linalg::kernel(&m, dim);
    let dependencies = kernel
        .iter()
        .map(|v| Dependency {
            terms: v
                .iter()
                .zip(basis.iter())
                .filter(|(c, _)| !num_traits::Zero::is_zero(*c))
                .map(|(c, b)| (b.symbol.clone(), format_rational(c)))
                .collect(),
        })
        .collect();
    Ok(RankReport {
        space,
        prec,
        dimension: space.dimension(),
        rank: dim - kernel.len(),
        dependencies,
    })
}

#[derive(Serialize)]
struct CsvRow<'a> {
    symbol: &'a str,
    label: &'a str,
    n: usize,
    coefficient: String,
}

/// Writes `symbol,label,n,coefficient` rows for every element.
pub fn write_basis_csv<W: Write>(basis: &[BasisElement], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for b in basis {
        for (n, c) in b.series.coeffs().iter().enumerate() {
            out.serialize(CsvRow {
                symbol: &b.symbol,
                label: &b.label,
                n,
                coefficient: format_rational(c),
            })
            .map_err(|e| Error::Io(e.to_string()))?;
        }
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn element_counts() {
        for sp in SpaceId::ALL {
            assert_eq!(basis_recipes(sp).len(), sp.dimension(), "{sp}");
        }
    }

    #[test]
    fn trivial_space_labels() {
        let b = basis_for_space(SpaceId::M4_48_triv, 34).unwrap();
        assert_eq!(b[0].label, "E_4(z)");
        assert_eq!(b[10].label, "E_{4,chi-4,chi-4}(z)");
        assert_eq!(b[29].symbol, "f30");
    }

    #[test]
    fn cusp_elements_vanish_at_zero() {
        for sp in SpaceId::ALL {
            for b in basis_for_space(sp, 34).unwrap().iter() {
                if !b.recipe.is_eisenstein() {
                    assert_eq!(b.coefficient(0).unwrap(), &rat(0), "{}", b.label);
                }
            }
        }
    }

    #[test]
    fn dilated_elements_match_dilate() {
        for sp in SpaceId::ALL {
            for b in basis_for_space(sp, 40).unwrap().iter() {
                if let Recipe::Dilate(inner, t) = &b.recipe {
                    let base = inner.expand(40).unwrap();
                    assert_eq!(b.series, base.dilate(*t), "{}", b.label);
                }
            }
        }
    }

    #[test]
    fn cache_matches_uncached() {
        let a = basis_for_space(SpaceId::M4_16_chi8, 36).unwrap();
        let b = basis_for_space_uncached(SpaceId::M4_16_chi8, 36).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.series, y.series);
            assert_eq!(x.label, y.label);
        }
    }

    #[test]
    fn low_precision_refused() {
        assert!(matches!(
            basis_for_space(SpaceId::M4_48_triv, 20),
            Err(Error::PrecisionTooLow { .. })
        ));
    }

    #[test]
    fn csv_dump_quotes_labels() {
        let b = basis_for_space(SpaceId::M4_16_chi8, 34).unwrap();
        let mut buf = Vec::new();
        write_basis_csv(&b, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("symbol,label,n,coefficient\n"));
        assert!(text.contains("e1,\"E_{4,1,chi8}(z)\",0,11/2\n"));
        assert_eq!(text.lines().count(), 1 + 8 * 34);
    }

    #[test]
    fn space_names_roundtrip() {
        for sp in SpaceId::ALL {
            assert_eq!(sp.to_string().parse::<SpaceId>().unwrap(), sp);
        }
    }
}
