//! Quadratic forms, their theta products, and the exact solve for the
//! coefficients of a form's theta product in a basis.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::bases::{basis_for_space, coefficient_matrix, BasisElement, SpaceId};
use crate::error::{Error, Result};
use crate::linalg::LinearSolver;
use crate::modforms::{theta_series, Recipe};
use crate::qseries::QSeries;
use crate::rational::{format_rational, Rational};

/// `x₁² + ⋯ + x_i² + 2(⋯) + 3(⋯) + 4(⋯) + 6(⋯)` with exponents `(i, j, k, l, m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "[u8; 5]", into = "[u8; 5]")]
pub struct QuadraticForm {
    exponents: [u8; 5],
}

/// Coefficient values attached to the five exponents.
pub const COEFFICIENT_VALUES: [u64; 5] = [1, 2, 3, 4, 6];

impl QuadraticForm {
    pub fn new(i: u8, j: u8, k: u8, l: u8, m: u8) -> Result<Self> {
        Self::from_exponents([i, j, k, l, m])
    }

    pub fn from_exponents(exponents: [u8; 5]) -> Result<Self> {
        let total: u32 = exponents.iter().map(|&e| e as u32).sum();
        if total != 8 {
            return Err(Error::InvalidForm(format!(
                "exponents {exponents:?} sum to {total}, expected 8"
            )));
        }
        Ok(Self { exponents })
    }

    pub fn exponents(&self) -> [u8; 5] {
        self.exponents
    }

    /// The eight coefficients in nondecreasing order.
    pub fn coefficients(&self) -> [u64; 8] {
        let mut out = [0u64; 8];
        let mut p = 0;
        for (e, a) in self.exponents.iter().zip(COEFFICIENT_VALUES) {
            for _ in 0..*e {
                out[p] = a;
                p += 1;
            }
        }
        out
    }

    /// Forms with coefficients 4 and 6 only: rescalings of forms in 2 and 3,
    /// left out of the published case lists.
    pub fn is_rescaled(&self) -> bool {
        let [i, j, k, ..] = self.exponents;
        i == 0 && j == 0 && k == 0
    }

    pub fn gcd(&self) -> u64 {
        self.coefficients()
            .iter()
            .fold(0, |g, &a| num_integer::gcd(g, a))
    }

    /// Table key: `ijkl` when `m = 0` and `short` is requested, else `ijklm`.
    pub fn key(&self, short: bool) -> String {
        let n = if short && self.exponents[4] == 0 { 4 } else { 5 };
        self.exponents[..n].iter().map(|e| e.to_string()).collect()
    }

    /// Parses `"0062"`, `"00026"`, or whitespace/comma separated exponents;
    /// four exponents are extended by `m = 0`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = if s.contains([' ', ',']) {
            s.split([' ', ',']).filter(|p| !p.is_empty()).collect()
        } else {
            s.split("").filter(|p| !p.is_empty()).collect()
        };
        let nums: Vec<u8> = parts
            .iter()
            .map(|p| p.parse::<u8>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse(format!("bad exponent list {s:?}")))?;
        match nums.len() {
            4 => Self::new(nums[0], nums[1], nums[2], nums[3], 0),
            5 => Self::new(nums[0], nums[1], nums[2], nums[3], nums[4]),
            n => Err(Error::Parse(format!("expected 4 or 5 exponents, got {n}"))),
        }
    }
}

impl TryFrom<[u8; 5]> for QuadraticForm {
    type Error = Error;

    fn try_from(e: [u8; 5]) -> Result<Self> {
        Self::from_exponents(e)
    }
}

impl From<QuadraticForm> for [u8; 5] {
    fn from(f: QuadraticForm) -> Self {
        f.exponents
    }
}

impl FromStr for QuadraticForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = self.exponents;
        write!(f, "({},{},{},{},{})", e[0], e[1], e[2], e[3], e[4])
    }
}

/// Space containing the theta product of `form`.
pub fn classify_space(form: &QuadraticForm) -> Result<SpaceId> {
    let [_i, j, k, _l, m] = form.exponents();
    let out_of_scope = |reason: &str| Error::NotInScope {
        form: form.to_string(),
        reason: reason.to_string(),
    };
    if k == 0 && m == 0 {
        return if j % 2 == 1 {
            Ok(SpaceId::M4_16_chi8)
        } else {
            Err(out_of_scope(
                "coefficients in {1,2,4} with an even number of 2s are not treated",
            ))
        };
    }
    Ok(match ((j + m) % 2, (k + m) % 2) {
        (0, 0) => SpaceId::M4_48_triv,
        (1, 0) => SpaceId::M4_48_chi8,
        (0, _) => SpaceId::M4_48_chi12,
        _ => SpaceId::M4_48_chi24,
    })
}

/// `Θ(z)^i Θ(2z)^j Θ(3z)^k Θ(4z)^l Θ(6z)^m`.
pub fn theta_product(form: &QuadraticForm, prec: usize) -> QSeries {
    let theta = theta_series(prec);
    let mut acc = QSeries::one(prec);
    for (e, d) in form.exponents().iter().zip(COEFFICIENT_VALUES) {
        if *e > 0 {
            let factor = theta.dilate(d as usize).pow(*e as i64).expect("positive power");
            acc = acc.mul(&factor);
        }
    }
    acc
}

/// `kν/12` with `k = 4` and `ν = [SL₂(ℤ) : Γ₀(N)] = N ∏_{p|N}(1 + 1/p)`.
pub fn sturm_bound(space: SpaceId) -> usize {
    let n = space.level();
    let mut nu = n;
    let mut m = n;
    let mut p = 2;
    while m > 1 {
        if m % p == 0 {
            nu = nu / p * (p + 1);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    (4 * nu / 12) as usize
}

fn solver_from_basis(basis: &[BasisElement], space: Option<SpaceId>) -> Result<LinearSolver> {
    let prec = basis.iter().map(|b| b.series.prec()).min().unwrap_or(0);
    let rows = coefficient_matrix(basis, prec);
    LinearSolver::new(rows, basis.len()).map_err(|rank| Error::RankDeficient {
        space: space.unwrap_or(SpaceId::M4_48_triv),
        rank,
        dimension: basis.len(),
    })
}

/// Exact coordinates of `target` in `basis`, with a zero-residual check on
/// every available coefficient.
pub fn solve_combination(target: &QSeries, basis: &[BasisElement]) -> Result<Vec<Rational>> {
    let solver = solver_from_basis(basis, None)?;
    solve_with(&solver, target)
}

fn solve_with(solver: &LinearSolver, target: &QSeries) -> Result<Vec<Rational>> {
    let rows = solver.nrows();
    if target.prec() < rows {
        return Err(Error::PrecisionTooLow {
            prec: target.prec(),
            required: rows,
        });
    }
    solver.solve(&target.coeffs()[..rows])
}

type SolverCache = Mutex<HashMap<(SpaceId, usize), Arc<LinearSolver>>>;

/// The factored system for a space, built once per precision.
pub fn solver_for(space: SpaceId, prec: usize) -> Result<Arc<LinearSolver>> {
    static CACHE: OnceLock<SolverCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(s) = cache.lock().expect("cache lock").get(&(space, prec)) {
        return Ok(Arc::clone(s));
    }
    let basis = basis_for_space(space, prec)?;
    let solver = Arc::new(solver_from_basis(&basis, Some(space))?);
    let mut guard = cache.lock().expect("cache lock");
    Ok(Arc::clone(guard.entry((space, prec)).or_insert(solver)))
}

/// Coefficients of a form's theta product in the basis of its space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formula {
    pub form: QuadraticForm,
    pub space: SpaceId,
    pub prec: usize,
    pub coeffs: Vec<Rational>,
}

impl Formula {
    pub fn basis(&self) -> Result<Arc<Vec<BasisElement>>> {
        basis_for_space(self.space, self.prec)
    }

    pub fn document(&self) -> Result<FormulaDocument> {
        let basis = self.basis()?;
        Ok(FormulaDocument {
            form: self.form.exponents(),
            space: self.space,
            precision: self.prec,
            terms: basis
                .iter()
                .zip(&self.coeffs)
                .map(|(b, c)| {
                    let divisor_sum = if b.recipe.is_eisenstein() {
                        let inner = match &b.recipe {
                            Recipe::Dilate(inner, _) => inner.as_ref(),
                            r => r,
                        };
                        let lead = inner.expand(2)?.coefficient(1)?.clone();
                        Some(format_rational(&(c * lead)))
                    } else {
                        None
                    };
                    Ok(FormulaTerm {
                        symbol: b.symbol.clone(),
                        label: b.label.clone(),
                        coefficient: format_rational(c),
                        divisor_sum,
                    })
                })
                .collect::<Result<_>>()?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaTerm {
    pub symbol: String,
    pub label: String,
    pub coefficient: String,
    /// For Eisenstein terms, the coefficient carried by the divisor sum
    /// once the series normalisation is folded in.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divisor_sum: Option<String>,
}

/// Serialized shape of a [`Formula`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaDocument {
    pub form: [u8; 5],
    pub space: SpaceId,
    pub precision: usize,
    pub terms: Vec<FormulaTerm>,
}

/// Classifies, expands and solves.
pub fn derive_formula(form: &QuadraticForm, prec: usize) -> Result<Formula> {
    let space = classify_space(form)?;
    let required = sturm_bound(space) + 2;
    if prec < required.max(crate::DEFAULT_PRECISION) {
        return Err(Error::PrecisionTooLow {
            prec,
            required: required.max(crate::DEFAULT_PRECISION),
        });
    }
    let solver = solver_for(space, prec)?;
    let target = theta_product(form, prec);
    let coeffs = solve_with(&solver, &target)?;
    Ok(Formula {
        form: *form,
        space,
        prec,
        coeffs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, rat};
    use proptest::prelude::*;

    fn qf(s: &str) -> QuadraticForm {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_keys() {
        assert_eq!(qf("0062"), QuadraticForm::new(0, 0, 6, 2, 0).unwrap());
        assert_eq!(qf("0 0 2 6"), qf("0,0,2,6,0"));
        assert_eq!(qf("00026").key(true), "00026");
        assert_eq!(qf("0062").key(true), "0062");
        assert_eq!(qf("0062").key(false), "00620");
        assert!(QuadraticForm::new(1, 0, 0, 0, 0).is_err());
        assert_eq!(qf("5021").coefficients(), [1, 1, 1, 1, 1, 3, 3, 4]);
    }

    #[test]
    fn document_folds_eisenstein_normalisation() {
        let doc = derive_formula(&qf("50210"), 34).unwrap().document().unwrap();
        assert_eq!(doc.terms[0].coefficient, "7/600");
        assert_eq!(doc.terms[0].divisor_sum.as_deref(), Some("14/5"));
        assert_eq!(doc.terms[10].divisor_sum.as_deref(), Some("7/20"));
        assert!(doc.terms[12].divisor_sum.is_none());
    }

    #[test]
    fn serializes_as_exponent_array() {
        let f = qf("00422");
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, "[0,0,4,2,2]");
        assert_eq!(serde_json::from_str::<QuadraticForm>(&json).unwrap(), f);
        assert!(serde_json::from_str::<QuadraticForm>("[1,0,0,0,0]").is_err());
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_space(&qf("00422")).unwrap(), SpaceId::M4_48_triv);
        assert_eq!(classify_space(&qf("00323")).unwrap(), SpaceId::M4_48_chi8);
        assert_eq!(classify_space(&qf("00413")).unwrap(), SpaceId::M4_48_chi24);
        assert_eq!(classify_space(&qf("0071")).unwrap(), SpaceId::M4_48_chi12);
        assert_eq!(classify_space(&qf("1106")).unwrap(), SpaceId::M4_16_chi8);
        assert!(matches!(
            classify_space(&qf("80000")),
            Err(Error::NotInScope { .. })
        ));
        assert_eq!(classify_space(&qf("00026")).unwrap(), SpaceId::M4_48_triv);
        assert!(qf("00026").is_rescaled());
        assert!(matches!(
            classify_space(&qf("00080")),
            Err(Error::NotInScope { .. })
        ));
    }

    #[test]
    fn theta_product_small_values() {
        let t = theta_product(&qf("5021"), 4);
        assert_eq!(t.coefficient(0).unwrap(), &rat(1));
        assert_eq!(t.coefficient(1).unwrap(), &rat(10));
        let t = theta_product(&qf("1106"), 4);
        assert_eq!(t.coefficient(2).unwrap(), &rat(2));
    }

    #[test]
    fn sturm_bounds() {
        assert_eq!(sturm_bound(SpaceId::M4_48_triv), 32);
        assert_eq!(sturm_bound(SpaceId::M4_48_chi24), 32);
        assert_eq!(sturm_bound(SpaceId::M4_16_chi8), 8);
    }

    #[test]
    fn basis_element_solves_to_unit_vector() {
        let basis = basis_for_space(SpaceId::M4_16_chi8, 34).unwrap();
        let c = solve_combination(&basis[5].series, &basis).unwrap();
        for (i, x) in c.iter().enumerate() {
            assert_eq!(x, &rat((i == 5) as i64));
        }
    }

    #[test]
    fn theorem_first_case() {
        let f = derive_formula(&qf("1106"), 34).unwrap();
        let expected = [0, 2, 2, 0, 6, 48, 14, -28].map(|x| frac(x, 11));
        assert_eq!(f.coeffs, expected);
    }

    #[test]
    fn inconsistent_target_reports_index() {
        let basis = basis_for_space(SpaceId::M4_16_chi8, 34).unwrap();
        let t = QSeries::monomial(rat(1), 33, 34);
        assert!(matches!(
            solve_combination(&t, &basis),
            Err(Error::Inconsistent { .. })
        ));
    }

    #[test]
    fn derivation_is_deterministic() {
        let a = derive_formula(&qf("1106"), 40).unwrap();
        let b = derive_formula(&qf("1106"), 40).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn solve_is_scale_equivariant(p in -50i64..50, q in 1i64..50) {
            let basis = basis_for_space(SpaceId::M4_16_chi8, 34).unwrap();
            let target = theta_product(&qf("1304"), 34);
            let r = frac(p, q);
            let base = solve_combination(&target, &basis).unwrap();
            let scaled = solve_combination(&target.scale(&r), &basis).unwrap();
            let expected: Vec<Rational> = base.iter().map(|c| c * &r).collect();
            prop_assert_eq!(scaled, expected);
        }
    }
}
