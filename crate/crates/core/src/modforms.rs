//! q-expansions of the building blocks: the theta function, Dedekind eta
//! quotients and Eisenstein series with characters, plus the registry of
//! every named form the bases are assembled from.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::characters::{generalized_bernoulli, DirichletCharacter};
use crate::error::{Error, Result};
use crate::qseries::QSeries;
use crate::rational::{rat, Rational};

/// `Θ(z) = Σ_{n∈ℤ} q^{n²}`.
pub fn theta_series(prec: usize) -> QSeries {
    assert!(prec >= 1, "precision must be positive");
    let mut c = vec![BigInt::zero(); prec];
    c[0] = BigInt::one();
    let mut x = 1usize;
    while x * x < prec {
        c[x * x] = BigInt::from(2);
        x += 1;
    }
    QSeries::from_bigints(c)
}

/// `∏ η(d_i z)^{r_i}`, written `d₁^{r₁} d₂^{r₂} ⋯`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EtaQuotient {
    factors: Vec<(u32, i32)>,
}

impl EtaQuotient {
    pub fn new(factors: &[(u32, i32)]) -> Result<Self> {
        let invalid = |reason: &str| Error::InvalidEtaQuotient {
            quotient: format_factors(factors),
            reason: reason.to_string(),
        };
        if factors.is_empty() {
            return Err(invalid("no factors"));
        }
        if factors.iter().any(|&(d, r)| d == 0 || r == 0) {
            return Err(invalid("dilations must be positive and exponents nonzero"));
        }
        let mut ds: Vec<u32> = factors.iter().map(|f| f.0).collect();
        ds.sort_unstable();
        ds.dedup();
        if ds.len() != factors.len() {
            return Err(invalid("repeated dilation"));
        }
        Ok(Self {
            factors: factors.to_vec(),
        })
    }

    pub fn factors(&self) -> &[(u32, i32)] {
        &self.factors
    }

    /// `Σ r_i`, twice the weight.
    pub fn exponent_sum(&self) -> i64 {
        self.factors.iter().map(|&(_, r)| r as i64).sum()
    }

    pub fn weight(&self) -> Rational {
        Rational::new(BigInt::from(self.exponent_sum()), BigInt::from(2))
    }

    /// `Σ d_i r_i`, which is 24 times the order of vanishing at infinity.
    pub fn order_numerator(&self) -> i64 {
        self.factors.iter().map(|&(d, r)| d as i64 * r as i64).sum()
    }

    /// Order of vanishing at `q = 0`; must be a nonnegative integer.
    pub fn vanishing_order(&self) -> Result<usize> {
        let num = self.order_numerator();
        if num < 0 || num % 24 != 0 {
            return Err(Error::InvalidEtaQuotient {
                quotient: self.to_string(),
                reason: format!("order of vanishing {num}/24 is not a nonnegative integer"),
            });
        }
        Ok((num / 24) as usize)
    }
}

fn format_factors(factors: &[(u32, i32)]) -> String {
    factors.iter().map(|(d, r)| format!("{d}^{{{r}}}")).collect()
}

impl fmt::Display for EtaQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_factors(&self.factors))
    }
}

/// Expands an eta quotient by truncated Euler products: each `∏(1 - q^{dn})`
/// is applied factor by factor, and negative exponents use `1/(1 - q^m)`
/// directly, so no series inversion is involved.
pub fn eta_quotient_series(eq: &EtaQuotient, prec: usize) -> Result<QSeries> {
    assert!(prec >= 1, "precision must be positive");
    let e = eq.vanishing_order()?;
    if e >= prec {
        return Ok(QSeries::zero(prec));
    }
    let len = prec - e;
    let mut s = vec![BigInt::zero(); len];
    s[0] = BigInt::one();
    for &(d, r) in eq.factors() {
        let d = d as usize;
        for _ in 0..r.unsigned_abs() {
            let mut m = d;
            while m < len {
                if r > 0 {
                    for i in (m..len).rev() {
                        let t = s[i - m].clone();
                        s[i] -= t;
                    }
                } else {
                    for i in m..len {
                        let t = s[i - m].clone();
                        s[i] += t;
                    }
                }
                m += d;
            }
        }
    }
    let mut out = vec![BigInt::zero(); e];
    out.extend(s);
    Ok(QSeries::from_bigints(out))
}

/// `∏_{n≥1}(1 - qⁿ) = Σ_k (-1)^k q^{k(3k-1)/2}` over all integers `k`.
pub fn pentagonal_series(prec: usize) -> QSeries {
    let mut c = vec![BigInt::zero(); prec];
    c[0] = BigInt::one();
    let mut k: usize = 1;
    loop {
        let g1 = k * (3 * k - 1) / 2;
        let g2 = k * (3 * k + 1) / 2;
        if g1 >= prec {
            break;
        }
        let sign = if k % 2 == 1 { -1 } else { 1 };
        c[g1] += sign;
        if g2 < prec {
            c[g2] += sign;
        }
        k += 1;
    }
    QSeries::from_bigints(c)
}

/// Partition numbers `p(0..prec)` by Euler's pentagonal recurrence, i.e.
/// the coefficients of `1/∏(1 - qⁿ)`.
pub fn partition_series(prec: usize) -> QSeries {
    let mut p: Vec<BigInt> = vec![BigInt::zero(); prec];
    p[0] = BigInt::one();
    for n in 1..prec {
        let mut acc = BigInt::zero();
        let mut k: usize = 1;
        loop {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > n {
                break;
            }
            let g2 = k * (3 * k + 1) / 2;
            let mut term = p[n - g1].clone();
            if g2 <= n {
                term += &p[n - g2];
            }
            if k % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
            k += 1;
        }
        p[n] = acc;
    }
    QSeries::from_bigints(p)
}

/// Second, independent expansion: sparse pentagonal-number series for
/// positive exponents, partition generating functions for negative ones.
pub fn eta_quotient_series_pentagonal(eq: &EtaQuotient, prec: usize) -> Result<QSeries> {
    assert!(prec >= 1, "precision must be positive");
    let e = eq.vanishing_order()?;
    if e >= prec {
        return Ok(QSeries::zero(prec));
    }
    let len = prec - e;
    let pent = pentagonal_series(len);
    let part = partition_series(len);
    let mut acc = QSeries::one(len);
    for &(d, r) in eq.factors() {
        let base = if r > 0 { &pent } else { &part };
        acc = acc.mul(&base.dilate(d as usize).pow(r.unsigned_abs() as i64)?);
    }
    Ok(acc.shift(0).truncate(len).pad_front(e))
}

impl QSeries {
    /// Multiplies by `q^e` and extends the precision by `e`.
    fn pad_front(&self, e: usize) -> QSeries {
        let mut c = vec![Rational::zero(); e];
        c.extend(self.coeffs().iter().cloned());
        QSeries::from_coeffs(c).expect("nonempty")
    }
}

/// `σ_{k-1;χ,ψ}(n) = Σ_{d|n} ψ(d) χ(n/d) d^{k-1}`, by trial division.
pub fn twisted_sigma(
    kminus1: u32,
    chi: DirichletCharacter,
    psi: DirichletCharacter,
    n: u64,
) -> BigInt {
    assert!(n >= 1, "divisor sums are defined for n >= 1");
    let mut acc = BigInt::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            acc += sigma_term(kminus1, chi, psi, n, d);
            let e = n / d;
            if e != d {
                acc += sigma_term(kminus1, chi, psi, n, e);
            }
        }
        d += 1;
    }
    acc
}

fn sigma_term(k: u32, chi: DirichletCharacter, psi: DirichletCharacter, n: u64, d: u64) -> BigInt {
    let v = psi.value(d as i64) as i64 * chi.value((n / d) as i64) as i64;
    if v == 0 {
        BigInt::zero()
    } else {
        BigInt::from(v) * BigInt::from(d).pow(k)
    }
}

/// `E_{k,χ,ψ}`: `χ` acts on `n/d` (conductor M), `ψ` on `d` (conductor N).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EisensteinSpec {
    weight: u32,
    chi: DirichletCharacter,
    psi: DirichletCharacter,
}

impl EisensteinSpec {
    pub fn new(weight: u32, chi: DirichletCharacter, psi: DirichletCharacter) -> Result<Self> {
        let spec = Self { weight, chi, psi };
        if weight == 0 || !spec.is_admissible() {
            return Err(Error::ParityViolation {
                spec: spec.to_string(),
            });
        }
        Ok(spec)
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn chi(&self) -> DirichletCharacter {
        self.chi
    }

    pub fn psi(&self) -> DirichletCharacter {
        self.psi
    }

    /// `χ(-1)ψ(-1) = (-1)^k`.
    pub fn is_admissible(&self) -> bool {
        let sign = if self.weight % 2 == 0 { 1 } else { -1 };
        self.chi.parity() * self.psi.parity() == sign
    }

    /// `0` if `χ` is nontrivial, `-B_{k,ψ}/2k` otherwise.
    pub fn constant_term(&self) -> Rational {
        if !self.chi.is_trivial() {
            return Rational::zero();
        }
        let b = generalized_bernoulli(self.weight as usize, self.psi);
        -b / rat(2 * self.weight as i64)
    }
}

impl fmt::Display for EisensteinSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E_{{{},{},{}}}", self.weight, self.chi, self.psi)
    }
}

pub fn eisenstein_series(spec: &EisensteinSpec, prec: usize) -> Result<QSeries> {
    if !spec.is_admissible() {
        return Err(Error::ParityViolation {
            spec: spec.to_string(),
        });
    }
    let mut c = Vec::with_capacity(prec);
    c.push(spec.constant_term());
    for n in 1..prec {
        c.push(Rational::from_integer(twisted_sigma(
            spec.weight - 1,
            spec.chi,
            spec.psi,
            n as u64,
        )));
    }
    QSeries::from_coeffs(c)
}

/// `E_4 = 1 - (2k/B_k) Σ σ₃(n) qⁿ` with `k = 4`.
pub fn classical_e4(prec: usize) -> QSeries {
    let k = 4usize;
    let mult = -rat(2 * k as i64) / crate::characters::bernoulli_number(k);
    let mut c = Vec::with_capacity(prec);
    c.push(Rational::one());
    for n in 1..prec {
        let s = twisted_sigma(
            3,
            DirichletCharacter::TRIVIAL,
            DirichletCharacter::TRIVIAL,
            n as u64,
        );
        c.push(&mult * Rational::from_integer(s));
    }
    QSeries::from_coeffs(c).expect("positive precision")
}

fn eq(factors: &[(u32, i32)]) -> EtaQuotient {
    EtaQuotient::new(factors).expect("registered quotient is well formed")
}

/// The two quotients whose difference is `f_{4,12}`.
pub fn f412_parts() -> (EtaQuotient, EtaQuotient) {
    (
        eq(&[(1, -1), (2, 2), (3, 3), (4, 3), (6, 2), (12, -1)]),
        eq(&[(1, 3), (2, 2), (3, -1), (4, -1), (6, 2), (12, 3)]),
    )
}

pub fn difference_form_f412(prec: usize) -> Result<QSeries> {
    let (a, b) = f412_parts();
    Ok(eta_quotient_series(&a, prec)?.sub(&eta_quotient_series(&b, prec)?))
}

/// A symbolic construction of a q-series.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Recipe {
    Theta,
    ClassicalE4,
    Eisenstein(EisensteinSpec),
    Eta(EtaQuotient),
    Difference(Box<Recipe>, Box<Recipe>),
    Dilate(Box<Recipe>, usize),
    Twist(Box<Recipe>, DirichletCharacter),
    Restrict {
        inner: Box<Recipe>,
        residue: usize,
        modulus: usize,
    },
    Power(Box<Recipe>, u32),
}

impl Recipe {
    pub fn dilate(self, t: usize) -> Self {
        if t == 1 {
            self
        } else {
            Recipe::Dilate(Box::new(self), t)
        }
    }

    pub fn twist(self, chi: DirichletCharacter) -> Self {
        Recipe::Twist(Box::new(self), chi)
    }

    pub fn restrict(self, residue: usize, modulus: usize) -> Self {
        Recipe::Restrict {
            inner: Box::new(self),
            residue,
            modulus,
        }
    }

    pub fn expand(&self, prec: usize) -> Result<QSeries> {
        if prec == 0 {
            return Err(Error::ZeroPrecision);
        }
        Ok(match self {
            Recipe::Theta => theta_series(prec),
            Recipe::ClassicalE4 => classical_e4(prec),
            Recipe::Eisenstein(spec) => eisenstein_series(spec, prec)?,
            Recipe::Eta(q) => eta_quotient_series(q, prec)?,
            Recipe::Difference(a, b) => a.expand(prec)?.sub(&b.expand(prec)?),
            Recipe::Dilate(inner, t) => inner.expand(prec.div_ceil(*t))?.dilate_into(*t, prec),
            Recipe::Twist(inner, chi) => inner.expand(prec)?.twist(*chi),
            Recipe::Restrict {
                inner,
                residue,
                modulus,
            } => inner.expand(prec)?.restrict_residue(*residue, *modulus),
            Recipe::Power(inner, e) => inner.expand(prec)?.pow(*e as i64)?,
        })
    }

    /// Whether the constant term can be nonzero.
    pub fn is_eisenstein(&self) -> bool {
        match self {
            Recipe::ClassicalE4 | Recipe::Eisenstein(_) | Recipe::Theta => true,
            Recipe::Dilate(inner, _) | Recipe::Power(inner, _) => inner.is_eisenstein(),
            _ => false,
        }
    }
}

impl QSeries {
    /// Dilates a series known to `ceil(prec/t)` terms into one of `prec` terms.
    fn dilate_into(&self, t: usize, prec: usize) -> QSeries {
        let mut c = vec![Rational::zero(); prec];
        for (n, a) in self.coeffs().iter().enumerate() {
            if n * t >= prec {
                break;
            }
            c[n * t] = a.clone();
        }
        QSeries::from_coeffs(c).expect("positive precision")
    }
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Recipe::Theta => write!(f, "theta"),
            Recipe::ClassicalE4 => write!(f, "E_4"),
            Recipe::Eisenstein(s) => write!(f, "{s}"),
            Recipe::Eta(q) => write!(f, "eta[{q}]"),
            Recipe::Difference(a, b) => write!(f, "({a} - {b})"),
            Recipe::Dilate(inner, t) => write!(f, "{inner}@{t}"),
            Recipe::Twist(inner, chi) => write!(f, "({inner} x {chi})"),
            Recipe::Restrict {
                inner,
                residue,
                modulus,
            } => write!(f, "({inner} | n={residue} mod {modulus})"),
            Recipe::Power(inner, e) => write!(f, "{inner}^{e}"),
        }
    }
}

/// A registry entry: a canonical name, its construction and where it comes from.
#[derive(Clone, Debug)]
pub struct NamedForm {
    pub name: String,
    pub recipe: Recipe,
    pub source: &'static str,
}

/// Eq. (42) prints the sixth and seventh level-24 quotients identically; both
/// are registered as printed.
pub const CHI24_LEVEL24_QUOTIENTS: [&[(u32, i32)]; 10] = [
    &[(3, -2), (6, 7), (8, 3), (12, 3), (24, -3)],
    &[(3, 2), (4, 7), (6, -3), (8, -2), (12, 4)],
    &[(3, 2), (4, -3), (6, 1), (8, 6), (12, 2)],
    &[(3, 2), (6, -3), (8, 3), (12, 5), (24, 1)],
    &[(3, 2), (4, 2), (6, -3), (8, -1), (12, 3), (24, 5)],
    &[(3, 2), (4, 1), (6, 1), (8, -2), (12, -2), (24, 8)],
    &[(3, 2), (4, 1), (6, 1), (8, -2), (12, -2), (24, 8)],
    &[(1, 1), (3, -1), (6, 1), (8, -2), (12, 1), (24, 8)],
    &[(2, 2), (3, 6), (4, 1), (6, -3), (8, 2)],
    &[(3, 2), (4, 3), (6, 5), (12, -4), (24, 2)],
];

pub const CHI8_LEVEL8_QUOTIENTS: [&[(u32, i32)]; 2] = [
    &[(1, -2), (2, 11), (4, -3), (8, 2)],
    &[(1, 2), (2, -3), (4, 11), (8, -2)],
];

pub const CHI8_LEVEL24_QUOTIENTS: [&[(u32, i32)]; 6] = [
    &[(1, 2), (2, 1), (3, -4), (4, 1), (6, 10), (8, 2), (12, -4)],
    &[(1, 1), (2, 3), (3, -1), (4, 1), (6, 4), (8, -1), (24, 1)],
    &[(1, -1), (2, 4), (3, 1), (6, 3), (8, 1), (12, 1), (24, -1)],
    &[(1, -2), (2, 4), (4, 2), (6, 1), (8, 2), (12, 1)],
    &[(2, 1), (3, -2), (4, 1), (6, 4), (12, 2), (24, 2)],
    &[(1, -6), (2, 14), (6, 1), (8, -2), (12, 1)],
];

pub const CHI12_LEVEL12_QUOTIENTS: [&[(u32, i32)]; 4] = [
    &[(2, -1), (3, 4), (4, 2), (6, 5), (12, -2)],
    &[(3, 4), (4, 3), (6, -2), (12, 3)],
    &[(2, 2), (3, 4), (4, -1), (6, -4), (12, 7)],
    &[(1, 4), (4, -1), (6, -2), (12, 7)],
];

/// The second entry is printed with `3^{4}`, which has weight 8; `3^{-4}` is
/// the only single-sign change giving weight 4 with integral order, and it is
/// what the published level-48 χ12 coefficients require.
pub const CHI12_LEVEL48_QUOTIENTS: [&[(u32, i32)]; 3] = [
    &[(1, -4), (2, 7), (4, 5), (6, -3), (8, -3), (12, 9), (24, -3)],
    &[(2, -3), (3, -4), (4, 9), (6, 7), (8, -3), (12, 5), (24, -3)],
    &[(1, -2), (2, 2), (3, 2), (4, 2), (8, 1), (12, 2), (24, 1)],
];

/// The second level-48 χ12 quotient with exponent data exactly as printed.
pub const CHI12_LEVEL48_SECOND_AS_PRINTED: &[(u32, i32)] =
    &[(2, -3), (3, 4), (4, 9), (6, 7), (8, -3), (12, 5), (24, -3)];

pub const TRIVIAL_CUSP_QUOTIENTS: [(&str, &[(u32, i32)]); 4] = [
    ("f_{4,6}", &[(1, 2), (2, 2), (3, 2), (6, 2)]),
    ("f_{4,8}", &[(2, 4), (4, 4)]),
    ("f_{4,16}", &[(2, -4), (4, 16), (8, -4)]),
    ("f_{4,24}", &[(1, -4), (2, 11), (3, -4), (4, -3), (6, 11), (12, -3)]),
];

fn build_registry() -> Vec<NamedForm> {
    use DirichletCharacter as D;
    let mut forms = Vec::new();
    let mut push = |name: String, recipe: Recipe, source: &'static str| {
        forms.push(NamedForm {
            name,
            recipe,
            source,
        })
    };
    push("theta".into(), Recipe::Theta, "theta function");
    push("E_4".into(), Recipe::ClassicalE4, "normalized Eisenstein series");
    let eis = [
        (D::TRIVIAL, D::CHI8),
        (D::CHI8, D::TRIVIAL),
        (D::CHI_M4, D::CHI_M4),
        (D::TRIVIAL, D::CHI12),
        (D::CHI12, D::TRIVIAL),
        (D::CHI_M4, D::CHI_M3),
        (D::CHI_M3, D::CHI_M4),
        (D::TRIVIAL, D::CHI24),
        (D::CHI24, D::TRIVIAL),
        (D::CHI_M8, D::CHI_M3),
        (D::CHI_M3, D::CHI_M8),
    ];
    for (chi, psi) in eis {
        let spec = EisensteinSpec::new(4, chi, psi).expect("admissible");
        push(spec.to_string(), Recipe::Eisenstein(spec), "Eisenstein series");
    }
    for (j, f) in CHI8_LEVEL8_QUOTIENTS.iter().enumerate() {
        push(format!("f_{{4,8,chi8;{}}}", j + 1), Recipe::Eta(eq(f)), "level 8 newform, character chi8");
    }
    for (name, f) in TRIVIAL_CUSP_QUOTIENTS {
        push(name.into(), Recipe::Eta(eq(f)), "trivial-character cusp form");
    }
    let (a, b) = f412_parts();
    push(
        "f_{4,12}".into(),
        Recipe::Difference(Box::new(Recipe::Eta(a)), Box::new(Recipe::Eta(b))),
        "trivial-character cusp form (difference of eta quotients)",
    );
    for (j, f) in CHI8_LEVEL24_QUOTIENTS.iter().enumerate() {
        push(format!("f_{{4,24,chi8;{}}}", j + 1), Recipe::Eta(eq(f)), "level 24 newform, character chi8");
    }
    for (j, f) in CHI12_LEVEL12_QUOTIENTS.iter().enumerate() {
        push(format!("f_{{4,12,chi12;{}}}", j + 1), Recipe::Eta(eq(f)), "level 12 newform, character chi12");
    }
    for (j, f) in CHI12_LEVEL48_QUOTIENTS.iter().enumerate() {
        push(format!("u_{{4,48,chi12;{}}}", j + 1), Recipe::Eta(eq(f)), "level 48 quotient, character chi12");
    }
    for j in 0..6 {
        let base = Recipe::Eta(eq(CHI12_LEVEL48_QUOTIENTS[j / 2]));
        let residue = if j % 2 == 0 { 1 } else { 3 };
        push(
            format!("f_{{4,48,chi12;{}}}", j + 1),
            base.restrict(residue, 4),
            "level 48 newform span, character chi12 (residue-class restriction)",
        );
    }
    for (j, f) in CHI24_LEVEL24_QUOTIENTS.iter().enumerate() {
        push(format!("f_{{4,24,chi24;{}}}", j + 1), Recipe::Eta(eq(f)), "level 24 newform, character chi24");
    }
    forms
}

pub fn registry() -> &'static [NamedForm] {
    static REGISTRY: OnceLock<Vec<NamedForm>> = OnceLock::new();
    REGISTRY.get_or_init(build_registry)
}

/// Lower-cased name with `_`, braces and whitespace removed.
pub fn normalize_name(name: &str) -> String {
    name.chars()
        .filter(|c| !matches!(c, '_' | '{' | '}') && !c.is_whitespace())
        .flat_map(char::to_lowercase)
        .collect()
}

pub fn lookup(name: &str) -> Option<&'static NamedForm> {
    let key = normalize_name(name);
    registry().iter().find(|f| normalize_name(&f.name) == key)
}

/// Resolves a registry name, optionally written `name^r@d` for `name(dz)^r`.
pub fn resolve(expr: &str) -> Result<Recipe> {
    let (body, dil) = match expr.rsplit_once('@') {
        Some((b, d)) => (b, Some(d)),
        None => (expr, None),
    };
    let t = match dil {
        Some(d) => d
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&t| t >= 1)
            .ok_or_else(|| Error::Parse(format!("bad dilation in {expr:?}")))?,
        None => 1,
    };
    let (name, power) = match body.rsplit_once('^') {
        Some((n, p)) if !p.contains('}') && !p.is_empty() => (
            n,
            p.trim()
                .parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad power in {expr:?}")))?,
        ),
        _ => (body, 1),
    };
    let base = match lookup(name) {
        Some(f) => f.recipe.clone(),
        None => parse_eisenstein(name).ok_or_else(|| Error::UnknownName {
            name: name.to_string(),
            suggestions: near_matches(name),
        })?,
    };
    let base = if power == 1 {
        base
    } else {
        Recipe::Power(Box::new(base), power)
    };
    Ok(base.dilate(t))
}

fn parse_eisenstein(name: &str) -> Option<Recipe> {
    let key = normalize_name(name);
    let rest = key.strip_prefix('e')?;
    let parts: Vec<&str> = rest.split(',').collect();
    if parts.len() != 3 {
        return None;
    }
    let k: u32 = parts[0].parse().ok()?;
    let chi = DirichletCharacter::parse(parts[1]).ok()?;
    let psi = DirichletCharacter::parse(parts[2]).ok()?;
    EisensteinSpec::new(k, chi, psi).ok().map(Recipe::Eisenstein)
}

pub fn near_matches(name: &str) -> Vec<String> {
    let key = normalize_name(name);
    let mut scored: Vec<(usize, &str)> = registry()
        .iter()
        .map(|f| (strsim::levenshtein(&key, &normalize_name(&f.name)), f.name.as_str()))
        .collect();
    scored.sort();
    scored
        .into_iter()
        .filter(|(d, _)| *d <= 3)
        .take(5)
        .map(|(_, n)| n.to_string())
        .collect()
}

/// An eta quotient in the registry that breaks the weight-4 / integral-order
/// requirements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegistryAnomaly {
    pub name: String,
    pub quotient: String,
    pub exponent_sum: i64,
    pub order_numerator: i64,
}

fn collect_quotients<'a>(r: &'a Recipe, out: &mut Vec<&'a EtaQuotient>) {
    match r {
        Recipe::Eta(q) => out.push(q),
        Recipe::Difference(a, b) => {
            collect_quotients(a, out);
            collect_quotients(b, out);
        }
        Recipe::Dilate(i, _) | Recipe::Twist(i, _) | Recipe::Power(i, _) => collect_quotients(i, out),
        Recipe::Restrict { inner, .. } => collect_quotients(inner, out),
        _ => {}
    }
}

/// Checks `Σ r_i = 8` and `24 | Σ d_i r_i` for every registered quotient.
pub fn registry_anomalies() -> Vec<RegistryAnomaly> {
    let mut out = Vec::new();
    for form in registry() {
        let mut qs = Vec::new();
        collect_quotients(&form.recipe, &mut qs);
        for q in qs {
            let (s, o) = (q.exponent_sum(), q.order_numerator());
            if s != 8 || o % 24 != 0 || o < 24 {
                out.push(RegistryAnomaly {
                    name: form.name.clone(),
                    quotient: q.to_string(),
                    exponent_sum: s,
                    order_numerator: o,
                });
            }
        }
    }
    out
}

/// Registered quotients with identical factor data.
pub fn duplicate_quotients() -> Vec<(String, String)> {
    let forms = registry();
    let mut out = Vec::new();
    for (i, a) in forms.iter().enumerate() {
        for b in &forms[i + 1..] {
            if matches!(a.recipe, Recipe::Eta(_)) && a.recipe == b.recipe {
                out.push((a.name.clone(), b.name.clone()));
            }
        }
    }
    out
}
