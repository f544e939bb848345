//! Truncated power series in `q` with exact rational coefficients.
//!
//! A [`QSeries`] stores the coefficients of `q^0 .. q^{prec-1}` densely. Binary
//! operations truncate to the smaller precision; asking for a coefficient at or
//! beyond the precision is an error rather than a silent zero.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::rational::{format_rational, rat, Rational};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QSeries {
    coeffs: Vec<Rational>,
}

impl QSeries {
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::ZeroPrecision);
        }
        Ok(Self { coeffs })
    }

    pub fn from_integers<I: IntoIterator<Item = i64>>(coeffs: I) -> Result<Self> {
        Self::from_coeffs(coeffs.into_iter().map(rat).collect())
    }

    pub(crate) fn from_bigints(coeffs: Vec<BigInt>) -> Self {
        assert!(!coeffs.is_empty());
        Self {
            coeffs: coeffs.into_iter().map(Rational::from_integer).collect(),
        }
    }

    pub fn zero(prec: usize) -> Self {
        assert!(prec > 0, "precision must be positive");
        Self {
            coeffs: vec![Rational::zero(); prec],
        }
    }

    pub fn one(prec: usize) -> Self {
        Self::constant(Rational::one(), prec)
    }

    pub fn constant(c: Rational, prec: usize) -> Self {
        let mut s = Self::zero(prec);
        s.coeffs[0] = c;
        s
    }

    /// `c q^n`, or the zero series if `n >= prec`.
    pub fn monomial(c: Rational, n: usize, prec: usize) -> Self {
        let mut s = Self::zero(prec);
        if n < prec {
            s.coeffs[n] = c;
        }
        s
    }

    pub fn prec(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coefficient(&self, n: usize) -> Result<&Rational> {
        self.coeffs.get(n).ok_or(Error::OutOfPrecision {
            index: n,
            prec: self.prec(),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Index of the first nonzero coefficient, if any.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn truncate(&self, prec: usize) -> Self {
        assert!(prec > 0, "precision must be positive");
        Self {
            coeffs: self.coeffs[..prec.min(self.prec())].to_vec(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiplies by `q^e`, keeping the precision.
    pub fn shift(&self, e: usize) -> Self {
        let mut out = Self::zero(self.prec());
        for (n, c) in self.coeffs.iter().enumerate().take(self.prec().saturating_sub(e)) {
            out.coeffs[n + e] = c.clone();
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let p = self.prec().min(other.prec());
        Self {
            coeffs: (0..p).map(|n| &self.coeffs[n] + &other.coeffs[n]).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let p = self.prec().min(other.prec());
        Self {
            coeffs: (0..p).map(|n| &self.coeffs[n] - &other.coeffs[n]).collect(),
        }
    }

    /// Cauchy product truncated at the smaller precision.
    pub fn mul(&self, other: &Self) -> Self {
        let p = self.prec().min(other.prec());
        if self.is_integral() && other.is_integral() {
            let a: Vec<BigInt> = self.coeffs[..p].iter().map(|c| c.to_integer()).collect();
            let b: Vec<BigInt> = other.coeffs[..p].iter().map(|c| c.to_integer()).collect();
            return Self::from_bigints(mul_integers(&a, &b, p));
        }
        let mut out = vec![Rational::zero(); p];
        for (i, a) in self.coeffs[..p].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..p - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Self { coeffs: out }
    }

    /// Multiplicative inverse of a unit series.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::NonUnitInverse);
        }
        let p = self.prec();
        let inv0 = c0.recip();
        let mut out: Vec<Rational> = Vec::with_capacity(p);
        out.push(inv0.clone());
        for n in 1..p {
            let mut s = Rational::zero();
            for k in 1..=n {
                let a = &self.coeffs[k];
                if !a.is_zero() {
                    s += a * &out[n - k];
                }
            }
            out.push(-s * &inv0);
        }
        Ok(Self { coeffs: out })
    }

    /// `f^e`; negative exponents invert first and require a unit series.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut exp = e.unsigned_abs();
        let mut acc = Self::one(self.prec());
        let mut sq = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&sq);
            }
            exp >>= 1;
            if exp > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc)
    }

    /// `f(q) ↦ f(q^d)`, truncated at the input precision.
    pub fn dilate(&self, d: usize) -> Self {
        assert!(d >= 1, "dilation factor must be positive");
        let mut out = Self::zero(self.prec());
        for (n, c) in self.coeffs.iter().enumerate() {
            let m = n * d;
            if m >= self.prec() {
                break;
            }
            out.coeffs[m] = c.clone();
        }
        out
    }

    /// `Σ_{n≥1} χ(n) a(n) q^n`; the constant term is dropped.
    pub fn twist(&self, chi: DirichletCharacter) -> Self {
        let mut coeffs = Vec::with_capacity(self.prec());
        coeffs.push(Rational::zero());
        for (n, c) in self.coeffs.iter().enumerate().skip(1) {
            coeffs.push(match chi.value(n as i64) {
                0 => Rational::zero(),
                1 => c.clone(),
                _ => -c,
            });
        }
        Self { coeffs }
    }

    /// Keeps the coefficients at `n ≡ r (mod m)` and zeroes the rest.
    pub fn restrict_residue(&self, r: usize, m: usize) -> Self {
        assert!(m >= 1 && r < m, "residue class {r} mod {m} is malformed");
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| if n % m == r { c.clone() } else { Rational::zero() })
                .collect(),
        }
    }

    /// Coefficients as `(n, "p/q")` pairs.
    pub fn dump(&self) -> Vec<(usize, String)> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| (n, format_rational(c)))
            .collect()
    }
}

pub(crate) fn mul_integers(a: &[BigInt], b: &[BigInt], p: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); p];
    for (i, x) in a.iter().enumerate().take(p) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(p - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

impl Add for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        QSeries::add(self, rhs)
    }
}

impl Sub for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        QSeries::sub(self, rhs)
    }
}

impl Mul for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        QSeries::mul(self, rhs)
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Debug for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QSeries[{}](", self.prec())?;
        let shown: Vec<String> = self.coeffs.iter().take(12).map(format_rational).collect();
        write!(f, "{}", shown.join(", "))?;
        if self.prec() > 12 {
            write!(f, ", ...")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = format_rational(&c.abs());
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match n {
                0 => write!(f, "{mag}")?,
                _ if c.abs().is_one() => write!(f, "q^{n}")?,
                _ => write!(f, "{mag}*q^{n}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(q^{})", self.prec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;
    use proptest::prelude::*;

    fn s(v: &[i64]) -> QSeries {
        QSeries::from_integers(v.iter().copied()).unwrap()
    }

    #[test]
    fn binomial_square() {
        assert_eq!(s(&[1, 1, 0]).mul(&s(&[1, 1, 0])), s(&[1, 2, 1]));
    }

    #[test]
    fn additive_inverse() {
        let f = s(&[3, -1, 4, 1, -5]);
        assert!(f.add(&f.scale(&rat(-1))).is_zero());
    }

    #[test]
    fn sum_of_two_squares_at_one() {
        let theta = s(&[1, 2, 0, 0, 2, 0]);
        assert_eq!(theta.mul(&theta).coefficient(1).unwrap(), &rat(4));
    }

    #[test]
    fn precision_is_min_of_operands() {
        let a = s(&[1, 1, 1, 1]);
        let b = s(&[1, 1]);
        assert_eq!(a.add(&b).prec(), 2);
        assert_eq!(a.mul(&b).prec(), 2);
    }

    #[test]
    fn geometric_series() {
        let inv = s(&[1, -1, 0, 0, 0, 0]).pow(-1).unwrap();
        assert_eq!(inv, s(&[1, 1, 1, 1, 1, 1]));
        assert_eq!(s(&[0, 1, 0]).pow(-1), Err(Error::NonUnitInverse));
    }

    #[test]
    fn powers() {
        let f = s(&[2, 3, 5]);
        assert_eq!(f.pow(0).unwrap(), QSeries::one(3));
        assert_eq!(s(&[1, -1, 0, 0]).pow(4).unwrap().coefficient(2).unwrap(), &rat(6));
    }

    #[test]
    fn dilation() {
        assert_eq!(s(&[1, 1, 0]).dilate(2), s(&[1, 0, 1]));
        let f = s(&[1, 2, 3, 4]);
        assert_eq!(f.dilate(1), f);
    }

    #[test]
    fn twist_examples() {
        let theta = s(&[1, 2, 0, 0, 2, 0, 0, 0, 0, 2]);
        assert_eq!(
            theta.twist(DirichletCharacter::CHI4),
            s(&[0, 2, 0, 0, 0, 0, 0, 0, 0, 2])
        );
        let f = s(&[7, 1, 1, 1]);
        assert_eq!(f.twist(DirichletCharacter::TRIVIAL), s(&[0, 1, 1, 1]));
        assert_eq!(f.twist(DirichletCharacter::CHI_M4), s(&[0, 1, 0, -1]));
    }

    #[test]
    fn restriction() {
        assert_eq!(s(&[1, 1, 1, 1]).restrict_residue(1, 4), s(&[0, 1, 0, 0]));
        let f = s(&[5, 1, 2, 3, 4, 5, 6, 7, 8]);
        let parts = f
            .restrict_residue(1, 4)
            .add(&f.restrict_residue(3, 4))
            .add(&f.restrict_residue(0, 2));
        assert_eq!(parts, f);
    }

    #[test]
    fn coefficient_bounds() {
        assert_eq!(s(&[1, 2]).coefficient(1).unwrap(), &rat(2));
        assert_eq!(QSeries::zero(6).coefficient(5).unwrap(), &rat(0));
        assert_eq!(
            s(&[1, 2]).coefficient(2),
            Err(Error::OutOfPrecision { index: 2, prec: 2 })
        );
    }

    #[test]
    fn rational_multiplication_path() {
        let a = QSeries::from_coeffs(vec![frac(1, 2), frac(1, 3)]).unwrap();
        assert_eq!(a.mul(&a).coeffs(), &[frac(1, 4), frac(1, 3)]);
    }

    #[test]
    fn display() {
        assert_eq!(s(&[1, -2, 0, 1]).to_string(), "1 - 2*q^1 + q^3 + O(q^4)");
    }

    fn series(prec: usize) -> impl Strategy<Value = QSeries> {
        prop::collection::vec((-20i64..20, 1i64..5), prec).prop_map(|v| {
            QSeries::from_coeffs(v.into_iter().map(|(p, q)| frac(p, q)).collect()).unwrap()
        })
    }

    fn unit_series(prec: usize) -> impl Strategy<Value = QSeries> {
        (series(prec), 1i64..6).prop_map(|(mut f, c)| {
            f.coeffs[0] = rat(c);
            f
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn ring_laws(a in series(64), b in series(64), c in series(64)) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        }

        #[test]
        fn pow_inverse_pairs(f in unit_series(24), e in 1i64..=6) {
            prop_assert_eq!(f.pow(e).unwrap().mul(&f.pow(-e).unwrap()), QSeries::one(24));
        }

        #[test]
        fn dilate_composes(f in series(48), a in 1usize..6, b in 1usize..6) {
            prop_assert_eq!(f.dilate(a).dilate(b), f.dilate(a * b));
        }

        #[test]
        fn dilate_is_multiplicative(f in series(40), g in series(40), d in 1usize..5) {
            prop_assert_eq!(f.mul(&g).dilate(d), f.dilate(d).mul(&g.dilate(d)));
        }

        #[test]
        fn double_twist_is_principal(f in series(64), idx in 0usize..8) {
            let chi = DirichletCharacter::ALL_USED[idx];
            let m = chi.modulus() as usize;
            let expected: Vec<Rational> = f.coeffs().iter().enumerate().map(|(n, c)| {
                if n == 0 || (!chi.is_trivial() && num_integer::gcd(n, m) > 1) {
                    Rational::zero()
                } else {
                    c.clone()
                }
            }).collect();
            let twice = f.twist(chi).twist(chi);
            prop_assert_eq!(twice.coeffs(), &expected[..]);
        }

        #[test]
        fn integral_series_stay_integral(a in prop::collection::vec(-50i64..50, 30),
                                         b in prop::collection::vec(-50i64..50, 30), d in 1usize..4) {
            let a = QSeries::from_integers(a).unwrap();
            let b = QSeries::from_integers(b).unwrap();
            prop_assert!(a.add(&b).is_integral());
            prop_assert!(a.mul(&b).is_integral());
            prop_assert!(a.dilate(d).is_integral());
        }
    }
}
