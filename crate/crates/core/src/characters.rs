//! Real Dirichlet characters given by Kronecker symbols, and generalized
//! Bernoulli numbers for Eisenstein constant terms.

use std::fmt;

use num_bigint::BigInt;
use num_integer::{binomial, Integer};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{rat, Rational};

/// The Kronecker symbol `(m/n)` for nonzero `m` and any integer `n`.
pub fn kronecker(m: i64, n: i64) -> Result<i8> {
    if m == 0 {
        return Err(Error::ZeroDiscriminant);
    }
    Ok(kronecker_unchecked(m, n))
}

fn kronecker_unchecked(m: i64, n: i64) -> i8 {
    let (m, mut n) = (m as i128, n as i128);
    if n == 0 {
        return if m.abs() == 1 { 1 } else { 0 };
    }
    let mut sign: i8 = 1;
    if n < 0 {
        n = -n;
        if m < 0 {
            sign = -sign;
        }
    }
    let twos = n.trailing_zeros();
    if twos > 0 {
        if m % 2 == 0 {
            return 0;
        }
        if twos % 2 == 1 && matches!(m.rem_euclid(8), 3 | 5) {
            sign = -sign;
        }
        n >>= twos;
    }
    sign * jacobi(m.rem_euclid(n), n)
}

/// Jacobi symbol `(a/n)` for odd positive `n` and `0 <= a < n`.
fn jacobi(mut a: i128, mut n: i128) -> i8 {
    let mut result: i8 = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// A real character `χ_m = (m/·)`, identified by its discriminant `m`.
///
/// Discriminant 1 is the trivial character of conductor 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DirichletCharacter {
    discriminant: i64,
}

impl DirichletCharacter {
    pub const TRIVIAL: Self = Self { discriminant: 1 };
    pub const CHI4: Self = Self { discriminant: 4 };
    pub const CHI8: Self = Self { discriminant: 8 };
    pub const CHI12: Self = Self { discriminant: 12 };
    pub const CHI24: Self = Self { discriminant: 24 };
    pub const CHI_M3: Self = Self { discriminant: -3 };
    pub const CHI_M4: Self = Self { discriminant: -4 };
    pub const CHI_M8: Self = Self { discriminant: -8 };

    /// Every character the bases are built from.
    pub const ALL_USED: [Self; 8] = [
        Self::TRIVIAL,
        Self::CHI4,
        Self::CHI8,
        Self::CHI12,
        Self::CHI24,
        Self::CHI_M3,
        Self::CHI_M4,
        Self::CHI_M8,
    ];

    pub fn new(discriminant: i64) -> Result<Self> {
        if discriminant == 0 {
            return Err(Error::ZeroDiscriminant);
        }
        Ok(Self { discriminant })
    }

    pub fn discriminant(&self) -> i64 {
        self.discriminant
    }

    pub fn is_trivial(&self) -> bool {
        self.discriminant == 1
    }

    /// Period of `n ↦ (m/n)`: `|m|` for discriminants `≡ 0, 1 (mod 4)`,
    /// `4|m|` otherwise.
    pub fn modulus(&self) -> u64 {
        let m = self.discriminant;
        if m.rem_euclid(4) <= 1 {
            m.unsigned_abs()
        } else {
            4 * m.unsigned_abs()
        }
    }

    pub fn value(&self, n: i64) -> i8 {
        if self.is_trivial() {
            return 1;
        }
        kronecker_unchecked(self.discriminant, n)
    }

    /// `χ(-1)`.
    pub fn parity(&self) -> i8 {
        self.value(-1)
    }

    pub fn is_even(&self) -> bool {
        self.parity() == 1
    }

    pub fn label(&self) -> String {
        if self.is_trivial() {
            "1".to_string()
        } else {
            format!("chi{}", self.discriminant)
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        if t == "1" {
            return Ok(Self::TRIVIAL);
        }
        let digits = t
            .strip_prefix("chi_")
            .or_else(|| t.strip_prefix("chi"))
            .ok_or_else(|| Error::Parse(format!("not a character: {s:?}")))?;
        let m: i64 = digits
            .trim_matches(|c| c == '{' || c == '}')
            .parse()
            .map_err(|_| Error::Parse(format!("not a character: {s:?}")))?;
        Self::new(m)
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

pub fn character_value(chi: DirichletCharacter, n: i64) -> i8 {
    chi.value(n)
}

/// Bernoulli numbers `B_0..=B_k` with `B_1 = -1/2`, from
/// `Σ_{j<m} C(m+1, j) B_j = -(m+1) B_m`.
pub fn bernoulli_numbers(k: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(k + 1);
    b.push(Rational::one());
    for m in 1..=k {
        let mut acc = Rational::zero();
        for (j, bj) in b.iter().enumerate() {
            acc += Rational::from_integer(binomial(BigInt::from(m + 1), BigInt::from(j))) * bj;
        }
        b.push(-acc / rat(m as i64 + 1));
    }
    b
}

pub fn bernoulli_number(k: usize) -> Rational {
    bernoulli_numbers(k).pop().expect("nonempty")
}

/// `B_k(x) = Σ_j C(k, j) B_j x^{k-j}`.
pub fn bernoulli_polynomial(k: usize, x: &Rational) -> Rational {
    let b = bernoulli_numbers(k);
    let mut acc = Rational::zero();
    for (j, bj) in b.iter().enumerate() {
        let c = Rational::from_integer(binomial(BigInt::from(k), BigInt::from(j)));
        acc += c * bj * num_traits::pow(x.clone(), k - j);
    }
    acc
}

/// Generalized Bernoulli number `B_{k,ψ} = f^{k-1} Σ_{a=1}^{f} ψ(a) B_k(a/f)`
/// with `f` the modulus of `ψ`. The trivial character gives the ordinary `B_k`.
pub fn generalized_bernoulli(k: usize, psi: DirichletCharacter) -> Rational {
    assert!(k >= 1, "generalized Bernoulli numbers are indexed from k = 1");
    if psi.is_trivial() {
        return bernoulli_number(k);
    }
    let f = psi.modulus() as i64;
    let mut acc = Rational::zero();
    for a in 1..=f {
        let v = psi.value(a);
        if v == 0 {
            continue;
        }
        let x = Rational::new(BigInt::from(a), BigInt::from(f));
        acc += rat(v as i64) * bernoulli_polynomial(k, &x);
    }
    acc * Rational::from_integer(BigInt::from(f).pow(k as u32 - 1))
}

/// Whether `gcd(n, modulus) > 1`, i.e. `χ(n) = 0` for a nontrivial character.
pub fn shares_factor(chi: DirichletCharacter, n: i64) -> bool {
    !chi.is_trivial() && n.gcd(&(chi.modulus() as i64)) > 1
}
