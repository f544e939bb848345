//! Exact linear algebra over ℚ for the basis matrices.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Reduces `m` to reduced row echelon form in place and returns the pivot columns.
pub fn rref(m: &mut [Vec<Rational>]) -> Vec<usize> {
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for x in m[row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                let (src, dst) = split_pair(m, row, r);
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    if !s.is_zero() {
                        *d -= &factor * s;
                    }
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

fn split_pair<T>(m: &mut [T], a: usize, b: usize) -> (&T, &mut T) {
    if a < b {
        let (lo, hi) = m.split_at_mut(b);
        (&lo[a], &mut hi[0])
    } else {
        let (lo, hi) = m.split_at_mut(a);
        (&hi[0], &mut lo[b])
    }
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// A basis of `{x : A x = 0}` for `A` given by rows with `ncols` columns.
pub fn kernel(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); ncols];
            v[f] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

/// Inverts a square matrix, or returns `None` if it is singular.
pub fn invert(a: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Solves `A c = t` for a full-column-rank `A`, given by its rows.
///
/// A set of `dim` independent rows is chosen greedily in row order and the
/// corresponding square block is inverted once; each solve then checks the
/// candidate against every row.
#[derive(Clone, Debug)]
pub struct LinearSolver {
    rows: Vec<Vec<Rational>>,
    pivot_rows: Vec<usize>,
    inverse: Vec<Vec<Rational>>,
}

impl LinearSolver {
    /// Fails with the rank if the columns are dependent.
    pub fn new(rows: Vec<Vec<Rational>>, dim: usize) -> std::result::Result<Self, usize> {
        let mut echelon: Vec<(usize, Vec<Rational>)> = Vec::new();
        let mut pivot_rows = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if pivot_rows.len() == dim {
                break;
            }
            let mut v = row.clone();
            for (pc, e) in &echelon {
                if !v[*pc].is_zero() {
                    let f = v[*pc].clone() / &e[*pc];
                    for (x, y) in v.iter_mut().zip(e) {
                        *x -= &f * y;
                    }
                }
            }
            if let Some(pc) = v.iter().position(|x| !x.is_zero()) {
                echelon.push((pc, v));
                pivot_rows.push(i);
            }
        }
        if pivot_rows.len() < dim {
            return Err(pivot_rows.len());
        }
        let block: Vec<Vec<Rational>> = pivot_rows.iter().map(|&r| rows[r].clone()).collect();
        let inverse = invert(&block).expect("independent rows give an invertible block");
        Ok(Self {
            rows,
            pivot_rows,
            inverse,
        })
    }

    pub fn pivot_rows(&self) -> &[usize] {
        &self.pivot_rows
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    /// Returns `c` with `A c = t`, or the first row where no solution fits.
    pub fn solve(&self, t: &[Rational]) -> Result<Vec<Rational>> {
        if t.len() < self.rows.len() {
            return Err(Error::DimensionMismatch {
                expected: self.rows.len(),
                actual: t.len(),
            });
        }
        let c: Vec<Rational> = self
            .inverse
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&self.pivot_rows)
                    .filter(|(a, _)| !a.is_zero())
                    .map(|(a, &r)| a * &t[r])
                    .sum()
            })
            .collect();
        if let Some(index) = self.first_residual(&c, t) {
            return Err(Error::Inconsistent { index });
        }
        Ok(c)
    }

    /// First row `n` with `(A c)_n ≠ t_n`.
    pub fn first_residual(&self, c: &[Rational], t: &[Rational]) -> Option<usize> {
        self.rows.iter().enumerate().position(|(n, row)| {
            let lhs: Rational = row
                .iter()
                .zip(c)
                .filter(|(a, _)| !a.is_zero())
                .map(|(a, x)| a * x)
                .sum();
            lhs != t[n]
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect()
    }

    #[test]
    fn kernel_of_dependent_columns() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&a), 2);
        let k = kernel(&a, 3);
        assert_eq!(k.len(), 1);
        for row in &a {
            let s: Rational = row.iter().zip(&k[0]).map(|(x, y)| x * y).sum();
            assert!(s.is_zero());
        }
    }

    #[test]
    fn solver_detects_inconsistency() {
        let a = m(&[&[1, 0], &[0, 1], &[1, 1]]);
        let s = LinearSolver::new(a, 2).unwrap();
        assert_eq!(s.solve(&[rat(2), rat(3), rat(5)]).unwrap(), vec![rat(2), rat(3)]);
        assert_eq!(
            s.solve(&[rat(2), rat(3), rat(6)]),
            Err(Error::Inconsistent { index: 2 })
        );
    }

    #[test]
    fn solver_skips_dependent_rows() {
        let a = m(&[&[0, 0], &[1, 1], &[2, 2], &[1, -1]]);
        let s = LinearSolver::new(a, 2).unwrap();
        assert_eq!(s.pivot_rows(), &[1, 3]);
        assert_eq!(LinearSolver::new(m(&[&[1, 1], &[2, 2]]), 2).unwrap_err(), 1);
    }

    proptest! {
        #[test]
        fn inverse_roundtrip(v in proptest::collection::vec(-5i64..=5, 9)) {
            let a: Vec<Vec<Rational>> = v.chunks(3).map(|r| r.iter().map(|&x| rat(x)).collect()).collect();
            match invert(&a) {
                Some(inv) => {
                    for i in 0..3 {
                        for j in 0..3 {
                            let s: Rational = (0..3).map(|k| &a[i][k] * &inv[k][j]).sum();
                            prop_assert_eq!(s, rat((i == j) as i64));
                        }
                    }
                }
                None => prop_assert!(rank(&a) < 3),
            }
        }

        #[test]
        fn rank_nullity(v in proptest::collection::vec(-3i64..=3, 12)) {
            let a: Vec<Vec<Rational>> = v.chunks(4).map(|r| r.iter().map(|&x| rat(x)).collect()).collect();
            prop_assert_eq!(rank(&a) + kernel(&a, 4).len(), 4);
        }
    }
}
