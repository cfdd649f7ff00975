//! Lattice basis reduction with exact rational Gram-Schmidt data and the
//! standard parameter 3/4; no floating-point arithmetic anywhere, so runs
//! are bit-for-bit reproducible.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LllError {
    #[error("basis rows must be nonempty and of equal length")]
    ShapeMismatch,
    #[error("basis rows are linearly dependent")]
    DependentRows,
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn rational(n: BigInt) -> BigRational {
    BigRational::from(n)
}

/// Rounded division to nearest integer.
fn div_nearest(n: &BigInt, d: &BigInt) -> BigInt {
    use num_integer::Integer;
    let (q, r) = n.div_rem(d);
    if BigInt::from(2) * r.abs() > d.abs() {
        if (n.sign() == d.sign()) || n.is_zero() {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// All-integer LLL state: `lam[i][j] = mu_{i,j} * d[j+1]` for `j < i` and
/// the sub-Gram determinants `d[0..=n]` with `d[0] = 1`. All divisions in
/// the updates are exact.
struct IntegerLll {
    b: Vec<Vec<BigInt>>,
    lam: Vec<Vec<BigInt>>,
    d: Vec<BigInt>,
}

impl IntegerLll {
    fn init(basis: &[Vec<BigInt>]) -> Result<Self, LllError> {
        let n = basis.len();
        let mut lam = vec![vec![BigInt::zero(); n]; n];
        let mut d = vec![BigInt::one(); n + 1];
        for i in 0..n {
            for j in 0..=i {
                let mut u = dot(&basis[i], &basis[j]);
                for k in 0..j {
                    u = (&d[k + 1] * u - &lam[i][k] * &lam[j][k]) / &d[k];
                }
                if j < i {
                    lam[i][j] = u;
                } else {
                    if u.is_zero() || u.is_negative() {
                        return Err(LllError::DependentRows);
                    }
                    d[i + 1] = u;
                }
            }
        }
        Ok(IntegerLll {
            b: basis.to_vec(),
            lam,
            d,
        })
    }

    /// Size-reduces row `k` against row `l` (`l < k`).
    fn reduce(&mut self, k: usize, l: usize) {
        if BigInt::from(2) * self.lam[k][l].abs() <= self.d[l + 1].abs() {
            return;
        }
        let q = div_nearest(&self.lam[k][l], &self.d[l + 1]);
        let bl = self.b[l].clone();
        for (x, y) in self.b[k].iter_mut().zip(&bl) {
            *x -= &q * y;
        }
        let lam_l = self.lam[l].clone();
        self.lam[k][l] -= &q * &self.d[l + 1];
        for i in 0..l {
            let delta = &q * &lam_l[i];
            self.lam[k][i] -= delta;
        }
    }

    /// Exchanges rows `k` and `k-1`, updating the integer Gram data.
    fn swap(&mut self, k: usize) {
        let n = self.b.len();
        self.b.swap(k, k - 1);
        for j in 0..k.saturating_sub(1) {
            let tmp = self.lam[k][j].clone();
            self.lam[k][j] = self.lam[k - 1][j].clone();
            self.lam[k - 1][j] = tmp;
        }
        let lam = self.lam[k][k - 1].clone();
        let b_new = (&self.d[k - 1] * &self.d[k + 1] + &lam * &lam) / &self.d[k];
        for i in (k + 1)..n {
            let t = self.lam[i][k].clone();
            self.lam[i][k] = (&self.d[k + 1] * &self.lam[i][k - 1] - &lam * &t) / &self.d[k];
            self.lam[i][k - 1] = (&b_new * &t + &lam * &self.lam[i][k]) / &self.d[k + 1];
        }
        self.d[k] = b_new;
    }
}

/// LLL reduction with delta = 3/4 in exact integer arithmetic (the
/// all-integer formulation; no rationals, no floats), reproducible
/// bit-for-bit across runs.
pub fn lll_reduce(basis: &[Vec<BigInt>]) -> Result<Vec<Vec<BigInt>>, LllError> {
    let n = basis.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let width = basis[0].len();
    if basis.iter().any(|row| row.len() != width) || width == 0 {
        return Err(LllError::ShapeMismatch);
    }
    let mut state = IntegerLll::init(basis)?;
    let mut k = 1usize;
    while k < n {
        state.reduce(k, k - 1);
        // Lovasz test at delta = 3/4 in integer form:
        // swap iff 4 d_{k+1} d_{k-1} < 3 d_k^2 - 4 lam_{k,k-1}^2.
        let lhs = BigInt::from(4) * &state.d[k + 1] * &state.d[k - 1];
        let rhs = BigInt::from(3) * &state.d[k] * &state.d[k]
            - BigInt::from(4) * &state.lam[k][k - 1] * &state.lam[k][k - 1];
        if lhs < rhs {
            state.swap(k);
            k = k.max(2) - 1;
        } else {
            for l in (0..k.saturating_sub(1)).rev() {
                state.reduce(k, l);
            }
            k += 1;
        }
    }
    Ok(state.b)
}

/// Integer determinant of a square matrix by fraction-free elimination;
/// used by tests to check lattice invariance.
pub fn determinant(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .map(|row| row.iter().cloned().map(rational).collect())
        .collect();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return BigInt::zero();
        };
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col].clone();
        let inv = a[col][col].recip();
        let pivot_row = a[col].clone();
        for row in a.iter_mut().skip(col + 1) {
            let factor = &row[col] * &inv;
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(col) {
                let sub = &factor * p;
                *x -= sub;
            }
        }
    }
    debug_assert!(det.is_integer());
    det.to_integer()
}
