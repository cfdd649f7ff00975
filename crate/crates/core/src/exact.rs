//! Exact rational arithmetic helpers: Bernoulli numbers, the Euler closed
//! form for even zeta values, and rationalization of multiprecision reals.
//!
//! All values are [`BigRational`] in lowest terms with positive denominator;
//! `num-rational` normalizes eagerly after every operation, so equality is a
//! plain canonical-form comparison.

use std::sync::Mutex;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::numerics::MPReal;

/// Exact binomial coefficient `C(n, k)`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Exact factorial `n!`.
pub fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= BigInt::from(i);
    }
    acc
}

fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Append-only cache of Bernoulli numbers `B_0..B_n`.
///
/// Values follow the generating function `t/(e^t - 1)`, so `B_1 = -1/2`.
/// The cache behaves as if guarded by a single writer; readers get clones.
pub struct BernoulliCache {
    values: Mutex<Vec<BigRational>>,
}

impl BernoulliCache {
    pub fn new() -> Self {
        BernoulliCache {
            values: Mutex::new(vec![BigRational::one()]),
        }
    }

    /// `B_n`, extending the cache as needed via the recurrence
    /// `sum_{j=0}^{n} C(n+1, j) B_j = 0`.
    pub fn get(&self, n: usize) -> BigRational {
        let mut values = self.values.lock().unwrap();
        while values.len() <= n {
            let m = values.len(); // computing B_m
            let mut acc = BigRational::zero();
            for (j, b) in values.iter().enumerate() {
                acc += BigRational::from(binomial(m as u64 + 1, j as u64)) * b;
            }
            let coeff = BigRational::from(binomial(m as u64 + 1, m as u64));
            values.push(-acc / coeff);
        }
        values[n].clone()
    }
}

impl Default for BernoulliCache {
    fn default() -> Self {
        Self::new()
    }
}

fn global_cache() -> &'static BernoulliCache {
    static CACHE: OnceLock<BernoulliCache> = OnceLock::new();
    CACHE.get_or_init(BernoulliCache::new)
}

/// The Bernoulli number `B_n` (shared process-wide cache).
pub fn bernoulli(n: usize) -> BigRational {
    global_cache().get(n)
}

/// Rational `q` with `zeta(2n) = q * pi^(2n)`, by Euler's formula
/// `q = (-1)^(n+1) B_{2n} 2^(2n) / (2 (2n)!)`.
pub fn zeta_even_closed_form(n: usize) -> BigRational {
    assert!(n >= 1, "zeta_even_closed_form requires n >= 1");
    let b = bernoulli(2 * n);
    let sign = if n % 2 == 1 {
        BigRational::one()
    } else {
        -BigRational::one()
    };
    let two_pow = BigRational::from(BigInt::from(2u32).pow(2 * n as u32));
    let fact = BigRational::from(factorial(2 * n as u64));
    sign * b * two_pow / (rational(2, 1) * fact)
}

/// Continued-fraction rationalization of a multiprecision real.
///
/// Returns the first convergent `p/q` with `q <= max_denominator` and
/// `|x - p/q| < 10^-(digits-8)`; `None` when no convergent meets the
/// tolerance, which signals "not plausibly rational at this precision/bound".
/// The 8 guard digits absorb evaluator round-off.
pub fn rationalize(x: &MPReal, max_denominator: &BigInt, digits: u32) -> Option<BigRational> {
    assert!(!max_denominator.is_zero() && max_denominator.is_positive());
    let target = x.to_rational();
    let tol = BigRational::new(BigInt::one(), BigInt::from(10u32).pow(digits.saturating_sub(8)));

    // Walk the continued-fraction expansion of `target`, testing convergents.
    let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
    let (mut p_cur, mut q_cur) = (target.to_integer(), BigInt::one());
    let mut frac = target.clone() - BigRational::from(p_cur.clone());
    loop {
        let cand = BigRational::new(p_cur.clone(), q_cur.clone());
        if (&target - &cand).abs() < tol {
            return Some(cand);
        }
        if frac.is_zero() {
            return None;
        }
        let inv = frac.recip();
        let a = inv.to_integer();
        frac = inv - BigRational::from(a.clone());
        let p_next = &a * &p_cur + &p_prev;
        let q_next = &a * &q_cur + &q_prev;
        if &q_next > max_denominator {
            return None;
        }
        (p_prev, q_prev) = (p_cur, q_cur);
        (p_cur, q_cur) = (p_next, q_next);
    }
}
