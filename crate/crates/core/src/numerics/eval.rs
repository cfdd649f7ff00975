//! Numerical evaluation of iterated integrals and (regularized) Euler sums.
//!
//! A convergent word with endpoints `(0, 1)` is evaluated by composing paths
//! at the midpoint: the lower half is a nested series in `t = 1/2` directly,
//! the upper half becomes one after the change of variable `t -> 1 - t`,
//! which maps the letters `{0, 1, -1}` to `{1, 0, 2}`. Every series then has
//! convergence ratio at most 1/2 (the letter 2 gives 1/4), and all power
//! series coefficients are bounded by 1 in absolute value, so truncating at
//! `N` terms leaves a tail below `2^-N`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{expand_leading_zeros, shuffle_regularize, stuffle_regularize};
use crate::words::{period_sign, rho, unrho, IIWord, Letter, SignedComposition};

use super::mpreal::{bits_for_digits, div_round, shr_round, MPReal};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    /// Boundary letters violate convergence (divergent at 0 or 1).
    #[error("divergent word: boundary letters violate convergence")]
    DivergentWord,
    /// Endpoints `(-1, 1)` cross the interior singularity at 0; such words
    /// are only meaningful modulo products and carry no direct period here.
    #[error("unsupported endpoints for direct evaluation")]
    UnsupportedEndpoints,
}

/// Series terms needed for `digits` decimal digits at ratio 1/2.
fn terms_for_digits(digits: u32) -> usize {
    ((digits as u64 + 10) * 3322 / 1000) as usize + 24
}

/// Values of `I(0; prefix; 1/2)` for every prefix of `letters`, where the
/// letters live in `{0, 1, -1, 2}`. Entry `i` of the result is the length-`i`
/// prefix value. The first letter must be nonzero unless the list is empty.
fn half_path_prefix_values(letters: &[i8], nterms: usize, bits: u32) -> Vec<MPReal> {
    // coeffs[n] = fixed-point coefficient of t^n of the current prefix.
    let mut coeffs: Vec<BigInt> = vec![BigInt::zero(); nterms + 1];
    coeffs[0] = BigInt::one() << bits;
    let mut values = Vec::with_capacity(letters.len() + 1);
    let eval_at_half = |coeffs: &[BigInt]| -> MPReal {
        let mut acc = BigInt::zero();
        for c in coeffs.iter().rev() {
            acc = shr_round(&acc, 1) + c;
        }
        MPReal {
            mant: acc,
            bits,
        }
    };
    values.push(eval_at_half(&coeffs));
    for &letter in letters {
        let mut next: Vec<BigInt> = vec![BigInt::zero(); nterms + 1];
        match letter {
            0 => {
                // Integration against dt/t divides each coefficient by n.
                debug_assert!(coeffs[0].is_zero(), "leading zero letter in half path");
                for n in 1..=nterms {
                    next[n] = div_round(&coeffs[n], &BigInt::from(n));
                }
            }
            1 | -1 => {
                // beta_N = -(a^-N / N) * sum_{n<N} alpha_n a^n, a^2 = 1.
                let mut running = BigInt::zero();
                for n in 1..=nterms {
                    let prev = &coeffs[n - 1];
                    if letter == 1 || (n - 1) % 2 == 0 {
                        running += prev;
                    } else {
                        running -= prev;
                    }
                    let b = div_round(&running, &BigInt::from(n));
                    // the prefactor -(a^-N) is +1 only for a = -1, odd N
                    next[n] = if letter == -1 && n % 2 == 1 { b } else { -b };
                }
            }
            2 => {
                // beta_N = -(1/N) sum_{n<N} alpha_n 2^(n-N), via the
                // running average q_N = (q_{N-1} + alpha_{N-1}) / 2.
                let mut running = BigInt::zero();
                for n in 1..=nterms {
                    running = shr_round(&(&running + &coeffs[n - 1]), 1);
                    next[n] = -div_round(&running, &BigInt::from(n));
                }
            }
            other => panic!("letter out of evaluation alphabet: {other}"),
        }
        coeffs = next;
        values.push(eval_at_half(&coeffs));
    }
    values
}

/// Orientation of arbitrary endpoints in `{0, 1, -1}` onto `(0, 1)`:
/// returns the sign and the reoriented interior, or `None` for the
/// `(-1, 1)`-type pairs that cross the singularity at 0.
fn orient(w: &IIWord) -> Option<(i8, Vec<Letter>, bool)> {
    if w.start == w.end {
        return Some((0, Vec::new(), false));
    }
    let mut sign = 1i8;
    let mut start = w.start;
    let mut end = w.end;
    let mut interior = w.interior.clone();
    if end == Letter::Zero {
        interior.reverse();
        std::mem::swap(&mut start, &mut end);
        if interior.len() % 2 == 1 {
            sign = -sign;
        }
    }
    if end == Letter::Minus {
        for l in &mut interior {
            *l = l.negate();
        }
        start = start.negate();
        end = end.negate();
    }
    debug_assert_eq!(end, Letter::Plus);
    if start == Letter::Minus {
        return None;
    }
    let empty = interior.is_empty();
    Some((sign, interior, empty))
}

/// Value of the iterated integral `I(start; interior; end)` to `digits`
/// decimal digits. The word endpoints are the integration limits; the
/// period-map sign is *not* applied here (see [`eval_composition`]).
pub fn eval_word(w: &IIWord, digits: u32) -> Result<MPReal, EvalError> {
    let bits = bits_for_digits(digits);
    if w.interior.is_empty() {
        // the empty word is the unit regardless of endpoints
        return Ok(MPReal::one(bits));
    }
    let Some((sign, interior, _)) = orient(w) else {
        return Err(EvalError::UnsupportedEndpoints);
    };
    if sign == 0 {
        // equal endpoints: the constant path
        return Ok(MPReal::zero(bits));
    }
    if interior.first() == Some(&Letter::Zero) || interior.last() == Some(&Letter::Plus) {
        return Err(EvalError::DivergentWord);
    }
    let nterms = terms_for_digits(digits);
    let lower: Vec<i8> = interior.iter().map(|l| l.value()).collect();
    let upper: Vec<i8> = interior.iter().rev().map(|l| 1 - l.value()).collect();
    let lower_vals = half_path_prefix_values(&lower, nterms, bits);
    let upper_vals = half_path_prefix_values(&upper, nterms, bits);
    let w_len = interior.len();
    let mut acc = MPReal::zero(bits);
    for i in 0..=w_len {
        // I(1/2; a_{i+1}..a_w; 1) maps under t -> 1-t and path reversal to
        // (-1)^(w-i) I(0; 1-a_w,..,1-a_{i+1}; 1/2).
        let piece = &lower_vals[i] * &upper_vals[w_len - i];
        if (w_len - i) % 2 == 1 {
            acc -= &piece;
        } else {
            acc += &piece;
        }
    }
    if sign < 0 {
        acc = -acc;
    }
    Ok(acc)
}

/// The Euler sum `zeta_a(c)` through the period map: the word value times
/// `(-1)^depth`, with leading zeros removed by the binomial expansion first.
pub fn eval_composition(c: &SignedComposition, digits: u32) -> Result<MPReal, EvalError> {
    if c.leading_zeros > 0 {
        if !c.without_leading_zeros().is_convergent() {
            return Err(EvalError::DivergentWord);
        }
        let bits = bits_for_digits(digits);
        let mut acc = MPReal::zero(bits);
        for (t, q) in expand_leading_zeros(c).iter() {
            acc += &eval_composition(t, digits)?.mul_rational(q);
        }
        return Ok(acc);
    }
    if !c.is_convergent() {
        return Err(EvalError::DivergentWord);
    }
    let value = eval_word(&rho(c), digits)?;
    Ok(if period_sign(c) < 0 { -value } else { value })
}

/// Which regularization to read a divergent composition through.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegKind {
    None,
    Shuffle,
    Stuffle,
}

/// Regularized value at `T = 0`: the `T^0` part of the corresponding
/// polynomial, convergent constituents evaluated by [`eval_composition`].
pub fn eval_regularized(
    c: &SignedComposition,
    kind: RegKind,
    digits: u32,
) -> Result<MPReal, EvalError> {
    let bits = bits_for_digits(digits);
    match kind {
        RegKind::None => eval_composition(c, digits),
        RegKind::Shuffle => {
            let reg = shuffle_regularize(&rho(c));
            let mut acc = MPReal::zero(bits);
            for (word, q) in reg.t_zero_part().iter() {
                let constituent = unrho(word).expect("regularization yields canonical words");
                acc += &eval_composition(&constituent, digits)?.mul_rational(q);
            }
            Ok(acc)
        }
        RegKind::Stuffle => {
            if c.leading_zeros > 0 {
                return Err(EvalError::DivergentWord);
            }
            let reg = stuffle_regularize(c);
            let mut acc = MPReal::zero(bits);
            for (t, q) in reg.t_zero_part().iter() {
                acc += &eval_composition(t, digits)?.mul_rational(q);
            }
            Ok(acc)
        }
    }
}

/// `zeta(2n)` as a multiprecision value via the Euler closed form.
pub fn zeta_even_value(n: usize, digits: u32) -> MPReal {
    let bits = bits_for_digits(digits);
    let q = crate::exact::zeta_even_closed_form(n);
    super::mpreal::pi_bits(bits).pow_u32(2 * n as u32).mul_rational(&q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::SignedEntry;

    fn comp(entries: &[i32]) -> SignedComposition {
        SignedComposition::from_signed(entries)
    }

    /// Direct slowly-convergent nested summation in f64; independent of the
    /// series/path-splitting evaluator.
    fn nested_sum_f64(c: &SignedComposition, n_max: i64) -> f64 {
        fn go(entries: &[SignedEntry], lo: i64, n_max: i64) -> f64 {
            if entries.is_empty() {
                return 1.0;
            }
            let e = entries[0];
            let mut acc = 0.0;
            for k in (lo + 1)..=n_max {
                let sign = if e.sign < 0 && k % 2 == 1 { -1.0 } else { 1.0 };
                acc += sign / (k as f64).powi(e.magnitude as i32) * go(&entries[1..], k, n_max);
            }
            acc
        }
        go(&c.entries, 0, n_max)
    }

    #[test]
    fn zeta_two_matches_euler_formula() {
        let v = eval_composition(&comp(&[2]), 60).unwrap();
        let reference = zeta_even_value(1, 60);
        assert!((&v - &reference).abs().abs_below_pow10(58));
        assert!(v.to_decimal(10).starts_with("1.6449340668"));
    }

    #[test]
    fn alternating_two_is_minus_half_zeta_two() {
        let v = eval_composition(&comp(&[-2]), 60).unwrap();
        let reference = -zeta_even_value(1, 60).div_int(&BigInt::from(2));
        assert!((&v - &reference).abs().abs_below_pow10(58));
        assert!(v.to_decimal(10).starts_with("-0.8224670334"));
    }

    #[test]
    fn one_bar_two_is_an_eighth_of_zeta_three() {
        let v = eval_composition(&comp(&[1, -2]), 60).unwrap();
        let z3 = eval_composition(&comp(&[3]), 60).unwrap();
        let diff = (&v.mul_int(&BigInt::from(8)) - &z3).abs();
        assert!(diff.abs_below_pow10(56), "8 zeta(1,b2) != zeta(3): {diff}");
        assert_eq!(v.to_decimal(10), "0.1502571129");
    }

    #[test]
    fn matches_direct_summation_at_low_precision() {
        // Direct truncation error is O(1/N) here, so only a crude check.
        for c in [comp(&[2]), comp(&[3]), comp(&[-2]), comp(&[2, 3]), comp(&[1, -2])] {
            let direct = nested_sum_f64(&c, 4000);
            let engine = eval_composition(&c, 30).unwrap().to_f64();
            assert!(
                (direct - engine).abs() < 2e-3,
                "{c}: direct {direct} vs engine {engine}"
            );
        }
    }

    #[test]
    fn leading_zero_evaluation() {
        // zeta_1(2) = -2 zeta(3)
        let c = SignedComposition::with_leading_zeros(1, vec![SignedEntry::plain(2)]);
        let v = eval_composition(&c, 50).unwrap();
        let z3 = eval_composition(&comp(&[3]), 50).unwrap();
        let diff = (&v + &z3.mul_int(&BigInt::from(2))).abs();
        assert!(diff.abs_below_pow10(46));
    }

    #[test]
    fn divergent_words_error() {
        assert_eq!(
            eval_composition(&comp(&[2, 1]), 30),
            Err(EvalError::DivergentWord)
        );
        assert_eq!(
            eval_composition(&comp(&[1]), 30),
            Err(EvalError::DivergentWord)
        );
    }

    #[test]
    fn precision_scaling() {
        let low = eval_composition(&comp(&[-2, 3]), 40).unwrap();
        let high = eval_composition(&comp(&[-2, 3]), 80).unwrap();
        let high_down = MPReal::from_rational_bits(&high.to_rational(), low.bits());
        assert!((&low - &high_down).abs().abs_below_pow10(38));
    }

    #[test]
    fn split_point_independence_weight_six() {
        // Weight-6 spot check against direct summation.
        let c = comp(&[2, 4]);
        let direct = nested_sum_f64(&c, 3000);
        let engine = eval_composition(&c, 30).unwrap().to_f64();
        assert!((direct - engine).abs() < 1e-4);
    }
}
