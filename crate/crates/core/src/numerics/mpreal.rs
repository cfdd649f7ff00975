//! Fixed-point multiprecision reals: value = mantissa / 2^bits.
//!
//! All arithmetic between two values requires equal `bits`; every operation
//! rounds to nearest, so each step costs at most one ulp. Working precision
//! is sized from requested decimal digits plus guard digits by
//! [`bits_for_digits`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Binary precision for a decimal-digit request, with guard digits for
/// round-off absorption.
pub fn bits_for_digits(digits: u32) -> u32 {
    // log2(10) = 3.3219...; 14 guard digits and 64 spare bits.
    ((digits as u64 + 14) * 3322 / 1000) as u32 + 64
}

/// Rounded division, ties away from the smaller magnitude.
pub(crate) fn div_round(n: &BigInt, d: &BigInt) -> BigInt {
    let (q, r) = n.div_rem(d);
    let double = BigInt::from(2) * r.abs();
    if double >= d.abs() {
        let bump = if (n.sign() == d.sign()) || n.is_zero() {
            BigInt::one()
        } else {
            -BigInt::one()
        };
        q + bump
    } else {
        q
    }
}

/// Rounded right shift.
pub(crate) fn shr_round(x: &BigInt, k: u32) -> BigInt {
    if k == 0 {
        return x.clone();
    }
    (x + (BigInt::one() << (k - 1))) >> k
}

/// Arbitrary-precision real with explicit working precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPReal {
    pub(crate) mant: BigInt,
    pub(crate) bits: u32,
}

impl MPReal {
    pub fn zero(bits: u32) -> Self {
        MPReal {
            mant: BigInt::zero(),
            bits,
        }
    }

    pub fn one(bits: u32) -> Self {
        MPReal {
            mant: BigInt::one() << bits,
            bits,
        }
    }

    pub fn from_bigint(n: &BigInt, bits: u32) -> Self {
        MPReal {
            mant: n << bits,
            bits,
        }
    }

    pub fn from_i64(n: i64, bits: u32) -> Self {
        Self::from_bigint(&BigInt::from(n), bits)
    }

    /// Exact rational to fixed point at the precision implied by `digits`.
    pub fn from_rational(q: &BigRational, digits: u32) -> Self {
        Self::from_rational_bits(q, bits_for_digits(digits))
    }

    pub fn from_rational_bits(q: &BigRational, bits: u32) -> Self {
        MPReal {
            mant: div_round(&(q.numer() << bits), q.denom()),
            bits,
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// The exact rational this fixed-point value denotes.
    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.mant.clone(), BigInt::one() << self.bits)
    }

    pub fn to_f64(&self) -> f64 {
        if self.mant.is_zero() {
            return 0.0;
        }
        let magnitude = self.mant.bits();
        let shift = magnitude.saturating_sub(53);
        let head = (&self.mant >> shift).to_f64().unwrap_or(f64::NAN);
        head * 2f64.powi(shift as i32 - self.bits as i32)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn abs(&self) -> MPReal {
        MPReal {
            mant: self.mant.abs(),
            bits: self.bits,
        }
    }

    pub fn floor_int(&self) -> BigInt {
        self.mant.clone() >> self.bits
    }

    pub fn round_int(&self) -> BigInt {
        shr_round(&self.mant, self.bits)
    }

    /// One unit in the last place: the resolution of this value.
    pub fn ulp(&self) -> MPReal {
        MPReal {
            mant: BigInt::one(),
            bits: self.bits,
        }
    }

    /// Upper bound 10^-k comparison helper: true iff |self| < 10^-k.
    pub fn abs_below_pow10(&self, k: u32) -> bool {
        let scaled = self.mant.abs() * BigInt::from(10u32).pow(k);
        scaled < (BigInt::one() << self.bits)
    }

    pub fn mul_int(&self, n: &BigInt) -> MPReal {
        MPReal {
            mant: &self.mant * n,
            bits: self.bits,
        }
    }

    pub fn div_int(&self, n: &BigInt) -> MPReal {
        MPReal {
            mant: div_round(&self.mant, n),
            bits: self.bits,
        }
    }

    pub fn mul_rational(&self, q: &BigRational) -> MPReal {
        MPReal {
            mant: div_round(&(&self.mant * q.numer()), q.denom()),
            bits: self.bits,
        }
    }

    pub fn recip(&self) -> MPReal {
        MPReal {
            mant: div_round(&(BigInt::one() << (2 * self.bits as usize)), &self.mant),
            bits: self.bits,
        }
    }

    pub fn pow_u32(&self, e: u32) -> MPReal {
        let mut acc = MPReal::one(self.bits);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Decimal rendering with `digits` places after the point, rounded.
    pub fn to_decimal(&self, digits: u32) -> String {
        let scale = BigInt::from(10u32).pow(digits);
        let scaled = div_round(&(self.mant.abs() * &scale), &(BigInt::one() << self.bits));
        let s = scaled.to_string();
        let (int_part, frac_part) = if s.len() > digits as usize {
            let cut = s.len() - digits as usize;
            (s[..cut].to_string(), s[cut..].to_string())
        } else {
            ("0".to_string(), format!("{:0>width$}", s, width = digits as usize))
        };
        let sign = if self.mant.is_negative() && !scaled.is_zero() {
            "-"
        } else {
            ""
        };
        if digits == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac_part}")
        }
    }
}

impl fmt::Display for MPReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(30))
    }
}

impl PartialOrd for MPReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MPReal {
    fn cmp(&self, other: &Self) -> Ordering {
        assert_eq!(self.bits, other.bits, "precision mismatch");
        self.mant.cmp(&other.mant)
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, |$a:ident, $b:ident| $body:expr) => {
        impl $trait<&MPReal> for &MPReal {
            type Output = MPReal;
            fn $method(self, rhs: &MPReal) -> MPReal {
                assert_eq!(self.bits, rhs.bits, "precision mismatch");
                let $a = self;
                let $b = rhs;
                $body
            }
        }
        impl $trait<MPReal> for MPReal {
            type Output = MPReal;
            fn $method(self, rhs: MPReal) -> MPReal {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&MPReal> for MPReal {
            type Output = MPReal;
            fn $method(self, rhs: &MPReal) -> MPReal {
                (&self).$method(rhs)
            }
        }
    };
}

impl_binop!(Add, add, |a, b| MPReal {
    mant: &a.mant + &b.mant,
    bits: a.bits,
});
impl_binop!(Sub, sub, |a, b| MPReal {
    mant: &a.mant - &b.mant,
    bits: a.bits,
});
impl_binop!(Mul, mul, |a, b| MPReal {
    mant: shr_round(&(&a.mant * &b.mant), a.bits),
    bits: a.bits,
});
impl_binop!(Div, div, |a, b| MPReal {
    mant: div_round(&(&a.mant << a.bits), &b.mant),
    bits: a.bits,
});

impl Neg for &MPReal {
    type Output = MPReal;
    fn neg(self) -> MPReal {
        MPReal {
            mant: -&self.mant,
            bits: self.bits,
        }
    }
}

impl Neg for MPReal {
    type Output = MPReal;
    fn neg(self) -> MPReal {
        -&self
    }
}

impl AddAssign<&MPReal> for MPReal {
    fn add_assign(&mut self, rhs: &MPReal) {
        assert_eq!(self.bits, rhs.bits, "precision mismatch");
        self.mant += &rhs.mant;
    }
}

impl SubAssign<&MPReal> for MPReal {
    fn sub_assign(&mut self, rhs: &MPReal) {
        assert_eq!(self.bits, rhs.bits, "precision mismatch");
        self.mant -= &rhs.mant;
    }
}

/// arctan(1/x) by the Taylor series, fixed point.
fn atan_inv(x: u64, bits: u32) -> MPReal {
    let x = BigInt::from(x);
    let xx = &x * &x;
    let mut term = div_round(&(BigInt::one() << bits), &x);
    let mut acc = BigInt::zero();
    let mut k = 0u64;
    while !term.is_zero() {
        let contrib = div_round(&term, &BigInt::from(2 * k + 1));
        if k % 2 == 0 {
            acc += contrib;
        } else {
            acc -= contrib;
        }
        term = div_round(&term, &xx);
        k += 1;
    }
    MPReal { mant: acc, bits }
}

/// pi at the binary precision `bits`, by Machin's formula.
pub fn pi_bits(bits: u32) -> MPReal {
    let work = bits + 16;
    let a = atan_inv(5, work);
    let b = atan_inv(239, work);
    let v = a.mul_int(&BigInt::from(16)) - b.mul_int(&BigInt::from(4));
    MPReal {
        mant: shr_round(&v.mant, 16),
        bits,
    }
}

/// pi at the precision implied by the decimal digit request.
pub fn pi(digits: u32) -> MPReal {
    pi_bits(bits_for_digits(digits))
}

/// (sin x, cos x) by Taylor series; intended for |x| <= pi/2.
pub fn sin_cos(x: &MPReal) -> (MPReal, MPReal) {
    let bits = x.bits;
    let xx = x * x;
    let mut sin = MPReal::zero(bits);
    let mut cos = MPReal::zero(bits);
    // sin: term_k = (-1)^k x^(2k+1)/(2k+1)!; cos: (-1)^k x^(2k)/(2k)!
    let mut term = x.clone();
    let mut k = 0u64;
    while !term.is_zero() {
        if k % 2 == 0 {
            sin += &term;
        } else {
            sin -= &term;
        }
        term = (&term * &xx).div_int(&BigInt::from((2 * k + 2) * (2 * k + 3)));
        k += 1;
    }
    let mut term = MPReal::one(bits);
    let mut k = 0u64;
    while !term.is_zero() {
        if k % 2 == 0 {
            cos += &term;
        } else {
            cos -= &term;
        }
        term = (&term * &xx).div_int(&BigInt::from((2 * k + 1) * (2 * k + 2)));
        k += 1;
    }
    (sin, cos)
}
