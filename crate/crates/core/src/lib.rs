//! Exact symbolic engine and multiprecision numeric toolkit for level-2
//! (alternating) Euler sums.
//!
//! The crate is organized around a small number of value types:
//!
//! * [`words::IIWord`] — iterated-integral words over the alphabet `{0, +1, -1}`,
//!   the universal carrier `I(a0; a1..aw; a{w+1})`.
//! * [`words::SignedComposition`] — `zeta_a(s1,..,sd; eps)` in bar notation,
//!   stored innermost-first (the summation runs over `0 < k1 < .. < kd`).
//! * [`algebra::LinComb`] — finite formal sums with exact rational coefficients.
//! * [`motivic::TensorSum`] — values of the coaction derivations, pairs of a
//!   left factor (weight `r`, taken modulo products) and a right word.
//! * [`numerics::MPReal`] — fixed-point multiprecision reals used for all
//!   period evaluations.
//!
//! Everything symbolic is exact; nothing is ever rounded outside `numerics`.

pub mod algebra;
pub mod exact;
pub mod motivic;
pub mod numerics;
pub mod relations;
pub mod words;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
