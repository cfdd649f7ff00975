//! Arbitrary-precision numerical side: the period map for (regularized)
//! Euler sums and the closed-form constant for repeated even barred entries.

mod eval;
mod mpreal;
mod prop22;

pub use eval::{
    eval_composition, eval_regularized, eval_word, zeta_even_value, EvalError, RegKind,
};
pub use mpreal::{bits_for_digits, pi, pi_bits, sin_cos, MPReal};
pub use prop22::{prop22_c, Prop22Error};
