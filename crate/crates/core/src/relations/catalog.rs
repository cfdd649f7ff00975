//! Integer-relation detection over high-precision values, the conjectural
//! MZV spanning catalog, and batch identity verification.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{bits_for_digits, eval_regularized, EvalError, MPReal, RegKind};
use crate::words::{parse_composition, SignedComposition, SignedEntry};

use super::lll::{lll_reduce, LllError};

/// A labeled relation-search instance: values at a common precision and a
/// coefficient bound.
#[derive(Clone, Debug)]
pub struct RelationProblem {
    pub labels: Vec<String>,
    pub values: Vec<MPReal>,
    pub digits: u32,
    pub bound: BigInt,
}

#[derive(Clone, Debug, Error)]
pub enum RelationError {
    #[error("need at least two values")]
    TooFewValues,
    #[error("precision too low: need roughly {needed} digits for this bound and dimension")]
    PrecisionTooLow { needed: u32 },
    #[error(transparent)]
    Lll(#[from] LllError),
}

/// A candidate relation with its audit data.
#[derive(Clone, Debug)]
pub struct RelationCandidate {
    pub coefficients: Vec<BigInt>,
    /// |sum coeff_i x_i| recomputed at full precision.
    pub residual: MPReal,
    /// Residual decimal exponent vs the detection threshold; bigger is
    /// stronger evidence.
    pub confidence_digits: i64,
}

/// Outcome of a relation search. `NoneFound` is evidence, not proof, and
/// carries the best short vector seen for auditability.
#[derive(Clone, Debug)]
pub enum RelationOutcome {
    Found(RelationCandidate),
    NoneFound { best: RelationCandidate },
}

fn residual_of(coeffs: &[BigInt], values: &[MPReal]) -> MPReal {
    let bits = values[0].bits();
    let mut acc = MPReal::zero(bits);
    for (c, v) in coeffs.iter().zip(values) {
        acc += &v.mul_int(c);
    }
    acc.abs()
}

/// Embeds the values in the standard relation lattice (identity block plus
/// one scaled-value column) and LLL-reduces. A relation is accepted when
/// its recomputed residual drops below `10^-(digits - 12)` and every
/// coefficient is within the bound.
pub fn find_relation(problem: &RelationProblem) -> Result<RelationOutcome, RelationError> {
    let n = problem.values.len();
    if n < 2 {
        return Err(RelationError::TooFewValues);
    }
    // The scale leaves 12 guard digits between the detection threshold and
    // working precision. Coefficients eat into the budget: a relation with
    // entries up to `bound` needs digits >> n * log10(bound-ish).
    let guard = 12u32;
    if (problem.digits as u64) < 20 + 2 * problem.bound.to_string().len() as u64 {
        return Err(RelationError::PrecisionTooLow {
            needed: 20 + 2 * problem.bound.to_string().len() as u32,
        });
    }
    let scale_digits = problem.digits - guard;
    let scale = BigInt::from(10u32).pow(scale_digits);
    let mut basis: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for (i, v) in problem.values.iter().enumerate() {
        let mut row = vec![BigInt::zero(); n + 1];
        row[i] = BigInt::from(1);
        // round(v * 10^scale_digits)
        let scaled = v.mul_int(&scale);
        row[n] = scaled.round_int();
        basis.push(row);
    }
    let reduced = lll_reduce(&basis)?;
    let threshold_digits = problem.digits - guard - 4;
    let mut best: Option<RelationCandidate> = None;
    for row in &reduced {
        let coeffs: Vec<BigInt> = row[..n].to_vec();
        if coeffs.iter().all(|c| c.is_zero()) {
            continue;
        }
        let residual = residual_of(&coeffs, &problem.values);
        let within_bound = coeffs.iter().all(|c| c.abs() <= problem.bound);
        let confidence_digits = {
            // decimal exponent of the residual, negated
            let r = residual.to_rational();
            if r.is_zero() {
                problem.digits as i64
            } else {
                let approx = -(r.numer().to_string().len() as i64
                    - r.denom().to_string().len() as i64);
                approx
            }
        };
        let candidate = RelationCandidate {
            coefficients: coeffs,
            residual: residual.clone(),
            confidence_digits,
        };
        let better = match &best {
            None => true,
            Some(b) => candidate.residual < b.residual,
        };
        if better && within_bound {
            best = Some(candidate);
        }
    }
    let best = best.expect("reduced basis has a nonzero row");
    if best.residual.abs_below_pow10(threshold_digits) {
        Ok(RelationOutcome::Found(best))
    } else {
        Ok(RelationOutcome::NoneFound { best })
    }
}

/// Words in the letters {2, 3} of total weight `k`, lexicographic order.
/// These span the weight-`k` MZV space conjecturally; the dimensions follow
/// `d_k = d_{k-2} + d_{k-3}`.
pub fn mzv_basis(k: u32) -> Result<Vec<SignedComposition>, String> {
    if !(2..=12).contains(&k) {
        return Err(format!("basis weight {k} out of the supported range 2..=12"));
    }
    fn go(rem: u32, prefix: &mut Vec<SignedEntry>, out: &mut Vec<SignedComposition>) {
        if rem == 0 {
            out.push(SignedComposition::new(prefix.clone()));
            return;
        }
        for mag in [2u32, 3] {
            if mag <= rem && rem - mag != 1 {
                prefix.push(SignedEntry::plain(mag));
                go(rem - mag, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    go(k, &mut prefix, &mut out);
    Ok(out)
}

/// Identity catalog entry, JSON-serializable per the documented schema.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Identity {
    pub name: String,
    pub status: IdentityStatus,
    /// Scale applied to the left-hand side, as "p/q" or "p".
    pub scale: String,
    pub lhs: IdentityLhs,
    pub rhs: Vec<IdentityRhsTerm>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum IdentityStatus {
    Proven,
    Conjectural,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct IdentityLhs {
    pub reg: RegName,
    pub comp: String,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum RegName {
    None,
    Shuffle,
    Stuffle,
}

impl From<RegName> for RegKind {
    fn from(r: RegName) -> RegKind {
        match r {
            RegName::None => RegKind::None,
            RegName::Shuffle => RegKind::Shuffle,
            RegName::Stuffle => RegKind::Stuffle,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct IdentityRhsTerm {
    /// Rational coefficient as "p/q" or "p".
    pub coeff: String,
    /// Leading-zero count of the term.
    pub a: u32,
    pub comp: String,
}

#[derive(Clone, Debug, Error)]
pub enum IdentityError {
    #[error("bad rational literal {0:?}")]
    BadRational(String),
    #[error("bad composition {0:?}: {1}")]
    BadComposition(String, String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

pub(crate) fn parse_rational(text: &str) -> Result<BigRational, IdentityError> {
    let parts: Vec<&str> = text.split('/').collect();
    let bad = || IdentityError::BadRational(text.to_string());
    match parts.as_slice() {
        [n] => Ok(BigRational::from(
            n.trim().parse::<BigInt>().map_err(|_| bad())?,
        )),
        [n, d] => Ok(BigRational::new(
            n.trim().parse::<BigInt>().map_err(|_| bad())?,
            d.trim().parse::<BigInt>().map_err(|_| bad())?,
        )),
        _ => Err(bad()),
    }
}

/// Verification report for one identity.
#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub name: String,
    pub status: IdentityStatus,
    pub abs_error: MPReal,
    pub pass: bool,
}

/// Evaluates both sides at the requested precision; passes iff
/// `|lhs - rhs| < 10^-(digits - 10)`.
pub fn verify_identity(id: &Identity, digits: u32) -> Result<IdentityReport, IdentityError> {
    let bits = bits_for_digits(digits);
    let scale = parse_rational(&id.scale)?;
    let lhs_comp = parse_composition(&id.lhs.comp)
        .map_err(|e| IdentityError::BadComposition(id.lhs.comp.clone(), e.to_string()))?;
    let lhs = eval_regularized(&lhs_comp, id.lhs.reg.into(), digits)?.mul_rational(&scale);
    let mut rhs = MPReal::zero(bits);
    for term in &id.rhs {
        let coeff = parse_rational(&term.coeff)?;
        let mut comp = parse_composition(&term.comp)
            .map_err(|e| IdentityError::BadComposition(term.comp.clone(), e.to_string()))?;
        comp.leading_zeros += term.a;
        rhs += &eval_regularized(&comp, RegKind::None, digits)?.mul_rational(&coeff);
    }
    let abs_error = (&lhs - &rhs).abs();
    let pass = abs_error.abs_below_pow10(digits.saturating_sub(10));
    Ok(IdentityReport {
        name: id.name.clone(),
        status: id.status,
        abs_error,
        pass,
    })
}

fn ident(
    name: &str,
    status: IdentityStatus,
    scale: &str,
    reg: RegName,
    lhs: &str,
    rhs: &[(&str, u32, &str)],
) -> Identity {
    Identity {
        name: name.to_string(),
        status,
        scale: scale.to_string(),
        lhs: IdentityLhs {
            reg,
            comp: lhs.to_string(),
        },
        rhs: rhs
            .iter()
            .map(|(c, a, comp)| IdentityRhsTerm {
                coeff: c.to_string(),
                a: *a,
                comp: comp.to_string(),
            })
            .collect(),
    }
}

/// The shipped identity catalog. Statuses follow the provenance of each
/// identity: the `8^l` family, the small-depth table, and the stuffle value
/// are proven; the depth-three family beyond its first member is
/// conjectural (products on the right are expanded through the stuffle).
pub fn default_catalog() -> Vec<Identity> {
    use IdentityStatus::{Conjectural, Proven};
    use RegName::{None as RegNone, Shuffle, Stuffle};
    let mut out = vec![ident(
        "eight-l1",
        Proven,
        "8",
        RegNone,
        "1,b2",
        &[("1", 0, "3")],
    )];
    out.push(ident(
        "eight-l2",
        Proven,
        "64",
        RegNone,
        "(1,b2)^2",
        &[("1", 0, "3,3")],
    ));
    out.push(ident(
        "eight-l3",
        Proven,
        "512",
        RegNone,
        "(1,b2)^3",
        &[("1", 0, "3,3,3")],
    ));

    // The eight small-depth identities (squares expanded by the stuffle:
    // zeta(3)^2 = 2 zeta(3,3) + zeta(6)).
    out.push(ident(
        "table-bar23",
        Proven,
        "1",
        RegNone,
        "b2,3",
        &[("-1/8", 0, "3,2"), ("-3/32", 0, "5")],
    ));
    out.push(ident(
        "table-bar23bar2",
        Proven,
        "1",
        RegNone,
        "b2,3,b2",
        &[("7/640", 0, "7"), ("-21/640", 0, "3,4")],
    ));
    out.push(ident(
        "table-z1-bar23",
        Proven,
        "1",
        RegNone,
        "a1;b2,3",
        &[("3/4", 0, "3,3"), ("29/64", 0, "6")],
    ));
    out.push(ident(
        "table-z1-bar23bar2",
        Proven,
        "1",
        RegNone,
        "a1;b2,3,b2",
        &[
            ("41/32", 0, "6,2"),
            ("-185/64", 0, "1,7"),
            ("-1/8", 0, "2,3,3"),
            ("-215/256", 0, "8"),
        ],
    ));
    out.push(ident(
        "table-3bar2",
        Proven,
        "1",
        RegNone,
        "3,b2",
        &[("7/32", 0, "5"), ("-1/4", 0, "2,3")],
    ));
    out.push(ident(
        "table-3bar23",
        Proven,
        "1",
        RegNone,
        "3,b2,3",
        &[
            ("3/64", 0, "6,2"),
            ("-3/16", 0, "3,5"),
            ("3/16", 0, "3,3,2"),
            ("-1/48", 0, "8"),
        ],
    ));
    // Coefficients re-derived here: lattice-mined at 90 digits and
    // cross-checked against the binomial expansion of the leading zero.
    out.push(ident(
        "table-z1-3bar2",
        Proven,
        "1",
        RegNone,
        "a1;3,b2",
        &[("-75/64", 0, "6"), ("9/4", 0, "3,3")],
    ));
    // Coefficients re-derived the same way; closes to full precision.
    out.push(ident(
        "table-z1-3bar23",
        Proven,
        "1",
        RegNone,
        "a1;3,b2,3",
        &[
            ("-153/64", 0, "2,7"),
            ("387/64", 0, "6,3"),
            ("21/4", 0, "3,6"),
            ("-11/8", 0, "9"),
        ],
    ));

    // Stuffle-regularized values.
    out.push(ident(
        "stuffle-bar21",
        Proven,
        "1",
        Stuffle,
        "b2,1",
        &[("5/8", 0, "3")],
    ));
    out.push(ident(
        "stuffle-1bar21",
        Proven,
        "4",
        Stuffle,
        "1,b2,1",
        &[("-3", 0, "1,3")],
    ));

    // The depth-three family, first two instances of each shape.
    out.push(ident(
        "conj-bar21bar2-l1",
        Conjectural,
        "16",
        RegNone,
        "b2,1,b2",
        &[("1", 0, "3,2"), ("-1", 0, "2,3")],
    ));
    out.push(ident(
        "conj-bar21bar2-l2",
        Conjectural,
        "128",
        RegNone,
        "(b2,1)^2,b2",
        &[("-1", 0, "2,3,3"), ("1", 0, "3,2,3"), ("-1", 0, "3,3,2")],
    ));
    out.push(ident(
        "conj-1bar21-l1",
        Conjectural,
        "4",
        Shuffle,
        "1,b2,1",
        &[("-3", 0, "1,3")],
    ));
    out.push(ident(
        "conj-1bar21-l2",
        Conjectural,
        "32",
        Shuffle,
        "(1,b2)^2,1",
        &[("-3", 0, "3,1,3")],
    ));
    out.push(ident(
        "conj-bar21-l1",
        Conjectural,
        "8",
        Shuffle,
        "b2,1",
        &[("1", 0, "3"), ("-2", 1, "2")],
    ));
    out.push(ident(
        "conj-bar21-l2",
        Conjectural,
        "64",
        Shuffle,
        "(b2,1)^2",
        &[("1", 0, "3,3"), ("-2", 1, "2,3"), ("2", 1, "3,2")],
    ));

    // The motivic depth-three statements read through the period map; the
    // first instance of the bar21 shape is proven unconditionally.
    out.push(ident(
        "motivic-bar21bar2-l1",
        Conjectural,
        "16",
        RegNone,
        "b2,1,b2",
        &[("1", 0, "3,2"), ("-1", 0, "2,3")],
    ));
    out.push(ident(
        "motivic-bar21bar2-l2",
        Conjectural,
        "128",
        RegNone,
        "(b2,1)^2,b2",
        &[("-1", 0, "2,3,3"), ("1", 0, "3,2,3"), ("-1", 0, "3,3,2")],
    ));
    out.push(ident(
        "motivic-bar21-l1",
        Proven,
        "8",
        Shuffle,
        "b2,1",
        &[("5", 0, "3")],
    ));
    out.push(ident(
        "motivic-bar21-l2",
        Conjectural,
        "64",
        Shuffle,
        "(b2,1)^2",
        &[("1", 0, "3,3"), ("-2", 1, "2,3"), ("2", 1, "3,2")],
    ));
    out.push(ident(
        "motivic-1bar21-l1",
        Conjectural,
        "4",
        Shuffle,
        "1,b2,1",
        &[("-3", 0, "1,3")],
    ));
    out.push(ident(
        "motivic-1bar21-l2",
        Conjectural,
        "32",
        Shuffle,
        "(1,b2)^2,1",
        &[("-3", 0, "3,1,3")],
    ));
    out
}
