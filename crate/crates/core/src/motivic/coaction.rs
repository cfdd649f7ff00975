//! The coaction derivations on iterated-integral words: raw cut expansion,
//! cancellation by canonical-form grouping, and rewriting of surviving
//! factors into zeta notation.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::json;
use thiserror::Error;

use crate::algebra::{shuffle_regularize, LinComb};
use crate::words::{format_composition, rho, unrho, IIWord, Letter, SignedComposition};

use super::canonical::{canonicalize_h, canonicalize_l, CanonKind, LeftPiece};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("cut length r = {r} must be odd")]
    EvenCutLength { r: u32 },
    #[error("cut length r = {r} must be smaller than the weight {weight}")]
    CutTooLong { r: u32, weight: u32 },
}

/// One raw cut: subsequence (left) and quotient sequence (right).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawCut {
    pub position: usize,
    pub left: IIWord,
    pub right: IIWord,
}

/// All raw cuts of length `r`: exactly `w - r + 1` of them, the `p`-th
/// having left factor `I(a_p; a_{p+1}..a_{p+r}; a_{p+r+1})` and right factor
/// the remaining outer word.
pub fn coaction_cuts(w: &IIWord, r: u32) -> Result<Vec<RawCut>, DomainError> {
    if r % 2 == 0 {
        return Err(DomainError::EvenCutLength { r });
    }
    let weight = w.weight() as u32;
    if r >= weight {
        return Err(DomainError::CutTooLong { r, weight });
    }
    // Boundary-inclusive letters a_0..a_{w+1}.
    let mut letters = Vec::with_capacity(w.weight() + 2);
    letters.push(w.start);
    letters.extend(w.interior.iter().copied());
    letters.push(w.end);
    let r = r as usize;
    let wlen = w.weight();
    let mut cuts = Vec::with_capacity(wlen - r + 1);
    for p in 0..=(wlen - r) {
        let left = IIWord::new(
            letters[p],
            letters[p + 1..p + r + 1].to_vec(),
            letters[p + r + 1],
        );
        let mut quotient = Vec::with_capacity(wlen - r);
        quotient.extend_from_slice(&letters[1..=p]);
        quotient.extend_from_slice(&letters[p + r + 1..=wlen]);
        let right = IIWord::new(w.start, quotient, w.end);
        cuts.push(RawCut {
            position: p,
            left,
            right,
        });
    }
    Ok(cuts)
}

/// One zeta-notation constituent of a left factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaPiece {
    pub coeff: BigRational,
    pub comp: SignedComposition,
    /// True when a contribution went through the reversal-plus-homothety
    /// path; such pieces are the ones whose sign depends on the chosen
    /// orientation convention.
    pub sign_convention: bool,
}

/// A surviving group of the simplified derivation: a common right factor
/// and the collected left factor, both as canonical words and in zeta
/// notation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorTerm {
    pub right: SignedComposition,
    pub right_word: IIWord,
    pub left_words: Vec<LeftPiece>,
    pub left_zeta: Vec<ZetaPiece>,
}

/// The value of a derivation: grading `left weight = r`,
/// `right weight = input weight - r` on every term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorSum {
    pub r: u32,
    pub terms: Vec<TensorTerm>,
}

impl TensorSum {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// JSON per the stable schema:
    /// `{"r", "terms": [{"coeff", "left": [{"coeff", "comp"}], "right"}]}`.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "r": self.r,
            "terms": self.terms.iter().map(|t| json!({
                "coeff": "1",
                "left": t.left_zeta.iter().map(|z| json!({
                    "coeff": z.coeff.to_string(),
                    "comp": format_composition(&z.comp),
                })).collect::<Vec<_>>(),
                "right": format_composition(&t.right),
            })).collect::<Vec<_>>(),
        })
    }

    /// Text rendering, deterministic in term order.
    pub fn render_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                out.push_str("\n+ ");
            }
            out.push('(');
            for (j, z) in t.left_zeta.iter().enumerate() {
                let coeff = &z.coeff;
                if j == 0 {
                    if coeff.is_negative() {
                        out.push('-');
                    }
                } else if coeff.is_negative() {
                    out.push_str(" - ");
                } else {
                    out.push_str(" + ");
                }
                let mag = coeff.abs();
                if !mag.is_one() {
                    out.push_str(&format!("{mag}*"));
                }
                let s = format_composition(&z.comp);
                if s.is_empty() {
                    out.push('1');
                } else {
                    out.push_str(&s);
                }
            }
            out.push_str(") (x) ");
            let rs = format_composition(&t.right);
            if rs.is_empty() {
                out.push('1');
            } else {
                out.push_str(&rs);
            }
        }
        out
    }
}

/// Rewrites a canonical `(0, 1)` word into convergent zeta notation: the
/// `T^0` part of its shuffle regularization, compositions recovered from
/// the words.
pub fn to_zeta_basis(word: &IIWord) -> LinComb<SignedComposition> {
    let reg = shuffle_regularize(word);
    reg.t_zero_part()
        .map_terms(|w| LinComb::singleton(unrho(w).expect("regularized words are canonical")))
}

/// The simplified derivation: raw cuts grouped by quotient, left factors
/// canonicalized modulo products, exact cancellation within groups, and the
/// survivors rewritten to zeta notation.
pub fn derivation(c: &SignedComposition, r: u32) -> Result<TensorSum, DomainError> {
    let word = rho(c);
    let cuts = coaction_cuts(&word, r)?;
    // Group by the right word; right factors always carry endpoints (0, 1).
    let mut groups: BTreeMap<IIWord, Vec<LeftPiece>> = BTreeMap::new();
    for cut in &cuts {
        debug_assert_eq!(cut.right.start, Letter::Zero);
        debug_assert_eq!(cut.right.end, Letter::Plus);
        let right_canon = canonicalize_h(&cut.right);
        let right_word = match right_canon.kind {
            CanonKind::Zero => continue,
            CanonKind::Anchored(w) => {
                debug_assert!(right_canon.coeff.is_one());
                w
            }
            CanonKind::One => cut.right.clone(),
            CanonKind::Spanning(_) => unreachable!("right factors have endpoints (0, 1)"),
        };
        let pieces = canonicalize_l(&cut.left);
        let bucket = groups.entry(right_word).or_default();
        for piece in pieces {
            if let Some(existing) = bucket.iter_mut().find(|p| p.word == piece.word) {
                existing.coeff += piece.coeff;
                existing.sign_convention |= piece.sign_convention;
            } else {
                bucket.push(piece);
            }
        }
    }
    let mut terms = Vec::new();
    for (right_word, mut left_words) in groups {
        left_words.retain(|p| !p.coeff.is_zero());
        if left_words.is_empty() {
            continue;
        }
        left_words.sort_by(|a, b| a.word.cmp(&b.word));
        // Zeta-notation rewrite of the surviving left combination.
        let mut zeta: BTreeMap<SignedComposition, (BigRational, bool)> = BTreeMap::new();
        for piece in &left_words {
            for (comp, q) in to_zeta_basis(&piece.word).iter() {
                let entry = zeta
                    .entry(comp.clone())
                    .or_insert_with(|| (BigRational::zero(), false));
                entry.0 += q * &piece.coeff;
                entry.1 |= piece.sign_convention;
            }
        }
        let left_zeta: Vec<ZetaPiece> = zeta
            .into_iter()
            .filter(|(_, (q, _))| !q.is_zero())
            .map(|(comp, (coeff, flag))| ZetaPiece {
                coeff,
                comp,
                sign_convention: flag,
            })
            .collect();
        let right = unrho(&right_word).expect("right factors are canonical");
        terms.push(TensorTerm {
            right,
            right_word,
            left_words,
            left_zeta,
        });
    }
    terms.sort_by(|a, b| (&a.right, &a.right_word).cmp(&(&b.right, &b.right_word)));
    Ok(TensorSum { r, terms })
}

/// Whether the weight-1 derivation vanishes; vacuously true below weight 2.
pub fn d1_vanishes(c: &SignedComposition) -> bool {
    if c.weight() < 2 {
        return true;
    }
    derivation(c, 1).map(|t| t.is_zero()).unwrap_or(true)
}

/// Survivor structure of the derivation on a repeated barred entry
/// `{bar m}_d`: empty for even `m` or when `r` is not an odd multiple of
/// `m`; exactly the single survivor
/// `{bar m}_p (x) {bar m}_{d-p}` when `m` is odd and `r = m p` with odd
/// `p < d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurvivorReport {
    pub m: u32,
    pub d: u32,
    pub r: u32,
    /// `(p, d - p)` block counts of the left and right factors.
    pub survivor: Option<(u32, u32)>,
}

pub fn repeated_barred_survivors(m: u32, d: u32, r: u32) -> SurvivorReport {
    assert!(m >= 2 && d >= 1);
    assert!(r % 2 == 1 && r < m * d);
    let survivor = if m % 2 == 1 && r % m == 0 {
        let p = r / m;
        if p % 2 == 1 && p < d {
            Some((p, d - p))
        } else {
            None
        }
    } else {
        None
    };
    SurvivorReport { m, d, r, survivor }
}
