//! Canonicalization of motivic integral words under the structure
//! identities: empty word, trivial path, regularization of all-equal
//! interiors, path reversal, and homothety by -1.
//!
//! Canonical representatives have endpoints `(0, 1)`; words whose endpoints
//! reduce to `(-1, 1)` cannot be resolved by reversal and homothety alone
//! and are returned tagged — they are only handled modulo products, see
//! [`canonicalize_l`].

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebra::LinComb;
use crate::words::{IIWord, Letter};

/// Shape of a canonicalized word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CanonKind {
    /// The empty word: the unit of the algebra.
    One,
    /// A word that vanishes identically.
    Zero,
    /// Canonical word with endpoints `(0, 1)`.
    Anchored(IIWord),
    /// Word with endpoints `(-1, 1)`, unresolved at this level.
    Spanning(IIWord),
}

/// Result of canonicalization: `input = coeff * kind`, with provenance
/// flags recording whether path reversal and/or the -1 homothety fired.
/// Left factors that needed both carry a sign-convention marker, since
/// tabulated values sometimes fix the opposite orientation for them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Canonical {
    pub coeff: BigRational,
    pub kind: CanonKind,
    pub reversed: bool,
    pub negated: bool,
}

impl Canonical {
    fn zero() -> Self {
        Canonical {
            coeff: BigRational::zero(),
            kind: CanonKind::Zero,
            reversed: false,
            negated: false,
        }
    }
}

fn negate_all(letters: &mut [Letter]) {
    for l in letters {
        *l = l.negate();
    }
}

fn negated_reverse(letters: &[Letter]) -> Vec<Letter> {
    letters.iter().rev().map(|l| l.negate()).collect()
}

/// Canonicalizes a word under the identities, in this order: empty word;
/// trivial path (equal endpoints); reversal when the end point is 0;
/// homothety by -1 when the end point is -1; the all-equal-interior
/// vanishing for `(0,1)` words; and the antisymmetry reduction for tagged
/// `(-1,1)` words (a word equal to its own reversal-homothety image with
/// net coefficient -1 is zero).
pub fn canonicalize_h(w: &IIWord) -> Canonical {
    if w.interior.is_empty() {
        return Canonical {
            coeff: BigRational::one(),
            kind: CanonKind::One,
            reversed: false,
            negated: false,
        };
    }
    if w.start == w.end {
        return Canonical::zero();
    }
    let mut coeff = BigRational::one();
    let mut start = w.start;
    let mut end = w.end;
    let mut interior = w.interior.clone();
    let mut reversed = false;
    let mut negated = false;

    if end == Letter::Zero {
        interior.reverse();
        std::mem::swap(&mut start, &mut end);
        if interior.len() % 2 == 1 {
            coeff = -coeff;
        }
        reversed = true;
    }
    if end == Letter::Minus {
        negate_all(&mut interior);
        start = start.negate();
        end = end.negate();
        negated = true;
    }
    debug_assert_eq!(end, Letter::Plus);
    debug_assert_ne!(start, Letter::Plus);

    if start == Letter::Minus {
        // Endpoints (-1, 1). The reversal-homothety image is
        // (-1)^w * I(-1; -reverse; 1); normalize the pair and detect
        // antisymmetric words.
        let mirror = negated_reverse(&interior);
        let odd = interior.len() % 2 == 1;
        if mirror == interior {
            if odd {
                return Canonical::zero();
            }
        } else if mirror < interior {
            interior = mirror;
            if odd {
                coeff = -coeff;
            }
            reversed = true;
            negated = true;
        }
        return Canonical {
            coeff,
            kind: CanonKind::Spanning(IIWord::new(Letter::Minus, interior, Letter::Plus)),
            reversed,
            negated,
        };
    }

    // Endpoints (0, 1): all-equal interiors over {0, 1} vanish.
    let first = interior[0];
    if (first == Letter::Zero || first == Letter::Plus)
        && interior.iter().all(|&l| l == first)
    {
        return Canonical::zero();
    }
    Canonical {
        coeff,
        kind: CanonKind::Anchored(IIWord::new(Letter::Zero, interior, Letter::Plus)),
        reversed,
        negated,
    }
}

/// The weight-1 class: every weight-1 integral is a rational multiple of
/// `I(0; -1; 1)` (the class of the alternating weight-1 value). The
/// multiple is `s(c, b) - s(a, b)` with `s(x, y) = 1` iff `|x - y| = 2`.
pub fn weight1_class(a: Letter, b: Letter, c: Letter) -> BigRational {
    fn s(x: Letter, y: Letter) -> i32 {
        if (x.value() - y.value()).abs() == 2 {
            1
        } else {
            0
        }
    }
    BigRational::from(num_bigint::BigInt::from(s(c, b) - s(a, b)))
}

/// One canonical constituent of a left (positive-weight, modulo products)
/// factor, with the provenance flag for the reversal-plus-homothety path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeftPiece {
    pub coeff: BigRational,
    pub word: IIWord,
    pub sign_convention: bool,
}

/// The canonical weight-1 word `I(0; -1; 1)`.
pub fn weight1_word() -> IIWord {
    IIWord::new(Letter::Zero, vec![Letter::Minus], Letter::Plus)
}

/// Canonicalization in the quotient by products: returns a combination of
/// `(0, 1)`-endpoint words representing the same class.
///
/// Weight-1 words resolve through [`weight1_class`]; `(-1, 1)`-endpoint
/// words split through the base point 0, where every middle term is a
/// product of two positive-weight factors and vanishes.
pub fn canonicalize_l(w: &IIWord) -> Vec<LeftPiece> {
    assert!(w.weight() >= 1, "canonicalize_l requires weight >= 1");
    if w.weight() == 1 {
        let q = weight1_class(w.start, w.interior[0], w.end);
        if q.is_zero() {
            return Vec::new();
        }
        return vec![LeftPiece {
            coeff: q,
            word: weight1_word(),
            sign_convention: false,
        }];
    }
    let canon = canonicalize_h(w);
    let base_flag = canon.reversed && canon.negated;
    match canon.kind {
        CanonKind::Zero => Vec::new(),
        CanonKind::One => unreachable!("weight >= 1 cannot canonicalize to the unit"),
        CanonKind::Anchored(u) => vec![LeftPiece {
            coeff: canon.coeff,
            word: u,
            sign_convention: base_flag,
        }],
        CanonKind::Spanning(u) => {
            // I(-1; u; 1) = I(-1; u; 0) + I(0; u; 1) modulo products.
            let mut out: Vec<LeftPiece> = Vec::new();
            let lower = canonicalize_h(&IIWord::new(Letter::Minus, u.interior.clone(), Letter::Zero));
            match lower.kind {
                CanonKind::Zero => {}
                CanonKind::Anchored(v) => out.push(LeftPiece {
                    coeff: &canon.coeff * &lower.coeff,
                    word: v,
                    sign_convention: true,
                }),
                _ => unreachable!("(-1, 0) endpoints always anchor"),
            }
            let upper = canonicalize_h(&IIWord::new(Letter::Zero, u.interior.clone(), Letter::Plus));
            match upper.kind {
                CanonKind::Zero => {}
                CanonKind::Anchored(v) => {
                    // Merge with an existing equal word if present.
                    let coeff = &canon.coeff * &upper.coeff;
                    if let Some(existing) = out.iter_mut().find(|p| p.word == v) {
                        existing.coeff += coeff;
                        existing.sign_convention |= base_flag;
                    } else {
                        out.push(LeftPiece {
                            coeff,
                            word: v,
                            sign_convention: base_flag,
                        });
                    }
                }
                _ => unreachable!("(0, 1) endpoints always anchor"),
            }
            out.retain(|p| !p.coeff.is_zero());
            out
        }
    }
}

/// The duality image of a `{0, 1}`-letter word with endpoints `(0, 1)`
/// under `t -> 1 - t`: reverse the interior and flip every letter. Only a
/// sanity check for plain MZV words; alternating letters are rejected.
pub fn mzv_duality(w: &IIWord) -> IIWord {
    assert_eq!(w.start, Letter::Zero);
    assert_eq!(w.end, Letter::Plus);
    let interior: Vec<Letter> = w
        .interior
        .iter()
        .rev()
        .map(|l| match l {
            Letter::Zero => Letter::Plus,
            Letter::Plus => Letter::Zero,
            Letter::Minus => panic!("duality is only used on {{0,1}} words"),
        })
        .collect();
    IIWord::new(Letter::Zero, interior, Letter::Plus)
}

/// Canonicalization as a plain linear combination, dropping provenance.
pub fn canonicalize_l_comb(w: &IIWord) -> LinComb<IIWord> {
    LinComb::from_terms(
        canonicalize_l(w)
            .into_iter()
            .map(|p| (p.word, p.coeff)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{rho, SignedComposition};

    fn letters(vals: &[i8]) -> Vec<Letter> {
        vals.iter().map(|&v| Letter::from_value(v)).collect()
    }

    fn word(start: i8, interior: &[i8], end: i8) -> IIWord {
        IIWord::new(
            Letter::from_value(start),
            letters(interior),
            Letter::from_value(end),
        )
    }

    fn q(n: i64) -> BigRational {
        BigRational::from(num_bigint::BigInt::from(n))
    }

    #[test]
    fn homothety_and_reversal_example() {
        // I(0; 1,0,-1,0,0; -1) -> + I(0; -1,0,1,0,0; 1)
        let c = canonicalize_h(&word(0, &[1, 0, -1, 0, 0], -1));
        assert_eq!(c.coeff, q(1));
        assert_eq!(
            c.kind,
            CanonKind::Anchored(word(0, &[-1, 0, 1, 0, 0], 1))
        );
        assert!(c.negated && !c.reversed);
    }

    #[test]
    fn trivial_path_and_regularization() {
        assert_eq!(canonicalize_h(&word(1, &[0, 1], 1)).kind, CanonKind::Zero);
        assert_eq!(canonicalize_h(&word(0, &[1, 1], 1)).kind, CanonKind::Zero);
        assert_eq!(canonicalize_h(&word(0, &[0, 0, 0], 1)).kind, CanonKind::Zero);
        // all-minus interiors do not regularize to zero
        let c = canonicalize_h(&word(0, &[-1, -1], 1));
        assert_eq!(c.kind, CanonKind::Anchored(word(0, &[-1, -1], 1)));
    }

    #[test]
    fn empty_word_is_unit() {
        let c = canonicalize_h(&word(0, &[], 1));
        assert_eq!(c.kind, CanonKind::One);
        assert_eq!(c.coeff, q(1));
    }

    #[test]
    fn reversal_sign() {
        // I(1; 0,0,1; 0) = (-1)^3 I(0; 1,0,0; 1)
        let c = canonicalize_h(&word(1, &[0, 0, 1], 0));
        assert_eq!(c.coeff, q(-1));
        assert_eq!(c.kind, CanonKind::Anchored(word(0, &[1, 0, 0], 1)));
        assert!(c.reversed && !c.negated);
    }

    #[test]
    fn reversal_then_homothety() {
        // I(-1; 0,1,0; 0) = -I(0; 0,-1,0; 1): reverse then negate.
        let c = canonicalize_h(&word(-1, &[0, 1, 0], 0));
        assert_eq!(c.coeff, q(-1));
        assert_eq!(c.kind, CanonKind::Anchored(word(0, &[0, -1, 0], 1)));
        assert!(c.reversed && c.negated);
    }

    #[test]
    fn spanning_antisymmetric_vanishes() {
        // interior equal to its negated reverse, odd length
        let c = canonicalize_h(&word(-1, &[-1, 0, 1], 1));
        assert_eq!(c.kind, CanonKind::Zero);
        // even length antisymmetric survives
        let c = canonicalize_h(&word(-1, &[-1, 1], 1));
        assert!(matches!(c.kind, CanonKind::Spanning(_)));
    }

    #[test]
    fn spanning_pair_normalization() {
        // I(-1; u; 1) = (-1)^|u| I(-1; -rev u; 1); the smaller word wins.
        let u = letters(&[1, 0, 0]);
        let v = negated_reverse(&u); // (0, 0, -1)
        let cu = canonicalize_h(&IIWord::new(Letter::Minus, u, Letter::Plus));
        let cv = canonicalize_h(&IIWord::new(Letter::Minus, v.clone(), Letter::Plus));
        let CanonKind::Spanning(wu) = cu.kind else {
            panic!()
        };
        let CanonKind::Spanning(wv) = cv.kind else {
            panic!()
        };
        assert_eq!(wu, wv);
        assert_eq!(cu.coeff, -cv.coeff.clone());
    }

    #[test]
    fn idempotence_and_reversal_property() {
        let samples = [
            word(0, &[1, 0, -1, 0, 0], -1),
            word(1, &[0, 0, 1], 0),
            word(-1, &[0, 1, 0], 0),
            word(0, &[-1, 0, 1, 0, 0], 1),
            word(0, &[1, 1, 0, -1], 1),
        ];
        for w in samples {
            let c = canonicalize_h(&w);
            if let CanonKind::Anchored(u) = &c.kind {
                let again = canonicalize_h(u);
                assert_eq!(again.kind, CanonKind::Anchored(u.clone()));
                assert_eq!(again.coeff, q(1));
                // reversal: I(a0; w; a1) = (-1)^w I(a1; rev w; a0)
                let mut rev = w.interior.clone();
                rev.reverse();
                let r = canonicalize_h(&IIWord::new(w.end, rev, w.start));
                let sign = if w.weight() % 2 == 1 { q(-1) } else { q(1) };
                assert_eq!(r.kind, c.kind);
                assert_eq!(r.coeff, sign * c.coeff.clone());
            }
        }
    }

    #[test]
    fn weight1_full_table() {
        // Independent reduction: route every (a, b, c) through reversal,
        // homothety, and the through-0 splitting; compare with the formula.
        fn independent(a: Letter, b: Letter, c: Letter) -> BigRational {
            if a == c {
                return q(0); // trivial path
            }
            // reduce end to Plus
            let (mut a, mut b, mut c, mut coeff) = (a, b, c, q(1));
            if c == Letter::Zero {
                std::mem::swap(&mut a, &mut c);
                coeff = -coeff; // odd length reversal
            }
            if c == Letter::Minus {
                // homothety: the end point becomes Plus
                a = a.negate();
                b = b.negate();
            }
            if a == Letter::Minus {
                // I(-1;b;1) = I(-1;b;0) + I(0;b;1) modulo products
                return coeff.clone() * (independent(Letter::Minus, b, Letter::Zero)
                    + independent(Letter::Zero, b, Letter::Plus));
            }
            // endpoints (0, 1): I(0;0;1) = I(0;1;1) = 0, I(0;-1;1) = class.
            match b {
                Letter::Minus => coeff,
                _ => q(0),
            }
        }
        for a in [Letter::Zero, Letter::Plus, Letter::Minus] {
            for b in [Letter::Zero, Letter::Plus, Letter::Minus] {
                for c in [Letter::Zero, Letter::Plus, Letter::Minus] {
                    assert_eq!(
                        weight1_class(a, b, c),
                        independent(a, b, c),
                        "({a}, {b}, {c})"
                    );
                }
            }
        }
    }

    #[test]
    fn weight1_examples() {
        // I(0; eta; eta) vanishes; I(0; -1; 1) is the class itself.
        assert_eq!(weight1_class(Letter::Zero, Letter::Plus, Letter::Plus), q(0));
        assert_eq!(weight1_class(Letter::Zero, Letter::Minus, Letter::Plus), q(1));
        assert_eq!(weight1_class(Letter::Zero, Letter::Plus, Letter::Minus), q(1));
    }

    #[test]
    fn canonicalize_l_examples() {
        // I(-1; 0,1,0; 0) -> -1 * the word of zeta_1(b2)
        let pieces = canonicalize_l(&word(-1, &[0, 1, 0], 0));
        assert_eq!(pieces.len(), 1);
        assert_eq!(pieces[0].coeff, q(-1));
        assert_eq!(pieces[0].word, word(0, &[0, -1, 0], 1));
        assert!(pieces[0].sign_convention);

        // canonical (0,1) word is a fixed point
        let w = rho(&SignedComposition::from_signed(&[-2, 3]));
        let pieces = canonicalize_l(&w);
        assert_eq!(pieces.len(), 1);
        assert_eq!(pieces[0].coeff, q(1));
        assert_eq!(pieces[0].word, w);
        assert!(!pieces[0].sign_convention);

        // spanning split: I(-1; 1,0; 1) = I(-1; 1,0; 0) + I(0; 1,0; 1)
        let pieces = canonicalize_l(&word(-1, &[1, 0], 1));
        let comb = canonicalize_l_comb(&word(-1, &[1, 0], 1));
        assert_eq!(pieces.len(), 2);
        assert_eq!(comb.coeff(&word(0, &[1, 0], 1)), q(1));
        // I(-1; 1,0; 0) = (+1)^2 reversal -> I(0; 0,1; -1) -> negate ->
        // I(0; 0,-1; 1)
        assert_eq!(comb.coeff(&word(0, &[0, -1], 1)), q(1));
    }
}
