//! Formal linear combinations, the word shuffle and composition quasi-shuffle
//! products, T-regularization for both, and the leading-zero expansion.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::exact::binomial;
use crate::words::{rho, unrho, IIWord, Letter, SignedComposition, SignedEntry};

/// A finite formal sum of terms with exact rational coefficients.
/// Zero coefficients are never stored; term order is the `Ord` of `T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinComb<T: Ord> {
    terms: BTreeMap<T, BigRational>,
}

impl<T: Ord + Clone> LinComb<T> {
    pub fn new() -> Self {
        LinComb {
            terms: BTreeMap::new(),
        }
    }

    pub fn singleton(term: T) -> Self {
        let mut lc = LinComb::new();
        lc.add_term(term, BigRational::one());
        lc
    }

    pub fn from_terms(pairs: impl IntoIterator<Item = (T, BigRational)>) -> Self {
        let mut lc = LinComb::new();
        for (t, q) in pairs {
            lc.add_term(t, q);
        }
        lc
    }

    pub fn add_term(&mut self, term: T, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(term);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&mut self, other: &LinComb<T>) {
        for (t, q) in other.iter() {
            self.add_term(t.clone(), q.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &LinComb<T>, scale: &BigRational) {
        for (t, q) in other.iter() {
            self.add_term(t.clone(), q * scale);
        }
    }

    pub fn scale(&mut self, factor: &BigRational) {
        if factor.is_zero() {
            self.terms.clear();
            return;
        }
        for q in self.terms.values_mut() {
            *q *= factor;
        }
    }

    pub fn scaled(&self, factor: &BigRational) -> LinComb<T> {
        let mut out = self.clone();
        out.scale(factor);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, term: &T) -> BigRational {
        self.terms.get(term).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, &BigRational)> {
        self.terms.iter()
    }

    /// Linear extension of a term map.
    pub fn map_terms<U: Ord + Clone>(&self, mut f: impl FnMut(&T) -> LinComb<U>) -> LinComb<U> {
        let mut out = LinComb::new();
        for (t, q) in self.iter() {
            out.add_scaled(&f(t), q);
        }
        out
    }
}

impl<T: Ord + Clone> Default for LinComb<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Ord + Clone + fmt::Display> fmt::Display for LinComb<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (t, q)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{q}*{t}")?;
        }
        Ok(())
    }
}

/// Polynomial in the regularization indeterminate `T` with `LinComb`
/// coefficients. Index = power of `T`; trailing zero coefficients trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TPolynomial<T: Ord> {
    coeffs: Vec<LinComb<T>>,
}

impl<T: Ord + Clone> TPolynomial<T> {
    pub fn zero() -> Self {
        TPolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: LinComb<T>) -> Self {
        let mut p = TPolynomial { coeffs: vec![c] };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            self.coeffs.pop();
        }
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeff(&self, power: usize) -> LinComb<T> {
        self.coeffs.get(power).cloned().unwrap_or_default()
    }

    /// The value at `T = 0`.
    pub fn t_zero_part(&self) -> LinComb<T> {
        self.coeff(0)
    }

    pub fn add(&mut self, other: &TPolynomial<T>) {
        while self.coeffs.len() < other.coeffs.len() {
            self.coeffs.push(LinComb::new());
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            self.coeffs[k].add(c);
        }
        self.trim();
    }

    pub fn add_scaled(&mut self, other: &TPolynomial<T>, scale: &BigRational) {
        while self.coeffs.len() < other.coeffs.len() {
            self.coeffs.push(LinComb::new());
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            self.coeffs[k].add_scaled(c, scale);
        }
        self.trim();
    }

    pub fn scale(&mut self, factor: &BigRational) {
        for c in &mut self.coeffs {
            c.scale(factor);
        }
        self.trim();
    }

    /// Multiplication by `T` (degree shift).
    pub fn mul_t(&self) -> TPolynomial<T> {
        if self.coeffs.is_empty() {
            return TPolynomial::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(LinComb::new());
        coeffs.extend(self.coeffs.iter().cloned());
        TPolynomial { coeffs }
    }
}

/// Shuffle product of two letter lists: the sum over all interleavings,
/// multiplicities collected.
pub fn shuffle(u: &[Letter], v: &[Letter]) -> LinComb<Vec<Letter>> {
    fn go(
        u: &[Letter],
        v: &[Letter],
        prefix: &mut Vec<Letter>,
        out: &mut LinComb<Vec<Letter>>,
    ) {
        if u.is_empty() {
            let mut word = prefix.clone();
            word.extend_from_slice(v);
            out.add_term(word, BigRational::one());
            return;
        }
        if v.is_empty() {
            let mut word = prefix.clone();
            word.extend_from_slice(u);
            out.add_term(word, BigRational::one());
            return;
        }
        prefix.push(u[0]);
        go(&u[1..], v, prefix, out);
        prefix.pop();
        prefix.push(v[0]);
        go(u, &v[1..], prefix, out);
        prefix.pop();
    }
    let mut out = LinComb::new();
    let mut prefix = Vec::new();
    go(u, v, &mut prefix, &mut out);
    out
}

fn merge_entries(x: SignedEntry, y: SignedEntry) -> SignedEntry {
    SignedEntry::new(x.magnitude + y.magnitude, x.sign * y.sign)
}

/// Quasi-shuffle (stuffle) product of two convergent-form compositions:
/// interleavings plus merges, where a merge adds magnitudes and multiplies
/// signs. Both inputs must have no leading zeros.
pub fn stuffle(c1: &SignedComposition, c2: &SignedComposition) -> LinComb<SignedComposition> {
    assert_eq!(c1.leading_zeros, 0, "stuffle requires a = 0");
    assert_eq!(c2.leading_zeros, 0, "stuffle requires a = 0");
    fn go(
        u: &[SignedEntry],
        v: &[SignedEntry],
        prefix: &mut Vec<SignedEntry>,
        out: &mut LinComb<SignedComposition>,
    ) {
        if u.is_empty() {
            let mut entries = prefix.clone();
            entries.extend_from_slice(v);
            out.add_term(SignedComposition::new(entries), BigRational::one());
            return;
        }
        if v.is_empty() {
            let mut entries = prefix.clone();
            entries.extend_from_slice(u);
            out.add_term(SignedComposition::new(entries), BigRational::one());
            return;
        }
        prefix.push(u[0]);
        go(&u[1..], v, prefix, out);
        prefix.pop();
        prefix.push(v[0]);
        go(u, &v[1..], prefix, out);
        prefix.pop();
        prefix.push(merge_entries(u[0], v[0]));
        go(&u[1..], &v[1..], prefix, out);
        prefix.pop();
    }
    let mut out = LinComb::new();
    let mut prefix = Vec::new();
    go(&c1.entries, &c2.entries, &mut prefix, &mut out);
    out
}

/// The leading-zero expansion: rewrites `zeta_a(s; eps)` as
/// `(-1)^a sum over i1+..+id = a of prod C(s_j + i_j - 1, i_j)
/// zeta(s+i; eps)`. `a = 0` is the identity; depth 0 with `a > 0` is zero.
pub fn expand_leading_zeros(c: &SignedComposition) -> LinComb<SignedComposition> {
    let a = c.leading_zeros;
    if a == 0 {
        return LinComb::singleton(c.clone());
    }
    let d = c.depth();
    if d == 0 {
        return LinComb::new();
    }
    let sign = if a % 2 == 0 {
        BigRational::one()
    } else {
        -BigRational::one()
    };
    let mut out = LinComb::new();
    let mut increments = vec![0u32; d];
    fn recurse(
        c: &SignedComposition,
        increments: &mut Vec<u32>,
        slot: usize,
        remaining: u32,
        sign: &BigRational,
        out: &mut LinComb<SignedComposition>,
    ) {
        if slot + 1 == increments.len() {
            increments[slot] = remaining;
            let mut coeff = sign.clone();
            let entries: Vec<SignedEntry> = c
                .entries
                .iter()
                .zip(increments.iter())
                .map(|(e, &i)| {
                    coeff *= BigRational::from(binomial((e.magnitude + i - 1) as u64, i as u64));
                    SignedEntry::new(e.magnitude + i, e.sign)
                })
                .collect();
            out.add_term(SignedComposition::new(entries), coeff);
            return;
        }
        for i in 0..=remaining {
            increments[slot] = i;
            recurse(c, increments, slot + 1, remaining - i, sign, out);
        }
    }
    recurse(c, &mut increments, 0, a, &sign, &mut out);
    out
}

fn trailing_plus_count(letters: &[Letter]) -> usize {
    letters
        .iter()
        .rev()
        .take_while(|&&l| l == Letter::Plus)
        .count()
}

/// Shuffle T-regularization of interior letter lists with endpoints `(0, 1)`
/// understood. Coefficients of the result are convergent letter lists.
fn regularize_letters(letters: &[Letter]) -> TPolynomial<Vec<Letter>> {
    if letters.is_empty() {
        return TPolynomial::constant(LinComb::singleton(Vec::new()));
    }
    if *letters.last().unwrap() == Letter::Plus {
        // Peel one divergent boundary letter through the word shuffle:
        // T * reg(u) = (t+1) reg(w) + sum of insertion words with fewer
        // trailing ones.
        let u = &letters[..letters.len() - 1];
        let t = trailing_plus_count(u);
        let mut insertions: LinComb<Vec<Letter>> = LinComb::new();
        for pos in 0..=u.len() {
            let mut v = u.to_vec();
            v.insert(pos, Letter::Plus);
            insertions.add_term(v, BigRational::one());
        }
        let mut acc = regularize_letters(u).mul_t();
        for (v, q) in insertions.iter() {
            if v.as_slice() == letters {
                continue;
            }
            acc.add_scaled(&regularize_letters(v), &-q.clone());
        }
        let mult = BigRational::from(num_bigint::BigInt::from(t as u32 + 1));
        acc.scale(&mult.recip());
        return acc;
    }
    if letters[0] == Letter::Zero {
        // Leading zeros route through the binomial expansion. The tail is
        // already free of divergent boundary ones here.
        let word = IIWord::new(Letter::Zero, letters.to_vec(), Letter::Plus);
        let comp = unrho(&word).expect("canonical endpoints");
        if comp.depth() == 0 {
            return TPolynomial::zero(); // all-zero interior vanishes
        }
        let expanded = expand_leading_zeros(&comp);
        let as_letters = expanded.map_terms(|c| LinComb::singleton(rho(c).interior));
        return TPolynomial::constant(as_letters);
    }
    TPolynomial::constant(LinComb::singleton(letters.to_vec()))
}

/// Shuffle T-regularization of a word with endpoints `(0, 1)`.
///
/// The weight-1 divergent word `(0; 1; 1)` maps to `T`; convergent words are
/// degree-0 fixed points; evaluating the polynomial at `T = 0` gives the
/// shuffle-regularized value.
pub fn shuffle_regularize(w: &IIWord) -> TPolynomial<IIWord> {
    assert_eq!(w.start, Letter::Zero, "shuffle_regularize requires start 0");
    assert_eq!(w.end, Letter::Plus, "shuffle_regularize requires end 1");
    let poly = regularize_letters(&w.interior);
    let mut out = TPolynomial::zero();
    for power in 0..poly.coeffs.len() {
        let lifted = poly.coeffs[power]
            .map_terms(|ls| LinComb::singleton(IIWord::new(Letter::Zero, ls.clone(), Letter::Plus)));
        let mut shifted = TPolynomial::constant(lifted);
        for _ in 0..power {
            shifted = shifted.mul_t();
        }
        out.add(&shifted);
    }
    out
}

fn trailing_unit_count(entries: &[SignedEntry]) -> usize {
    entries
        .iter()
        .rev()
        .take_while(|e| e.magnitude == 1 && e.sign == 1)
        .count()
}

/// Quasi-shuffle T-regularization of a composition without leading zeros:
/// `zeta_*(1) = T`, convergent compositions are degree-0 fixed points, and
/// the `T^0` coefficient is the stuffle-regularized value.
pub fn stuffle_regularize(c: &SignedComposition) -> TPolynomial<SignedComposition> {
    assert_eq!(c.leading_zeros, 0, "stuffle_regularize requires a = 0");
    if c.is_convergent() {
        return TPolynomial::constant(LinComb::singleton(c.clone()));
    }
    // Last entry is an unbarred 1. Peel it through the quasi-shuffle of the
    // single entry (1,+) with the rest.
    let unit = SignedEntry::plain(1);
    let rest = &c.entries[..c.entries.len() - 1];
    let t = trailing_unit_count(rest);
    let mut products: LinComb<SignedComposition> = LinComb::new();
    for pos in 0..=rest.len() {
        let mut v = rest.to_vec();
        v.insert(pos, unit);
        products.add_term(SignedComposition::new(v), BigRational::one());
    }
    for pos in 0..rest.len() {
        let mut v = rest.to_vec();
        v[pos] = merge_entries(v[pos], unit);
        products.add_term(SignedComposition::new(v), BigRational::one());
    }
    let rest_comp = SignedComposition::new(rest.to_vec());
    let mut acc = stuffle_regularize(&rest_comp).mul_t();
    for (v, q) in products.iter() {
        if v == c {
            continue;
        }
        acc.add_scaled(&stuffle_regularize(v), &-q.clone());
    }
    let mult = BigRational::from(num_bigint::BigInt::from(t as u32 + 1));
    acc.scale(&mult.recip());
    acc
}
