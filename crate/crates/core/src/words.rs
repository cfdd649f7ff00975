//! Iterated-integral words over `{0, +1, -1}`, signed compositions in bar
//! notation, the encoding between them, and the composition text grammar.
//!
//! Compositions are stored innermost-first: `(s1, .., sd)` sums over
//! `0 < k1 < .. < kd`, so the first entry belongs to the innermost index.
//! Many references use the opposite order.

use std::fmt;

use thiserror::Error;

/// A letter of the level-2 alphabet: 0 and the two square roots of unity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    Zero,
    Plus,
    Minus,
}

impl Letter {
    pub fn value(self) -> i8 {
        match self {
            Letter::Zero => 0,
            Letter::Plus => 1,
            Letter::Minus => -1,
        }
    }

    pub fn from_value(v: i8) -> Letter {
        match v {
            0 => Letter::Zero,
            1 => Letter::Plus,
            -1 => Letter::Minus,
            _ => panic!("letter out of alphabet: {v}"),
        }
    }

    pub fn is_zero(self) -> bool {
        self == Letter::Zero
    }

    /// Multiplication by -1 (homothety on the level-2 alphabet).
    pub fn negate(self) -> Letter {
        match self {
            Letter::Zero => Letter::Zero,
            Letter::Plus => Letter::Minus,
            Letter::Minus => Letter::Plus,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::Zero => write!(f, "0"),
            Letter::Plus => write!(f, "1"),
            Letter::Minus => write!(f, "-1"),
        }
    }
}

/// An iterated-integral word `I(start; interior; end)`.
///
/// Weight is the interior length, depth the number of nonzero interior
/// letters. Ordering is (weight, depth, start, interior, end), which gives
/// deterministic term order in formal sums.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IIWord {
    pub start: Letter,
    pub interior: Vec<Letter>,
    pub end: Letter,
}

impl IIWord {
    pub fn new(start: Letter, interior: Vec<Letter>, end: Letter) -> Self {
        IIWord {
            start,
            interior,
            end,
        }
    }

    pub fn weight(&self) -> usize {
        self.interior.len()
    }

    pub fn depth(&self) -> usize {
        self.interior.iter().filter(|l| !l.is_zero()).count()
    }

    /// True when the word converges as a genuine integral: the first
    /// interior letter differs from the start point and the last from the
    /// end point.
    pub fn is_convergent(&self) -> bool {
        match (self.interior.first(), self.interior.last()) {
            (Some(&first), Some(&last)) => first != self.start && last != self.end,
            _ => true,
        }
    }
}

impl PartialOrd for IIWord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for IIWord {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.weight(), self.depth(), self.start, &self.interior, self.end).cmp(&(
            other.weight(),
            other.depth(),
            other.start,
            &other.interior,
            other.end,
        ))
    }
}

impl fmt::Display for IIWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "I({};", self.start)?;
        for (i, l) in self.interior.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ";{})", self.end)
    }
}

/// One entry `(magnitude, sign)` of a signed composition; negative sign is
/// the barred entry of the bar notation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SignedEntry {
    pub magnitude: u32,
    pub sign: i8,
}

impl SignedEntry {
    pub fn new(magnitude: u32, sign: i8) -> Self {
        assert!(magnitude >= 1, "entry magnitude must be >= 1");
        assert!(sign == 1 || sign == -1, "entry sign must be +1 or -1");
        SignedEntry { magnitude, sign }
    }

    pub fn plain(magnitude: u32) -> Self {
        SignedEntry::new(magnitude, 1)
    }

    pub fn barred(magnitude: u32) -> Self {
        SignedEntry::new(magnitude, -1)
    }
}

impl PartialOrd for SignedEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SignedEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Unbarred sorts before barred at equal magnitude.
        (self.magnitude, -self.sign).cmp(&(other.magnitude, -other.sign))
    }
}

impl fmt::Display for SignedEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign < 0 {
            write!(f, "b{}", self.magnitude)
        } else {
            write!(f, "{}", self.magnitude)
        }
    }
}

/// A signed composition `zeta_a(s1,..,sd; eps)`: a leading-zero count and a
/// depth-`d` list of signed entries, innermost-first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedComposition {
    pub leading_zeros: u32,
    pub entries: Vec<SignedEntry>,
}

impl SignedComposition {
    pub fn new(entries: Vec<SignedEntry>) -> Self {
        SignedComposition {
            leading_zeros: 0,
            entries,
        }
    }

    pub fn with_leading_zeros(leading_zeros: u32, entries: Vec<SignedEntry>) -> Self {
        SignedComposition {
            leading_zeros,
            entries,
        }
    }

    /// Convenience constructor from signed integers; negative means barred.
    pub fn from_signed(entries: &[i32]) -> Self {
        SignedComposition::new(
            entries
                .iter()
                .map(|&e| {
                    assert!(e != 0, "zero entry");
                    SignedEntry::new(e.unsigned_abs(), if e < 0 { -1 } else { 1 })
                })
                .collect(),
        )
    }

    pub fn depth(&self) -> usize {
        self.entries.len()
    }

    pub fn weight(&self) -> u32 {
        self.leading_zeros + self.entries.iter().map(|e| e.magnitude).sum::<u32>()
    }

    /// Convergent iff there are no leading zeros and the last entry is not
    /// an unbarred 1.
    pub fn is_convergent(&self) -> bool {
        self.leading_zeros == 0
            && self
                .entries
                .last()
                .map(|e| !(e.magnitude == 1 && e.sign == 1))
                .unwrap_or(true)
    }

    /// Drops the leading-zero count, keeping the entries.
    pub fn without_leading_zeros(&self) -> SignedComposition {
        SignedComposition::new(self.entries.clone())
    }
}

impl PartialOrd for SignedComposition {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SignedComposition {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (
            self.weight(),
            self.depth(),
            self.leading_zeros,
            &self.entries,
        )
            .cmp(&(
                other.weight(),
                other.depth(),
                other.leading_zeros,
                &other.entries,
            ))
    }
}

impl fmt::Display for SignedComposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_composition(self))
    }
}

/// Sign carried by the period map: `(-1)^depth`.
pub fn period_sign(c: &SignedComposition) -> i8 {
    if c.depth() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The word encoding of a composition: leading zeros, then for each entry
/// the letter `eta_j = prod_{i>=j} eps_i` followed by `s_j - 1` zeros.
/// Start point 0, end point 1.
pub fn rho(c: &SignedComposition) -> IIWord {
    let mut interior = Vec::with_capacity(c.weight() as usize);
    for _ in 0..c.leading_zeros {
        interior.push(Letter::Zero);
    }
    // Tail products of the signs, computed left to right via suffix scan.
    let mut suffix: Vec<i8> = vec![1; c.entries.len() + 1];
    for j in (0..c.entries.len()).rev() {
        suffix[j] = c.entries[j].sign * suffix[j + 1];
    }
    for (j, entry) in c.entries.iter().enumerate() {
        interior.push(if suffix[j] > 0 {
            Letter::Plus
        } else {
            Letter::Minus
        });
        for _ in 1..entry.magnitude {
            interior.push(Letter::Zero);
        }
    }
    IIWord::new(Letter::Zero, interior, Letter::Plus)
}

/// Error for words that are not in the image of the encoding.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("word is not canonical: endpoints must be (0, 1)")]
pub struct NotCanonical;

/// Inverse of [`rho`]: recovers the leading-zero count and the composition
/// from a word with endpoints `(0, 1)`.
pub fn unrho(w: &IIWord) -> Result<SignedComposition, NotCanonical> {
    if w.start != Letter::Zero || w.end != Letter::Plus {
        return Err(NotCanonical);
    }
    let mut idx = 0;
    while idx < w.interior.len() && w.interior[idx].is_zero() {
        idx += 1;
    }
    let leading_zeros = idx as u32;
    // Collect (eta_j, s_j) blocks: a nonzero letter then its trailing zeros.
    let mut etas: Vec<i8> = Vec::new();
    let mut magnitudes: Vec<u32> = Vec::new();
    while idx < w.interior.len() {
        let eta = w.interior[idx].value();
        debug_assert!(eta != 0);
        idx += 1;
        let mut mag = 1u32;
        while idx < w.interior.len() && w.interior[idx].is_zero() {
            mag += 1;
            idx += 1;
        }
        etas.push(eta);
        magnitudes.push(mag);
    }
    // eps_j = eta_j / eta_{j+1} with eta_{d+1} = 1; at level 2, division is
    // multiplication.
    let d = etas.len();
    let mut entries = Vec::with_capacity(d);
    for j in 0..d {
        let next = if j + 1 < d { etas[j + 1] } else { 1 };
        entries.push(SignedEntry::new(magnitudes[j], etas[j] * next));
    }
    Ok(SignedComposition::with_leading_zeros(leading_zeros, entries))
}

/// Syntax error with byte position for the composition grammar.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("parse error at byte {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(input: &'a str) -> Self {
        Parser {
            input: input.as_bytes(),
            pos: 0,
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            position: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.input.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek();
        if b.is_some() {
            self.pos += 1;
        }
        b
    }

    fn expect(&mut self, want: u8) -> Result<(), ParseError> {
        match self.bump() {
            Some(b) if b == want => Ok(()),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.error(format!("expected '{}'", want as char)))
            }
        }
    }

    fn integer(&mut self) -> Result<u32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected integer"));
        }
        std::str::from_utf8(&self.input[start..self.pos])
            .unwrap()
            .parse::<u32>()
            .map_err(|_| ParseError {
                position: start,
                message: "integer out of range".into(),
            })
    }

    // item := entry | group
    fn item(&mut self, out: &mut Vec<SignedEntry>) -> Result<(), ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.bump();
                let mut inner = Vec::new();
                self.list(&mut inner)?;
                self.expect(b')')?;
                self.expect(b'^')?;
                let reps = self.integer()?;
                for _ in 0..reps {
                    out.extend(inner.iter().copied());
                }
                Ok(())
            }
            Some(b'b') => {
                self.bump();
                let pos = self.pos;
                let mag = self.integer()?;
                if mag == 0 {
                    return Err(ParseError {
                        position: pos,
                        message: "entry magnitude must be >= 1".into(),
                    });
                }
                out.push(SignedEntry::barred(mag));
                Ok(())
            }
            Some(b) if b.is_ascii_digit() => {
                let pos = self.pos;
                let mag = self.integer()?;
                if mag == 0 {
                    return Err(ParseError {
                        position: pos,
                        message: "entry magnitude must be >= 1".into(),
                    });
                }
                out.push(SignedEntry::plain(mag));
                Ok(())
            }
            _ => Err(self.error("expected entry or group")),
        }
    }

    fn list(&mut self, out: &mut Vec<SignedEntry>) -> Result<(), ParseError> {
        self.item(out)?;
        while self.peek() == Some(b',') {
            self.bump();
            self.item(out)?;
        }
        Ok(())
    }
}

/// Parses the composition grammar:
///
/// ```text
/// entry := INT | "b" INT          (bINT is barred, INT >= 1)
/// group := "(" list ")" "^" INT   (repetition)
/// list  := (entry | group) ("," (entry | group))*
/// comp  := ["a" INT ";"] list     (leading-zero count, default 0)
/// ```
pub fn parse_composition(text: &str) -> Result<SignedComposition, ParseError> {
    let mut p = Parser::new(text);
    let mut leading_zeros = 0;
    if p.peek() == Some(b'a') {
        p.bump();
        leading_zeros = p.integer()?;
        p.expect(b';')?;
    }
    let mut entries = Vec::new();
    if p.peek().is_some() {
        p.list(&mut entries)?;
    }
    p.skip_ws();
    if p.pos != p.input.len() {
        return Err(p.error("trailing input"));
    }
    Ok(SignedComposition::with_leading_zeros(leading_zeros, entries))
}

/// Canonical text rendering; flat entry list with an `aN;` prefix only when
/// the leading-zero count is nonzero. `parse(format(c)) == c`.
pub fn format_composition(c: &SignedComposition) -> String {
    let mut out = String::new();
    if c.leading_zeros > 0 {
        out.push_str(&format!("a{};", c.leading_zeros));
    }
    for (i, e) in c.entries.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&e.to_string());
    }
    out
}
