//! Product-of-exponentials numerals: `∏ base_i^exp_i` with integer bases and
//! signed integer exponents.
//!
//! A [`Poe`] is always stored normalized: bases are pairwise distinct,
//! sorted ascending and at least 2, exponents are nonzero. Multiplication and
//! division only ever add exponents, so the base integers never grow.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::refine::FourLists;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PoeError {
    #[error("base and exponent lists differ in length ({bases} vs {exponents})")]
    LengthMismatch { bases: usize, exponents: usize },
    #[error("base {0} is not a positive integer")]
    NonPositiveBase(BigInt),
    #[error("value needs about {needed} bits, over the budget of {budget}")]
    BudgetExceeded { needed: BigUint, budget: u64 },
    #[error("{0} is not a positive rational")]
    NonPositiveRational(BigRational),
    #[error("column {column}: {message}")]
    Syntax { column: usize, message: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poe {
    bases: Vec<BigUint>,
    exponents: Vec<BigInt>,
}

/// Normalizes raw `(bases, exponents)` lists: base-1 entries and zero
/// exponents disappear, duplicate bases merge by exponent addition, and the
/// result is sorted by base.
pub fn normalize(bases: Vec<BigInt>, exponents: Vec<BigInt>) -> Result<Poe, PoeError> {
    if bases.len() != exponents.len() {
        return Err(PoeError::LengthMismatch { bases: bases.len(), exponents: exponents.len() });
    }
    let mut pairs = Vec::with_capacity(bases.len());
    for (b, e) in bases.into_iter().zip(exponents) {
        if b.sign() != Sign::Plus {
            return Err(PoeError::NonPositiveBase(b));
        }
        pairs.push((b.into_parts().1, e));
    }
    Ok(Poe::from_pairs(pairs))
}

impl Poe {
    /// The empty product.
    pub fn one() -> Self {
        Poe::default()
    }

    /// Builds a normalized PoE from positive bases; panics on a zero base.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (BigUint, BigInt)>) -> Self {
        let mut merged: BTreeMap<BigUint, BigInt> = BTreeMap::new();
        for (b, e) in pairs {
            assert!(!b.is_zero(), "PoE base must be positive");
            if b.is_one() || e.is_zero() {
                continue;
            }
            *merged.entry(b).or_insert_with(BigInt::zero) += e;
        }
        let (bases, exponents) = merged.into_iter().filter(|(_, e)| !e.is_zero()).unzip();
        Poe { bases, exponents }
    }

    pub fn power_of(base: impl Into<BigUint>, exp: impl Into<BigInt>) -> Self {
        Poe::from_pairs([(base.into(), exp.into())])
    }

    pub fn from_integer(n: &BigUint) -> Result<Self, PoeError> {
        if n.is_zero() {
            return Err(PoeError::NonPositiveBase(BigInt::zero()));
        }
        Ok(Poe::power_of(n.clone(), 1))
    }

    /// `num^1 · den^-1` for a positive rational in lowest terms.
    pub fn from_rational(q: &BigRational) -> Result<Self, PoeError> {
        if !q.is_positive() {
            return Err(PoeError::NonPositiveRational(q.clone()));
        }
        Ok(Poe::from_pairs([
            (q.numer().magnitude().clone(), BigInt::one()),
            (q.denom().magnitude().clone(), -BigInt::one()),
        ]))
    }

    pub fn bases(&self) -> &[BigUint] {
        &self.bases
    }

    pub fn exponents(&self) -> &[BigInt] {
        &self.exponents
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BigUint, &BigInt)> {
        self.bases.iter().zip(&self.exponents)
    }

    pub fn mul(&self, other: &Poe) -> Poe {
        Poe::from_pairs(self.iter().chain(other.iter()).map(|(b, e)| (b.clone(), e.clone())))
    }

    pub fn div(&self, other: &Poe) -> Poe {
        self.mul(&other.inv())
    }

    pub fn inv(&self) -> Poe {
        Poe { bases: self.bases.clone(), exponents: self.exponents.iter().map(|e| -e).collect() }
    }

    pub fn pow(&self, k: &BigInt) -> Poe {
        if k.is_zero() {
            return Poe::one();
        }
        Poe { bases: self.bases.clone(), exponents: self.exponents.iter().map(|e| e * k).collect() }
    }

    /// Σ |exponent_i|.
    pub fn exponent_abs_sum(&self) -> BigUint {
        self.exponents.iter().map(|e| e.magnitude().clone()).sum()
    }

    /// Upper bound on the bits of the binary expansion of numerator plus
    /// denominator: Σ |e_i| · bitlen(b_i).
    pub fn size_bits(&self) -> BigUint {
        self.iter().map(|(b, e)| e.magnitude() * BigUint::from(b.bits())).sum()
    }

    /// The exact value, refusing when the expansion would exceed
    /// `bit_budget` bits.
    pub fn eval_exact(&self, bit_budget: u64) -> Result<BigRational, PoeError> {
        let needed = self.size_bits();
        if needed > BigUint::from(bit_budget) {
            return Err(PoeError::BudgetExceeded { needed, budget: bit_budget });
        }
        let mut num = BigUint::one();
        let mut den = BigUint::one();
        for (b, e) in self.iter() {
            // fits in u64: bounded by the budget check above
            let k = e.magnitude().iter_u64_digits().next().unwrap_or(0);
            let p = num_traits::pow::Pow::pow(b, k);
            if e.is_positive() {
                num *= p;
            } else {
                den *= p;
            }
        }
        Ok(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Exact equality of values by gcd refinement; never expands a power.
    pub fn equals(&self, other: &Poe) -> bool {
        FourLists::from_poe_pair(self, other).decide().0
    }
}

/// Free-function form of [`Poe::equals`].
pub fn equals(x: &Poe, y: &Poe) -> bool {
    x.equals(y)
}

impl fmt::Display for Poe {
    /// `2^6 * 3^3 / 5^2`; the empty product prints as `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pos: Vec<_> = self.iter().filter(|(_, e)| e.is_positive()).collect();
        let neg: Vec<_> = self.iter().filter(|(_, e)| e.is_negative()).collect();
        if pos.is_empty() {
            write!(f, "1")?;
        }
        for (i, (b, e)) in pos.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            write!(f, "{b}^{e}")?;
        }
        for (b, e) in neg {
            write!(f, " / {b}^{}", e.magnitude())?;
        }
        Ok(())
    }
}

impl FromStr for Poe {
    type Err = PoeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_poe(s)
    }
}

/// Parses the textual PoE form. Whitespace is insignificant, `/` flips the
/// sign of the next factor's exponent, a factor without `^` has exponent 1,
/// and the empty string is the value 1.
pub fn parse_poe(text: &str) -> Result<Poe, PoeError> {
    let mut lex = Lexer::new(text);
    let mut pairs = Vec::new();
    lex.skip_ws();
    if lex.at_end() {
        return Ok(Poe::one());
    }
    let mut negate = false;
    if lex.peek() == Some('/') {
        lex.bump();
        negate = true;
    }
    loop {
        lex.skip_ws();
        let base_col = lex.column();
        let base = lex.unsigned().ok_or_else(|| lex.error("expected a base integer"))?;
        if base.is_zero() {
            return Err(PoeError::Syntax { column: base_col, message: "base must be positive".into() });
        }
        lex.skip_ws();
        let mut exp = BigInt::one();
        if lex.peek() == Some('^') {
            lex.bump();
            lex.skip_ws();
            exp = lex.signed().ok_or_else(|| lex.error("expected an exponent"))?;
        }
        if negate {
            exp = -exp;
        }
        pairs.push((base, exp));
        lex.skip_ws();
        match lex.peek() {
            None => break,
            Some('*') => negate = false,
            Some('/') => negate = true,
            Some(_) => return Err(lex.error("expected '*', '/' or end of input")),
        }
        lex.bump();
    }
    Ok(Poe::from_pairs(pairs))
}

struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    _src: &'a str,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { chars: src.chars().collect(), pos: 0, _src: src }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) {
        self.pos += 1;
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn column(&self) -> usize {
        self.pos + 1
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn error(&self, message: &str) -> PoeError {
        let found = match self.peek() {
            Some(c) => format!(", found '{c}'"),
            None => ", found end of input".to_string(),
        };
        PoeError::Syntax { column: self.column(), message: format!("{message}{found}") }
    }

    fn unsigned(&mut self) -> Option<BigUint> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        digits.parse().ok()
    }

    fn signed(&mut self) -> Option<BigInt> {
        let neg = match self.peek() {
            Some('-') => {
                self.bump();
                true
            }
            Some('+') => {
                self.bump();
                false
            }
            _ => false,
        };
        self.skip_ws();
        let mag = BigInt::from(self.unsigned()?);
        Some(if neg { -mag } else { mag })
    }
}
