//! Explicit lower bounds `|Λ| ≥ 2^{-g}` for nonzero linear forms in
//! logarithms of integers.
//!
//! Two bounds are theorems (Baker–Wüstholz and Matveev); two are conjectural
//! and take caller-supplied constants. Every quantity is bounded from the
//! safe side with rational interval arithmetic, so the returned `g` is never
//! smaller than the exact formula's value.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::logform::{log2_int, log_int, LinearForm};

/// Bits of the outward-rounded dyadic grid used for intermediate bounds.
const GRID: u64 = 128;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GapError {
    #[error("the {regime} bound needs {bits} bits, above the cap of {cap}; use adaptive mode instead")]
    OverflowGuard { regime: &'static str, bits: BigUint, cap: u64 },
    #[error("gap bound needs a form with at least one term")]
    EmptyForm,
    #[error("parameter {0} must be positive")]
    NonPositiveParameter(&'static str),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GapRegime {
    BakerWustholz,
    Matveev,
    LangWaldschmidt { eps: BigRational, c: BigRational },
    BakerAbc { k2: BigRational },
}

impl fmt::Display for GapRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GapRegime::BakerWustholz => write!(f, "baker-wustholz"),
            GapRegime::Matveev => write!(f, "matveev"),
            GapRegime::LangWaldschmidt { eps, c } => write!(f, "lang-waldschmidt(eps={eps}, C={c})"),
            GapRegime::BakerAbc { k2 } => write!(f, "baker-abc(K''={k2})"),
        }
    }
}

/// `|Λ| ≥ 2^{-log2_gap}` whenever `Λ ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapBound {
    pub log2_gap: BigUint,
    pub regime: GapRegime,
    /// Set when `max |bᵢ| = 1` made the ABC bound's `ln max|bᵢ|` factor
    /// vanish and it was raised to 1.
    pub clamped: bool,
}

/// Size cap for the unconditional bounds. `None` disables the check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GapLimits {
    pub max_log2_gap: Option<u64>,
}

impl Default for GapLimits {
    fn default() -> Self {
        GapLimits { max_log2_gap: Some(1 << 31) }
    }
}

impl GapLimits {
    pub fn unlimited() -> Self {
        GapLimits { max_log2_gap: None }
    }

    fn check(&self, regime: &'static str, bits: &BigUint) -> Result<(), GapError> {
        match self.max_log2_gap {
            Some(cap) if *bits > BigUint::from(cap) => {
                Err(GapError::OverflowGuard { regime, bits: bits.clone(), cap })
            }
            _ => Ok(()),
        }
    }
}

fn grid_scale() -> BigInt {
    BigInt::one() << GRID
}

fn snap_up(x: BigRational) -> BigRational {
    let s = grid_scale();
    BigRational::new((x * BigRational::from_integer(s.clone())).ceil().to_integer(), s)
}

fn snap_down(x: BigRational) -> BigRational {
    let s = grid_scale();
    BigRational::new((x * BigRational::from_integer(s.clone())).floor().to_integer(), s)
}

fn ulp() -> BigRational {
    BigRational::new(BigInt::one(), grid_scale())
}

fn int(x: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(x.into())
}

fn ln_bounds(a: &BigUint) -> (BigRational, BigRational) {
    let v = log_int(a, GRID).expect("positive argument").value();
    (&v - ulp(), &v + ulp())
}

fn log2_bounds(a: &BigUint) -> (BigRational, BigRational) {
    let v = log2_int(a, GRID).expect("positive argument");
    let exact = a.trailing_zeros() == Some(a.bits() - 1);
    let v = v.value();
    if exact {
        (v.clone(), v)
    } else {
        (&v - ulp(), &v + ulp())
    }
}

/// Upper bound on `e` from the factorial series and the tail bound
/// `Σ_{i>k} 1/i! < 2/(k+1)!`.
fn e_upper() -> BigRational {
    let mut sum = BigRational::zero();
    let mut fact = BigInt::one();
    for i in 0..30u32 {
        if i > 0 {
            fact *= i;
        }
        sum += BigRational::new(BigInt::one(), fact.clone());
    }
    fact *= 30;
    snap_up(sum + BigRational::new(BigInt::from(2), fact))
}

/// Upper bound on `√n`.
fn sqrt_upper(n: u64) -> BigRational {
    let scaled = BigUint::from(n) << (2 * GRID);
    let r = scaled.sqrt() + BigUint::one();
    BigRational::new(BigInt::from(r), grid_scale())
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `∏ h′(aᵢ) · ln B`, upper bound. `h′(a) = max(ln a, 1)` is 1 for `a <= 2`
/// since `ln 2 < 1 < ln 3`; `B = max(|bᵢ|, e)` is `e` when every `|bᵢ| <= 2`.
fn height_product_upper(f: &LinearForm) -> BigRational {
    let mut acc = BigRational::one();
    for a in f.a() {
        if *a > BigUint::from(2u8) {
            acc = snap_up(acc * ln_bounds(a).1);
        }
    }
    let bmax = f.max_abs_coefficient();
    if bmax > BigUint::from(2u8) {
        acc = snap_up(acc * ln_bounds(&bmax).1);
    }
    acc
}

fn ceil_nonneg(x: &BigRational) -> BigUint {
    let c = x.ceil().to_integer();
    if c.is_negative() {
        BigUint::zero()
    } else {
        c.magnitude().clone()
    }
}

/// Baker–Wüstholz: `|Λ| ≥ exp(−C(n)·∏h′(aᵢ)·ln B)` with
/// `C(n) = 18 (n+1)! n^{n+1} 32^{n+2} ln(2n)`.
/// Dividing by `ln 2` turns the trailing `ln(2n)` into `log₂(2n)`.
pub fn bw_gap(f: &LinearForm, limits: GapLimits) -> Result<GapBound, GapError> {
    let n = f.len() as u64;
    if n == 0 {
        return Err(GapError::EmptyForm);
    }
    let cn = BigInt::from(18) * factorial(n + 1) * BigInt::from(n).pow(n as u32 + 1) * (BigInt::one() << (5 * (n + 2)));
    let log2_2n = log2_bounds(&BigUint::from(2 * n)).1;
    let upper = snap_up(int(cn) * log2_2n) * height_product_upper(f);
    let bits = ceil_nonneg(&upper);
    limits.check("baker-wustholz", &bits)?;
    Ok(GapBound { log2_gap: bits, regime: GapRegime::BakerWustholz, clamped: false })
}

/// Matveev: as [`bw_gap`] with `C′(n) = 2.9 (2e)^{2n+6} (n+2)^{9/2}`.
pub fn matveev_gap(f: &LinearForm, limits: GapLimits) -> Result<GapBound, GapError> {
    let n = f.len() as u64;
    if n == 0 {
        return Err(GapError::EmptyForm);
    }
    let two_e = int(2) * e_upper();
    let mut c = BigRational::new(BigInt::from(29), BigInt::from(10));
    for _ in 0..(2 * n + 6) {
        c = snap_up(c * &two_e);
    }
    c *= int(BigInt::from(n + 2).pow(4));
    c = snap_up(c * sqrt_upper(n + 2));
    let ln2_lower = ln_bounds(&BigUint::from(2u8)).0;
    let upper = snap_up(c * height_product_upper(f) / ln2_lower);
    let bits = ceil_nonneg(&upper);
    limits.check("matveev", &bits)?;
    Ok(GapBound { log2_gap: bits, regime: GapRegime::Matveev, clamped: false })
}

/// Lang–Waldschmidt (conjectural):
/// `|Λ| ≥ C^n·B / (∏|bᵢ|·∏aᵢ)^{1+ε}`, so
/// `g = ⌈(1+ε)·log₂(∏|bᵢ|∏aᵢ) − n·log₂ C − log₂ B⌉`, clamped at 0.
pub fn lw_gap(f: &LinearForm, eps: &BigRational, c: &BigRational) -> Result<GapBound, GapError> {
    if !eps.is_positive() {
        return Err(GapError::NonPositiveParameter("eps"));
    }
    if !c.is_positive() {
        return Err(GapError::NonPositiveParameter("C"));
    }
    if f.is_empty() {
        return Err(GapError::EmptyForm);
    }
    let prod: BigUint = f.b().iter().map(|b| b.magnitude().clone()).product::<BigUint>() * f.a().iter().product::<BigUint>();
    let mut upper = snap_up((BigRational::one() + eps) * log2_bounds(&prod).1);

    // lower bound on log₂ C = log₂ numer − log₂ denom
    let log2_c_lower = log2_bounds(c.numer().magnitude()).0 - log2_bounds(c.denom().magnitude()).1;
    let n = int(f.len() as u64);
    upper -= snap_down(&n * log2_c_lower);

    let bmax = f.max_abs_coefficient();
    let log2_b_lower = if bmax > BigUint::from(2u8) {
        log2_bounds(&bmax).0
    } else {
        // log₂ e = 1/ln 2
        snap_down(BigRational::one() / ln_bounds(&BigUint::from(2u8)).1)
    };
    upper -= log2_b_lower;
    let regime = GapRegime::LangWaldschmidt { eps: eps.clone(), c: c.clone() };
    Ok(GapBound { log2_gap: ceil_nonneg(&upper), regime, clamped: false })
}

/// Consequence of Baker's refined ABC conjecture:
/// `|Λ| ≥ exp(−K″·(Σ ln aᵢ)·ln max|bᵢ|)`, so
/// `g = ⌈K″·(Σ ln aᵢ)·log₂ max|bᵢ|⌉`. When `max|bᵢ| = 1` the last factor
/// would be 0; it is raised to 1 and the result is flagged.
pub fn baker_abc_gap(f: &LinearForm, k2: &BigRational) -> Result<GapBound, GapError> {
    if !k2.is_positive() {
        return Err(GapError::NonPositiveParameter("K''"));
    }
    if f.is_empty() {
        return Err(GapError::EmptyForm);
    }
    let mut sum_ln = BigRational::zero();
    for a in f.a() {
        sum_ln += ln_bounds(a).1;
    }
    let bmax = f.max_abs_coefficient();
    let clamped = bmax.is_one();
    let factor = if clamped { BigRational::one() } else { log2_bounds(&bmax).1 };
    let upper = snap_up(k2 * sum_ln * factor);
    Ok(GapBound { log2_gap: ceil_nonneg(&upper), regime: GapRegime::BakerAbc { k2: k2.clone() }, clamped })
}

/// The smaller of the two unconditional bounds. Fails only if both do.
pub fn unconditional_gap(f: &LinearForm, limits: GapLimits) -> Result<GapBound, GapError> {
    match (bw_gap(f, limits), matveev_gap(f, limits)) {
        (Ok(x), Ok(y)) => Ok(if y.log2_gap < x.log2_gap { y } else { x }),
        (Ok(x), Err(_)) | (Err(_), Ok(x)) => Ok(x),
        (Err(e), Err(_)) => Err(e),
    }
}
