//! Certified fixed-point logarithms of positive integers and of linear forms
//! `Λ(a, b) = Σ bᵢ ln aᵢ`.
//!
//! Every approximation is a [`Dyadic`] `v` with `|true − v| < 2^{-j}` for the
//! requested `j`. No floating point is used on this path.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::dyadic::Dyadic;
use crate::poe::Poe;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogError {
    #[error("logarithm of a non-positive number")]
    NonPositive,
    #[error("invalid linear form: {0}")]
    InvalidForm(String),
}

/// A value together with the precision it was computed for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxReal {
    value: Dyadic,
    error_exponent: u64,
}

impl ApproxReal {
    pub fn dyadic(&self) -> &Dyadic {
        &self.value
    }

    pub fn value(&self) -> BigRational {
        self.value.to_rational()
    }

    /// The `j` in `|true − value| < 2^{-j}`.
    pub fn error_exponent(&self) -> u64 {
        self.error_exponent
    }

    pub fn into_dyadic(self) -> Dyadic {
        self.value
    }
}

impl fmt::Display for ApproxReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (± 2^-{})", self.value, self.error_exponent)
    }
}

const CACHE_LIMIT: usize = 4096;

thread_local! {
    static LN_CACHE: RefCell<HashMap<(BigUint, u64), Dyadic>> = RefCell::new(HashMap::new());
    static LN2_CACHE: RefCell<HashMap<u64, Dyadic>> = RefCell::new(HashMap::new());
}

fn memo<K: std::hash::Hash + Eq + Clone>(
    cache: &'static std::thread::LocalKey<RefCell<HashMap<K, Dyadic>>>,
    key: K,
    compute: impl FnOnce() -> Dyadic,
) -> Dyadic {
    if let Some(v) = cache.with(|c| c.borrow().get(&key).cloned()) {
        return v;
    }
    let v = compute();
    cache.with(|c| {
        let mut c = c.borrow_mut();
        if c.len() >= CACHE_LIMIT {
            c.clear();
        }
        c.insert(key, v.clone());
    });
    v
}

/// `⌈log₂ x⌉` for `x ≥ 1`.
pub(crate) fn ceil_log2(x: &BigUint) -> u64 {
    let bits = x.bits();
    if bits == 0 {
        return 0;
    }
    if x.trailing_zeros() == Some(bits - 1) {
        bits - 1
    } else {
        bits
    }
}

/// `ln 2 = Σ_{i≥1} 1/(i·2^i)` with error below `2^{-r}`.
fn ln2_approx(r: u64) -> Dyadic {
    memo(&LN2_CACHE, r, || {
        // tail after k terms < 2^{-k}/(k+1) <= 2^{-(r+1)}; each floor loses < 1 ulp
        let k = r;
        let p = r + 1 + BigUint::from(k).bits();
        let mut sum = BigInt::zero();
        for i in 1..=k {
            sum += (BigInt::one() << (p - i)) / BigInt::from(i);
        }
        Dyadic::new(sum, p)
    })
}

/// `ln(1 - t)` for `t = num / 2^den_shift ∈ (0, 1/2]`, error below `2^{-q}`.
fn ln_one_minus(num: &BigUint, den_shift: u64, q: u64) -> Dyadic {
    // Σ t^i/i truncated to k terms; tail < 2^{-k}/(k+1).
    let k = q + 1;
    // powers carry at most 4 ulp of error and each division adds 1
    let p = q + 1 + BigUint::from(5 * k).bits();
    let t = BigInt::from((num << p) >> den_shift);
    let mut pw = t.clone();
    let mut sum = BigInt::zero();
    for i in 1..=k {
        if pw.is_zero() {
            break;
        }
        sum += &pw / BigInt::from(i);
        pw = (&pw * &t) >> p;
    }
    Dyadic::new(-sum, p)
}

/// Natural logarithm of a positive integer: `|ln a − v| < 2^{-j}`.
///
/// Range reduction picks `m` with `2^m <= a < 2^{m+1}` and writes
/// `ln a = ln(1 + y) + (m+1)·ln 2` with `y = a/2^{m+1} − 1 ∈ [−1/2, 0)`.
/// The reduced logarithm gets half the error budget, and `ln 2` is computed
/// finely enough that multiplying it by `m+1` uses up the other half.
pub fn log_int(a: &BigUint, j: u64) -> Result<ApproxReal, LogError> {
    if a.is_zero() {
        return Err(LogError::NonPositive);
    }
    let value = if a.is_one() {
        Dyadic::zero()
    } else {
        memo(&LN_CACHE, (a.clone(), j), || ln_uncached(a, j))
    };
    Ok(ApproxReal { value, error_exponent: j })
}

fn ln_uncached(a: &BigUint, j: u64) -> Dyadic {
    let m = a.bits() - 1;
    let m1 = BigUint::from(m + 1);
    let r = j + 1 + ceil_log2(&m1);
    let ln2 = ln2_approx(r);
    if a.trailing_zeros() == Some(m) {
        return &ln2 * &BigInt::from(m);
    }
    let top = BigUint::one() << (m + 1);
    let reduced = ln_one_minus(&(&top - a), m + 1, j + 1);
    &reduced + &(&ln2 * &BigInt::from(m1))
}

/// Signed-integer convenience wrapper around [`log_int`].
pub fn ln_approx(a: &BigInt, j: u64) -> Result<ApproxReal, LogError> {
    if !a.is_positive() {
        return Err(LogError::NonPositive);
    }
    log_int(a.magnitude(), j)
}

/// `log₂ a` with error below `2^{-j}`; exact when `a` is a power of two.
pub fn log2_int(a: &BigUint, j: u64) -> Result<ApproxReal, LogError> {
    if a.is_zero() {
        return Err(LogError::NonPositive);
    }
    let bits = a.bits();
    if a.trailing_zeros() == Some(bits - 1) {
        return Ok(ApproxReal { value: Dyadic::from_int(bits - 1), error_exponent: j });
    }
    // perturbing ln a and ln 2 by δ moves the quotient by < δ·2^{bitlen(bits)+2}
    let extra = BigUint::from(bits).bits() + 3;
    let la = log_int(a, j + extra)?.into_dyadic();
    let l2 = log_int(&BigUint::from(2u8), j + extra)?.into_dyadic();
    let out = j + 2;
    let num = la.mantissa() << (l2.shift() + out);
    let den = l2.mantissa() << la.shift();
    Ok(ApproxReal { value: Dyadic::new(num.div_floor(&den), out), error_exponent: j })
}

/// The pair of lists defining `Λ(a, b) = Σ bᵢ ln aᵢ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearForm {
    a: Vec<BigUint>,
    b: Vec<BigInt>,
}

impl LinearForm {
    pub fn new(a: Vec<BigUint>, b: Vec<BigInt>) -> Result<Self, LogError> {
        if a.len() != b.len() {
            return Err(LogError::InvalidForm(format!("{} bases but {} coefficients", a.len(), b.len())));
        }
        if let Some(x) = a.iter().find(|x| *x <= &BigUint::one()) {
            return Err(LogError::InvalidForm(format!("base {x} is not at least 2")));
        }
        if b.iter().any(|y| y.is_zero()) {
            return Err(LogError::InvalidForm("zero coefficient".into()));
        }
        Ok(LinearForm { a, b })
    }

    /// `ln` of a PoE value: bases and exponents carry over unchanged.
    pub fn from_poe(x: &Poe) -> Self {
        LinearForm { a: x.bases().to_vec(), b: x.exponents().to_vec() }
    }

    pub fn a(&self) -> &[BigUint] {
        &self.a
    }

    pub fn b(&self) -> &[BigInt] {
        &self.b
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// `max |bᵢ|`, or 0 for the empty form.
    pub fn max_abs_coefficient(&self) -> BigUint {
        self.b.iter().map(|y| y.magnitude().clone()).max().unwrap_or_default()
    }
}

/// `Σ bᵢ·vᵢ` where each `vᵢ ≈ ln aᵢ` to `j + ⌈log₂|bᵢ|⌉ + ⌈log₂ n⌉` bits,
/// so that the `n` scaled errors together stay below `2^{-j}`.
pub fn linear_form_approx(f: &LinearForm, j: u64) -> Result<ApproxReal, LogError> {
    let n = BigUint::from(f.len().max(1));
    let spread = ceil_log2(&n);
    let mut acc = Dyadic::zero();
    for (a, b) in f.a.iter().zip(&f.b) {
        let ji = j + ceil_log2(b.magnitude()) + spread;
        let v = log_int(a, ji)?;
        acc = &acc + &(v.dyadic() * b);
    }
    Ok(ApproxReal { value: acc, error_exponent: j })
}
