//! The two weight domains the parsing algorithms run over.
//!
//! Exact weights are products of rule probabilities kept as exponent counts
//! and compared through [`crate::compare`]. Approximate weights are dyadic
//! approximations of `−log₂ p`, added exactly and compared directly.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Debug;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::grammar::Scfg;
use super::ScfgError;
use crate::compare::{compare, CompareMode};
use crate::dyadic::Dyadic;
use crate::logform::log2_int;
use crate::poe::Poe;

/// Max-times structure over weights: `cmp` returns `Greater` for the more
/// probable weight.
pub trait Semiring {
    type W: Clone + Debug + PartialEq;
    fn one(&self) -> Self::W;
    fn times(&self, a: &Self::W, b: &Self::W) -> Self::W;
    fn cmp(&self, a: &Self::W, b: &Self::W) -> Result<Ordering, ScfgError>;
}

/// Exponent count per distinct probability `≠ 1`.
pub type ExactWeight = BTreeMap<usize, BigUint>;

#[derive(Clone, Debug)]
pub struct ExactSemiring {
    probs: Vec<BigRational>,
    mode: CompareMode,
}

impl ExactSemiring {
    /// The semiring for `g` together with the weight of every rule.
    pub fn for_grammar(g: &Scfg, mode: CompareMode) -> (Self, Vec<ExactWeight>) {
        let mut probs: Vec<BigRational> = Vec::new();
        let weights = g
            .rules()
            .iter()
            .map(|r| {
                if r.prob.is_one() {
                    return ExactWeight::new();
                }
                let id = probs.iter().position(|p| *p == r.prob).unwrap_or_else(|| {
                    probs.push(r.prob.clone());
                    probs.len() - 1
                });
                ExactWeight::from([(id, BigUint::one())])
            })
            .collect();
        (ExactSemiring { probs, mode }, weights)
    }

    pub fn to_poe(&self, w: &ExactWeight) -> Poe {
        self.signed_poe(w.iter().map(|(&id, c)| (id, BigInt::from(c.clone()))))
    }

    fn signed_poe(&self, counts: impl Iterator<Item = (usize, BigInt)>) -> Poe {
        let mut pairs = Vec::new();
        for (id, c) in counts {
            let p = &self.probs[id];
            pairs.push((p.numer().magnitude().clone(), c.clone()));
            pairs.push((p.denom().magnitude().clone(), -c));
        }
        Poe::from_pairs(pairs)
    }

    /// `Σ` exponent counts.
    pub fn exponent_sum(w: &ExactWeight) -> BigUint {
        w.values().sum()
    }
}

/// `2n²·2ⁿ`: no optimal parse in a normal form with `n` nonterminals uses
/// rules of probability `≠ 1` that many times.
pub fn exponent_sum_bound(n: usize) -> BigUint {
    BigUint::from(2 * n * n) << n
}

impl Semiring for ExactSemiring {
    type W = ExactWeight;

    fn one(&self) -> ExactWeight {
        ExactWeight::new()
    }

    fn times(&self, a: &ExactWeight, b: &ExactWeight) -> ExactWeight {
        let mut out = a.clone();
        for (id, c) in b {
            *out.entry(*id).or_insert_with(BigUint::zero) += c;
        }
        out
    }

    fn cmp(&self, a: &ExactWeight, b: &ExactWeight) -> Result<Ordering, ScfgError> {
        if a == b {
            return Ok(Ordering::Equal);
        }
        let ids: std::collections::BTreeSet<usize> = a.keys().chain(b.keys()).copied().collect();
        let zero = BigUint::zero();
        let diff = ids.into_iter().map(|id| {
            let ca = BigInt::from(a.get(&id).unwrap_or(&zero).clone());
            let cb = BigInt::from(b.get(&id).unwrap_or(&zero).clone());
            (id, ca - cb)
        });
        let ratio = self.signed_poe(diff);
        let out = compare(&ratio, &Poe::one(), &self.mode)?;
        out.verdict.ordering().ok_or(ScfgError::Unresolved(out.certificate.precision_bits))
    }
}

/// Costs `≈ −log₂ p`, each rule's cost within `2^{-bits}` of the truth.
#[derive(Clone, Debug)]
pub struct ApproxSemiring;

impl ApproxSemiring {
    pub fn rule_costs(g: &Scfg, bits: u64) -> Vec<Dyadic> {
        g.rules()
            .iter()
            .map(|r| {
                if r.prob.is_one() {
                    return Dyadic::zero();
                }
                let den = log2_int(r.prob.denom().magnitude(), bits + 1).expect("positive");
                let num = log2_int(r.prob.numer().magnitude(), bits + 1).expect("positive");
                den.dyadic() - num.dyadic()
            })
            .collect()
    }
}

impl Semiring for ApproxSemiring {
    type W = Dyadic;

    fn one(&self) -> Dyadic {
        Dyadic::zero()
    }

    fn times(&self, a: &Dyadic, b: &Dyadic) -> Dyadic {
        a + b
    }

    fn cmp(&self, a: &Dyadic, b: &Dyadic) -> Result<Ordering, ScfgError> {
        Ok(b.cmp(a))
    }
}
