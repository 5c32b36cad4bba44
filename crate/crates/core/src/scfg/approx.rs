//! Approximate maximum parsing: rule costs `−log₂ p` rounded to `k` bits,
//! added exactly, so no comparison ever needs more than `k` bits.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed};

use super::dp::Pipeline;
use super::grammar::Scfg;
use super::snf::to_snf;
use super::weight::{exponent_sum_bound, ApproxSemiring};
use super::dag::ParseDag;
use super::{check_exponent_bound, ScfgError};
use crate::dyadic::Dyadic;
use crate::logform::ceil_log2;

#[derive(Clone, Debug)]
pub struct ApproxParse {
    pub member: bool,
    /// Approximate `log₂` of the maximum parse probability.
    pub log2_prob: Option<Dyadic>,
    /// Argmax under the approximate costs, over the original grammar, with
    /// its exact probability.
    pub dag: Option<ParseDag>,
    /// Bits of every rule cost.
    pub precision_bits: u64,
}

/// `⌈log₂(num/den)⌉` for `num > den > 0`.
fn ceil_log2_ratio(num: &BigUint, den: &BigUint) -> u64 {
    let mut t = ceil_log2(num).saturating_sub(ceil_log2(den) + 1);
    while &(den << t) < num {
        t += 1;
    }
    t
}

/// Precision for `n` normal-form nonterminals and tolerance `eps`: the
/// larger of `2n + log₂(1/ε)` and `log₂(4n²2ⁿ/ε)` (so that an exponent
/// sum below `2n²2ⁿ` keeps the total error under `ε/2`), plus two guard
/// bits.
pub fn precision_for(n: usize, eps: &BigRational) -> u64 {
    let num = eps.numer().magnitude();
    let den = eps.denom().magnitude();
    let a = 2 * n as u64 + ceil_log2_ratio(den, num);
    let b = ceil_log2_ratio(&(den * (exponent_sum_bound(n) << 1u8)), num);
    a.max(b) + 2
}

pub fn approx_max_parse(g: &Scfg, w: &[usize], eps: &BigRational) -> Result<ApproxParse, ScfgError> {
    if !eps.is_positive() || *eps >= BigRational::one() {
        return Err(ScfgError::BadEpsilon(eps.to_string()));
    }
    let snf = to_snf(g);
    let sg = snf.grammar();
    let k = precision_for(sg.nonterminals().len(), eps);
    let costs: Vec<Dyadic> = ApproxSemiring::rule_costs(sg, k)
        .into_iter()
        .map(|c| if c.is_negative() { Dyadic::zero() } else { c })
        .collect();
    let pipe = Pipeline::new(sg, ApproxSemiring, costs)?;
    let Some(d) = pipe.parse(w)? else {
        return Ok(ApproxParse { member: false, log2_prob: None, dag: None, precision_bits: k });
    };
    let raw = d.builder.extract(d.root, crate::poe::Poe::one());
    let prob = raw.unfolded_prob(sg);
    check_exponent_bound(&raw, sg);
    let dag = snf.lift_dag(&d.builder.extract(d.root, prob));
    Ok(ApproxParse { member: true, log2_prob: Some(-&d.weight), dag: Some(dag), precision_bits: k })
}
