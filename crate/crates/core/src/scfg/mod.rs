//! Stochastic context-free grammars and maximum-probability parsing.
//!
//! The exact pipeline works over a grammar in simple normal form:
//! best ε-derivations by a Knuth-style settling loop, best unary chains by
//! Dijkstra, then a cubic dynamic program. Probabilities are products of
//! rule probabilities kept in exponent form, so values like `2^{-2^n}`
//! never get written out, and parse trees come back as DAGs.

pub mod approx;
pub mod dag;
pub mod dp;
pub mod grammar;
pub mod knuth;
pub mod product;
pub mod snf;
pub mod unary;
pub mod weight;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

pub use approx::{approx_max_parse, ApproxParse};
pub use dag::{dag_unfold_prob, dag_yield, DagBuilder, DagError, DagNode, ParseDag};
pub use grammar::{parse_probability, GrammarError, Rule, Scfg, Symbol};
pub use product::ProductStats;
pub use snf::{to_snf, NtKind, RuleOrigin, SnfGrammar};

use crate::compare::{CompareError, CompareMode};
use crate::poe::Poe;
use dp::Pipeline;
use knuth::{knuth, RuleSet};
use weight::{exponent_sum_bound, ExactSemiring};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScfgError {
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Compare(#[from] CompareError),
    #[error("comparison unresolved at {0} bits; raise the precision cap")]
    Unresolved(u64),
    #[error("tolerance {0} is not in (0, 1)")]
    BadEpsilon(String),
    #[error(transparent)]
    Dag(#[from] DagError),
}

/// `prob` and `dag` are both `None` when the string has no parse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxParseResult {
    pub prob: Option<Poe>,
    pub dag: Option<ParseDag>,
}

impl MaxParseResult {
    pub fn is_member(&self) -> bool {
        self.prob.is_some()
    }
}

/// Total number of applications of rules with probability below 1 in the
/// unfolded tree.
pub fn exponent_sum(d: &ParseDag, g: &Scfg) -> BigUint {
    d.rule_counts()
        .into_iter()
        .filter(|(r, _)| !g.rule(*r).prob.is_one())
        .map(|(_, c)| c)
        .fold(BigUint::zero(), |a, c| a + c)
}

/// Debug-build check that an optimal DAG over the normal form `g` stays
/// under the `2n²2ⁿ` exponent bound.
pub(crate) fn check_exponent_bound(d: &ParseDag, g: &Scfg) {
    if cfg!(debug_assertions) {
        let sum = exponent_sum(d, g);
        let bound = exponent_sum_bound(g.nonterminals().len());
        assert!(sum < bound, "exponent sum {sum} reaches the bound {bound}");
    }
}

/// Best ε-derivation of every nonterminal, over `g` itself with the rules
/// that contain terminals dropped.
pub fn max_eps_probs(g: &Scfg) -> Result<Vec<Option<(Poe, ParseDag)>>, ScfgError> {
    max_eps_probs_with(g, &CompareMode::default())
}

pub fn max_eps_probs_with(g: &Scfg, mode: &CompareMode) -> Result<Vec<Option<(Poe, ParseDag)>>, ScfgError> {
    let (s, weights) = ExactSemiring::for_grammar(g, mode.clone());
    let (rs, ids) = RuleSet::from_grammar(g, |k| !g.rule(k).has_terminal());
    let ew: Vec<_> = ids.iter().map(|&k| weights[k].clone()).collect();
    let res = knuth(&s, &rs, &ew)?;
    let mut b = DagBuilder::new();
    let mut memo = vec![None; g.nonterminals().len()];
    let out = (0..g.nonterminals().len())
        .map(|a| {
            let w = res.value[a].as_ref()?;
            let root = res.dag_node(&rs, &|r| ids[r], a, &mut b, &mut memo)?;
            let prob = s.to_poe(w);
            Some((prob.clone(), b.extract(root, prob)))
        })
        .collect();
    Ok(out)
}

/// `out[a][b]`: best probability of a derivation from `a` whose yield is
/// the single symbol `b` (1 for `a = b`).
pub fn max_unary_reach(g: &SnfGrammar) -> Result<Vec<Vec<Option<Poe>>>, ScfgError> {
    let sg = g.grammar();
    let (s, weights) = ExactSemiring::for_grammar(sg, CompareMode::default());
    let pipe = Pipeline::new(sg, s, weights)?;
    let n = sg.nonterminals().len();
    Ok((0..n)
        .map(|a| (0..n).map(|b| pipe.unary().get(a, b).map(|w| pipe.semiring().to_poe(w))).collect())
        .collect())
}

/// Maximum parse probability of `w` and a witnessing DAG over the normal
/// form itself.
pub fn max_parse(g: &SnfGrammar, w: &[usize]) -> Result<MaxParseResult, ScfgError> {
    max_parse_with(g, w, &CompareMode::default())
}

pub fn max_parse_with(g: &SnfGrammar, w: &[usize], mode: &CompareMode) -> Result<MaxParseResult, ScfgError> {
    let sg = g.grammar();
    let (s, weights) = ExactSemiring::for_grammar(sg, mode.clone());
    let pipe = Pipeline::new(sg, s, weights)?;
    let Some(d) = pipe.parse(w)? else { return Ok(MaxParseResult { prob: None, dag: None }) };
    let prob = pipe.semiring().to_poe(&d.weight);
    let dag = d.builder.extract(d.root, prob.clone());
    check_exponent_bound(&dag, sg);
    Ok(MaxParseResult { prob: Some(prob), dag: Some(dag) })
}

/// [`max_parse`] for an arbitrary grammar, with the DAG mapped back to it.
pub fn parse_exact(g: &Scfg, w: &[usize]) -> Result<MaxParseResult, ScfgError> {
    parse_exact_with(g, w, &CompareMode::default())
}

pub fn parse_exact_with(g: &Scfg, w: &[usize], mode: &CompareMode) -> Result<MaxParseResult, ScfgError> {
    let snf = to_snf(g);
    let res = max_parse_with(&snf, w, mode)?;
    Ok(MaxParseResult { prob: res.prob, dag: res.dag.map(|d| snf.lift_dag(&d)) })
}

/// Maximum parse probability through the product construction.
pub fn product_max_prob(g: &SnfGrammar, w: &[usize]) -> Result<(Option<Poe>, ProductStats), ScfgError> {
    let sg = g.grammar();
    let (s, weights) = ExactSemiring::for_grammar(sg, CompareMode::default());
    let (v, stats) = product::product_max(&s, sg, &weights, w)?;
    Ok((v.map(|v| s.to_poe(&v)), stats))
}
