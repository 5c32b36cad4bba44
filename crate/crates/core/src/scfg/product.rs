//! Intersection of a normal-form grammar with the linear automaton of a
//! string, solved with the ε-style settling loop. An independent route to
//! the same maximum as the dynamic program.

use super::grammar::{Scfg, Symbol};
use super::knuth::{knuth, RuleSet};
use super::weight::Semiring;
use super::ScfgError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProductStats {
    /// Triples `(s, A, s')` that have at least one rule.
    pub triples: usize,
    pub rules: usize,
}

/// Triple `(s, A, s')` with `s <= s'` over states `0..=n`.
fn triple_index(n: usize, nv: usize, s: usize, a: usize, t: usize) -> usize {
    // rows before s hold (n+1) + n + … + (n+2−s) pairs
    let before = s * (n + 1) - s * (s.saturating_sub(1)) / 2;
    (before + (t - s)) * nv + a
}

pub fn product_grammar(g: &Scfg, w: &[usize]) -> (RuleSet, Vec<usize>) {
    let n = w.len();
    let nv = g.nonterminals().len();
    let total = (n + 1) * (n + 2) / 2 * nv;
    let idx = |s, a, t| triple_index(n, nv, s, a, t);
    let mut rules = Vec::new();
    let mut origin = Vec::new();
    for (r, rule) in g.rules().iter().enumerate() {
        let mut add = |lhs: usize, rhs: Vec<Symbol>| {
            rules.push((lhs, rhs));
            origin.push(r);
        };
        match rule.rhs.as_slice() {
            [] => (0..=n).for_each(|s| add(idx(s, rule.lhs, s), vec![])),
            [Symbol::T(t)] => {
                for s in 0..n {
                    if w[s] == *t {
                        add(idx(s, rule.lhs, s + 1), vec![Symbol::T(*t)]);
                    }
                }
            }
            [Symbol::N(b)] => {
                for s in 0..=n {
                    for t in s..=n {
                        add(idx(s, rule.lhs, t), vec![Symbol::N(idx(s, *b, t))]);
                    }
                }
            }
            [Symbol::N(b), Symbol::N(c)] => {
                for s in 0..=n {
                    for t in s..=n {
                        for m in s..=t {
                            add(idx(s, rule.lhs, t), vec![Symbol::N(idx(s, *b, m)), Symbol::N(idx(m, *c, t))]);
                        }
                    }
                }
            }
            _ => panic!("grammar is not in simple normal form"),
        }
    }
    (RuleSet { nonterminals: total, rules }, origin)
}

/// Best weight of a derivation of `w` from the start symbol.
pub fn product_max<S: Semiring>(
    s: &S,
    g: &Scfg,
    weights: &[S::W],
    w: &[usize],
) -> Result<(Option<S::W>, ProductStats), ScfgError> {
    let (rs, origin) = product_grammar(g, w);
    let mut has_rule = vec![false; rs.nonterminals];
    for (lhs, _) in &rs.rules {
        has_rule[*lhs] = true;
    }
    let stats = ProductStats { triples: has_rule.iter().filter(|&&x| x).count(), rules: rs.rules.len() };
    let pw: Vec<S::W> = origin.iter().map(|&r| weights[r].clone()).collect();
    let res = knuth(s, &rs, &pw)?;
    let root = triple_index(w.len(), g.nonterminals().len(), 0, g.start(), w.len());
    Ok((res.value[root].clone(), stats))
}
