//! Knuth's generalization of Dijkstra's algorithm to grammars: settles
//! nonterminals in order of decreasing best derivation weight.

use std::cmp::Ordering;

use super::dag::DagBuilder;
use super::grammar::{Scfg, Symbol};
use super::weight::Semiring;
use super::ScfgError;

/// A rule set without the probability constraint of an SCFG (product
/// grammars have several rules per original rule).
#[derive(Clone, Debug, Default)]
pub struct RuleSet {
    pub nonterminals: usize,
    pub rules: Vec<(usize, Vec<Symbol>)>,
}

impl RuleSet {
    /// The rules of `g` accepted by `keep`, with their original indices.
    pub fn from_grammar(g: &Scfg, keep: impl Fn(usize) -> bool) -> (RuleSet, Vec<usize>) {
        let mut rules = Vec::new();
        let mut ids = Vec::new();
        for (k, r) in g.rules().iter().enumerate() {
            if keep(k) {
                rules.push((r.lhs, r.rhs.clone()));
                ids.push(k);
            }
        }
        (RuleSet { nonterminals: g.nonterminals().len(), rules }, ids)
    }
}

/// Binary heap whose order may fail.
pub(crate) struct Heap<T> {
    items: Vec<T>,
}

impl<T> Heap<T> {
    pub fn new() -> Self {
        Heap { items: Vec::new() }
    }

    /// `first(a, b)` is true when `a` must come out before `b`.
    pub fn push<F>(&mut self, item: T, first: &mut F) -> Result<(), ScfgError>
    where
        F: FnMut(&T, &T) -> Result<bool, ScfgError>,
    {
        self.items.push(item);
        let mut k = self.items.len() - 1;
        while k > 0 {
            let parent = (k - 1) / 2;
            if !first(&self.items[k], &self.items[parent])? {
                break;
            }
            self.items.swap(k, parent);
            k = parent;
        }
        Ok(())
    }

    pub fn pop<F>(&mut self, first: &mut F) -> Result<Option<T>, ScfgError>
    where
        F: FnMut(&T, &T) -> Result<bool, ScfgError>,
    {
        if self.items.is_empty() {
            return Ok(None);
        }
        let top = self.items.swap_remove(0);
        let n = self.items.len();
        let mut k = 0;
        loop {
            let (l, r) = (2 * k + 1, 2 * k + 2);
            let mut best = k;
            if l < n && first(&self.items[l], &self.items[best])? {
                best = l;
            }
            if r < n && first(&self.items[r], &self.items[best])? {
                best = r;
            }
            if best == k {
                break;
            }
            self.items.swap(k, best);
            k = best;
        }
        Ok(Some(top))
    }
}

/// Best derivation of every nonterminal and the rule that achieves it.
#[derive(Clone, Debug)]
pub struct KnuthResult<W> {
    pub value: Vec<Option<W>>,
    pub rule: Vec<Option<usize>>,
    /// Nonterminals in settling order.
    pub order: Vec<usize>,
}

impl<W> KnuthResult<W> {
    /// Internal node for the best derivation of `a`, built from the chosen
    /// rules; `rule_id` maps rule-set positions to grammar rule indices.
    /// Memoized in `memo`.
    pub fn dag_node(
        &self,
        rules: &RuleSet,
        rule_id: &dyn Fn(usize) -> usize,
        a: usize,
        b: &mut DagBuilder,
        memo: &mut Vec<Option<usize>>,
    ) -> Option<usize> {
        if let Some(k) = memo[a] {
            return Some(k);
        }
        let r = self.rule[a]?;
        let rhs = &rules.rules[r].1;
        let node = if rhs.is_empty() {
            b.epsilon(a, rule_id(r))
        } else {
            let mut kids = Vec::with_capacity(rhs.len());
            for s in rhs {
                kids.push(match *s {
                    Symbol::T(t) => b.leaf(Some(t)),
                    Symbol::N(x) => self.dag_node(rules, rule_id, x, b, memo)?,
                });
            }
            b.internal(a, rule_id(r), kids)
        };
        memo[a] = Some(node);
        Some(node)
    }
}

/// Runs the settling loop over `rules` with per-rule weights. Terminals
/// count as already settled with weight one. Ties go to the lower rule
/// index within a nonterminal and to the lower nonterminal index between
/// nonterminals.
pub fn knuth<S: Semiring>(s: &S, rules: &RuleSet, weights: &[S::W]) -> Result<KnuthResult<S::W>, ScfgError> {
    let n = rules.nonterminals;
    let mut pending = vec![0usize; rules.rules.len()];
    let mut occurs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, (_, rhs)) in rules.rules.iter().enumerate() {
        for sym in rhs {
            if let Symbol::N(x) = sym {
                pending[k] += 1;
                occurs[*x].push(k);
            }
        }
    }
    let mut value: Vec<Option<S::W>> = vec![None; n];
    let mut chosen = vec![None; n];
    let mut order = Vec::new();

    // (weight, nonterminal, rule)
    let mut first = |x: &(S::W, usize, usize), y: &(S::W, usize, usize)| -> Result<bool, ScfgError> {
        Ok(match s.cmp(&x.0, &y.0)? {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => (x.1, x.2) < (y.1, y.2),
        })
    };
    let mut heap = Heap::new();
    for (k, (lhs, _)) in rules.rules.iter().enumerate() {
        if pending[k] == 0 {
            heap.push((weights[k].clone(), *lhs, k), &mut first)?;
        }
    }
    while let Some((w, a, r)) = heap.pop(&mut first)? {
        if value[a].is_some() {
            continue;
        }
        value[a] = Some(w);
        chosen[a] = Some(r);
        order.push(a);
        for &k in &occurs[a] {
            pending[k] -= 1;
            let (lhs, rhs) = &rules.rules[k];
            if pending[k] > 0 || value[*lhs].is_some() {
                continue;
            }
            let mut acc = weights[k].clone();
            for sym in rhs {
                if let Symbol::N(x) = sym {
                    acc = s.times(&acc, value[*x].as_ref().expect("settled"));
                }
            }
            heap.push((acc, *lhs, k), &mut first)?;
        }
    }
    Ok(KnuthResult { value, rule: chosen, order })
}
