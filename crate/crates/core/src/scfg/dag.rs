//! Parse DAGs: parse trees with shared subtrees, so that trees of
//! exponential size (through ε-derivations) stay small.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use super::grammar::{Scfg, Symbol};
use crate::poe::{Poe, PoeError};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DagNode {
    /// A terminal, or `None` for ε.
    Leaf(Option<usize>),
    Internal { nt: usize, rule: usize, children: Vec<usize> },
}

/// Nodes are stored children-first; the root is the last node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseDag {
    nodes: Vec<DagNode>,
    prob: Poe,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DagError {
    #[error("node {node}: {message}")]
    Malformed { node: usize, message: String },
    #[error("yield has {0} symbols, above the cap")]
    YieldTooLong(BigUint),
    #[error(transparent)]
    Poe(#[from] PoeError),
}

impl ParseDag {
    pub fn nodes(&self) -> &[DagNode] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Probability reported by the algorithm that built the DAG.
    pub fn prob(&self) -> &Poe {
        &self.prob
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Checks that every internal node matches its rule in `g`: left side,
    /// and children labelled with the right side (a single ε leaf for an
    /// ε-rule).
    pub fn validate(&self, g: &Scfg) -> Result<(), DagError> {
        for (k, node) in self.nodes.iter().enumerate() {
            let DagNode::Internal { nt, rule, children } = node else { continue };
            let bad = |message: String| Err(DagError::Malformed { node: k, message });
            let Some(r) = g.rules().get(*rule) else { return bad(format!("no rule {rule}")) };
            if r.lhs != *nt {
                return bad(format!("rule {rule} does not expand {}", g.nonterminals()[*nt]));
            }
            if children.iter().any(|&c| c >= k) {
                return bad("child is not earlier".into());
            }
            if r.rhs.is_empty() {
                if children.len() != 1 || self.nodes[children[0]] != DagNode::Leaf(None) {
                    return bad("ε-rule needs a single ε leaf".into());
                }
                continue;
            }
            if children.len() != r.rhs.len() {
                return bad(format!("{} children for a rule of length {}", children.len(), r.rhs.len()));
            }
            for (&c, s) in children.iter().zip(&r.rhs) {
                let ok = match (s, &self.nodes[c]) {
                    (Symbol::T(t), DagNode::Leaf(Some(u))) => t == u,
                    (Symbol::N(a), DagNode::Internal { nt, .. }) => a == nt,
                    _ => false,
                };
                if !ok {
                    return bad(format!("child n{c} does not match {}", g.symbol_text(*s)));
                }
            }
        }
        Ok(())
    }

    /// Number of times each node occurs in the unfolded tree.
    fn multiplicities(&self) -> Vec<BigUint> {
        let mut mult = vec![BigUint::zero(); self.nodes.len()];
        mult[self.root()] = BigUint::one();
        for k in (0..self.nodes.len()).rev() {
            if let DagNode::Internal { children, .. } = &self.nodes[k] {
                let m = mult[k].clone();
                for &c in children {
                    mult[c] += &m;
                }
            }
        }
        mult
    }

    /// How often each rule is applied in the unfolded tree.
    pub fn rule_counts(&self) -> BTreeMap<usize, BigUint> {
        let mut counts = BTreeMap::new();
        for (node, m) in self.nodes.iter().zip(self.multiplicities()) {
            if let DagNode::Internal { rule, .. } = node {
                *counts.entry(*rule).or_insert_with(BigUint::zero) += m;
            }
        }
        counts
    }

    /// The unfolded tree's probability under `g`, recomputed from the DAG.
    pub fn unfolded_prob(&self, g: &Scfg) -> Poe {
        let mut acc = Poe::one();
        for (rule, count) in self.rule_counts() {
            let p = &g.rule(rule).prob;
            if p.is_one() {
                continue;
            }
            let base = Poe::from_rational(p).expect("rule probabilities are positive");
            acc = acc.mul(&base.pow(&BigInt::from(count)));
        }
        acc
    }

    /// Renders the DAG with the names of `g`.
    pub fn display<'a>(&'a self, g: &'a Scfg) -> DagDisplay<'a> {
        DagDisplay { dag: self, grammar: g }
    }
}

/// Exact probability of the unfolded tree, refusing values larger than
/// `bit_budget` bits.
pub fn dag_unfold_prob(d: &ParseDag, g: &Scfg, bit_budget: u64) -> Result<BigRational, DagError> {
    Ok(d.unfolded_prob(g).eval_exact(bit_budget)?)
}

/// The terminal string of the unfolded tree. Subtrees that derive ε are
/// skipped without being unfolded, so only the nonempty part is walked.
pub fn dag_yield(d: &ParseDag, cap: usize) -> Result<Vec<usize>, DagError> {
    let mut len = vec![BigUint::zero(); d.nodes.len()];
    for (k, node) in d.nodes.iter().enumerate() {
        len[k] = match node {
            DagNode::Leaf(Some(_)) => BigUint::one(),
            DagNode::Leaf(None) => BigUint::zero(),
            DagNode::Internal { children, .. } => children.iter().map(|&c| &len[c]).sum(),
        };
    }
    let total = &len[d.root()];
    if total.to_usize().map_or(true, |n| n > cap) {
        return Err(DagError::YieldTooLong(total.clone()));
    }
    let mut out = Vec::new();
    let mut stack = vec![d.root()];
    while let Some(k) = stack.pop() {
        match &d.nodes[k] {
            DagNode::Leaf(Some(t)) => out.push(*t),
            DagNode::Leaf(None) => {}
            DagNode::Internal { children, .. } => {
                stack.extend(children.iter().rev().filter(|&&c| !len[c].is_zero()));
            }
        }
    }
    Ok(out)
}

pub struct DagDisplay<'a> {
    dag: &'a ParseDag,
    grammar: &'a Scfg,
}

impl fmt::Display for DagDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.grammar;
        for (k, node) in self.dag.nodes.iter().enumerate() {
            match node {
                DagNode::Leaf(Some(t)) => writeln!(f, "n{k} := Leaf '{}'", g.terminals()[*t])?,
                DagNode::Leaf(None) => writeln!(f, "n{k} := Leaf ''")?,
                DagNode::Internal { nt, rule, children } => {
                    let cs: Vec<String> = children.iter().map(|c| format!("n{c}")).collect();
                    writeln!(f, "n{k} := {} [rule {rule}] ({})", g.nonterminals()[*nt], cs.join(", "))?
                }
            }
        }
        writeln!(f, "root n{}", self.dag.root())?;
        writeln!(f, "prob = {}", self.dag.prob)
    }
}

/// Hash-consing arena for building DAGs bottom-up.
#[derive(Default, Debug)]
pub struct DagBuilder {
    nodes: Vec<DagNode>,
    index: HashMap<DagNode, usize>,
}

impl DagBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, node: DagNode) -> usize {
        if let Some(&k) = self.index.get(&node) {
            return k;
        }
        self.nodes.push(node.clone());
        self.index.insert(node, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    pub fn leaf(&mut self, t: Option<usize>) -> usize {
        self.add(DagNode::Leaf(t))
    }

    pub fn internal(&mut self, nt: usize, rule: usize, children: Vec<usize>) -> usize {
        self.add(DagNode::Internal { nt, rule, children })
    }

    /// Internal node for an ε-rule.
    pub fn epsilon(&mut self, nt: usize, rule: usize) -> usize {
        let leaf = self.leaf(None);
        self.internal(nt, rule, vec![leaf])
    }

    pub fn node(&self, k: usize) -> &DagNode {
        &self.nodes[k]
    }

    /// Copies the part reachable from `root`, renumbered children-first.
    pub fn extract(&self, root: usize, prob: Poe) -> ParseDag {
        let mut order = Vec::new();
        let mut new_id: HashMap<usize, usize> = HashMap::new();
        // iterative post-order
        let mut stack = vec![(root, false)];
        while let Some((k, expanded)) = stack.pop() {
            if new_id.contains_key(&k) {
                continue;
            }
            if expanded {
                new_id.insert(k, order.len());
                order.push(k);
                continue;
            }
            stack.push((k, true));
            if let DagNode::Internal { children, .. } = &self.nodes[k] {
                for &c in children.iter().rev() {
                    if !new_id.contains_key(&c) {
                        stack.push((c, false));
                    }
                }
            }
        }
        let nodes = order
            .iter()
            .map(|&k| match &self.nodes[k] {
                DagNode::Leaf(t) => DagNode::Leaf(*t),
                DagNode::Internal { nt, rule, children } => DagNode::Internal {
                    nt: *nt,
                    rule: *rule,
                    children: children.iter().map(|c| new_id[c]).collect(),
                },
            })
            .collect();
        ParseDag { nodes, prob }
    }
}
