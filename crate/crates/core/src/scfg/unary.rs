//! Best derivations `A ⇒* B` that produce exactly one symbol `B`: paths in
//! a graph whose edges are unit rules, and binary rules whose other child
//! derives ε (weighted by that child's best ε-derivation).

use std::cmp::Ordering;

use super::dag::DagBuilder;
use super::grammar::{Scfg, Symbol};
use super::knuth::Heap;
use super::weight::Semiring;
use super::ScfgError;

/// How an edge `A → B` of the graph arises from a rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    /// `A → B`.
    Unit(usize),
    /// `A → B C` with `C ⇒* ε`.
    KeepLeft(usize, usize),
    /// `A → C B` with `C ⇒* ε`.
    KeepRight(usize, usize),
}

impl Step {
    pub fn rule(self) -> usize {
        match self {
            Step::Unit(r) | Step::KeepLeft(r, _) | Step::KeepRight(r, _) => r,
        }
    }
}

/// `best[a][b]`: weight of the best `a ⇒* b` and the last edge on its path.
#[derive(Clone, Debug)]
pub struct UnaryTable<W> {
    best: Vec<Vec<Option<(W, Option<(usize, Step)>)>>>,
}

impl<W: Clone> UnaryTable<W> {
    pub fn get(&self, a: usize, b: usize) -> Option<&W> {
        self.best[a][b].as_ref().map(|x| &x.0)
    }

    /// The edges from `a` down to `b`, top first.
    pub fn path(&self, a: usize, b: usize) -> Option<Vec<(usize, Step)>> {
        let mut out = Vec::new();
        let mut cur = b;
        while cur != a {
            let (_, pred) = self.best[a][cur].as_ref()?;
            let (prev, step) = pred.expect("non-source node has a predecessor");
            out.push((prev, step));
            cur = prev;
        }
        out.reverse();
        Some(out)
    }

    /// Builds the derivation `a ⇒* b` with the subtree `hole` for `b`
    /// spliced in at the bottom; `eps(c)` supplies ε-derivation nodes.
    pub fn splice(
        &self,
        a: usize,
        b: usize,
        hole: usize,
        dag: &mut DagBuilder,
        eps: &mut dyn FnMut(usize, &mut DagBuilder) -> usize,
    ) -> usize {
        let path = self.path(a, b).expect("reachable pair");
        let mut node = hole;
        for &(prev, step) in path.iter().rev() {
            node = match step {
                Step::Unit(r) => dag.internal(prev, r, vec![node]),
                Step::KeepLeft(r, c) => {
                    let e = eps(c, dag);
                    dag.internal(prev, r, vec![node, e])
                }
                Step::KeepRight(r, c) => {
                    let e = eps(c, dag);
                    dag.internal(prev, r, vec![e, node])
                }
            };
        }
        node
    }
}

/// Dijkstra from every nonterminal over the edge set described above,
/// keeping only the best of parallel edges (lowest rule first on ties).
pub fn unary_reach<S: Semiring>(
    s: &S,
    g: &Scfg,
    weights: &[S::W],
    eps: &[Option<S::W>],
) -> Result<UnaryTable<S::W>, ScfgError> {
    let n = g.nonterminals().len();
    let mut edges: Vec<Vec<Option<(S::W, Step)>>> = vec![vec![None; n]; n];
    let offer = |edges: &mut Vec<Vec<Option<(S::W, Step)>>>, a: usize, b: usize, w: S::W, step: Step| {
        let better = match &edges[a][b] {
            None => true,
            Some((cur, _)) => s.cmp(&w, cur)? == Ordering::Greater,
        };
        if better {
            edges[a][b] = Some((w, step));
        }
        Ok::<(), ScfgError>(())
    };
    for (r, rule) in g.rules().iter().enumerate() {
        match rule.rhs.as_slice() {
            [Symbol::N(b)] => offer(&mut edges, rule.lhs, *b, weights[r].clone(), Step::Unit(r))?,
            [Symbol::N(b), Symbol::N(c)] => {
                if let Some(ec) = &eps[*c] {
                    offer(&mut edges, rule.lhs, *b, s.times(&weights[r], ec), Step::KeepLeft(r, *c))?;
                }
                if let Some(eb) = &eps[*b] {
                    offer(&mut edges, rule.lhs, *c, s.times(&weights[r], eb), Step::KeepRight(r, *b))?;
                }
            }
            _ => {}
        }
    }
    let out: Vec<(usize, S::W, Step)> = Vec::new();
    let mut adjacency = vec![out; n];
    for (a, row) in edges.into_iter().enumerate() {
        for (b, e) in row.into_iter().enumerate() {
            if let Some((w, step)) = e {
                adjacency[a].push((b, w, step));
            }
        }
    }

    let mut best = Vec::with_capacity(n);
    for src in 0..n {
        let mut row: Vec<Option<(S::W, Option<(usize, Step)>)>> = vec![None; n];
        let mut first = |x: &(S::W, usize, Option<(usize, Step)>), y: &(S::W, usize, Option<(usize, Step)>)| {
            Ok(match s.cmp(&x.0, &y.0)? {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => x.1 < y.1,
            })
        };
        let mut heap = Heap::new();
        heap.push((s.one(), src, None), &mut first)?;
        while let Some((w, v, pred)) = heap.pop(&mut first)? {
            if row[v].is_some() {
                continue;
            }
            for (b, ew, step) in &adjacency[v] {
                if row[*b].is_none() {
                    heap.push((s.times(&w, ew), *b, Some((v, *step))), &mut first)?;
                }
            }
            row[v] = Some((w, pred));
        }
        best.push(row);
    }
    Ok(UnaryTable { best })
}
