//! The cubic dynamic program over a normal-form grammar, generic over the
//! weight domain, with DAG reconstruction from the recorded argmaxes.

use std::cmp::Ordering;
use std::collections::HashMap;

use super::dag::DagBuilder;
use super::grammar::{Scfg, Symbol};
use super::knuth::{knuth, KnuthResult, RuleSet};
use super::unary::{unary_reach, UnaryTable};
use super::weight::Semiring;
use super::ScfgError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum QChoice {
    Term(usize),
    Split(usize, usize),
}

/// The string-independent part: best ε-derivations and unary reach.
pub struct Pipeline<'g, S: Semiring> {
    g: &'g Scfg,
    s: S,
    weights: Vec<S::W>,
    eps_rules: RuleSet,
    eps_ids: Vec<usize>,
    eps: KnuthResult<S::W>,
    unary: UnaryTable<S::W>,
}

/// Best weight and its derivation, still inside the builder.
pub struct Derivation<W> {
    pub weight: W,
    pub builder: DagBuilder,
    pub root: usize,
}

impl<'g, S: Semiring> Pipeline<'g, S> {
    pub fn new(g: &'g Scfg, s: S, weights: Vec<S::W>) -> Result<Self, ScfgError> {
        let (eps_rules, eps_ids) = RuleSet::from_grammar(g, |k| !g.rule(k).has_terminal());
        let ew: Vec<S::W> = eps_ids.iter().map(|&k| weights[k].clone()).collect();
        let eps = knuth(&s, &eps_rules, &ew)?;
        let unary = unary_reach(&s, g, &weights, &eps.value)?;
        Ok(Pipeline { g, s, weights, eps_rules, eps_ids, eps, unary })
    }

    pub fn semiring(&self) -> &S {
        &self.s
    }

    pub fn eps_value(&self, a: usize) -> Option<&S::W> {
        self.eps.value[a].as_ref()
    }

    pub fn unary(&self) -> &UnaryTable<S::W> {
        &self.unary
    }

    fn eps_node(&self, a: usize, b: &mut DagBuilder, memo: &mut Vec<Option<usize>>) -> usize {
        let ids = &self.eps_ids;
        self.eps
            .dag_node(&self.eps_rules, &|r| ids[r], a, b, memo)
            .expect("nonterminal derives ε")
    }

    /// Best ε-derivation of `a`.
    pub fn eps_derivation(&self, a: usize) -> Option<Derivation<S::W>> {
        let weight = self.eps.value[a].clone()?;
        let mut builder = DagBuilder::new();
        let mut memo = vec![None; self.g.nonterminals().len()];
        let root = self.eps_node(a, &mut builder, &mut memo);
        Some(Derivation { weight, builder, root })
    }

    fn better(&self, new: &S::W, old: &Option<(S::W, impl Sized)>) -> Result<bool, ScfgError> {
        Ok(match old {
            None => true,
            Some((w, _)) => self.s.cmp(new, w)? == Ordering::Greater,
        })
    }

    /// Best derivation of `w` from the start symbol. Ties go to the lowest
    /// rule, then the lowest split point, then the lowest nonterminal.
    pub fn parse(&self, w: &[usize]) -> Result<Option<Derivation<S::W>>, ScfgError> {
        let g = self.g;
        let start = g.start();
        if w.is_empty() {
            return Ok(self.eps_derivation(start));
        }
        let n = w.len();
        let nv = g.nonterminals().len();
        let mut term_rules = Vec::new();
        let mut bin_rules = Vec::new();
        for (r, rule) in g.rules().iter().enumerate() {
            match rule.rhs.as_slice() {
                [Symbol::T(t)] => term_rules.push((r, rule.lhs, *t)),
                [Symbol::N(b), Symbol::N(c)] => bin_rules.push((r, rule.lhs, *b, *c)),
                [] | [Symbol::N(_)] => {}
                _ => panic!("grammar is not in simple normal form"),
            }
        }
        type Cell<W, C> = Vec<Option<(W, C)>>;
        // q[i][j], p[i][j]: span starting at i of length j
        let mut q: Vec<Vec<Cell<S::W, QChoice>>> = vec![vec![Vec::new(); n + 1]; n];
        let mut p: Vec<Vec<Cell<S::W, usize>>> = vec![vec![Vec::new(); n + 1]; n];
        for j in 1..=n {
            for i in 0..=n - j {
                let mut qc: Cell<S::W, QChoice> = vec![None; nv];
                if j == 1 {
                    for &(r, a, t) in &term_rules {
                        if t == w[i] && self.better(&self.weights[r], &qc[a])? {
                            qc[a] = Some((self.weights[r].clone(), QChoice::Term(r)));
                        }
                    }
                } else {
                    for &(r, a, b, c) in &bin_rules {
                        for m in 1..j {
                            let (Some((wb, _)), Some((wc, _))) = (&p[i][m][b], &p[i + m][j - m][c]) else {
                                continue;
                            };
                            let v = self.s.times(&self.s.times(&self.weights[r], wb), wc);
                            if self.better(&v, &qc[a])? {
                                qc[a] = Some((v, QChoice::Split(r, m)));
                            }
                        }
                    }
                }
                let mut pc: Cell<S::W, usize> = vec![None; nv];
                for (a, slot) in pc.iter_mut().enumerate() {
                    for (b, cell) in qc.iter().enumerate() {
                        let (Some(u), Some((wq, _))) = (self.unary.get(a, b), cell) else { continue };
                        let v = self.s.times(u, wq);
                        if self.better(&v, slot)? {
                            *slot = Some((v, b));
                        }
                    }
                }
                q[i][j] = qc;
                p[i][j] = pc;
            }
        }
        let Some((weight, _)) = p[0][n][start].clone() else { return Ok(None) };

        let mut builder = DagBuilder::new();
        let mut eps_memo = vec![None; nv];
        let mut memo = HashMap::new();
        let leaves: Vec<usize> = w.iter().map(|&t| builder.leaf(Some(t))).collect();
        let root = self.build_p(&p, &q, &leaves, (0, n, start), &mut builder, &mut eps_memo, &mut memo);
        Ok(Some(Derivation { weight, builder, root }))
    }

    #[allow(clippy::too_many_arguments)]
    fn build_p(
        &self,
        p: &[Vec<Vec<Option<(S::W, usize)>>>],
        q: &[Vec<Vec<Option<(S::W, QChoice)>>>],
        leaves: &[usize],
        (i, j, a): (usize, usize, usize),
        b: &mut DagBuilder,
        eps_memo: &mut Vec<Option<usize>>,
        memo: &mut HashMap<(usize, usize, usize), usize>,
    ) -> usize {
        if let Some(&k) = memo.get(&(i, j, a)) {
            return k;
        }
        let bottom = p[i][j][a].as_ref().expect("filled cell").1;
        let hole = match q[i][j][bottom].as_ref().expect("filled cell").1 {
            QChoice::Term(r) => b.internal(bottom, r, vec![leaves[i]]),
            QChoice::Split(r, m) => {
                let Symbol::N(x) = self.g.rule(r).rhs[0] else { unreachable!() };
                let Symbol::N(y) = self.g.rule(r).rhs[1] else { unreachable!() };
                let left = self.build_p(p, q, leaves, (i, m, x), b, eps_memo, memo);
                let right = self.build_p(p, q, leaves, (i + m, j - m, y), b, eps_memo, memo);
                b.internal(bottom, r, vec![left, right])
            }
        };
        let node = self.unary.splice(a, bottom, hole, b, &mut |c, b| self.eps_node(c, b, eps_memo));
        memo.insert((i, j, a), node);
        node
    }
}
