//! Grammar generators and slow reference parsers shared by the
//! integration tests and the acceptance run.
#![allow(dead_code)]

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use poeparse::scfg::{Scfg, Symbol};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

const PROBS: [&str; 4] = ["1/2", "1/3", "1/4", "1/5"];
const TERMINALS: [&str; 2] = ["a", "b"];

fn prob_value(p: &str) -> BigRational {
    poeparse::scfg::parse_probability(p).unwrap()
}

/// Random grammar with up to `max_nt` nonterminals over `{a, b}`: every
/// nonterminal gets one rule free of nonterminals (possibly ε) and up to
/// three more of length at most `max_rhs`.
pub fn random_grammar(rng: &mut ChaCha8Rng, max_nt: usize, max_rhs: usize, eps_rate: f64) -> Scfg {
    let nt = rng.gen_range(1..=max_nt);
    let mut text = String::new();
    for a in 0..nt {
        let mut sum = BigRational::zero();
        let extra = rng.gen_range(0..=3);
        for k in 0..=extra {
            let p = *PROBS.choose(rng).unwrap();
            if &sum + prob_value(p) > BigRational::one() {
                continue;
            }
            sum += prob_value(p);
            let mut rhs = Vec::new();
            if k == 0 {
                if !rng.gen_bool(eps_rate) {
                    for _ in 0..rng.gen_range(1..=2) {
                        rhs.push(format!("'{}'", TERMINALS.choose(rng).unwrap()));
                    }
                }
            } else {
                for _ in 0..rng.gen_range(0..=max_rhs) {
                    if rng.gen_bool(0.7) {
                        rhs.push(format!("N{}", rng.gen_range(0..nt)));
                    } else {
                        rhs.push(format!("'{}'", TERMINALS.choose(rng).unwrap()));
                    }
                }
            }
            text.push_str(&format!("N{a} -> {} # {p}\n", rhs.join(" ")));
        }
    }
    text.parse().unwrap_or_else(|e| panic!("{e}\n{text}"))
}

/// Random grammar in Chomsky normal form, no ε-rules.
pub fn random_cnf(rng: &mut ChaCha8Rng, max_nt: usize) -> Scfg {
    let nt = rng.gen_range(1..=max_nt);
    let mut text = String::new();
    for a in 0..nt {
        let mut sum = BigRational::zero();
        for k in 0..rng.gen_range(2..=4) {
            let p = *PROBS.choose(rng).unwrap();
            if &sum + prob_value(p) > BigRational::one() {
                continue;
            }
            sum += prob_value(p);
            let rhs = if k == 0 || rng.gen_bool(0.3) {
                format!("'{}'", TERMINALS.choose(rng).unwrap())
            } else {
                format!("N{} N{}", rng.gen_range(0..nt), rng.gen_range(0..nt))
            };
            text.push_str(&format!("N{a} -> {rhs} # {p}\n"));
        }
    }
    text.parse().unwrap()
}

/// A string of length at most `max_len`: half the time sampled from the
/// grammar, otherwise uniform over the terminals.
pub fn random_string(rng: &mut ChaCha8Rng, g: &Scfg, max_len: usize) -> Vec<usize> {
    if rng.gen_bool(0.5) {
        for _ in 0..10 {
            if let Some(w) = sample(rng, g, g.start(), 0, max_len) {
                return w;
            }
        }
    }
    if g.terminals().is_empty() {
        return Vec::new();
    }
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| rng.gen_range(0..g.terminals().len())).collect()
}

fn sample(rng: &mut ChaCha8Rng, g: &Scfg, a: usize, depth: usize, max_len: usize) -> Option<Vec<usize>> {
    let rules = g.rules_for(a);
    if rules.is_empty() || depth > 12 {
        return None;
    }
    let r = *rules.choose(rng).unwrap();
    let mut out = Vec::new();
    for s in &g.rule(r).rhs {
        match *s {
            Symbol::T(t) => out.push(t),
            Symbol::N(x) => out.extend(sample(rng, g, x, depth + 1, max_len)?),
        }
        if out.len() > max_len {
            return None;
        }
    }
    Some(out)
}

fn max_opt(a: &mut Option<BigRational>, v: BigRational) -> bool {
    match a {
        Some(cur) if *cur >= v => false,
        _ => {
            *a = Some(v);
            true
        }
    }
}

/// Best product for `rhs` deriving `w[i..j]`, given the current table.
fn seq_best(
    rhs: &[Symbol],
    w: &[usize],
    i: usize,
    j: usize,
    best: &HashMap<(usize, usize, usize), BigRational>,
) -> Option<BigRational> {
    let mut cur: Vec<Option<BigRational>> = vec![None; j + 1];
    cur[i] = Some(BigRational::one());
    for s in rhs {
        let mut next: Vec<Option<BigRational>> = vec![None; j + 1];
        for pos in i..=j {
            let Some(v) = cur[pos].clone() else { continue };
            match *s {
                Symbol::T(t) => {
                    if pos < j && w[pos] == t {
                        max_opt(&mut next[pos + 1], v);
                    }
                }
                Symbol::N(x) => {
                    for end in pos..=j {
                        if let Some(b) = best.get(&(x, pos, end)) {
                            max_opt(&mut next[end], &v * b);
                        }
                    }
                }
            }
        }
        cur = next;
    }
    cur[j].take()
}

/// Maximum parse probability by value iteration over all
/// `(A, i, j)` items with exact rationals. Optimal trees never repeat an
/// item along a path, so the table is final once a full sweep changes
/// nothing; the sweep count is checked against the item count.
pub fn brute_force_max(g: &Scfg, w: &[usize]) -> Option<BigRational> {
    brute_force_table(g, w).get(&(g.start(), 0, w.len())).cloned()
}

pub fn brute_force_table(g: &Scfg, w: &[usize]) -> HashMap<(usize, usize, usize), BigRational> {
    let n = w.len();
    let items = g.nonterminals().len() * (n + 1) * (n + 2) / 2;
    let mut best: HashMap<(usize, usize, usize), BigRational> = HashMap::new();
    for sweep in 0.. {
        assert!(sweep <= items + 1, "value iteration did not settle");
        let mut changed = false;
        for a in 0..g.nonterminals().len() {
            for i in 0..=n {
                for j in i..=n {
                    for &r in g.rules_for(a) {
                        let rule = g.rule(r);
                        let Some(v) = seq_best(&rule.rhs, w, i, j, &best) else { continue };
                        let v = v * &rule.prob;
                        let mut slot = best.get(&(a, i, j)).cloned();
                        if max_opt(&mut slot, v) {
                            best.insert((a, i, j), slot.unwrap());
                            changed = true;
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    best
}

/// Textbook Viterbi CYK for grammars in Chomsky normal form.
pub fn cyk_max(g: &Scfg, w: &[usize]) -> Option<BigRational> {
    let n = w.len();
    if n == 0 {
        return None;
    }
    let nv = g.nonterminals().len();
    let mut chart = vec![vec![vec![None::<BigRational>; nv]; n + 1]; n];
    for (i, &t) in w.iter().enumerate() {
        for rule in g.rules() {
            if rule.rhs == [Symbol::T(t)] {
                max_opt(&mut chart[i][1][rule.lhs], rule.prob.clone());
            }
        }
    }
    for len in 2..=n {
        for i in 0..=n - len {
            for split in 1..len {
                for rule in g.rules() {
                    let [Symbol::N(b), Symbol::N(c)] = rule.rhs[..] else { continue };
                    let (Some(x), Some(y)) = (&chart[i][split][b], &chart[i + split][len - split][c]) else {
                        continue;
                    };
                    let v = &rule.prob * x * y;
                    max_opt(&mut chart[i][len][rule.lhs], v);
                }
            }
        }
    }
    chart[0][n][g.start()].clone()
}

/// Probabilities of all parse trees of `w[i..j]` from `a` with total rule
/// cost at most `budget`, as (probability, cost) pairs.
pub struct TreeEnumerator<'g> {
    g: &'g Scfg,
    w: Vec<usize>,
    cost: Vec<usize>,
    memo: HashMap<(usize, usize, usize, usize), Vec<(BigRational, usize)>>,
}

impl<'g> TreeEnumerator<'g> {
    pub fn new(g: &'g Scfg, w: &[usize], cost: Vec<usize>) -> Self {
        TreeEnumerator { g, w: w.to_vec(), cost, memo: HashMap::new() }
    }

    pub fn trees(&mut self, a: usize, i: usize, j: usize, budget: usize) -> Vec<(BigRational, usize)> {
        if let Some(v) = self.memo.get(&(a, i, j, budget)) {
            return v.clone();
        }
        let mut out = Vec::new();
        for &r in self.g.rules_for(a) {
            let c = self.cost[r];
            if c > budget {
                continue;
            }
            let rule = self.g.rule(r).clone();
            for (p, used) in self.seq(&rule.rhs, i, j, budget - c) {
                out.push((p * &rule.prob, used + c));
            }
        }
        self.memo.insert((a, i, j, budget), out.clone());
        out
    }

    fn seq(&mut self, rhs: &[Symbol], i: usize, j: usize, budget: usize) -> Vec<(BigRational, usize)> {
        let Some((first, rest)) = rhs.split_first() else {
            return if i == j { vec![(BigRational::one(), 0)] } else { vec![] };
        };
        let mut out = Vec::new();
        match *first {
            Symbol::T(t) => {
                if i < j && self.w[i] == t {
                    out = self.seq(rest, i + 1, j, budget);
                }
            }
            Symbol::N(x) => {
                for mid in i..=j {
                    for (p, used) in self.trees(x, i, mid, budget) {
                        for (q, more) in self.seq(rest, mid, j, budget - used) {
                            out.push((&p * q, used + more));
                        }
                    }
                }
            }
        }
        out
    }
}

/// Sorted multiset of tree probabilities for `w` within the budget.
pub fn tree_multiset(g: &Scfg, w: &[usize], cost: Vec<usize>, budget: usize) -> Vec<BigRational> {
    let mut e = TreeEnumerator::new(g, w, cost);
    let mut v: Vec<BigRational> = e.trees(g.start(), 0, w.len(), budget).into_iter().map(|x| x.0).collect();
    v.sort();
    v
}

/// `A₀ → ε (1/2)`, `Aᵢ → Aᵢ₋₁ Aᵢ₋₁`, plus `extra` rules placed first.
pub fn gadget(n: usize, extra: &str) -> Scfg {
    let mut text = format!("{extra}A0 -> # 1/2\n");
    for i in 1..=n {
        text.push_str(&format!("A{i} -> A{} A{}\n", i - 1, i - 1));
    }
    text.parse().unwrap()
}

pub fn pow2(e: usize) -> BigInt {
    BigInt::one() << e
}
