//! Simple normal form: every nonterminal is of one of three kinds.
//!
//! * `L`: only unit rules `A → B`, any probabilities.
//! * `Q`: a single rule `A → B C` with probability 1.
//! * `T`: a single rule `A → a` or `A → ε` with probability 1.
//!
//! A nonterminal whose rules already fit one kind keeps them. One with a
//! single probability-1 rule of length two or more becomes a `Q` chain.
//! Any other nonterminal becomes `L`: unit rules stay, and every other rule
//! `r` turns into `A → $r{r}` with the original probability, `$r{r}` then
//! deriving the right side through fresh `T`/`Q` nonterminals. Terminals
//! inside longer right sides go through wrappers `$'a' → a`. Introduced
//! names start with `$`, which user grammars cannot use.

use std::collections::{HashMap, VecDeque};

use num_rational::BigRational;
use num_traits::One;

use super::dag::{DagBuilder, DagNode, ParseDag};
use super::grammar::{Rule, Scfg, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NtKind {
    L,
    Q,
    T,
}

/// Where a rule of the normal form came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleOrigin {
    /// The original rule, unchanged.
    Original(usize),
    /// The rule carrying the probability of original rule `r`.
    Head(usize),
    /// A probability-1 rule that spells out part of original rule `r`.
    Auxiliary(usize),
    /// `$'a' → a`.
    TerminalWrapper,
}

impl RuleOrigin {
    /// The original rule this one stands for, if it is the one that counts.
    pub fn counted(self) -> Option<usize> {
        match self {
            RuleOrigin::Original(r) | RuleOrigin::Head(r) => Some(r),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfGrammar {
    grammar: Scfg,
    kinds: Vec<NtKind>,
    origins: Vec<RuleOrigin>,
    original_nonterminals: usize,
    /// SNF rule that starts the encoding of each original rule.
    entry: Vec<usize>,
    /// Terminal of each wrapper nonterminal.
    wrapped: Vec<Option<usize>>,
}

struct Converter<'g> {
    source: &'g Scfg,
    names: Vec<String>,
    kinds: Vec<NtKind>,
    rules: Vec<Rule>,
    origins: Vec<RuleOrigin>,
    wrappers: HashMap<usize, usize>,
    wrapped: Vec<Option<usize>>,
}

impl Converter<'_> {
    fn fresh(&mut self, name: String, kind: NtKind) -> usize {
        self.names.push(name);
        self.kinds.push(kind);
        self.wrapped.push(None);
        self.names.len() - 1
    }

    fn push(&mut self, lhs: usize, rhs: Vec<Symbol>, prob: BigRational, origin: RuleOrigin) -> usize {
        self.rules.push(Rule { lhs, rhs, prob });
        self.origins.push(origin);
        self.rules.len() - 1
    }

    fn as_nonterminal(&mut self, s: Symbol) -> usize {
        match s {
            Symbol::N(x) => x,
            Symbol::T(t) => {
                if let Some(&w) = self.wrappers.get(&t) {
                    return w;
                }
                let w = self.fresh(format!("$'{}'", self.source.terminals()[t]), NtKind::T);
                self.wrapped[w] = Some(t);
                self.push(w, vec![Symbol::T(t)], BigRational::one(), RuleOrigin::TerminalWrapper);
                self.wrappers.insert(t, w);
                w
            }
        }
    }

    /// `head → s₁ X₁, X₁ → s₂ X₂, …, X_{k-2} → s_{k-1} s_k` for `k >= 2`.
    /// Returns the index of the first rule.
    fn chain(&mut self, head: usize, r: usize, rhs: &[Symbol], prob: BigRational, first: RuleOrigin) -> usize {
        let mut cur = head;
        let mut first_rule = None;
        let mut prob = prob;
        let mut origin = first;
        for (idx, &s) in rhs[..rhs.len() - 2].iter().enumerate() {
            let left = self.as_nonterminal(s);
            let next = self.fresh(format!("$r{r}.{}", idx + 1), NtKind::Q);
            let k = self.push(cur, vec![Symbol::N(left), Symbol::N(next)], prob, origin);
            first_rule.get_or_insert(k);
            prob = BigRational::one();
            origin = RuleOrigin::Auxiliary(r);
            cur = next;
        }
        let x = self.as_nonterminal(rhs[rhs.len() - 2]);
        let y = self.as_nonterminal(rhs[rhs.len() - 1]);
        let k = self.push(cur, vec![Symbol::N(x), Symbol::N(y)], prob, origin);
        *first_rule.get_or_insert(k)
    }
}

/// Converts `g` to simple normal form. Original nonterminals, terminals and
/// the start symbol keep their indices.
pub fn to_snf(g: &Scfg) -> SnfGrammar {
    let mut c = Converter {
        source: g,
        names: g.nonterminals().to_vec(),
        kinds: vec![NtKind::L; g.nonterminals().len()],
        rules: Vec::new(),
        origins: Vec::new(),
        wrappers: HashMap::new(),
        wrapped: vec![None; g.nonterminals().len()],
    };
    let mut entry = vec![usize::MAX; g.rules().len()];
    for a in 0..g.nonterminals().len() {
        let rs = g.rules_for(a);
        let single = match rs {
            [r] if g.rule(*r).prob.is_one() => Some(*r),
            _ => None,
        };
        let shape = single.map(|r| g.rule(r).rhs.as_slice());
        let kind = if rs.iter().all(|&r| g.rule(r).is_unit()) {
            Some(NtKind::L)
        } else if matches!(shape, Some([Symbol::N(_), Symbol::N(_)])) {
            Some(NtKind::Q)
        } else if matches!(shape, Some([] | [Symbol::T(_)])) {
            Some(NtKind::T)
        } else {
            None
        };
        if let Some(kind) = kind {
            c.kinds[a] = kind;
            for &r in rs {
                let rule = g.rule(r);
                entry[r] = c.push(a, rule.rhs.clone(), rule.prob.clone(), RuleOrigin::Original(r));
            }
            continue;
        }
        if let Some(r) = single {
            c.kinds[a] = NtKind::Q;
            entry[r] = c.chain(a, r, &g.rule(r).rhs, BigRational::one(), RuleOrigin::Head(r));
            continue;
        }
        c.kinds[a] = NtKind::L;
        for &r in rs {
            let rule = g.rule(r);
            if rule.is_unit() {
                entry[r] = c.push(a, rule.rhs.clone(), rule.prob.clone(), RuleOrigin::Original(r));
                continue;
            }
            let x = c.fresh(format!("$r{r}"), NtKind::T);
            entry[r] = c.push(a, vec![Symbol::N(x)], rule.prob.clone(), RuleOrigin::Head(r));
            if rule.rhs.len() <= 1 {
                c.push(x, rule.rhs.clone(), BigRational::one(), RuleOrigin::Auxiliary(r));
            } else {
                c.kinds[x] = NtKind::Q;
                c.chain(x, r, &rule.rhs, BigRational::one(), RuleOrigin::Auxiliary(r));
            }
        }
    }
    let grammar = Scfg::new(c.names, g.terminals().to_vec(), g.start(), c.rules)
        .expect("normal form of a valid grammar is valid");
    SnfGrammar {
        grammar,
        kinds: c.kinds,
        origins: c.origins,
        original_nonterminals: g.nonterminals().len(),
        entry,
        wrapped: c.wrapped,
    }
}

enum Lifted {
    Node(usize),
    Seq(Vec<usize>),
}

impl SnfGrammar {
    pub fn grammar(&self) -> &Scfg {
        &self.grammar
    }

    pub fn kind(&self, a: usize) -> NtKind {
        self.kinds[a]
    }

    pub fn kinds(&self) -> &[NtKind] {
        &self.kinds
    }

    pub fn origin(&self, rule: usize) -> RuleOrigin {
        self.origins[rule]
    }

    pub fn original_nonterminals(&self) -> usize {
        self.original_nonterminals
    }

    /// Checks the three-kind shape; used by tests and debug assertions.
    pub fn is_well_formed(&self) -> bool {
        let g = &self.grammar;
        (0..g.nonterminals().len()).all(|a| {
            let rs = g.rules_for(a);
            let single = |pred: fn(&[Symbol]) -> bool| match rs {
                [r] => g.rule(*r).prob.is_one() && pred(&g.rule(*r).rhs),
                _ => false,
            };
            match self.kinds[a] {
                NtKind::L => rs.iter().all(|&r| g.rule(r).is_unit()),
                NtKind::Q => single(|s| matches!(s, [Symbol::N(_), Symbol::N(_)])),
                NtKind::T => single(|s| matches!(s, [] | [Symbol::T(_)])),
            }
        })
    }

    /// Maps a parse DAG over the normal form back to the original grammar:
    /// introduced nodes are flattened into the node of the rule they encode.
    pub fn lift_dag(&self, d: &ParseDag) -> ParseDag {
        let mut b = DagBuilder::new();
        let mut lifted: Vec<Lifted> = Vec::with_capacity(d.len());
        for node in d.nodes() {
            let out = match node {
                DagNode::Leaf(t) => Lifted::Node(b.leaf(*t)),
                DagNode::Internal { nt, rule, children } => {
                    let flatten = |lifted: &[Lifted]| -> Vec<usize> {
                        let mut seq = Vec::new();
                        for &c in children {
                            if d.nodes()[c] == DagNode::Leaf(None) {
                                continue;
                            }
                            match &lifted[c] {
                                Lifted::Node(k) => seq.push(*k),
                                Lifted::Seq(v) => seq.extend(v),
                            }
                        }
                        seq
                    };
                    match self.origins[*rule] {
                        RuleOrigin::Original(r) => {
                            let kids = children
                                .iter()
                                .map(|&c| match &lifted[c] {
                                    Lifted::Node(k) => *k,
                                    Lifted::Seq(_) => unreachable!("original rules only see original symbols"),
                                })
                                .collect();
                            Lifted::Node(b.internal(*nt, r, kids))
                        }
                        RuleOrigin::TerminalWrapper => Lifted::Node(b.leaf(self.wrapped[*nt])),
                        RuleOrigin::Auxiliary(_) => Lifted::Seq(flatten(&lifted)),
                        RuleOrigin::Head(r) => {
                            let mut kids = flatten(&lifted);
                            if kids.is_empty() {
                                kids.push(b.leaf(None));
                            }
                            Lifted::Node(b.internal(*nt, r, kids))
                        }
                    }
                }
            };
            lifted.push(out);
        }
        match lifted.last() {
            Some(Lifted::Node(root)) => b.extract(*root, d.prob().clone()),
            _ => panic!("DAG root is an introduced nonterminal"),
        }
    }

    /// Inverse of [`SnfGrammar::lift_dag`] for DAGs over the original grammar.
    pub fn embed_dag(&self, d: &ParseDag) -> ParseDag {
        let mut b = DagBuilder::new();
        let mut ids: Vec<usize> = Vec::with_capacity(d.len());
        for node in d.nodes() {
            let id = match node {
                DagNode::Leaf(t) => b.leaf(*t),
                DagNode::Internal { children, rule, .. } => {
                    let mut items: VecDeque<usize> = children
                        .iter()
                        .filter(|&&c| d.nodes()[c] != DagNode::Leaf(None))
                        .map(|&c| ids[c])
                        .collect();
                    let id = self.build(&mut b, self.entry[*rule], &mut items);
                    debug_assert!(items.is_empty());
                    id
                }
            };
            ids.push(id);
        }
        b.extract(*ids.last().expect("nonempty DAG"), d.prob().clone())
    }

    fn build(&self, b: &mut DagBuilder, rule: usize, items: &mut VecDeque<usize>) -> usize {
        let r = self.grammar.rule(rule);
        if r.rhs.is_empty() {
            return b.epsilon(r.lhs, rule);
        }
        let mut kids = Vec::with_capacity(r.rhs.len());
        for s in &r.rhs {
            let kid = match *s {
                Symbol::T(_) => items.pop_front().expect("terminal child"),
                Symbol::N(x) if x < self.original_nonterminals => items.pop_front().expect("nonterminal child"),
                Symbol::N(x) => {
                    let sole = self.grammar.rules_for(x)[0];
                    if self.origins[sole] == RuleOrigin::TerminalWrapper {
                        let leaf = items.pop_front().expect("wrapped terminal");
                        b.internal(x, sole, vec![leaf])
                    } else {
                        self.build(b, sole, items)
                    }
                }
            };
            kids.push(kid);
        }
        b.internal(r.lhs, rule, kids)
    }
}
