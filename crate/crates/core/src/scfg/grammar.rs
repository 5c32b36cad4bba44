//! Stochastic context-free grammars and their text format.
//!
//! ```text
//! %start S
//! S -> A 'b' # 1/2
//! S -> # 0.5
//! A -> 'a' # 1
//! ```
//!
//! One rule per line. Terminals are single-quoted, nonterminals are bare
//! identifiers, an empty right side is an ε-rule, and the probability after
//! `#` is a fraction or a decimal (converted exactly); it defaults to 1 when
//! omitted. Lines starting with `#` are comments. The start symbol is the
//! one named by `%start`, else the left side of the first rule.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    N(usize),
    T(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub lhs: usize,
    pub rhs: Vec<Symbol>,
    pub prob: BigRational,
}

impl Rule {
    pub fn is_unit(&self) -> bool {
        matches!(self.rhs.as_slice(), [Symbol::N(_)])
    }

    pub fn has_terminal(&self) -> bool {
        self.rhs.iter().any(|s| matches!(s, Symbol::T(_)))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrammarError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("rule {rule}: probability {prob} is not in (0, 1]")]
    BadProbability { rule: usize, prob: BigRational },
    #[error("rule probabilities of {nonterminal} sum to {sum}, more than 1")]
    Overfull { nonterminal: String, sum: BigRational },
    #[error("rule {0} refers to an unknown symbol")]
    UnknownSymbol(usize),
    #[error("start symbol index {0} is out of range")]
    BadStart(usize),
    #[error("grammar has no rules and no start symbol")]
    Empty,
    #[error("symbol name {0:?} is not allowed")]
    BadName(String),
}

/// `G = (V, Σ, R, S, p)` with `Σ_{r ∈ R_A} p(r) <= 1` for every `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scfg {
    nonterminals: Vec<String>,
    terminals: Vec<String>,
    start: usize,
    rules: Vec<Rule>,
    by_lhs: Vec<Vec<usize>>,
}

impl Scfg {
    pub fn new(
        nonterminals: Vec<String>,
        terminals: Vec<String>,
        start: usize,
        rules: Vec<Rule>,
    ) -> Result<Self, GrammarError> {
        if start >= nonterminals.len() {
            return Err(GrammarError::BadStart(start));
        }
        let mut by_lhs = vec![Vec::new(); nonterminals.len()];
        for (k, r) in rules.iter().enumerate() {
            if r.lhs >= nonterminals.len() {
                return Err(GrammarError::UnknownSymbol(k));
            }
            for s in &r.rhs {
                let ok = match *s {
                    Symbol::N(x) => x < nonterminals.len(),
                    Symbol::T(x) => x < terminals.len(),
                };
                if !ok {
                    return Err(GrammarError::UnknownSymbol(k));
                }
            }
            if !r.prob.is_positive() || r.prob > BigRational::one() {
                return Err(GrammarError::BadProbability { rule: k, prob: r.prob.clone() });
            }
            by_lhs[r.lhs].push(k);
        }
        for (a, rs) in by_lhs.iter().enumerate() {
            let sum: BigRational = rs.iter().map(|&k| &rules[k].prob).sum();
            if sum > BigRational::one() {
                return Err(GrammarError::Overfull { nonterminal: nonterminals[a].clone(), sum });
            }
        }
        Ok(Scfg { nonterminals, terminals, start, rules, by_lhs })
    }

    pub fn nonterminals(&self) -> &[String] {
        &self.nonterminals
    }

    pub fn terminals(&self) -> &[String] {
        &self.terminals
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, k: usize) -> &Rule {
        &self.rules[k]
    }

    /// Indices of the rules with left side `a`, in file order.
    pub fn rules_for(&self, a: usize) -> &[usize] {
        &self.by_lhs[a]
    }

    pub fn nonterminal_index(&self, name: &str) -> Option<usize> {
        self.nonterminals.iter().position(|n| n == name)
    }

    pub fn terminal_index(&self, name: &str) -> Option<usize> {
        self.terminals.iter().position(|n| n == name)
    }

    /// Splits an input string into terminal indices. Whitespace-separated
    /// tokens (optionally quoted) are used when the text has whitespace;
    /// otherwise each character is one token. `None` if a token is not a
    /// terminal of the grammar.
    pub fn tokenize(&self, text: &str) -> Option<Vec<usize>> {
        let unquote = |t: &str| -> String {
            t.strip_prefix('\'').and_then(|t| t.strip_suffix('\'')).unwrap_or(t).to_string()
        };
        let tokens: Vec<String> = if text.trim().is_empty() {
            Vec::new()
        } else if text.trim().contains(char::is_whitespace) || text.trim().starts_with('\'') {
            text.split_whitespace().map(unquote).collect()
        } else {
            text.trim().chars().map(String::from).collect()
        };
        tokens.iter().map(|t| self.terminal_index(t)).collect()
    }

    pub fn symbol_text(&self, s: Symbol) -> String {
        match s {
            Symbol::N(x) => self.nonterminals[x].clone(),
            Symbol::T(x) => format!("'{}'", self.terminals[x]),
        }
    }

    /// Total size `Σ (1 + |rhs|)`.
    pub fn size(&self) -> usize {
        self.rules.iter().map(|r| 1 + r.rhs.len()).sum()
    }
}

impl fmt::Display for Scfg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "%start {}", self.nonterminals[self.start])?;
        for r in &self.rules {
            write!(f, "{} ->", self.nonterminals[r.lhs])?;
            for s in &r.rhs {
                write!(f, " {}", self.symbol_text(*s))?;
            }
            writeln!(f, " # {}", r.prob)?;
        }
        Ok(())
    }
}

/// Exact value of a probability literal: `p/q`, an integer, or a decimal.
pub fn parse_probability(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    let (int_part, frac_part) = text.split_once('.').unwrap_or((text, ""));
    let digits_ok = |s: &str| s.chars().all(|c| c.is_ascii_digit());
    if (int_part.is_empty() && frac_part.is_empty()) || !digits_ok(int_part) || !digits_ok(frac_part) {
        return None;
    }
    let whole: BigInt = format!("0{int_part}{frac_part}").parse().ok()?;
    let scale = BigInt::from(10u8).pow(frac_part.len() as u32);
    Some(BigRational::new(whole, scale))
}

fn is_identifier(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct Builder {
    nonterminals: Vec<String>,
    nt_index: HashMap<String, usize>,
    terminals: Vec<String>,
    t_index: HashMap<String, usize>,
}

impl Builder {
    fn nt(&mut self, name: &str) -> usize {
        if let Some(&k) = self.nt_index.get(name) {
            return k;
        }
        self.nonterminals.push(name.to_string());
        self.nt_index.insert(name.to_string(), self.nonterminals.len() - 1);
        self.nonterminals.len() - 1
    }

    fn t(&mut self, name: &str) -> usize {
        if let Some(&k) = self.t_index.get(name) {
            return k;
        }
        self.terminals.push(name.to_string());
        self.t_index.insert(name.to_string(), self.terminals.len() - 1);
        self.terminals.len() - 1
    }
}

/// Splits the right side into `(column, token)` pairs; quoted terminals keep
/// their quotes.
fn rhs_tokens(text: &str, offset: usize, line: usize) -> Result<Vec<(usize, String)>, GrammarError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut k = 0;
    while k < chars.len() {
        let (pos, c) = chars[k];
        if c.is_whitespace() {
            k += 1;
            continue;
        }
        let col = offset + text[..pos].chars().count() + 1;
        if c == '\'' {
            let mut end = k + 1;
            while end < chars.len() && chars[end].1 != '\'' {
                end += 1;
            }
            if end == chars.len() {
                return Err(GrammarError::Syntax { line, column: col, message: "unterminated terminal".into() });
            }
            let body: String = chars[k + 1..end].iter().map(|x| x.1).collect();
            if body.is_empty() {
                return Err(GrammarError::Syntax { line, column: col, message: "empty terminal".into() });
            }
            out.push((col, format!("'{body}'")));
            k = end + 1;
        } else {
            let mut end = k;
            while end < chars.len() && !chars[end].1.is_whitespace() && chars[end].1 != '\'' {
                end += 1;
            }
            out.push((col, chars[k..end].iter().map(|x| x.1).collect()));
            k = end;
        }
    }
    Ok(out)
}

impl FromStr for Scfg {
    type Err = GrammarError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut b = Builder { nonterminals: vec![], nt_index: HashMap::new(), terminals: vec![], t_index: HashMap::new() };
        let mut start = None;
        let mut rules = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = ln + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let syntax = |column: usize, message: String| GrammarError::Syntax { line, column, message };
            if let Some(rest) = trimmed.strip_prefix("%start") {
                let name = rest.trim();
                if !is_identifier(name) || rest.trim_start().len() == rest.len() {
                    return Err(syntax(1, "expected `%start <nonterminal>`".into()));
                }
                if start.is_some() {
                    return Err(syntax(1, "duplicate %start".into()));
                }
                start = Some(b.nt(name));
                continue;
            }
            let Some(arrow) = raw.find("->") else {
                return Err(syntax(1, "expected `->`".into()));
            };
            let lhs = raw[..arrow].trim();
            if !is_identifier(lhs) {
                return Err(syntax(raw[..arrow].find(lhs).unwrap_or(0) + 1, format!("bad nonterminal name {lhs:?}")));
            }
            let after = &raw[arrow + 2..];
            // a `#` inside a quoted terminal does not start the probability
            let mut in_quote = false;
            let hash = after.char_indices().find(|&(_, c)| {
                if c == '\'' {
                    in_quote = !in_quote;
                }
                c == '#' && !in_quote
            });
            let (rhs_text, prob) = match hash {
                Some((h, _)) => {
                    let ptext = &after[h + 1..];
                    let col = arrow + 2 + h + 2;
                    let p = parse_probability(ptext)
                        .ok_or_else(|| syntax(col, format!("bad probability {:?}", ptext.trim())))?;
                    (&after[..h], p)
                }
                None => (after, BigRational::one()),
            };
            let lhs = b.nt(lhs);
            let mut rhs = Vec::new();
            for (col, tok) in rhs_tokens(rhs_text, arrow + 2, line)? {
                if let Some(t) = tok.strip_prefix('\'') {
                    rhs.push(Symbol::T(b.t(&t[..t.len() - 1])));
                } else if is_identifier(&tok) {
                    rhs.push(Symbol::N(b.nt(&tok)));
                } else {
                    return Err(syntax(col, format!("unexpected {tok:?}")));
                }
            }
            if !prob.is_positive() || prob > BigRational::one() {
                return Err(syntax(arrow + 3, format!("probability {prob} is not in (0, 1]")));
            }
            rules.push(Rule { lhs, rhs, prob });
        }
        let start = match (start, rules.first()) {
            (Some(s), _) => s,
            (None, Some(r)) => r.lhs,
            (None, None) => return Err(GrammarError::Empty),
        };
        Scfg::new(b.nonterminals, b.terminals, start, rules)
    }
}
