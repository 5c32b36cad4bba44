//! Arithmetic circuits over `{*, /}` with positive integer inputs, and the
//! translations between circuits and [`Poe`] numerals.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::poe::Poe;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("circuit has no gates")]
    Empty,
    #[error("gate {gate} refers to gate {operand}, which is not earlier in the circuit")]
    ForwardReference { gate: usize, operand: usize },
    #[error("gate {0} has a zero input")]
    ZeroInput(usize),
    #[error("output gate {0} does not exist")]
    BadOutput(usize),
    #[error("evaluation needs more than {0} bits")]
    BudgetExceeded(u64),
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    Input(BigUint),
    Mul(usize, usize),
    Div(usize, usize),
}

/// Gates in topological order; every operand refers to an earlier gate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ArithmeticCircuit {
    gates: Vec<Gate>,
    output: usize,
}

impl ArithmeticCircuit {
    pub fn new(gates: Vec<Gate>, output: usize) -> Result<Self, CircuitError> {
        if gates.is_empty() {
            return Err(CircuitError::Empty);
        }
        for (k, g) in gates.iter().enumerate() {
            match g {
                Gate::Input(v) if v.is_zero() => return Err(CircuitError::ZeroInput(k)),
                Gate::Input(_) => {}
                Gate::Mul(l, r) | Gate::Div(l, r) => {
                    for &operand in [l, r] {
                        if operand >= k {
                            return Err(CircuitError::ForwardReference { gate: k, operand });
                        }
                    }
                }
            }
        }
        if output >= gates.len() {
            return Err(CircuitError::BadOutput(output));
        }
        Ok(ArithmeticCircuit { gates, output })
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn output(&self) -> usize {
        self.output
    }

    pub fn non_input_gates(&self) -> usize {
        self.gates.iter().filter(|g| !matches!(g, Gate::Input(_))).count()
    }

    /// Longest input-to-gate path ending at the output.
    pub fn depth(&self) -> usize {
        let mut depth = vec![0usize; self.gates.len()];
        for (k, g) in self.gates.iter().enumerate() {
            if let Gate::Mul(l, r) | Gate::Div(l, r) = g {
                depth[k] = 1 + depth[*l].max(depth[*r]);
            }
        }
        depth[self.output]
    }

    /// The PoE over the circuit's input values. Each gate carries an
    /// exponent vector indexed by input gate; a gate at depth `d` has
    /// exponents of magnitude at most `2^d`.
    pub fn to_poe(&self) -> Poe {
        let mut vectors: Vec<BTreeMap<usize, BigInt>> = Vec::with_capacity(self.gates.len());
        for (k, g) in self.gates.iter().enumerate() {
            let v = match g {
                Gate::Input(_) => BTreeMap::from([(k, BigInt::one())]),
                Gate::Mul(l, r) => combine(&vectors[*l], &vectors[*r], false),
                Gate::Div(l, r) => combine(&vectors[*l], &vectors[*r], true),
            };
            vectors.push(v);
        }
        Poe::from_pairs(vectors.swap_remove(self.output).into_iter().map(|(k, e)| {
            let Gate::Input(base) = &self.gates[k] else { unreachable!("exponent keyed by input gate") };
            (base.clone(), e)
        }))
    }

    /// Direct gate-by-gate evaluation. Intended for small circuits; refuses
    /// once an intermediate value exceeds `bit_budget` bits.
    pub fn eval_exact(&self, bit_budget: u64) -> Result<BigRational, CircuitError> {
        let mut vals: Vec<BigRational> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let v = match g {
                Gate::Input(x) => BigRational::from_integer(BigInt::from(x.clone())),
                Gate::Mul(l, r) => &vals[*l] * &vals[*r],
                Gate::Div(l, r) => &vals[*l] / &vals[*r],
            };
            if v.numer().bits() + v.denom().bits() > bit_budget {
                return Err(CircuitError::BudgetExceeded(bit_budget));
            }
            vals.push(v);
        }
        Ok(vals.swap_remove(self.output))
    }
}

fn combine(x: &BTreeMap<usize, BigInt>, y: &BTreeMap<usize, BigInt>, subtract: bool) -> BTreeMap<usize, BigInt> {
    let mut out = x.clone();
    for (k, e) in y {
        let slot = out.entry(*k).or_insert_with(BigInt::zero);
        if subtract {
            *slot -= e;
        } else {
            *slot += e;
        }
    }
    out.retain(|_, e| !e.is_zero());
    out
}

/// Free-function form of [`ArithmeticCircuit::to_poe`].
pub fn from_circuit(c: &ArithmeticCircuit) -> Poe {
    c.to_poe()
}

/// Builds a circuit by square-and-multiply on each base, multiplies the
/// positive powers together, and divides by the product of the negative
/// ones.
pub fn to_circuit(x: &Poe) -> ArithmeticCircuit {
    let mut gates = Vec::new();
    let mut numer = Vec::new();
    let mut denom = Vec::new();
    for (base, e) in x.iter() {
        let g = emit_power(&mut gates, base, e.magnitude());
        if e.is_positive() {
            numer.push(g);
        } else {
            denom.push(g);
        }
    }
    let product = |gates: &mut Vec<Gate>, ids: &[usize]| -> Option<usize> {
        let (&first, rest) = ids.split_first()?;
        Some(rest.iter().fold(first, |acc, &g| {
            gates.push(Gate::Mul(acc, g));
            gates.len() - 1
        }))
    };
    let top = product(&mut gates, &numer);
    let bottom = product(&mut gates, &denom);
    let output = match (top, bottom) {
        (Some(t), None) => t,
        (t, Some(b)) => {
            let t = t.unwrap_or_else(|| {
                gates.push(Gate::Input(BigUint::one()));
                gates.len() - 1
            });
            gates.push(Gate::Div(t, b));
            gates.len() - 1
        }
        (None, None) => {
            gates.push(Gate::Input(BigUint::one()));
            0
        }
    };
    ArithmeticCircuit { gates, output }
}

/// Left-to-right binary powering of `base^exp`, `exp >= 1`.
fn emit_power(gates: &mut Vec<Gate>, base: &BigUint, exp: &BigUint) -> usize {
    gates.push(Gate::Input(base.clone()));
    let input = gates.len() - 1;
    let mut acc = input;
    let bits = exp.bits();
    for k in (0..bits.saturating_sub(1)).rev() {
        gates.push(Gate::Mul(acc, acc));
        acc = gates.len() - 1;
        if exp.bit(k) {
            gates.push(Gate::Mul(acc, input));
            acc = gates.len() - 1;
        }
    }
    acc
}

impl Poe {
    pub fn to_circuit(&self) -> ArithmeticCircuit {
        to_circuit(self)
    }
}

impl fmt::Display for ArithmeticCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, g) in self.gates.iter().enumerate() {
            match g {
                Gate::Input(v) => writeln!(f, "g{k} = input {v}")?,
                Gate::Mul(l, r) => writeln!(f, "g{k} = mul g{l} g{r}")?,
                Gate::Div(l, r) => writeln!(f, "g{k} = div g{l} g{r}")?,
            }
        }
        writeln!(f, "output g{}", self.output)
    }
}

impl FromStr for ArithmeticCircuit {
    type Err = CircuitError;

    /// One gate per line (`g0 = input 7`, `g1 = mul g0 g0`, `g2 = div g1 g0`)
    /// followed by a final `output gK` line. Gate names must count up from
    /// `g0`; blank lines are ignored and nothing may follow the output line.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut gates = Vec::new();
        let mut output = None;
        for (ln, line) in s.lines().enumerate() {
            let line_no = ln + 1;
            let toks = tokens(line);
            if toks.is_empty() {
                continue;
            }
            let err = |col: usize, message: String| CircuitError::Syntax { line: line_no, column: col, message };
            if output.is_some() {
                return Err(err(toks[0].0, "unexpected text after the output line".into()));
            }
            if toks[0].1 == "output" {
                if toks.len() != 2 {
                    return Err(err(toks[0].0, "expected `output gK`".into()));
                }
                output = Some(gate_ref(toks[1], gates.len(), line_no)?);
                continue;
            }
            let expected = format!("g{}", gates.len());
            if toks[0].1 != expected {
                return Err(err(toks[0].0, format!("expected gate name `{expected}`")));
            }
            if toks.get(1).map(|t| t.1) != Some("=") {
                return Err(err(toks.get(1).map_or(line.len() + 1, |t| t.0), "expected `=`".into()));
            }
            let Some(&(op_col, op)) = toks.get(2) else {
                return Err(err(line.len() + 1, "expected a gate kind".into()));
            };
            let gate = match op {
                "input" => {
                    if toks.len() != 4 {
                        return Err(err(op_col, "expected `input <positive integer>`".into()));
                    }
                    let v: BigUint = toks[3]
                        .1
                        .parse()
                        .map_err(|_| err(toks[3].0, format!("`{}` is not an integer", toks[3].1)))?;
                    if v.is_zero() {
                        return Err(err(toks[3].0, "inputs must be positive".into()));
                    }
                    Gate::Input(v)
                }
                "mul" | "div" => {
                    if toks.len() != 5 {
                        return Err(err(op_col, format!("expected `{op} gI gJ`")));
                    }
                    let l = gate_ref(toks[3], gates.len(), line_no)?;
                    let r = gate_ref(toks[4], gates.len(), line_no)?;
                    if op == "mul" {
                        Gate::Mul(l, r)
                    } else {
                        Gate::Div(l, r)
                    }
                }
                other => return Err(err(op_col, format!("unknown gate kind `{other}`"))),
            };
            gates.push(gate);
        }
        let output = output.ok_or(CircuitError::Syntax {
            line: s.lines().count().max(1),
            column: 1,
            message: "missing `output` line".into(),
        })?;
        ArithmeticCircuit::new(gates, output)
    }
}

fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

fn gate_ref(tok: (usize, &str), available: usize, line: usize) -> Result<usize, CircuitError> {
    let idx = tok.1.strip_prefix('g').and_then(|d| d.parse::<usize>().ok());
    match idx {
        Some(k) if k < available => Ok(k),
        Some(_) => Err(CircuitError::Syntax {
            line,
            column: tok.0,
            message: format!("`{}` does not name an earlier gate", tok.1),
        }),
        None => Err(CircuitError::Syntax { line, column: tok.0, message: format!("`{}` is not a gate name", tok.1) }),
    }
}
