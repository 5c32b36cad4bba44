//! Exact arithmetic on numbers written as products of exponentials
//! (`∏ aᵢ^bᵢ`), certified comparison through linear forms in logarithms, and
//! maximum-probability parsing for stochastic context-free grammars whose
//! answers are reported in that representation.

pub mod circuit;
pub mod compare;
pub mod dyadic;
pub mod gap;
pub mod logform;
pub mod poe;
pub mod refine;
pub mod scfg;

pub use compare::{compare, compare_circuit, CompareMode, CompareOutcome, Verdict};
pub use circuit::{ArithmeticCircuit, CircuitError, Gate};
pub use dyadic::Dyadic;
pub use poe::{Poe, PoeError};
