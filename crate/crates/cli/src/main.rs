//! `poeparse`: equality, comparison and conversion of product-of-exponentials
//! numbers, and maximum-probability parsing with stochastic grammars.
//!
//! Exit codes: 0 success (EQUAL for `equal`), 1 NOT-EQUAL or NO-PARSE,
//! 2 usage, input or internal errors, 3 UNRESOLVED.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use poeparse::circuit::{from_circuit, to_circuit};
use poeparse::compare::{CompareError, UnconditionalBound, DEFAULT_MAX_BITS};
use poeparse::gap::GapError;
use poeparse::scfg::{
    approx_max_parse, dag_yield, exponent_sum, parse_exact_with, parse_probability, to_snf, ParseDag, Scfg,
    ScfgError,
};
use poeparse::{compare, ArithmeticCircuit, CompareMode, Poe, Verdict};

const EXIT_NO: u8 = 1;
const EXIT_ERROR: u8 = 2;
const EXIT_UNRESOLVED: u8 = 3;

#[derive(Parser)]
#[command(name = "poeparse", version, about = "Exact arithmetic on products of exponentials and SCFG max-parsing")]
struct Cli {
    /// `text` for people, `lines` for `key: value` lines.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Lines,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Adaptive,
    /// Baker–Wüstholz gap.
    Bw,
    Matveev,
    /// The smaller of the two unconditional gaps.
    Unconditional,
    /// Lang–Waldschmidt conjecture (uses --eps and --c-const).
    Lw,
    /// Baker's refined ABC consequence (uses --k2-const).
    Abc,
}

#[derive(clap::Args)]
struct ModeArgs {
    #[arg(long, value_enum, default_value_t = Mode::Adaptive)]
    mode: Mode,
    /// ε of the Lang–Waldschmidt bound.
    #[arg(long, default_value = "1", value_parser = rational)]
    eps: BigRational,
    /// C of the Lang–Waldschmidt bound.
    #[arg(long = "c-const", default_value = "1", value_parser = rational)]
    c_const: BigRational,
    /// K″ of the ABC bound.
    #[arg(long = "k2-const", default_value = "1", value_parser = rational)]
    k2_const: BigRational,
    /// Precision cap of adaptive mode, in bits.
    #[arg(long, default_value_t = DEFAULT_MAX_BITS)]
    max_bits: u64,
}

impl ModeArgs {
    fn mode(&self) -> CompareMode {
        match self.mode {
            Mode::Adaptive => CompareMode::Adaptive { max_bits: self.max_bits },
            Mode::Bw => CompareMode::Unconditional(UnconditionalBound::BakerWustholz),
            Mode::Matveev => CompareMode::Unconditional(UnconditionalBound::Matveev),
            Mode::Unconditional => CompareMode::Unconditional(UnconditionalBound::Best),
            Mode::Lw => CompareMode::LangWaldschmidt { eps: self.eps.clone(), c: self.c_const.clone() },
            Mode::Abc => CompareMode::BakerAbc { k2: self.k2_const.clone() },
        }
    }
}

fn rational(s: &str) -> Result<BigRational, String> {
    parse_probability(s).ok_or_else(|| format!("`{s}` is not a fraction or decimal"))
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether two PoE numbers are equal. `@path` reads a file.
    Equal { lhs: String, rhs: String },
    /// Compare two PoE numbers and print a certificate.
    Compare {
        lhs: String,
        rhs: String,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Maximum-probability parse of a string.
    #[command(group(ArgGroup::new("how").args(["exact", "approx"])))]
    Parse {
        grammar: PathBuf,
        /// Space-separated (optionally quoted) terminals, or one character
        /// per terminal when there is no whitespace.
        input: String,
        /// Exact probability (the default).
        #[arg(long)]
        exact: bool,
        /// Approximate log₂ probability within the given tolerance.
        #[arg(long, value_name = "EPS", value_parser = rational)]
        approx: Option<BigRational>,
        /// Write the parse DAG here instead of standard output.
        #[arg(long)]
        dag_out: Option<PathBuf>,
        /// Precision cap for the comparisons of the exact parser.
        #[arg(long, default_value_t = DEFAULT_MAX_BITS)]
        max_bits: u64,
        /// Re-derive the DAG's yield and probability before printing.
        #[arg(long)]
        verify: bool,
    },
    /// Convert between arithmetic circuits and PoE text.
    #[command(group(ArgGroup::new("direction").required(true).args(["circuit_to_poe", "poe_to_circuit"])))]
    Convert {
        #[arg(long)]
        circuit_to_poe: bool,
        #[arg(long)]
        poe_to_circuit: bool,
        path: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Error already rendered for the user, with its exit code.
struct Failure(u8, String);

impl Failure {
    fn input(msg: impl Into<String>) -> Self {
        Failure(EXIT_ERROR, msg.into())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn poe_arg(which: &str, text: &str) -> Result<Poe, Failure> {
    let body = match text.strip_prefix('@') {
        Some(path) => read(Path::new(path))?,
        None => text.to_string(),
    };
    body.trim().parse().map_err(|e| Failure::input(format!("{which}: {e}")))
}

fn cmd_equal(format: Format, lhs: &str, rhs: &str) -> Result<u8, Failure> {
    let x = poe_arg("lhs", lhs)?;
    let y = poe_arg("rhs", rhs)?;
    let eq = x.equals(&y);
    let word = if eq { "EQUAL" } else { "NOT-EQUAL" };
    match format {
        Format::Text => println!("{word}"),
        Format::Lines => println!("verdict: {word}"),
    }
    Ok(if eq { 0 } else { EXIT_NO })
}

fn cmd_compare(format: Format, lhs: &str, rhs: &str, mode: &ModeArgs) -> Result<u8, Failure> {
    let x = poe_arg("lhs", lhs)?;
    let y = poe_arg("rhs", rhs)?;
    let out = compare(&x, &y, &mode.mode()).map_err(|e| {
        let hint = match e {
            CompareError::Gap(GapError::OverflowGuard { .. }) | CompareError::PrecisionTooLarge(_) => {
                "\nhint: the gap is too large to use; try --mode adaptive"
            }
            _ => "",
        };
        Failure::input(format!("{e}{hint}"))
    })?;
    match format {
        Format::Text => println!("{}", out.verdict),
        Format::Lines => println!("verdict: {}", out.verdict),
    }
    print!("{}", out.certificate);
    Ok(if out.verdict == Verdict::Unresolved { EXIT_UNRESOLVED } else { 0 })
}

fn scfg_failure(e: ScfgError) -> Failure {
    match e {
        ScfgError::Unresolved(bits) => {
            Failure(EXIT_UNRESOLVED, format!("comparison unresolved at {bits} bits; raise --max-bits"))
        }
        e => Failure::input(e.to_string()),
    }
}

fn verify(d: &ParseDag, g: &Scfg, w: &[usize]) -> Result<(), Failure> {
    let bad = |m: String| Failure::input(format!("verification failed: {m}"));
    d.validate(g).map_err(|e| bad(e.to_string()))?;
    let y = dag_yield(d, w.len()).map_err(|e| bad(e.to_string()))?;
    if y != w {
        return Err(bad("yield differs from the input".into()));
    }
    if !d.unfolded_prob(g).equals(d.prob()) {
        return Err(bad("DAG probability differs from the reported one".into()));
    }
    let n = to_snf(g).grammar().nonterminals().len();
    if exponent_sum(d, g) >= num_bigint::BigUint::from(2 * n * n) << n {
        return Err(bad("exponent sum reaches 2n²2ⁿ".into()));
    }
    Ok(())
}

fn emit_dag(format: Format, d: &ParseDag, g: &Scfg, out: Option<&Path>) -> Result<(), Failure> {
    let text = d.display(g).to_string();
    match (out, format) {
        (Some(p), Format::Text) => {
            write(p, &text)?;
            println!("dag written to {} ({} nodes)", p.display(), d.len());
        }
        (Some(p), Format::Lines) => {
            write(p, &text)?;
            println!("dag: {}", p.display());
            println!("nodes: {}", d.len());
        }
        (None, Format::Text) => print!("\n{text}"),
        (None, Format::Lines) => println!("nodes: {}", d.len()),
    }
    Ok(())
}

fn no_parse(format: Format) -> u8 {
    match format {
        Format::Text => println!("NO-PARSE"),
        Format::Lines => println!("verdict: NO-PARSE"),
    }
    EXIT_NO
}

#[allow(clippy::too_many_arguments)]
fn cmd_parse(
    format: Format,
    grammar: &Path,
    input: &str,
    approx: Option<&BigRational>,
    dag_out: Option<&Path>,
    max_bits: u64,
    check: bool,
) -> Result<u8, Failure> {
    let g: Scfg = read(grammar)?.parse().map_err(|e| Failure::input(format!("{}: {e}", grammar.display())))?;
    let Some(w) = g.tokenize(input) else { return Ok(no_parse(format)) };
    match approx {
        None => {
            let mode = CompareMode::Adaptive { max_bits };
            let res = parse_exact_with(&g, &w, &mode).map_err(scfg_failure)?;
            let (Some(p), Some(d)) = (res.prob, res.dag) else { return Ok(no_parse(format)) };
            if check {
                verify(&d, &g, &w)?;
            }
            match format {
                Format::Text => println!("prob = {p}"),
                Format::Lines => println!("verdict: PARSE\nprob: {p}"),
            }
            emit_dag(format, &d, &g, dag_out)?;
        }
        Some(eps) => {
            let res = approx_max_parse(&g, &w, eps).map_err(scfg_failure)?;
            let (Some(v), Some(d)) = (res.log2_prob, res.dag) else { return Ok(no_parse(format)) };
            if check {
                verify(&d, &g, &w)?;
            }
            match format {
                Format::Text => {
                    println!("log2 prob = {v} (about {:.6})", v.to_f64());
                    println!("bits = {}", res.precision_bits);
                    println!("parse prob = {}", d.prob());
                }
                Format::Lines => {
                    println!("verdict: PARSE");
                    println!("log2prob: {v}");
                    println!("bits: {}", res.precision_bits);
                    println!("prob: {}", d.prob());
                }
            }
            emit_dag(format, &d, &g, dag_out)?;
        }
    }
    Ok(0)
}

fn cmd_convert(format: Format, to_poe: bool, path: &Path, output: Option<&Path>) -> Result<u8, Failure> {
    let text = read(path)?;
    let out = if to_poe {
        let c: ArithmeticCircuit = text.parse().map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        let p = from_circuit(&c);
        match format {
            Format::Text => format!("{p}\n"),
            Format::Lines => format!("poe: {p}\n"),
        }
    } else {
        let p: Poe = text.trim().parse().map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        to_circuit(&p).to_string()
    };
    match output {
        Some(o) => write(o, &out)?,
        None => print!("{out}"),
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let f = cli.format;
    let result = match &cli.command {
        Command::Equal { lhs, rhs } => cmd_equal(f, lhs, rhs),
        Command::Compare { lhs, rhs, mode } => cmd_compare(f, lhs, rhs, mode),
        Command::Parse { grammar, input, exact: _, approx, dag_out, max_bits, verify } => {
            cmd_parse(f, grammar, input, approx.as_ref(), dag_out.as_deref(), *max_bits, *verify)
        }
        Command::Convert { circuit_to_poe, poe_to_circuit: _, path, output } => {
            cmd_convert(f, *circuit_to_poe, path, output.as_deref())
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
