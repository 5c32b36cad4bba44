//! Three-way comparison of PoE numbers.
//!
//! Equality is settled exactly by gcd refinement. Otherwise the sign of
//! `Λ = ln x − ln y` is read off a certified approximation: either at a
//! precision guaranteed by a gap bound, or adaptively by doubling the
//! precision until the approximation clears its own error band.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

use crate::circuit::ArithmeticCircuit;
use crate::dyadic::Dyadic;
use crate::gap::{self, GapBound, GapError, GapLimits};
use crate::logform::{linear_form_approx, LinearForm};
use crate::poe::Poe;

pub const DEFAULT_MAX_BITS: u64 = 1 << 20;

/// First precision tried by every escalation schedule.
const START_BITS: u64 = 64;

/// Largest precision a gap-mode comparison will actually spend.
const GAP_WORK_CAP: u64 = 1 << 31;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum UnconditionalBound {
    /// The smaller of the two.
    #[default]
    Best,
    BakerWustholz,
    Matveev,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CompareMode {
    Unconditional(UnconditionalBound),
    LangWaldschmidt { eps: BigRational, c: BigRational },
    BakerAbc { k2: BigRational },
    Adaptive { max_bits: u64 },
}

impl Default for CompareMode {
    fn default() -> Self {
        CompareMode::Adaptive { max_bits: DEFAULT_MAX_BITS }
    }
}

impl CompareMode {
    /// Conjectural regimes with the default constant 1.
    pub fn lang_waldschmidt_default() -> Self {
        CompareMode::LangWaldschmidt { eps: BigRational::one(), c: BigRational::one() }
    }

    pub fn baker_abc_default() -> Self {
        CompareMode::BakerAbc { k2: BigRational::one() }
    }
}

impl fmt::Display for CompareMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompareMode::Unconditional(UnconditionalBound::Best) => write!(f, "unconditional"),
            CompareMode::Unconditional(UnconditionalBound::BakerWustholz) => write!(f, "bw"),
            CompareMode::Unconditional(UnconditionalBound::Matveev) => write!(f, "matveev"),
            CompareMode::LangWaldschmidt { eps, c } => write!(f, "lw(eps={eps}, C={c})"),
            CompareMode::BakerAbc { k2 } => write!(f, "abc(K''={k2})"),
            CompareMode::Adaptive { max_bits } => write!(f, "adaptive(max_bits={max_bits})"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompareError {
    #[error(transparent)]
    Gap(#[from] GapError),
    #[error("adaptive mode needs max_bits >= 64, got {0}")]
    MaxBitsTooSmall(u64),
    #[error("certifying the sign would need {0} bits of precision; use adaptive mode instead")]
    PrecisionTooLarge(BigUint),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Less,
    Equal,
    Greater,
    Unresolved,
}

impl Verdict {
    pub fn ordering(self) -> Option<Ordering> {
        match self {
            Verdict::Less => Some(Ordering::Less),
            Verdict::Equal => Some(Ordering::Equal),
            Verdict::Greater => Some(Ordering::Greater),
            Verdict::Unresolved => None,
        }
    }

    pub fn reverse(self) -> Verdict {
        match self {
            Verdict::Less => Verdict::Greater,
            Verdict::Greater => Verdict::Less,
            v => v,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Less => "LESS",
            Verdict::Equal => "EQUAL",
            Verdict::Greater => "GREATER",
            Verdict::Unresolved => "UNRESOLVED",
        })
    }
}

/// How a verdict was reached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub mode: String,
    /// Final precision of the logarithm phase; 0 when equality was decided
    /// exactly.
    pub precision_bits: u64,
    pub gap_bits: Option<BigUint>,
    /// Last approximation of `ln x − ln y`.
    pub approximation: Option<Dyadic>,
    /// Every precision tried, in order.
    pub schedule: Vec<u64>,
    pub notes: Vec<String>,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mode: {}", self.mode)?;
        writeln!(f, "bits: {}", self.precision_bits)?;
        match &self.gap_bits {
            Some(g) => writeln!(f, "gap: {g}")?,
            None => writeln!(f, "gap: none")?,
        }
        if let Some(v) = &self.approximation {
            writeln!(f, "approx: {v}")?;
        }
        let sched: Vec<String> = self.schedule.iter().map(u64::to_string).collect();
        writeln!(f, "schedule: {}", sched.join(","))?;
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompareOutcome {
    pub verdict: Verdict,
    pub certificate: Certificate,
}

/// Compares the values of `x` and `y`.
pub fn compare(x: &Poe, y: &Poe, mode: &CompareMode) -> Result<CompareOutcome, CompareError> {
    if let CompareMode::Adaptive { max_bits } = mode {
        if *max_bits < START_BITS {
            return Err(CompareError::MaxBitsTooSmall(*max_bits));
        }
    }
    let mut cert = Certificate {
        mode: mode.to_string(),
        precision_bits: 0,
        gap_bits: None,
        approximation: None,
        schedule: Vec::new(),
        notes: Vec::new(),
    };
    if x.equals(y) {
        cert.notes.push("equal by gcd refinement".into());
        return Ok(CompareOutcome { verdict: Verdict::Equal, certificate: cert });
    }
    let form = LinearForm::from_poe(&x.div(y));
    let verdict = match mode {
        CompareMode::Adaptive { max_bits } => adaptive(&form, *max_bits, &mut cert),
        _ => {
            let g = gap_for(&form, mode)?;
            if g.clamped {
                cert.notes.push("max |b| = 1: log factor clamped to 1".into());
            }
            cert.gap_bits = Some(g.log2_gap.clone());
            with_gap(&form, &g.log2_gap, &mut cert)?
        }
    };
    Ok(CompareOutcome { verdict, certificate: cert })
}

/// Compares the outputs of two circuits through their PoE forms.
pub fn compare_circuit(
    cx: &ArithmeticCircuit,
    cy: &ArithmeticCircuit,
    mode: &CompareMode,
) -> Result<CompareOutcome, CompareError> {
    compare(&cx.to_poe(), &cy.to_poe(), mode)
}

fn gap_for(form: &LinearForm, mode: &CompareMode) -> Result<GapBound, GapError> {
    // the bound is only consulted lazily, so its size is not capped here
    let limits = GapLimits::unlimited();
    match mode {
        CompareMode::Unconditional(UnconditionalBound::Best) => gap::unconditional_gap(form, limits),
        CompareMode::Unconditional(UnconditionalBound::BakerWustholz) => gap::bw_gap(form, limits),
        CompareMode::Unconditional(UnconditionalBound::Matveev) => gap::matveev_gap(form, limits),
        CompareMode::LangWaldschmidt { eps, c } => gap::lw_gap(form, eps, c),
        CompareMode::BakerAbc { k2 } => gap::baker_abc_gap(form, k2),
        CompareMode::Adaptive { .. } => unreachable!("adaptive mode has no gap"),
    }
}

/// Approximates at `j` bits and reports the sign if `|v| > 2^{1-j}`.
fn certified_sign(form: &LinearForm, j: u64, cert: &mut Certificate) -> Option<Verdict> {
    let v = linear_form_approx(form, j).expect("validated form").into_dyadic();
    cert.schedule.push(j);
    cert.precision_bits = j;
    let clear = v.abs_exceeds_pow2(1 - j as i64);
    let sign = if v.is_negative() { Verdict::Less } else { Verdict::Greater };
    cert.approximation = Some(v);
    clear.then_some(sign)
}

fn adaptive(form: &LinearForm, max_bits: u64, cert: &mut Certificate) -> Verdict {
    let mut j = START_BITS;
    while j <= max_bits {
        if let Some(s) = certified_sign(form, j, cert) {
            return s;
        }
        j = j.saturating_mul(2);
    }
    cert.notes.push(format!("sign not certified within {max_bits} bits"));
    Verdict::Unresolved
}

/// Escalates like adaptive mode but stops at `g + 1` bits, where the gap
/// guarantees the sign of any approximation: `|Λ| ≥ 2^{-g}` and the error
/// is below `2^{-(g+1)}`, so `v ≥ 0` means `Λ > 0`.
fn with_gap(form: &LinearForm, g: &BigUint, cert: &mut Certificate) -> Result<Verdict, CompareError> {
    let target = g + 1u32;
    let mut j = START_BITS;
    while BigUint::from(j) < target {
        if let Some(s) = certified_sign(form, j, cert) {
            return Ok(s);
        }
        j *= 2;
    }
    let final_bits: u64 = match u64::try_from(&target) {
        Ok(t) if t <= GAP_WORK_CAP => t,
        _ => return Err(CompareError::PrecisionTooLarge(target)),
    };
    let v = linear_form_approx(form, final_bits).expect("validated form").into_dyadic();
    cert.schedule.push(final_bits);
    cert.precision_bits = final_bits;
    let verdict = if v.is_negative() { Verdict::Less } else { Verdict::Greater };
    cert.approximation = Some(v);
    cert.notes.push("sign fixed by gap bound".into());
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn p(pairs: &[(u64, i64)]) -> Poe {
        Poe::from_pairs(pairs.iter().map(|&(b, e)| (BigUint::from(b), BigInt::from(e))))
    }

    fn all_modes() -> Vec<CompareMode> {
        vec![
            CompareMode::default(),
            CompareMode::Unconditional(UnconditionalBound::Best),
            CompareMode::Unconditional(UnconditionalBound::BakerWustholz),
            CompareMode::Unconditional(UnconditionalBound::Matveev),
            CompareMode::lang_waldschmidt_default(),
            CompareMode::baker_abc_default(),
        ]
    }

    #[test]
    fn small_examples() {
        for m in all_modes() {
            assert_eq!(compare(&p(&[(2, 10)]), &p(&[(3, 6)]), &m).unwrap().verdict, Verdict::Greater, "{m}");
            assert_eq!(compare(&p(&[(3, 6)]), &p(&[(2, 10)]), &m).unwrap().verdict, Verdict::Less, "{m}");
            let eq = compare(&p(&[(2, 6), (3, 3)]), &p(&[(12, 3)]), &m).unwrap();
            assert_eq!(eq.verdict, Verdict::Equal);
            assert_eq!(eq.certificate.precision_bits, 0);
        }
    }

    #[test]
    fn convergent_pair_escalates() {
        // 3^140803 vs 5^96113: q ln 3 − p ln 5 ≈ +3.56e-6
        let out = compare(&p(&[(3, 140_803)]), &p(&[(5, 96_113)]), &CompareMode::default()).unwrap();
        assert_eq!(out.verdict, Verdict::Greater);
        assert!(!out.certificate.schedule.is_empty());
    }

    #[test]
    fn tiny_cap_is_unresolved() {
        // ln((2^80 + 1)/2^80) ≈ 2^-80
        let x = Poe::from_integer(&((BigUint::one() << 80u32) + BigUint::one())).unwrap();
        let y = p(&[(2, 80)]);
        let out = compare(&x, &y, &CompareMode::Adaptive { max_bits: 64 }).unwrap();
        assert_eq!(out.verdict, Verdict::Unresolved);
        let out = compare(&x, &y, &CompareMode::default()).unwrap();
        assert_eq!(out.verdict, Verdict::Greater);
        assert!(compare(&x, &y, &CompareMode::Adaptive { max_bits: 63 }).is_err());
    }

    #[test]
    fn circuits() {
        let c1: ArithmeticCircuit = "g0 = input 2\ng1 = mul g0 g0\noutput g1\n".parse().unwrap();
        let c2: ArithmeticCircuit = "g0 = input 5\noutput g0\n".parse().unwrap();
        let m = CompareMode::default();
        assert_eq!(compare_circuit(&c1, &c1, &m).unwrap().verdict, Verdict::Equal);
        assert_eq!(compare_circuit(&c1, &c2, &m).unwrap().verdict, Verdict::Less);

        // 2^(2^10) vs 3^648: 648·log₂3 ≈ 1027.03 > 1024
        let mut text = String::from("g0 = input 2\n");
        for k in 0..10 {
            text.push_str(&format!("g{} = mul g{k} g{k}\n", k + 1));
        }
        text.push_str("output g10\n");
        let chain: ArithmeticCircuit = text.parse().unwrap();
        let three = p(&[(3, 648)]).to_circuit();
        assert_eq!(compare_circuit(&chain, &three, &m).unwrap().verdict, Verdict::Less);
    }

    fn small_poe() -> impl Strategy<Value = Poe> {
        prop::collection::vec((2u64..50, -12i64..=12), 0..4).prop_map(|v| p(&v))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn agrees_with_exact_values(x in small_poe(), y in small_poe()) {
            let want = x.eval_exact(4096).unwrap().cmp(&y.eval_exact(4096).unwrap());
            for m in all_modes() {
                let got = compare(&x, &y, &m).unwrap();
                prop_assert_eq!(got.verdict.ordering(), Some(want));
                let back = compare(&y, &x, &m).unwrap();
                prop_assert_eq!(back.verdict, got.verdict.reverse());
                if got.verdict == Verdict::Equal {
                    prop_assert_eq!(got.certificate.precision_bits, 0);
                }
            }
            prop_assert_eq!(compare(&x, &x, &CompareMode::default()).unwrap().verdict, Verdict::Equal);
        }

        #[test]
        fn certification_is_monotone(x in small_poe(), y in small_poe()) {
            let out = compare(&x, &y, &CompareMode::default()).unwrap();
            if let (Verdict::Less | Verdict::Greater, Some(&j)) = (out.verdict, out.certificate.schedule.last()) {
                let form = LinearForm::from_poe(&x.div(&y));
                for k in [j, j * 2, j * 4] {
                    let mut c = out.certificate.clone();
                    prop_assert_eq!(certified_sign(&form, k, &mut c), Some(out.verdict));
                }
            }
        }
    }
}
