//! Exhaustive and sampled verification of built networks against the big
//! integer oracles.
//!
//! A case passes only if every register ends where its contract says:
//! outputs match the oracle, inputs are preserved, and every scratch
//! register (carries, modulus copy, `t`, stage temporaries) is back to its
//! required value.

use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::circuit::Circuit;
use crate::oracle::{oracle_add, oracle_cmult, oracle_modadd, oracle_modexp, oracle_wrapping_sub};
use crate::sim::{
    decode, encode, run_basis_in_place, run_index, trace, RegisterValues, SimError, TraceStep,
};
use crate::synth::{reg, NetworkSpec, SynthError, SynthOptions};

/// Largest number of cases an exhaustive run may enumerate.
pub const DEFAULT_CASE_BUDGET: u128 = 1 << 24;
/// Widest circuit [`check_permutation`] will enumerate.
pub const MAX_ENUMERATION_WIRES: usize = 24;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("{cases} cases exceed the enumeration budget of {budget}; use random sampling")]
    BudgetExceeded { cases: u128, budget: u128 },
    #[error("{0} wires is too many to enumerate (limit {MAX_ENUMERATION_WIRES})")]
    TooManyWires(usize),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    Exhaustive,
    Random { samples: u64, seed: u64 },
}

/// A failing case with full register contents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub inputs: RegisterValues,
    pub expected: RegisterValues,
    pub actual: RegisterValues,
    /// Registers at each top-level block boundary. Filled for modular adder
    /// failures only.
    pub trace: Vec<TraceStep>,
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub spec: NetworkSpec,
    pub options: SynthOptions,
    pub sampling: Sampling,
    pub cases_run: u64,
    pub cases_failed: u64,
    /// Cases in which some scratch register did not return to its required
    /// value (a subset of the failures).
    pub cleanliness_violations: u64,
    /// The failing case that comes first in enumeration (or sampling) order.
    pub first_counterexample: Option<Counterexample>,
    pub elapsed: Duration,
}

/// Wall time is excluded: two runs with the same inputs compare equal.
impl PartialEq for VerificationReport {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
            && self.options == other.options
            && self.sampling == other.sampling
            && self.cases_run == other.cases_run
            && self.cases_failed == other.cases_failed
            && self.cleanliness_violations == other.cleanliness_violations
            && self.first_counterexample == other.first_counterexample
    }
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.cases_failed == 0
    }

    /// Machine-readable `key: value` lines.
    pub fn to_key_values(&self) -> String {
        let mut lines = vec![
            format!("network: {}", self.spec.kind()),
            format!("params: {}", self.spec),
            format!("swap_mode: {:?}", self.options.swap_mode).to_lowercase(),
            format!("carry_layout: {:?}", self.options.carry_layout).to_lowercase(),
        ];
        match self.sampling {
            Sampling::Exhaustive => lines.push("mode: exhaustive".into()),
            Sampling::Random { samples, seed } => {
                lines.push("mode: random".into());
                lines.push(format!("samples: {samples}"));
                lines.push(format!("seed: {seed}"));
            }
        }
        lines.push(format!("cases_run: {}", self.cases_run));
        lines.push(format!("cases_failed: {}", self.cases_failed));
        lines.push(format!(
            "cleanliness_violations: {}",
            self.cleanliness_violations
        ));
        match &self.first_counterexample {
            None => lines.push("counterexample: none".into()),
            Some(cx) => {
                lines.push(format!("counterexample_inputs: {}", cx.inputs.compact()));
                lines.push(format!(
                    "counterexample_expected: {}",
                    cx.expected.compact()
                ));
                lines.push(format!("counterexample_actual: {}", cx.actual.compact()));
                for step in &cx.trace {
                    lines.push(format!(
                        "counterexample_trace: {} @{}: {}",
                        step.label,
                        step.gates_applied,
                        step.registers.compact()
                    ));
                }
            }
        }
        lines.push(format!(
            "wall_time_ms: {:.3}",
            self.elapsed.as_secs_f64() * 1e3
        ));
        lines.push(format!(
            "verdict: {}",
            if self.passed() { "pass" } else { "fail" }
        ));
        lines.join("\n") + "\n"
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mode = match self.sampling {
            Sampling::Exhaustive => "exhaustive".to_string(),
            Sampling::Random { samples, seed } => {
                format!("random ({samples} samples, seed {seed})")
            }
        };
        writeln!(f, "{:<24}{}", "network", self.spec)?;
        writeln!(f, "{:<24}{}", "mode", mode)?;
        writeln!(f, "{:<24}{}", "cases run", self.cases_run)?;
        writeln!(f, "{:<24}{}", "cases failed", self.cases_failed)?;
        writeln!(
            f,
            "{:<24}{}",
            "unclean scratch", self.cleanliness_violations
        )?;
        writeln!(
            f,
            "{:<24}{:.1} ms",
            "wall time",
            self.elapsed.as_secs_f64() * 1e3
        )?;
        if let Some(cx) = &self.first_counterexample {
            writeln!(f, "first counterexample\n input:\n{}", cx.inputs)?;
            writeln!(f, " expected:\n{}", cx.expected)?;
            writeln!(f, " actual:\n{}", cx.actual)?;
            for step in &cx.trace {
                writeln!(
                    f,
                    " after `{}` ({} gates):\n{}",
                    step.label, step.gates_applied, step.registers
                )?;
            }
        }
        write!(
            f,
            "{:<24}{}",
            "verdict",
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

type Assignment = Vec<(&'static str, BigUint)>;

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

/// Number of legal input tuples.
pub fn case_count(spec: &NetworkSpec) -> u128 {
    let pow2 = |bits: usize| {
        if bits >= 128 {
            u128::MAX
        } else {
            1u128 << bits
        }
    };
    match spec {
        NetworkSpec::Adder(s) | NetworkSpec::Subtractor(s) => pow2(2 * s.n),
        NetworkSpec::ModularAdder(s) => (s.modulus as u128).pow(2),
        NetworkSpec::ControlledMultiplier(s) => pow2(s.n + 1),
        NetworkSpec::ModularExponentiation(s) => pow2(s.exp_bits),
    }
}

/// Input registers of the `index`-th case in lexicographic order.
fn case_at(spec: &NetworkSpec, index: u64) -> Assignment {
    match *spec {
        NetworkSpec::Adder(s) | NetworkSpec::Subtractor(s) => {
            vec![
                (reg::A, big(index >> s.n)),
                (reg::B, big(index & ((1 << s.n) - 1))),
            ]
        }
        NetworkSpec::ModularAdder(s) => vec![
            (reg::A, big(index / s.modulus)),
            (reg::B, big(index % s.modulus)),
            (reg::MODULUS, big(s.modulus)),
        ],
        NetworkSpec::ControlledMultiplier(s) => vec![
            (reg::CONTROL, big(index >> s.n)),
            (reg::X, big(index & ((1 << s.n) - 1))),
            (reg::MODULUS, big(s.modulus)),
        ],
        NetworkSpec::ModularExponentiation(_) => {
            vec![(reg::X, big(index)), (reg::RESULT, BigUint::one())]
        }
    }
}

fn random_case(spec: &NetworkSpec, rng: &mut ChaCha8Rng) -> Assignment {
    match *spec {
        NetworkSpec::Adder(s) | NetworkSpec::Subtractor(s) => vec![
            (reg::A, rng.gen_biguint(s.n as u64)),
            (reg::B, rng.gen_biguint(s.n as u64)),
        ],
        NetworkSpec::ModularAdder(s) => vec![
            (reg::A, big(rng.gen_range(0..s.modulus))),
            (reg::B, big(rng.gen_range(0..s.modulus))),
            (reg::MODULUS, big(s.modulus)),
        ],
        NetworkSpec::ControlledMultiplier(s) => vec![
            (reg::CONTROL, big(rng.gen_range(0..2))),
            (reg::X, rng.gen_biguint(s.n as u64)),
            (reg::MODULUS, big(s.modulus)),
        ],
        NetworkSpec::ModularExponentiation(s) => vec![
            (reg::X, rng.gen_biguint(s.exp_bits as u64)),
            (reg::RESULT, BigUint::one()),
        ],
    }
}

fn input<'a>(inputs: &'a Assignment, name: &str) -> &'a BigUint {
    &inputs
        .iter()
        .find(|(n, _)| *n == name)
        .expect("input present")
        .1
}

/// Required final value of every non-zero register; registers not listed
/// must end at zero. The second list names the registers whose mismatch is
/// a cleanliness violation.
fn expectation(spec: &NetworkSpec, inputs: &Assignment) -> (Assignment, &'static [&'static str]) {
    match *spec {
        NetworkSpec::Adder(_) => {
            let (a, b) = (input(inputs, reg::A), input(inputs, reg::B));
            (
                vec![(reg::A, a.clone()), (reg::B, oracle_add(a, b))],
                &[reg::CARRY],
            )
        }
        NetworkSpec::Subtractor(s) => {
            let (x, y) = (input(inputs, reg::A), input(inputs, reg::B));
            (
                vec![
                    (reg::A, x.clone()),
                    (reg::B, oracle_wrapping_sub(y, x, s.n + 1)),
                ],
                &[reg::CARRY],
            )
        }
        NetworkSpec::ModularAdder(s) => {
            let (a, b) = (input(inputs, reg::A), input(inputs, reg::B));
            (
                vec![
                    (reg::A, a.clone()),
                    (reg::B, oracle_modadd(a, b, &big(s.modulus))),
                    (reg::MODULUS, big(s.modulus)),
                ],
                &[reg::CARRY, reg::MODULUS, reg::T],
            )
        }
        NetworkSpec::ControlledMultiplier(s) => {
            let (c, x) = (input(inputs, reg::CONTROL), input(inputs, reg::X));
            let result = oracle_cmult(!c.is_zero(), x, &big(s.multiplier), &big(s.modulus));
            (
                vec![
                    (reg::CONTROL, c.clone()),
                    (reg::X, x.clone()),
                    (reg::RESULT, result),
                    (reg::MODULUS, big(s.modulus)),
                ],
                &[reg::ADDEND, reg::CARRY, reg::MODULUS, reg::T],
            )
        }
        NetworkSpec::ModularExponentiation(s) => {
            let x = input(inputs, reg::X);
            (
                vec![
                    (reg::X, x.clone()),
                    (reg::RESULT, oracle_modexp(&big(s.base), x, &big(s.modulus))),
                ],
                &[reg::ACC, reg::ADDEND, reg::CARRY, reg::MODULUS, reg::T],
            )
        }
    }
}

struct Harness {
    spec: NetworkSpec,
    circuit: Circuit,
}

#[derive(Default)]
struct Tally {
    run: u64,
    failed: u64,
    unclean: u64,
    first: Option<(u64, Counterexample)>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.run += other.run;
        self.failed += other.failed;
        self.unclean += other.unclean;
        self.first = match (self.first, other.first) {
            (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
            (a, b) => a.or(b),
        };
        self
    }
}

impl Harness {
    fn new(spec: &NetworkSpec, options: SynthOptions) -> Result<Self, VerifyError> {
        Ok(Self {
            spec: *spec,
            circuit: spec.build(options)?,
        })
    }

    fn values(&self, assignment: &Assignment) -> RegisterValues {
        let state = encode(self.circuit.layout(), assignment.iter().cloned())
            .expect("inputs fit their registers");
        decode(self.circuit.layout(), &state).expect("widths agree")
    }

    fn check(
        &self,
        mut tally: Tally,
        index: u64,
        inputs: &Assignment,
    ) -> Result<Tally, VerifyError> {
        let layout = self.circuit.layout();
        let mut state = encode(layout, inputs.iter().cloned())?;
        let initial = state.clone();
        run_basis_in_place(&self.circuit, &mut state)?;
        let actual = decode(layout, &state)?;

        let (expected, scratch) = expectation(&self.spec, inputs);
        let zero = BigUint::zero();
        let mut failed = false;
        let mut unclean = false;
        for (name, got) in actual.iter() {
            let want = expected
                .iter()
                .find(|(n, _)| *n == name)
                .map_or(&zero, |(_, v)| v);
            if got != want {
                failed = true;
                unclean |= scratch.contains(&name);
            }
        }

        tally.run += 1;
        if failed {
            tally.failed += 1;
            tally.unclean += unclean as u64;
            if tally.first.as_ref().is_none_or(|(i, _)| index < *i) {
                let trace = match self.spec {
                    NetworkSpec::ModularAdder(_) => trace(&self.circuit, &initial, 0)?,
                    _ => Vec::new(),
                };
                let cx = Counterexample {
                    inputs: self.values(inputs),
                    expected: self.values(&expected),
                    actual,
                    trace,
                };
                tally.first = Some((index, cx));
            }
        }
        Ok(tally)
    }

    fn report(
        &self,
        options: SynthOptions,
        sampling: Sampling,
        tally: Tally,
        started: Instant,
    ) -> VerificationReport {
        VerificationReport {
            spec: self.spec,
            options,
            sampling,
            cases_run: tally.run,
            cases_failed: tally.failed,
            cleanliness_violations: tally.unclean,
            first_counterexample: tally.first.map(|(_, cx)| cx),
            elapsed: started.elapsed(),
        }
    }
}

/// Runs every legal input of `spec` through the network built with
/// `options`.
pub fn verify_exhaustive(
    spec: &NetworkSpec,
    options: SynthOptions,
    budget: u128,
) -> Result<VerificationReport, VerifyError> {
    let cases = case_count(spec);
    if cases > budget {
        return Err(VerifyError::BudgetExceeded { cases, budget });
    }
    let started = Instant::now();
    let harness = Harness::new(spec, options)?;
    let tally = (0..cases as u64)
        .into_par_iter()
        .try_fold(Tally::default, |t, i| {
            harness.check(t, i, &case_at(spec, i))
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    Ok(harness.report(options, Sampling::Exhaustive, tally, started))
}

/// Checks `samples` inputs drawn from a ChaCha8 stream seeded with `seed`.
pub fn verify_random(
    spec: &NetworkSpec,
    options: SynthOptions,
    samples: u64,
    seed: u64,
) -> Result<VerificationReport, VerifyError> {
    let started = Instant::now();
    let harness = Harness::new(spec, options)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases: Vec<Assignment> = (0..samples).map(|_| random_case(spec, &mut rng)).collect();
    let tally = cases
        .par_iter()
        .enumerate()
        .try_fold(Tally::default, |t, (i, c)| harness.check(t, i as u64, c))
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    Ok(harness.report(options, Sampling::Random { samples, seed }, tally, started))
}

/// Whether the circuit maps basis states injectively, by full enumeration.
pub fn check_permutation(circuit: &Circuit) -> Result<bool, VerifyError> {
    let w = circuit.num_wires();
    if w > MAX_ENUMERATION_WIRES {
        return Err(VerifyError::TooManyWires(w));
    }
    let images: Vec<u64> = (0..1u64 << w)
        .into_par_iter()
        .map(|i| run_index(circuit, i))
        .collect::<Result<_, _>>()?;
    let mut seen = vec![false; images.len()];
    for img in images {
        if std::mem::replace(&mut seen[img as usize], true) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether the circuit followed by its reverse fixes every basis state.
pub fn check_reversal(circuit: &Circuit) -> Result<bool, VerifyError> {
    let w = circuit.num_wires();
    if w > MAX_ENUMERATION_WIRES {
        return Err(VerifyError::TooManyWires(w));
    }
    let round_trip = circuit
        .concat(&circuit.reverse())
        .expect("a circuit and its reverse share wires and layout");
    (0..1u64 << w)
        .into_par_iter()
        .map(|i| run_index(&round_trip, i).map(|o| o == i))
        .try_reduce(|| true, |a, b| Ok(a && b))
        .map_err(Into::into)
}
