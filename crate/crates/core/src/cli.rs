//! Command-line front end: `build`, `simulate`, `verify`, `resources`.
//!
//! Exit codes: 0 success, 1 verification counterexample, 2 usage or
//! parameter error, 3 I/O or parse error.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::Num;
use thiserror::Error;

use crate::circuit::{parse, serialize, Circuit, GateCounts, RegisterLayout};
use crate::resources::{
    modexp_qubits, representative_spec, resource_report, scaling_sweep, theoretical_counts,
    QubitBreakdown, ResourceError,
};
use crate::sim::{decode, encode, run_basis, run_sparse, trace, BasisState, SimError, SparseState};
use crate::synth::{
    reg, AdderSpec, CMultSpec, CarryLayout, ModAdderSpec, ModExpSpec, NetworkKind, NetworkSpec,
    SwapMode, SynthError, SynthOptions,
};
use crate::verify::{verify_exhaustive, verify_random, VerifyError, DEFAULT_CASE_BUDGET};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Resource(#[from] ResourceError),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: {source}")]
    Parse {
        path: String,
        source: crate::circuit::ParseError,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Csv(_) => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qarith",
    version,
    about = "Reversible arithmetic network synthesis, simulation and verification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize a network and write it in the QCIRC v1 text format.
    Build {
        #[arg(value_enum)]
        kind: Kind,
        #[command(flatten)]
        net: NetworkArgs,
        /// Output file; the circuit goes to stdout when omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run a network (built inline or read from a file) on register values.
    Simulate {
        #[arg(value_enum)]
        kind: Option<Kind>,
        #[command(flatten)]
        net: NetworkArgs,
        /// Read the circuit from a QCIRC file instead of building it.
        #[arg(long, conflicts_with = "kind")]
        circuit: Option<PathBuf>,
        /// Register assignment shared by every term, e.g. `x=3` or `b=0b101`.
        #[arg(long = "set", value_name = "REG=VALUE")]
        set: Vec<String>,
        /// One superposition term: `reg=v[,reg=v...][@re[:im]]`. Without
        /// amplitudes the terms are weighted equally.
        #[arg(long = "term", value_name = "TERM")]
        terms: Vec<String>,
        /// Print registers at block boundaries.
        #[arg(long)]
        trace: bool,
        /// Deepest block nesting level reported by --trace.
        #[arg(long, default_value_t = 0)]
        trace_depth: usize,
    },
    /// Compare a network against the arithmetic oracle.
    Verify {
        #[arg(value_enum)]
        kind: Kind,
        #[command(flatten)]
        net: NetworkArgs,
        /// Sample inputs instead of enumerating them.
        #[arg(long)]
        random: bool,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Maximum number of cases an exhaustive run may enumerate.
        #[arg(long, default_value_t = DEFAULT_CASE_BUDGET)]
        budget: u128,
        /// Print `key: value` lines instead of a table.
        #[arg(long)]
        kv: bool,
    },
    /// Report gate counts, qubit usage and scaling.
    Resources {
        #[arg(value_enum)]
        kind: Kind,
        #[command(flatten)]
        net: NetworkArgs,
        /// Size range `LO..HI` (inclusive) for a scaling sweep.
        #[arg(long, value_name = "LO..HI")]
        sweep: Option<String>,
        /// Write the sweep table as CSV to this file.
        #[arg(long, requires = "sweep")]
        csv: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Adder,
    Subtractor,
    Modadd,
    Cmult,
    Modexp,
}

impl From<Kind> for NetworkKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Adder => NetworkKind::Adder,
            Kind::Subtractor => NetworkKind::Subtractor,
            Kind::Modadd => NetworkKind::ModularAdder,
            Kind::Cmult => NetworkKind::ControlledMultiplier,
            Kind::Modexp => NetworkKind::ModularExponentiation,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct NetworkArgs {
    /// Bit width (defaults to the bit length of N for modular networks).
    #[arg(long)]
    pub n: Option<usize>,
    /// Exponent width for modexp (defaults to 2n).
    #[arg(long)]
    pub m: Option<usize>,
    /// Multiplier (cmult) or base (modexp).
    #[arg(long)]
    pub a: Option<u64>,
    /// Modulus.
    #[arg(long = "N", value_name = "N")]
    pub modulus: Option<u64>,
    /// Realize register swaps by relabeling wires instead of CNOTs.
    #[arg(long)]
    pub relabel_swaps: bool,
    /// Use an n-wire carry register instead of n-1.
    #[arg(long)]
    pub uniform_carry: bool,
}

impl NetworkArgs {
    fn options(&self) -> SynthOptions {
        SynthOptions {
            swap_mode: if self.relabel_swaps {
                SwapMode::Relabel
            } else {
                SwapMode::Gates
            },
            carry_layout: if self.uniform_carry {
                CarryLayout::Uniform
            } else {
                CarryLayout::Compact
            },
        }
    }

    fn modulus(&self) -> Result<u64, CliError> {
        self.modulus
            .ok_or_else(|| CliError::Usage("this network needs a modulus (--N)".into()))
    }

    fn multiplier(&self) -> Result<u64, CliError> {
        self.a
            .ok_or_else(|| CliError::Usage("this network needs a multiplier or base (--a)".into()))
    }

    fn width_for(&self, modulus: u64) -> usize {
        self.n
            .unwrap_or((u64::BITS - modulus.leading_zeros()) as usize)
    }

    fn spec(&self, kind: Kind) -> Result<NetworkSpec, CliError> {
        let need_n = || {
            self.n
                .ok_or_else(|| CliError::Usage("this network needs a bit width (--n)".into()))
        };
        Ok(match kind {
            Kind::Adder => NetworkSpec::Adder(AdderSpec::new(need_n()?)?),
            Kind::Subtractor => NetworkSpec::Subtractor(AdderSpec::new(need_n()?)?),
            Kind::Modadd => {
                let modulus = self.modulus()?;
                NetworkSpec::ModularAdder(ModAdderSpec::new(self.width_for(modulus), modulus)?)
            }
            Kind::Cmult => {
                let modulus = self.modulus()?;
                NetworkSpec::ControlledMultiplier(CMultSpec::new(
                    self.width_for(modulus),
                    self.multiplier()?,
                    modulus,
                )?)
            }
            Kind::Modexp => {
                let modulus = self.modulus()?;
                let n = self.width_for(modulus);
                NetworkSpec::ModularExponentiation(ModExpSpec::new(
                    n,
                    self.m.unwrap_or(2 * n),
                    self.multiplier()?,
                    modulus,
                )?)
            }
        })
    }
}

/// Register values a freshly built network expects besides the data
/// inputs: the modulus copy for modular adders and multipliers, and the
/// initial product 1 for exponentiation.
pub fn preset_values(spec: &NetworkSpec) -> Vec<(&'static str, BigUint)> {
    match spec {
        NetworkSpec::ModularAdder(s) => vec![(reg::MODULUS, s.modulus.into())],
        NetworkSpec::ControlledMultiplier(s) => vec![(reg::MODULUS, s.modulus.into())],
        NetworkSpec::ModularExponentiation(_) => vec![(reg::RESULT, 1u32.into())],
        NetworkSpec::Adder(_) | NetworkSpec::Subtractor(_) => Vec::new(),
    }
}

/// Parses a decimal, `0b` binary or `0x` hexadecimal value.
pub fn parse_value(text: &str) -> Result<BigUint, String> {
    let (digits, radix) = if let Some(d) = text.strip_prefix("0b") {
        (d, 2)
    } else if let Some(d) = text.strip_prefix("0x") {
        (d, 16)
    } else {
        (text, 10)
    };
    BigUint::from_str_radix(&digits.replace('_', ""), radix)
        .map_err(|_| format!("invalid value `{text}`"))
}

fn parse_assignment(text: &str) -> Result<(String, BigUint), CliError> {
    let (name, value) = text
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("expected REG=VALUE, got `{text}`")))?;
    Ok((
        name.trim().to_owned(),
        parse_value(value.trim()).map_err(CliError::Usage)?,
    ))
}

fn parse_amplitude(text: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::Usage(format!("invalid amplitude `{text}`"));
    let (re, im) = text.split_once(':').unwrap_or((text, "0"));
    Ok(Complex64::new(
        re.trim().parse().map_err(|_| bad())?,
        im.trim().parse().map_err(|_| bad())?,
    ))
}

struct Term {
    values: Vec<(String, BigUint)>,
    amplitude: Option<Complex64>,
}

fn parse_term(text: &str) -> Result<Term, CliError> {
    let (body, amp) = match text.split_once('@') {
        Some((b, a)) => (b, Some(parse_amplitude(a)?)),
        None => (text, None),
    };
    let values = body
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(parse_assignment)
        .collect::<Result<_, _>>()?;
    Ok(Term {
        values,
        amplitude: amp,
    })
}

/// Later assignments override earlier ones for the same register.
fn merge(layers: &[&[(String, BigUint)]]) -> Vec<(String, BigUint)> {
    let mut out: Vec<(String, BigUint)> = Vec::new();
    for layer in layers {
        for (name, v) in layer.iter() {
            match out.iter_mut().find(|(n, _)| n == name) {
                Some(slot) => slot.1 = v.clone(),
                None => out.push((name.clone(), v.clone())),
            }
        }
    }
    out
}

fn encode_values(
    layout: &RegisterLayout,
    values: &[(String, BigUint)],
) -> Result<BasisState, CliError> {
    Ok(encode(
        layout,
        values.iter().map(|(n, v)| (n.as_str(), v.clone())),
    )?)
}

fn read_circuit(path: &PathBuf) -> Result<Circuit, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text).map_err(|source| CliError::Parse {
        path: path.display().to_string(),
        source,
    })
}

fn write_file(path: &PathBuf, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn layout_table(layout: &RegisterLayout) -> String {
    let mut s = String::from("  register  role          first width\n");
    for r in layout.registers() {
        s += &format!(
            "  {:<10}{:<14}{:>5}{:>6}\n",
            r.name,
            r.role.name(),
            r.start,
            r.width
        );
    }
    s
}

fn counts_line(counts: &GateCounts) -> String {
    format!("gates: {counts}")
}

fn parse_sweep(text: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Usage(format!("expected LO..HI, got `{text}`"));
    let (lo, hi) = text.split_once("..").ok_or_else(bad)?;
    let hi = hi.strip_prefix('=').unwrap_or(hi);
    let lo: usize = lo.parse().map_err(|_| bad())?;
    let hi: usize = hi.parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo..=hi).collect())
}

/// What a successful command asks the process to exit with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    CounterexampleFound,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::CounterexampleFound => 1,
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome, CliError> {
    let io_err = |source: io::Error| CliError::Io {
        path: "<stdout>".into(),
        source,
    };
    match cli.command {
        Command::Build {
            kind,
            net,
            out: path,
        } => {
            let spec = net.spec(kind)?;
            let circuit = spec.build(net.options())?;
            let text = serialize(&circuit);
            let summary = format!(
                "{spec}\nwires: {}\n{}{}\n",
                circuit.num_wires(),
                layout_table(circuit.layout()),
                counts_line(&circuit.counts())
            );
            match path {
                Some(p) => {
                    write_file(&p, text.as_bytes())?;
                    write!(out, "{summary}").map_err(io_err)?;
                }
                None => {
                    out.write_all(text.as_bytes()).map_err(io_err)?;
                    write!(err, "{summary}").map_err(io_err)?;
                }
            }
            Ok(Outcome::Success)
        }

        Command::Simulate {
            kind,
            net,
            circuit,
            set,
            terms,
            trace: want_trace,
            trace_depth,
        } => {
            let (circuit, presets) = match (kind, circuit) {
                (_, Some(path)) => (read_circuit(&path)?, Vec::new()),
                (Some(kind), None) => {
                    let spec = net.spec(kind)?;
                    let presets = preset_values(&spec)
                        .into_iter()
                        .map(|(n, v)| (n.to_owned(), v))
                        .collect();
                    (spec.build(net.options())?, presets)
                }
                (None, None) => {
                    return Err(CliError::Usage(
                        "give a network kind or --circuit FILE".into(),
                    ))
                }
            };
            let layout = circuit.layout();
            let shared: Vec<(String, BigUint)> = set
                .iter()
                .map(|s| parse_assignment(s))
                .collect::<Result<_, _>>()?;
            let base = merge(&[&presets, &shared]);

            if terms.is_empty() {
                let state = encode_values(layout, &base)?;
                writeln!(out, "input:\n{}", decode(layout, &state)?).map_err(io_err)?;
                if want_trace {
                    for step in trace(&circuit, &state, trace_depth)?.iter().skip(1) {
                        writeln!(
                            out,
                            "{:>8}  {}{}  {}",
                            step.gates_applied,
                            "  ".repeat(step.depth),
                            step.label,
                            step.registers.compact()
                        )
                        .map_err(io_err)?;
                    }
                    writeln!(out).map_err(io_err)?;
                }
                let final_state = run_basis(&circuit, &state)?;
                writeln!(out, "output:\n{}", decode(layout, &final_state)?).map_err(io_err)?;
                return Ok(Outcome::Success);
            }

            let parsed: Vec<Term> = terms
                .iter()
                .map(|t| parse_term(t))
                .collect::<Result<_, _>>()?;
            let with_amp = parsed.iter().filter(|t| t.amplitude.is_some()).count();
            if with_amp != 0 && with_amp != parsed.len() {
                return Err(CliError::Usage(
                    "give an amplitude for every term or for none".into(),
                ));
            }
            let mut basis = Vec::with_capacity(parsed.len());
            for t in &parsed {
                basis.push(encode_values(layout, &merge(&[&base, &t.values]))?);
            }
            let input = if with_amp == 0 {
                SparseState::uniform(circuit.num_wires(), basis)?
            } else {
                SparseState::new(
                    circuit.num_wires(),
                    basis
                        .into_iter()
                        .zip(parsed.iter().map(|t| t.amplitude.unwrap())),
                )?
            };
            let output = run_sparse(&circuit, &input)?;
            for (title, state) in [("input", &input), ("output", &output)] {
                writeln!(
                    out,
                    "{title}: {} terms, norm error {:.1e}",
                    state.len(),
                    state.norm_error()
                )
                .map_err(io_err)?;
                for (b, a) in state.terms() {
                    writeln!(
                        out,
                        "  ({:+.6}{:+.6}i)  {}",
                        a.re,
                        a.im,
                        decode(layout, b)?.compact()
                    )
                    .map_err(io_err)?;
                }
            }
            Ok(Outcome::Success)
        }

        Command::Verify {
            kind,
            net,
            random,
            samples,
            seed,
            budget,
            kv,
        } => {
            let spec = net.spec(kind)?;
            let report = if random {
                verify_random(&spec, net.options(), samples, seed)?
            } else {
                verify_exhaustive(&spec, net.options(), budget)?
            };
            if kv {
                write!(out, "{}", report.to_key_values()).map_err(io_err)?;
            } else {
                writeln!(out, "{report}").map_err(io_err)?;
            }
            Ok(if report.passed() {
                Outcome::Success
            } else {
                Outcome::CounterexampleFound
            })
        }

        Command::Resources {
            kind,
            net,
            sweep,
            csv,
        } => {
            let opts = net.options();
            if let Some(range) = sweep {
                let report = scaling_sweep(kind.into(), &parse_sweep(&range)?, opts)?;
                match csv {
                    Some(path) => {
                        let mut buf = Vec::new();
                        report.write_csv(&mut buf)?;
                        write_file(&path, &buf)?;
                    }
                    None => report.write_csv(&mut *out)?,
                }
                writeln!(out, "{report}").map_err(io_err)?;
                return Ok(Outcome::Success);
            }

            let spec = if net.modulus.is_some() || matches!(kind, Kind::Adder | Kind::Subtractor) {
                Some(net.spec(kind)?)
            } else {
                let n = net
                    .n
                    .ok_or_else(|| CliError::Usage("give --n or the network parameters".into()))?;
                match representative_spec(kind.into(), n) {
                    Ok(s) => Some(s),
                    Err(ResourceError::TooSmall { .. }) if kind == Kind::Modexp => None,
                    Err(e) => return Err(e.into()),
                }
            };
            match spec {
                Some(spec) => {
                    let report = resource_report(&spec, opts)?;
                    writeln!(out, "{report}").map_err(io_err)?;
                }
                None => {
                    // No modulus fits in n < 2 bits, so only the layout exists.
                    let n = net.n.unwrap_or(1);
                    let q: QubitBreakdown = modexp_qubits(n, net.m.unwrap_or(2 * n), opts);
                    writeln!(
                        out,
                        "network      modexp n={n} (no valid modulus; layout only)\nregisters\n{q}"
                    )
                    .map_err(io_err)?;
                }
            }
            if kind == Kind::Modexp {
                let n = net.n.or(net.modulus.map(|m| net.width_for(m))).unwrap_or(1);
                let t = theoretical_counts(n)?;
                writeln!(
                    out,
                    "qubit formulas (m = 2n, n = {n}): 7n+1 = {}, 5n+2 = {}, 4n+3 = {}",
                    t.baseline, t.classical_register_variant, t.toffoli_adder_variant
                )
                .map_err(io_err)?;
            }
            Ok(Outcome::Success)
        }
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args(args: impl IntoIterator<Item = std::ffi::OsString>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = io::stdout();
    let stderr = io::stderr();
    match run(cli, &mut stdout.lock(), &mut stderr.lock()) {
        Ok(outcome) => outcome.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
