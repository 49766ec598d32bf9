//! Gate and qubit accounting, log-log scaling fits and the closed-form
//! qubit counts of the baseline and reduced exponentiation networks.

use std::fmt;
use std::io;

use rayon::prelude::*;
use thiserror::Error;

use crate::circuit::{Circuit, GateCounts, RegisterLayout, Role};
use crate::synth::{
    AdderSpec, CMultSpec, ModAdderSpec, ModExpSpec, NetworkKind, NetworkSpec, SwapMode, SynthError,
    SynthOptions,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResourceError {
    #[error("a scaling fit needs at least 4 distinct sizes, got {0}")]
    InsufficientPoints(usize),
    #[error("bit width n must be at least 1")]
    ZeroWidth,
    #[error("{kind} needs n >= {min}, got {n}")]
    TooSmall {
        kind: NetworkKind,
        n: usize,
        min: usize,
    },
    #[error(transparent)]
    Synth(#[from] SynthError),
}

pub fn count_gates(circuit: &Circuit) -> GateCounts {
    circuit.counts()
}

/// Qubits per register, grouped the way the exponentiation accounting
/// groups them: inputs, result, and everything that must end clean.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QubitBreakdown {
    pub registers: Vec<(String, Role, usize)>,
    pub input: usize,
    pub result: usize,
    pub temporary: usize,
    pub total: usize,
}

impl QubitBreakdown {
    pub fn of(layout: &RegisterLayout) -> Self {
        let mut out = QubitBreakdown {
            registers: Vec::new(),
            input: 0,
            result: 0,
            temporary: 0,
            total: 0,
        };
        for r in layout.registers() {
            out.registers.push((r.name.clone(), r.role, r.width));
            match r.role {
                Role::InputA | Role::InputB | Role::InputX | Role::Control => out.input += r.width,
                Role::Result => out.result += r.width,
                Role::Carry
                | Role::ModulusTemp
                | Role::MultTemp
                | Role::ExpTemp
                | Role::OverflowT => out.temporary += r.width,
            }
            out.total += r.width;
        }
        out
    }

    pub fn role_width(&self, role: Role) -> usize {
        self.registers
            .iter()
            .filter(|r| r.1 == role)
            .map(|r| r.2)
            .sum()
    }
}

impl fmt::Display for QubitBreakdown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, role, width) in &self.registers {
            writeln!(f, "  {name:<10}{:<14}{width:>4}", role.name())?;
        }
        write!(
            f,
            "  input {} + result {} + temporary {} = {} qubits",
            self.input, self.result, self.temporary, self.total
        )
    }
}

/// Qubits of the exponentiation network for an `n`-bit modulus and an
/// `m`-bit exponent. With `m = 2n` this is `2n + n + (4n + 1) = 7n + 1`:
/// the `4n + 1` scratch qubits are the `(n+1)`-bit product register (its top
/// bit is the adder overflow), the `n`-bit addend, the `n−1` carries, the
/// `n`-bit modulus copy and `t`.
pub fn modexp_qubits(n: usize, exp_bits: usize, opts: SynthOptions) -> QubitBreakdown {
    QubitBreakdown::of(&ModExpSpec::layout_for(n, exp_bits, opts))
}

/// Closed-form qubit counts for modular exponentiation with a `2n`-bit
/// exponent. Only the baseline is ever synthesized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TheoreticalCounts {
    pub baseline: usize,
    /// Modulus and addend kept in classical registers.
    pub classical_register_variant: usize,
    /// Additionally using an adder without a carry register.
    pub toffoli_adder_variant: usize,
}

pub fn theoretical_counts(n: usize) -> Result<TheoreticalCounts, ResourceError> {
    if n == 0 {
        return Err(ResourceError::ZeroWidth);
    }
    Ok(TheoreticalCounts {
        baseline: 7 * n + 1,
        classical_register_variant: 5 * n + 2,
        toffoli_adder_variant: 4 * n + 3,
    })
}

/// Parameters used for size sweeps: `N = 2^n − 1`, multiplier and base 2,
/// exponent width `2n`.
pub fn representative_spec(kind: NetworkKind, n: usize) -> Result<NetworkSpec, ResourceError> {
    if n == 0 {
        return Err(ResourceError::ZeroWidth);
    }
    let needs_modulus = !matches!(kind, NetworkKind::Adder | NetworkKind::Subtractor);
    if needs_modulus && n < 2 {
        return Err(ResourceError::TooSmall { kind, n, min: 2 });
    }
    let modulus = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
    Ok(match kind {
        NetworkKind::Adder => NetworkSpec::Adder(AdderSpec::new(n)?),
        NetworkKind::Subtractor => NetworkSpec::Subtractor(AdderSpec::new(n)?),
        NetworkKind::ModularAdder => NetworkSpec::ModularAdder(ModAdderSpec::new(n, modulus)?),
        NetworkKind::ControlledMultiplier => {
            NetworkSpec::ControlledMultiplier(CMultSpec::new(n, 2, modulus)?)
        }
        NetworkKind::ModularExponentiation => {
            NetworkSpec::ModularExponentiation(ModExpSpec::with_default_exponent(n, 2, modulus)?)
        }
    })
}

/// Counts and qubits of one built network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResourceReport {
    pub spec: NetworkSpec,
    pub options: SynthOptions,
    pub counts: GateCounts,
    pub qubits: QubitBreakdown,
}

pub fn resource_report(
    spec: &NetworkSpec,
    options: SynthOptions,
) -> Result<ResourceReport, ResourceError> {
    let circuit = spec.build(options)?;
    Ok(ResourceReport {
        spec: *spec,
        options,
        counts: count_gates(&circuit),
        qubits: QubitBreakdown::of(circuit.layout()),
    })
}

fn swap_mode_name(mode: SwapMode) -> &'static str {
    match mode {
        SwapMode::Gates => "gates",
        SwapMode::Relabel => "relabel",
    }
}

impl fmt::Display for ResourceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "network      {}", self.spec)?;
        writeln!(f, "swap mode    {}", swap_mode_name(self.options.swap_mode))?;
        writeln!(f, "gates        {}", self.counts)?;
        writeln!(f, "registers")?;
        write!(f, "{}", self.qubits)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScalingPoint {
    pub n: usize,
    pub counts: GateCounts,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub kind: NetworkKind,
    pub options: SynthOptions,
    pub points: Vec<ScalingPoint>,
    /// Least-squares slope of `ln(total gates)` against `ln(n)`.
    pub slope: f64,
}

impl ScalingReport {
    /// `n,not,cnot,toffoli,total` rows with a header.
    pub fn write_csv<W: io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "not", "cnot", "toffoli", "total"])?;
        for p in &self.points {
            let c = p.counts;
            w.write_record([p.n, c.not, c.cnot, c.toffoli, c.total].map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

impl fmt::Display for ScalingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>4} {:>10} {:>10} {:>10} {:>10}",
            "n", "NOT", "CNOT", "TOFF", "total"
        )?;
        for p in &self.points {
            let c = p.counts;
            writeln!(
                f,
                "{:>4} {:>10} {:>10} {:>10} {:>10}",
                p.n, c.not, c.cnot, c.toffoli, c.total
            )?;
        }
        write!(
            f,
            "{} log-log slope {:.3} (swap mode {})",
            self.kind,
            self.slope,
            swap_mode_name(self.options.swap_mode)
        )
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Builds the representative network at every size in `sizes` and fits the
/// growth exponent of its total gate count.
pub fn scaling_sweep(
    kind: NetworkKind,
    sizes: &[usize],
    options: SynthOptions,
) -> Result<ScalingReport, ResourceError> {
    let mut sizes = sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < 4 {
        return Err(ResourceError::InsufficientPoints(sizes.len()));
    }
    let points = sizes
        .par_iter()
        .map(|&n| {
            let circuit = representative_spec(kind, n)?.build(options)?;
            Ok(ScalingPoint {
                n,
                counts: circuit.counts(),
            })
        })
        .collect::<Result<Vec<_>, ResourceError>>()?;
    let xy: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (p.n as f64, p.counts.total as f64))
        .collect();
    Ok(ScalingReport {
        kind,
        options,
        slope: loglog_slope(&xy),
        points,
    })
}

pub fn scaling_fit(
    kind: NetworkKind,
    sizes: &[usize],
    options: SynthOptions,
) -> Result<f64, ResourceError> {
    Ok(scaling_sweep(kind, sizes, options)?.slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{emit_swap, serialize};
    use crate::synth::build_adder;

    #[test]
    fn empty_circuit_counts_zero() {
        let c = Circuit::unstructured(3).unwrap();
        assert_eq!(count_gates(&c), GateCounts::default());
    }

    #[test]
    fn swap_counts_three_cnots_per_bit() {
        let layout =
            RegisterLayout::stacked([("p", Role::InputA, 5), ("q", Role::InputB, 5)]).unwrap();
        let counts = count_gates(&emit_swap(&layout, "p", "q").unwrap());
        assert_eq!(counts.cnot, 15);
        assert_eq!(counts.total, 15);
    }

    #[test]
    fn adder_count_matches_serialized_gate_lines() {
        let c = build_adder(3, SynthOptions::default()).unwrap();
        let text = serialize(&c);
        let gate_lines = text
            .lines()
            .filter(|l| l.starts_with("NOT ") || l.starts_with("CNOT ") || l.starts_with("TOFF "))
            .count();
        assert_eq!(count_gates(&c).total, gate_lines);
    }

    #[test]
    fn modexp_qubits_follow_7n_plus_1() {
        let b = modexp_qubits(4, 8, SynthOptions::default());
        assert_eq!((b.input, b.result, b.temporary, b.total), (8, 4, 17, 29));
        assert_eq!(modexp_qubits(1, 2, SynthOptions::default()).total, 8);
        for n in 1..40 {
            let b = modexp_qubits(n, 2 * n, SynthOptions::default());
            assert_eq!(b.total, 7 * n + 1);
            assert_eq!(b.temporary, 4 * n + 1);
        }
    }

    #[test]
    fn theoretical_examples() {
        let t = theoretical_counts(4).unwrap();
        assert_eq!(
            (
                t.baseline,
                t.classical_register_variant,
                t.toffoli_adder_variant
            ),
            (29, 22, 19)
        );
        let t = theoretical_counts(1).unwrap();
        assert_eq!(
            (
                t.baseline,
                t.classical_register_variant,
                t.toffoli_adder_variant
            ),
            (8, 7, 7)
        );
        assert_eq!(theoretical_counts(0), Err(ResourceError::ZeroWidth));
    }

    #[test]
    fn theoretical_counts_are_monotone() {
        for n in 1..100 {
            let (a, b) = (
                theoretical_counts(n).unwrap(),
                theoretical_counts(n + 1).unwrap(),
            );
            assert!(b.baseline > a.baseline);
            assert!(b.classical_register_variant > a.classical_register_variant);
            assert!(b.toffoli_adder_variant > a.toffoli_adder_variant);
        }
    }

    #[test]
    fn slope_of_exact_power_law() {
        let pts: Vec<(f64, f64)> = (1..10)
            .map(|x| (x as f64, 5.0 * (x as f64).powi(3)))
            .collect();
        assert!((loglog_slope(&pts) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn sweep_needs_four_sizes() {
        assert_eq!(
            scaling_fit(NetworkKind::Adder, &[4, 5, 5, 6], SynthOptions::default()),
            Err(ResourceError::InsufficientPoints(3))
        );
    }

    #[test]
    fn representative_specs() {
        assert!(matches!(
            representative_spec(NetworkKind::ModularExponentiation, 1),
            Err(ResourceError::TooSmall { .. })
        ));
        let spec = representative_spec(NetworkKind::ModularExponentiation, 4).unwrap();
        assert_eq!(spec.to_string(), "modexp n=4 m=8 a=2 N=15");
    }

    #[test]
    fn csv_output() {
        let r = scaling_sweep(NetworkKind::Adder, &[2, 3, 4, 5], SynthOptions::default()).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n,not,cnot,toffoli,total\n2,"));
        assert_eq!(text.lines().count(), 5);
    }
}
