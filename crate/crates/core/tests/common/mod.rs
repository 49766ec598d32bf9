#![allow(dead_code)]

use qarith::circuit::{Circuit, Gate, RegisterLayout, Role, Span};
use qarith::numtheory::gcd;
use qarith::synth::{
    AdderSpec, CMultSpec, CarryLayout, ModAdderSpec, ModExpSpec, NetworkSpec, SwapMode,
    SynthOptions,
};
use rand::seq::index::sample;
use rand::Rng;

pub fn all_options() -> Vec<SynthOptions> {
    let mut out = Vec::new();
    for swap_mode in [SwapMode::Gates, SwapMode::Relabel] {
        for carry_layout in [CarryLayout::Compact, CarryLayout::Uniform] {
            out.push(SynthOptions {
                swap_mode,
                carry_layout,
            });
        }
    }
    out
}

/// Every network the builders accept with `n <= max_n` whose layout fits
/// in `max_wires` wires, under every option combination.
pub fn small_builds(max_n: usize, max_wires: usize) -> Vec<(NetworkSpec, SynthOptions)> {
    let mut out = Vec::new();
    for opts in all_options() {
        let mut push = |spec: NetworkSpec| {
            if spec.layout(opts).width() <= max_wires {
                out.push((spec, opts));
            }
        };
        for n in 1..=max_n {
            push(NetworkSpec::Adder(AdderSpec::new(n).unwrap()));
            push(NetworkSpec::Subtractor(AdderSpec::new(n).unwrap()));
            for modulus in 2..(1u64 << n) {
                push(NetworkSpec::ModularAdder(
                    ModAdderSpec::new(n, modulus).unwrap(),
                ));
                for a in 0..modulus {
                    push(NetworkSpec::ControlledMultiplier(
                        CMultSpec::new(n, a, modulus).unwrap(),
                    ));
                    if gcd(a, modulus) == 1 {
                        for m in 1..=max_wires {
                            push(NetworkSpec::ModularExponentiation(
                                ModExpSpec::new(n, m, a, modulus).unwrap(),
                            ));
                        }
                    }
                }
            }
        }
    }
    out
}

/// A spread of parameters per kind for `n = 1..=max_n`: boundary moduli,
/// boundary multipliers and a few exponent widths.
pub fn representative_builds(max_n: usize) -> Vec<(NetworkSpec, SynthOptions)> {
    let mut out = Vec::new();
    for opts in all_options() {
        for n in 1..=max_n {
            out.push((NetworkSpec::Adder(AdderSpec::new(n).unwrap()), opts));
            out.push((NetworkSpec::Subtractor(AdderSpec::new(n).unwrap()), opts));
            let top = (1u64 << n) - 1;
            let mut moduli = vec![2, (1 << (n - 1)) + 1, top];
            moduli.retain(|&m| (2..=top).contains(&m));
            moduli.dedup();
            for &modulus in &moduli {
                out.push((
                    NetworkSpec::ModularAdder(ModAdderSpec::new(n, modulus).unwrap()),
                    opts,
                ));
                for a in [0, 1, modulus / 2, modulus - 1] {
                    out.push((
                        NetworkSpec::ControlledMultiplier(CMultSpec::new(n, a, modulus).unwrap()),
                        opts,
                    ));
                }
                for a in [1, 2, modulus - 1] {
                    if a < modulus && gcd(a, modulus) == 1 {
                        for m in [1, n, 2 * n] {
                            out.push((
                                NetworkSpec::ModularExponentiation(
                                    ModExpSpec::new(n, m, a, modulus).unwrap(),
                                ),
                                opts,
                            ));
                        }
                    }
                }
            }
        }
    }
    out.sort_by_key(|(s, o)| (s.to_string(), format!("{o:?}")));
    out.dedup();
    out
}

fn random_gate(rng: &mut impl Rng, num_wires: usize) -> Gate {
    let arity = rng.gen_range(1..=num_wires.min(3));
    let w = sample(rng, num_wires, arity).into_vec();
    match arity {
        1 => Gate::not(w[0]),
        2 => Gate::cnot(w[0], w[1]).unwrap(),
        _ => Gate::toffoli(w[0], w[1], w[2]).unwrap(),
    }
}

/// Random gates over a random register split, with a few nested spans.
pub fn random_circuit(rng: &mut impl Rng, max_wires: usize, max_gates: usize) -> Circuit {
    let num_wires = rng.gen_range(1..=max_wires);
    let mut layout = RegisterLayout::empty();
    if rng.gen_bool(0.7) {
        let mut start = 0;
        let mut idx = 0;
        while start < num_wires {
            let width = rng.gen_range(1..=num_wires - start);
            let role = Role::ALL[rng.gen_range(0..Role::ALL.len())];
            layout
                .push(qarith::circuit::Register {
                    name: format!("r{idx}"),
                    role,
                    start,
                    width,
                })
                .unwrap();
            start += width;
            idx += 1;
        }
    }
    let gates: Vec<Gate> = (0..rng.gen_range(0..=max_gates))
        .map(|_| random_gate(rng, num_wires))
        .collect();
    let mut spans = Vec::new();
    if !gates.is_empty() {
        for k in 0..rng.gen_range(0..4) {
            let start = rng.gen_range(0..gates.len());
            let end = rng.gen_range(start + 1..=gates.len());
            spans.push(Span {
                depth: rng.gen_range(0..3),
                start,
                end,
                label: format!("block {k}"),
            });
        }
    }
    Circuit::from_parts(num_wires, layout, gates, spans).unwrap()
}
