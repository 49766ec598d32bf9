mod common;

use common::{random_circuit, representative_builds, small_builds};
use qarith::circuit::{parse, serialize, Circuit, Gate};
use qarith::sim::{run_basis, run_index, BasisState};
use qarith::verify::{check_permutation, check_reversal};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn every_gate_is_self_inverse() {
    for w in 1..=10usize {
        let mut gates = Vec::new();
        for t in 0..w {
            gates.push(Gate::not(t));
            for c in (0..w).filter(|&c| c != t) {
                gates.push(Gate::cnot(c, t).unwrap());
                for c2 in (c + 1..w).filter(|&c2| c2 != t) {
                    gates.push(Gate::toffoli(c, c2, t).unwrap());
                }
            }
        }
        // Sample the larger gate sets rather than pairing every gate with
        // all 1024 states.
        let stride = if w > 6 { 7 } else { 1 };
        for gate in gates.iter().step_by(stride) {
            for idx in 0..1u64 << w {
                let mut s = BasisState::from_index(w, idx);
                s.apply(gate);
                s.apply(gate);
                assert_eq!(s, BasisState::from_index(w, idx), "{gate} on {idx}");
            }
        }
    }
}

#[test]
fn small_builds_are_reversible_permutations() {
    let builds = small_builds(3, 12);
    assert!(builds.len() >= 32, "{}", builds.len());
    for (spec, opts) in builds {
        let c = spec.build(opts).unwrap();
        assert!(check_permutation(&c).unwrap(), "{spec} {opts:?}");
        assert!(check_reversal(&c).unwrap(), "{spec} {opts:?}");
    }
}

#[test]
fn reverse_undoes_random_circuits() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let c = random_circuit(&mut rng, 12, 60);
        let both = c.concat(&c.reverse()).unwrap();
        for idx in [0u64, 1, 0b1010_1010, (1 << c.num_wires()) - 1] {
            let idx = idx & ((1 << c.num_wires()) - 1);
            assert_eq!(run_index(&both, idx).unwrap(), idx);
        }
        assert_eq!(c.reverse().reverse(), c);
    }
}

#[test]
fn builder_outputs_round_trip() {
    for (spec, opts) in representative_builds(4) {
        let c = spec.build(opts).unwrap();
        assert_eq!(parse(&serialize(&c)).unwrap(), c, "{spec} {opts:?}");
    }
}

#[test]
fn random_circuits_round_trip_and_keep_semantics() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let c = random_circuit(&mut rng, 20, 40);
        let back: Circuit = serialize(&c).parse().unwrap();
        assert_eq!(back, c);
        let s = BasisState::from_index(c.num_wires(), 0b1011 & ((1 << c.num_wires()) - 1));
        assert_eq!(run_basis(&back, &s).unwrap(), run_basis(&c, &s).unwrap());
    }
}
