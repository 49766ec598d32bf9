//! Exact simulation. Every gate permutes computational basis states, so a
//! basis state maps to a basis state and a superposition maps term by term.

use std::cmp::Reverse;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::circuit::{Circuit, Gate, RegisterLayout, Wire};

/// Allowed deviation of the squared norm from 1.
pub const NORM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("state has {found} wires but the circuit has {expected}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("no register named `{0}`")]
    UnknownRegister(String),
    #[error("register `{0}` assigned more than once")]
    DuplicateAssignment(String),
    #[error("value {value} does not fit the {width}-wire register `{register}`")]
    ValueOverflow {
        register: String,
        width: usize,
        value: BigUint,
    },
    #[error("state norm is off by {0:e} (tolerance {NORM_TOLERANCE:e})")]
    NotNormalized(f64),
    #[error("superposition has no terms")]
    EmptyState,
    #[error("index simulation supports at most 64 wires, circuit has {0}")]
    TooWideForIndex(usize),
}

/// Word-packed bit vector holding one bit per wire.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState {
    width: usize,
    words: Vec<u64>,
}

impl BasisState {
    pub fn zeros(width: usize) -> Self {
        Self {
            width,
            words: vec![0; width.div_ceil(64)],
        }
    }

    /// State whose wire `k` holds bit `k` of `index`.
    pub fn from_index(width: usize, index: u64) -> Self {
        let mut s = Self::zeros(width);
        if width < 64 {
            assert!(
                index >> width == 0,
                "index {index} too large for {width} wires"
            );
        }
        if let Some(w) = s.words.first_mut() {
            *w = index;
        }
        s
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn get(&self, wire: Wire) -> bool {
        debug_assert!(wire < self.width);
        (self.words[wire >> 6] >> (wire & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, wire: Wire, bit: bool) {
        debug_assert!(wire < self.width);
        let mask = 1u64 << (wire & 63);
        if bit {
            self.words[wire >> 6] |= mask;
        } else {
            self.words[wire >> 6] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, wire: Wire) {
        self.words[wire >> 6] ^= 1u64 << (wire & 63);
    }

    #[inline]
    pub fn apply(&mut self, gate: &Gate) {
        match *gate {
            Gate::Not { target } => self.flip(target),
            Gate::Cnot { control, target } => {
                if self.get(control) {
                    self.flip(target)
                }
            }
            Gate::Toffoli {
                controls: [c1, c2],
                target,
            } => {
                if self.get(c1) && self.get(c2) {
                    self.flip(target)
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }
}

impl fmt::Debug for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{self}⟩")
    }
}

/// Bits from the highest wire down to wire 0.
impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in (0..self.width).rev() {
            f.write_str(if self.get(w) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

fn check_width(circuit: &Circuit, state: &BasisState) -> Result<(), SimError> {
    if state.width != circuit.num_wires() {
        return Err(SimError::WidthMismatch {
            expected: circuit.num_wires(),
            found: state.width,
        });
    }
    Ok(())
}

/// Applies every gate of `circuit` to `state` in order.
pub fn run_basis(circuit: &Circuit, state: &BasisState) -> Result<BasisState, SimError> {
    let mut out = state.clone();
    run_basis_in_place(circuit, &mut out)?;
    Ok(out)
}

pub fn run_basis_in_place(circuit: &Circuit, state: &mut BasisState) -> Result<(), SimError> {
    check_width(circuit, state)?;
    for g in circuit.gates() {
        state.apply(g);
    }
    Ok(())
}

/// Simulates a circuit of at most 64 wires on a basis state packed into a
/// single integer (wire `k` is bit `k`).
pub fn run_index(circuit: &Circuit, mut index: u64) -> Result<u64, SimError> {
    if circuit.num_wires() > 64 {
        return Err(SimError::TooWideForIndex(circuit.num_wires()));
    }
    let bit = |s: u64, w: Wire| (s >> w) & 1 == 1;
    for g in circuit.gates() {
        match *g {
            Gate::Not { target } => index ^= 1 << target,
            Gate::Cnot { control, target } => {
                if bit(index, control) {
                    index ^= 1 << target
                }
            }
            Gate::Toffoli {
                controls: [c1, c2],
                target,
            } => {
                if bit(index, c1) && bit(index, c2) {
                    index ^= 1 << target
                }
            }
        }
    }
    Ok(index)
}

/// Decoded register contents in layout order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct RegisterValues {
    entries: Vec<(String, BigUint)>,
    widths: Vec<usize>,
}

impl RegisterValues {
    pub fn get(&self, name: &str) -> Option<&BigUint> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &BigUint)> {
        self.entries.iter().map(|(n, v)| (n.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// One `name=value` pair per register, comma separated.
    pub fn compact(&self) -> String {
        self.entries
            .iter()
            .map(|(n, v)| format!("{n}={v}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// One line per register: name, decimal value and binary value padded to
/// the register width.
impl fmt::Display for RegisterValues {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name_w = self.entries.iter().map(|(n, _)| n.len()).max().unwrap_or(0);
        for ((name, v), &width) in self.entries.iter().zip(&self.widths) {
            writeln!(
                f,
                "  {name:<name_w$}  {v:>6}  0b{:0>width$}",
                v.to_str_radix(2)
            )?;
        }
        Ok(())
    }
}

/// Loads register values into a basis state, little-endian within each
/// register. Registers not mentioned are zero.
pub fn encode<'a, V: Into<BigUint>>(
    layout: &RegisterLayout,
    values: impl IntoIterator<Item = (&'a str, V)>,
) -> Result<BasisState, SimError> {
    let mut state = BasisState::zeros(layout.width());
    let mut seen: Vec<&str> = Vec::new();
    for (name, value) in values {
        let value: BigUint = value.into();
        let reg = layout
            .get(name)
            .ok_or_else(|| SimError::UnknownRegister(name.to_owned()))?;
        if seen.contains(&name) {
            return Err(SimError::DuplicateAssignment(name.to_owned()));
        }
        seen.push(name);
        if value.bits() > reg.width as u64 {
            return Err(SimError::ValueOverflow {
                register: name.to_owned(),
                width: reg.width,
                value,
            });
        }
        for k in 0..reg.width {
            state.set(reg.bit(k), value.bit(k as u64));
        }
    }
    Ok(state)
}

/// Reads every register of `layout` out of `state`.
pub fn decode(layout: &RegisterLayout, state: &BasisState) -> Result<RegisterValues, SimError> {
    if state.width != layout.width() {
        return Err(SimError::WidthMismatch {
            expected: layout.width(),
            found: state.width,
        });
    }
    let mut out = RegisterValues::default();
    for reg in layout.registers() {
        let mut v = BigUint::zero();
        for k in 0..reg.width {
            if state.get(reg.bit(k)) {
                v.set_bit(k as u64, true);
            }
        }
        out.entries.push((reg.name.clone(), v));
        out.widths.push(reg.width);
    }
    Ok(out)
}

/// Register snapshot taken at a span boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub label: String,
    pub depth: usize,
    /// Number of gates applied before the snapshot.
    pub gates_applied: usize,
    pub registers: RegisterValues,
}

/// Runs `circuit` on `state`, snapshotting the registers before the first
/// gate and at the end of every span no deeper than `max_depth`.
pub fn trace(
    circuit: &Circuit,
    state: &BasisState,
    max_depth: usize,
) -> Result<Vec<TraceStep>, SimError> {
    check_width(circuit, state)?;
    let layout = circuit.layout();
    let mut ends: Vec<_> = circuit
        .spans()
        .iter()
        .filter(|s| s.depth <= max_depth)
        .collect();
    ends.sort_by_key(|s| (s.end, Reverse(s.depth)));

    let mut cur = state.clone();
    let mut applied = 0;
    let mut steps = vec![TraceStep {
        label: "input".into(),
        depth: 0,
        gates_applied: 0,
        registers: decode(layout, &cur)?,
    }];
    for span in ends {
        for g in &circuit.gates()[applied..span.end] {
            cur.apply(g);
        }
        applied = span.end;
        steps.push(TraceStep {
            label: span.label.clone(),
            depth: span.depth,
            gates_applied: applied,
            registers: decode(layout, &cur)?,
        });
    }
    Ok(steps)
}

/// A superposition over basis states with complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseState {
    width: usize,
    terms: BTreeMap<BasisState, Complex64>,
}

impl SparseState {
    /// Collects terms, summing repeated basis states and dropping zero
    /// amplitudes. Normalization is checked by [`run_sparse`], not here.
    pub fn new(
        width: usize,
        terms: impl IntoIterator<Item = (BasisState, Complex64)>,
    ) -> Result<Self, SimError> {
        let mut map: BTreeMap<BasisState, Complex64> = BTreeMap::new();
        for (basis, amp) in terms {
            if basis.width != width {
                return Err(SimError::WidthMismatch {
                    expected: width,
                    found: basis.width,
                });
            }
            *map.entry(basis).or_default() += amp;
        }
        map.retain(|_, a| !a.is_zero());
        if map.is_empty() {
            return Err(SimError::EmptyState);
        }
        Ok(Self { width, terms: map })
    }

    /// Equal-amplitude superposition of distinct basis states.
    pub fn uniform(
        width: usize,
        basis: impl IntoIterator<Item = BasisState>,
    ) -> Result<Self, SimError> {
        let basis: Vec<_> = basis.into_iter().collect();
        let amp = Complex64::new(1.0 / (basis.len() as f64).sqrt(), 0.0);
        Self::new(width, basis.into_iter().map(|b| (b, amp)))
    }

    pub fn basis(state: BasisState) -> Self {
        let width = state.width;
        Self::new(width, [(state, Complex64::new(1.0, 0.0))]).expect("non-zero amplitude")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisState, &Complex64)> {
        self.terms.iter()
    }

    pub fn amplitude(&self, basis: &BasisState) -> Complex64 {
        self.terms.get(basis).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm_error(&self) -> f64 {
        (self.norm_sqr() - 1.0).abs()
    }

    /// Rescales to unit norm.
    pub fn normalized(mut self) -> Self {
        let scale = self.norm_sqr().sqrt();
        for a in self.terms.values_mut() {
            *a /= scale;
        }
        self
    }
}

/// Maps every term through the circuit, carrying its amplitude unchanged.
pub fn run_sparse(circuit: &Circuit, state: &SparseState) -> Result<SparseState, SimError> {
    if state.width != circuit.num_wires() {
        return Err(SimError::WidthMismatch {
            expected: circuit.num_wires(),
            found: state.width,
        });
    }
    let err = state.norm_error();
    if err > NORM_TOLERANCE {
        return Err(SimError::NotNormalized(err));
    }
    let terms: BTreeMap<BasisState, Complex64> = state
        .terms
        .par_iter()
        .map(|(basis, &amp)| {
            let mut out = basis.clone();
            for g in circuit.gates() {
                out.apply(g);
            }
            (out, amp)
        })
        .collect();
    debug_assert_eq!(terms.len(), state.terms.len(), "permutation merged terms");
    Ok(SparseState {
        width: state.width,
        terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Role;
    use proptest::prelude::*;

    fn circuit(num_wires: usize, gates: &[Gate]) -> Circuit {
        let mut c = Circuit::unstructured(num_wires).unwrap();
        for g in gates {
            c.append_gate(*g).unwrap();
        }
        c
    }

    #[test]
    fn toffoli_truth_table() {
        let c = circuit(3, &[Gate::toffoli(0, 1, 2).unwrap()]);
        for input in 0..8u64 {
            let both = input & 0b11 == 0b11;
            let expected = if both { input ^ 0b100 } else { input };
            let out = run_basis(&c, &BasisState::from_index(3, input)).unwrap();
            assert_eq!(
                out,
                BasisState::from_index(3, expected),
                "input {input:03b}"
            );
            assert_eq!(run_index(&c, input).unwrap(), expected);
        }
    }

    #[test]
    fn cnot_copies_control() {
        let c = circuit(2, &[Gate::cnot(0, 1).unwrap()]);
        let out = run_basis(&c, &BasisState::from_index(2, 0b01)).unwrap();
        assert_eq!(out, BasisState::from_index(2, 0b11));
        let out = run_basis(&c, &BasisState::from_index(2, 0b00)).unwrap();
        assert_eq!(out, BasisState::from_index(2, 0b00));
    }

    #[test]
    fn not_flips() {
        let c = circuit(1, &[Gate::not(0)]);
        assert_eq!(run_index(&c, 0).unwrap(), 1);
        assert_eq!(run_index(&c, 1).unwrap(), 0);
    }

    #[test]
    fn empty_circuit_is_identity() {
        let c = Circuit::unstructured(5).unwrap();
        let s = BasisState::from_index(5, 0b10110);
        assert_eq!(run_basis(&c, &s).unwrap(), s);
    }

    #[test]
    fn width_mismatch() {
        let c = Circuit::unstructured(3).unwrap();
        assert_eq!(
            run_basis(&c, &BasisState::zeros(4)),
            Err(SimError::WidthMismatch {
                expected: 3,
                found: 4
            })
        );
    }

    #[test]
    fn wide_states_span_words() {
        let mut s = BasisState::zeros(130);
        s.set(0, true);
        s.set(64, true);
        s.set(129, true);
        let c = circuit(
            130,
            &[
                Gate::toffoli(64, 129, 100).unwrap(),
                Gate::cnot(100, 65).unwrap(),
            ],
        );
        let out = run_basis(&c, &s).unwrap();
        assert!(out.get(100) && out.get(65) && out.get(0));
        assert!(run_index(&c, 0).is_err());
    }

    #[test]
    fn six_loads_as_110() {
        let layout = RegisterLayout::stacked([("r", Role::InputA, 3)]).unwrap();
        let s = encode(&layout, [("r", 6u64)]).unwrap();
        assert_eq!(s.to_string(), "110");
        assert!(!s.get(0) && s.get(1) && s.get(2));
        let values = decode(&layout, &s).unwrap();
        assert_eq!(values.get("r"), Some(&BigUint::from(6u32)));
        assert_eq!(values.to_string(), "  r       6  0b110\n");
    }

    #[test]
    fn encode_defaults_to_zero() {
        let layout =
            RegisterLayout::stacked([("p", Role::InputA, 3), ("q", Role::InputB, 4)]).unwrap();
        let s = encode(&layout, std::iter::empty::<(&str, u64)>()).unwrap();
        assert!(s.is_zero());
    }

    #[test]
    fn encode_errors() {
        let layout = RegisterLayout::stacked([("r", Role::InputA, 3)]).unwrap();
        assert!(matches!(
            encode(&layout, [("r", 8u64)]),
            Err(SimError::ValueOverflow { .. })
        ));
        assert!(matches!(
            encode(&layout, [("s", 1u64)]),
            Err(SimError::UnknownRegister(_))
        ));
        assert!(matches!(
            encode(&layout, [("r", 1u64), ("r", 2u64)]),
            Err(SimError::DuplicateAssignment(_))
        ));
    }

    #[test]
    fn sparse_single_term_matches_basis_run() {
        let c = circuit(
            3,
            &[Gate::cnot(0, 2).unwrap(), Gate::toffoli(0, 2, 1).unwrap()],
        );
        for i in 0..8 {
            let b = BasisState::from_index(3, i);
            let out = run_sparse(&c, &SparseState::basis(b.clone())).unwrap();
            assert_eq!(out, SparseState::basis(run_basis(&c, &b).unwrap()));
        }
    }

    #[test]
    fn sparse_rejects_unnormalized() {
        let c = Circuit::unstructured(2).unwrap();
        let s = SparseState::new(2, [(BasisState::zeros(2), Complex64::new(0.5, 0.0))]).unwrap();
        assert!(matches!(
            run_sparse(&c, &s),
            Err(SimError::NotNormalized(_))
        ));
        assert!(run_sparse(&c, &s.normalized()).is_ok());
    }

    #[test]
    fn sparse_state_merges_and_drops_zeros() {
        let b = BasisState::from_index(2, 1);
        let s = SparseState::new(
            2,
            [
                (b.clone(), Complex64::new(0.5, 0.0)),
                (b.clone(), Complex64::new(0.5, 0.0)),
                (BasisState::from_index(2, 2), Complex64::new(0.0, 0.0)),
            ],
        )
        .unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.amplitude(&b), Complex64::new(1.0, 0.0));
        assert_eq!(
            SparseState::new(2, [(b, Complex64::new(0.0, 0.0))]),
            Err(SimError::EmptyState)
        );
    }

    fn gate_strategy(width: usize) -> impl Strategy<Value = Gate> {
        prop::sample::subsequence((0..width).collect::<Vec<_>>(), 3)
            .prop_shuffle()
            .prop_flat_map(|w| {
                prop_oneof![
                    Just(Gate::not(w[0])),
                    Just(Gate::cnot(w[0], w[1]).unwrap()),
                    Just(Gate::toffoli(w[0], w[1], w[2]).unwrap()),
                ]
            })
    }

    proptest! {
        #[test]
        fn register_values_round_trip(widths in prop::collection::vec(1usize..70, 1..5), seed in any::<u64>()) {
            let names: Vec<String> = (0..widths.len()).map(|i| format!("r{i}")).collect();
            let layout = RegisterLayout::stacked(
                names.iter().zip(&widths).map(|(n, &w)| (n.as_str(), Role::InputA, w)),
            ).unwrap();
            let mut x = seed | 1;
            let values: Vec<BigUint> = widths.iter().map(|&w| {
                let mut v = BigUint::zero();
                for k in 0..w {
                    x ^= x << 13; x ^= x >> 7; x ^= x << 17;
                    v.set_bit(k as u64, x & 1 == 1);
                }
                v
            }).collect();
            let state = encode(&layout, names.iter().map(String::as_str).zip(values.iter().cloned())).unwrap();
            let decoded = decode(&layout, &state).unwrap();
            for (name, v) in names.iter().zip(&values) {
                prop_assert_eq!(decoded.get(name), Some(v));
            }
        }

        #[test]
        fn sparse_preserves_norm_and_amplitudes(
            gates in prop::collection::vec(gate_strategy(8), 0..40),
            picks in prop::collection::btree_set(0u64..256, 8),
            phases in prop::collection::vec(0.0f64..std::f64::consts::TAU, 8),
        ) {
            let c = circuit(8, &gates);
            let terms: Vec<_> = picks.iter().zip(&phases)
                .map(|(&i, &p)| (BasisState::from_index(8, i), Complex64::from_polar(1.0 / 8f64.sqrt(), p)))
                .collect();
            let input = SparseState::new(8, terms.clone()).unwrap();
            let out = run_sparse(&c, &input).unwrap();
            prop_assert!(out.norm_error() < NORM_TOLERANCE);
            prop_assert_eq!(out.len(), input.len());
            // Linearity on disjoint terms: every input term lands on its own
            // image with the same amplitude.
            for (b, a) in &terms {
                let image = run_basis(&c, b).unwrap();
                prop_assert_eq!(out.amplitude(&image), *a);
            }
        }

        #[test]
        fn gates_are_self_inverse(gate in gate_strategy(10), index in 0u64..1024) {
            let c = circuit(10, &[gate, gate]);
            prop_assert_eq!(run_index(&c, index).unwrap(), index);
        }
    }
}
