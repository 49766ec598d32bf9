//! Gate-level intermediate representation.
//!
//! A [`Circuit`] is a flat, ordered list of [`Gate`]s over a fixed number of
//! wires. Wires are grouped into named registers by a [`RegisterLayout`];
//! inside a register, the first wire carries the least significant bit.
//! Builders may attach [`Span`]s (labelled gate ranges) that mark block
//! boundaries for tracing. Spans never affect semantics.

mod text;

use std::cmp::Reverse;
use std::fmt;
use std::ops::{AddAssign, Range};

use thiserror::Error;

pub use text::{parse, serialize, ParseError, ParseErrorKind};

/// Index of a wire (one qubit across all time steps).
pub type Wire = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("gate {gate} uses wire {wire} more than once")]
    DuplicateWire { gate: GateKind, wire: Wire },
    #[error("gate {gate} expects {expected} wires, got {found}")]
    Arity {
        gate: GateKind,
        expected: usize,
        found: usize,
    },
    #[error("wire {wire} is out of range for a {num_wires}-wire circuit")]
    WireOutOfRange { wire: Wire, num_wires: usize },
    #[error("circuit must have at least one wire")]
    NoWires,
    #[error("cannot concatenate a {left}-wire circuit with a {right}-wire circuit")]
    WireCountMismatch { left: usize, right: usize },
    #[error("cannot concatenate circuits with different register layouts")]
    LayoutMismatch,
    #[error("register `{0}` is declared twice")]
    DuplicateRegister(String),
    #[error("register `{0}` has zero width")]
    EmptyRegister(String),
    #[error("register `{name}` overlaps wire {wire} already assigned to another register")]
    RegisterOverlap { name: String, wire: Wire },
    #[error("register `{name}` extends past wire {}", num_wires.saturating_sub(1))]
    RegisterOutOfRange { name: String, num_wires: usize },
    #[error("registers leave wire {0} unassigned")]
    UncoveredWire(Wire),
    #[error("no register named `{0}`")]
    UnknownRegister(String),
    #[error("registers `{a}` ({a_width} wires) and `{b}` ({b_width} wires) differ in width")]
    WidthMismatch {
        a: String,
        a_width: usize,
        b: String,
        b_width: usize,
    },
    #[error("span `{label}` covers gates {start}..{end} but the circuit has {len} gates")]
    SpanOutOfRange {
        label: String,
        start: usize,
        end: usize,
        len: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    Not,
    Cnot,
    Toffoli,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Not => 1,
            GateKind::Cnot => 2,
            GateKind::Toffoli => 3,
        }
    }

    /// Mnemonic used by the text format.
    pub fn mnemonic(self) -> &'static str {
        match self {
            GateKind::Not => "NOT",
            GateKind::Cnot => "CNOT",
            GateKind::Toffoli => "TOFF",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())
    }
}

/// One of the three elementary reversible gates. Every variant is its own
/// inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    Not { target: Wire },
    Cnot { control: Wire, target: Wire },
    Toffoli { controls: [Wire; 2], target: Wire },
}

impl Gate {
    pub fn not(target: Wire) -> Self {
        Gate::Not { target }
    }

    pub fn cnot(control: Wire, target: Wire) -> Result<Self, CircuitError> {
        Self::from_wires(GateKind::Cnot, &[control, target])
    }

    pub fn toffoli(c1: Wire, c2: Wire, target: Wire) -> Result<Self, CircuitError> {
        Self::from_wires(GateKind::Toffoli, &[c1, c2, target])
    }

    /// Builds a gate from its kind and wire list (controls first, target
    /// last).
    pub fn from_wires(kind: GateKind, wires: &[Wire]) -> Result<Self, CircuitError> {
        if wires.len() != kind.arity() {
            return Err(CircuitError::Arity {
                gate: kind,
                expected: kind.arity(),
                found: wires.len(),
            });
        }
        for (i, &w) in wires.iter().enumerate() {
            if wires[..i].contains(&w) {
                return Err(CircuitError::DuplicateWire {
                    gate: kind,
                    wire: w,
                });
            }
        }
        Ok(match *wires {
            [target] => Gate::Not { target },
            [control, target] => Gate::Cnot { control, target },
            [c1, c2, target] => Gate::Toffoli {
                controls: [c1, c2],
                target,
            },
            _ => unreachable!("arity checked above"),
        })
    }

    pub fn kind(&self) -> GateKind {
        match self {
            Gate::Not { .. } => GateKind::Not,
            Gate::Cnot { .. } => GateKind::Cnot,
            Gate::Toffoli { .. } => GateKind::Toffoli,
        }
    }

    pub fn target(&self) -> Wire {
        match *self {
            Gate::Not { target } | Gate::Cnot { target, .. } | Gate::Toffoli { target, .. } => {
                target
            }
        }
    }

    pub fn controls(&self) -> &[Wire] {
        match self {
            Gate::Not { .. } => &[],
            Gate::Cnot { control, .. } => std::slice::from_ref(control),
            Gate::Toffoli { controls, .. } => controls,
        }
    }

    /// All wires, controls first and target last.
    pub fn wires(&self) -> impl Iterator<Item = Wire> + '_ {
        self.controls()
            .iter()
            .copied()
            .chain(std::iter::once(self.target()))
    }

    fn max_wire(&self) -> Wire {
        self.wires().max().unwrap_or(0)
    }

    fn check_distinct(&self) -> Result<(), CircuitError> {
        let wires: Vec<Wire> = self.wires().collect();
        Gate::from_wires(self.kind(), &wires).map(|_| ())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind().mnemonic())?;
        for w in self.wires() {
            write!(f, " {w}")?;
        }
        Ok(())
    }
}

/// What a register is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    InputA,
    InputB,
    InputX,
    Result,
    Carry,
    ModulusTemp,
    MultTemp,
    ExpTemp,
    OverflowT,
    Control,
}

impl Role {
    pub const ALL: [Role; 10] = [
        Role::InputA,
        Role::InputB,
        Role::InputX,
        Role::Result,
        Role::Carry,
        Role::ModulusTemp,
        Role::MultTemp,
        Role::ExpTemp,
        Role::OverflowT,
        Role::Control,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Role::InputA => "input_a",
            Role::InputB => "input_b",
            Role::InputX => "input_x",
            Role::Result => "result",
            Role::Carry => "carry",
            Role::ModulusTemp => "modulus_temp",
            Role::MultTemp => "mult_temp",
            Role::ExpTemp => "exp_temp",
            Role::OverflowT => "overflow_t",
            Role::Control => "control",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Role::ALL.into_iter().find(|r| r.name() == s)
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A named, contiguous group of wires.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub role: Role,
    pub start: Wire,
    pub width: usize,
}

impl Register {
    pub fn wires(&self) -> Range<Wire> {
        self.start..self.start + self.width
    }

    /// Wire holding bit `k` (bit 0 is least significant).
    pub fn bit(&self, k: usize) -> Wire {
        assert!(k < self.width, "bit {k} outside register `{}`", self.name);
        self.start + k
    }
}

/// Ordered list of registers. A non-empty layout must partition the wires
/// of the circuit it is attached to; an empty layout marks an unstructured
/// circuit (random test circuits, single blocks).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RegisterLayout {
    registers: Vec<Register>,
}

impl RegisterLayout {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a layout by stacking registers from wire 0 upwards.
    pub fn stacked<'a>(
        regs: impl IntoIterator<Item = (&'a str, Role, usize)>,
    ) -> Result<Self, CircuitError> {
        let mut layout = Self::empty();
        let mut next = 0;
        for (name, role, width) in regs {
            layout.push(Register {
                name: name.to_owned(),
                role,
                start: next,
                width,
            })?;
            next += width;
        }
        Ok(layout)
    }

    /// Adds a register, checking it against the ones already present.
    pub fn push(&mut self, reg: Register) -> Result<(), CircuitError> {
        if reg.width == 0 {
            return Err(CircuitError::EmptyRegister(reg.name));
        }
        if self.get(&reg.name).is_some() {
            return Err(CircuitError::DuplicateRegister(reg.name));
        }
        for other in &self.registers {
            let lo = reg.start.max(other.start);
            let hi = (reg.start + reg.width).min(other.start + other.width);
            if lo < hi {
                return Err(CircuitError::RegisterOverlap {
                    name: reg.name,
                    wire: lo,
                });
            }
        }
        self.registers.push(reg);
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.registers.is_empty()
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn get(&self, name: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.name == name)
    }

    pub fn require(&self, name: &str) -> Result<&Register, CircuitError> {
        self.get(name)
            .ok_or_else(|| CircuitError::UnknownRegister(name.to_owned()))
    }

    /// Total number of wires covered by the registers.
    pub fn width(&self) -> usize {
        self.registers.iter().map(|r| r.width).sum()
    }

    /// Checks that a non-empty layout partitions `0..num_wires`.
    pub fn validate(&self, num_wires: usize) -> Result<(), CircuitError> {
        if self.is_empty() {
            return Ok(());
        }
        let mut covered = vec![false; num_wires];
        for reg in &self.registers {
            if reg.start + reg.width > num_wires {
                return Err(CircuitError::RegisterOutOfRange {
                    name: reg.name.clone(),
                    num_wires,
                });
            }
            for w in reg.wires() {
                if covered[w] {
                    return Err(CircuitError::RegisterOverlap {
                        name: reg.name.clone(),
                        wire: w,
                    });
                }
                covered[w] = true;
            }
        }
        match covered.iter().position(|c| !c) {
            Some(w) => Err(CircuitError::UncoveredWire(w)),
            None => Ok(()),
        }
    }
}

/// A labelled range of gates, e.g. one CARRY block or one multiplication
/// stage. `depth` is the nesting level at which the builder opened it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Span {
    pub depth: usize,
    pub start: usize,
    pub end: usize,
    pub label: String,
}

fn canonicalize_spans(spans: &mut [Span]) {
    spans.sort_by(|x, y| {
        (x.start, Reverse(x.end), x.depth, &x.label).cmp(&(
            y.start,
            Reverse(y.end),
            y.depth,
            &y.label,
        ))
    });
}

/// Per-kind gate tallies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct GateCounts {
    pub not: usize,
    pub cnot: usize,
    pub toffoli: usize,
    pub total: usize,
}

impl GateCounts {
    pub fn of(gates: &[Gate]) -> Self {
        let mut counts = GateCounts::default();
        for g in gates {
            counts.record(g.kind());
        }
        counts
    }

    fn record(&mut self, kind: GateKind) {
        match kind {
            GateKind::Not => self.not += 1,
            GateKind::Cnot => self.cnot += 1,
            GateKind::Toffoli => self.toffoli += 1,
        }
        self.total += 1;
    }
}

impl AddAssign for GateCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.not += rhs.not;
        self.cnot += rhs.cnot;
        self.toffoli += rhs.toffoli;
        self.total += rhs.total;
    }
}

impl fmt::Display for GateCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "NOT {}, CNOT {}, TOFF {}, total {}",
            self.not, self.cnot, self.toffoli, self.total
        )
    }
}

/// An ordered gate list over `num_wires` wires.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    num_wires: usize,
    gates: Vec<Gate>,
    layout: RegisterLayout,
    spans: Vec<Span>,
}

impl Circuit {
    pub fn new(num_wires: usize, layout: RegisterLayout) -> Result<Self, CircuitError> {
        Self::from_parts(num_wires, layout, Vec::new(), Vec::new())
    }

    /// A circuit without register structure.
    pub fn unstructured(num_wires: usize) -> Result<Self, CircuitError> {
        Self::new(num_wires, RegisterLayout::empty())
    }

    /// A circuit whose wire count is the layout width.
    pub fn with_layout(layout: RegisterLayout) -> Result<Self, CircuitError> {
        Self::new(layout.width(), layout)
    }

    /// Assembles and validates a circuit from raw parts.
    pub fn from_parts(
        num_wires: usize,
        layout: RegisterLayout,
        gates: Vec<Gate>,
        mut spans: Vec<Span>,
    ) -> Result<Self, CircuitError> {
        if num_wires == 0 {
            return Err(CircuitError::NoWires);
        }
        layout.validate(num_wires)?;
        for g in &gates {
            g.check_distinct()?;
            if g.max_wire() >= num_wires {
                return Err(CircuitError::WireOutOfRange {
                    wire: g.max_wire(),
                    num_wires,
                });
            }
        }
        for s in &spans {
            if s.start > s.end || s.end > gates.len() {
                return Err(CircuitError::SpanOutOfRange {
                    label: s.label.clone(),
                    start: s.start,
                    end: s.end,
                    len: gates.len(),
                });
            }
        }
        canonicalize_spans(&mut spans);
        Ok(Self {
            num_wires,
            gates,
            layout,
            spans,
        })
    }

    pub fn num_wires(&self) -> usize {
        self.num_wires
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn spans(&self) -> &[Span] {
        &self.spans
    }

    pub fn counts(&self) -> GateCounts {
        GateCounts::of(&self.gates)
    }

    /// Appends a gate after validating its wires.
    pub fn append_gate(&mut self, gate: Gate) -> Result<(), CircuitError> {
        gate.check_distinct()?;
        if gate.max_wire() >= self.num_wires {
            return Err(CircuitError::WireOutOfRange {
                wire: gate.max_wire(),
                num_wires: self.num_wires,
            });
        }
        self.gates.push(gate);
        Ok(())
    }

    /// The inverse circuit: gates in reverse order. Each gate is
    /// self-inverse, so the gates themselves are unchanged.
    pub fn reverse(&self) -> Circuit {
        let len = self.gates.len();
        let gates = self.gates.iter().rev().copied().collect();
        let mut spans: Vec<Span> = self
            .spans
            .iter()
            .map(|s| Span {
                depth: s.depth,
                start: len - s.end,
                end: len - s.start,
                label: s.label.clone(),
            })
            .collect();
        canonicalize_spans(&mut spans);
        Circuit {
            num_wires: self.num_wires,
            gates,
            layout: self.layout.clone(),
            spans,
        }
    }

    /// `self` followed by `other`. Layouts must agree unless one side is
    /// unstructured.
    pub fn concat(&self, other: &Circuit) -> Result<Circuit, CircuitError> {
        if self.num_wires != other.num_wires {
            return Err(CircuitError::WireCountMismatch {
                left: self.num_wires,
                right: other.num_wires,
            });
        }
        let layout = match (self.layout.is_empty(), other.layout.is_empty()) {
            (true, _) => other.layout.clone(),
            (false, true) => self.layout.clone(),
            (false, false) if self.layout == other.layout => self.layout.clone(),
            _ => return Err(CircuitError::LayoutMismatch),
        };
        let offset = self.gates.len();
        let mut gates = self.gates.clone();
        gates.extend_from_slice(&other.gates);
        let mut spans = self.spans.clone();
        spans.extend(other.spans.iter().map(|s| Span {
            start: s.start + offset,
            end: s.end + offset,
            ..s.clone()
        }));
        canonicalize_spans(&mut spans);
        Ok(Circuit {
            num_wires: self.num_wires,
            gates,
            layout,
            spans,
        })
    }
}

/// Circuit exchanging the contents of two equal-width registers with three
/// CNOTs per bit pair.
pub fn emit_swap(
    layout: &RegisterLayout,
    reg_a: &str,
    reg_b: &str,
) -> Result<Circuit, CircuitError> {
    let a = layout.require(reg_a)?;
    let b = layout.require(reg_b)?;
    if a.width != b.width {
        return Err(CircuitError::WidthMismatch {
            a: a.name.clone(),
            a_width: a.width,
            b: b.name.clone(),
            b_width: b.width,
        });
    }
    let mut circuit = Circuit::with_layout(layout.clone())?;
    if a.name == b.name {
        return Ok(circuit);
    }
    for (wa, wb) in a.wires().zip(b.wires()) {
        circuit.append_gate(Gate::cnot(wa, wb)?)?;
        circuit.append_gate(Gate::cnot(wb, wa)?)?;
        circuit.append_gate(Gate::cnot(wa, wb)?)?;
    }
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn append_toffoli_to_empty_circuit() {
        let mut c = Circuit::unstructured(3).unwrap();
        c.append_gate(Gate::toffoli(0, 1, 2).unwrap()).unwrap();
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn duplicate_wire_rejected() {
        assert_eq!(
            Gate::cnot(2, 2),
            Err(CircuitError::DuplicateWire {
                gate: GateKind::Cnot,
                wire: 2
            })
        );
        assert!(Gate::toffoli(0, 1, 0).is_err());
    }

    #[test]
    fn out_of_range_rejected() {
        let mut c = Circuit::unstructured(3).unwrap();
        assert_eq!(
            c.append_gate(Gate::not(5)),
            Err(CircuitError::WireOutOfRange {
                wire: 5,
                num_wires: 3
            })
        );
        assert!(c.is_empty());
    }

    #[test]
    fn reverse_of_empty_is_empty() {
        let c = Circuit::unstructured(4).unwrap();
        assert_eq!(c.reverse(), c);
    }

    #[test]
    fn reverse_is_an_involution() {
        let mut c = Circuit::unstructured(4).unwrap();
        c.append_gate(Gate::not(0)).unwrap();
        c.append_gate(Gate::cnot(0, 3).unwrap()).unwrap();
        c.append_gate(Gate::toffoli(3, 1, 2).unwrap()).unwrap();
        let r = c.reverse();
        assert_eq!(r.gates()[0], Gate::toffoli(3, 1, 2).unwrap());
        assert_eq!(r.reverse(), c);
    }

    #[test]
    fn reverse_maps_spans() {
        let gates = vec![Gate::not(0), Gate::not(1), Gate::not(0)];
        let spans = vec![Span {
            depth: 0,
            start: 0,
            end: 1,
            label: "first".into(),
        }];
        let c = Circuit::from_parts(2, RegisterLayout::empty(), gates, spans).unwrap();
        let r = c.reverse();
        assert_eq!((r.spans()[0].start, r.spans()[0].end), (2, 3));
        assert_eq!(r.reverse(), c);
    }

    #[test]
    fn concat_with_empty_is_identity() {
        let mut c = Circuit::unstructured(3).unwrap();
        c.append_gate(Gate::cnot(0, 1).unwrap()).unwrap();
        let e = Circuit::unstructured(3).unwrap();
        assert_eq!(c.concat(&e).unwrap(), c);
        assert_eq!(e.concat(&c).unwrap(), c);
    }

    #[test]
    fn concat_wire_mismatch() {
        let a = Circuit::unstructured(5).unwrap();
        let b = Circuit::unstructured(6).unwrap();
        assert_eq!(
            a.concat(&b),
            Err(CircuitError::WireCountMismatch { left: 5, right: 6 })
        );
    }

    #[test]
    fn concat_layout_mismatch() {
        let l1 = RegisterLayout::stacked([("a", Role::InputA, 2)]).unwrap();
        let l2 = RegisterLayout::stacked([("b", Role::InputB, 2)]).unwrap();
        let a = Circuit::with_layout(l1).unwrap();
        let b = Circuit::with_layout(l2).unwrap();
        assert_eq!(a.concat(&b), Err(CircuitError::LayoutMismatch));
    }

    #[test]
    fn layout_must_cover_all_wires() {
        let layout = RegisterLayout::stacked([("a", Role::InputA, 2)]).unwrap();
        assert_eq!(Circuit::new(3, layout), Err(CircuitError::UncoveredWire(2)));
    }

    #[test]
    fn layout_rejects_overlap_and_duplicates() {
        let mut layout = RegisterLayout::stacked([("a", Role::InputA, 3)]).unwrap();
        let overlap = Register {
            name: "b".into(),
            role: Role::InputB,
            start: 2,
            width: 2,
        };
        assert!(matches!(
            layout.push(overlap),
            Err(CircuitError::RegisterOverlap { wire: 2, .. })
        ));
        let dup = Register {
            name: "a".into(),
            role: Role::InputB,
            start: 3,
            width: 1,
        };
        assert!(matches!(
            layout.push(dup),
            Err(CircuitError::DuplicateRegister(_))
        ));
    }

    #[test]
    fn swap_is_three_cnots_per_pair() {
        let layout =
            RegisterLayout::stacked([("p", Role::InputA, 4), ("q", Role::InputB, 4)]).unwrap();
        let swap = emit_swap(&layout, "p", "q").unwrap();
        let counts = swap.counts();
        assert_eq!(counts.cnot, 12);
        assert_eq!(counts.total, 12);
        assert_eq!(
            swap.gates()[..3],
            [
                Gate::Cnot {
                    control: 0,
                    target: 4
                },
                Gate::Cnot {
                    control: 4,
                    target: 0
                },
                Gate::Cnot {
                    control: 0,
                    target: 4
                },
            ]
        );
    }

    #[test]
    fn swap_width_mismatch() {
        let layout =
            RegisterLayout::stacked([("p", Role::InputA, 3), ("q", Role::InputB, 4)]).unwrap();
        assert!(matches!(
            emit_swap(&layout, "p", "q"),
            Err(CircuitError::WidthMismatch { .. })
        ));
        assert!(matches!(
            emit_swap(&layout, "p", "nope"),
            Err(CircuitError::UnknownRegister(_))
        ));
    }

    #[test]
    fn role_names_round_trip() {
        for r in Role::ALL {
            assert_eq!(Role::from_name(r.name()), Some(r));
        }
        assert_eq!(Role::from_name("ancilla"), None);
    }
}
