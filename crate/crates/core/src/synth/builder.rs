use crate::circuit::{Circuit, CircuitError, Gate, RegisterLayout, Span, Wire};

use super::{SwapMode, SynthOptions};

/// Gate emitter shared by all network builders.
///
/// Builders address *logical* wires (positions in the final layout). With
/// [`SwapMode::Relabel`] a register swap only permutes the logical-to-physical
/// map; `finish` then emits whatever physical swaps are needed to bring every
/// logical wire back to its own position.
pub(crate) struct Synth {
    gates: Vec<Gate>,
    spans: Vec<Span>,
    depth: usize,
    map: Vec<Wire>,
    pub(crate) opts: SynthOptions,
}

impl Synth {
    pub(crate) fn new(num_wires: usize, opts: SynthOptions) -> Self {
        Self {
            gates: Vec::new(),
            spans: Vec::new(),
            depth: 0,
            map: (0..num_wires).collect(),
            opts,
        }
    }

    pub(crate) fn not(&mut self, target: Wire) {
        self.gates.push(Gate::Not {
            target: self.map[target],
        });
    }

    pub(crate) fn cnot(&mut self, control: Wire, target: Wire) {
        debug_assert_ne!(control, target);
        self.gates.push(Gate::Cnot {
            control: self.map[control],
            target: self.map[target],
        });
    }

    pub(crate) fn toffoli(&mut self, c1: Wire, c2: Wire, target: Wire) {
        debug_assert!(c1 != c2 && c1 != target && c2 != target);
        self.gates.push(Gate::Toffoli {
            controls: [self.map[c1], self.map[c2]],
            target: self.map[target],
        });
    }

    /// Runs `f` inside a labelled span. Empty blocks leave no span.
    pub(crate) fn block<R>(
        &mut self,
        label: impl Into<String>,
        f: impl FnOnce(&mut Self) -> R,
    ) -> R {
        let start = self.gates.len();
        let depth = self.depth;
        self.depth += 1;
        let out = f(self);
        self.depth -= 1;
        if self.gates.len() > start {
            self.spans.push(Span {
                depth,
                start,
                end: self.gates.len(),
                label: label.into(),
            });
        }
        out
    }

    /// Emits the gates produced by `f` in reverse order. `f` must leave the
    /// wire map as it found it, which holds for every fragment whose swaps
    /// come in pairs.
    pub(crate) fn reversed(&mut self, label: impl Into<String>, f: impl FnOnce(&mut Self)) {
        self.block(label, |s| {
            let start = s.gates.len();
            let first_span = s.spans.len();
            let map_before = s.map.clone();
            f(s);
            assert_eq!(s.map, map_before, "reversed fragment changed the wire map");
            let end = s.gates.len();
            s.gates[start..].reverse();
            for span in &mut s.spans[first_span..] {
                (span.start, span.end) = (start + end - span.end, start + end - span.start);
            }
        });
    }

    /// Exchanges two equal-width logical wire groups.
    pub(crate) fn swap(&mut self, a: &[Wire], b: &[Wire]) {
        assert_eq!(a.len(), b.len(), "swap of unequal widths");
        match self.opts.swap_mode {
            SwapMode::Gates => {
                for (&x, &y) in a.iter().zip(b) {
                    self.cnot(x, y);
                    self.cnot(y, x);
                    self.cnot(x, y);
                }
            }
            SwapMode::Relabel => {
                for (&x, &y) in a.iter().zip(b) {
                    self.map.swap(x, y);
                }
            }
        }
    }

    fn physical_swap(&mut self, p: Wire, q: Wire) {
        self.gates.push(Gate::Cnot {
            control: p,
            target: q,
        });
        self.gates.push(Gate::Cnot {
            control: q,
            target: p,
        });
        self.gates.push(Gate::Cnot {
            control: p,
            target: q,
        });
    }

    pub(crate) fn finish(mut self, layout: RegisterLayout) -> Result<Circuit, CircuitError> {
        if self.map.iter().enumerate().any(|(i, &p)| i != p) {
            self.block("restore relabeled wires", |s| {
                for i in 0..s.map.len() {
                    let p = s.map[i];
                    if p == i {
                        continue;
                    }
                    // Logical wire `j` currently lives on physical wire `i`.
                    let j = s
                        .map
                        .iter()
                        .position(|&q| q == i)
                        .expect("map is a permutation");
                    s.physical_swap(i, p);
                    s.map[j] = p;
                    s.map[i] = i;
                }
            });
        }
        let num_wires = self.map.len();
        Circuit::from_parts(num_wires, layout, self.gates, self.spans)
    }
}
