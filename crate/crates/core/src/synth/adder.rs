//! Ripple-carry adder built from CARRY and SUM blocks.

use crate::circuit::Wire;

use super::builder::Synth;

/// `c_out ^= maj(c_in, a, b)`; leaves `b` holding `a ^ b`. With no carry-in
/// wire the carry-in is the constant 0 and its Toffoli is dropped.
pub(crate) fn carry(s: &mut Synth, c_in: Option<Wire>, a: Wire, b: Wire, c_out: Wire) {
    s.toffoli(a, b, c_out);
    s.cnot(a, b);
    if let Some(c) = c_in {
        s.toffoli(c, b, c_out);
    }
}

pub(crate) fn carry_inverse(s: &mut Synth, c_in: Option<Wire>, a: Wire, b: Wire, c_out: Wire) {
    if let Some(c) = c_in {
        s.toffoli(c, b, c_out);
    }
    s.cnot(a, b);
    s.toffoli(a, b, c_out);
}

/// `b ^= a ^ c_in`.
pub(crate) fn sum(s: &mut Synth, c_in: Option<Wire>, a: Wire, b: Wire) {
    s.cnot(a, b);
    if let Some(c) = c_in {
        s.cnot(c, b);
    }
}

/// Adds the `n`-bit `a` into the `(n+1)`-bit `b` modulo `2^(n+1)`.
///
/// `carry` has `n - 1` wires (carry-in of bit 0 is the constant 0) or `n`
/// wires (uniform layout, `carry[0]` must hold 0). The carry out of the top
/// bit is the top wire of `b`. Every carry wire is restored to 0.
pub(crate) fn add(s: &mut Synth, a: &[Wire], b: &[Wire], carry_reg: &[Wire]) {
    let n = a.len();
    assert_eq!(b.len(), n + 1, "b must be one bit wider than a");
    let uniform = match carry_reg.len() {
        k if k + 1 == n => false,
        k if k == n => true,
        k => panic!("carry register of width {k} does not fit an {n}-bit adder"),
    };
    // Carry into bit i; c(n) is the top bit of b.
    let c = |i: usize| -> Option<Wire> {
        if i == n {
            Some(b[n])
        } else if uniform {
            Some(carry_reg[i])
        } else if i == 0 {
            None
        } else {
            Some(carry_reg[i - 1])
        }
    };

    for i in 0..n {
        s.block(format!("carry {i}"), |s| {
            carry(s, c(i), a[i], b[i], c(i + 1).unwrap())
        });
    }
    s.block(format!("sum {}", n - 1), |s| {
        s.cnot(a[n - 1], b[n - 1]);
        sum(s, c(n - 1), a[n - 1], b[n - 1]);
    });
    for i in (0..n - 1).rev() {
        s.block(format!("uncarry {i}"), |s| {
            carry_inverse(s, c(i), a[i], b[i], c(i + 1).unwrap())
        });
        s.block(format!("sum {i}"), |s| sum(s, c(i), a[i], b[i]));
    }
}
