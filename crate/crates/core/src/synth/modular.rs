//! Modular adder, controlled modular multiplier and modular exponentiation.

use crate::circuit::Wire;

use super::adder::add;
use super::builder::Synth;

/// Wires shared by every network that contains a modular adder.
pub(crate) struct AdderWorkspace {
    pub carry: Vec<Wire>,
    pub modulus: Vec<Wire>,
    pub t: Wire,
}

fn set_bits(value: u64, width: usize) -> impl Iterator<Item = usize> {
    (0..width).filter(move |&j| (value >> j) & 1 == 1)
}

/// `b ← (a + b) mod N` for `a, b < N`, with `ws.modulus` holding `N` on entry
/// and exit and `t` entering and leaving as 0.
///
/// After subtracting `N`, the top bit of `b` is 1 on underflow. It is
/// inverted into `t`, so `t = 1` means `N` was subtracted and must stay
/// subtracted; the conditional clear then zeroes the copy of `N` exactly
/// in that case before it is added back.
pub(crate) fn modular_add(
    s: &mut Synth,
    a: &[Wire],
    b: &[Wire],
    ws: &AdderWorkspace,
    modulus: u64,
) {
    let n = a.len();
    let top = b[n];
    s.block("add a", |s| add(s, a, b, &ws.carry));
    s.block("swap a,N", |s| s.swap(a, &ws.modulus));
    s.reversed("sub N", |s| add(s, a, b, &ws.carry));
    s.block("flag t", |s| {
        s.not(top);
        s.cnot(top, ws.t);
        s.not(top);
    });
    s.block("clear N if t", |s| {
        for j in set_bits(modulus, n) {
            s.cnot(ws.t, a[j]);
        }
    });
    s.block("add back", |s| add(s, a, b, &ws.carry));
    s.block("restore N if t", |s| {
        for j in set_bits(modulus, n) {
            s.cnot(ws.t, a[j]);
        }
    });
    s.block("swap back", |s| s.swap(a, &ws.modulus));
    s.reversed("sub a", |s| add(s, a, b, &ws.carry));
    s.block("reset t", |s| s.cnot(top, ws.t));
    s.block("add a", |s| add(s, a, b, &ws.carry));
}

/// `|c; x, 0⟩ → |c; x, k·x mod N⟩` when `c = 1`, `|c; x, x⟩` when `c = 0`.
///
/// `addends[i]` is the reduced stage constant `(2^i · k) mod N`. `addend` is
/// an `n`-wire scratch register that is loaded and unloaded around each
/// modular addition.
#[allow(clippy::too_many_arguments)]
pub(crate) fn controlled_multiply(
    s: &mut Synth,
    control: Wire,
    x: &[Wire],
    result: &[Wire],
    addend: &[Wire],
    ws: &AdderWorkspace,
    addends: &[u64],
    modulus: u64,
) {
    let n = x.len();
    assert_eq!(addends.len(), n);
    for (i, &k) in addends.iter().enumerate() {
        s.block(format!("stage {i}: add {k}"), |s| {
            s.block("load", |s| {
                for j in set_bits(k, n) {
                    s.toffoli(control, x[i], addend[j]);
                }
            });
            s.block("modadd", |s| modular_add(s, addend, result, ws, modulus));
            s.block("unload", |s| {
                for j in set_bits(k, n) {
                    s.toffoli(control, x[i], addend[j]);
                }
            });
        });
    }
    s.block("copy x if c=0", |s| {
        s.not(control);
        for j in 0..n {
            s.toffoli(control, x[j], result[j]);
        }
        s.not(control);
    });
}

/// One stage per exponent bit: multiply by `k`, swap the two product
/// registers, then run the multiplication by `k⁻¹` backwards to clear the
/// old product. `stages` holds `(k, k⁻¹)` pairs and `addends` the matching
/// reduced constants of each multiplier.
#[allow(clippy::too_many_arguments)]
pub(crate) fn modular_exponentiate(
    s: &mut Synth,
    x: &[Wire],
    product: &[Wire],
    scratch: &[Wire],
    addend: &[Wire],
    ws: &AdderWorkspace,
    stages: &[(u64, u64)],
    modulus: u64,
    doubling: impl Fn(u64) -> Vec<u64>,
) {
    let n = product.len();
    s.block("load N", |s| {
        for j in set_bits(modulus, n) {
            s.not(ws.modulus[j]);
        }
    });
    for (i, &(k, k_inv)) in stages.iter().enumerate() {
        let forward = doubling(k);
        let backward = doubling(k_inv);
        s.block(format!("stage {i}"), |s| {
            s.block(format!("multiply by {k}"), |s| {
                controlled_multiply(s, x[i], product, scratch, addend, ws, &forward, modulus)
            });
            s.block("swap", |s| s.swap(product, &scratch[..n]));
            s.reversed(format!("unmultiply by {k_inv}"), |s| {
                controlled_multiply(s, x[i], product, scratch, addend, ws, &backward, modulus)
            });
        });
    }
    s.block("unload N", |s| {
        for j in set_bits(modulus, n) {
            s.not(ws.modulus[j]);
        }
    });
}
