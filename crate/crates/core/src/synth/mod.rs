//! Network synthesis: plain adder, subtractor, modular adder, controlled
//! modular multiplier and modular exponentiation.
//!
//! Every builder returns a [`Circuit`] whose layout names the registers
//! listed in [`reg`]. Classical parameters (`N`, multipliers, bases) are
//! folded into the gate pattern; the only runtime-loaded constant is the
//! modulus register of the modular adder, which the exponentiation network
//! loads and unloads itself.

mod adder;
mod builder;
mod modular;

use std::fmt;

use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, RegisterLayout, Role, Wire};
use crate::numtheory::{gcd, mod_inverse, mod_pow};

use builder::Synth;
use modular::AdderWorkspace;

/// Register names used by the builders.
pub mod reg {
    pub const A: &str = "a";
    pub const B: &str = "b";
    pub const CARRY: &str = "carry";
    pub const MODULUS: &str = "modulus";
    pub const T: &str = "t";
    pub const CONTROL: &str = "c";
    pub const X: &str = "x";
    pub const RESULT: &str = "result";
    pub const ADDEND: &str = "addend";
    pub const ACC: &str = "acc";
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("bit width n must be at least 1")]
    ZeroWidth,
    #[error("modulus N = {modulus} violates 2 <= N < 2^n with n = {n}")]
    ModulusOutOfRange { modulus: u64, n: usize },
    #[error("multiplier a = {multiplier} violates 0 <= a < N = {modulus}")]
    MultiplierOutOfRange { multiplier: u64, modulus: u64 },
    #[error("base a = {base} is not coprime to N = {modulus} (gcd = {gcd})")]
    NotCoprime { base: u64, modulus: u64, gcd: u64 },
    #[error("exponent width m must be at least 1")]
    ZeroExponentWidth,
    #[error("wires {0:?} are not pairwise distinct")]
    DuplicateWires(Vec<Wire>),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// How register swaps are realized.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum SwapMode {
    /// Three CNOTs per exchanged bit pair.
    #[default]
    Gates,
    /// Swaps only rename wires; any leftover renaming at the end of the
    /// network is undone with physical swaps.
    Relabel,
}

/// Width of the adder's carry register.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum CarryLayout {
    /// `n - 1` carry wires; the carry into bit 0 is the constant 0.
    #[default]
    Compact,
    /// `n` carry wires, the first of which must hold 0.
    Uniform,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct SynthOptions {
    pub swap_mode: SwapMode,
    pub carry_layout: CarryLayout,
}

impl SynthOptions {
    fn carry_width(&self, n: usize) -> usize {
        match self.carry_layout {
            CarryLayout::Compact => n - 1,
            CarryLayout::Uniform => n,
        }
    }
}

fn check_width(n: usize) -> Result<(), SynthError> {
    if n == 0 {
        Err(SynthError::ZeroWidth)
    } else {
        Ok(())
    }
}

fn check_modulus(n: usize, modulus: u64) -> Result<(), SynthError> {
    check_width(n)?;
    let fits = n >= 64 || modulus < (1u64 << n);
    if modulus < 2 || !fits {
        return Err(SynthError::ModulusOutOfRange { modulus, n });
    }
    Ok(())
}

fn stacked(regs: &[(&str, Role, usize)]) -> RegisterLayout {
    // Zero-width registers only arise for the compact carry at n = 1.
    RegisterLayout::stacked(regs.iter().copied().filter(|r| r.2 > 0))
        .expect("builder layouts are well formed")
}

fn wires(layout: &RegisterLayout, name: &str) -> Vec<Wire> {
    layout
        .get(name)
        .map(|r| r.wires().collect())
        .unwrap_or_default()
}

fn workspace(layout: &RegisterLayout) -> AdderWorkspace {
    AdderWorkspace {
        carry: wires(layout, reg::CARRY),
        modulus: wires(layout, reg::MODULUS),
        t: layout.get(reg::T).expect("layout has a t qubit").start,
    }
}

/// `(2^i · k) mod N` for `i = 0..n`.
pub fn doubling_constants(k: u64, n: usize, modulus: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    let mut cur = k % modulus;
    for _ in 0..n {
        out.push(cur);
        cur = ((cur as u128 * 2) % modulus as u128) as u64;
    }
    out
}

/// Plain adder on an `n`-bit `a`, an `(n+1)`-bit `b` and the carry register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AdderSpec {
    pub n: usize,
}

impl AdderSpec {
    pub fn new(n: usize) -> Result<Self, SynthError> {
        check_width(n)?;
        Ok(Self { n })
    }

    pub fn layout(&self, opts: SynthOptions) -> RegisterLayout {
        let n = self.n;
        stacked(&[
            (reg::A, Role::InputA, n),
            (reg::B, Role::InputB, n + 1),
            (reg::CARRY, Role::Carry, opts.carry_width(n)),
        ])
    }
}

/// Modular adder for a fixed modulus `2 <= N < 2^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModAdderSpec {
    pub n: usize,
    pub modulus: u64,
}

impl ModAdderSpec {
    pub fn new(n: usize, modulus: u64) -> Result<Self, SynthError> {
        check_modulus(n, modulus)?;
        Ok(Self { n, modulus })
    }

    pub fn layout(&self, opts: SynthOptions) -> RegisterLayout {
        let n = self.n;
        stacked(&[
            (reg::A, Role::InputA, n),
            (reg::B, Role::InputB, n + 1),
            (reg::CARRY, Role::Carry, opts.carry_width(n)),
            (reg::MODULUS, Role::ModulusTemp, n),
            (reg::T, Role::OverflowT, 1),
        ])
    }
}

/// Controlled multiplication by a classical `0 <= a < N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CMultSpec {
    pub n: usize,
    pub multiplier: u64,
    pub modulus: u64,
}

impl CMultSpec {
    pub fn new(n: usize, multiplier: u64, modulus: u64) -> Result<Self, SynthError> {
        check_modulus(n, modulus)?;
        if multiplier >= modulus {
            return Err(SynthError::MultiplierOutOfRange {
                multiplier,
                modulus,
            });
        }
        Ok(Self {
            n,
            multiplier,
            modulus,
        })
    }

    /// The constant added at stage `i`: `(2^i · a) mod N`.
    pub fn stage_addends(&self) -> Vec<u64> {
        doubling_constants(self.multiplier, self.n, self.modulus)
    }

    pub fn layout(&self, opts: SynthOptions) -> RegisterLayout {
        let n = self.n;
        stacked(&[
            (reg::CONTROL, Role::Control, 1),
            (reg::X, Role::InputX, n),
            (reg::RESULT, Role::Result, n + 1),
            (reg::ADDEND, Role::MultTemp, n),
            (reg::CARRY, Role::Carry, opts.carry_width(n)),
            (reg::MODULUS, Role::ModulusTemp, n),
            (reg::T, Role::OverflowT, 1),
        ])
    }
}

/// Multiplier applied in one exponentiation stage together with the
/// inverse that clears the previous product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StageConstant {
    pub multiplier: u64,
    pub inverse: u64,
}

/// `x ↦ a^x mod N` with an `m`-bit exponent register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModExpSpec {
    pub n: usize,
    pub exp_bits: usize,
    pub base: u64,
    pub modulus: u64,
}

impl ModExpSpec {
    pub fn new(n: usize, exp_bits: usize, base: u64, modulus: u64) -> Result<Self, SynthError> {
        check_modulus(n, modulus)?;
        if exp_bits == 0 {
            return Err(SynthError::ZeroExponentWidth);
        }
        let g = gcd(base, modulus);
        if g != 1 {
            return Err(SynthError::NotCoprime {
                base,
                modulus,
                gcd: g,
            });
        }
        Ok(Self {
            n,
            exp_bits,
            base,
            modulus,
        })
    }

    /// The usual Shor sizing: a `2n`-bit exponent.
    pub fn with_default_exponent(n: usize, base: u64, modulus: u64) -> Result<Self, SynthError> {
        Self::new(n, 2 * n, base, modulus)
    }

    /// `a^(2^i) mod N` and its inverse for `i = 0..m`.
    pub fn stage_constants(&self) -> Vec<StageConstant> {
        let mut out = Vec::with_capacity(self.exp_bits);
        let mut k = self.base % self.modulus;
        for _ in 0..self.exp_bits {
            let inverse = mod_inverse(k, self.modulus).expect("base is coprime to the modulus");
            out.push(StageConstant {
                multiplier: k,
                inverse,
            });
            k = mod_pow(k, 2, self.modulus).expect("modulus >= 2");
        }
        out
    }

    /// Width of every register, usable without a valid `N` (only `n` and
    /// `m` matter).
    pub fn layout_for(n: usize, exp_bits: usize, opts: SynthOptions) -> RegisterLayout {
        stacked(&[
            (reg::X, Role::InputX, exp_bits),
            (reg::RESULT, Role::Result, n),
            (reg::ACC, Role::ExpTemp, n + 1),
            (reg::ADDEND, Role::MultTemp, n),
            (reg::CARRY, Role::Carry, opts.carry_width(n)),
            (reg::MODULUS, Role::ModulusTemp, n),
            (reg::T, Role::OverflowT, 1),
        ])
    }

    pub fn layout(&self, opts: SynthOptions) -> RegisterLayout {
        Self::layout_for(self.n, self.exp_bits, opts)
    }
}

/// Which network a spec describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NetworkKind {
    Adder,
    Subtractor,
    ModularAdder,
    ControlledMultiplier,
    ModularExponentiation,
}

impl NetworkKind {
    pub const ALL: [NetworkKind; 5] = [
        NetworkKind::Adder,
        NetworkKind::Subtractor,
        NetworkKind::ModularAdder,
        NetworkKind::ControlledMultiplier,
        NetworkKind::ModularExponentiation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NetworkKind::Adder => "adder",
            NetworkKind::Subtractor => "subtractor",
            NetworkKind::ModularAdder => "modadd",
            NetworkKind::ControlledMultiplier => "cmult",
            NetworkKind::ModularExponentiation => "modexp",
        }
    }
}

impl fmt::Display for NetworkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for NetworkKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NetworkKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown network `{s}`"))
    }
}

/// Any buildable network with its classical parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NetworkSpec {
    Adder(AdderSpec),
    Subtractor(AdderSpec),
    ModularAdder(ModAdderSpec),
    ControlledMultiplier(CMultSpec),
    ModularExponentiation(ModExpSpec),
}

impl NetworkSpec {
    pub fn kind(&self) -> NetworkKind {
        match self {
            NetworkSpec::Adder(_) => NetworkKind::Adder,
            NetworkSpec::Subtractor(_) => NetworkKind::Subtractor,
            NetworkSpec::ModularAdder(_) => NetworkKind::ModularAdder,
            NetworkSpec::ControlledMultiplier(_) => NetworkKind::ControlledMultiplier,
            NetworkSpec::ModularExponentiation(_) => NetworkKind::ModularExponentiation,
        }
    }

    /// Bit width `n` of the modulus (or of the adder operand).
    pub fn n(&self) -> usize {
        match self {
            NetworkSpec::Adder(s) | NetworkSpec::Subtractor(s) => s.n,
            NetworkSpec::ModularAdder(s) => s.n,
            NetworkSpec::ControlledMultiplier(s) => s.n,
            NetworkSpec::ModularExponentiation(s) => s.n,
        }
    }

    pub fn layout(&self, opts: SynthOptions) -> RegisterLayout {
        match self {
            NetworkSpec::Adder(s) | NetworkSpec::Subtractor(s) => s.layout(opts),
            NetworkSpec::ModularAdder(s) => s.layout(opts),
            NetworkSpec::ControlledMultiplier(s) => s.layout(opts),
            NetworkSpec::ModularExponentiation(s) => s.layout(opts),
        }
    }

    pub fn build(&self, opts: SynthOptions) -> Result<Circuit, SynthError> {
        match *self {
            NetworkSpec::Adder(s) => build_adder(s.n, opts),
            NetworkSpec::Subtractor(s) => build_subtractor(s.n, opts),
            NetworkSpec::ModularAdder(s) => build_modular_adder(s.n, s.modulus, opts),
            NetworkSpec::ControlledMultiplier(s) => build_cmult(s.n, s.multiplier, s.modulus, opts),
            NetworkSpec::ModularExponentiation(s) => {
                build_modexp(s.n, s.exp_bits, s.base, s.modulus, opts)
            }
        }
    }
}

impl fmt::Display for NetworkSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NetworkSpec::Adder(s) => write!(f, "adder n={}", s.n),
            NetworkSpec::Subtractor(s) => write!(f, "subtractor n={}", s.n),
            NetworkSpec::ModularAdder(s) => write!(f, "modadd n={} N={}", s.n, s.modulus),
            NetworkSpec::ControlledMultiplier(s) => {
                write!(f, "cmult n={} a={} N={}", s.n, s.multiplier, s.modulus)
            }
            NetworkSpec::ModularExponentiation(s) => write!(
                f,
                "modexp n={} m={} a={} N={}",
                s.n, s.exp_bits, s.base, s.modulus
            ),
        }
    }
}

fn distinct(ws: &[Wire]) -> Result<(), SynthError> {
    for (i, w) in ws.iter().enumerate() {
        if ws[..i].contains(w) {
            return Err(SynthError::DuplicateWires(ws.to_vec()));
        }
    }
    Ok(())
}

fn fragment(ws: &[Wire], f: impl FnOnce(&mut Synth)) -> Result<Circuit, SynthError> {
    distinct(ws)?;
    let num_wires = ws.iter().max().map_or(1, |m| m + 1);
    let mut s = Synth::new(num_wires, SynthOptions::default());
    f(&mut s);
    Ok(s.finish(RegisterLayout::empty())?)
}

/// CARRY block: `c_out ^= maj(c_in, a, b)`, with `b` left holding `a ^ b`.
/// The result is an unstructured circuit on `max(wire) + 1` wires.
pub fn build_carry(c_in: Wire, a: Wire, b: Wire, c_out: Wire) -> Result<Circuit, SynthError> {
    fragment(&[c_in, a, b, c_out], |s| {
        adder::carry(s, Some(c_in), a, b, c_out)
    })
}

/// SUM block: `b ^= a ^ c_in`.
pub fn build_sum(c_in: Wire, a: Wire, b: Wire) -> Result<Circuit, SynthError> {
    fragment(&[c_in, a, b], |s| adder::sum(s, Some(c_in), a, b))
}

/// `|a, b, 0⟩ → |a, a + b, 0⟩` with `b` one bit wider than `a`.
pub fn build_adder(n: usize, opts: SynthOptions) -> Result<Circuit, SynthError> {
    let layout = AdderSpec::new(n)?.layout(opts);
    let mut s = Synth::new(layout.width(), opts);
    adder::add(
        &mut s,
        &wires(&layout, reg::A),
        &wires(&layout, reg::B),
        &wires(&layout, reg::CARRY),
    );
    Ok(s.finish(layout)?)
}

/// The adder run backwards: `|x, y⟩ → |x, (y − x) mod 2^(n+1)⟩`. The top bit
/// of the second register flags `y < x`.
pub fn build_subtractor(n: usize, opts: SynthOptions) -> Result<Circuit, SynthError> {
    Ok(build_adder(n, opts)?.reverse())
}

/// `|a, b⟩ → |a, (a + b) mod N⟩` for `a, b < N`; the `modulus` register
/// must hold `N` and `t` must be 0 on entry, and both are restored.
pub fn build_modular_adder(
    n: usize,
    modulus: u64,
    opts: SynthOptions,
) -> Result<Circuit, SynthError> {
    let layout = ModAdderSpec::new(n, modulus)?.layout(opts);
    let mut s = Synth::new(layout.width(), opts);
    modular::modular_add(
        &mut s,
        &wires(&layout, reg::A),
        &wires(&layout, reg::B),
        &workspace(&layout),
        modulus,
    );
    Ok(s.finish(layout)?)
}

/// `|c; x, 0⟩ → |c; x, a·x mod N⟩` if `c = 1`, else `|c; x, x⟩`. The
/// `modulus` register must hold `N`; all other scratch starts and ends at 0.
pub fn build_cmult(
    n: usize,
    multiplier: u64,
    modulus: u64,
    opts: SynthOptions,
) -> Result<Circuit, SynthError> {
    let spec = CMultSpec::new(n, multiplier, modulus)?;
    let layout = spec.layout(opts);
    let mut s = Synth::new(layout.width(), opts);
    modular::controlled_multiply(
        &mut s,
        layout.require(reg::CONTROL)?.start,
        &wires(&layout, reg::X),
        &wires(&layout, reg::RESULT),
        &wires(&layout, reg::ADDEND),
        &workspace(&layout),
        &spec.stage_addends(),
        modulus,
    );
    Ok(s.finish(layout)?)
}

/// `|x, 1, 0…0⟩ → |x, a^x mod N, 0…0⟩`. The caller sets the `result`
/// register to 1; the network loads and clears `N` in the `modulus`
/// register itself, so every other register starts and ends at 0.
pub fn build_modexp(
    n: usize,
    exp_bits: usize,
    base: u64,
    modulus: u64,
    opts: SynthOptions,
) -> Result<Circuit, SynthError> {
    let spec = ModExpSpec::new(n, exp_bits, base, modulus)?;
    let layout = spec.layout(opts);
    let stages: Vec<(u64, u64)> = spec
        .stage_constants()
        .iter()
        .map(|c| (c.multiplier, c.inverse))
        .collect();
    let mut s = Synth::new(layout.width(), opts);
    modular::modular_exponentiate(
        &mut s,
        &wires(&layout, reg::X),
        &wires(&layout, reg::RESULT),
        &wires(&layout, reg::ACC),
        &wires(&layout, reg::ADDEND),
        &workspace(&layout),
        &stages,
        modulus,
        |k| doubling_constants(k, n, modulus),
    );
    Ok(s.finish(layout)?)
}
