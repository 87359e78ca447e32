//! Reversible modular arithmetic: constant addition, constant multiplication
//! built by compute-then-erase, modular exponentiation and the ancilla check.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gates::ReversiblePermutation;
use crate::numtheory::{bit_length, gcd, modinv, mul_mod, pow_mod};
use crate::statevector::{StateVector, ZERO_AMPLITUDE};

/// Mass above which an ancilla counts as dirty.
pub const ANCILLA_TOLERANCE: f64 = 1e-12;

fn check_modulus(n: u64, l: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("modulus must be positive"));
    }
    if l == 0 || l > ReversiblePermutation::MAX_WIDTH {
        return Err(Error::invalid(format!("register width {l} outside 1..=24")));
    }
    if n >= 1 << l {
        return Err(Error::invalid(format!("modulus {n} does not fit below 2^{l}")));
    }
    Ok(())
}

/// `b -> b + c mod n` on `[0, n)`, identity on `[n, 2^l)`.
pub fn add_const_mod(c: u64, n: u64, l: u32) -> Result<ReversiblePermutation> {
    check_modulus(n, l)?;
    if c >= n {
        return Err(Error::invalid(format!("addend {c} not reduced mod {n}")));
    }
    ReversiblePermutation::from_fn(l, |b| if b < n { (b + c) % n } else { b })
}

/// Register contents `(b, result)` after each stage of the multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StagedTrace {
    pub input: u64,
    pub after_compute: (u64, u64),
    pub after_erase: (u64, u64),
}

/// Classical trace of the two-stage multiplier on one input `b < n`.
///
/// Stage one adds `2^i c mod n` into `result` for every set bit of `b`.
/// Stage two subtracts `2^i c^-1 mod n` from `b` for every set bit of `result`.
pub fn staged_multiply(c: u64, n: u64, b: u64) -> Result<StagedTrace> {
    let c_inv = modinv(c, n)?;
    if b >= n {
        return Err(Error::invalid(format!("input {b} not reduced mod {n}")));
    }
    let mut result = 0;
    let mut term = c % n;
    let mut bits = b;
    while bits != 0 {
        if bits & 1 == 1 {
            result = (result + term) % n;
        }
        term = mul_mod(term, 2, n);
        bits >>= 1;
    }
    let after_compute = (b, result);

    let mut erased = b;
    let mut term = c_inv;
    let mut bits = result;
    while bits != 0 {
        if bits & 1 == 1 {
            erased = (erased + n - term) % n;
        }
        term = mul_mod(term, 2, n);
        bits >>= 1;
    }
    Ok(StagedTrace { input: b, after_compute, after_erase: (erased, result) })
}

/// `b -> b c mod n` on `[0, n)`, identity on `[n, 2^l)`.
///
/// Every image is taken from the staged trace, and the erased register is
/// checked to be zero for every input.
pub fn mul_const_mod(c: u64, n: u64, l: u32) -> Result<ReversiblePermutation> {
    check_modulus(n, l)?;
    let g = gcd(c, n);
    if g != 1 {
        return Err(Error::NotCoprime { value: c, modulus: n, gcd: g });
    }
    let mut map: Vec<u32> = (0..1u32 << l).collect();
    for b in 0..n {
        let trace = staged_multiply(c, n, b)?;
        if trace.after_erase.0 != 0 {
            return Err(Error::AncillaNotZero { mass: 1.0 });
        }
        map[b as usize] = trace.after_erase.1 as u32;
    }
    ReversiblePermutation::new(l, map)
}

/// Whether the watchdog only reports or also aborts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WatchdogMode {
    #[default]
    Diagnostic,
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AncillaReport {
    /// Probability that the checked register reads non-zero.
    pub off_zero_mass: f64,
    pub clean: bool,
}

impl AncillaReport {
    /// Passes the report through, or fails in strict mode if it is dirty.
    pub fn enforce(self, mode: WatchdogMode) -> Result<Self> {
        if mode == WatchdogMode::Strict && !self.clean {
            return Err(Error::AncillaNotZero { mass: self.off_zero_mass });
        }
        Ok(self)
    }
}

pub fn watchdog_check(state: &StateVector, wires: &[usize]) -> Result<AncillaReport> {
    let dist = state.exact_distribution(wires)?;
    let off_zero_mass = (dist.mass() - dist.probability(0)).clamp(0.0, 1.0);
    Ok(AncillaReport { off_zero_mass, clean: off_zero_mass <= ANCILLA_TOLERANCE })
}

/// The two-stage multiplier acting on a state with separate `b` and
/// `result` registers, for inspecting the erase step.
#[derive(Debug, Clone)]
pub struct StagedMultiplier {
    l: u32,
    adders: Vec<ReversiblePermutation>,
    subtractors: Vec<ReversiblePermutation>,
}

impl StagedMultiplier {
    pub fn new(c: u64, n: u64, l: u32) -> Result<Self> {
        check_modulus(n, l)?;
        let c_inv = modinv(c, n)?;
        let mut adders = Vec::with_capacity(l as usize);
        let mut subtractors = Vec::with_capacity(l as usize);
        for i in 0..l {
            let shift = pow_mod(2, i as u64, n);
            adders.push(add_const_mod(mul_mod(shift, c, n), n, l)?);
            let t = mul_mod(shift, c_inv, n);
            subtractors.push(add_const_mod((n - t) % n, n, l)?);
        }
        Ok(Self { l, adders, subtractors })
    }

    fn check(&self, b: &[usize], result: &[usize]) -> Result<()> {
        for reg in [b, result] {
            if reg.len() != self.l as usize {
                return Err(Error::WidthMismatch { expected: self.l as usize, got: reg.len() });
            }
        }
        Ok(())
    }

    pub fn compute(&self, state: &mut StateVector, b: &[usize], result: &[usize]) -> Result<()> {
        self.check(b, result)?;
        for (i, add) in self.adders.iter().enumerate() {
            state.apply_controlled_permutation(add, &[b[i]], result)?;
        }
        Ok(())
    }

    pub fn erase(&self, state: &mut StateVector, b: &[usize], result: &[usize]) -> Result<()> {
        self.check(b, result)?;
        for (i, sub) in self.subtractors.iter().enumerate() {
            state.apply_controlled_permutation(sub, &[result[i]], b)?;
        }
        Ok(())
    }

    /// Both stages, then the watchdog on `b`. The product is left in `result`.
    pub fn apply(
        &self,
        state: &mut StateVector,
        b: &[usize],
        result: &[usize],
        mode: WatchdogMode,
    ) -> Result<AncillaReport> {
        self.compute(state, b, result)?;
        self.erase(state, b, result)?;
        watchdog_check(state, b)?.enforce(mode)
    }
}

/// Modulus, base and precomputed `x^(2^i) mod n` for modular exponentiation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModExpSpec {
    n: u64,
    x: u64,
    l: u32,
    a_bits: usize,
    powers: Vec<u64>,
}

impl ModExpSpec {
    /// Output register width defaults to the bit length of `n`.
    pub fn new(n: u64, x: u64, a_bits: usize) -> Result<Self> {
        Self::with_width(n, x, a_bits, bit_length(n))
    }

    pub fn with_width(n: u64, x: u64, a_bits: usize, l: u32) -> Result<Self> {
        if n < 3 || n.is_multiple_of(2) {
            return Err(Error::invalid(format!("modulus {n} must be odd and at least 3")));
        }
        check_modulus(n, l)?;
        let g = gcd(x, n);
        if g != 1 {
            return Err(Error::NotCoprime { value: x, modulus: n, gcd: g });
        }
        if a_bits == 0 {
            return Err(Error::invalid("exponent register needs at least one bit"));
        }
        let mut powers = Vec::with_capacity(a_bits);
        let mut p = x % n;
        for _ in 0..a_bits {
            powers.push(p);
            p = mul_mod(p, p, n);
        }
        Ok(Self { n, x, l, a_bits, powers })
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn base(&self) -> u64 {
        self.x
    }

    pub fn width(&self) -> u32 {
        self.l
    }

    pub fn a_bits(&self) -> usize {
        self.a_bits
    }

    pub fn powers(&self) -> &[u64] {
        &self.powers
    }

    pub fn evaluate(&self, a: u64) -> u64 {
        pow_mod(self.x, a, self.n)
    }
}

/// Multiplies the `out` register by `x^(2^i)` controlled on `controls[i]`,
/// with no assumption on what `out` holds.
pub fn controlled_multiply_by_powers(
    state: &mut StateVector,
    spec: &ModExpSpec,
    controls: &[usize],
    out: &[usize],
) -> Result<()> {
    if controls.len() != spec.a_bits {
        return Err(Error::WidthMismatch { expected: spec.a_bits, got: controls.len() });
    }
    if out.len() != spec.l as usize {
        return Err(Error::WidthMismatch { expected: spec.l as usize, got: out.len() });
    }
    for (&ctrl, &power) in controls.iter().zip(&spec.powers) {
        if power == 1 {
            continue;
        }
        let perm = mul_const_mod(power, spec.n, spec.l)?;
        state.apply_controlled_permutation(&perm, &[ctrl], out)?;
    }
    Ok(())
}

/// `sum |a>|1> -> sum |a>|x^a mod n>`. Every basis state in the support must
/// have `out = 1`.
pub fn modexp_apply(state: &mut StateVector, spec: &ModExpSpec, a_wires: &[usize], out_wires: &[usize]) -> Result<()> {
    if out_wires.len() != spec.l as usize {
        return Err(Error::WidthMismatch { expected: spec.l as usize, got: out_wires.len() });
    }
    if state.max_amplitude_off(out_wires, 1)? > ZERO_AMPLITUDE {
        return Err(Error::invalid("output register must start in |1>"));
    }
    controlled_multiply_by_powers(state, spec, a_wires, out_wires)
}
