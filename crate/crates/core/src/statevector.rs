//! Dense pure-state simulation.
//!
//! Amplitudes live in a flat table indexed by basis integer, where bit `i`
//! of the index is the value of wire `i`. A *register* is an ordered list of
//! wires read little-endian: `wires[k]` is bit `k` of the register value.
//! Gates use their own convention, see [`crate::gates`].

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::gates::{Gate, ReversiblePermutation};

pub const DEFAULT_MAX_WIRES: usize = 24;

/// Allowed drift of the squared norm away from 1.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Allowed drift of a distribution's total mass away from 1.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Amplitudes below this magnitude count as zero in support checks.
pub const ZERO_AMPLITUDE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    wires: usize,
    amps: Vec<Complex64>,
}

/// Exact probabilities of the values of some register.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOutcome {
    pub observed: u64,
    pub collapsed: StateVector,
}

fn check_wire_count(wires: usize, max: usize) -> Result<()> {
    if wires == 0 {
        return Err(Error::NoWires);
    }
    if wires > max {
        return Err(Error::TooManyWires { requested: wires, max });
    }
    Ok(())
}

/// Bit masks for `wires`, after checking they are distinct and in range.
fn wire_masks(total: usize, wires: &[usize]) -> Result<Vec<usize>> {
    let mut seen = 0usize;
    let mut masks = Vec::with_capacity(wires.len());
    for &w in wires {
        if w >= total {
            return Err(Error::WireOutOfRange { wire: w, wires: total });
        }
        let m = 1usize << w;
        if seen & m != 0 {
            return Err(Error::DuplicateWire(w));
        }
        seen |= m;
        masks.push(m);
    }
    Ok(masks)
}

/// Value of the register `masks` (little-endian) inside basis index `i`.
#[inline]
fn gather(i: usize, masks: &[usize]) -> usize {
    masks.iter().enumerate().fold(0, |acc, (k, &m)| acc | (usize::from(i & m != 0) << k))
}

/// Basis index `i` with the register `masks` overwritten by `value`.
#[inline]
fn scatter(i: usize, masks: &[usize], value: usize) -> usize {
    masks.iter().enumerate().fold(i, |acc, (k, &m)| if (value >> k) & 1 == 1 { acc | m } else { acc & !m })
}

impl StateVector {
    /// `|index>` on `wires` wires, limited to [`DEFAULT_MAX_WIRES`].
    pub fn basis(wires: usize, index: u64) -> Result<Self> {
        Self::basis_with_limit(wires, index, DEFAULT_MAX_WIRES)
    }

    pub fn basis_with_limit(wires: usize, index: u64, max_wires: usize) -> Result<Self> {
        check_wire_count(wires, max_wires)?;
        let dim = 1usize << wires;
        if index >= dim as u64 {
            return Err(Error::BasisOutOfRange { index, wires });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index as usize] = Complex64::new(1.0, 0.0);
        Ok(Self { wires, amps })
    }

    /// Takes ownership of an amplitude table, which must already be normalised.
    pub fn from_amplitudes(wires: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_wire_count(wires, DEFAULT_MAX_WIRES)?;
        if amps.len() != 1 << wires {
            return Err(Error::LengthMismatch { expected: 1 << wires, got: amps.len() });
        }
        let s = Self { wires, amps };
        s.check_norm()?;
        Ok(s)
    }

    pub fn wire_count(&self) -> usize {
        self.wires
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn check_norm(&self) -> Result<()> {
        let n = self.norm_sqr();
        if (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NormDrift { norm_sqr: n });
        }
        Ok(())
    }

    /// Applies `gate` to `wires` (first wire = most significant gate bit)
    /// and the identity everywhere else.
    pub fn apply_unitary(&mut self, gate: &Gate, wires: &[usize]) -> Result<()> {
        if gate.arity() != wires.len() {
            return Err(Error::ArityMismatch { expected: gate.arity(), got: wires.len() });
        }
        let masks = wire_masks(self.wires, wires)?;
        let dim = gate.dim();
        let k = wires.len();
        // offsets[g]: where gate basis index g lands inside the full index
        let offsets: Vec<usize> = (0..dim)
            .map(|g| (0..k).filter(|&pos| (g >> (k - 1 - pos)) & 1 == 1).map(|pos| masks[pos]).sum())
            .collect();
        let target_mask: usize = masks.iter().sum();

        if gate.is_diagonal() {
            let phases: Vec<Complex64> = (0..dim).map(|g| gate.entry(g, g)).collect();
            for (i, amp) in self.amps.iter_mut().enumerate() {
                let g = masks.iter().fold(0, |acc, &m| (acc << 1) | usize::from(i & m != 0));
                *amp *= phases[g];
            }
        } else {
            let mut local = vec![Complex64::new(0.0, 0.0); dim];
            for base in 0..self.amps.len() {
                if base & target_mask != 0 {
                    continue;
                }
                for (g, slot) in local.iter_mut().enumerate() {
                    *slot = self.amps[base | offsets[g]];
                }
                for (out, &off) in offsets.iter().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (inp, &a) in local.iter().enumerate() {
                        acc += a * gate.entry(inp, out);
                    }
                    self.amps[base | off] = acc;
                }
            }
        }
        self.check_norm()
    }

    /// Relabels basis states: the register `wires` holding `v` now holds `perm(v)`.
    pub fn apply_permutation(&mut self, perm: &ReversiblePermutation, wires: &[usize]) -> Result<()> {
        self.apply_controlled_permutation(perm, &[], wires)
    }

    /// Like [`apply_permutation`](Self::apply_permutation), but only on basis
    /// states where every control wire is 1.
    pub fn apply_controlled_permutation(
        &mut self,
        perm: &ReversiblePermutation,
        controls: &[usize],
        targets: &[usize],
    ) -> Result<()> {
        if perm.width() as usize != targets.len() {
            return Err(Error::WidthMismatch { expected: perm.width() as usize, got: targets.len() });
        }
        let all: Vec<usize> = controls.iter().chain(targets).copied().collect();
        wire_masks(self.wires, &all)?;
        let control_mask: usize = controls.iter().map(|&w| 1usize << w).sum();
        let masks: Vec<usize> = targets.iter().map(|&w| 1usize << w).collect();

        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (i, &a) in self.amps.iter().enumerate() {
            let j = if i & control_mask == control_mask {
                scatter(i, &masks, perm.apply(gather(i, &masks) as u64) as usize)
            } else {
                i
            };
            out[j] = a;
        }
        self.amps = out;
        Ok(())
    }

    /// Probability of each value of the register `wires`.
    pub fn exact_distribution(&self, wires: &[usize]) -> Result<Distribution> {
        if wires.is_empty() {
            return Err(Error::EmptyWireSet);
        }
        let masks = wire_masks(self.wires, wires)?;
        let mut probs = vec![0.0; 1 << wires.len()];
        for (i, a) in self.amps.iter().enumerate() {
            probs[gather(i, &masks)] += a.norm_sqr();
        }
        Distribution::new(probs)
    }

    /// Measures the register `wires` in the canonical basis.
    pub fn sample_measurement<R: Rng + ?Sized>(&self, rng: &mut R, wires: &[usize]) -> Result<MeasurementOutcome> {
        let dist = self.exact_distribution(wires)?;
        let observed = dist.sample(rng);
        let p = dist.probability(observed);
        if p <= 0.0 {
            return Err(Error::ZeroMassOutcome { outcome: observed as u64 });
        }
        let masks = wire_masks(self.wires, wires)?;
        let scale = 1.0 / p.sqrt();
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, &a)| if gather(i, &masks) == observed { a * scale } else { Complex64::new(0.0, 0.0) })
            .collect();
        let collapsed = StateVector { wires: self.wires, amps };
        collapsed.check_norm()?;
        Ok(MeasurementOutcome { observed: observed as u64, collapsed })
    }

    /// Largest `|a_i|` over basis states whose register `wires` is not `value`.
    pub fn max_amplitude_off(&self, wires: &[usize], value: u64) -> Result<f64> {
        let masks = wire_masks(self.wires, wires)?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| gather(*i, &masks) as u64 != value)
            .map(|(_, a)| a.norm())
            .fold(0.0, f64::max))
    }
}

impl Distribution {
    /// Validates that every entry is a probability and the total is 1 within 1e-9.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyWireSet);
        }
        if let Some(bad) = probs.iter().find(|p| !(-MASS_TOLERANCE..=1.0 + MASS_TOLERANCE).contains(*p)) {
            return Err(Error::invalid(format!("probability {bad} outside [0, 1]")));
        }
        let mass: f64 = probs.iter().sum();
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::NormDrift { norm_sqr: mass });
        }
        Ok(Self { probs: probs.into_iter().map(|p| p.clamp(0.0, 1.0)).collect() })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probability(&self, outcome: usize) -> f64 {
        self.probs.get(outcome).copied().unwrap_or(0.0)
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Largest pointwise difference to another distribution over the same outcomes.
    pub fn max_abs_diff(&self, other: &Distribution) -> f64 {
        let n = self.len().max(other.len());
        (0..n).map(|i| (self.probability(i) - other.probability(i)).abs()).fold(0.0, f64::max)
    }

    /// Inverse-CDF draw. Zero-probability outcomes are never returned.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen::<f64>() * self.mass();
        let mut acc = 0.0;
        let mut last_positive = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > 0.0 {
                acc += p;
                last_positive = i;
                if u < acc {
                    return i;
                }
            }
        }
        last_positive
    }
}
