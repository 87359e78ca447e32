//! Quantum Fourier transform over `q = 2^l` from `R` and controlled-phase
//! gates, plus the approximate variant that drops the smallest phases.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gates::{standard_gate, Gate, GateKind, ReversiblePermutation};
use crate::statevector::{StateVector, DEFAULT_MAX_WIRES};

/// Largest `q` for which the dense DFT matrix is built.
pub const MAX_DENSE_Q: u64 = 1 << 12;

/// One gate of the transform, addressed by bit position inside the register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QftGate {
    R { bit: usize },
    /// Phase `pi / 2^(high - low)` when both bits are 1.
    S { low: usize, high: usize },
}

/// How the bit-reversed output of the gate sequence is resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BitReversalPolicy {
    /// Leave the bits where they are and read the register back to front.
    #[default]
    ReversedReadout,
    /// Physically relabel the register afterwards so it reads in natural order.
    RelabelWires,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QftCircuit {
    bits: usize,
    gates: Vec<QftGate>,
    /// `Some(m)` for the approximate transform keeping only `S` gates with `high - low <= m`.
    cutoff: Option<usize>,
    policy: BitReversalPolicy,
}

pub fn bit_reverse(i: u64, l: u32) -> u64 {
    if l == 0 {
        return 0;
    }
    i.reverse_bits() >> (u64::BITS - l)
}

fn build(l: usize, cutoff: Option<usize>) -> Vec<QftGate> {
    let mut gates = Vec::with_capacity(l * (l + 1) / 2);
    for low in (0..l).rev() {
        for high in (low + 1..l).rev() {
            if cutoff.is_none_or(|m| high - low <= m) {
                gates.push(QftGate::S { low, high });
            }
        }
        gates.push(QftGate::R { bit: low });
    }
    gates
}

/// Exact transform on `l` bits.
pub fn qft_circuit(l: usize) -> Result<QftCircuit> {
    if !(1..=DEFAULT_MAX_WIRES).contains(&l) {
        return Err(Error::invalid(format!("QFT width {l} outside 1..=24")));
    }
    Ok(QftCircuit { bits: l, gates: build(l, None), cutoff: None, policy: BitReversalPolicy::default() })
}

/// Approximate transform dropping every `S` gate whose bits are more than `m` apart.
pub fn aqft_circuit(l: usize, m: usize) -> Result<QftCircuit> {
    if !(1..=DEFAULT_MAX_WIRES).contains(&l) {
        return Err(Error::invalid(format!("QFT width {l} outside 1..=24")));
    }
    if m < 1 || m + 1 > l {
        return Err(Error::invalid(format!("AQFT cutoff {m} outside 1..={}", l.saturating_sub(1))));
    }
    Ok(QftCircuit { bits: l, gates: build(l, Some(m)), cutoff: Some(m), policy: BitReversalPolicy::default() })
}

/// Default cutoff for the approximate transform: `ceil(log2 l) + 2`, capped at `l - 1`.
pub fn default_aqft_cutoff(l: usize) -> usize {
    let log = usize::BITS - (l.max(1) - 1).leading_zeros();
    (log as usize + 2).min(l.saturating_sub(1)).max(1)
}

impl QftCircuit {
    pub fn with_policy(mut self, policy: BitReversalPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn gates(&self) -> &[QftGate] {
        &self.gates
    }

    pub fn cutoff(&self) -> Option<usize> {
        self.cutoff
    }

    pub fn policy(&self) -> BitReversalPolicy {
        self.policy
    }

    pub fn r_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, QftGate::R { .. })).count()
    }

    pub fn s_count(&self) -> usize {
        self.gates.len() - self.r_count()
    }

    fn check_register(&self, register: &[usize]) -> Result<()> {
        if register.len() != self.bits {
            return Err(Error::WidthMismatch { expected: self.bits, got: register.len() });
        }
        Ok(())
    }

    fn gate_and_wires(&self, g: &QftGate, register: &[usize]) -> (Gate, Vec<usize>) {
        match *g {
            QftGate::R { bit } => (standard_gate(GateKind::R), vec![register[bit]]),
            QftGate::S { low, high } => (
                standard_gate(GateKind::S { exponent: (high - low) as u32 }),
                vec![register[low], register[high]],
            ),
        }
    }

    fn reversal(&self) -> Result<ReversiblePermutation> {
        let l = self.bits as u32;
        ReversiblePermutation::from_fn(l, |v| bit_reverse(v, l))
    }

    /// Transforms the register `register` (little-endian) in place and
    /// returns the wires to read the Fourier index from, little-endian.
    pub fn apply(&self, state: &mut StateVector, register: &[usize]) -> Result<Vec<usize>> {
        self.check_register(register)?;
        for g in &self.gates {
            let (gate, wires) = self.gate_and_wires(g, register);
            state.apply_unitary(&gate, &wires)?;
        }
        match self.policy {
            BitReversalPolicy::ReversedReadout => Ok(register.iter().rev().copied().collect()),
            BitReversalPolicy::RelabelWires => {
                state.apply_permutation(&self.reversal()?, register)?;
                Ok(register.to_vec())
            }
        }
    }

    /// Undoes [`apply`](Self::apply) on the same register.
    pub fn apply_inverse(&self, state: &mut StateVector, register: &[usize]) -> Result<()> {
        self.check_register(register)?;
        if self.policy == BitReversalPolicy::RelabelWires {
            state.apply_permutation(&self.reversal()?, register)?;
        }
        for g in self.gates.iter().rev() {
            let (gate, wires) = self.gate_and_wires(g, register);
            state.apply_unitary(&gate.adjoint(), &wires)?;
        }
        Ok(())
    }

    /// Dense operator with entry `(a, c)` = amplitude of reading `c` after
    /// transforming `|a>`, bit reversal resolved. Only for `l <= 12`.
    pub fn operator_matrix(&self) -> Result<Vec<Vec<Complex64>>> {
        if self.bits > 12 {
            return Err(Error::invalid("operator matrix limited to 12 bits"));
        }
        let q = 1usize << self.bits;
        let register: Vec<usize> = (0..self.bits).collect();
        let mut rows = Vec::with_capacity(q);
        for a in 0..q {
            let mut s = StateVector::basis(self.bits, a as u64)?;
            let readout = self.apply(&mut s, &register)?;
            let row = (0..q)
                .map(|c| {
                    let idx: usize = readout.iter().enumerate().map(|(k, &w)| ((c >> k) & 1) << w).sum();
                    s.amplitude(idx)
                })
                .collect();
            rows.push(row);
        }
        Ok(rows)
    }
}

/// Dense DFT matrix with entry `(a, c) = exp(2 pi i a c / q) / sqrt q`.
pub fn qft_matrix(q: u64) -> Result<Vec<Vec<Complex64>>> {
    if !q.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(q));
    }
    if q > MAX_DENSE_Q {
        return Err(Error::invalid(format!("dense DFT limited to q <= {MAX_DENSE_Q}")));
    }
    let norm = 1.0 / (q as f64).sqrt();
    Ok((0..q)
        .map(|a| {
            (0..q)
                .map(|c| {
                    let phase = 2.0 * PI * ((a * c) % q) as f64 / q as f64;
                    Complex64::from_polar(norm, phase)
                })
                .collect()
        })
        .collect())
}

/// Largest entrywise distance between two equally sized matrices.
pub fn max_entry_deviation(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (x - y).norm()))
        .fold(0.0, f64::max)
}
