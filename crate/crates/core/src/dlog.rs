//! Discrete logarithms modulo a prime: the three-register experiment with a
//! Fourier transform on two registers, classification of outputs, and
//! recovery of the exponent from observed pairs.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modarith::{controlled_multiply_by_powers, ModExpSpec};
use crate::numtheory::{bit_length, brute_order, crt, factorize, gcd, is_prime, modinv, pow_mod, signed_rem};
use crate::qft::qft_circuit;
use crate::shor::Backend;
use crate::statevector::{Distribution, StateVector, DEFAULT_MAX_WIRES};

/// Least `r` in `[0, p-1)` with `g^r = x (mod p)`, by iteration.
pub fn brute_dlog(g: u64, x: u64, p: u64) -> Option<u64> {
    let mut acc = 1 % p;
    for r in 0..p.saturating_sub(1) {
        if acc == x % p {
            return Some(r);
        }
        acc = acc * g % p;
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DlogExperiment {
    pub p: u64,
    pub g: u64,
    pub x: u64,
    pub q: u64,
    pub backend: Backend,
}

impl DlogExperiment {
    /// `q` is the power of two strictly between `p` and `2p`.
    pub fn new(p: u64, g: u64, x: u64) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::invalid(format!("{p} is not an odd prime")));
        }
        if p > 1 << 20 {
            return Err(Error::invalid(format!("{p} is too large to simulate")));
        }
        let (g, x) = (g % p, x % p);
        if g == 0 || brute_order(g, p)? != p - 1 {
            return Err(Error::NotAGenerator { g, p });
        }
        if x == 0 {
            return Err(Error::NotCoprime { value: x, modulus: p, gcd: p });
        }
        Ok(Self { p, g, x, q: p.next_power_of_two(), backend: Backend::default() })
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn q_bits(&self) -> usize {
        self.q.trailing_zeros() as usize
    }

    /// Wires used by the gate-level backend.
    pub fn wire_count(&self) -> usize {
        2 * self.q_bits() + bit_length(self.p) as usize
    }

    pub fn joint_distribution(&self) -> Result<JointDistribution> {
        match self.backend {
            Backend::ClosedForm => self.closed_form(),
            Backend::GateLevel => self.gate_level(),
        }
    }

    fn closed_form(&self) -> Result<JointDistribution> {
        let (p, q) = (self.p, self.q);
        let r = brute_dlog(self.g, self.x, p).ok_or_else(|| Error::invalid("target has no logarithm"))?;
        let table: Vec<Complex64> = (0..q).map(|m| Complex64::from_polar(1.0, 2.0 * PI * m as f64 / q as f64)).collect();
        let scale = 1.0 / ((p - 1) * q) as f64;
        let mut joint = JointDistribution::zeros(p, q);
        let mut y = 1;
        for k in 0..p - 1 {
            // exponents a with a - r b = k (mod p-1), one per b
            let a_of_b: Vec<u64> = (0..p - 1).map(|b| (b * r + k) % (p - 1)).collect();
            for c in 0..q {
                for d in 0..q {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (b, &a) in a_of_b.iter().enumerate() {
                        acc += table[((a * c + b as u64 * d) % q) as usize];
                    }
                    let idx = joint.index(c, d, y);
                    joint.probs[idx] = (acc * scale).norm_sqr();
                }
            }
            y = y * self.g % p;
        }
        joint.check()?;
        Ok(joint)
    }

    fn gate_level(&self) -> Result<JointDistribution> {
        let (p, q) = (self.p, self.q);
        let l = self.q_bits();
        let total = self.wire_count();
        if total > DEFAULT_MAX_WIRES {
            return Err(Error::TooManyWires { requested: total, max: DEFAULT_MAX_WIRES });
        }
        let a: Vec<usize> = (0..l).collect();
        let b: Vec<usize> = (l..2 * l).collect();
        let y: Vec<usize> = (2 * l..total).collect();

        // uniform over a, b < p-1 with the third register at 1
        let amp = Complex64::new(1.0 / (p - 1) as f64, 0.0);
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << total];
        for av in 0..p - 1 {
            for bv in 0..p - 1 {
                amps[(av | bv << l | 1 << (2 * l)) as usize] = amp;
            }
        }
        let mut state = StateVector::from_amplitudes(total, amps)?;
        let width = bit_length(p);
        controlled_multiply_by_powers(&mut state, &ModExpSpec::with_width(p, self.g, l, width)?, &a, &y)?;
        let x_inv = modinv(self.x, p)?;
        controlled_multiply_by_powers(&mut state, &ModExpSpec::with_width(p, x_inv, l, width)?, &b, &y)?;
        let qft = qft_circuit(l)?;
        let ra = qft.apply(&mut state, &a)?;
        let rb = qft.apply(&mut state, &b)?;
        let wires: Vec<usize> = ra.iter().chain(&rb).chain(&y).copied().collect();
        let flat = state.exact_distribution(&wires)?;

        let mut joint = JointDistribution::zeros(p, q);
        for (i, &prob) in flat.probabilities().iter().enumerate() {
            let i = i as u64;
            let (c, d, yv) = (i % q, (i / q) % q, i / (q * q));
            if yv < p {
                let idx = joint.index(c, d, yv);
                joint.probs[idx] = prob;
            } else if prob > 1e-12 {
                return Err(Error::invalid("third register left the range [0, p)"));
            }
        }
        joint.check()?;
        Ok(joint)
    }
}

/// Probabilities of `(c, d, y)`, stored at `(c q + d) p + y`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointDistribution {
    pub p: u64,
    pub q: u64,
    pub probs: Vec<f64>,
}

impl JointDistribution {
    fn zeros(p: u64, q: u64) -> Self {
        Self { p, q, probs: vec![0.0; (q * q * p) as usize] }
    }

    fn check(&self) -> Result<()> {
        Distribution::new(self.probs.clone()).map(|_| ())
    }

    pub fn index(&self, c: u64, d: u64, y: u64) -> usize {
        ((c * self.q + d) * self.p + y) as usize
    }

    pub fn probability(&self, c: u64, d: u64, y: u64) -> f64 {
        self.probs[self.index(c, d, y)]
    }

    pub fn pair_probability(&self, c: u64, d: u64) -> f64 {
        (0..self.p).map(|y| self.probability(c, d, y)).sum()
    }

    pub fn c_marginal(&self, c: u64) -> f64 {
        (0..self.q).map(|d| self.pair_probability(c, d)).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.probs.iter().zip(&other.probs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn to_distribution(&self) -> Result<Distribution> {
        Distribution::new(self.probs.clone())
    }

    pub fn split(&self, index: usize) -> (u64, u64, u64) {
        let i = index as u64;
        (i / (self.q * self.p), (i / self.p) % self.q, i % self.p)
    }
}

/// Samples one `(c, d, y)`.
pub fn run_dlog_once<R: Rng + ?Sized>(exp: &DlogExperiment, rng: &mut R) -> Result<(u64, u64, u64)> {
    let joint = exp.joint_distribution()?;
    Ok(joint.split(joint.to_distribution()?.sample(rng)))
}

/// `<c(p-1)>_q`.
fn cp_residue(c: u64, p: u64, q: u64) -> i64 {
    signed_rem(c as i128 * (p as i128 - 1), q as i128) as i64
}

/// The integer nearest `c(p-1)/q` and what it leaves of `p - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CPrime {
    pub value: u64,
    pub gcd: u64,
    /// `(p-1) / gcd`: the modulus a pair with this `c` can pin `r` to.
    pub modulus: u64,
}

pub fn c_prime(c: u64, p: u64, q: u64) -> CPrime {
    let s = cp_residue(c, p, q) as i128;
    let value = ((c as i128 * (p as i128 - 1) - s) / q as i128) as u64 % (p - 1);
    let g = gcd(value, p - 1);
    CPrime { value, gcd: g, modulus: (p - 1) / g }
}

/// Exact classification of an observed pair against the true exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GoodPairAnalysis {
    pub c: u64,
    pub d: u64,
    /// `<c(p-1)>_q`.
    pub cp_residue: i64,
    /// `T (p-1)`, an integer.
    pub t_scaled: i128,
    /// `<T>_q (p-1)`, an integer.
    pub t_residue_scaled: i128,
    /// Nearest integer to `T/q`.
    pub j: i128,
    /// Phase span of `exp(2 pi i b T/q)` over `b < p-1`, in turns.
    pub w: f64,
    /// `T/q` is exactly half-way between two integers.
    pub tie: bool,
    pub phase_condition: bool,
    pub residue_condition: bool,
    pub good: bool,
}

impl GoodPairAnalysis {
    /// `V` for one summation index `b` and third-register exponent `k`.
    pub fn v(&self, b: u64, k: u64, r: u64, p: u64) -> f64 {
        let pm1 = (p - 1) as f64;
        let floor = ((b * r + k) / (p - 1)) as f64;
        (b as f64 * r as f64 / pm1 - floor) * self.cp_residue as f64
    }
}

pub fn analyze_pair(c: u64, d: u64, p: u64, q: u64, r: u64) -> GoodPairAnalysis {
    let pm1 = p as i128 - 1;
    let s = cp_residue(c, p, q);
    let t_scaled = (r as i128 * c as i128 + d as i128) * pm1 - r as i128 * s as i128;
    let span = q as i128 * pm1;
    let t_residue_scaled = signed_rem(t_scaled, span);
    let j = (t_scaled - t_residue_scaled) / span;
    let phase_condition = 2 * t_residue_scaled.abs() <= pm1;
    let residue_condition = 12 * s.unsigned_abs() <= q;
    GoodPairAnalysis {
        c,
        d,
        cp_residue: s,
        t_scaled,
        t_residue_scaled,
        j,
        w: (p - 2) as f64 / q as f64 * t_residue_scaled as f64 / pm1 as f64,
        tie: 2 * t_residue_scaled.abs() == span,
        phase_condition,
        residue_condition,
        good: phase_condition && residue_condition,
    }
}

/// What one observed pair says about `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PairRecovery {
    /// `r = residue (mod modulus)`.
    Constraint { residue: u64, modulus: u64, c_prime: u64 },
    /// `c' = 0 (mod p-1)`: no information.
    Degenerate,
    /// `d~ + r c' = 0 (mod p-1)` has no solution, so the pair was bad.
    Unsolvable,
}

pub fn recover_from_pair(c: u64, d: u64, p: u64, q: u64) -> PairRecovery {
    let pm1 = p - 1;
    let cp = c_prime(c, p, q);
    if cp.value == 0 {
        return PairRecovery::Degenerate;
    }
    // nearest multiple of 1/(p-1) to d/q, as an integer numerator
    let d_tilde = ((2 * d as u128 * pm1 as u128 + q as u128) / (2 * q as u128)) as u64 % pm1;
    let target = (pm1 - d_tilde) % pm1;
    if !target.is_multiple_of(cp.gcd) {
        return PairRecovery::Unsolvable;
    }
    let m = cp.modulus;
    let residue = if m == 1 {
        0
    } else {
        let inv = modinv((cp.value / cp.gcd) % m, m).expect("coprime after dividing out the gcd");
        (target / cp.gcd) % m * inv % m
    };
    PairRecovery::Constraint { residue, modulus: m, c_prime: cp.value }
}

/// Tuning for [`find_dlog`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DlogPolicy {
    /// Constraints to collect before the first assembly attempt.
    pub t: usize,
    /// Sample budget; `None` means `480 t`.
    pub max_trials: Option<usize>,
    /// Prime powers of `p - 1` up to this size are always exhausted.
    pub exhaust_threshold: u64,
    pub backend: Backend,
}

impl Default for DlogPolicy {
    fn default() -> Self {
        Self { t: 4, max_trials: None, exhaust_threshold: 18, backend: Backend::default() }
    }
}

impl DlogPolicy {
    pub fn budget(&self) -> usize {
        self.max_trials.unwrap_or(480 * self.t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DlogTrial {
    pub c: u64,
    pub d: u64,
    pub y: u64,
    pub recovery: PairRecovery,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Resolution {
    /// Every residue was tried.
    Exhausted,
    /// Residues implied by collected constraints, most frequent first.
    Pinned { residues: Vec<u64> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimePowerResolution {
    pub prime_power: u64,
    pub resolution: Resolution,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DlogReport {
    pub p: u64,
    pub g: u64,
    pub x: u64,
    pub q: u64,
    pub r: Option<u64>,
    pub trials: Vec<DlogTrial>,
    /// How each prime power of `p - 1` was handled in the last assembly.
    pub resolutions: Vec<PrimePowerResolution>,
}

/// Candidate residues per prime power of `p - 1`, then every CRT
/// combination verified against `g^r = x`.
fn assemble(
    p: u64,
    g: u64,
    x: u64,
    constraints: &[(u64, u64)],
    threshold: u64,
) -> Result<(Option<u64>, Vec<PrimePowerResolution>)> {
    let mut resolutions = Vec::new();
    let mut lists: Vec<(u64, Vec<u64>)> = Vec::new();
    for (prime, e) in factorize(p - 1) {
        let pp = prime.pow(e);
        let mut votes: BTreeMap<u64, usize> = BTreeMap::new();
        for &(res, m) in constraints {
            if m % pp == 0 {
                *votes.entry(res % pp).or_default() += 1;
            }
        }
        if pp <= threshold || votes.is_empty() {
            resolutions.push(PrimePowerResolution { prime_power: pp, resolution: Resolution::Exhausted });
            lists.push((pp, (0..pp).collect()));
        } else {
            let mut ranked: Vec<(u64, usize)> = votes.into_iter().collect();
            ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
            let residues: Vec<u64> = ranked.into_iter().map(|(r, _)| r).collect();
            resolutions.push(PrimePowerResolution { prime_power: pp, resolution: Resolution::Pinned { residues: residues.clone() } });
            lists.push((pp, residues));
        }
    }

    let mut choice = vec![0usize; lists.len()];
    loop {
        let parts: Vec<(u64, u64)> = lists.iter().zip(&choice).map(|((pp, l), &i)| (l[i], *pp)).collect();
        let (r, _) = crt(&parts)?;
        if r < p - 1 && pow_mod(g, r, p) == x {
            return Ok((Some(r), resolutions));
        }
        // odometer over the candidate lists
        let mut pos = 0;
        loop {
            if pos == lists.len() {
                return Ok((None, resolutions));
            }
            choice[pos] += 1;
            if choice[pos] < lists[pos].1.len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// Runs the experiment until the exponent is assembled and verified, or
/// the budget runs out (`r` is then `None`).
pub fn find_dlog_report<R: Rng + ?Sized>(p: u64, g: u64, x: u64, policy: &DlogPolicy, rng: &mut R) -> Result<DlogReport> {
    if policy.t == 0 {
        return Err(Error::invalid("t must be at least 1"));
    }
    let exp = DlogExperiment::new(p, g, x)?.with_backend(policy.backend);
    let joint = exp.joint_distribution()?;
    let dist = joint.to_distribution()?;
    let mut report = DlogReport { p, g: exp.g, x: exp.x, q: exp.q, r: None, trials: Vec::new(), resolutions: Vec::new() };
    let mut constraints: Vec<(u64, u64)> = Vec::new();

    for _ in 0..policy.budget() {
        let (c, d, y) = joint.split(dist.sample(rng));
        let recovery = recover_from_pair(c, d, p, exp.q);
        report.trials.push(DlogTrial { c, d, y, recovery });
        let PairRecovery::Constraint { residue, modulus, .. } = recovery else {
            continue;
        };
        constraints.push((residue, modulus));
        if constraints.len() < policy.t {
            continue;
        }
        let (r, resolutions) = assemble(p, exp.g, exp.x, &constraints, policy.exhaust_threshold)?;
        report.resolutions = resolutions;
        if let Some(r) = r {
            report.r = Some(r);
            break;
        }
    }
    Ok(report)
}

/// Like [`find_dlog_report`], failing with [`Error::BudgetExhausted`] when nothing verifies.
pub fn find_dlog<R: Rng + ?Sized>(p: u64, g: u64, x: u64, policy: &DlogPolicy, rng: &mut R) -> Result<DlogReport> {
    let report = find_dlog_report(p, g, x, policy, rng)?;
    match report.r {
        Some(r) if pow_mod(report.g, r, p) == report.x => Ok(report),
        _ => Err(Error::BudgetExhausted { trials: report.trials.len() }),
    }
}
