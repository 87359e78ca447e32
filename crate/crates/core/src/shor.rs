//! Order finding, its measurement distribution, the classical
//! post-processing, and the reduction from factoring to order finding.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gates::{standard_gate, GateKind};
use crate::modarith::{modexp_apply, ModExpSpec};
use crate::numtheory::{bit_length, brute_order, classify_n, factorize, gcd, lcm, nearest_fraction, pow_mod, NClass};
use crate::qft::{aqft_circuit, qft_circuit};
use crate::statevector::{Distribution, StateVector, DEFAULT_MAX_WIRES};

/// The power of two in `[n^2, 2 n^2)`.
pub fn choose_q(n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::invalid("q is chosen for n >= 2"));
    }
    let sq = n.checked_mul(n).filter(|&s| s <= 1 << 62).ok_or_else(|| Error::invalid(format!("{n} too large")))?;
    Ok(sq.next_power_of_two())
}

/// How a measurement distribution is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Simulate the circuit on a dense state vector.
    GateLevel,
    /// Evaluate the amplitude sums directly.
    #[default]
    ClosedForm,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::GateLevel => "gate_level",
            Backend::ClosedForm => "closed_form",
        })
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "gate_level" | "gate" => Ok(Backend::GateLevel),
            "closed_form" | "closed" | "analytic" => Ok(Backend::ClosedForm),
            _ => Err(Error::invalid(format!("unknown backend {s:?}"))),
        }
    }
}

/// `|sum_{b<count} e^(2 pi i b t / q)|^2 / q^2`, by the geometric-series closed form.
fn geometric_sum_sqr(count: u64, t: u64, q: u64) -> f64 {
    let t = t % q;
    let qf = q as f64;
    if t == 0 {
        let b = count as f64;
        return b * b / (qf * qf);
    }
    let num = (PI * ((count as u128 * t as u128) % q as u128) as f64 / qf).sin();
    let den = (PI * t as f64 / qf).sin();
    (num * num) / (den * den) / (qf * qf)
}

/// First-register measurement distribution for an element of order `r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CDistribution {
    pub q: u64,
    pub r: u64,
    pub marginal: Vec<f64>,
}

impl CDistribution {
    /// Number of exponents `a < q` with `a = k (mod r)`.
    fn class_size(&self, k: u64) -> u64 {
        (self.q - k - 1) / self.r + 1
    }

    /// Probability of observing `(c, x^k mod n)`, for `k < r`.
    pub fn state_probability(&self, c: u64, k: u64) -> f64 {
        assert!(k < self.r && c < self.q, "state ({c}, {k}) out of range");
        let t = ((self.r as u128 * c as u128) % self.q as u128) as u64;
        geometric_sum_sqr(self.class_size(k), t, self.q)
    }

    pub fn probability(&self, c: u64) -> f64 {
        self.marginal[c as usize]
    }

    pub fn to_distribution(&self) -> Result<Distribution> {
        Distribution::new(self.marginal.clone())
    }
}

pub fn analytic_c_distribution(q: u64, r: u64) -> Result<CDistribution> {
    if !q.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(q));
    }
    if r == 0 || r > q {
        return Err(Error::invalid(format!("order {r} outside 1..={q}")));
    }
    // class sizes take two values; q mod r classes get the larger one
    let small = q / r;
    let n_large = q % r;
    let n_small = r - n_large;
    let marginal = (0..q)
        .map(|c| {
            let t = ((r as u128 * c as u128) % q as u128) as u64;
            let mut p = n_small as f64 * geometric_sum_sqr(small, t, q);
            if n_large > 0 {
                p += n_large as f64 * geometric_sum_sqr(small + 1, t, q);
            }
            p
        })
        .collect();
    Ok(CDistribution { q, r, marginal })
}

/// One order-finding setup: modulus, base, first-register size and backend.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderExperiment {
    pub n: u64,
    pub x: u64,
    pub q: u64,
    pub backend: Backend,
    /// Approximate-QFT cutoff for the gate-level backend.
    pub qft_cutoff: Option<usize>,
}

impl OrderExperiment {
    pub fn new(n: u64, x: u64) -> Result<Self> {
        if n < 3 || n.is_multiple_of(2) {
            return Err(Error::invalid(format!("modulus {n} must be odd and at least 3")));
        }
        let g = gcd(x, n);
        if g != 1 {
            return Err(Error::NotCoprime { value: x, modulus: n, gcd: g });
        }
        Ok(Self { n, x: x % n, q: choose_q(n)?, backend: Backend::default(), qft_cutoff: None })
    }

    /// Overrides `q`. Values below `n^2` no longer guarantee a unique
    /// nearby fraction, but are useful for small demonstrations.
    pub fn with_q(mut self, q: u64) -> Result<Self> {
        if !q.is_power_of_two() || q < 2 {
            return Err(Error::NotPowerOfTwo(q));
        }
        self.q = q;
        Ok(self)
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn with_qft_cutoff(mut self, cutoff: Option<usize>) -> Self {
        self.qft_cutoff = cutoff;
        self
    }

    pub fn q_bits(&self) -> usize {
        self.q.trailing_zeros() as usize
    }

    /// Wires used by the gate-level backend.
    pub fn wire_count(&self) -> usize {
        self.q_bits() + bit_length(self.n) as usize
    }

    pub fn first_register_distribution(&self) -> Result<Distribution> {
        match self.backend {
            Backend::ClosedForm => {
                if self.qft_cutoff.is_some() {
                    return Err(Error::invalid("the approximate QFT needs the gate-level backend"));
                }
                analytic_c_distribution(self.q, brute_order(self.x, self.n)?)?.to_distribution()
            }
            Backend::GateLevel => self.gate_level_distribution(),
        }
    }

    fn gate_level_distribution(&self) -> Result<Distribution> {
        let l = self.q_bits();
        let total = self.wire_count();
        if total > DEFAULT_MAX_WIRES {
            return Err(Error::TooManyWires { requested: total, max: DEFAULT_MAX_WIRES });
        }
        let spec = ModExpSpec::new(self.n, self.x, l)?;
        let a: Vec<usize> = (0..l).collect();
        let out: Vec<usize> = (l..total).collect();
        let mut state = StateVector::basis(total, 1 << l)?;
        let r = standard_gate(GateKind::R);
        for &w in &a {
            state.apply_unitary(&r, &[w])?;
        }
        modexp_apply(&mut state, &spec, &a, &out)?;
        let circuit = match self.qft_cutoff {
            Some(m) => aqft_circuit(l, m)?,
            None => qft_circuit(l)?,
        };
        let readout = circuit.apply(&mut state, &a)?;
        state.exact_distribution(&readout)
    }
}

/// Samples one first-register value.
pub fn run_order_once<R: Rng + ?Sized>(exp: &OrderExperiment, rng: &mut R) -> Result<u64> {
    Ok(exp.first_register_distribution()?.sample(rng) as u64)
}

/// Where a candidate order came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Provenance {
    /// Denominator of the fraction nearest the observed `c/q`.
    Direct,
    /// Denominator recovered from `c + offset`.
    Neighbor { offset: i64 },
    /// `factor` times a recovered denominator.
    Multiple { base: u64, factor: u64 },
    /// Least common multiple of denominators from two samples.
    Lcm { first: u64, second: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub r: u64,
    pub provenance: Provenance,
}

/// Denominators recovered from `c` and its neighbours, without multiples.
fn base_denominators(c: u64, q: u64, n: u64, radius: u64) -> Vec<(u64, i64)> {
    let mut out = Vec::new();
    for off in 0..=radius as i64 {
        for delta in if off == 0 { vec![0] } else { vec![-off, off] } {
            let cc = c as i64 + delta;
            if cc < 0 || cc as u64 >= q {
                continue;
            }
            if let Some(f) = nearest_fraction(cc as u64, q, n) {
                out.push((f.denominator, delta));
            }
        }
    }
    out
}

/// Candidate orders from one observation, deduplicated and ascending.
pub fn candidates_from_c(c: u64, q: u64, n: u64, neighbor_radius: u64, multiple_bound: u64) -> Vec<Candidate> {
    let mut out: Vec<Candidate> = Vec::new();
    let mut push = |cand: Candidate| {
        if !out.iter().any(|o| o.r == cand.r) {
            out.push(cand);
        }
    };
    let bases = base_denominators(c, q, n, neighbor_radius);
    for &(r, delta) in &bases {
        let provenance = if delta == 0 { Provenance::Direct } else { Provenance::Neighbor { offset: delta } };
        push(Candidate { r, provenance });
    }
    for &(r, _) in &bases {
        for factor in 2..=multiple_bound.max(1) {
            push(Candidate { r: r * factor, provenance: Provenance::Multiple { base: r, factor } });
        }
    }
    out.sort_by_key(|c| c.r);
    out
}

/// `ceil((log2 n)^1.5)`.
pub fn default_multiple_bound(n: u64) -> u64 {
    ((n.max(2) as f64).log2().powf(1.5)).ceil() as u64
}

/// Tuning for [`find_order`] and [`factor`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderPolicy {
    pub neighbor_radius: u64,
    /// `None` means [`default_multiple_bound`].
    pub multiple_bound: Option<u64>,
    /// Quantum samples allowed before giving up.
    pub max_trials: usize,
    pub backend: Backend,
    /// Overrides the first-register size.
    pub q: Option<u64>,
    pub qft_cutoff: Option<usize>,
}

impl Default for OrderPolicy {
    fn default() -> Self {
        Self { neighbor_radius: 2, multiple_bound: None, max_trials: 20, backend: Backend::default(), q: None, qft_cutoff: None }
    }
}

impl OrderPolicy {
    pub fn multiple_bound_for(&self, n: u64) -> u64 {
        self.multiple_bound.unwrap_or_else(|| default_multiple_bound(n))
    }

    pub fn experiment(&self, n: u64, x: u64) -> Result<OrderExperiment> {
        let mut exp = OrderExperiment::new(n, x)?.with_backend(self.backend).with_qft_cutoff(self.qft_cutoff);
        if let Some(q) = self.q {
            exp = exp.with_q(q)?;
        }
        Ok(exp)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderTrial {
    pub c: u64,
    pub candidates: Vec<Candidate>,
    /// First candidate with `x^r = 1`, before reduction to the order.
    pub verified: Option<Candidate>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderReport {
    pub n: u64,
    pub x: u64,
    pub q: u64,
    pub order: Option<u64>,
    pub trials: Vec<OrderTrial>,
}

/// Divides primes out of `r` while `check(r / p)` still holds.
fn reduce_to_minimal(mut r: u64, check: impl Fn(u64) -> bool) -> u64 {
    for (p, _) in factorize(r) {
        while r.is_multiple_of(p) && check(r / p) {
            r /= p;
        }
    }
    r
}

/// Runs order finding, recording every trial; `order` is `None` when the budget runs out.
pub fn find_order_report<R: Rng + ?Sized>(n: u64, x: u64, policy: &OrderPolicy, rng: &mut R) -> Result<OrderReport> {
    let exp = policy.experiment(n, x)?;
    let dist = exp.first_register_distribution()?;
    let x = exp.x;
    let verify = |r: u64| r > 0 && pow_mod(x, r, n) == 1;
    let bound = policy.multiple_bound_for(n);
    let mut report = OrderReport { n, x, q: exp.q, order: None, trials: Vec::new() };
    let mut failed_bases: Vec<u64> = Vec::new();

    for _ in 0..policy.max_trials {
        let c = dist.sample(rng) as u64;
        let mut candidates = candidates_from_c(c, exp.q, n, policy.neighbor_radius, bound);
        let mut verified = candidates.iter().copied().find(|cand| verify(cand.r));
        if verified.is_none() {
            let bases: Vec<u64> = base_denominators(c, exp.q, n, policy.neighbor_radius).into_iter().map(|b| b.0).collect();
            'outer: for &first in &failed_bases {
                for &second in &bases {
                    let r = lcm(first, second);
                    if candidates.iter().any(|cand| cand.r == r) {
                        continue;
                    }
                    let cand = Candidate { r, provenance: Provenance::Lcm { first, second } };
                    candidates.push(cand);
                    if verify(r) {
                        verified = Some(cand);
                        break 'outer;
                    }
                }
            }
            for b in bases {
                if !failed_bases.contains(&b) {
                    failed_bases.push(b);
                }
            }
        }
        report.trials.push(OrderTrial { c, candidates, verified });
        if let Some(cand) = verified {
            report.order = Some(reduce_to_minimal(cand.r, verify));
            break;
        }
    }
    Ok(report)
}

/// Order of `x` modulo `n`, or [`Error::BudgetExhausted`].
pub fn find_order<R: Rng + ?Sized>(n: u64, x: u64, policy: &OrderPolicy, rng: &mut R) -> Result<OrderReport> {
    let report = find_order_report(n, x, policy, rng)?;
    if report.order.is_none() {
        return Err(Error::BudgetExhausted { trials: report.trials.len() });
    }
    Ok(report)
}

/// Probability that a single sample already yields the order under `policy`.
pub fn order_success_probability(n: u64, x: u64, policy: &OrderPolicy) -> Result<f64> {
    let exp = policy.experiment(n, x)?;
    let dist = exp.first_register_distribution()?;
    let r = brute_order(exp.x, n)?;
    let bound = policy.multiple_bound_for(n);
    let mut total = 0.0;
    for (c, &p) in dist.probabilities().iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let hit = candidates_from_c(c as u64, exp.q, n, policy.neighbor_radius, bound)
            .iter()
            .any(|cand| cand.r % r == 0);
        if hit {
            total += p;
        }
    }
    Ok(total)
}

/// What the reduction to factoring makes of one order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum MillerOutcome {
    Factor { divisor: u64 },
    OddOrder,
    /// `x^(r/2) = -1 (mod n)`.
    MinusOne,
    /// Neither gcd is proper; only possible when `r` is not the true order.
    NoFactor,
}

pub fn miller_outcome(n: u64, x: u64, r: u64) -> MillerOutcome {
    if r % 2 == 1 {
        return MillerOutcome::OddOrder;
    }
    let y = pow_mod(x, r / 2, n);
    if y == n - 1 {
        return MillerOutcome::MinusOne;
    }
    for d in [gcd((y + n - 1) % n, n), gcd(y + 1, n)] {
        if d > 1 && d < n {
            return MillerOutcome::Factor { divisor: d };
        }
    }
    MillerOutcome::NoFactor
}

/// `(successes, coprime bases)` over every `x` in `[1, n)` coprime to `n`.
pub fn miller_success_count(n: u64) -> Result<(u64, u64)> {
    let mut good = 0;
    let mut total = 0;
    for x in 1..n {
        if gcd(x, n) != 1 {
            continue;
        }
        total += 1;
        if matches!(miller_outcome(n, x, brute_order(x, n)?), MillerOutcome::Factor { .. }) {
            good += 1;
        }
    }
    Ok((good, total))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AttemptOutcome {
    /// The random base already shared a factor with `n`.
    FreeGcd { divisor: u64 },
    Order { r: u64, miller: MillerOutcome },
    OrderNotFound,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorAttempt {
    pub x: u64,
    pub outcome: AttemptOutcome,
    pub order_trials: Vec<OrderTrial>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorReport {
    pub n: u64,
    pub divisor: Option<u64>,
    pub attempts: Vec<FactorAttempt>,
    /// Quantum samples consumed across all attempts.
    pub quantum_trials: usize,
}

/// Splits an odd composite with two distinct prime factors; the trial budget
/// in `policy` counts quantum samples across all bases. Returns the report
/// even when the budget runs out (`divisor` is then `None`).
pub fn factor_report<R: Rng + ?Sized>(n: u64, policy: &OrderPolicy, rng: &mut R) -> Result<FactorReport> {
    match classify_n(n)? {
        NClass::CompositeOk => {}
        other => {
            return Err(Error::invalid(format!(
                "{n} is not an odd composite with two distinct prime factors ({other:?}); use classical methods"
            )))
        }
    }
    let mut report = FactorReport { n, divisor: None, attempts: Vec::new(), quantum_trials: 0 };
    while report.quantum_trials < policy.max_trials {
        let x = rng.gen_range(2..n);
        let g = gcd(x, n);
        if g > 1 {
            report.attempts.push(FactorAttempt { x, outcome: AttemptOutcome::FreeGcd { divisor: g }, order_trials: vec![] });
            report.divisor = Some(g);
            break;
        }
        let budget = OrderPolicy { max_trials: policy.max_trials - report.quantum_trials, ..policy.clone() };
        let order = find_order_report(n, x, &budget, rng)?;
        report.quantum_trials += order.trials.len();
        let outcome = match order.order {
            Some(r) => AttemptOutcome::Order { r, miller: miller_outcome(n, x, r) },
            None => AttemptOutcome::OrderNotFound,
        };
        let found = match outcome {
            AttemptOutcome::Order { miller: MillerOutcome::Factor { divisor }, .. } => Some(divisor),
            _ => None,
        };
        report.attempts.push(FactorAttempt { x, outcome, order_trials: order.trials });
        if found.is_some() {
            report.divisor = found;
            break;
        }
    }
    if let Some(d) = report.divisor {
        if d <= 1 || d >= n || !n.is_multiple_of(d) {
            return Err(Error::invalid(format!("internal: {d} is not a proper divisor of {n}")));
        }
    }
    Ok(report)
}

/// Like [`factor_report`], failing with [`Error::BudgetExhausted`] when no divisor is found.
pub fn factor<R: Rng + ?Sized>(n: u64, policy: &OrderPolicy, rng: &mut R) -> Result<FactorReport> {
    let report = factor_report(n, policy, rng)?;
    if report.divisor.is_none() {
        return Err(Error::BudgetExhausted { trials: report.quantum_trials });
    }
    Ok(report)
}

/// Smallest `r >= 1` with `f^(r)(a) = a`, where `oracle(e, k)` returns `f^(k)(e)`
/// and the cycle through `a` has at most `bound` elements.
pub fn order_of_permutation<R: Rng + ?Sized>(
    oracle: &dyn Fn(u64, u64) -> u64,
    a: u64,
    bound: u64,
    policy: &OrderPolicy,
    rng: &mut R,
) -> Result<OrderReport> {
    if bound == 0 {
        return Err(Error::invalid("element bound must be positive"));
    }
    if oracle(a, 0) != a {
        return Err(Error::InconsistentOracle(format!("f^(0)({a}) != {a}")));
    }
    for (j, k) in [(1, 1), (1, 2), (2, 3), (3, 5), (5, 8), (bound, 1), (1, bound)] {
        let lhs = oracle(a, j + k);
        let rhs = oracle(oracle(a, k), j);
        if lhs != rhs {
            return Err(Error::InconsistentOracle(format!("f^({})({a}) = {lhs} but f^({j})(f^({k})({a})) = {rhs}", j + k)));
        }
    }
    let r_true = (1..=bound)
        .find(|&k| oracle(a, k) == a)
        .ok_or_else(|| Error::InconsistentOracle(format!("no cycle of length <= {bound} through {a}")))?;

    let limit = bound + 1;
    let q = choose_q(limit.max(2))?;
    let dist = analytic_c_distribution(q, r_true)?.to_distribution()?;
    let verify = |r: u64| r > 0 && oracle(a, r) == a;
    let mult = policy.multiple_bound_for(limit);
    let mut report = OrderReport { n: bound, x: a, q, order: None, trials: Vec::new() };
    for _ in 0..policy.max_trials {
        let c = dist.sample(rng) as u64;
        let candidates = candidates_from_c(c, q, limit, policy.neighbor_radius, mult);
        let verified = candidates.iter().copied().find(|cand| verify(cand.r));
        report.trials.push(OrderTrial { c, candidates, verified });
        if let Some(cand) = verified {
            report.order = Some(reduce_to_minimal(cand.r, verify));
            return Ok(report);
        }
    }
    Err(Error::BudgetExhausted { trials: report.trials.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::euler_phi;
    use crate::seeded_rng;
    use num_complex::Complex64;

    /// Direct evaluation of the amplitude sum, term by term.
    fn direct_state_probability(q: u64, r: u64, c: u64, k: u64) -> f64 {
        let t = (r * c) % q;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut b = 0;
        while k + b * r < q {
            acc += Complex64::from_polar(1.0, 2.0 * PI * ((b * t) % q) as f64 / q as f64);
            b += 1;
        }
        acc.norm_sqr() / (q * q) as f64
    }

    #[test]
    fn choose_q_examples() {
        assert_eq!(choose_q(33).unwrap(), 2048);
        assert_eq!(choose_q(15).unwrap(), 256);
        assert_eq!(choose_q(2).unwrap(), 4);
        for n in 2..500u64 {
            let q = choose_q(n).unwrap();
            assert!(q.is_power_of_two() && n * n <= q && q < 2 * n * n);
        }
    }

    #[test]
    fn closed_form_matches_direct_sum() {
        for (q, r) in [(256, 10), (64, 7), (128, 3), (32, 32), (16, 1)] {
            let d = analytic_c_distribution(q, r).unwrap();
            for c in 0..q {
                let mut m = 0.0;
                for k in 0..r {
                    let direct = direct_state_probability(q, r, c, k);
                    assert!((d.state_probability(c, k) - direct).abs() < 1e-14);
                    m += direct;
                }
                assert!((d.probability(c) - m).abs() < 1e-13, "q={q} r={r} c={c}");
            }
            assert!((d.marginal.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn figure_values() {
        let d = analytic_c_distribution(256, 10).unwrap();
        // 6 classes of 26 terms and 4 of 25 at c = 0
        let p0 = (6.0 * 26.0 * 26.0 + 4.0 * 25.0 * 25.0) / 65536.0;
        assert!((d.probability(0) - p0).abs() < 1e-15);
        assert!((d.probability(128) - p0).abs() < 1e-15);
        assert!((d.probability(26) - 0.0573).abs() < 1e-4);
        assert!((d.probability(25) - 0.0255).abs() < 1e-4);
        assert!((analytic_c_distribution(64, 1).unwrap().probability(0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gate_level_matches_closed_form_for_33() {
        let exp = OrderExperiment::new(33, 5).unwrap().with_q(256).unwrap();
        assert_eq!(exp.wire_count(), 14);
        let a = exp.clone().with_backend(Backend::GateLevel).first_register_distribution().unwrap();
        let b = exp.first_register_distribution().unwrap();
        assert!(a.max_abs_diff(&b) <= 1e-9);
    }

    #[test]
    fn fifteen_concentrates_on_multiples_of_64() {
        let d = OrderExperiment::new(15, 7).unwrap().first_register_distribution().unwrap();
        let on: f64 = [0, 64, 128, 192].iter().map(|&c| d.probability(c)).sum();
        assert!((on - 1.0).abs() < 1e-12);
    }

    #[test]
    fn seeded_sample_is_reproducible() {
        let exp = OrderExperiment::new(33, 5).unwrap();
        let a = run_order_once(&exp, &mut seeded_rng(11)).unwrap();
        let b = run_order_once(&exp, &mut seeded_rng(11)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn gate_level_wire_budget() {
        let exp = OrderExperiment::new(1001, 2).unwrap().with_backend(Backend::GateLevel);
        assert!(matches!(exp.first_register_distribution(), Err(Error::TooManyWires { .. })));
    }

    #[test]
    fn candidate_examples() {
        let c614 = candidates_from_c(614, 2048, 33, 2, 12);
        assert!(c614.iter().any(|c| c.r == 10 && c.provenance == Provenance::Direct));
        let c205 = candidates_from_c(205, 2048, 33, 0, 1);
        assert_eq!(c205.iter().map(|c| c.r).collect::<Vec<_>>(), vec![10]);
        let c0 = candidates_from_c(0, 2048, 33, 0, 5);
        assert_eq!(c0.iter().map(|c| c.r).collect::<Vec<_>>(), vec![1, 2, 3, 4, 5]);
        assert!(c614.windows(2).all(|w| w[0].r < w[1].r));
    }

    #[test]
    fn find_order_examples() {
        let p = OrderPolicy::default();
        let mut rng = seeded_rng(3);
        for (n, x, r) in [(33, 5, 10), (15, 7, 4), (15, 4, 2), (21, 2, 6), (35, 3, 12)] {
            let rep = find_order(n, x, &p, &mut rng).unwrap();
            assert_eq!(rep.order, Some(r), "n={n} x={x}");
            assert_eq!(brute_order(x, n).unwrap(), r);
        }
    }

    #[test]
    fn find_order_without_refinements_can_run_out() {
        // d sharing a factor with r gives a proper divisor; without multiples
        // or lcm the budget is exhausted whenever that keeps happening
        let p = OrderPolicy { neighbor_radius: 0, multiple_bound: Some(1), max_trials: 1, ..Default::default() };
        let mut fails = 0;
        for seed in 0..40 {
            if let Err(e) = find_order(33, 5, &p, &mut seeded_rng(seed)) {
                assert!(matches!(e, Error::BudgetExhausted { trials: 1 }));
                fails += 1;
            }
        }
        assert!(fails > 0);
    }

    #[test]
    fn lcm_combination_recovers_the_order() {
        let p = OrderPolicy { neighbor_radius: 0, multiple_bound: Some(1), max_trials: 50, ..Default::default() };
        let mut used_lcm = false;
        for seed in 0..30 {
            let rep = find_order(33, 5, &p, &mut seeded_rng(seed)).unwrap();
            assert_eq!(rep.order, Some(10));
            used_lcm |= rep
                .trials
                .iter()
                .any(|t| matches!(t.verified, Some(Candidate { provenance: Provenance::Lcm { .. }, .. })));
        }
        assert!(used_lcm);
    }

    #[test]
    fn miller_examples() {
        assert_eq!(miller_outcome(15, 7, 4), MillerOutcome::Factor { divisor: 3 });
        assert_eq!(gcd(50, 15), 5);
        assert_eq!(pow_mod(5, 5, 33), 23);
        assert_eq!(miller_outcome(33, 5, 10), MillerOutcome::Factor { divisor: 11 });
        assert_eq!(brute_order(32, 33).unwrap(), 2);
        assert_eq!(miller_outcome(33, 32, 2), MillerOutcome::MinusOne);
        assert_eq!(miller_outcome(33, 1, 1), MillerOutcome::OddOrder);
    }

    #[test]
    fn miller_fraction_for_33() {
        let (good, total) = miller_success_count(33).unwrap();
        assert_eq!(total, euler_phi(33));
        assert!(2 * good >= total, "{good}/{total}");
    }

    #[test]
    fn factor_small_composites() {
        let p = OrderPolicy::default();
        for (i, n) in [15u64, 21, 33, 35, 55, 77, 91].into_iter().enumerate() {
            let rep = factor(n, &p, &mut seeded_rng(100 + i as u64)).unwrap();
            let d = rep.divisor.unwrap();
            assert!(d > 1 && d < n && n % d == 0);
            assert!(rep.quantum_trials <= 20);
        }
    }

    #[test]
    fn factor_rejects_bad_inputs() {
        let p = OrderPolicy::default();
        for n in [16, 13, 27, 1] {
            let e = factor(n, &p, &mut seeded_rng(0)).unwrap_err();
            assert!(e.is_precondition(), "{n}: {e}");
        }
    }

    #[test]
    fn permutation_orders() {
        let p = OrderPolicy::default();
        let mut rng = seeded_rng(9);
        let add3 = |e: u64, k: u64| (e + 3 * k) % 9;
        assert_eq!(order_of_permutation(&add3, 0, 9, &p, &mut rng).unwrap().order, Some(3));
        let id = |e: u64, _k: u64| e;
        assert_eq!(order_of_permutation(&id, 4, 9, &p, &mut rng).unwrap().order, Some(1));
        let mul5 = |e: u64, k: u64| e * pow_mod(5, k, 33) % 33;
        assert_eq!(order_of_permutation(&mul5, 1, 33, &p, &mut rng).unwrap().order, Some(brute_order(5, 33).unwrap()));
        let add1 = |e: u64, k: u64| (e + k) % 9;
        assert_eq!(order_of_permutation(&add1, 2, 9, &p, &mut rng).unwrap().order, Some(9));
    }

    #[test]
    fn inconsistent_oracle_is_refused() {
        let p = OrderPolicy::default();
        let bad = |e: u64, k: u64| (e + k * k) % 9;
        assert!(matches!(
            order_of_permutation(&bad, 0, 9, &p, &mut seeded_rng(0)),
            Err(Error::InconsistentOracle(_))
        ));
    }

    #[test]
    fn aqft_success_within_factor_two() {
        let exact = OrderPolicy { backend: Backend::GateLevel, q: Some(256), neighbor_radius: 0, multiple_bound: Some(1), ..Default::default() };
        let approx = OrderPolicy { qft_cutoff: Some(3), ..exact.clone() };
        let pe = order_success_probability(33, 5, &exact).unwrap();
        let pa = order_success_probability(33, 5, &approx).unwrap();
        assert!(pe > 0.0 && pa >= pe / 2.0 && pa <= pe * 2.0, "{pe} {pa}");
    }
}
