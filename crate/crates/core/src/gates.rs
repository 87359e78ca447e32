//! Gate vocabulary and reversible classical maps.
//!
//! Gate matrices follow the row-input convention: entry `(i, j)` is the
//! coefficient of output basis vector `j` when basis vector `i` is fed in.
//! For a multi-wire gate, the first wire in the wire list is the most
//! significant bit of the gate's basis index, so the example gate written
//! `|ab>` takes `a` from `wires[0]` and `b` from `wires[1]`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerance on `max |M M^† - I|` for a matrix to count as unitary.
pub const UNITARITY_TOLERANCE: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A small dense unitary on one to three wires.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    arity: usize,
    /// Row-major, `dim x dim`.
    matrix: Vec<Complex64>,
    diagonal: bool,
}

impl Gate {
    /// Builds a gate from its rows, rejecting anything that is not unitary.
    pub fn new(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        validate_unitary(&rows)?;
        let dim = rows.len();
        let arity = dim.trailing_zeros() as usize;
        if !(1..=3).contains(&arity) {
            return Err(Error::invalid(format!("gates act on 1 to 3 wires, got {arity}")));
        }
        Ok(Self::from_flat(arity, rows.into_iter().flatten().collect()))
    }

    fn from_flat(arity: usize, matrix: Vec<Complex64>) -> Self {
        let dim = 1 << arity;
        let diagonal = (0..dim).all(|i| (0..dim).all(|j| i == j || matrix[i * dim + j] == ZERO));
        Self { arity, matrix, diagonal }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        1 << self.arity
    }

    /// Coefficient of output `col` for input `row`.
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[row * self.dim() + col]
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.matrix.chunks(self.dim()).map(|r| r.to_vec()).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Gate {
        let dim = self.dim();
        let mut m = vec![ZERO; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                m[j * dim + i] = self.matrix[i * dim + j].conj();
            }
        }
        Gate::from_flat(self.arity, m)
    }

    /// Product gate: `self` first, then `next`.
    pub fn then(&self, next: &Gate) -> Result<Gate> {
        if self.arity != next.arity {
            return Err(Error::ArityMismatch { expected: self.arity, got: next.arity });
        }
        let dim = self.dim();
        let mut m = vec![ZERO; dim * dim];
        for i in 0..dim {
            for k in 0..dim {
                let a = self.matrix[i * dim + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..dim {
                    m[i * dim + j] += a * next.matrix[k * dim + j];
                }
            }
        }
        Ok(Gate::from_flat(self.arity, m))
    }

    fn permutation(arity: usize, image: impl Fn(usize) -> usize) -> Gate {
        let dim = 1 << arity;
        let mut m = vec![ZERO; dim * dim];
        for i in 0..dim {
            m[i * dim + image(i)] = ONE;
        }
        Gate::from_flat(arity, m)
    }
}

/// `e^{i pi / 2^m}` from exact closed forms where they exist.
fn dyadic_phase(m: u32) -> Complex64 {
    match m {
        0 => Complex64::new(-1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2),
        _ => Complex64::from_polar(1.0, PI / (1u64 << m) as f64),
    }
}

/// The named gates the algorithms are built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    /// Two-wire gate acting as identity on `|0x>` and as `R` on the second
    /// wire when the first is 1.
    ExampleGate,
    Cnot,
    Toffoli,
    Fredkin,
    /// Single-wire `(|0> ± |1>)/sqrt 2` gate used by the Fourier transform.
    R,
    /// Two-wire phase gate `diag(1, 1, 1, e^{i pi / 2^exponent})`.
    S { exponent: u32 },
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateKind::ExampleGate => write!(f, "example_gate"),
            GateKind::Cnot => write!(f, "cnot"),
            GateKind::Toffoli => write!(f, "toffoli"),
            GateKind::Fredkin => write!(f, "fredkin"),
            GateKind::R => write!(f, "r_gate"),
            GateKind::S { exponent } => write!(f, "s_gate({exponent})"),
        }
    }
}

impl FromStr for GateKind {
    type Err = Error;

    /// Accepts `example_gate`, `cnot`, `toffoli`, `fredkin`, `r_gate` and
    /// `s_gate(m)` for the phase `pi / 2^m`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "example_gate" | "example" => Ok(GateKind::ExampleGate),
            "cnot" => Ok(GateKind::Cnot),
            "toffoli" => Ok(GateKind::Toffoli),
            "fredkin" => Ok(GateKind::Fredkin),
            "r_gate" | "r" => Ok(GateKind::R),
            _ => s
                .strip_prefix("s_gate(")
                .and_then(|rest| rest.strip_suffix(')'))
                .and_then(|m| m.trim().parse().ok())
                .map(|exponent| GateKind::S { exponent })
                .ok_or_else(|| Error::invalid(format!("unknown gate kind '{s}'"))),
        }
    }
}

pub fn standard_gate(kind: GateKind) -> Gate {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    match kind {
        GateKind::R => Gate::from_flat(1, vec![h, h, h, -h]),
        GateKind::ExampleGate => {
            let mut m = vec![ZERO; 16];
            m[0] = ONE;
            m[5] = ONE;
            m[10] = h;
            m[11] = h;
            m[14] = h;
            m[15] = -h;
            Gate::from_flat(2, m)
        }
        GateKind::S { exponent } => {
            let mut m = vec![ZERO; 16];
            m[0] = ONE;
            m[5] = ONE;
            m[10] = ONE;
            m[15] = dyadic_phase(exponent);
            Gate::from_flat(2, m)
        }
        // second bit negated when the first is 1
        GateKind::Cnot => Gate::permutation(2, |i| if i & 0b10 != 0 { i ^ 0b01 } else { i }),
        // last bit negated when the first two are 1
        GateKind::Toffoli => Gate::permutation(3, |i| if i & 0b110 == 0b110 { i ^ 0b001 } else { i }),
        // last two bits swapped when the first is 0
        GateKind::Fredkin => Gate::permutation(3, |i| {
            if i & 0b100 == 0 {
                ((i & 0b001) << 1) | ((i & 0b010) >> 1)
            } else {
                i
            }
        }),
    }
}

/// Result of a unitarity check: the largest entry of `|M M^† - I|` and where.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnitarityReport {
    pub max_deviation: f64,
    pub worst_row: usize,
    pub worst_col: usize,
}

impl UnitarityReport {
    pub fn is_unitary(&self) -> bool {
        self.max_deviation <= UNITARITY_TOLERANCE
    }
}

/// Measures `max |M M^† - I|` for a square, power-of-two sized matrix.
pub fn unitarity_report(rows: &[Vec<Complex64>]) -> Result<UnitarityReport> {
    let dim = rows.len();
    if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
        return Err(Error::BadMatrixShape { rows: dim, cols: bad.len() });
    }
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::BadMatrixShape { rows: dim, cols: dim });
    }
    let mut report = UnitarityReport { max_deviation: 0.0, worst_row: 0, worst_col: 0 };
    for i in 0..dim {
        for j in 0..dim {
            let dot: Complex64 = rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b.conj()).sum();
            let expect = if i == j { ONE } else { ZERO };
            let dev = (dot - expect).norm();
            if dev > report.max_deviation {
                report = UnitarityReport { max_deviation: dev, worst_row: i, worst_col: j };
            }
        }
    }
    Ok(report)
}

/// Accepts iff `max |M M^† - I| <= 1e-12`.
pub fn validate_unitary(rows: &[Vec<Complex64>]) -> Result<UnitarityReport> {
    let report = unitarity_report(rows)?;
    if !report.is_unitary() {
        return Err(Error::NotUnitary {
            row: report.worst_row,
            col: report.worst_col,
            deviation: report.max_deviation,
        });
    }
    Ok(report)
}

/// A bijection on `[0, 2^width)`: a reversible classical subcircuit viewed as
/// a relabelling of basis states.
///
/// The top `ancilla_width` bits, when non-zero, are work bits that must be
/// zero on entry and are returned to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReversiblePermutation {
    width: u32,
    map: Vec<u32>,
    ancilla_width: u32,
}

impl ReversiblePermutation {
    pub const MAX_WIDTH: u32 = 24;

    pub fn new(width: u32, map: Vec<u32>) -> Result<Self> {
        if width > Self::MAX_WIDTH {
            return Err(Error::TooManyWires { requested: width as usize, max: Self::MAX_WIDTH as usize });
        }
        let size = 1usize << width;
        if map.len() != size {
            return Err(Error::LengthMismatch { expected: size, got: map.len() });
        }
        let mut sorted = map.clone();
        sorted.sort_unstable();
        for (expect, &got) in sorted.iter().enumerate() {
            if got as usize != expect {
                let image = if (got as usize) < expect { got } else { sorted[expect.saturating_sub(1)] };
                return Err(Error::NotBijective { width, image: image as u64 });
            }
        }
        Ok(Self { width, map, ancilla_width: 0 })
    }

    pub fn from_fn(width: u32, f: impl Fn(u64) -> u64) -> Result<Self> {
        if width > Self::MAX_WIDTH {
            return Err(Error::TooManyWires { requested: width as usize, max: Self::MAX_WIDTH as usize });
        }
        let size = 1u64 << width;
        let mut map = Vec::with_capacity(size as usize);
        for v in 0..size {
            let img = f(v);
            if img >= size {
                return Err(Error::NotBijective { width, image: img });
            }
            map.push(img as u32);
        }
        Self::new(width, map)
    }

    pub fn identity(width: u32) -> Self {
        Self { width, map: (0..1u32 << width).collect(), ancilla_width: 0 }
    }

    pub fn with_ancilla(mut self, ancilla_width: u32) -> Result<Self> {
        if ancilla_width > self.width {
            return Err(Error::invalid("ancilla wider than the register"));
        }
        self.ancilla_width = ancilla_width;
        Ok(self)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn ancilla_width(&self) -> u32 {
        self.ancilla_width
    }

    pub fn apply(&self, value: u64) -> u64 {
        self.map[value as usize] as u64
    }

    pub fn images(&self) -> &[u32] {
        &self.map
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u32; self.map.len()];
        for (v, &img) in self.map.iter().enumerate() {
            inv[img as usize] = v as u32;
        }
        Self { width: self.width, map: inv, ancilla_width: self.ancilla_width }
    }

    /// `self` first, then `next`.
    pub fn then(&self, next: &Self) -> Result<Self> {
        if self.width != next.width {
            return Err(Error::WidthMismatch { expected: self.width as usize, got: next.width as usize });
        }
        let map = self.map.iter().map(|&v| next.map[v as usize]).collect();
        Ok(Self { width: self.width, map, ancilla_width: self.ancilla_width.max(next.ancilla_width) })
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(v, &img)| v as u32 == img)
    }

    /// Every input with clear ancilla bits maps to an output with clear ancilla bits.
    pub fn preserves_clear_ancilla(&self) -> bool {
        if self.ancilla_width == 0 {
            return true;
        }
        let data_bits = self.width - self.ancilla_width;
        let data_size = 1u32 << data_bits;
        (0..data_size).all(|v| self.map[v as usize] < data_size)
    }
}

/// Register contents at one row of the two-stage reversibilisation.
/// A zero register is a blank one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BennettRow {
    pub input: u64,
    pub work: u64,
    pub record: u64,
    pub output: u64,
}

impl BennettRow {
    pub fn ancillas_clear(&self) -> bool {
        self.input == 0 && self.work == 0 && self.record == 0
    }
}

/// Runs the seven-row compute / copy / uncompute schedule that replaces `x`
/// by `f(x)` using only XOR-style reversible steps.
///
/// The irreversible computations of `f` and `f_inv` are modelled as writing
/// their result into the work register and a copy of their input bits into
/// the record register; every step below is its own inverse.
pub fn bennett_stages(f: &dyn Fn(u64) -> u64, f_inv: &dyn Fn(u64) -> u64, x: u64) -> [BennettRow; 7] {
    let mut row = BennettRow { input: x, work: 0, record: 0, output: 0 };
    let mut rows = [row; 7];
    // compute f, leaving a record
    row.work ^= f(row.input);
    row.record ^= row.input;
    rows[1] = row;
    // copy the result out
    row.output ^= row.work;
    rows[2] = row;
    // uncompute f
    row.record ^= row.input;
    row.work ^= f(row.input);
    rows[3] = row;
    // compute f_inv from the output, recovering a second copy of the input
    row.work ^= f_inv(row.output);
    row.record ^= row.output;
    rows[4] = row;
    // erase the original input against that copy
    row.input ^= row.work;
    rows[5] = row;
    // uncompute f_inv
    row.record ^= row.output;
    row.work ^= f_inv(row.output);
    rows[6] = row;
    rows
}

/// Lifts a one-to-one map on `[0, 2^width)` to an in-place reversible
/// permutation, running the staged schedule for every input and checking
/// that each run leaves every work bit clear.
pub fn bennett_lift(f: &dyn Fn(u64) -> u64, f_inv: &dyn Fn(u64) -> u64, width: u32) -> Result<ReversiblePermutation> {
    let perm = ReversiblePermutation::from_fn(width, f)?;
    for x in 0..1u64 << width {
        let last = bennett_stages(f, f_inv, x)[6];
        if !last.ancillas_clear() {
            return Err(Error::AncillaNotZero { mass: 1.0 });
        }
        debug_assert_eq!(last.output, perm.apply(x));
    }
    Ok(perm)
}

/// Classical reversible gate on bit positions of a basis integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClassicalGate {
    Not(usize),
    Cnot { control: usize, target: usize },
    Toffoli { controls: [usize; 2], target: usize },
}

impl ClassicalGate {
    pub fn apply(&self, v: u64) -> u64 {
        let bit = |w: usize| (v >> w) & 1 == 1;
        match *self {
            ClassicalGate::Not(t) => v ^ (1 << t),
            ClassicalGate::Cnot { control, target } if bit(control) => v ^ (1 << target),
            ClassicalGate::Toffoli { controls: [a, b], target } if bit(a) && bit(b) => v ^ (1 << target),
            _ => v,
        }
    }

    /// The matching unitary and the wires it acts on, controls first.
    pub fn as_unitary(&self) -> (Gate, Vec<usize>) {
        match *self {
            ClassicalGate::Not(t) => (Gate::permutation(1, |i| i ^ 1), vec![t]),
            ClassicalGate::Cnot { control, target } => (standard_gate(GateKind::Cnot), vec![control, target]),
            ClassicalGate::Toffoli { controls: [a, b], target } => {
                (standard_gate(GateKind::Toffoli), vec![a, b, target])
            }
        }
    }
}

/// A reversible gate network of NOT/CNOT/Toffoli gates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ToffoliNetwork {
    pub wires: usize,
    pub gates: Vec<ClassicalGate>,
}

impl ToffoliNetwork {
    pub fn apply(&self, v: u64) -> u64 {
        self.gates.iter().fold(v, |acc, g| g.apply(acc))
    }
}

/// Wire layout of [`ripple_adder`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdderLayout {
    pub bits: usize,
    /// `bits` wires holding the addend `a`, unchanged by the network.
    pub a: Vec<usize>,
    /// `bits + 1` wires holding `b`; they end up holding `a + b`.
    pub b: Vec<usize>,
    /// `bits` carry wires, zero before and after.
    pub carry: Vec<usize>,
}

impl AdderLayout {
    pub fn encode(&self, a: u64, b: u64) -> u64 {
        let mut v = 0;
        for (i, &w) in self.a.iter().enumerate() {
            v |= ((a >> i) & 1) << w;
        }
        for (i, &w) in self.b.iter().enumerate() {
            v |= ((b >> i) & 1) << w;
        }
        v
    }

    pub fn read(&self, wires: &[usize], v: u64) -> u64 {
        wires.iter().enumerate().fold(0, |acc, (i, &w)| acc | (((v >> w) & 1) << i))
    }
}

/// Plain ripple-carry adder built from Toffoli and CNOT gates, with the
/// carries uncomputed. Small widths only (at most 4 bits).
pub fn ripple_adder(bits: usize) -> Result<(ToffoliNetwork, AdderLayout)> {
    if !(1..=4).contains(&bits) {
        return Err(Error::invalid("ripple_adder supports 1 to 4 bits"));
    }
    let a: Vec<usize> = (0..bits).collect();
    let b: Vec<usize> = (bits..2 * bits + 1).collect();
    let carry: Vec<usize> = (2 * bits + 1..3 * bits + 1).collect();
    // carry into position i+1 lives in carry[i+1], or in the top bit of b
    let next_carry = |i: usize| if i + 1 < bits { carry[i + 1] } else { b[bits] };

    let carry_gates = |i: usize| {
        [
            ClassicalGate::Toffoli { controls: [a[i], b[i]], target: next_carry(i) },
            ClassicalGate::Cnot { control: a[i], target: b[i] },
            ClassicalGate::Toffoli { controls: [carry[i], b[i]], target: next_carry(i) },
        ]
    };
    let sum_gates = |i: usize| {
        [
            ClassicalGate::Cnot { control: a[i], target: b[i] },
            ClassicalGate::Cnot { control: carry[i], target: b[i] },
        ]
    };

    let mut gates = Vec::new();
    for i in 0..bits {
        gates.extend(carry_gates(i));
    }
    gates.push(ClassicalGate::Cnot { control: a[bits - 1], target: b[bits - 1] });
    gates.extend(sum_gates(bits - 1));
    for i in (0..bits - 1).rev() {
        gates.extend(carry_gates(i).into_iter().rev());
        gates.extend(sum_gates(i));
    }
    Ok((ToffoliNetwork { wires: 3 * bits + 1, gates }, AdderLayout { bits, a, b, carry }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn toffoli_truth_table() {
        let g = standard_gate(GateKind::Toffoli);
        for i in 0..8 {
            let expect = match i {
                0b110 => 0b111,
                0b111 => 0b110,
                other => other,
            };
            for j in 0..8 {
                assert_eq!(g.entry(i, j), if j == expect { ONE } else { ZERO });
            }
        }
    }

    #[test]
    fn fredkin_truth_table() {
        let g = standard_gate(GateKind::Fredkin);
        let table = [0b000, 0b010, 0b001, 0b011, 0b100, 0b101, 0b110, 0b111];
        for (i, &out) in table.iter().enumerate() {
            assert_eq!(g.entry(i, out), ONE, "input {i:03b}");
        }
    }

    #[test]
    fn cnot_negates_second_bit() {
        let g = standard_gate(GateKind::Cnot);
        assert_eq!(g.entry(0b10, 0b11), ONE);
        assert_eq!(g.entry(0b11, 0b10), ONE);
        assert_eq!(g.entry(0b01, 0b01), ONE);
    }

    #[test]
    fn r_gate_is_an_involution() {
        let r = standard_gate(GateKind::R);
        let rr = r.then(&r).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((rr.entry(i, j) - c(expect)).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn s_gate_diagonal() {
        let s = standard_gate(GateKind::S { exponent: 1 });
        assert!(s.is_diagonal());
        assert_eq!(s.entry(3, 3), Complex64::new(0.0, 1.0));
        for i in 0..3 {
            assert_eq!(s.entry(i, i), ONE);
        }
        let s3 = standard_gate(GateKind::S { exponent: 3 });
        assert!((s3.entry(3, 3) - Complex64::from_polar(1.0, PI / 8.0)).norm() < 1e-15);
    }

    #[test]
    fn every_standard_gate_is_unitary() {
        let mut kinds = vec![GateKind::ExampleGate, GateKind::Cnot, GateKind::Toffoli, GateKind::Fredkin, GateKind::R];
        kinds.extend((0..20).map(|exponent| GateKind::S { exponent }));
        for kind in kinds {
            let g = standard_gate(kind);
            assert!(validate_unitary(&g.rows()).is_ok(), "{kind}");
        }
    }

    #[test]
    fn reversible_gates_square_to_identity() {
        for kind in [GateKind::Toffoli, GateKind::Fredkin, GateKind::Cnot] {
            let g = standard_gate(kind);
            let gg = g.then(&g).unwrap();
            for i in 0..g.dim() {
                for j in 0..g.dim() {
                    assert_eq!(gg.entry(i, j), if i == j { ONE } else { ZERO });
                }
            }
        }
    }

    #[test]
    fn validate_unitary_cases() {
        let h = FRAC_1_SQRT_2;
        let example = vec![
            vec![c(1.0), c(0.0), c(0.0), c(0.0)],
            vec![c(0.0), c(1.0), c(0.0), c(0.0)],
            vec![c(0.0), c(0.0), c(h), c(h)],
            vec![c(0.0), c(0.0), c(h), c(-h)],
        ];
        assert!(validate_unitary(&example).is_ok());

        let unnormalized = vec![vec![c(1.0), c(1.0)], vec![c(0.0), c(1.0)]];
        let err = validate_unitary(&unnormalized).unwrap_err();
        assert!(matches!(err, Error::NotUnitary { .. }));

        let ragged = vec![vec![c(1.0), c(0.0)], vec![c(1.0)]];
        assert!(matches!(unitarity_report(&ragged), Err(Error::BadMatrixShape { .. })));
        let three = vec![vec![c(1.0); 3]; 3];
        assert!(matches!(unitarity_report(&three), Err(Error::BadMatrixShape { .. })));
    }

    #[test]
    fn composed_gates_stay_unitary() {
        let ex = standard_gate(GateKind::ExampleGate);
        let s = standard_gate(GateKind::S { exponent: 2 });
        let cn = standard_gate(GateKind::Cnot);
        let prod = ex.then(&s).unwrap().then(&cn).unwrap().then(&ex.adjoint()).unwrap();
        assert!(validate_unitary(&prod.rows()).is_ok());
        assert!(Gate::new(prod.rows()).is_ok());
    }

    #[test]
    fn gate_kind_parsing() {
        assert_eq!("toffoli".parse::<GateKind>().unwrap(), GateKind::Toffoli);
        assert_eq!("s_gate(3)".parse::<GateKind>().unwrap(), GateKind::S { exponent: 3 });
        assert!("hadamard-ish".parse::<GateKind>().is_err());
    }

    #[test]
    fn permutation_rejects_collisions() {
        assert!(matches!(ReversiblePermutation::new(2, vec![0, 1, 1, 3]), Err(Error::NotBijective { .. })));
        assert!(ReversiblePermutation::new(2, vec![3, 2, 1, 0]).is_ok());
        assert!(ReversiblePermutation::new(2, vec![0, 1, 2]).is_err());
    }

    #[test]
    fn bennett_lift_examples() {
        let mul5 = |x: u64| if x < 33 { x * 5 % 33 } else { x };
        let div5 = |x: u64| if x < 33 { x * 20 % 33 } else { x };
        let p = bennett_lift(&mul5, &div5, 6).unwrap();
        assert_eq!(p.apply(7), 2);
        assert_eq!(p.apply(40), 40);

        let id = |x: u64| x;
        assert!(bennett_lift(&id, &id, 5).unwrap().is_identity());

        let inc = |x: u64| (x + 1) % 16;
        let dec = |x: u64| (x + 15) % 16;
        let p = bennett_lift(&inc, &dec, 4).unwrap();
        assert_eq!(p.apply(15), 0);
        assert_eq!(p.apply(3), 4);

        let back = bennett_lift(&dec, &inc, 4).unwrap();
        assert!(p.then(&back).unwrap().is_identity());
    }

    #[test]
    fn bennett_rejects_non_injective_maps() {
        let half = |x: u64| x / 2;
        let dbl = |x: u64| x * 2;
        assert!(matches!(bennett_lift(&half, &dbl, 3), Err(Error::NotBijective { .. })));
    }

    #[test]
    fn bennett_rows_follow_the_schedule() {
        let f = |x: u64| (x * 7 + 3) % 64;
        let f_inv = |y: u64| (y + 61) * 55 % 64; // 7 * 55 = 385 = 1 mod 64
        let rows = bennett_stages(&f, &f_inv, 9);
        let fx = f(9);
        assert_eq!(rows[0], BennettRow { input: 9, work: 0, record: 0, output: 0 });
        assert_eq!(rows[2], BennettRow { input: 9, work: fx, record: 9, output: fx });
        assert_eq!(rows[3], BennettRow { input: 9, work: 0, record: 0, output: fx });
        assert_eq!(rows[4], BennettRow { input: 9, work: 9, record: fx, output: fx });
        assert_eq!(rows[5], BennettRow { input: 0, work: 9, record: fx, output: fx });
        assert_eq!(rows[6], BennettRow { input: 0, work: 0, record: 0, output: fx });
    }

    #[test]
    fn bennett_ancillas_clear_exhaustively() {
        for width in 1..=12u32 {
            let size = 1u64 << width;
            // odd multiplier is invertible mod 2^width
            let mult = (5 % size) | 1;
            let inv = (0..size).find(|&i| (i * mult) % size == 1).unwrap();
            let f = move |x: u64| (x * mult + 1) % size;
            let f_inv = move |y: u64| ((y + size - 1) % size) * inv % size;
            for x in 0..size {
                let last = bennett_stages(&f, &f_inv, x)[6];
                assert!(last.ancillas_clear(), "width {width} x {x}");
                assert_eq!(last.output, f(x));
            }
        }
    }

    #[test]
    fn ripple_adder_adds_and_clears_carries() {
        for bits in 1..=4 {
            let (net, layout) = ripple_adder(bits).unwrap();
            for a in 0..1u64 << bits {
                for b in 0..1u64 << bits {
                    let out = net.apply(layout.encode(a, b));
                    assert_eq!(layout.read(&layout.a, out), a);
                    assert_eq!(layout.read(&layout.b, out), a + b, "bits {bits}: {a} + {b}");
                    assert_eq!(layout.read(&layout.carry, out), 0);
                }
            }
        }
        assert!(ripple_adder(5).is_err());
    }
}
