//! Classical simulation of quantum order finding, factoring and discrete
//! logarithms.
//!
//! The crate has two layers. The simulation layer ([`statevector`],
//! [`gates`], [`qft`], [`modarith`]) runs the circuits gate by gate on a
//! dense state vector. The analysis layer ([`shor`], [`dlog`], [`bounds`])
//! evaluates the measurement distributions in closed form, performs the
//! classical post-processing with exact integer arithmetic from
//! [`numtheory`], and checks the probability lower bounds the algorithms
//! rely on. Both layers agree to 1e-9 wherever the gate-level path fits in
//! memory.

pub mod bounds;
pub mod dlog;
pub mod error;
pub mod gates;
pub mod modarith;
pub mod numtheory;
pub mod qft;
pub mod shor;
pub mod statevector;

pub use error::{Error, Result};
pub use gates::{standard_gate, Gate, GateKind, ReversiblePermutation};
pub use statevector::{Distribution, MeasurementOutcome, StateVector};

/// Seeded generator used for every random draw, stable across platforms.
pub type SimRng = rand_chacha::ChaCha8Rng;

/// Builds the crate's generator from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> SimRng {
    use rand::SeedableRng;
    SimRng::seed_from_u64(seed)
}
