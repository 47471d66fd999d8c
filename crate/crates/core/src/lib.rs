//! Nullspace embeddings of graphs in the line and the plane.
//!
//! For a connected graph the drivers either produce a straight-line
//! embedding read off the kernel of a well-signed G-matrix with one negative
//! eigenvalue (a path in the line, an outerplanar drawing in the plane), or a
//! matrix of that kind whose kernel is too large for such an embedding to
//! exist.

pub mod cli;
pub mod gmatrix;
pub mod graphs;
pub mod line1d;
pub mod plane2d;
pub mod spectra;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use gmatrix::GMatrix;
use spectra::{EigenSummary, Tolerance, DEFAULT_REL_TOL};

/// Settings shared by both drivers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriverConfig {
    /// Relative eigenvalue tolerance, see [`Tolerance::Relative`].
    pub rel_tol: f64,
    /// 0 keeps the first attempt deterministic (all off-diagonals −1).
    pub seed: u64,
    /// Randomized restarts after a numerically degenerate attempt.
    pub restarts: usize,
}

impl Default for DriverConfig {
    fn default() -> Self {
        Self { rel_tol: DEFAULT_REL_TOL, seed: 0, restarts: 3 }
    }
}

impl DriverConfig {
    pub fn tolerance(&self) -> Tolerance {
        Tolerance::Relative(self.rel_tol)
    }

    /// Generator for `attempt`, or `None` when the attempt uses the
    /// deterministic initial matrix.
    pub fn rng(&self, attempt: usize) -> Option<ChaCha8Rng> {
        if attempt == 0 && self.seed == 0 {
            return None;
        }
        let mix = self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ (attempt as u64);
        Some(ChaCha8Rng::seed_from_u64(mix))
    }
}

/// Hooks into intermediate driver state, used by tests to harvest
/// matrices. All methods default to no-ops.
pub trait Observer {
    /// A pair handed to the interpolation step: `m` has one negative
    /// eigenvalue, `m2` at least two, both annihilate the rows `u`.
    fn interpolation_pair(&mut self, _u: &[Vec<f64>], _m: &GMatrix, _m2: &GMatrix) {}

    /// A well-signed matrix with exactly one negative eigenvalue that the
    /// driver passed through.
    fn good_matrix(&mut self, _m: &GMatrix, _s: &EigenSummary) {}
}

/// Observer that ignores everything.
pub struct NoObserver;

impl Observer for NoObserver {}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DriverError {
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph is not 2-connected: {0}")]
    NotBiconnected(String),
    #[error("graph needs at least {0} nodes")]
    TooSmall(usize),
    #[error("no certificate after {attempts} attempts; last failure: {last}")]
    Exhausted { attempts: usize, last: String, log: Vec<String> },
}
