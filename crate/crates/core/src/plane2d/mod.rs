//! The plane: area matrices, circulations, the line-arrangement cell
//! complex, outerplanarity verification and the 2-D driver.

pub mod area;
pub mod circulation;
pub mod complex;
mod driver;
pub mod outerplanar;
pub mod walk;

use thiserror::Error;

use crate::gmatrix::GMatrixError;

pub use area::{area_matrix, split_edges, AreaMatrix, EdgeSplit, PlaneRep};
pub use circulation::{assemble, decompose, nondegenerate_components, positive_circulation, Circulation};
pub use complex::{build_complex, separating_segments, CellComplex};
pub use driver::{embed_plane, embed_plane_with};
pub use outerplanar::{angular_order, verify_outerplanar, OuterplanarViolation};
pub use walk::{shift_limit, EdgeVal, LinearPath, ShiftLimit, State};

/// Relative threshold for `T_ij = 0`.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlaneError {
    #[error("node {0} sits at the origin")]
    ZeroVector(usize),
    #[error("flow conservation violated by {0:e}")]
    Conservation(f64),
    #[error("matrix does not annihilate the representation (residual {0:e})")]
    Residual(f64),
    #[error("adjacent nodes {0} and {1} coincide")]
    Coincident(usize, usize),
    #[error("target point is not in the closure of the cell")]
    NotInClosure,
    #[error("edge {0} carries a flow but is collinear with the origin")]
    DegenerateFlow(usize),
    #[error("path endpoints differ in shape")]
    PathShape,
    #[error("{0}")]
    Stuck(String),
    #[error(transparent)]
    GMatrix(#[from] GMatrixError),
}
