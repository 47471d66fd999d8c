//! G-matrices: symmetric matrices with structural zeros at non-adjacent
//! pairs, and their nullspace representations.

pub mod certificate;
pub mod hull;

use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::graphs::Graph;
use crate::spectra::{eigen_summary, EigenSummary, SpectraError, SymmetricMatrix, SymmetricSource, Tolerance};

pub use certificate::{verify_certificate, Certificate, CertificateKind, Check, Report};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GMatrixError {
    #[error("expected {expected} values, got {found}")]
    Length { expected: usize, found: usize },
    #[error("non-finite value in matrix data")]
    NonFinite,
    #[error("nonzero entry at non-adjacent pair ({0}, {1})")]
    ZeroPattern(usize, usize),
    #[error("node {0} is represented by the zero vector")]
    ZeroVector(usize),
    #[error("scale factor of node {0} is zero")]
    ZeroScale(usize),
    #[error("matrix is nonsingular at the given tolerance")]
    Nonsingular,
    #[error("graph needs at least two nodes")]
    TooSmall,
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}

/// Symmetric matrix tied to a graph. Only the diagonal and the entries of
/// edges are stored, so every other off-diagonal entry is exactly zero.
#[derive(Clone, Debug)]
pub struct GMatrix {
    graph: Arc<Graph>,
    diag: Vec<f64>,
    off: Vec<f64>,
    dense: SymmetricMatrix,
}

impl PartialEq for GMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.graph == other.graph && self.diag == other.diag && self.off == other.off
    }
}

impl SymmetricSource for GMatrix {
    fn symmetric(&self) -> &SymmetricMatrix {
        &self.dense
    }
}

impl GMatrix {
    /// `diag` has one value per node, `off` one value per edge index.
    pub fn new(graph: Arc<Graph>, diag: Vec<f64>, off: Vec<f64>) -> Result<Self, GMatrixError> {
        if diag.len() != graph.n() {
            return Err(GMatrixError::Length { expected: graph.n(), found: diag.len() });
        }
        if off.len() != graph.edge_count() {
            return Err(GMatrixError::Length { expected: graph.edge_count(), found: off.len() });
        }
        if diag.iter().chain(&off).any(|x| !x.is_finite()) {
            return Err(GMatrixError::NonFinite);
        }
        let mut dense = SymmetricMatrix::zeros(graph.n());
        for (i, &v) in diag.iter().enumerate() {
            dense.set(i, i, v);
        }
        for (k, &(i, j)) in graph.edges().iter().enumerate() {
            dense.set(i, j, off[k]);
        }
        Ok(Self { graph, diag, off, dense })
    }

    pub fn uniform(graph: Arc<Graph>, diag: f64, off: f64) -> Self {
        let (n, m) = (graph.n(), graph.edge_count());
        Self::new(graph, vec![diag; n], vec![off; m]).expect("finite constants")
    }

    /// Reads a dense matrix, rejecting nonzeros at non-adjacent pairs.
    pub fn from_symmetric(graph: Arc<Graph>, m: &SymmetricMatrix) -> Result<Self, GMatrixError> {
        let n = graph.n();
        if m.n() != n {
            return Err(GMatrixError::Length { expected: n, found: m.n() });
        }
        for i in 0..n {
            for j in i + 1..n {
                if m.get(i, j) != 0.0 && !graph.has_edge(i, j) {
                    return Err(GMatrixError::ZeroPattern(i, j));
                }
            }
        }
        let diag = (0..n).map(|i| m.get(i, i)).collect();
        let off = graph.edges().iter().map(|&(i, j)| m.get(i, j)).collect();
        Self::new(graph, diag, off)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn graph_arc(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.dense.get(i, j)
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// Off-diagonal values indexed like `graph().edges()`.
    pub fn off(&self) -> &[f64] {
        &self.off
    }

    pub fn norm_inf(&self) -> f64 {
        self.dense.norm_inf()
    }

    pub fn with_diag(&self, diag: Vec<f64>) -> Result<Self, GMatrixError> {
        Self::new(self.graph.clone(), diag, self.off.clone())
    }

    pub fn with_diag_entry(&self, i: usize, v: f64) -> Self {
        let mut diag = self.diag.clone();
        diag[i] = v;
        self.with_diag(diag).expect("same shape")
    }

    pub fn add(&self, other: &Self) -> Self {
        assert!(Arc::ptr_eq(&self.graph, &other.graph) || self.graph == other.graph);
        let diag = self.diag.iter().zip(&other.diag).map(|(a, b)| a + b).collect();
        let off = self.off.iter().zip(&other.off).map(|(a, b)| a + b).collect();
        Self::new(self.graph.clone(), diag, off).expect("same shape")
    }

    pub fn scaled(&self, c: f64) -> Self {
        let diag = self.diag.iter().map(|x| c * x).collect();
        let off = self.off.iter().map(|x| c * x).collect();
        Self::new(self.graph.clone(), diag, off).expect("same shape")
    }

    /// `(1 - t) * a + t * b`.
    pub fn lerp(a: &Self, b: &Self, t: f64) -> Self {
        let mix = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| (1.0 - t) * p + t * q).collect();
        Self::new(a.graph.clone(), mix(&a.diag, &b.diag), mix(&a.off, &b.off)).expect("same shape")
    }

    pub fn summary(&self, tol: impl Into<Tolerance>) -> Result<EigenSummary, SpectraError> {
        eigen_summary(&self.dense, tol)
    }

    /// Largest absolute entry of `U M` for points `u` (one vector per node).
    pub fn residual<P: AsRef<[f64]>>(&self, points: &[P]) -> f64 {
        let dim = points.first().map_or(0, |p| p.as_ref().len());
        let mut worst: f64 = 0.0;
        for i in 0..self.n() {
            for c in 0..dim {
                let mut s = self.diag[i] * points[i].as_ref()[c];
                for &(j, k) in self.graph.incident(i) {
                    s += self.off[k] * points[j].as_ref()[c];
                }
                worst = worst.max(s.abs());
            }
        }
        worst
    }
}

/// Every adjacent pair carries a strictly negative entry.
pub fn is_well_signed(gm: &GMatrix) -> bool {
    gm.off.iter().all(|&x| x < 0.0)
}

/// Off-diagonals `-1` (or uniform in `[-2, -1/2]` with a generator) and a
/// zero diagonal, shifted by the second smallest eigenvalue so that the
/// result is singular with exactly one negative eigenvalue.
pub fn initial_good_matrix(g: &Arc<Graph>) -> Result<GMatrix, GMatrixError> {
    build_initial(g, None::<&mut rand_chacha::ChaCha8Rng>)
}

pub fn initial_good_matrix_random<R: Rng>(g: &Arc<Graph>, rng: &mut R) -> Result<GMatrix, GMatrixError> {
    build_initial(g, Some(rng))
}

fn build_initial<R: Rng>(g: &Arc<Graph>, rng: Option<&mut R>) -> Result<GMatrix, GMatrixError> {
    if g.n() < 2 {
        return Err(GMatrixError::TooSmall);
    }
    let off = match rng {
        Some(rng) => (0..g.edge_count()).map(|_| rng.random_range(-2.0..=-0.5)).collect(),
        None => vec![-1.0; g.edge_count()],
    };
    let m0 = GMatrix::new(g.clone(), vec![0.0; g.n()], off)?;
    let l2 = eigen_summary(m0.symmetric(), 0.0)?.eigenvalues[1];
    m0.with_diag(vec![-l2; g.n()])
}

/// Unique diagonal making `U M = 0` for the given off-diagonal values:
/// `M_ii = -Σ_j M_ij (u_j·u_i) / (u_i·u_i)`.
pub fn complete_diagonal<P: AsRef<[f64]>>(
    g: &Arc<Graph>,
    off: Vec<f64>,
    points: &[P],
) -> Result<GMatrix, GMatrixError> {
    if points.len() != g.n() {
        return Err(GMatrixError::Length { expected: g.n(), found: points.len() });
    }
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut diag = vec![0.0; g.n()];
    for (i, d) in diag.iter_mut().enumerate() {
        let ui = points[i].as_ref();
        let nn = dot(ui, ui);
        if nn == 0.0 {
            return Err(GMatrixError::ZeroVector(i));
        }
        let s: f64 = g.incident(i).iter().map(|&(j, k)| off[k] * dot(points[j].as_ref(), ui)).sum();
        *d = -s / nn;
    }
    GMatrix::new(g.clone(), diag, off)
}

/// Nullspace representation: one vector in `R^dim` per node.
#[derive(Clone, Debug, PartialEq)]
pub struct NullspaceRep {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
}

impl NullspaceRep {
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let dim = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        let points = (0..n).map(|i| rows.iter().map(|r| r[i]).collect()).collect();
        Self { dim, points }
    }

    /// The `dim × n` array `U`.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|c| self.points.iter().map(|p| p[c]).collect()).collect()
    }

    pub fn norm(&self, i: usize) -> f64 {
        self.points[i].iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// `M' = D^{-1} M D^{-1}` for `D = diag(d_vec)`.
pub fn node_scale(gm: &GMatrix, d_vec: &[f64]) -> Result<GMatrix, GMatrixError> {
    if let Some(i) = d_vec.iter().position(|&x| x == 0.0) {
        return Err(GMatrixError::ZeroScale(i));
    }
    let diag = gm.diag.iter().enumerate().map(|(i, x)| x / (d_vec[i] * d_vec[i])).collect();
    let off = gm
        .graph
        .edges()
        .iter()
        .zip(&gm.off)
        .map(|(&(i, j), x)| x / (d_vec[i] * d_vec[j]))
        .collect();
    GMatrix::new(gm.graph.clone(), diag, off)
}

/// `U' = U D`.
pub fn rep_scale(u: &NullspaceRep, d_vec: &[f64]) -> Result<NullspaceRep, GMatrixError> {
    if let Some(i) = d_vec.iter().position(|&x| x == 0.0) {
        return Err(GMatrixError::ZeroScale(i));
    }
    let points = u.points.iter().zip(d_vec).map(|(p, s)| p.iter().map(|x| x * s).collect()).collect();
    Ok(NullspaceRep { dim: u.dim, points })
}

/// Scales every vector to unit length; returns the scale vector `d` with
/// `U' = U diag(d)`.
pub fn normalize_rep(u: &NullspaceRep) -> Result<(NullspaceRep, Vec<f64>), GMatrixError> {
    let mut d = Vec::with_capacity(u.points.len());
    for i in 0..u.points.len() {
        let r = u.norm(i);
        if r == 0.0 {
            return Err(GMatrixError::ZeroVector(i));
        }
        d.push(1.0 / r);
    }
    Ok((rep_scale(u, &d)?, d))
}

/// Normalizes `u` and co-scales its source matrix.
pub fn normalize(gm: &GMatrix, u: &NullspaceRep) -> Result<(GMatrix, NullspaceRep), GMatrixError> {
    let (v, d) = normalize_rep(u)?;
    Ok((node_scale(gm, &d)?, v))
}

pub fn nullspace_rep(gm: &GMatrix, tol: impl Into<Tolerance>) -> Result<NullspaceRep, GMatrixError> {
    let s = gm.summary(tol)?;
    if s.corank == 0 {
        return Err(GMatrixError::Nonsingular);
    }
    Ok(NullspaceRep::from_rows(&s.kernel()))
}
