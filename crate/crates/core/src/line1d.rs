//! One-dimensional nullspace representations: either a monotone embedding
//! of a path in the line, or a good G-matrix of corank at least 2.

use std::sync::Arc;

use thiserror::Error;

use crate::gmatrix::{
    complete_diagonal, initial_good_matrix, initial_good_matrix_random, is_well_signed, node_scale, Certificate,
    GMatrix, GMatrixError,
};
use crate::graphs::{is_connected, Graph};
use crate::spectra::{corank_jump, EigenSummary, JumpError, SpectraError, SymmetricSource, Tolerance};
use crate::{DriverConfig, DriverError, NoObserver, Observer};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Line1dError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no corank jump along the family")]
    NoJump,
    #[error("corank jump not resolved: {0}")]
    Jump(String),
    #[error("numerical degeneracy: {0}")]
    Degenerate(String),
    #[error(transparent)]
    GMatrix(#[from] GMatrixError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}

impl<E: std::fmt::Display> From<JumpError<E>> for Line1dError {
    fn from(e: JumpError<E>) -> Self {
        Line1dError::Jump(e.to_string())
    }
}

type Result<T> = std::result::Result<T, Line1dError>;

/// Node values together with the cells between consecutive distinct values
/// and how many edges cover each cell.
#[derive(Clone, Debug, PartialEq)]
pub struct LineRep {
    pub u: Vec<f64>,
    /// Distinct values in increasing order.
    pub points: Vec<f64>,
    pub cells: Vec<(f64, f64)>,
    pub coverage: Vec<usize>,
}

impl LineRep {
    /// Every cell covered once and all values distinct.
    pub fn is_path_embedding(&self) -> bool {
        self.points.len() == self.u.len() && self.coverage.iter().all(|&c| c == 1)
    }
}

pub fn line_rep(g: &Graph, u: &[f64]) -> LineRep {
    let mut points = u.to_vec();
    points.sort_by(f64::total_cmp);
    points.dedup();
    let cells: Vec<(f64, f64)> = points.windows(2).map(|w| (w[0], w[1])).collect();
    let coverage = cells
        .iter()
        .map(|&(a, b)| {
            g.edges()
                .iter()
                .filter(|&&(i, j)| u[i].min(u[j]) <= a && u[i].max(u[j]) >= b)
                .count()
        })
        .collect();
    LineRep { u: u.to_vec(), points, cells, coverage }
}

/// A well-signed matrix annihilating `u`, or `None` when some node with
/// `u_i = 0` has nonzero neighbors of one sign only.
///
/// Edges at a zero node get `−1/P` toward positive neighbors and `−1/Q`
/// toward negative ones (`P`, `Q` the absolute value sums), all others −1.
/// Diagonal entries of zero nodes are 0.
pub fn wu_member(g: &Arc<Graph>, u: &[f64]) -> Option<GMatrix> {
    let n = g.n();
    let mut off = vec![-1.0; g.edge_count()];
    for i in (0..n).filter(|&i| u[i] == 0.0) {
        let pos: f64 = g.neighbors(i).map(|j| u[j]).filter(|&x| x > 0.0).sum();
        let neg: f64 = g.neighbors(i).map(|j| -u[j]).filter(|&x| x > 0.0).sum();
        if (pos > 0.0) != (neg > 0.0) {
            return None;
        }
        for &(j, k) in g.incident(i) {
            if u[j] > 0.0 {
                off[k] = -1.0 / pos;
            } else if u[j] < 0.0 {
                off[k] = -1.0 / neg;
            }
        }
    }
    Some(complete_1d(g, off, u, None))
}

/// Diagonal by `M_ii = −(1/u_i) Σ_j M_ij u_j`; nodes with `u_i = 0` take
/// their value from `keep` (or 0).
fn complete_1d(g: &Arc<Graph>, off: Vec<f64>, u: &[f64], keep: Option<&GMatrix>) -> GMatrix {
    let diag = (0..g.n())
        .map(|i| {
            if u[i] == 0.0 {
                keep.map_or(0.0, |m| m.diag()[i])
            } else {
                -g.incident(i).iter().map(|&(j, k)| off[k] * u[j]).sum::<f64>() / u[i]
            }
        })
        .collect();
    GMatrix::new(g.clone(), diag, off).expect("finite entries")
}

/// Output of [`interpolate`].
#[derive(Clone, Debug)]
pub struct Interpolation {
    pub matrix: GMatrix,
    pub summary: EigenSummary,
    pub t: f64,
    pub bracket: (f64, f64),
}

/// First matrix of corank above that of `m` on the segment from `m` to
/// `m2`, rescaled to the norm of `m` (`t` refers to that segment). `m`
/// must have exactly one negative eigenvalue; `u` are rows both matrices
/// annihilate (used only to validate the input).
pub fn interpolate(u: &[Vec<f64>], m: &GMatrix, m2: &GMatrix, tol: Tolerance) -> Result<Interpolation> {
    let s = m.summary(tol)?;
    if s.n_negative != 1 {
        return Err(Line1dError::Precondition(format!("start has {} negative eigenvalues", s.n_negative)));
    }
    for (name, x) in [("start", m), ("end", m2)] {
        if !is_well_signed(x) {
            return Err(Line1dError::Precondition(format!("{name} matrix is not well-signed")));
        }
        let r = x.residual(&transpose(u));
        let bound = tol.resolve(x.symmetric());
        if r > bound {
            return Err(Line1dError::Precondition(format!("{name} matrix residual {r:e} exceeds {bound:e}")));
        }
    }
    // Scaling m2 keeps the cone spanned by the segment but stops a much
    // larger m2 from squeezing the jump against t = 0.
    let m2 = m2.scaled(m.norm_inf().max(f64::MIN_POSITIVE) / m2.norm_inf().max(f64::MIN_POSITIVE));
    let jump = corank_jump(|t| Ok::<_, std::convert::Infallible>(GMatrix::lerp(m, &m2, t)), s.corank, tol)?;
    let j = jump.ok_or(Line1dError::NoJump)?;
    Ok(Interpolation { matrix: j.matrix, summary: j.summary, t: j.t, bracket: j.bracket })
}

fn transpose(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = rows.first().map_or(0, Vec::len);
    (0..n).map(|i| rows.iter().map(|r| r[i]).collect()).collect()
}

/// Subtracts `t = 1 + 2·max{|M_ii|, |M_jj|, |M_ij|}` from `M_ii` and `M_jj`.
pub fn double_node(u: &[f64], i: usize, j: usize, m: &GMatrix) -> Result<GMatrix> {
    if i == j || u[i] != 0.0 || u[j] != 0.0 {
        return Err(Line1dError::Precondition(format!("nodes {i}, {j} must be distinct zeros of u")));
    }
    let t = 1.0 + 2.0 * m.get(i, i).abs().max(m.get(j, j).abs()).max(m.get(i, j).abs());
    let mut diag = m.diag().to_vec();
    diag[i] -= t;
    diag[j] -= t;
    Ok(m.with_diag(diag)?)
}

fn check_cover(u: &[f64], g: &Graph, (a, b): (usize, usize)) -> Result<()> {
    if !g.has_edge(a, b) || !(u[a] < 0.0 && u[b] > 0.0) {
        return Err(Line1dError::Precondition(format!("{a}-{b} must be an edge with u_a < 0 < u_b")));
    }
    Ok(())
}

/// Adds `t·N^{ab} + t·N^{cd}` with `N^{ab} = −x xᵀ`, `x = (u_b/u_a) e_a − e_b`,
/// so that `N^{ab} u = 0`; `t = 1 + 2·max{|M_bb|, |M_dd|, |M_bd|}`.
/// Requires `b ≠ d`; for `b = d` use [`double_cover_left`].
pub fn double_cover(u: &[f64], ab: (usize, usize), cd: (usize, usize), m: &GMatrix) -> Result<GMatrix> {
    check_cover(u, m.graph(), ab)?;
    check_cover(u, m.graph(), cd)?;
    if ab.1 == cd.1 {
        return Err(Line1dError::Precondition("b = d: the left-endpoint variant is required".into()));
    }
    let (b, d) = (ab.1, cd.1);
    let t = 1.0 + 2.0 * m.get(b, b).abs().max(m.get(d, d).abs()).max(m.get(b, d).abs());
    Ok(add_rank_one(m, u, [ab, cd], t, false))
}

/// Variant for edges sharing the positive endpoint (`a ≠ c`): the roles of
/// the endpoints swap, `x = e_a − (u_a/u_b) e_b` and
/// `t = 1 + 2·max{|M_aa|, |M_cc|, |M_ac|}`.
pub fn double_cover_left(u: &[f64], ab: (usize, usize), cd: (usize, usize), m: &GMatrix) -> Result<GMatrix> {
    check_cover(u, m.graph(), ab)?;
    check_cover(u, m.graph(), cd)?;
    if ab.0 == cd.0 {
        return Err(Line1dError::Precondition("a = c: edges must differ at the negative endpoint".into()));
    }
    let (a, c) = (ab.0, cd.0);
    let t = 1.0 + 2.0 * m.get(a, a).abs().max(m.get(c, c).abs()).max(m.get(a, c).abs());
    Ok(add_rank_one(m, u, [ab, cd], t, true))
}

fn add_rank_one(m: &GMatrix, u: &[f64], edges: [(usize, usize); 2], t: f64, left: bool) -> GMatrix {
    let g = m.graph();
    let mut diag = m.diag().to_vec();
    let mut off = m.off().to_vec();
    for (a, b) in edges {
        let k = g.edge_index(a, b).expect("checked edge");
        if left {
            let r = u[a] / u[b];
            diag[a] -= t;
            diag[b] -= t * r * r;
            off[k] += t * r;
        } else {
            let r = u[b] / u[a];
            diag[a] -= t * r * r;
            diag[b] -= t;
            off[k] += t * r;
        }
    }
    GMatrix::new(m.graph_arc().clone(), diag, off).expect("finite entries")
}

/// `A^t` of the zero-node shift: edges at `p` become `u_j/(u_j − t)·M_pj`,
/// other edges stay, and the diagonal is completed against `u − t`.
/// `p` must be the only zero of `u` and `t` must lie in `(0, c)` with `c` the
/// smallest positive value.
pub fn case21_shift(u: &[f64], m: &GMatrix, p: usize, t: f64) -> Result<GMatrix> {
    if u[p] != 0.0 || u.iter().enumerate().any(|(i, &x)| i != p && x == 0.0) {
        return Err(Line1dError::Precondition(format!("node {p} must be the unique zero of u")));
    }
    let c = u.iter().copied().filter(|&x| x > 0.0).fold(f64::INFINITY, f64::min);
    if !(t > 0.0 && t < c) {
        return Err(Line1dError::Precondition(format!("t = {t} outside (0, {c})")));
    }
    let g = m.graph_arc();
    let mut off = m.off().to_vec();
    for &(j, k) in g.incident(p) {
        off[k] = u[j] / (u[j] - t) * m.off()[k];
    }
    let shifted: Vec<[f64; 1]> = u.iter().map(|&x| [x - t]).collect();
    Ok(complete_diagonal(g, off, &shifted)?)
}

/// `B^t` of the positive-node shift: edges at `p` become
/// `(u_j − u_p)/(u_j − t)·B_pj`, the diagonal is completed against `u − t`.
/// `b` must annihilate `u − u_p`; `t ∈ [0, u_p)`.
pub fn case22_shift(u: &[f64], b: &GMatrix, p: usize, t: f64) -> Result<GMatrix> {
    let up = u[p];
    if !(up > 0.0) {
        return Err(Line1dError::Precondition(format!("u_{p} must be positive")));
    }
    if !(t >= 0.0 && t < up) {
        return Err(Line1dError::Precondition(format!("t = {t} outside [0, {up})")));
    }
    if u.contains(&t) {
        return Err(Line1dError::Precondition(format!("u takes the value t = {t}")));
    }
    let g = b.graph_arc();
    let mut off = b.off().to_vec();
    for &(j, k) in g.incident(p) {
        off[k] = (u[j] - up) / (u[j] - t) * b.off()[k];
    }
    let shifted: Vec<[f64; 1]> = u.iter().map(|&x| [x - t]).collect();
    Ok(complete_diagonal(g, off, &shifted)?)
}

/// Zero/coincidence threshold relative to `‖u‖_∞`.
const SNAP_REL: f64 = 1e-9;

/// Sets near-zero entries to 0 and merges near-equal values.
fn snap(u: &mut [f64]) {
    let scale = u.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let eps = SNAP_REL * scale;
    for x in u.iter_mut() {
        if x.abs() <= eps {
            *x = 0.0;
        }
    }
    let mut order: Vec<usize> = (0..u.len()).collect();
    order.sort_by(|&a, &b| u[a].total_cmp(&u[b]));
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && u[order[end]] - u[order[end - 1]] <= eps {
            end += 1;
        }
        if end - start > 1 {
            let vals: Vec<f64> = order[start..end].iter().map(|&i| u[i]).collect();
            let v = if vals.contains(&0.0) { 0.0 } else { vals.iter().sum::<f64>() / vals.len() as f64 };
            for &i in &order[start..end] {
                u[i] = v;
            }
        }
        start = end;
    }
}

/// Outcome of the main loop.
#[derive(Clone, Debug)]
pub enum LineOutcome {
    Path { u: Vec<f64>, matrix: GMatrix, summary: EigenSummary },
    HighCorank { matrix: GMatrix, summary: EigenSummary },
}

struct Run<'a> {
    g: &'a Arc<Graph>,
    tol: Tolerance,
    obs: &'a mut dyn Observer,
    log: &'a mut Vec<String>,
}

impl Run<'_> {
    fn summary(&self, m: &GMatrix) -> Result<EigenSummary> {
        Ok(m.summary(self.tol)?)
    }

    fn good(&mut self, m: GMatrix) -> Result<LineOutcome> {
        let s = self.summary(&m)?;
        if !is_well_signed(&m) || s.n_negative != 1 || s.corank < 2 {
            return Err(Line1dError::Degenerate(format!(
                "final matrix has signature ({}, {}, {})",
                s.n_negative, s.corank, s.n_positive
            )));
        }
        self.obs.good_matrix(&m, &s);
        Ok(LineOutcome::HighCorank { matrix: m, summary: s })
    }

    fn interpolate(&mut self, u: &[f64], m: &GMatrix, m2: &GMatrix) -> Result<LineOutcome> {
        let rows = [u.to_vec()];
        self.obs.interpolation_pair(&rows, m, m2);
        let r = interpolate(&rows, m, m2, self.tol)?;
        self.log.push(format!(
            "interpolation jump at t = {:.6} (bracket width {:.1e})",
            r.t,
            r.bracket.1 - r.bracket.0
        ));
        self.good(r.matrix)
    }

    fn jump<F>(&mut self, what: &str, family: F) -> Result<LineOutcome>
    where
        F: Fn(f64) -> Result<GMatrix>,
    {
        let j = corank_jump(family, 1, self.tol)?.ok_or(Line1dError::NoJump)?;
        self.log.push(format!("{what}: jump at s = {:.6} (bracket width {:.1e})", j.t, j.bracket.1 - j.bracket.0));
        self.good(j.matrix)
    }

    /// The main loop, starting from a good matrix of corank 1.
    fn raise(&mut self, m0: GMatrix) -> Result<LineOutcome> {
        let g = self.g;
        let n = g.n();
        let s0 = self.summary(&m0)?;
        if s0.corank >= 2 {
            self.log.push(format!("initial matrix already has corank {}", s0.corank));
            return self.good(m0);
        }
        let pi = s0.perron_vector().ok_or_else(|| Line1dError::Degenerate("no Perron vector".into()))?;
        if pi.iter().any(|&x| x <= 0.0) {
            return Err(Line1dError::Degenerate("Perron vector is not positive".into()));
        }
        let kernel = &s0.kernel()[0];
        let inv: Vec<f64> = pi.iter().map(|x| 1.0 / x).collect();
        let mut m = node_scale(&m0, &inv)?;
        let mut w: Vec<f64> = kernel.iter().zip(&pi).map(|(x, p)| x / p).collect();
        let scale = w.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        w.iter_mut().for_each(|x| *x /= scale);
        snap(&mut w);
        m = complete_1d(g, m.off().to_vec(), &w, Some(&m));
        check_order(g, &w)?;

        for iteration in 0..4 * n + 8 {
            let s = self.summary(&m)?;
            self.check_member(&m, &w)?;
            if s.n_negative != 1 {
                return Err(Line1dError::Degenerate(format!("{} negative eigenvalues in the main loop", s.n_negative)));
            }
            self.obs.good_matrix(&m, &s);
            if s.corank >= 2 {
                return self.good(m);
            }
            let lr = line_rep(g, &w);
            if lr.is_path_embedding() {
                self.log.push(format!("path embedding after {iteration} iterations"));
                return Ok(LineOutcome::Path { u: w, matrix: m, summary: s });
            }
            let zeros: Vec<usize> = (0..n).filter(|&i| w[i] == 0.0).collect();
            let Some((mut a, mut b)) = nearest_double_cell(&lr) else {
                if zeros.len() >= 2 {
                    self.log.push("double node on coincident zeros".into());
                    let m2 = double_node(&w, zeros[0], zeros[1], &m)?;
                    return self.interpolate(&w, &m, &m2);
                }
                return Err(Line1dError::Degenerate("no doubly covered cell but not a path embedding".into()));
            };
            if b <= 0.0 {
                w.iter_mut().for_each(|x| *x = -*x);
                (a, b) = (-b, -a);
                self.log.push(format!("iteration {iteration}: flipped the sign of u"));
            }
            let (nonneg, pos) = (count(&w, |x| x >= 0.0), count(&w, |x| x > 0.0));
            if a < 0.0 {
                self.log.push(format!("iteration {iteration}: case 1, cell ({a:.4}, {b:.4})"));
                let covering: Vec<(usize, usize)> = g
                    .edges()
                    .iter()
                    .filter(|&&(i, j)| w[i].min(w[j]) <= a && w[i].max(w[j]) >= b)
                    .map(|&(i, j)| if w[i] < w[j] { (i, j) } else { (j, i) })
                    .take(2)
                    .collect();
                let (e1, e2) = (covering[0], covering[1]);
                let m2 = if e1.1 != e2.1 { double_cover(&w, e1, e2, &m)? } else { double_cover_left(&w, e1, e2, &m)? };
                return self.interpolate(&w, &m, &m2);
            }
            let p = (0..n)
                .filter(|&i| w[i] >= 0.0)
                .min_by(|&i, &j| w[i].total_cmp(&w[j]))
                .expect("the doubly covered cell lies right of the origin");
            if w[p] == 0.0 {
                if let Some(&j) = zeros.iter().find(|&&j| j != p) {
                    self.log.push(format!("iteration {iteration}: case 2.1, double node"));
                    let m2 = double_node(&w, p, j, &m)?;
                    return self.interpolate(&w, &m, &m2);
                }
                let c = w.iter().copied().filter(|&x| x > 0.0).fold(f64::INFINITY, f64::min);
                let mz = m.with_diag_entry(p, 0.0);
                let sz = self.summary(&mz)?;
                if sz.n_negative >= 2 {
                    self.log.push(format!("iteration {iteration}: case 2.1, zeroed diagonal has two negatives"));
                    return self.interpolate(&w, &m, &mz);
                }
                if sz.n_negative == 0 {
                    return Err(Line1dError::Degenerate("zeroed diagonal gave a semidefinite matrix".into()));
                }
                if sz.corank >= 2 {
                    return self.good(mz);
                }
                let half = case21_shift(&w, &mz, p, c / 2.0)?;
                let sh = self.summary(&half)?;
                if sh.n_negative == 1 {
                    if sh.corank >= 2 {
                        return self.good(half);
                    }
                    self.log.push(format!("iteration {iteration}: case 2.1, shift by {:.4}", c / 2.0));
                    m = half;
                    w.iter_mut().for_each(|x| *x -= c / 2.0);
                    if !(count(&w, |x| x >= 0.0) < nonneg && count(&w, |x| x > 0.0) == pos) {
                        return Err(Line1dError::Degenerate("termination metric did not decrease".into()));
                    }
                    continue;
                }
                let wc = w.clone();
                return self.jump("case 2.1 shift", |t| {
                    if t == 0.0 {
                        Ok(mz.clone())
                    } else {
                        case21_shift(&wc, &mz, p, t * c / 2.0)
                    }
                });
            }
            let up = w[p];
            let mut shifted: Vec<f64> = w.iter().map(|x| x - up).collect();
            shifted[p] = 0.0;
            let bm = wu_member(g, &shifted)
                .ok_or_else(|| Line1dError::Degenerate(format!("node {p} has neighbors on one side only")))?;
            let sb = self.summary(&bm)?;
            if sb.n_negative == 1 {
                if sb.corank >= 2 {
                    return self.good(bm);
                }
                self.log.push(format!("iteration {iteration}: case 2.2, shift by {up:.4}"));
                m = bm;
                w = shifted;
                if !(count(&w, |x| x > 0.0) < pos && count(&w, |x| x >= 0.0) == nonneg) {
                    return Err(Line1dError::Degenerate("termination metric did not decrease".into()));
                }
                continue;
            }
            let b0 = case22_shift(&w, &bm, p, 0.0)?;
            let s0 = self.summary(&b0)?;
            if s0.n_negative >= 2 {
                self.log.push(format!("iteration {iteration}: case 2.2, B^0 has two negatives"));
                return self.interpolate(&w, &m, &b0);
            }
            if s0.n_negative == 0 {
                return Err(Line1dError::Degenerate("B^0 is semidefinite".into()));
            }
            if s0.corank >= 2 {
                return self.good(b0);
            }
            self.log.push(format!("iteration {iteration}: case 2.2, searching the shift family"));
            let wc = w.clone();
            return self.jump("case 2.2 shift", |s| {
                if s == 1.0 {
                    Ok(bm.clone())
                } else {
                    case22_shift(&wc, &bm, p, s * up)
                }
            });
        }
        Err(Line1dError::Degenerate("iteration budget exhausted".into()))
    }

    fn check_member(&self, m: &GMatrix, w: &[f64]) -> Result<()> {
        let pts: Vec<[f64; 1]> = w.iter().map(|&x| [x]).collect();
        let r = m.residual(&pts);
        let bound = self.tol.resolve(m.symmetric());
        if !is_well_signed(m) || r > bound {
            return Err(Line1dError::Degenerate(format!("left W_u (residual {r:e}, bound {bound:e})")));
        }
        Ok(())
    }
}

fn count(w: &[f64], f: impl Fn(f64) -> bool) -> usize {
    w.iter().filter(|&&x| f(x)).count()
}

/// Doubly covered cell nearest the origin; ties go to the smaller left end.
fn nearest_double_cell(lr: &LineRep) -> Option<(f64, f64)> {
    let dist = |&(a, b): &(f64, f64)| a.max(-b).max(0.0);
    lr.cells
        .iter()
        .zip(&lr.coverage)
        .filter(|&(_, &c)| c >= 2)
        .map(|(cell, _)| *cell)
        .min_by(|x, y| dist(x).total_cmp(&dist(y)).then(x.0.total_cmp(&y.0)))
}

/// After Perron scaling every positive node has a strictly smaller
/// neighbor and every negative node a strictly larger one.
fn check_order(g: &Graph, w: &[f64]) -> Result<()> {
    for i in 0..g.n() {
        let ok = if w[i] > 0.0 {
            g.neighbors(i).any(|j| w[j] < w[i])
        } else if w[i] < 0.0 {
            g.neighbors(i).any(|j| w[j] > w[i])
        } else {
            true
        };
        if !ok {
            return Err(Line1dError::Degenerate(format!("ordering property fails at node {i}")));
        }
    }
    Ok(())
}

/// Runs the main loop from a good matrix `m0` of `g`.
pub fn raise_corank(m0: GMatrix, tol: Tolerance, obs: &mut dyn Observer, log: &mut Vec<String>) -> Result<LineOutcome> {
    let g = m0.graph_arc().clone();
    Run { g: &g, tol, obs, log }.raise(m0)
}

pub fn embed_line(g: &Graph) -> std::result::Result<Certificate, DriverError> {
    embed_line_with(g, &DriverConfig::default(), &mut NoObserver)
}

/// Either a monotone path embedding or a corank ≥ 2 certificate.
pub fn embed_line_with(
    g: &Graph,
    cfg: &DriverConfig,
    obs: &mut dyn Observer,
) -> std::result::Result<Certificate, DriverError> {
    if g.n() < 2 {
        return Err(DriverError::TooSmall(2));
    }
    if !is_connected(g) {
        return Err(DriverError::Disconnected);
    }
    let g = Arc::new(g.clone());
    let tol = cfg.tolerance();
    let mut log = Vec::new();
    let mut last = String::new();
    for attempt in 0..=cfg.restarts {
        let m0 = match cfg.rng(attempt) {
            None => initial_good_matrix(&g),
            Some(mut rng) => initial_good_matrix_random(&g, &mut rng),
        }
        .expect("connected graph with at least two nodes");
        log.push(format!("attempt {attempt}: {} initial matrix", if attempt == 0 && cfg.seed == 0 { "uniform" } else { "randomized" }));
        match raise_corank(m0, tol, obs, &mut log) {
            Ok(LineOutcome::Path { u, matrix, summary }) => {
                let c = Certificate::path_embedding(&matrix, &summary, &u, log.clone());
                if c.report.passed() {
                    return Ok(c);
                }
                last = format!("path certificate failed: {:?}", c.report.failures().map(|x| &x.name).collect::<Vec<_>>());
            }
            Ok(LineOutcome::HighCorank { matrix, summary }) => {
                let c = Certificate::high_corank(&matrix, &summary, 2, log.clone());
                if c.report.passed() {
                    return Ok(c);
                }
                last = format!("matrix certificate failed: {:?}", c.report.failures().map(|x| &x.name).collect::<Vec<_>>());
            }
            Err(e) => last = e.to_string(),
        }
        log.push(format!("attempt {attempt} failed: {last}"));
    }
    Err(DriverError::Exhausted { attempts: cfg.restarts + 1, last, log })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmatrix::CertificateKind;
    use crate::graphs::path_order;
    use crate::spectra::eigen_summary;

    fn arc(g: Graph) -> Arc<Graph> {
        Arc::new(g)
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn line_rep_counts_cover() {
        let g = Graph::cycle(4);
        let lr = line_rep(&g, &[-1.0, 1.0, -1.0, 1.0]);
        assert_eq!(lr.cells, vec![(-1.0, 1.0)]);
        assert_eq!(lr.coverage, vec![4]);
        let p = line_rep(&Graph::path(3), &[0.0, 1.0, 2.0]);
        assert!(p.is_path_embedding());
    }

    #[test]
    fn wu_member_examples() {
        let p3 = arc(Graph::path(3));
        let m = wu_member(&p3, &[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(m.symmetric().rows(), vec![vec![0.0, -1.0, 0.0], vec![-1.0, 0.0, -1.0], vec![0.0, -1.0, 0.0]]);
        assert!(wu_member(&p3, &[0.0, 1.0, 2.0]).is_none());

        let k3 = arc(Graph::complete(3));
        let u = [-1.0, 0.0, 1.0];
        let m = wu_member(&k3, &u).unwrap();
        assert!(is_well_signed(&m));
        assert!(m.residual(&u.map(|x| [x])) < 1e-14);
    }

    #[test]
    fn double_node_examples() {
        // on P4 the vector (−1, 0, 0, 1) admits no member of W_u, so use C4
        let p4 = arc(Graph::path(4));
        assert!(wu_member(&p4, &[-1.0, 0.0, 0.0, 1.0]).is_none());
        let c4 = arc(Graph::cycle(4));
        let u = [-1.0, 0.0, 1.0, 0.0];
        let m = wu_member(&c4, &u).unwrap();
        let m2 = double_node(&u, 1, 3, &m).unwrap();
        assert!(m2.summary(tol()).unwrap().n_negative >= 2);
        assert!(m2.residual(&u.map(|x| [x])) < 1e-14);

        let z = GMatrix::uniform(arc(Graph::empty(2)), 0.0, 0.0);
        let m2 = double_node(&[0.0, 0.0], 0, 1, &z).unwrap();
        assert_eq!(m2.diag(), &[-1.0, -1.0]);
        assert!(double_node(&[1.0, 0.0], 0, 1, &z).is_err());
    }

    #[test]
    fn double_cover_examples() {
        // N^{ab} for u_a = −1, u_b = 2
        let p2 = arc(Graph::path(2));
        let u = [-1.0, 2.0];
        let zero = GMatrix::uniform(p2.clone(), 0.0, -1.0e-300);
        let out = add_rank_one(&zero, &u, [(0, 1), (0, 1)], 0.5, false);
        assert!((out.get(0, 0) + 4.0).abs() < 1e-12);
        assert!((out.get(0, 1) + 2.0).abs() < 1e-12);
        assert!((out.get(1, 1) + 1.0).abs() < 1e-12);

        let c4 = arc(Graph::cycle(4));
        let u = [-1.0, 1.0, -1.0, 1.0];
        let m = wu_member(&c4, &u).unwrap();
        let m2 = double_cover(&u, (0, 1), (2, 3), &m).unwrap();
        assert!(m2.summary(tol()).unwrap().n_negative >= 2);
        assert!(m2.residual(&u.map(|x| [x])) < 1e-12);
        assert!(is_well_signed(&m2));

        assert!(double_cover(&u, (0, 1), (2, 1), &m).is_err());
        let m3 = double_cover_left(&u, (0, 1), (2, 1), &m).unwrap();
        assert!(m3.summary(tol()).unwrap().n_negative >= 2);
        assert!(m3.residual(&u.map(|x| [x])) < 1e-12);
    }

    #[test]
    fn case21_examples() {
        let p3 = arc(Graph::path(3));
        let u = [-1.0, 0.0, 1.0];
        let m = wu_member(&p3, &u).unwrap();
        let a = case21_shift(&u, &m, 1, 0.5).unwrap();
        assert!((a.get(1, 0) + 2.0 / 3.0).abs() < 1e-15);
        assert!((a.get(1, 2) + 2.0).abs() < 1e-15);
        assert!(a.residual(&[[-1.5], [-0.5], [0.5]]) < 1e-14);

        let tiny = case21_shift(&u, &m, 1, 1e-6).unwrap();
        let diff = tiny.symmetric().add(&m.with_diag_entry(1, 0.0).symmetric().scaled(-1.0)).max_abs();
        assert!(diff < 1e-5, "{diff}");
        assert!(case21_shift(&u, &m, 1, 1.0).is_err());
    }

    #[test]
    fn case22_examples() {
        // u_p = 0.5 is the smallest positive value, node 1
        let p3 = arc(Graph::path(3));
        let u = [-1.0, 0.5, 1.0];
        let shifted = [-1.5, 0.0, 0.5];
        let b = wu_member(&p3, &shifted).unwrap();
        let near = case22_shift(&u, &b, 1, 0.5 - 1e-6).unwrap();
        let diff = near.symmetric().add(&b.symmetric().scaled(-1.0)).max_abs();
        assert!(diff <= 1e-4 * b.norm_inf(), "{diff}");
        let b0 = case22_shift(&u, &b, 1, 0.0).unwrap();
        assert!(b0.residual(&u.map(|x| [x])) < 1e-14);
        assert!(case22_shift(&u, &b, 1, 0.5).is_err());
    }

    #[test]
    fn interpolate_contracts() {
        // diag(−1, 1−2t, 1) shifted into the form M + t(M' − M)
        let k3 = arc(Graph::empty(3));
        let m = GMatrix::new(k3.clone(), vec![-1.0, 1.0, 1.0], vec![]).unwrap();
        let m2 = GMatrix::new(k3, vec![-1.0, -1.0, 1.0], vec![]).unwrap();
        let r = interpolate(&[], &m, &m2, tol()).unwrap();
        assert!((r.t - 0.5).abs() < 1e-9);
        assert_eq!(interpolate(&[], &m, &m, tol()).unwrap_err(), Line1dError::NoJump);
    }

    #[test]
    fn snapping_merges_values() {
        let mut u = vec![1e-12, 0.5, 0.5 + 1e-13, -1.0];
        snap(&mut u);
        assert_eq!(u[0], 0.0);
        assert_eq!(u[1], u[2]);
    }

    #[test]
    fn embed_examples() {
        let c = embed_line(&Graph::path(4)).unwrap();
        assert_eq!(c.kind, CertificateKind::PathEmbedding);
        assert!(c.report.passed());

        let c = embed_line(&Graph::star(3)).unwrap();
        assert_eq!(c.kind, CertificateKind::HighCorankMatrix);
        let s = eigen_summary(&crate::spectra::SymmetricMatrix::from_rows(&c.matrix).unwrap(), c.tolerance).unwrap();
        assert_eq!(s.n_negative, 1);
        assert!(s.corank >= 2);

        let c = embed_line(&Graph::complete(3)).unwrap();
        assert_eq!(c.kind, CertificateKind::HighCorankMatrix);
        assert!(c.report.passed());

        assert_eq!(embed_line(&Graph::empty(3)).unwrap_err(), DriverError::Disconnected);
    }

    #[test]
    fn small_graphs_follow_the_dichotomy() {
        for n in 2..=6 {
            for g in crate::graphs::enumerate::connected_graphs(n) {
                let c = embed_line(&g).unwrap_or_else(|e| panic!("{}: {e}", g.render()));
                assert!(c.report.passed(), "{}", g.render());
                assert_eq!(c.kind == CertificateKind::PathEmbedding, path_order(&g).is_some(), "{}", g.render());
            }
        }
    }
}
