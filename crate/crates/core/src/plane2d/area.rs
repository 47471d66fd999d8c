//! Signed areas `T_ij = det(u_i − p, u_j − p)` and the split of the edge
//! set into counterclockwise arcs and edges collinear with the origin.

use crate::graphs::Graph;

use super::PlaneError;

/// Per-node points together with the current origin `p`; operations act on
/// the shifted vectors `u_i − p`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneRep {
    pub points: Vec<[f64; 2]>,
    pub origin: [f64; 2],
}

impl PlaneRep {
    pub fn new(points: Vec<[f64; 2]>) -> Self {
        Self { points, origin: [0.0, 0.0] }
    }

    pub fn at(points: &[[f64; 2]], origin: [f64; 2]) -> Self {
        Self { points: points.to_vec(), origin }
    }

    pub fn shifted(&self, i: usize) -> [f64; 2] {
        [self.points[i][0] - self.origin[0], self.points[i][1] - self.origin[1]]
    }

    pub fn shifted_points(&self) -> Vec<[f64; 2]> {
        (0..self.points.len()).map(|i| self.shifted(i)).collect()
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }
}

pub(crate) fn det(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub(crate) fn norm(a: [f64; 2]) -> f64 {
    a[0].hypot(a[1])
}

/// Signed area `T(u − p)_ij` written as `det(u_i − p, u_j − u_i)`, which is
/// affine in `p` and exactly zero when `u_i = u_j`.
pub(crate) fn area(points: &[[f64; 2]], p: [f64; 2], i: usize, j: usize) -> f64 {
    let a = [points[i][0] - p[0], points[i][1] - p[1]];
    let d = [points[j][0] - points[i][0], points[j][1] - points[i][1]];
    det(a, d)
}

/// Skew-symmetric matrix of signed parallelogram areas.
#[derive(Clone, Debug, PartialEq)]
pub struct AreaMatrix {
    pub t: Vec<Vec<f64>>,
}

impl AreaMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.t[i][j]
    }
}

pub fn area_matrix(rep: &PlaneRep) -> AreaMatrix {
    let n = rep.n();
    let mut t = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = area(&rep.points, rep.origin, i, j);
            t[i][j] = v;
            t[j][i] = -v;
        }
    }
    AreaMatrix { t }
}

/// Orientation of every edge `(i, j)` (stored with `i < j`): `1` for the
/// arc `i → j` (`T_ij > 0`), `−1` for `j → i`, `0` for edges collinear
/// with the origin.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EdgeSplit {
    pub sign: Vec<i8>,
}

impl EdgeSplit {
    /// Arcs of `A_u` as `(tail, head, edge index)`.
    pub fn arcs(&self, g: &Graph) -> Vec<(usize, usize, usize)> {
        g.edges()
            .iter()
            .enumerate()
            .filter_map(|(k, &(i, j))| match self.sign[k] {
                1 => Some((i, j, k)),
                -1 => Some((j, i, k)),
                _ => None,
            })
            .collect()
    }

    /// Edge indices of `E_u`.
    pub fn degenerate(&self) -> Vec<usize> {
        (0..self.sign.len()).filter(|&k| self.sign[k] == 0).collect()
    }

    pub fn is_degenerate(&self, k: usize) -> bool {
        self.sign[k] == 0
    }
}

/// Degeneracy test `|T_ij| ≤ tol·‖u_i − p‖·‖u_j − p‖`.
pub fn split_edges(rep: &PlaneRep, g: &Graph, tol: f64) -> Result<EdgeSplit, PlaneError> {
    for i in 0..rep.n() {
        if norm(rep.shifted(i)) == 0.0 {
            return Err(PlaneError::ZeroVector(i));
        }
    }
    let sign = g
        .edges()
        .iter()
        .map(|&(i, j)| {
            let t = area(&rep.points, rep.origin, i, j);
            if t.abs() <= tol * norm(rep.shifted(i)) * norm(rep.shifted(j)) {
                0
            } else if t > 0.0 {
                1
            } else {
                -1
            }
        })
        .collect();
    Ok(EdgeSplit { sign })
}
