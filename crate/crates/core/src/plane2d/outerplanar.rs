//! Geometric check that a normalized plane representation is an
//! outerplanar straight-line embedding.

use std::f64::consts::PI;
use std::fmt;

use crate::graphs::Graph;

/// Why a representation is not an outerplanar embedding. Node labels in
/// the messages are 1-based.
#[derive(Clone, Debug, PartialEq)]
pub enum OuterplanarViolation {
    NotUnit { node: usize, norm: f64 },
    Coincident { i: usize, j: usize, distance: f64 },
    NotExtreme { node: usize },
    Crossing { first: (usize, usize), second: (usize, usize) },
}

impl fmt::Display for OuterplanarViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::NotUnit { node, norm } => write!(f, "node {} has norm {norm}, expected 1", node + 1),
            Self::Coincident { i, j, distance } => {
                write!(f, "nodes {} and {} coincide (distance {distance:e})", i + 1, j + 1)
            }
            Self::NotExtreme { node } => write!(f, "node {} is not a vertex of the convex hull", node + 1),
            Self::Crossing { first: (a, b), second: (c, d) } => {
                write!(f, "edges {}-{} and {}-{} cross", a + 1, b + 1, c + 1, d + 1)
            }
        }
    }
}

pub(crate) fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Open segments `ab` and `cd` (four distinct endpoints) cross.
pub(crate) fn segments_cross(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

/// Checks, in order: unit length, pairwise distinct points (distance
/// above `tol`), convex position, and no two crossing edges.
pub fn verify_outerplanar(points: &[[f64; 2]], g: &Graph, tol: f64) -> Result<(), OuterplanarViolation> {
    let n = points.len();
    assert_eq!(n, g.n(), "one point per node");
    for (node, p) in points.iter().enumerate() {
        let norm = p[0].hypot(p[1]);
        if (norm - 1.0).abs() > tol {
            return Err(OuterplanarViolation::NotUnit { node, norm });
        }
    }
    if let Some((i, j, distance)) = closest_pair(points).filter(|&(_, _, d)| d <= tol) {
        return Err(OuterplanarViolation::Coincident { i, j, distance });
    }
    for i in 0..n {
        if !is_extreme(points, i, tol) {
            return Err(OuterplanarViolation::NotExtreme { node: i });
        }
    }
    let edges = g.edges();
    for (x, &(a, b)) in edges.iter().enumerate() {
        for &(c, d) in &edges[x + 1..] {
            if a == c || a == d || b == c || b == d {
                continue;
            }
            if segments_cross(points[a], points[b], points[c], points[d]) {
                return Err(OuterplanarViolation::Crossing { first: (a, b), second: (c, d) });
            }
        }
    }
    Ok(())
}

fn closest_pair(points: &[[f64; 2]]) -> Option<(usize, usize, f64)> {
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = (points[i][0] - points[j][0]).hypot(points[i][1] - points[j][1]);
            if best.is_none_or(|b| d < b.2) {
                best = Some((i, j, d));
            }
        }
    }
    best
}

/// The directions from point `i` to all others leave an angular gap
/// larger than a half-turn.
fn is_extreme(points: &[[f64; 2]], i: usize, tol: f64) -> bool {
    let mut angles: Vec<f64> = points
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, p)| (p[1] - points[i][1]).atan2(p[0] - points[i][0]))
        .collect();
    if angles.len() < 2 {
        return true;
    }
    angles.sort_by(f64::total_cmp);
    let wrap = angles[0] + 2.0 * PI - angles[angles.len() - 1];
    let gap = angles.windows(2).map(|w| w[1] - w[0]).fold(wrap, f64::max);
    gap > PI + tol
}

/// Nodes sorted counterclockwise by angle.
pub fn angular_order(points: &[[f64; 2]]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a][1].atan2(points[a][0]).total_cmp(&points[b][1].atan2(points[b][0])));
    order
}
