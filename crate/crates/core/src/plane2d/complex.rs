//! The arrangement of lines through edge-joined point pairs: vertices
//! (0-cells), segments and rays (1-cells) and faces (2-cells).

use std::collections::HashMap;

use crate::graphs::Graph;

use super::area::{split_edges, EdgeSplit, PlaneRep};
use super::{PlaneError, DEGENERACY_TOL};

/// Distance below which points count as lying on a line, or as one vertex.
const INCIDENCE_TOL: f64 = 1e-9;
/// Grid for the sign predicate.
const SNAP_SCALE: f64 = 1e12;
/// Coordinates beyond this fall back to the floating-point predicate.
const SNAP_LIMIT: f64 = 1e6;

/// Sign of `orient(a, b, p)` after snapping all coordinates to a 1e−12
/// grid; computed exactly in integers.
pub fn side(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> i8 {
    let inside = [a, b, p].iter().all(|x| x[0].abs() <= SNAP_LIMIT && x[1].abs() <= SNAP_LIMIT);
    if !inside {
        let o = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
        return sign(o);
    }
    let s = |x: f64| (x * SNAP_SCALE).round() as i128;
    let (ax, ay, bx, by, px, py) = (s(a[0]), s(a[1]), s(b[0]), s(b[1]), s(p[0]), s(p[1]));
    let o = (bx - ax) * (py - ay) - (by - ay) * (px - ax);
    o.signum() as i8
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Line {
    /// Two node points defining the line.
    pub a: [f64; 2],
    pub b: [f64; 2],
    /// Edges whose endpoints lie on this line.
    pub edges: Vec<usize>,
}

impl Line {
    fn dir(&self) -> [f64; 2] {
        let d = [self.b[0] - self.a[0], self.b[1] - self.a[1]];
        let r = d[0].hypot(d[1]);
        [d[0] / r, d[1] / r]
    }

    /// Signed distance, positive on the left of `a → b`.
    fn dist(&self, x: [f64; 2]) -> f64 {
        let d = self.dir();
        d[0] * (x[1] - self.a[1]) - d[1] * (x[0] - self.a[0])
    }

    fn param(&self, x: [f64; 2]) -> f64 {
        let d = self.dir();
        d[0] * (x[0] - self.a[0]) + d[1] * (x[1] - self.a[1])
    }

    fn at(&self, t: f64) -> [f64; 2] {
        let d = self.dir();
        [self.a[0] + t * d[0], self.a[1] + t * d[1]]
    }

    pub fn side(&self, p: [f64; 2]) -> i8 {
        side(self.a, self.b, p)
    }
}

/// A 0-cell.
#[derive(Clone, Debug, PartialEq)]
pub struct Vertex {
    pub point: [f64; 2],
    pub lines: Vec<usize>,
}

/// A 1-cell: a bounded segment or a ray of one line.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub line: usize,
    /// Vertex indices at either end, `None` for the open end of a ray.
    pub ends: [Option<usize>; 2],
    /// Interior point used for signatures.
    pub point: [f64; 2],
    /// Faces on the left and right of the line.
    pub faces: [usize; 2],
}

/// A 2-cell, identified by its side of every line.
#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    pub point: [f64; 2],
    pub signs: Vec<i8>,
}

#[derive(Clone, Debug)]
pub struct CellComplex {
    pub lines: Vec<Line>,
    pub vertices: Vec<Vertex>,
    pub segments: Vec<Segment>,
    pub faces: Vec<Face>,
    index: HashMap<Vec<i8>, usize>,
}

impl CellComplex {
    pub fn signs_at(&self, p: [f64; 2]) -> Vec<i8> {
        self.lines.iter().map(|l| l.side(p)).collect()
    }

    /// The face containing `p` in its interior.
    pub fn face_at(&self, p: [f64; 2]) -> Option<usize> {
        self.index.get(&self.signs_at(p)).copied()
    }

    /// Faces whose closure contains `p`; lines passing within the incidence
    /// tolerance of `p` count as passing through it.
    pub fn faces_around(&self, p: [f64; 2]) -> Vec<usize> {
        let scale = p[0].abs().max(p[1].abs()).max(1.0);
        let s: Vec<i8> = self
            .lines
            .iter()
            .map(|l| if l.dist(p).abs() <= INCIDENCE_TOL * scale { 0 } else { l.side(p) })
            .collect();
        (0..self.faces.len())
            .filter(|&f| s.iter().zip(&self.faces[f].signs).all(|(&x, &y)| x == 0 || x == y))
            .collect()
    }

    /// Segments on the boundary of face `f`.
    pub fn segments_of(&self, f: usize) -> Vec<usize> {
        (0..self.segments.len()).filter(|&s| self.segments[s].faces.contains(&f)).collect()
    }

    /// Signature `(A_c, E_c)` of the cell containing `p`.
    pub fn signature(&self, points: &[[f64; 2]], g: &Graph, p: [f64; 2]) -> Result<EdgeSplit, PlaneError> {
        split_edges(&PlaneRep::at(points, p), g, DEGENERACY_TOL)
    }
}

/// Arrangement of the lines through `u_i, u_j` for the edges `ij`. Fails if
/// two adjacent points coincide.
pub fn build_complex(rep: &PlaneRep, g: &Graph) -> Result<CellComplex, PlaneError> {
    for &(i, j) in g.edges() {
        let (a, b) = (rep.points[i], rep.points[j]);
        if (a[0] - b[0]).hypot(a[1] - b[1]) <= INCIDENCE_TOL {
            return Err(PlaneError::Coincident(i, j));
        }
    }
    Ok(arrangement(&rep.points, g))
}

/// Like [`build_complex`] but silently skips edges with identical
/// endpoints.
pub(crate) fn arrangement(points: &[[f64; 2]], g: &Graph) -> CellComplex {
    let mut lines: Vec<Line> = Vec::new();
    for (k, &(i, j)) in g.edges().iter().enumerate() {
        let (a, b) = (points[i], points[j]);
        if a == b {
            continue;
        }
        match lines
            .iter_mut()
            .find(|l| l.dist(a).abs() <= INCIDENCE_TOL && l.dist(b).abs() <= INCIDENCE_TOL)
        {
            Some(l) => l.edges.push(k),
            None => lines.push(Line { a, b, edges: vec![k] }),
        }
    }

    let mut candidates: Vec<[f64; 2]> = Vec::new();
    for (x, l) in lines.iter().enumerate() {
        for &k in &l.edges {
            let (i, j) = g.edge(k);
            candidates.push(points[i]);
            candidates.push(points[j]);
        }
        for m in &lines[x + 1..] {
            if let Some(p) = intersect(l, m) {
                candidates.push(p);
            }
        }
    }
    let mut vertices: Vec<Vertex> = Vec::new();
    for p in candidates {
        let scale = p[0].abs().max(p[1].abs()).max(1.0);
        let known = vertices
            .iter()
            .any(|v| (v.point[0] - p[0]).hypot(v.point[1] - p[1]) <= INCIDENCE_TOL * scale);
        if !known {
            vertices.push(Vertex { point: p, lines: Vec::new() });
        }
    }
    for v in &mut vertices {
        let scale = v.point[0].abs().max(v.point[1].abs()).max(1.0);
        v.lines = (0..lines.len()).filter(|&l| lines[l].dist(v.point).abs() <= INCIDENCE_TOL * scale).collect();
    }

    let mut raw: Vec<(usize, [Option<usize>; 2], [f64; 2])> = Vec::new();
    for (li, l) in lines.iter().enumerate() {
        let mut on: Vec<(f64, usize)> =
            (0..vertices.len()).filter(|&v| vertices[v].lines.contains(&li)).map(|v| (l.param(vertices[v].point), v)).collect();
        on.sort_by(|x, y| x.0.total_cmp(&y.0));
        let (first, last) = (on[0], on[on.len() - 1]);
        raw.push((li, [None, Some(first.1)], l.at(first.0 - 1.0)));
        for w in on.windows(2) {
            raw.push((li, [Some(w[0].1), Some(w[1].1)], l.at(0.5 * (w[0].0 + w[1].0))));
        }
        raw.push((li, [Some(last.1), None], l.at(last.0 + 1.0)));
    }

    let mut index: HashMap<Vec<i8>, usize> = HashMap::new();
    let mut faces: Vec<Face> = Vec::new();
    let mut sums: Vec<([f64; 2], usize)> = Vec::new();
    let mut segments = Vec::with_capacity(raw.len());
    let signs_at = |p: [f64; 2]| lines.iter().map(|l| l.side(p)).collect::<Vec<i8>>();
    for (li, ends, r) in raw {
        let l = &lines[li];
        let clearance = lines
            .iter()
            .enumerate()
            .filter(|&(m, _)| m != li)
            .map(|(_, m)| m.dist(r).abs())
            .fold(2.0, f64::min);
        let delta = 0.5 * clearance;
        let d = l.dir();
        let normal = [-d[1], d[0]];
        let mut pair = [0usize; 2];
        for (slot, s) in [1.0, -1.0].into_iter().enumerate() {
            let p = [r[0] + s * delta * normal[0], r[1] + s * delta * normal[1]];
            let key = signs_at(p);
            let f = *index.entry(key.clone()).or_insert_with(|| {
                faces.push(Face { point: p, signs: key });
                sums.push(([0.0, 0.0], 0));
                faces.len() - 1
            });
            sums[f].0[0] += p[0];
            sums[f].0[1] += p[1];
            sums[f].1 += 1;
            pair[slot] = f;
        }
        segments.push(Segment { line: li, ends, point: r, faces: pair });
    }
    for (f, (s, c)) in sums.into_iter().enumerate() {
        let avg = [s[0] / c as f64, s[1] / c as f64];
        // the average of interior points of a convex face is interior
        if signs_at(avg) == faces[f].signs {
            faces[f].point = avg;
        }
    }
    if lines.is_empty() {
        faces.push(Face { point: [0.0, 0.0], signs: Vec::new() });
        index.insert(Vec::new(), 0);
    }
    CellComplex { lines, vertices, segments, faces, index }
}

fn intersect(l: &Line, m: &Line) -> Option<[f64; 2]> {
    let (d, e) = (l.dir(), m.dir());
    let den = d[0] * e[1] - d[1] * e[0];
    if den.abs() <= 1e-12 {
        return None;
    }
    let w = [m.a[0] - l.a[0], m.a[1] - l.a[1]];
    let t = (w[0] * e[1] - w[1] * e[0]) / den;
    Some(l.at(t))
}

/// 1-cells on a segment `u_a u_b` (for an edge `ab`) whose line leaves all
/// other nodes strictly on two nonempty sides with no edge between them.
pub fn separating_segments(rep: &PlaneRep, g: &Graph, cplx: &CellComplex) -> Vec<usize> {
    let pts = &rep.points;
    let mut out = Vec::new();
    for (li, l) in cplx.lines.iter().enumerate() {
        for &k in &l.edges {
            let (a, b) = g.edge(k);
            let mut side_of = vec![0i8; g.n()];
            let mut ok = true;
            for v in (0..g.n()).filter(|&v| v != a && v != b) {
                side_of[v] = l.side(pts[v]);
                ok &= side_of[v] != 0;
            }
            let has = |s: i8| side_of.contains(&s);
            if !ok || !has(1) || !has(-1) {
                continue;
            }
            if g.edges().iter().any(|&(i, j)| side_of[i] * side_of[j] < 0) {
                continue;
            }
            let (ta, tb) = (l.param(pts[a]), l.param(pts[b]));
            let (lo, hi) = (ta.min(tb), ta.max(tb));
            for (s, seg) in cplx.segments.iter().enumerate() {
                if seg.line != li {
                    continue;
                }
                let within = seg.ends.iter().all(|e| {
                    e.is_some_and(|v| {
                        let t = l.param(cplx.vertices[v].point);
                        t >= lo - INCIDENCE_TOL && t <= hi + INCIDENCE_TOL
                    })
                });
                if within && !out.contains(&s) {
                    out.push(s);
                }
            }
        }
    }
    out.sort_unstable();
    out
}
