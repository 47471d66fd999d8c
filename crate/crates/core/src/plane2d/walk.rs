//! Matrix families along which the origin moves: every edge carries either
//! a flow (entry `−w / T_e(u − p)`) or a fixed entry, both interpolated
//! linearly together with the origin.

use std::sync::Arc;

use crate::gmatrix::{complete_diagonal, GMatrix};
use crate::graphs::Graph;

use super::area::{area, split_edges, PlaneRep};
use super::circulation::decompose;
use super::{PlaneError, DEGENERACY_TOL};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EdgeVal {
    /// Flow in the stored orientation of the edge.
    Flow(f64),
    /// Matrix entry, independent of the origin.
    Fixed(f64),
}

/// Origin together with one value per edge.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub p: [f64; 2],
    pub vals: Vec<EdgeVal>,
}

impl State {
    /// Flows on the arcs of `u − p` and fixed entries on its degenerate
    /// edges, read off a matrix annihilating `u − p`.
    pub fn from_matrix(points: &[[f64; 2]], g: &Graph, p: [f64; 2], m: &GMatrix, tol: f64) -> Result<Self, PlaneError> {
        let rep = PlaneRep::at(points, p);
        let split = split_edges(&rep, g, DEGENERACY_TOL)?;
        let (f, gv) = decompose(&rep, g, &split, m, tol)?;
        let vals = (0..g.edge_count())
            .map(|k| if split.sign[k] == 0 { EdgeVal::Fixed(gv[k]) } else { EdgeVal::Flow(f.flow[k]) })
            .collect();
        Ok(Self { p, vals })
    }

    pub fn entry(&self, points: &[[f64; 2]], g: &Graph, k: usize) -> Result<f64, PlaneError> {
        match self.vals[k] {
            EdgeVal::Fixed(v) => Ok(v),
            EdgeVal::Flow(w) => {
                let (i, j) = g.edge(k);
                let t = area(points, self.p, i, j);
                if t == 0.0 {
                    return Err(PlaneError::DegenerateFlow(k));
                }
                Ok(-w / t)
            }
        }
    }

    pub fn matrix(&self, points: &[[f64; 2]], g: &Arc<Graph>) -> Result<GMatrix, PlaneError> {
        let off = (0..g.edge_count()).map(|k| self.entry(points, g, k)).collect::<Result<Vec<_>, _>>()?;
        let shifted = PlaneRep::at(points, self.p).shifted_points();
        Ok(complete_diagonal(g, off, &shifted)?)
    }

    /// Flow implied by the current entry of edge `k`.
    pub fn flow(&self, points: &[[f64; 2]], g: &Graph, k: usize) -> Result<f64, PlaneError> {
        match self.vals[k] {
            EdgeVal::Flow(w) => Ok(w),
            EdgeVal::Fixed(v) => {
                let (i, j) = g.edge(k);
                Ok(-v * area(points, self.p, i, j))
            }
        }
    }

    /// Freezes the listed edges at their current entries.
    pub fn fix(&self, points: &[[f64; 2]], g: &Graph, edges: &[usize]) -> Result<Self, PlaneError> {
        let mut out = self.clone();
        for &k in edges {
            out.vals[k] = EdgeVal::Fixed(self.entry(points, g, k)?);
        }
        Ok(out)
    }

    /// Turns the listed fixed edges back into flows at the current origin.
    pub fn release(&self, points: &[[f64; 2]], g: &Graph, edges: &[usize]) -> Result<Self, PlaneError> {
        let mut out = self.clone();
        for &k in edges {
            out.vals[k] = EdgeVal::Flow(self.flow(points, g, k)?);
        }
        Ok(out)
    }
}

/// Linear interpolation between two states of the same shape.
#[derive(Clone, Debug)]
pub struct LinearPath {
    g: Arc<Graph>,
    points: Vec<[f64; 2]>,
    from: State,
    to: State,
}

impl LinearPath {
    pub fn new(g: &Arc<Graph>, points: &[[f64; 2]], from: State, to: State) -> Result<Self, PlaneError> {
        let same = from.vals.len() == to.vals.len()
            && from.vals.iter().zip(&to.vals).all(|(a, b)| std::mem::discriminant(a) == std::mem::discriminant(b));
        if !same {
            return Err(PlaneError::PathShape);
        }
        Ok(Self { g: g.clone(), points: points.to_vec(), from, to })
    }

    pub fn from(&self) -> &State {
        &self.from
    }

    pub fn to(&self) -> &State {
        &self.to
    }

    pub fn state(&self, s: f64) -> State {
        let mix = |a: f64, b: f64| (1.0 - s) * a + s * b;
        let p = [mix(self.from.p[0], self.to.p[0]), mix(self.from.p[1], self.to.p[1])];
        let vals = self
            .from
            .vals
            .iter()
            .zip(&self.to.vals)
            .map(|(a, b)| match (*a, *b) {
                (EdgeVal::Flow(x), EdgeVal::Flow(y)) => EdgeVal::Flow(mix(x, y)),
                (EdgeVal::Fixed(x), EdgeVal::Fixed(y)) => EdgeVal::Fixed(mix(x, y)),
                _ => unreachable!("checked in new"),
            })
            .collect();
        State { p, vals }
    }

    pub fn eval(&self, s: f64) -> Result<GMatrix, PlaneError> {
        self.state(s).matrix(&self.points, &self.g)
    }
}

/// Limit of the family that moves the origin from `rep.origin` (inside a
/// cell with witness `witness`) to `q` while scaling the flow down to 0;
/// entries of edges degenerate at `q` stay at their witness values.
#[derive(Clone, Debug)]
pub struct ShiftLimit {
    pub limit: GMatrix,
    /// `s = 0` is the witness, `s = 1` the limit.
    pub path: LinearPath,
}

pub fn shift_limit(
    rep: &PlaneRep,
    g: &Arc<Graph>,
    witness: &GMatrix,
    q: [f64; 2],
    tol: f64,
) -> Result<ShiftLimit, PlaneError> {
    let sp = split_edges(rep, g, DEGENERACY_TOL)?;
    let sq = split_edges(&PlaneRep::at(&rep.points, q), g, DEGENERACY_TOL)?;
    let inside = sp.sign.iter().zip(&sq.sign).all(|(&a, &b)| b == 0 || b == a);
    if !inside {
        return Err(PlaneError::NotInClosure);
    }
    let start = State::from_matrix(&rep.points, g, rep.origin, witness, tol)?;
    let frozen: Vec<usize> = sq.degenerate();
    let from = start.fix(&rep.points, g, &frozen)?;
    let mut to = from.clone();
    to.p = q;
    for v in &mut to.vals {
        if let EdgeVal::Flow(w) = v {
            *w = 0.0;
        }
    }
    let path = LinearPath::new(g, &rep.points, from, to)?;
    let limit = path.eval(1.0)?;
    Ok(ShiftLimit { limit, path })
}
