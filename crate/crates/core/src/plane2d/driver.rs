//! The 2-D driver: starting from a good matrix of corank 2, either read off
//! an outerplanar embedding or move along well-signed families until the
//! corank reaches 3.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use crate::gmatrix::hull::origin_margin;
use crate::gmatrix::{
    initial_good_matrix, initial_good_matrix_random, is_well_signed, normalize, Certificate, GMatrix, NullspaceRep,
};
use crate::graphs::{cut_node, is_connected, Graph};
use crate::line1d::{interpolate, raise_corank, LineOutcome};
use crate::spectra::{corank_jump, EigenSummary, JumpError, Tolerance};
use crate::{DriverConfig, DriverError, NoObserver, Observer};

use super::area::{area, split_edges, EdgeSplit, PlaneRep};
use super::circulation::{assemble, cycle_cover, decompose, positive_circulation, project_circulation, Circulation};
use super::complex::{arrangement, CellComplex};
use super::outerplanar::{segments_cross, verify_outerplanar};
use super::walk::{EdgeVal, LinearPath, State};
use super::{PlaneError, DEGENERACY_TOL};

/// Escalation targets tried per attempt.
const ROUNDS: usize = 16;
/// Unit vectors closer than this are merged into one point.
const COINCIDE_TOL: f64 = 1e-8;
/// Kernel vectors shorter than this (relative to the longest) are zero.
const ZERO_TOL: f64 = 1e-9;
/// Residual allowed when re-reading a matrix against snapped points.
const SNAP_RESIDUAL: f64 = 1e-6;
const GEOMETRY_TOL: f64 = 1e-9;

pub fn embed_plane(g: &Graph) -> Result<Certificate, DriverError> {
    embed_plane_with(g, &DriverConfig::default(), &mut NoObserver)
}

/// Either an outerplanar embedding on the unit circle or a good matrix of
/// corank at least 3. The graph must be 2-connected.
pub fn embed_plane_with(g: &Graph, cfg: &DriverConfig, obs: &mut dyn Observer) -> Result<Certificate, DriverError> {
    if g.n() < 3 {
        return Err(DriverError::TooSmall(3));
    }
    if !is_connected(g) {
        return Err(DriverError::Disconnected);
    }
    if let Some(v) = cut_node(g) {
        return Err(DriverError::NotBiconnected(format!("node {} is a cut node", v + 1)));
    }
    let g = Arc::new(g.clone());
    let mut log = Vec::new();
    let mut last = String::new();
    for attempt in 0..=cfg.restarts {
        let m0 = match cfg.rng(attempt) {
            None => initial_good_matrix(&g),
            Some(mut rng) => initial_good_matrix_random(&g, &mut rng),
        }
        .expect("connected graph with at least two nodes");
        log.push(format!("attempt {attempt}: {} initial matrix", if attempt == 0 && cfg.seed == 0 { "uniform" } else { "randomized" }));
        let res = Plane { g: &g, tol: cfg.tolerance(), obs: &mut *obs, log: &mut log }.run(m0);
        match res {
            Ok(Outcome::Embedding { points, matrix, summary }) => {
                let c = Certificate::outerplanar_embedding(&matrix, &summary, &points, log.clone());
                if c.report.passed() {
                    return Ok(c);
                }
                last = format!("embedding certificate failed: {:?}", c.report.failures().map(|x| &x.name).collect::<Vec<_>>());
            }
            Ok(Outcome::HighCorank { matrix, summary }) => {
                let c = Certificate::high_corank(&matrix, &summary, 3, log.clone());
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

enum Outcome {
    Embedding { points: Vec<[f64; 2]>, matrix: GMatrix, summary: EigenSummary },
    HighCorank { matrix: GMatrix, summary: EigenSummary },
}

/// Early exit from deep inside a walk.
enum Stop {
    Found(Outcome),
    Fail(PlaneError),
}

impl<E: Into<PlaneError>> From<E> for Stop {
    fn from(e: E) -> Self {
        Stop::Fail(e.into())
    }
}

type Step<T> = Result<T, Stop>;

fn stuck(msg: impl Into<String>) -> Stop {
    Stop::Fail(PlaneError::Stuck(msg.into()))
}

#[derive(Clone, Debug)]
enum Target {
    /// Nodes sharing one point.
    Coincident(Vec<usize>),
    /// Two edges whose chords cross at `q`.
    Crossing(usize, usize, [f64; 2]),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Coincident(j) => {
                let names: Vec<String> = j.iter().map(|v| (v + 1).to_string()).collect();
                write!(f, "coincident nodes {}", names.join(","))
            }
            Target::Crossing(a, b, _) => write!(f, "crossing edges #{a} and #{b}"),
        }
    }
}

/// Geometry shared by all targets of one attempt.
struct Ctx {
    points: Vec<[f64; 2]>,
    /// Edges between coincident points; collinear with every origin.
    pinned: Vec<bool>,
    cplx: CellComplex,
    splits: Vec<Option<EdgeSplit>>,
    crossable: Vec<Option<Circulation>>,
}

impl Ctx {
    fn new(g: &Graph, points: Vec<[f64; 2]>) -> Self {
        let pinned: Vec<bool> = g.edges().iter().map(|&(i, j)| points[i] == points[j]).collect();
        let cplx = arrangement(&points, g);
        let expected: Vec<usize> = (0..g.edge_count()).filter(|&k| pinned[k]).collect();
        let splits: Vec<Option<EdgeSplit>> = cplx
            .faces
            .iter()
            .map(|f| {
                let s = split_edges(&PlaneRep::at(&points, f.point), g, DEGENERACY_TOL).ok()?;
                (s.degenerate() == expected && positive_circulation(&s, g).is_some()).then_some(s)
            })
            .collect();
        let crossable = cplx
            .segments
            .iter()
            .map(|seg| {
                if seg.faces.iter().any(|&f| splits[f].is_none()) {
                    return None;
                }
                let s = split_edges(&PlaneRep::at(&points, seg.point), g, DEGENERACY_TOL).ok()?;
                if s.degenerate().len() == expected.len() {
                    return None;
                }
                positive_circulation(&s, g)
            })
            .collect();
        Self { points, pinned, cplx, splits, crossable }
    }

    fn free_degenerate(&self, split: &EdgeSplit) -> Vec<usize> {
        split.degenerate().into_iter().filter(|&k| !self.pinned[k]).collect()
    }

    /// Shortest face path from any of `sources` to any of `targets` through
    /// crossable segments: the start face and `(segment, face)` steps.
    fn route(&self, sources: &[usize], targets: &[usize]) -> Option<(usize, Vec<(usize, usize)>)> {
        let nf = self.cplx.faces.len();
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nf];
        for (s, seg) in self.cplx.segments.iter().enumerate() {
            if self.crossable[s].is_some() {
                let [a, b] = seg.faces;
                adj[a].push((s, b));
                adj[b].push((s, a));
            }
        }
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; nf];
        let mut seen = vec![false; nf];
        let mut queue = VecDeque::new();
        for &s in sources {
            seen[s] = true;
            queue.push_back(s);
        }
        while let Some(f) = queue.pop_front() {
            if targets.contains(&f) {
                let mut steps = Vec::new();
                let mut x = f;
                while let Some((s, p)) = prev[x] {
                    steps.push((s, x));
                    x = p;
                }
                steps.reverse();
                return Some((x, steps));
            }
            for &(s, h) in &adj[f] {
                if !seen[h] && self.splits[h].is_some() {
                    seen[h] = true;
                    prev[h] = Some((s, f));
                    queue.push_back(h);
                }
            }
        }
        None
    }
}

struct Plane<'a> {
    g: &'a Arc<Graph>,
    tol: Tolerance,
    obs: &'a mut dyn Observer,
    log: &'a mut Vec<String>,
}

impl Plane<'_> {
    fn summary(&self, m: &GMatrix) -> Result<EigenSummary, PlaneError> {
        m.summary(self.tol).map_err(|e| PlaneError::GMatrix(e.into()))
    }

    fn accept(&mut self, m: GMatrix, s: EigenSummary) -> Result<Outcome, PlaneError> {
        if !is_well_signed(&m) || s.n_negative != 1 || s.corank < 3 {
            return Err(PlaneError::Stuck(format!(
                "rejected matrix with signature ({}, {}, {})",
                s.n_negative, s.corank, s.n_positive
            )));
        }
        self.obs.good_matrix(&m, &s);
        self.log.push(format!("good matrix of corank {}", s.corank));
        Ok(Outcome::HighCorank { matrix: m, summary: s })
    }

    fn run(&mut self, m0: GMatrix) -> Result<Outcome, PlaneError> {
        let s0 = self.summary(&m0)?;
        if !is_well_signed(&m0) || s0.n_negative != 1 {
            return Err(PlaneError::Stuck("initial matrix is not good".into()));
        }
        self.obs.good_matrix(&m0, &s0);
        if s0.corank >= 3 {
            return self.accept(m0, s0);
        }
        let m = match s0.corank {
            2 => m0,
            1 => {
                self.log.push("corank 1: raising with the line procedure".into());
                match raise_corank(m0, self.tol, &mut *self.obs, &mut *self.log)
                    .map_err(|e| PlaneError::Stuck(e.to_string()))?
                {
                    LineOutcome::HighCorank { matrix, summary } if summary.corank >= 3 => {
                        return self.accept(matrix, summary)
                    }
                    LineOutcome::HighCorank { matrix, .. } => matrix,
                    LineOutcome::Path { .. } => return Err(PlaneError::Stuck("2-connected graph embedded as a path".into())),
                }
            }
            c => return Err(PlaneError::Stuck(format!("initial matrix has corank {c}"))),
        };
        self.escalate(m)
    }

    fn escalate(&mut self, m: GMatrix) -> Result<Outcome, PlaneError> {
        let s = self.summary(&m)?;
        let rows = s.kernel();
        let rep = NullspaceRep::from_rows(&rows);
        let norms: Vec<f64> = (0..rep.points.len()).map(|i| rep.norm(i)).collect();
        let longest = norms.iter().copied().fold(0.0, f64::max);
        if let Some(i) = norms.iter().position(|&r| r <= ZERO_TOL * longest) {
            self.log.push(format!("node {} represented by the zero vector", i + 1));
            return self.zero_node(&rows, &m, i);
        }
        let (m1, unit) = normalize(&m, &rep)?;
        let points: Vec<[f64; 2]> = unit.points.iter().map(|p| [p[0], p[1]]).collect();
        let clusters = coincidence_classes(&points);
        if clusters.is_empty() {
            match verify_outerplanar(&points, self.g, GEOMETRY_TOL) {
                Ok(()) => {
                    let summary = self.summary(&m1)?;
                    self.log.push("nullspace representation is an outerplanar embedding".into());
                    return Ok(Outcome::Embedding { points, matrix: m1, summary });
                }
                Err(v) => self.log.push(format!("not outerplanar: {v}")),
            }
        }
        let snapped = snap(&points, &clusters);
        let m2 = self.reread(&m1, &snapped)?;
        let s2 = self.summary(&m2)?;
        if s2.n_negative != 1 || !is_well_signed(&m2) {
            return Err(PlaneError::Stuck("snapped matrix is not good".into()));
        }
        if s2.corank >= 3 {
            return self.accept(m2, s2);
        }
        self.obs.good_matrix(&m2, &s2);
        let targets = targets(self.g, &snapped, &clusters);
        if targets.is_empty() {
            return Err(PlaneError::Stuck("no coincidence or crossing to resolve".into()));
        }
        let ctx = Ctx::new(self.g, snapped);
        let st0 = State::from_matrix(&ctx.points, self.g, [0.0, 0.0], &m2, SNAP_RESIDUAL)?;
        let mut last = PlaneError::Stuck("no rounds".into());
        for (round, t) in targets.iter().take(ROUNDS).enumerate() {
            self.log.push(format!("round {round}: {t}"));
            let res = match t {
                Target::Coincident(j) => self.merge(&ctx, &st0, j),
                Target::Crossing(_, _, q) => self.cross_at(&ctx, &st0, *q),
            };
            match res {
                Ok(o) | Err(Stop::Found(o)) => return Ok(o),
                Err(Stop::Fail(e)) => {
                    self.log.push(format!("round {round} failed: {e}"));
                    last = e;
                }
            }
        }
        Err(last)
    }

    /// The matrix of `m1`'s flows against the snapped points: flows are
    /// projected back onto circulations so the kernel is exact.
    fn reread(&self, m1: &GMatrix, points: &[[f64; 2]]) -> Result<GMatrix, PlaneError> {
        let rep = PlaneRep::new(points.to_vec());
        let split = split_edges(&rep, self.g, DEGENERACY_TOL)?;
        let (f, gv) = decompose(&rep, self.g, &split, m1, SNAP_RESIDUAL)?;
        let f = project_circulation(&split, self.g, &f.flow);
        if !f.is_positive_on(&split) || split.degenerate().iter().any(|&k| gv[k] >= 0.0) {
            return Err(PlaneError::Stuck("flows lost positivity when snapping".into()));
        }
        assemble(&rep, self.g, &split, &f, &gv)
    }

    /// Escalation at a node with zero vector: lowering its diagonal keeps
    /// the kernel and eventually adds a negative eigenvalue.
    fn zero_node(&mut self, rows: &[Vec<f64>], m: &GMatrix, i: usize) -> Result<Outcome, PlaneError> {
        let mut s = 1.0;
        let mut m2 = None;
        for _ in 0..64 {
            let cand = m.with_diag_entry(i, m.diag()[i] - s);
            if self.summary(&cand)?.n_negative >= 2 {
                m2 = Some(cand);
                break;
            }
            s *= 2.0;
        }
        let m2 = m2.ok_or_else(|| PlaneError::Stuck("diagonal decrease never added a negative eigenvalue".into()))?;
        self.obs.interpolation_pair(rows, m, &m2);
        let r = interpolate(rows, m, &m2, self.tol).map_err(|e| PlaneError::Stuck(e.to_string()))?;
        self.accept(r.matrix, r.summary)
    }

    /// Runs one linear family and stops at the first corank jump.
    fn follow(&mut self, ctx: &Ctx, from: &State, to: State) -> Step<State> {
        let path = LinearPath::new(self.g, &ctx.points, from.clone(), to)?;
        match corank_jump(|s| path.eval(s), 2, self.tol) {
            Ok(Some(j)) => Err(Stop::Found(self.accept(j.matrix, j.summary)?)),
            Ok(None) => {
                let m = path.eval(1.0)?;
                let s = self.summary(&m)?;
                if s.corank >= 3 && s.n_negative == 1 && is_well_signed(&m) {
                    return Err(Stop::Found(self.accept(m, s)?));
                }
                if s.n_negative != 1 || s.corank != 2 || !is_well_signed(&m) {
                    return Err(stuck(format!("family ended with signature ({}, {}, {})", s.n_negative, s.corank, s.n_positive)));
                }
                self.obs.good_matrix(&m, &s);
                Ok(path.to().clone())
            }
            Err(JumpError::BaseCorank { found, .. }) if found > 2 => {
                let m = path.eval(0.0)?;
                let s = self.summary(&m)?;
                Err(Stop::Found(self.accept(m, s)?))
            }
            Err(e) => Err(stuck(e.to_string())),
        }
    }

    /// From a state whose origin lies on lines (its fixed, unpinned edges)
    /// into the representative point of the adjacent face `c`.
    fn leave(&mut self, ctx: &Ctx, st: State, c: usize) -> Step<State> {
        let split = ctx.splits[c].as_ref().ok_or_else(|| stuck("target face has no positive circulation"))?;
        let pc = ctx.cplx.faces[c].point;
        let frozen: Vec<usize> =
            (0..st.vals.len()).filter(|&k| !ctx.pinned[k] && matches!(st.vals[k], EdgeVal::Fixed(_))).collect();
        if frozen.is_empty() {
            let mut to = st.clone();
            to.p = pc;
            return self.follow(ctx, &st, to);
        }
        let phi = cycle_cover(split, self.g, &frozen).ok_or_else(|| stuck("no cycle through a frozen arc"))?;
        let mut blended = st.clone();
        for &k in &frozen {
            let (i, j) = self.g.edge(k);
            blended.vals[k] = EdgeVal::Fixed(-phi.flow[k] / area(&ctx.points, pc, i, j));
        }
        let st = self.follow(ctx, &st, blended)?;
        let mut to = st.clone();
        to.p = pc;
        for (k, v) in to.vals.iter_mut().enumerate() {
            if let EdgeVal::Flow(w) = v {
                *w += phi.flow[k];
            }
        }
        let st = self.follow(ctx, &st, to)?;
        Ok(st.release(&ctx.points, self.g, &frozen)?)
    }

    /// From the representative point of one face of `seg` to that of `next`.
    fn cross(&mut self, ctx: &Ctx, st: State, seg: usize, next: usize) -> Step<State> {
        let segment = &ctx.cplx.segments[seg];
        let here = if segment.faces[0] == next { segment.faces[1] } else { segment.faces[0] };
        let split_c = ctx.splits[here].as_ref().ok_or_else(|| stuck("face has no positive circulation"))?;
        let r = segment.point;
        let split_r = split_edges(&PlaneRep::at(&ctx.points, r), self.g, DEGENERACY_TOL)?;
        let frozen = ctx.free_degenerate(&split_r);
        let fr = ctx.crossable[seg].as_ref().ok_or_else(|| stuck("segment is not crossable"))?;
        let phi = cycle_cover(split_c, self.g, &frozen).ok_or_else(|| stuck("no cycle through a segment arc"))?;
        let mut blended = st.clone();
        for (k, v) in blended.vals.iter_mut().enumerate() {
            if let EdgeVal::Flow(w) = v {
                *w = fr.flow[k] + phi.flow[k];
            }
        }
        let st = self.follow(ctx, &st, blended)?;
        let st = st.fix(&ctx.points, self.g, &frozen)?;
        let mut to = st.clone();
        to.p = r;
        for (k, v) in to.vals.iter_mut().enumerate() {
            if let EdgeVal::Flow(w) = v {
                *w = fr.flow[k];
            }
        }
        let st = self.follow(ctx, &st, to)?;
        self.leave(ctx, st, next)
    }

    /// Moves the origin from `st0` into one of the faces whose closure
    /// contains `goal`; returns the state at that face.
    fn walk(&mut self, ctx: &Ctx, st0: &State, goal: [f64; 2]) -> Step<(State, usize)> {
        let targets: Vec<usize> = ctx.cplx.faces_around(goal).into_iter().filter(|&f| ctx.splits[f].is_some()).collect();
        if targets.is_empty() {
            return Err(stuck("no face with a positive circulation touches the target"));
        }
        let on_lines = st0.vals.iter().enumerate().any(|(k, v)| !ctx.pinned[k] && matches!(v, EdgeVal::Fixed(_)));
        let home = if on_lines { None } else { ctx.cplx.face_at(st0.p).filter(|&f| ctx.splits[f].is_some()) };
        let sources: Vec<usize> = match home {
            Some(f) => vec![f],
            None => ctx.cplx.faces_around(st0.p).into_iter().filter(|&f| ctx.splits[f].is_some()).collect(),
        };
        let (start, steps) = ctx.route(&sources, &targets).ok_or_else(|| stuck("target not reachable"))?;
        self.log.push(format!("walking through {} segments", steps.len()));
        let mut st = match home {
            Some(f) if steps.is_empty() && f == start => return Ok((st0.clone(), f)),
            Some(_) => {
                let mut to = st0.clone();
                to.p = ctx.cplx.faces[start].point;
                self.follow(ctx, st0, to)?
            }
            None => self.leave(ctx, st0.clone(), start)?,
        };
        let mut face = start;
        for (seg, next) in steps {
            st = self.cross(ctx, st, seg, next)?;
            face = next;
        }
        Ok((st, face))
    }

    /// Crossing chords at `q`: walk next to `q`, then shrink the flow while
    /// the origin moves onto `q`.
    fn cross_at(&mut self, ctx: &Ctx, st0: &State, q: [f64; 2]) -> Step<Outcome> {
        let (st, _) = self.walk(ctx, st0, q)?;
        let split_q = split_edges(&PlaneRep::at(&ctx.points, q), self.g, DEGENERACY_TOL)?;
        let frozen = ctx.free_degenerate(&split_q);
        let st = st.fix(&ctx.points, self.g, &frozen)?;
        let mut to = st.clone();
        to.p = q;
        for v in &mut to.vals {
            if let EdgeVal::Flow(w) = v {
                *w = 0.0;
            }
        }
        self.follow(ctx, &st, to)?;
        Err(stuck("no corank jump on the way to the crossing"))
    }

    /// Coincident nodes `j`: with the origin outside the hull of the other
    /// points, contracting the edges inside `j` adds a negative eigenvalue.
    fn merge(&mut self, ctx: &Ctx, st0: &State, j: &[usize]) -> Step<Outcome> {
        let v = ctx.points[j[0]];
        let rest: Vec<usize> = (0..self.g.n()).filter(|i| !j.contains(i)).collect();
        let outside = |p: [f64; 2]| {
            let rows: Vec<Vec<f64>> =
                (0..2).map(|c| rest.iter().map(|&i| ctx.points[i][c] - p[c]).collect()).collect();
            origin_margin(&rows).map_or(true, |m| m < 0.0)
        };
        let st = if outside(st0.p) {
            st0.clone()
        } else {
            let (st, face) = self.walk(ctx, st0, v)?;
            let pc = ctx.cplx.faces[face].point;
            let mut rho = 0.5;
            let mut near = None;
            for _ in 0..60 {
                let p = [v[0] + rho * (pc[0] - v[0]), v[1] + rho * (pc[1] - v[1])];
                if outside(p) {
                    near = Some(p);
                    break;
                }
                rho *= 0.5;
            }
            let p = near.ok_or_else(|| stuck("no point near the coincidence outside the hull"))?;
            let mut to = st.clone();
            to.p = p;
            self.follow(ctx, &st, to)?
        };
        let m = st.matrix(&ctx.points, self.g)?;
        let inner: Vec<usize> =
            (0..self.g.edge_count()).filter(|&k| { let (a, b) = self.g.edge(k); j.contains(&a) && j.contains(&b) }).collect();
        if inner.is_empty() {
            return Err(stuck("coincident nodes are not adjacent"));
        }
        let contract = |alpha: f64| {
            let mut diag = m.diag().to_vec();
            let mut off = m.off().to_vec();
            for &k in &inner {
                let (a, b) = self.g.edge(k);
                diag[a] += alpha * off[k];
                diag[b] += alpha * off[k];
                off[k] *= 1.0 - alpha;
            }
            GMatrix::new(self.g.clone(), diag, off)
        };
        let rows: Vec<Vec<f64>> = (0..2).map(|c| ctx.points.iter().map(|x| x[c] - st.p[c]).collect()).collect();
        for k in 1..=40 {
            let m2 = contract(1.0 - 0.5f64.powi(k))?;
            if self.summary(&m2)?.n_negative >= 2 {
                self.obs.interpolation_pair(&rows, &m, &m2);
                let r = interpolate(&rows, &m, &m2, self.tol).map_err(|e| stuck(e.to_string()))?;
                return Ok(self.accept(r.matrix, r.summary)?);
            }
        }
        match corank_jump(contract, 2, self.tol) {
            Ok(Some(jump)) => Ok(self.accept(jump.matrix, jump.summary)?),
            Ok(None) => Err(stuck("contraction family has no corank jump")),
            Err(e) => Err(stuck(e.to_string())),
        }
    }
}

/// Groups of at least two unit vectors within [`COINCIDE_TOL`].
fn coincidence_classes(points: &[[f64; 2]]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut root: Vec<usize> = (0..n).collect();
    fn find(root: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while root[x] != x {
            root[x] = root[root[x]];
            x = root[x];
        }
        x
    }
    for i in 0..n {
        for j in i + 1..n {
            if (points[i][0] - points[j][0]).hypot(points[i][1] - points[j][1]) <= COINCIDE_TOL {
                let (a, b) = (find(&mut root, i), find(&mut root, j));
                root[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = find(&mut root, i);
        groups[r].push(i);
    }
    groups.into_iter().filter(|c| c.len() > 1).collect()
}

fn snap(points: &[[f64; 2]], clusters: &[Vec<usize>]) -> Vec<[f64; 2]> {
    let mut out = points.to_vec();
    for c in clusters {
        let (sx, sy) = c.iter().fold((0.0, 0.0), |(x, y), &i| (x + points[i][0], y + points[i][1]));
        let r = sx.hypot(sy);
        for &i in c {
            out[i] = [sx / r, sy / r];
        }
    }
    out
}

fn targets(g: &Graph, points: &[[f64; 2]], clusters: &[Vec<usize>]) -> Vec<Target> {
    let mut out: Vec<Target> = clusters.iter().map(|c| Target::Coincident(c.clone())).collect();
    let edges = g.edges();
    for (x, &(a, b)) in edges.iter().enumerate() {
        for (y, &(c, d)) in edges.iter().enumerate().skip(x + 1) {
            let pts = [points[a], points[b], points[c], points[d]];
            let distinct = (0..4).all(|s| (s + 1..4).all(|t| pts[s] != pts[t]));
            if distinct && segments_cross(pts[0], pts[1], pts[2], pts[3]) {
                out.push(Target::Crossing(x, y, chord_intersection(pts)));
            }
        }
    }
    out
}

fn chord_intersection([a, b, c, d]: [[f64; 2]; 4]) -> [f64; 2] {
    let r = [b[0] - a[0], b[1] - a[1]];
    let s = [d[0] - c[0], d[1] - c[1]];
    let den = r[0] * s[1] - r[1] * s[0];
    let t = ((c[0] - a[0]) * s[1] - (c[1] - a[1]) * s[0]) / den;
    [a[0] + t * r[0], a[1] + t * r[1]]
}
