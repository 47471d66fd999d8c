//! Circulations on the arc digraph and the bijection between
//! `(f, g)` pairs and G-matrices annihilating a plane representation.

use std::collections::VecDeque;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::gmatrix::{complete_diagonal, GMatrix};
use crate::graphs::{components, Graph};

use super::area::{area, norm, EdgeSplit, PlaneRep};
use super::PlaneError;

/// Relative conservation tolerance for [`assemble`].
pub const CONSERVATION_TOL: f64 = 1e-10;

/// Flow value per edge in its stored orientation `(i, j)`, `i < j`: a
/// positive value flows from `i` to `j`. Degenerate edges carry 0.
#[derive(Clone, Debug, PartialEq)]
pub struct Circulation {
    pub flow: Vec<f64>,
}

impl Circulation {
    pub fn zero(edges: usize) -> Self {
        Self { flow: vec![0.0; edges] }
    }

    /// Largest net outflow at any node.
    pub fn imbalance(&self, g: &Graph) -> f64 {
        node_excess(g, &self.flow).iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.flow.iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    /// Strictly positive along every arc of `split` and zero elsewhere.
    pub fn is_positive_on(&self, split: &EdgeSplit) -> bool {
        self.flow.iter().zip(&split.sign).all(|(&f, &s)| if s == 0 { f == 0.0 } else { f * f64::from(s) > 0.0 })
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { flow: self.flow.iter().zip(&other.flow).map(|(a, b)| a + b).collect() }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { flow: self.flow.iter().map(|a| a * c).collect() }
    }
}

fn node_excess(g: &Graph, flow: &[f64]) -> Vec<f64> {
    let mut ex = vec![0.0; g.n()];
    for (k, &(i, j)) in g.edges().iter().enumerate() {
        ex[i] += flow[k];
        ex[j] -= flow[k];
    }
    ex
}

/// Positive circulation on all arcs of `split`, or `None` when some arc
/// lies on no directed cycle.
pub fn positive_circulation(split: &EdgeSplit, g: &Graph) -> Option<Circulation> {
    let all: Vec<usize> = (0..g.edge_count()).filter(|&k| split.sign[k] != 0).collect();
    cycle_cover(split, g, &all)
}

/// Sum of directed cycles of the arc digraph, one through each arc in
/// `targets` that is not yet covered. Nonnegative along arcs, positive on
/// every target.
pub fn cycle_cover(split: &EdgeSplit, g: &Graph, targets: &[usize]) -> Option<Circulation> {
    let arcs = split.arcs(g);
    let mut out: Vec<Vec<(usize, usize)>> = vec![Vec::new(); g.n()];
    for &(a, b, k) in &arcs {
        out[a].push((b, k));
    }
    let mut flow = vec![0.0; g.edge_count()];
    for &k in targets {
        let s = split.sign[k];
        if s == 0 {
            continue;
        }
        if flow[k] * f64::from(s) > 0.0 {
            continue;
        }
        let (i, j) = g.edge(k);
        let (tail, head) = if s > 0 { (i, j) } else { (j, i) };
        let path = directed_path(&out, head, tail)?;
        for e in path.into_iter().chain(std::iter::once(k)) {
            flow[e] += f64::from(split.sign[e]);
        }
    }
    Some(Circulation { flow })
}

/// Edge indices of a shortest directed path `from ⇝ to`.
fn directed_path(out: &[Vec<(usize, usize)>], from: usize, to: usize) -> Option<Vec<usize>> {
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; out.len()];
    let mut seen = vec![false; out.len()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        if x == to {
            let mut path = Vec::new();
            let mut y = to;
            while let Some((p, k)) = prev[y] {
                path.push(k);
                y = p;
            }
            return Some(path);
        }
        for &(y, k) in &out[x] {
            if !seen[y] {
                seen[y] = true;
                prev[y] = Some((x, k));
                queue.push_back(y);
            }
        }
    }
    None
}

/// Least-squares correction of `flow` to a circulation supported on the
/// arcs of `split`.
pub fn project_circulation(split: &EdgeSplit, g: &Graph, flow: &[f64]) -> Circulation {
    let support: Vec<usize> = (0..g.edge_count()).filter(|&k| split.sign[k] != 0).collect();
    let mut b = DMatrix::<f64>::zeros(g.n(), support.len());
    let mut f = DVector::<f64>::zeros(support.len());
    for (c, &k) in support.iter().enumerate() {
        let (i, j) = g.edge(k);
        b[(i, c)] = 1.0;
        b[(j, c)] = -1.0;
        f[c] = flow[k];
    }
    // L + Σ 1_c 1_cᵀ over the components of the support is positive
    // definite and inverts L on its range
    let sub = Graph::new(g.n(), support.iter().map(|&k| g.edge(k))).expect("subgraph");
    let mut lap = &b * b.transpose();
    for comp in components(&sub) {
        for &i in &comp {
            for &j in &comp {
                lap[(i, j)] += 1.0;
            }
        }
    }
    let chol = lap.cholesky().expect("regularized Laplacian is positive definite");
    let mut corrected = f;
    for _ in 0..2 {
        let y = chol.solve(&(&b * &corrected));
        corrected -= b.transpose() * y;
    }
    let mut out = vec![0.0; g.edge_count()];
    for (c, &k) in support.iter().enumerate() {
        out[k] = corrected[c];
    }
    Circulation { flow: out }
}

/// `M(u − p, f, g)`: `−f_ij / T_ij` on arcs, `g` on degenerate edges, and the
/// diagonal that makes the shifted points a kernel. `gvals` is indexed by
/// edge and only read at degenerate edges.
pub fn assemble(
    rep: &PlaneRep,
    g: &Arc<Graph>,
    split: &EdgeSplit,
    f: &Circulation,
    gvals: &[f64],
) -> Result<GMatrix, PlaneError> {
    let scale = f.max_abs();
    let imb = f.imbalance(g);
    if imb > CONSERVATION_TOL * scale {
        return Err(PlaneError::Conservation(imb));
    }
    let off = off_diagonal(rep, g, split, &f.flow, gvals);
    Ok(complete_diagonal(g, off, &rep.shifted_points())?)
}

pub(crate) fn off_diagonal(rep: &PlaneRep, g: &Graph, split: &EdgeSplit, flow: &[f64], gvals: &[f64]) -> Vec<f64> {
    g.edges()
        .iter()
        .enumerate()
        .map(|(k, &(i, j))| {
            if split.sign[k] == 0 {
                gvals[k]
            } else {
                -flow[k] / area(&rep.points, rep.origin, i, j)
            }
        })
        .collect()
}

/// Inverse of [`assemble`]: `f_ij = −T_ij M_ij` on arcs and `g = M` on
/// degenerate edges (0 elsewhere). Requires `‖U M‖∞ ≤ tol·max(1, ‖M‖∞)`.
pub fn decompose(
    rep: &PlaneRep,
    g: &Graph,
    split: &EdgeSplit,
    m: &GMatrix,
    tol: f64,
) -> Result<(Circulation, Vec<f64>), PlaneError> {
    let shifted = rep.shifted_points();
    let res = m.residual(&shifted);
    if res > tol * m.norm_inf().max(1.0) {
        return Err(PlaneError::Residual(res));
    }
    let mut flow = vec![0.0; g.edge_count()];
    let mut gvals = vec![0.0; g.edge_count()];
    for (k, &(i, j)) in g.edges().iter().enumerate() {
        if split.sign[k] == 0 {
            gvals[k] = m.off()[k];
        } else {
            flow[k] = -area(&rep.points, rep.origin, i, j) * m.off()[k];
        }
    }
    Ok((Circulation { flow }, gvals))
}

/// Components of `(V, E_u)` whose shifted points do not fit in one closed
/// ray from the origin.
pub fn nondegenerate_components(rep: &PlaneRep, g: &Graph, split: &EdgeSplit) -> usize {
    let deg = Graph::new(g.n(), split.degenerate().into_iter().map(|k| g.edge(k))).expect("subgraph");
    components(&deg)
        .into_iter()
        .filter(|comp| {
            let first = rep.shifted(comp[0]);
            let r = norm(first);
            comp.iter().any(|&i| {
                let v = rep.shifted(i);
                v[0] * first[0] + v[1] * first[1] < -1e-9 * r * norm(v)
            })
        })
        .count()
}

#[cfg(test)]
mod tests {
    use super::super::area::split_edges;
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn circle(deg: &[f64]) -> Vec<[f64; 2]> {
        deg.iter().map(|a| [a.to_radians().cos(), a.to_radians().sin()]).collect()
    }

    fn split_of(g: &Graph, signs: &[i8]) -> EdgeSplit {
        assert_eq!(signs.len(), g.edge_count());
        EdgeSplit { sign: signs.to_vec() }
    }

    #[test]
    fn directed_triangle_is_unit_flow() {
        let k3 = Graph::complete(3); // edges (0,1), (0,2), (1,2)
        let s = split_of(&k3, &[1, -1, 1]);
        let f = positive_circulation(&s, &k3).unwrap();
        assert_eq!(f.flow, vec![1.0, -1.0, 1.0]);
        assert_eq!(f.imbalance(&k3), 0.0);
    }

    #[test]
    fn single_arc_has_no_circulation() {
        let p2 = Graph::path(2);
        assert!(positive_circulation(&split_of(&p2, &[1]), &p2).is_none());
        assert_eq!(positive_circulation(&split_of(&p2, &[0]), &p2), Some(Circulation::zero(1)));
    }

    #[test]
    fn bowtie_cover_is_unit() {
        // triangles 0-1-2 and 0-3-4 sharing node 0
        let g = Graph::new(5, [(0, 1), (1, 2), (0, 2), (0, 3), (3, 4), (0, 4)]).unwrap();
        let mut signs = Vec::new();
        for &(i, j) in g.edges() {
            let fwd = matches!((i, j), (0, 1) | (1, 2) | (0, 3) | (3, 4));
            signs.push(if fwd { 1 } else { -1 });
        }
        let s = split_of(&g, &signs);
        let f = positive_circulation(&s, &g).unwrap();
        assert!(f.flow.iter().all(|x| x.abs() == 1.0));
        assert!(f.is_positive_on(&s));
    }

    #[test]
    fn triangle_member_and_round_trip() {
        let g = Arc::new(Graph::complete(3));
        let rep = PlaneRep::new(circle(&[90.0, 210.0, 330.0]));
        let s = split_edges(&rep, &g, 1e-9).unwrap();
        let f = positive_circulation(&s, &g).unwrap();
        let m = assemble(&rep, &g, &s, &f, &[0.0; 3]).unwrap();
        assert!(crate::gmatrix::is_well_signed(&m));
        assert!(m.residual(&rep.shifted_points()) <= 1e-10);
        let (f2, _) = decompose(&rep, &g, &s, &m, 1e-9).unwrap();
        for (a, b) in f.flow.iter().zip(&f2.flow) {
            assert!((a - b).abs() <= 1e-12);
        }
        let m2 = assemble(&rep, &g, &s, &f.scaled(2.0), &[0.0; 3]).unwrap();
        let (f3, _) = decompose(&rep, &g, &s, &m2, 1e-9).unwrap();
        for (a, b) in f.flow.iter().zip(&f3.flow) {
            assert!((2.0 * a - b).abs() <= 1e-12);
        }
        let s_m = m.summary(1e-9).unwrap();
        assert_eq!((s_m.n_negative, s_m.corank), (1, 2));
    }

    #[test]
    fn conservation_violation_is_rejected() {
        let g = Arc::new(Graph::complete(3));
        let rep = PlaneRep::new(circle(&[90.0, 210.0, 330.0]));
        let s = split_edges(&rep, &g, 1e-9).unwrap();
        let mut f = positive_circulation(&s, &g).unwrap();
        f.flow[0] *= 1.5;
        assert!(matches!(assemble(&rep, &g, &s, &f, &[0.0; 3]), Err(PlaneError::Conservation(_))));
    }

    #[test]
    fn nonnegative_g_gives_non_well_signed() {
        let g = Arc::new(Graph::path(2));
        let rep = PlaneRep::new(vec![[1.0, 0.0], [-1.0, 0.0]]);
        let s = split_edges(&rep, &g, 1e-9).unwrap();
        let m = assemble(&rep, &g, &s, &Circulation::zero(1), &[0.5]).unwrap();
        assert!(!crate::gmatrix::is_well_signed(&m));
        let m = assemble(&rep, &g, &s, &Circulation::zero(1), &[-0.5]).unwrap();
        assert!(crate::gmatrix::is_well_signed(&m));
    }

    #[test]
    fn degenerate_components_count() {
        let p2 = Graph::path(2);
        let same_side = PlaneRep::new(vec![[1.0, 0.0], [2.0, 0.0]]);
        let s = split_edges(&same_side, &p2, 1e-9).unwrap();
        assert_eq!(s.degenerate(), vec![0]);
        assert_eq!(nondegenerate_components(&same_side, &p2, &s), 0);
        let through = PlaneRep::new(vec![[1.0, 0.0], [-2.0, 0.0]]);
        let s = split_edges(&through, &p2, 1e-9).unwrap();
        assert_eq!(nondegenerate_components(&through, &p2, &s), 1);
        let k3 = Graph::complete(3);
        let tri = PlaneRep::new(circle(&[90.0, 210.0, 330.0]));
        let s = split_edges(&tri, &k3, 1e-9).unwrap();
        assert_eq!(nondegenerate_components(&tri, &k3, &s), 0);
    }

    #[test]
    fn projection_restores_conservation() {
        let g = Graph::complete(4);
        let s = EdgeSplit { sign: vec![1; 6] };
        let p = project_circulation(&s, &g, &[1.0, 2.0, -0.5, 0.3, 1.0, -2.0]);
        assert!(p.imbalance(&g) < 1e-12);
        let again = project_circulation(&s, &g, &p.flow);
        for (a, b) in p.flow.iter().zip(&again.flow) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    fn strongly_connected_components_ok(g: &Graph, s: &EdgeSplit) -> bool {
        // every arc lies on a directed cycle iff its head reaches its tail
        let arcs = s.arcs(g);
        let mut reach = vec![vec![false; g.n()]; g.n()];
        for (i, row) in reach.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b, _) in &arcs {
            reach[a][b] = true;
        }
        for k in 0..g.n() {
            for i in 0..g.n() {
                for j in 0..g.n() {
                    if reach[i][k] && reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
        arcs.iter().all(|&(a, b, _)| reach[b][a])
    }

    #[test]
    fn existence_matches_strong_connectivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let n = rng.random_range(2..=9);
            let edges: Vec<(usize, usize)> = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .collect::<Vec<_>>()
                .into_iter()
                .filter(|_| rng.random_bool(0.45))
                .collect();
            let g = Graph::new(n, edges).unwrap();
            let sign: Vec<i8> = (0..g.edge_count()).map(|_| [1, -1, 1, -1, 0][rng.random_range(0..5)]).collect();
            let s = EdgeSplit { sign };
            let c = positive_circulation(&s, &g);
            assert_eq!(c.is_some(), strongly_connected_components_ok(&g, &s));
            if let Some(c) = c {
                assert!(c.is_positive_on(&s));
                assert_eq!(c.imbalance(&g), 0.0);
            }
        }
    }

    fn instance() -> impl Strategy<Value = (Graph, Vec<[f64; 2]>, Vec<f64>, u64)> {
        (3usize..=12, any::<u64>()).prop_map(|(n, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
            for i in 0..n {
                for j in i + 2..n {
                    if rng.random_bool(0.3) && !(i == 0 && j == n - 1) {
                        edges.push((i, j));
                    }
                }
            }
            let g = Graph::new(n, edges).unwrap();
            let pts: Vec<[f64; 2]> =
                (0..n).map(|_| [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)]).collect();
            let gv: Vec<f64> = (0..g.edge_count()).map(|_| rng.random_range(-2.0..-0.1)).collect();
            (g, pts, gv, seed)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn round_trip_and_sign_equivalence((g, pts, gv, seed) in instance()) {
            let g = Arc::new(g);
            let rep = PlaneRep::new(pts);
            let s = split_edges(&rep, &g, 1e-9).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
            let raw: Vec<f64> = (0..g.edge_count()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let f = project_circulation(&s, &g, &raw);
            let m = assemble(&rep, &g, &s, &f, &gv).unwrap();
            let scale = m.norm_inf().max(1.0);
            prop_assert!(m.residual(&rep.shifted_points()) <= 1e-10 * scale);
            let (f2, g2) = decompose(&rep, &g, &s, &m, 1e-9).unwrap();
            let m2 = assemble(&rep, &g, &s, &f2, &g2).unwrap();
            for i in 0..g.n() {
                for j in 0..g.n() {
                    prop_assert!((m.get(i, j) - m2.get(i, j)).abs() <= 1e-10 * m.norm_inf());
                }
            }
            let positive = f.is_positive_on(&s) && s.degenerate().iter().all(|&k| gv[k] < 0.0);
            prop_assert_eq!(crate::gmatrix::is_well_signed(&m), positive);
            if let Some(pc) = positive_circulation(&s, &g) {
                let mp = assemble(&rep, &g, &s, &pc, &gv).unwrap();
                prop_assert!(crate::gmatrix::is_well_signed(&mp));
            }
        }
    }
}
