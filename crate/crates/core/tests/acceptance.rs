//! The nine acceptance criteria, each reported on one line.
//!
//! Criteria 7 and 8 check matrices harvested while criteria 1 and 2 run, so
//! everything lives in a single test function.

use std::io::Write;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use nullspace_embed::gmatrix::hull::origin_margin;
use nullspace_embed::gmatrix::{initial_good_matrix, is_well_signed, verify_certificate, Certificate, CertificateKind, GMatrix};
use nullspace_embed::graphs::enumerate::{biconnected_graphs, connected_graphs};
use nullspace_embed::graphs::{outerplanar_oracle, path_order, Graph, DEFAULT_ORACLE_CAP};
use nullspace_embed::line1d::{double_cover, double_cover_left, double_node, embed_line_with, interpolate, wu_member};
use nullspace_embed::plane2d::{assemble, decompose, embed_plane_with, positive_circulation, split_edges, verify_outerplanar};
use nullspace_embed::plane2d::{Circulation, EdgeSplit, PlaneRep};
use nullspace_embed::spectra::{EigenSummary, Tolerance};
use nullspace_embed::{DriverConfig, Observer};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: Tolerance = Tolerance::Relative(1e-9);

/// Bypasses the test harness capture so the lines always show.
fn report(k: usize, ok: bool, detail: &str, secs: f64) {
    let line = format!("acceptance {k}: {} ({detail}; {secs:.1}s)\n", if ok { "PASS" } else { "FAIL" });
    let mut out = std::io::stdout();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
}

#[derive(Default)]
struct Harvest {
    pairs: Vec<(Vec<Vec<f64>>, GMatrix, GMatrix)>,
    good: Vec<(GMatrix, Vec<Vec<f64>>)>,
}

impl Observer for Harvest {
    fn interpolation_pair(&mut self, u: &[Vec<f64>], m: &GMatrix, m2: &GMatrix) {
        self.pairs.push((u.to_vec(), m.clone(), m2.clone()));
    }

    fn good_matrix(&mut self, m: &GMatrix, s: &EigenSummary) {
        self.good.push((m.clone(), s.kernel()));
    }
}

fn certificate_kernel(c: &Certificate, g: &Graph) -> (GMatrix, Vec<Vec<f64>>) {
    let rows = &c.matrix;
    let off = g.edges().iter().map(|&(i, j)| rows[i][j]).collect();
    let diag = (0..g.n()).map(|i| rows[i][i]).collect();
    let m = GMatrix::new(Arc::new(g.clone()), diag, off).unwrap();
    let k = m.summary(TOL).unwrap().kernel();
    (m, k)
}

fn criterion_1(h: &mut Harvest) -> (bool, String) {
    let cfg = DriverConfig::default();
    let (mut graphs, mut bad) = (0, Vec::new());
    for n in 2..=8 {
        for g in connected_graphs(n) {
            graphs += 1;
            let c = match embed_line_with(&g, &cfg, h) {
                Ok(c) => c,
                Err(e) => {
                    bad.push(format!("{}: {e}", g.render()));
                    continue;
                }
            };
            let is_path = path_order(&g).is_some();
            let report = verify_certificate(&c, &g, None);
            let kind_ok = match c.kind {
                CertificateKind::PathEmbedding => is_path,
                CertificateKind::HighCorankMatrix => !is_path && c.report.claimed_corank >= 2,
                CertificateKind::OuterplanarEmbedding => false,
            };
            // the signature, re-read independently of the report
            let s = certificate_kernel(&c, &g).0.summary(c.tolerance).unwrap();
            let sig_ok = s.n_negative == 1 && s.corank >= c.report.claimed_corank;
            if !(kind_ok && report.passed() && sig_ok) {
                bad.push(format!("{}: {} passed={} sig={:?}", g.render(), c.kind, report.passed(), s.eigenvalues));
            }
            if c.kind == CertificateKind::HighCorankMatrix {
                h.good.push(certificate_kernel(&c, &g));
            }
        }
    }
    (bad.is_empty(), format!("{graphs} connected graphs n<=8, {} problems {:?}", bad.len(), bad.first()))
}

fn criterion_2(h: &mut Harvest) -> (bool, String) {
    let cfg = DriverConfig::default();
    let (mut graphs, mut outer, mut bad) = (0, 0, Vec::new());
    for n in 3..=7 {
        for g in biconnected_graphs(n) {
            graphs += 1;
            let expected = outerplanar_oracle(&g, DEFAULT_ORACLE_CAP).unwrap();
            outer += expected as usize;
            let c = match embed_plane_with(&g, &cfg, h) {
                Ok(c) => c,
                Err(e) => {
                    bad.push(format!("{}: {e}", g.render()));
                    continue;
                }
            };
            let ok = match c.kind {
                CertificateKind::OuterplanarEmbedding => {
                    let pts: Vec<[f64; 2]> = c.embedding.as_ref().unwrap().iter().map(|p| [p[0], p[1]]).collect();
                    expected && verify_outerplanar(&pts, &g, 1e-9).is_ok()
                }
                CertificateKind::HighCorankMatrix => {
                    let s = certificate_kernel(&c, &g).0.summary(c.tolerance).unwrap();
                    !expected && c.report.claimed_corank >= 3 && s.corank >= 3 && s.n_negative == 1
                }
                CertificateKind::PathEmbedding => false,
            };
            if !(ok && verify_certificate(&c, &g, None).passed()) {
                bad.push(format!("{}: {}", g.render(), c.kind));
            }
            if c.kind == CertificateKind::HighCorankMatrix {
                h.good.push(certificate_kernel(&c, &g));
            }
        }
    }
    let detail = format!("{graphs} 2-connected graphs n<=7 ({outer} outerplanar), {} problems {:?}", bad.len(), bad.first());
    (bad.is_empty(), detail)
}

fn spectrum_close(m: &GMatrix, expected: &[f64], tol: f64) -> bool {
    let s = m.summary(TOL).unwrap();
    s.eigenvalues.len() == expected.len() && s.eigenvalues.iter().zip(expected).all(|(a, b)| (a - b).abs() <= tol)
}

fn criterion_3() -> (bool, String) {
    let k3 = Arc::new(Graph::complete(3));
    let a = spectrum_close(&initial_good_matrix(&k3).unwrap(), &[-3.0, 0.0, 0.0], 1e-10);

    let j4 = GMatrix::uniform(Arc::new(Graph::complete(4)), -1.0, -1.0);
    let s = j4.summary(TOL).unwrap();
    let c = Certificate::high_corank(&j4, &s, 3, Vec::new());
    let b = spectrum_close(&j4, &[-4.0, 0.0, 0.0, 0.0], 1e-10) && verify_certificate(&c, &c.graph, None).passed();

    let star = GMatrix::uniform(Arc::new(Graph::star(3)), 0.0, -1.0);
    let s = star.summary(TOL).unwrap();
    let c = Certificate::high_corank(&star, &s, 2, Vec::new());
    let r3 = 3f64.sqrt();
    let d = spectrum_close(&star, &[-r3, 0.0, 0.0, r3], 1e-9) && verify_certificate(&c, &c.graph, None).passed();
    (a && b && d, format!("K3 {a}, -J4 {b}, -A(K1,3) {d}"))
}

/// Cycle through all nodes plus random chords.
fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let mut edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    for i in 0..n {
        for j in i + 2..n {
            if !(i == 0 && j == n - 1) && rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Graph::new(n, edges).unwrap()
}

/// Random element of the cycle space: a weighted sum of the fundamental
/// cycles of a BFS tree, in the stored orientation of each edge.
fn random_circulation(rng: &mut ChaCha8Rng, g: &Graph) -> Vec<f64> {
    let n = g.n();
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    parent[0] = 0;
    let mut queue = std::collections::VecDeque::from([0]);
    while let Some(v) = queue.pop_front() {
        for w in g.neighbors(v) {
            if parent[w] == usize::MAX {
                parent[w] = v;
                depth[w] = depth[v] + 1;
                queue.push_back(w);
            }
        }
    }
    let mut flow = vec![0.0; g.edge_count()];
    let push = |flow: &mut Vec<f64>, x: usize, y: usize, w: f64| {
        let k = g.edge_index(x, y).unwrap();
        flow[k] += if g.edge(k) == (x, y) { w } else { -w };
    };
    for &(a, b) in g.edges() {
        if parent[a] == b || parent[b] == a {
            continue;
        }
        let w = rng.random_range(-1.0..1.0);
        // a -> b, then back to a through the tree
        push(&mut flow, a, b, w);
        let (mut x, mut y) = (b, a);
        while x != y {
            if depth[x] >= depth[y] {
                push(&mut flow, x, parent[x], w);
                x = parent[x];
            } else {
                push(&mut flow, parent[y], y, w);
                y = parent[y];
            }
        }
    }
    flow
}

fn criterion_4() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut worst_trip, mut worst_res, mut failures) = (0.0f64, 0.0f64, 0);
    for _ in 0..1000 {
        let n = rng.random_range(3..=12);
        let g = Arc::new(random_graph(&mut rng, n, 0.3));
        let pts: Vec<[f64; 2]> = (0..n).map(|_| [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)]).collect();
        let rep = PlaneRep::new(pts);
        let split = split_edges(&rep, &g, 1e-9).unwrap();
        let mut flow = random_circulation(&mut rng, &g);
        for k in split.degenerate() {
            flow[k] = 0.0;
        }
        let gv: Vec<f64> = (0..g.edge_count()).map(|_| rng.random_range(-2.0..-0.1)).collect();
        let f = Circulation { flow };
        let Ok(m) = assemble(&rep, &g, &split, &f, &gv) else {
            failures += 1;
            continue;
        };
        let norm = m.norm_inf();
        let (f2, g2) = decompose(&rep, &g, &split, &m, 1e-9).unwrap();
        let m2 = assemble(&rep, &g, &split, &f2, &g2).unwrap();
        let diff = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| (m.get(i, j) - m2.get(i, j)).abs()).fold(0.0, f64::max);
        worst_trip = worst_trip.max(diff / norm);
        worst_res = worst_res.max(m.residual(&rep.shifted_points()) / norm);
    }
    let ok = failures == 0 && worst_trip <= 1e-10 && worst_res <= 1e-10;
    (ok, format!("worst round trip {worst_trip:.2e}, worst residual {worst_res:.2e}, {failures} assembly failures"))
}

/// Every arc lies on a directed cycle, by transitive closure.
fn arcs_on_cycles(g: &Graph, s: &EdgeSplit) -> bool {
    let arcs = s.arcs(g);
    let n = g.n();
    let mut reach = vec![vec![false; n]; n];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(a, b, _) in &arcs {
        reach[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    arcs.iter().all(|&(a, b, _)| reach[b][a])
}

fn criterion_5() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut agree, mut exist) = (0, 0);
    for _ in 0..1000 {
        let n = rng.random_range(2..=10);
        let edges: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|_| rng.random_bool(0.4)).collect();
        let g = Graph::new(n, edges).unwrap();
        let sign: Vec<i8> = (0..g.edge_count()).map(|_| [1, -1, 1, -1, 0][rng.random_range(0..5)]).collect();
        let s = EdgeSplit { sign };
        let c = positive_circulation(&s, &g);
        let valid = c.as_ref().is_none_or(|c| c.is_positive_on(&s) && c.imbalance(&g) == 0.0);
        exist += c.is_some() as usize;
        if valid && c.is_some() == arcs_on_cycles(&g, &s) {
            agree += 1;
        }
    }
    (agree == 1000, format!("{agree}/1000 agree, {exist} admit a positive circulation"))
}

fn criterion_6() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut nodes, mut covers, mut bad) = (0, 0, 0);
    while nodes + covers < 200 {
        let n = rng.random_range(4..=10);
        let g = Arc::new(random_graph(&mut rng, n, 0.35));
        let want_node = nodes <= covers;
        let mut u: Vec<f64> = (0..n).map(|_| rng.random_range(1..=5) as f64 * if rng.random_bool(0.5) { 1.0 } else { -1.0 }).collect();
        if want_node {
            let i = rng.random_range(0..n);
            let j = (i + rng.random_range(1..n)) % n;
            u[i] = 0.0;
            u[j] = 0.0;
        }
        let Some(m) = wu_member(&g, &u) else { continue };
        let out = if want_node {
            let zeros: Vec<usize> = (0..n).filter(|&i| u[i] == 0.0).collect();
            double_node(&u, zeros[0], zeros[1], &m)
        } else {
            // two edges from a negative to a positive node
            let cross: Vec<(usize, usize)> = g
                .edges()
                .iter()
                .filter_map(|&(i, j)| match (u[i] < 0.0, u[j] > 0.0, u[j] < 0.0, u[i] > 0.0) {
                    (true, true, _, _) => Some((i, j)),
                    (_, _, true, true) => Some((j, i)),
                    _ => None,
                })
                .collect();
            if cross.len() < 2 {
                continue;
            }
            let ab = cross[0];
            let Some(&cd) = cross[1..].iter().find(|e| e.0 != ab.0 || e.1 != ab.1) else { continue };
            if ab.1 != cd.1 {
                double_cover(&u, ab, cd, &m)
            } else {
                double_cover_left(&u, ab, cd, &m)
            }
        };
        let Ok(out) = out else {
            bad += 1;
            continue;
        };
        if want_node {
            nodes += 1;
        } else {
            covers += 1;
        }
        let rows: Vec<[f64; 1]> = u.iter().map(|&x| [x]).collect();
        let in_wu = is_well_signed(&out) && out.residual(&rows) <= 1e-9 * out.norm_inf();
        if !(in_wu && out.summary(TOL).unwrap().n_negative >= 2) {
            bad += 1;
        }
    }
    (bad == 0, format!("{nodes} double_node + {covers} double_cover instances, {bad} violations"))
}

fn criterion_7(h: &Harvest) -> (bool, String) {
    let mut bad = 0;
    for (u, m, m2) in &h.pairs {
        match interpolate(u, m, m2, TOL) {
            Ok(r) if r.summary.n_negative == 1 && r.summary.corank >= 2 => {}
            _ => bad += 1,
        }
    }
    (bad == 0 && !h.pairs.is_empty(), format!("{} harvested pairs, {bad} violations", h.pairs.len()))
}

fn criterion_8(h: &Harvest) -> (bool, String) {
    let (mut checked, mut bad, mut worst) = (0, 0, f64::INFINITY);
    for (m, kernel) in &h.good {
        if kernel.is_empty() {
            continue;
        }
        // a member of W′: well-signed, one negative eigenvalue
        let s = m.summary(TOL).unwrap();
        if !is_well_signed(m) || s.n_negative != 1 {
            bad += 1;
            continue;
        }
        checked += 1;
        let margin = origin_margin(kernel).unwrap_or(f64::NEG_INFINITY);
        worst = worst.min(margin);
        if margin < 1e-10 {
            bad += 1;
        }
    }
    (bad == 0 && checked > 0, format!("{checked} harvested matrices, worst margin {worst:.2e}, {bad} violations"))
}

fn criterion_9() -> (bool, String) {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&str, &str); 8] = [
        ("embed1d", "4 3\n1 2\n2 3\n3 4\n"),
        ("embed1d", "4 3\n1 2\n1 3\n1 4\n"),
        ("embed1d", "6 7\n1 2\n2 3\n3 4\n4 5\n5 6\n6 1\n1 4\n"),
        ("embed2d", "3 3\n1 2\n2 3\n1 3\n"),
        ("embed2d", "4 6\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n"),
        ("embed2d", "5 6\n1 3\n1 4\n1 5\n2 3\n2 4\n2 5\n"),
        ("embed2d", "6 8\n1 2\n2 3\n3 4\n4 5\n5 6\n6 1\n1 3\n1 5\n"),
        ("embed2d", "7 10\n1 2\n2 3\n3 4\n4 5\n5 6\n6 7\n7 1\n1 4\n4 7\n2 4\n"),
    ];
    let mut identical = 0;
    for (k, (cmd, text)) in cases.iter().enumerate() {
        let path = dir.path().join(format!("g{k}.txt"));
        std::fs::write(&path, text).unwrap();
        let run = || Command::new(env!("CARGO_BIN_EXE_nullembed")).arg(cmd).arg(&path).output().unwrap();
        let (a, b) = (run(), run());
        let code_ok = matches!(a.status.code(), Some(0) | Some(2));
        if code_ok && a.status == b.status && a.stdout == b.stdout && !a.stdout.is_empty() {
            identical += 1;
        }
    }
    (identical == cases.len(), format!("{identical}/{} inputs byte-identical across two runs", cases.len()))
}

#[test]
fn acceptance() {
    let mut h = Harvest::default();
    let mut all = true;
    let mut step = |k: usize, f: &mut dyn FnMut() -> (bool, String)| {
        let t = Instant::now();
        let (ok, detail) = f();
        report(k, ok, &detail, t.elapsed().as_secs_f64());
        all &= ok;
    };
    step(1, &mut || criterion_1(&mut h));
    step(2, &mut || criterion_2(&mut h));
    step(3, &mut criterion_3);
    step(4, &mut criterion_4);
    step(5, &mut criterion_5);
    step(6, &mut criterion_6);
    step(7, &mut || criterion_7(&h));
    step(8, &mut || criterion_8(&h));
    step(9, &mut criterion_9);
    assert!(all, "some acceptance criteria failed");
}
