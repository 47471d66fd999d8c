//! Certificates: the outcome of a driver together with an independent
//! re-check of everything it claims.

use std::fmt;

use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;
use thiserror::Error;

use super::GMatrix;
use crate::graphs::{is_connected, outerplanar_oracle, path_order, Graph, DEFAULT_ORACLE_CAP};
use crate::plane2d::outerplanar::verify_outerplanar;
use crate::spectra::{eigen_summary, EigenSummary, SymmetricMatrix, SymmetricSource};

/// Geometric tolerance used when re-checking plane embeddings.
pub const GEOMETRY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateKind {
    PathEmbedding,
    OuterplanarEmbedding,
    HighCorankMatrix,
}

impl fmt::Display for CertificateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CertificateKind::PathEmbedding => "PathEmbedding",
            CertificateKind::OuterplanarEmbedding => "OuterplanarEmbedding",
            CertificateKind::HighCorankMatrix => "HighCorankMatrix",
        };
        f.write_str(s)
    }
}

/// One verification item. `value` is the measured quantity, `threshold`
/// what it was compared against.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Report {
    /// Corank the certificate asserts: the embedding dimension for
    /// embeddings, the dichotomy bound (2 or 3) for matrices.
    pub claimed_corank: usize,
    pub checks: Vec<Check>,
    pub log: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, name: &str, passed: bool, value: f64, threshold: f64) {
        self.checks.push(Check { name: name.to_string(), passed, value, threshold });
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub graph: Graph,
    /// Dense row-major matrix.
    pub matrix: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    pub tolerance: f64,
    /// Per-node coordinates for the embedding kinds.
    pub embedding: Option<Vec<Vec<f64>>>,
    pub report: Report,
}

impl Certificate {
    fn build(
        kind: CertificateKind,
        m: &GMatrix,
        summary: &EigenSummary,
        claimed_corank: usize,
        embedding: Option<Vec<Vec<f64>>>,
        log: Vec<String>,
    ) -> Self {
        let mut c = Certificate {
            kind,
            graph: m.graph().clone(),
            matrix: m.symmetric().rows(),
            eigenvalues: summary.eigenvalues.clone(),
            tolerance: summary.tol,
            embedding,
            report: Report { claimed_corank, checks: Vec::new(), log },
        };
        c.report = verify_certificate(&c, &c.graph, None);
        c
    }

    pub fn high_corank(m: &GMatrix, summary: &EigenSummary, claimed: usize, log: Vec<String>) -> Self {
        Self::build(CertificateKind::HighCorankMatrix, m, summary, claimed, None, log)
    }

    pub fn path_embedding(m: &GMatrix, summary: &EigenSummary, u: &[f64], log: Vec<String>) -> Self {
        let emb = u.iter().map(|&x| vec![x]).collect();
        Self::build(CertificateKind::PathEmbedding, m, summary, 1, Some(emb), log)
    }

    pub fn outerplanar_embedding(m: &GMatrix, summary: &EigenSummary, pts: &[[f64; 2]], log: Vec<String>) -> Self {
        let emb = pts.iter().map(|p| p.to_vec()).collect();
        Self::build(CertificateKind::OuterplanarEmbedding, m, summary, 2, Some(emb), log)
    }

    pub fn to_json(&self) -> String {
        let doc = JsonCertificate {
            kind: self.kind,
            n: self.graph.n(),
            edges: self.graph.edges().iter().map(|&(i, j)| [i + 1, j + 1]).collect(),
            matrix: self.matrix.iter().map(|r| r.iter().copied().map(Num).collect()).collect(),
            eigenvalues: self.eigenvalues.iter().copied().map(Num).collect(),
            tolerance: Num(self.tolerance),
            embedding: self
                .embedding
                .as_ref()
                .map(|e| e.iter().map(|r| r.iter().copied().map(Num).collect()).collect()),
            report: JsonReport {
                claimed_corank: self.report.claimed_corank,
                passed: self.report.passed(),
                checks: self
                    .report
                    .checks
                    .iter()
                    .map(|c| JsonCheck {
                        name: c.name.clone(),
                        passed: c.passed,
                        value: Num(c.value),
                        threshold: Num(c.threshold),
                    })
                    .collect(),
                log: self.report.log.clone(),
            },
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("certificate serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CertificateError> {
        let doc: InCertificate = serde_json::from_str(text).map_err(|e| CertificateError::Json(e.to_string()))?;
        let mut edges = Vec::with_capacity(doc.edges.len());
        for [i, j] in doc.edges {
            if i == 0 || j == 0 {
                return Err(CertificateError::Graph(format!("node labels are 1-based, got edge {i}-{j}")));
            }
            edges.push((i - 1, j - 1));
        }
        let graph = Graph::new(doc.n, edges).map_err(|e| CertificateError::Graph(e.to_string()))?;
        if doc.matrix.len() != doc.n || doc.matrix.iter().any(|r| r.len() != doc.n) {
            return Err(CertificateError::Shape(format!("matrix must be {0}x{0}", doc.n)));
        }
        if doc.eigenvalues.len() != doc.n {
            return Err(CertificateError::Shape(format!("expected {} eigenvalues", doc.n)));
        }
        if let Some(e) = &doc.embedding {
            if e.len() != doc.n {
                return Err(CertificateError::Shape(format!("embedding needs {} points", doc.n)));
            }
        }
        Ok(Certificate {
            kind: doc.kind,
            graph,
            matrix: doc.matrix,
            eigenvalues: doc.eigenvalues,
            tolerance: doc.tolerance,
            embedding: doc.embedding,
            report: Report {
                claimed_corank: doc.report.claimed_corank,
                checks: Vec::new(),
                log: doc.report.log.unwrap_or_default(),
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertificateError {
    #[error("malformed certificate JSON: {0}")]
    Json(String),
    #[error("invalid graph in certificate: {0}")]
    Graph(String),
    #[error("inconsistent certificate shape: {0}")]
    Shape(String),
}

/// Re-validates every claim of `c` against `g`. `tol` overrides the
/// certificate's own tolerance.
pub fn verify_certificate(c: &Certificate, g: &Graph, tol: Option<f64>) -> Report {
    let tol = tol.unwrap_or(c.tolerance);
    let n = g.n();
    let mut r = Report { claimed_corank: c.report.claimed_corank, checks: Vec::new(), log: c.report.log.clone() };

    let shape_ok = c.matrix.len() == n && c.matrix.iter().all(|row| row.len() == n);
    r.push("shape", shape_ok, c.matrix.len() as f64, n as f64);
    if !shape_ok {
        return r;
    }
    let m = &c.matrix;
    let finite = m.iter().flatten().all(|x| x.is_finite());
    r.push("finite", finite, 0.0, 0.0);
    if !finite {
        return r;
    }

    let mut asym: f64 = 0.0;
    let mut pattern: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            asym = asym.max((m[i][j] - m[j][i]).abs());
            if !g.has_edge(i, j) {
                pattern = pattern.max(m[i][j].abs()).max(m[j][i].abs());
            }
        }
    }
    r.push("symmetric", asym == 0.0, asym, 0.0);
    r.push("zero_pattern", pattern == 0.0, pattern, 0.0);
    let worst_edge = g.edges().iter().map(|&(i, j)| m[i][j].max(m[j][i])).fold(f64::NEG_INFINITY, f64::max);
    let worst_edge = if g.edge_count() == 0 { -1.0 } else { worst_edge };
    r.push("well_signed", worst_edge < 0.0, worst_edge, 0.0);
    r.push("connected", is_connected(g), 0.0, 0.0);

    let sym = SymmetricMatrix::from_fn(n, |i, j| 0.5 * (m[i][j] + m[j][i]));
    let s = match eigen_summary(&sym, tol) {
        Ok(s) => s,
        Err(_) => {
            r.push("eigen_decomposition", false, 0.0, 0.0);
            return r;
        }
    };
    let drift = if c.eigenvalues.len() == n {
        s.eigenvalues.iter().zip(&c.eigenvalues).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    r.push("eigenvalues_recorded", drift <= tol, drift, tol);
    r.push("one_negative", s.n_negative == 1, s.n_negative as f64, 1.0);
    let claimed = c.report.claimed_corank;
    r.push("corank", s.corank >= claimed && claimed >= 1, s.corank as f64, claimed as f64);

    let oracle_ok = n <= DEFAULT_ORACLE_CAP && is_connected(g);
    match c.kind {
        CertificateKind::HighCorankMatrix => {
            if oracle_ok && claimed >= 2 {
                // κ(G) ≥ 2 iff G is not a path, κ(G) ≥ 3 iff not outerplanar
                let consistent = match claimed {
                    2 => path_order(g).is_none(),
                    _ => !outerplanar_oracle(g, DEFAULT_ORACLE_CAP).unwrap_or(false),
                };
                r.push("oracle", consistent, 0.0, 0.0);
            }
        }
        CertificateKind::PathEmbedding | CertificateKind::OuterplanarEmbedding => {
            let dim = if c.kind == CertificateKind::PathEmbedding { 1 } else { 2 };
            let Some(emb) = c.embedding.as_ref().filter(|e| e.len() == n && e.iter().all(|p| p.len() == dim)) else {
                r.push("embedding_shape", false, 0.0, dim as f64);
                return r;
            };
            r.push("embedding_shape", true, dim as f64, dim as f64);
            let scale = emb.iter().flatten().fold(1.0f64, |a, x| a.max(x.abs()));
            let resid = crate::spectra::kernel_residual(
                &sym,
                &(0..dim).map(|k| emb.iter().map(|p| p[k]).collect()).collect::<Vec<_>>(),
            );
            r.push("kernel_residual", resid <= tol * scale, resid, tol * scale);
            if dim == 1 {
                let u: Vec<f64> = emb.iter().map(|p| p[0]).collect();
                match path_order(g) {
                    Some(order) => {
                        let gap = monotone_gap(&u, &order);
                        r.push("monotone_path", gap > 0.0, gap, 0.0);
                    }
                    None => r.push("monotone_path", false, 0.0, 0.0),
                }
            } else {
                let pts: Vec<[f64; 2]> = emb.iter().map(|p| [p[0], p[1]]).collect();
                let norm_err = pts.iter().map(|p| (p[0].hypot(p[1]) - 1.0).abs()).fold(0.0, f64::max);
                r.push("unit_vectors", norm_err <= GEOMETRY_TOL, norm_err, GEOMETRY_TOL);
                let geo = verify_outerplanar(&pts, g, GEOMETRY_TOL);
                if let Err(e) = &geo {
                    r.log.push(format!("outerplanarity check failed: {e}"));
                }
                r.push("outerplanar", geo.is_ok(), 0.0, GEOMETRY_TOL);
                if oracle_ok {
                    r.push("oracle", outerplanar_oracle(g, DEFAULT_ORACLE_CAP).unwrap_or(false), 0.0, 0.0);
                }
            }
        }
    }
    r
}

/// Smallest step along `order` in the direction of the first step; positive
/// iff the values are strictly monotone.
fn monotone_gap(u: &[f64], order: &[usize]) -> f64 {
    if order.len() < 2 {
        return f64::INFINITY;
    }
    let sign = (u[order[1]] - u[order[0]]).signum();
    order.windows(2).map(|w| sign * (u[w[1]] - u[w[0]])).fold(f64::INFINITY, f64::min)
}

/// A number written with 17 significant digits.
struct Num(f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(format!("{:.16e}", self.0)).expect("valid JSON number");
        raw.serialize(s)
    }
}

#[derive(Serialize)]
struct JsonCertificate {
    kind: CertificateKind,
    n: usize,
    edges: Vec<[usize; 2]>,
    matrix: Vec<Vec<Num>>,
    eigenvalues: Vec<Num>,
    tolerance: Num,
    #[serde(skip_serializing_if = "Option::is_none")]
    embedding: Option<Vec<Vec<Num>>>,
    report: JsonReport,
}

#[derive(Serialize)]
struct JsonReport {
    claimed_corank: usize,
    passed: bool,
    checks: Vec<JsonCheck>,
    log: Vec<String>,
}

#[derive(Serialize)]
struct JsonCheck {
    name: String,
    passed: bool,
    value: Num,
    threshold: Num,
}

#[derive(Deserialize)]
struct InCertificate {
    kind: CertificateKind,
    n: usize,
    edges: Vec<[usize; 2]>,
    matrix: Vec<Vec<f64>>,
    eigenvalues: Vec<f64>,
    tolerance: f64,
    #[serde(default)]
    embedding: Option<Vec<Vec<f64>>>,
    report: InReport,
}

#[derive(Deserialize)]
struct InReport {
    claimed_corank: usize,
    #[serde(default)]
    log: Option<Vec<String>>,
}
