//! Exhaustive comparison of the drivers against the combinatorial oracles.

use rayon::prelude::*;

use crate::gmatrix::CertificateKind;
use crate::graphs::enumerate::{biconnected_graphs, connected_graphs};
use crate::graphs::{outerplanar_oracle, path_order, Graph, DEFAULT_ORACLE_CAP};
use crate::line1d::embed_line_with;
use crate::plane2d::embed_plane_with;
use crate::{DriverConfig, NoObserver};

pub const MAX_CAP: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dim {
    Line,
    Plane,
}

/// Counts for one node count.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Row {
    pub n: usize,
    pub graphs: usize,
    /// Graphs the oracle says embed.
    pub embeddable: usize,
    pub agree: usize,
    pub disagree: usize,
    /// Driver errors and certificates failing verification.
    pub errors: usize,
    /// Rendered graphs for the first few problems.
    pub examples: Vec<String>,
}

impl Row {
    pub fn clean(&self) -> bool {
        self.disagree == 0 && self.errors == 0
    }
}

enum Verdict {
    Agree,
    Disagree,
    Error,
}

fn check(g: &Graph, dim: Dim, cfg: &DriverConfig) -> (bool, Verdict) {
    let (expected, result) = match dim {
        Dim::Line => (path_order(g).is_some(), embed_line_with(g, cfg, &mut NoObserver)),
        Dim::Plane => (
            outerplanar_oracle(g, DEFAULT_ORACLE_CAP).expect("cap checked by caller"),
            embed_plane_with(g, cfg, &mut NoObserver),
        ),
    };
    let verdict = match result {
        Err(_) => Verdict::Error,
        Ok(c) if !c.report.passed() => Verdict::Error,
        Ok(c) => {
            let embedded = c.kind != CertificateKind::HighCorankMatrix;
            if embedded == expected {
                Verdict::Agree
            } else {
                Verdict::Disagree
            }
        }
    };
    (expected, verdict)
}

/// One row per node count from the smallest meaningful size up to `cap`.
/// Rows do not depend on the thread schedule.
pub fn crosscheck(dim: Dim, cap: usize, cfg: &DriverConfig) -> Vec<Row> {
    let first = match dim {
        Dim::Line => 2,
        Dim::Plane => 3,
    };
    (first..=cap)
        .map(|n| {
            let graphs = match dim {
                Dim::Line => connected_graphs(n),
                Dim::Plane => biconnected_graphs(n),
            };
            let results: Vec<(bool, Verdict)> = graphs.par_iter().map(|g| check(g, dim, cfg)).collect();
            let mut row = Row { n, graphs: graphs.len(), ..Row::default() };
            for (g, (expected, v)) in graphs.iter().zip(results) {
                row.embeddable += expected as usize;
                match v {
                    Verdict::Agree => row.agree += 1,
                    Verdict::Disagree => row.disagree += 1,
                    Verdict::Error => row.errors += 1,
                }
                if !matches!(v, Verdict::Agree) && row.examples.len() < 5 {
                    row.examples.push(g.render());
                }
            }
            row
        })
        .collect()
}
