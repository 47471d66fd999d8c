//! Brute-force minor containment for desk-scale graphs.
//!
//! A graph `h` is a minor of `g` iff deleting and contracting down to
//! `|V(h)|` nodes yields a graph containing `h` as a spanning subgraph.
//! The search memoizes failed states by canonical key.

use std::collections::HashSet;

use thiserror::Error;

use super::canon::{canonical_key_masks, CanonKey};
use super::Graph;

/// Default size cap of the outerplanarity oracle.
pub const DEFAULT_ORACLE_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("graph has {n} nodes, oracle cap is {cap}")]
    SizeCap { n: usize, cap: usize },
}

/// True iff `g` has neither a K4 nor a K2,3 minor.
pub fn outerplanar_oracle(g: &Graph, cap: usize) -> Result<bool, OracleError> {
    if g.n() > cap || g.n() > super::canon::MAX_CANON_NODES {
        return Err(OracleError::SizeCap { n: g.n(), cap: cap.min(super::canon::MAX_CANON_NODES) });
    }
    let k4 = Graph::complete(4);
    let k23 = Graph::complete_bipartite(2, 3);
    Ok(!has_minor(g, &k4) && !has_minor(g, &k23))
}

/// Minor containment test. Both graphs must have at most 16 nodes.
pub fn has_minor(g: &Graph, h: &Graph) -> bool {
    let target = h.masks();
    let min_deg = (0..h.n()).map(|v| h.degree(v)).min().unwrap_or(0);
    let mut search = Search { target, h_edges: h.edge_count(), prune_leaves: min_deg >= 2, failed: HashSet::new() };
    search.run(g.masks())
}

struct Search {
    target: Vec<u32>,
    h_edges: usize,
    prune_leaves: bool,
    failed: HashSet<CanonKey>,
}

impl Search {
    fn run(&mut self, masks: Vec<u32>) -> bool {
        let masks = if self.prune_leaves { strip_low_degree(masks) } else { masks };
        let n = masks.len();
        let m = masks.iter().map(|x| x.count_ones() as usize).sum::<usize>() / 2;
        if n < self.target.len() || m < self.h_edges {
            return false;
        }
        if n == self.target.len() {
            return contains_spanning(&masks, &self.target);
        }
        let key = canonical_key_masks(&masks);
        if self.failed.contains(&key) {
            return false;
        }
        for v in 0..n {
            if self.run(delete_node(&masks, v)) {
                return true;
            }
        }
        for u in 0..n {
            let mut rest = masks[u] & !((1u32 << (u + 1)) - 1);
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                if self.run(contract(&masks, u, v)) {
                    return true;
                }
            }
        }
        self.failed.insert(key);
        false
    }
}

fn strip_low_degree(mut masks: Vec<u32>) -> Vec<u32> {
    while let Some(v) = masks.iter().position(|m| m.count_ones() <= 1) {
        masks = delete_node(&masks, v);
    }
    masks
}

fn delete_node(masks: &[u32], v: usize) -> Vec<u32> {
    let low = (1u32 << v) - 1;
    masks
        .iter()
        .enumerate()
        .filter(|&(w, _)| w != v)
        .map(|(_, &m)| (m & low) | ((m >> 1) & !low))
        .collect()
}

/// Contracts edge `uv` (u < v) into `u`, then deletes `v`.
fn contract(masks: &[u32], u: usize, v: usize) -> Vec<u32> {
    let mut merged = masks.to_vec();
    let nu = (masks[u] | masks[v]) & !(1 << u) & !(1 << v);
    merged[u] = nu;
    for (w, m) in merged.iter_mut().enumerate() {
        if w != u && nu >> w & 1 == 1 {
            *m |= 1 << u;
        }
    }
    delete_node(&merged, v)
}

fn contains_spanning(g: &[u32], h: &[u32]) -> bool {
    let n = g.len();
    let mut perm: Vec<usize> = (0..n).collect();
    permutations(&mut perm, 0, &mut |p| {
        (0..n).all(|i| {
            let mut rest = h[i];
            while rest != 0 {
                let j = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                if g[p[i]] >> p[j] & 1 == 0 {
                    return false;
                }
            }
            true
        })
    })
}

fn permutations(p: &mut Vec<usize>, k: usize, check: &mut impl FnMut(&[usize]) -> bool) -> bool {
    if k == p.len() {
        return check(p);
    }
    for i in k..p.len() {
        p.swap(k, i);
        if permutations(p, k + 1, check) {
            p.swap(k, i);
            return true;
        }
        p.swap(k, i);
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::enumerate::connected_graphs;

    #[test]
    fn small_cases() {
        let cap = DEFAULT_ORACLE_CAP;
        assert!(outerplanar_oracle(&Graph::complete(3), cap).unwrap());
        assert!(!outerplanar_oracle(&Graph::complete(4), cap).unwrap());
        assert!(!outerplanar_oracle(&Graph::complete_bipartite(2, 3), cap).unwrap());
        assert!(outerplanar_oracle(&Graph::cycle(9), cap).unwrap());
        assert!(outerplanar_oracle(&Graph::star(5), cap).unwrap());
        // subdivided K4
        let sub = Graph::new(6, [(0, 1), (0, 2), (0, 4), (1, 2), (1, 5), (2, 3), (3, 4), (4, 5)]).unwrap();
        assert!(has_minor(&sub, &Graph::complete(4)));
        assert_eq!(
            outerplanar_oracle(&Graph::complete(13), cap),
            Err(OracleError::SizeCap { n: 13, cap: 12 })
        );
    }

    #[test]
    fn contraction_reaches_k4_from_wheel() {
        // wheel W5: hub 0 with rim 1..5
        let mut edges: Vec<(usize, usize)> = (1..=5).map(|i| (0, i)).collect();
        edges.extend((1..=5).map(|i| (i, i % 5 + 1)));
        let w5 = Graph::new(6, edges).unwrap();
        assert!(has_minor(&w5, &Graph::complete(4)));
    }

    #[test]
    fn outerplanar_graphs_satisfy_the_edge_bound() {
        for n in 2..=7 {
            for g in connected_graphs(n) {
                if outerplanar_oracle(&g, DEFAULT_ORACLE_CAP).unwrap() {
                    assert!(g.edge_count() + 3 <= 2 * n, "{}", g.render());
                }
            }
        }
    }
}
