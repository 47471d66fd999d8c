//! Exhaustive generation of small graphs up to isomorphism.
//!
//! Graphs on `n` nodes are produced by augmenting every graph on `n - 1`
//! nodes with a new node and every possible neighbourhood, keeping one
//! representative per canonical key. Connected graphs only need connected
//! parents (every connected graph has a non-cut node).

use std::collections::BTreeMap;

use super::canon::{canonical_labeling, permute_masks, CanonKey, MAX_CANON_NODES};
use super::{is_biconnected, is_connected, Graph};

/// All graphs on exactly `n` nodes, one per isomorphism class, in canonical
/// labeling and ordered by canonical key.
pub fn all_graphs(n: usize) -> Vec<Graph> {
    grow(n, false)
}

/// All connected graphs on exactly `n` nodes up to isomorphism.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    grow(n, true)
}

/// All 2-connected graphs on exactly `n` nodes up to isomorphism.
pub fn biconnected_graphs(n: usize) -> Vec<Graph> {
    connected_graphs(n).into_iter().filter(is_biconnected).collect()
}

fn grow(n: usize, connected: bool) -> Vec<Graph> {
    assert!(n <= MAX_CANON_NODES, "enumeration supports at most {MAX_CANON_NODES} nodes");
    if n == 0 {
        return Vec::new();
    }
    let mut level: Vec<Vec<u32>> = vec![vec![0]];
    for size in 2..=n {
        let mut next: BTreeMap<CanonKey, Vec<u32>> = BTreeMap::new();
        let old = size - 1;
        let first = if connected { 1u32 } else { 0 };
        for parent in &level {
            for nbrs in first..(1u32 << old) {
                let mut masks = parent.clone();
                for (v, m) in masks.iter_mut().enumerate() {
                    if nbrs >> v & 1 == 1 {
                        *m |= 1 << old;
                    }
                }
                masks.push(nbrs);
                let (key, order) = canonical_labeling(&masks);
                next.entry(key).or_insert_with(|| permute_masks(&masks, &order));
            }
        }
        level = next.into_values().collect();
    }
    let graphs = level.iter().map(|m| Graph::from_masks(m));
    if connected {
        graphs.filter(is_connected).collect()
    } else {
        graphs.collect()
    }
}

/// 2-connected outerplanar graphs on `n >= 3` nodes up to isomorphism,
/// generated as dissections of the `n`-gon by non-crossing chords.
pub fn outerplanar_biconnected(n: usize) -> Vec<Graph> {
    assert!((3..=MAX_CANON_NODES).contains(&n));
    let chords: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 2..n).map(move |j| (i, j)))
        .filter(|&(i, j)| !(i == 0 && j == n - 1))
        .collect();
    let mut out: BTreeMap<CanonKey, Vec<u32>> = BTreeMap::new();
    let mut chosen = Vec::new();
    dissect(n, &chords, 0, &mut chosen, &mut out);
    out.into_values().map(|m| Graph::from_masks(&m)).collect()
}

fn crosses(a: (usize, usize), b: (usize, usize)) -> bool {
    let inside = |x: usize| a.0 < x && x < a.1;
    let shared = a.0 == b.0 || a.0 == b.1 || a.1 == b.0 || a.1 == b.1;
    !shared && inside(b.0) != inside(b.1)
}

fn dissect(
    n: usize,
    chords: &[(usize, usize)],
    from: usize,
    chosen: &mut Vec<(usize, usize)>,
    out: &mut BTreeMap<CanonKey, Vec<u32>>,
) {
    let mut masks = vec![0u32; n];
    for i in 0..n {
        let j = (i + 1) % n;
        masks[i] |= 1 << j;
        masks[j] |= 1 << i;
    }
    for &(i, j) in chosen.iter() {
        masks[i] |= 1 << j;
        masks[j] |= 1 << i;
    }
    let (key, order) = canonical_labeling(&masks);
    out.entry(key).or_insert_with(|| permute_masks(&masks, &order));

    for k in from..chords.len() {
        let c = chords[k];
        if chosen.iter().any(|&d| crosses(c, d)) {
            continue;
        }
        chosen.push(c);
        dissect(n, chords, k + 1, chosen, out);
        chosen.pop();
    }
}
