//! Canonical forms for small graphs (at most 16 nodes) by individualization
//! and colour refinement, with twin pruning.

use super::Graph;

/// Largest graph order the canonical code can represent.
pub const MAX_CANON_NODES: usize = 16;

/// Isomorphism-invariant key: equal keys iff the graphs are isomorphic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonKey {
    pub n: u8,
    pub code: u128,
}

pub fn canonical_key(g: &Graph) -> CanonKey {
    canonical_key_masks(&g.masks())
}

pub fn canonical_key_masks(masks: &[u32]) -> CanonKey {
    canonical_labeling(masks).0
}

/// Canonical key together with a labeling: `order[k]` is the node placed at
/// canonical position `k`.
pub fn canonical_labeling(masks: &[u32]) -> (CanonKey, Vec<usize>) {
    let n = masks.len();
    assert!(n <= MAX_CANON_NODES, "canonical forms support at most {MAX_CANON_NODES} nodes");
    if n == 0 {
        return (CanonKey { n: 0, code: 0 }, Vec::new());
    }
    let mut best: Option<(u128, Vec<usize>)> = None;
    search(masks, vec![(0..n).collect()], &mut best);
    let (code, order) = best.expect("search visits at least one leaf");
    (CanonKey { n: n as u8, code }, order)
}

fn search(masks: &[u32], partition: Vec<Vec<usize>>, best: &mut Option<(u128, Vec<usize>)>) {
    let cells = refine(masks, partition);
    let Some(k) = cells.iter().position(|c| c.len() > 1) else {
        let order: Vec<usize> = cells.into_iter().map(|c| c[0]).collect();
        let code = encode(masks, &order);
        if best.as_ref().is_none_or(|(b, _)| code > *b) {
            *best = Some((code, order));
        }
        return;
    };
    let cell = &cells[k];
    let mut reps: Vec<usize> = Vec::new();
    for &v in cell {
        if reps.iter().any(|&w| twins(masks, v, w)) {
            continue;
        }
        reps.push(v);
    }
    for v in reps {
        let mut next = Vec::with_capacity(cells.len() + 1);
        next.extend_from_slice(&cells[..k]);
        next.push(vec![v]);
        next.push(cell.iter().copied().filter(|&w| w != v).collect());
        next.extend_from_slice(&cells[k + 1..]);
        search(masks, next, best);
    }
}

fn twins(masks: &[u32], v: usize, w: usize) -> bool {
    masks[v] & !(1 << w) == masks[w] & !(1 << v)
}

/// Equitable refinement: split cells by neighbour counts per cell until stable.
/// Cell order is derived from the signatures only, so it is label invariant.
fn refine(masks: &[u32], mut cells: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    let n = masks.len();
    loop {
        let mut cell_of = vec![0usize; n];
        let mut cell_masks = Vec::with_capacity(cells.len());
        for (c, members) in cells.iter().enumerate() {
            let mut m = 0u32;
            for &v in members {
                cell_of[v] = c;
                m |= 1 << v;
            }
            cell_masks.push(m);
        }
        let mut keyed: Vec<(Vec<u32>, usize)> = (0..n)
            .map(|v| {
                let mut sig = Vec::with_capacity(cells.len() + 1);
                sig.push(cell_of[v] as u32);
                sig.extend(cell_masks.iter().map(|&cm| (masks[v] & cm).count_ones()));
                (sig, v)
            })
            .collect();
        keyed.sort();
        let mut next: Vec<Vec<usize>> = Vec::new();
        for (i, (sig, v)) in keyed.iter().enumerate() {
            if i == 0 || *sig != keyed[i - 1].0 {
                next.push(Vec::new());
            }
            next.last_mut().unwrap().push(*v);
        }
        if next.len() == cells.len() {
            return next;
        }
        cells = next;
    }
}

fn encode(masks: &[u32], order: &[usize]) -> u128 {
    let n = order.len();
    let mut code = 0u128;
    for a in 0..n {
        for b in a + 1..n {
            code <<= 1;
            if masks[order[a]] >> order[b] & 1 == 1 {
                code |= 1;
            }
        }
    }
    code
}

/// Relabels `masks` so that node `order[k]` becomes node `k`.
pub fn permute_masks(masks: &[u32], order: &[usize]) -> Vec<u32> {
    let mut pos = vec![0usize; masks.len()];
    for (k, &v) in order.iter().enumerate() {
        pos[v] = k;
    }
    order
        .iter()
        .map(|&v| {
            let mut m = 0u32;
            let mut rest = masks[v];
            while rest != 0 {
                let w = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                m |= 1 << pos[w];
            }
            m
        })
        .collect()
}
