//! Reference counters used to cross-check the hash kernels.
//!
//! Neither shares code with the counting engine: the naive counter keeps its
//! own adjacency sets and the merge counter intersects sorted lists directly.

use std::collections::HashSet;

use crate::graph_io::{CsrGraph, VertexId};
use crate::orient::OrientedGraph;

/// Counts unordered triples `{u, v, w}` with all three edges present by a
/// triple loop. Meant for a few hundred vertices at most.
pub fn count_naive(g: &CsrGraph) -> u64 {
    let n = g.vertex_count();
    let adjacent: Vec<HashSet<VertexId>> = (0..n)
        .map(|u| g.neighbors(u).iter().copied().collect())
        .collect();
    let has = |a: usize, b: usize| adjacent[a].contains(&(b as VertexId));
    let mut count = 0;
    for u in 0..n {
        for v in u + 1..n {
            if !has(u, v) {
                continue;
            }
            for w in v + 1..n {
                if has(u, w) && has(v, w) {
                    count += 1;
                }
            }
        }
    }
    count
}

/// Size of the intersection of two ascending lists, by two-pointer merge.
pub fn intersect_sorted(a: &[VertexId], b: &[VertexId]) -> u64 {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// `Σ_{(u,v)} |N(u) ∩ N(v)|` over all oriented edges.
pub fn count_merge_path(g: &OrientedGraph) -> u64 {
    let csr = &g.csr;
    (0..csr.vertex_count())
        .map(|u| {
            let nu = csr.neighbors(u);
            nu.iter()
                .map(|&v| intersect_sorted(nu, csr.neighbors(v as usize)))
                .sum::<u64>()
        })
        .sum()
}
