#![allow(dead_code)]

use tricount::graph_io::{build_csr, normalize, CsrGraph, VertexId};
use tricount::orient::{orient_rank_by_degree, OrientedGraph};
use tricount::synthetic::{generate_synthetic, SyntheticKind, SyntheticSpec};

pub fn normalized(kind: SyntheticKind, seed: u64) -> CsrGraph {
    let raw = generate_synthetic(&SyntheticSpec::new(kind, seed));
    build_csr(&normalize(&raw).0)
}

pub fn gnp(n: usize, p: f64, seed: u64) -> CsrGraph {
    normalized(SyntheticKind::Gnp { n, p }, seed)
}

pub fn undirected(n: usize, pairs: &[(VertexId, VertexId)]) -> CsrGraph {
    let edges: Vec<_> = pairs.iter().flat_map(|&(u, v)| [(u, v), (v, u)]).collect();
    CsrGraph::from_edges(n, &edges)
}

pub fn clique(n: u32) -> CsrGraph {
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            pairs.push((u, v));
        }
    }
    undirected(n as usize, &pairs)
}

pub fn cycle(n: u32) -> CsrGraph {
    let pairs: Vec<_> = (0..n).map(|u| (u, (u + 1) % n)).collect();
    undirected(n as usize, &pairs)
}

pub fn oriented(g: &CsrGraph) -> OrientedGraph {
    orient_rank_by_degree(g)
}

/// Builds an "oriented" graph straight from directed pairs, for hand-made
/// reordering scenarios.
pub fn directed(n: usize, pairs: &[(VertexId, VertexId)]) -> OrientedGraph {
    let csr = CsrGraph::from_edges(n, pairs);
    let mut deg = vec![0u32; n];
    for &(u, v) in pairs {
        deg[u as usize] += 1;
        deg[v as usize] += 1;
    }
    OrientedGraph {
        csr,
        original_degree: deg,
    }
}
