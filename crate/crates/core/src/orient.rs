//! Rank-by-degree orientation and the collision-reducing vertex reorderings.

use crate::error::{Error, Result};
use crate::graph_io::{CsrGraph, VertexId};

/// An undirected graph with every edge kept once, pointing from the lower
/// `(degree, id)` rank to the higher one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientedGraph {
    pub csr: CsrGraph,
    /// Undirected degree of each vertex before orientation.
    pub original_degree: Vec<u32>,
}

impl OrientedGraph {
    pub fn vertex_count(&self) -> usize {
        self.csr.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.csr.edge_count()
    }

    #[inline]
    pub fn neighbors(&self, u: usize) -> &[VertexId] {
        self.csr.neighbors(u)
    }

    #[inline]
    pub fn out_degree(&self, u: usize) -> usize {
        self.csr.degree(u)
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut indeg = vec![0; self.vertex_count()];
        for &v in self.csr.adjacency() {
            indeg[v as usize] += 1;
        }
        indeg
    }

    /// `Σ_{v ∈ N(u)} weight(v)` over out-neighbors, for every `u`.
    fn sum_over_out_neighbors(&self, weight: impl Fn(usize) -> u64) -> Vec<u64> {
        (0..self.vertex_count())
            .map(|u| self.neighbors(u).iter().map(|&v| weight(v as usize)).sum())
            .collect()
    }
}

/// Keeps `(u, v)` iff `(d(u), u) < (d(v), v)`.
pub fn orient_rank_by_degree(g: &CsrGraph) -> OrientedGraph {
    let n = g.vertex_count();
    let rank = |x: usize| (g.degree(x), x);
    let mut begin = Vec::with_capacity(n + 1);
    let mut adjacency = Vec::with_capacity(g.edge_count() / 2);
    begin.push(0);
    for u in 0..n {
        let ru = rank(u);
        adjacency.extend(
            g.neighbors(u)
                .iter()
                .copied()
                .filter(|&v| ru < rank(v as usize)),
        );
        begin.push(adjacency.len());
    }
    OrientedGraph {
        csr: CsrGraph::from_parts(begin, adjacency).expect("filtered sorted lists stay valid"),
        original_degree: g.degrees().into_iter().map(|d| d as u32).collect(),
    }
}

/// A relabeling of `[0, n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    new_of_old: Vec<VertexId>,
    old_of_new: Vec<VertexId>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        let ids: Vec<VertexId> = (0..n as VertexId).collect();
        Self {
            new_of_old: ids.clone(),
            old_of_new: ids,
        }
    }

    pub fn from_new_of_old(new_of_old: Vec<VertexId>) -> Result<Self> {
        let n = new_of_old.len();
        let mut old_of_new = vec![VertexId::MAX; n];
        for (old, &new) in new_of_old.iter().enumerate() {
            let slot = old_of_new
                .get_mut(new as usize)
                .ok_or_else(|| Error::InvalidPermutation(format!("id {new} >= {n}")))?;
            if *slot != VertexId::MAX {
                return Err(Error::InvalidPermutation(format!(
                    "id {new} assigned twice"
                )));
            }
            *slot = old as VertexId;
        }
        Ok(Self {
            new_of_old,
            old_of_new,
        })
    }

    /// Builds the permutation from the order in which old ids receive new ids.
    pub fn from_old_of_new(old_of_new: Vec<VertexId>) -> Result<Self> {
        let inv = Self::from_new_of_old(old_of_new)?;
        Ok(inv.inverse())
    }

    pub fn len(&self) -> usize {
        self.new_of_old.len()
    }

    pub fn is_empty(&self) -> bool {
        self.new_of_old.is_empty()
    }

    pub fn new_of_old(&self) -> &[VertexId] {
        &self.new_of_old
    }

    pub fn old_of_new(&self) -> &[VertexId] {
        &self.old_of_new
    }

    pub fn inverse(&self) -> Self {
        Self {
            new_of_old: self.old_of_new.clone(),
            old_of_new: self.new_of_old.clone(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.new_of_old
            .iter()
            .enumerate()
            .all(|(i, &v)| i == v as usize)
    }

    /// Little-endian `u32` dump of `new_of_old`.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.new_of_old
            .iter()
            .flat_map(|v| v.to_le_bytes())
            .collect()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if !bytes.len().is_multiple_of(4) {
            return Err(Error::Format(
                "permutation length not a multiple of 4".into(),
            ));
        }
        let ids = bytes
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Self::from_new_of_old(ids)
    }
}

/// Sorts vertices by descending oriented indegree; ties keep ascending old id.
pub fn reorder_by_indegree(og: &OrientedGraph) -> Permutation {
    let indeg = og.in_degrees();
    let mut order: Vec<VertexId> = (0..og.vertex_count() as VertexId).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(indeg[v as usize]));
    Permutation::from_old_of_new(order).expect("sorted ids form a permutation")
}

/// Degree-sort baseline: descending undirected degree, ties by ascending id.
pub fn reorder_by_degree(og: &OrientedGraph) -> Permutation {
    let mut order: Vec<VertexId> = (0..og.vertex_count() as VertexId).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(og.original_degree[v as usize]));
    Permutation::from_old_of_new(order).expect("sorted ids form a permutation")
}

/// Which degrees feed the collective-degree sort key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CollectiveBasis {
    /// Oriented out-degrees of oriented out-neighbors.
    #[default]
    Oriented,
    /// Undirected degrees of all undirected neighbors.
    Original,
}

/// Collective degree of every vertex under `basis`.
pub fn collective_degrees(og: &OrientedGraph, basis: CollectiveBasis) -> Vec<u64> {
    match basis {
        CollectiveBasis::Oriented => og.sum_over_out_neighbors(|v| og.out_degree(v) as u64),
        CollectiveBasis::Original => {
            let d = |x: usize| u64::from(og.original_degree[x]);
            let mut total = og.sum_over_out_neighbors(d);
            for u in 0..og.vertex_count() {
                for &v in og.neighbors(u) {
                    total[v as usize] += d(u);
                }
            }
            total
        }
    }
}

/// Degree classes used by the three-subset reordering and the scheduler.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeThresholds {
    /// Degrees strictly above this are "large".
    pub large_above: usize,
    /// Degrees strictly below this are omissible.
    pub skip_below: usize,
}

impl Default for DegreeThresholds {
    fn default() -> Self {
        Self {
            large_above: 100,
            skip_below: 2,
        }
    }
}

fn assign_by_collective(
    og: &OrientedGraph,
    basis: CollectiveBasis,
    passes: &[&dyn Fn(usize) -> bool],
) -> Permutation {
    let n = og.vertex_count();
    let collective = collective_degrees(og, basis);
    let mut by_collective: Vec<VertexId> = (0..n as VertexId).collect();
    by_collective.sort_by_key(|&u| std::cmp::Reverse(collective[u as usize]));

    let mut assigned = vec![false; n];
    let mut old_of_new = Vec::with_capacity(n);
    for &u in &by_collective {
        for pass in passes {
            for &v in og.neighbors(u as usize) {
                if !assigned[v as usize] && pass(og.out_degree(v as usize)) {
                    assigned[v as usize] = true;
                    old_of_new.push(v);
                }
            }
        }
    }
    old_of_new.extend((0..n as VertexId).filter(|&v| !assigned[v as usize]));
    Permutation::from_old_of_new(old_of_new).expect("each vertex assigned once")
}

/// Visits vertices by descending collective degree and hands out consecutive
/// new ids to their not-yet-labeled out-neighbors; leftovers follow in old-id
/// order.
pub fn reorder_by_collective_outdegree(og: &OrientedGraph, basis: CollectiveBasis) -> Permutation {
    assign_by_collective(og, basis, &[&|_| true])
}

/// Like [`reorder_by_collective_outdegree`], but each neighbor list is labeled
/// in three passes: large out-degree first, then mid-range, then omissible.
pub fn reorder_three_subsets(
    og: &OrientedGraph,
    basis: CollectiveBasis,
    thresholds: DegreeThresholds,
) -> Permutation {
    let DegreeThresholds {
        large_above,
        skip_below,
    } = thresholds;
    assign_by_collective(
        og,
        basis,
        &[
            &|d| d > large_above,
            &|d| d >= skip_below && d <= large_above,
            &|d| d < skip_below,
        ],
    )
}

fn check_len(p: &Permutation, n: usize) -> Result<()> {
    if p.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            actual: p.len(),
        });
    }
    Ok(())
}

pub fn permute_csr(g: &CsrGraph, p: &Permutation) -> Result<CsrGraph> {
    check_len(p, g.vertex_count())?;
    let map = p.new_of_old();
    let edges: Vec<_> = g
        .edges()
        .map(|(u, v)| (map[u as usize], map[v as usize]))
        .collect();
    Ok(CsrGraph::from_edges(g.vertex_count(), &edges))
}

pub fn permute_oriented(og: &OrientedGraph, p: &Permutation) -> Result<OrientedGraph> {
    let csr = permute_csr(&og.csr, p)?;
    let original_degree = p
        .old_of_new()
        .iter()
        .map(|&old| og.original_degree[old as usize])
        .collect();
    Ok(OrientedGraph {
        csr,
        original_degree,
    })
}
