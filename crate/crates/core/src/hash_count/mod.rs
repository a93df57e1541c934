//! Hash-based intersection counting.
//!
//! The vertex-centric kernel builds one table per source vertex `u` from its
//! oriented neighbor list and then probes every 2-hop neighbor `w` reachable
//! through `v ∈ N(u)`. The 2-hop lists are walked as one flattened
//! ("virtual") sequence indexed through the prefix sum of `d(v)`, in batches
//! of the vertex's lane width.

mod table;

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use table::HashTable;

use crate::error::{Error, Result};
use crate::exec::{run_workers, ChunkCursor};
use crate::graph_io::{CsrGraph, VertexId};
use crate::orient::{DegreeThresholds, OrientedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchedulerConfig {
    /// Out-degrees above this use the large table and lane width.
    pub large_degree_threshold: usize,
    /// Vertices with fewer oriented neighbors are not processed.
    pub skip_degree_below: usize,
    /// Vertices (or edges, edge-centric) claimed per cursor fetch.
    pub chunk_size: usize,
    pub lane_width_small: usize,
    pub lane_width_large: usize,
    pub bucket_count_small: usize,
    pub bucket_count_large: usize,
    /// Slots per bucket.
    pub capacity: usize,
}

impl Default for SchedulerConfig {
    fn default() -> Self {
        Self {
            large_degree_threshold: 100,
            skip_degree_below: 2,
            chunk_size: 1,
            lane_width_small: 32,
            lane_width_large: 256,
            bucket_count_small: 32,
            bucket_count_large: 1024,
            capacity: 128,
        }
    }
}

/// How the table of a source vertex is reused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kernel {
    /// One table per source vertex, probed by all of its 2-hop neighbors.
    #[default]
    VertexCentric,
    /// The source's table is rebuilt for every outgoing edge.
    EdgeCentric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeClass {
    Skip,
    Small,
    Large,
}

impl SchedulerConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("large_degree_threshold", self.large_degree_threshold),
            ("skip_degree_below", self.skip_degree_below),
            ("chunk_size", self.chunk_size),
            ("lane_width_small", self.lane_width_small),
            ("lane_width_large", self.lane_width_large),
            ("bucket_count_small", self.bucket_count_small),
            ("bucket_count_large", self.bucket_count_large),
            ("capacity", self.capacity),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(Error::Config(format!("{name} must be at least 1")));
        }
        if self.skip_degree_below > self.large_degree_threshold {
            return Err(Error::Config(
                "skip_degree_below must not exceed large_degree_threshold".into(),
            ));
        }
        Ok(())
    }

    pub fn thresholds(&self) -> DegreeThresholds {
        DegreeThresholds {
            large_above: self.large_degree_threshold,
            skip_below: self.skip_degree_below,
        }
    }

    pub fn classify(&self, degree: usize) -> DegreeClass {
        self.classify_with_skip(degree, self.skip_degree_below)
    }

    pub(crate) fn classify_with_skip(&self, degree: usize, skip_below: usize) -> DegreeClass {
        if degree < skip_below || degree == 0 {
            DegreeClass::Skip
        } else if degree > self.large_degree_threshold {
            DegreeClass::Large
        } else {
            DegreeClass::Small
        }
    }

    pub fn lane_width(&self, class: DegreeClass) -> usize {
        match class {
            DegreeClass::Large => self.lane_width_large,
            _ => self.lane_width_small,
        }
    }
}

/// Outcome of one counting run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub triangles: u64,
    /// Largest bucket occupancy seen in any table built during the run.
    pub max_collision: usize,
    /// Collective degree times max collision, summed over processed vertices
    /// using the tables the run actually built.
    pub phi: u64,
    /// Traversed (oriented) edges per second of counting wall time.
    pub teps: f64,
    #[serde(rename = "construct_ns")]
    pub hash_construct_nanos: u64,
    #[serde(rename = "intersect_ns")]
    pub intersect_nanos: u64,
    #[serde(rename = "per_worker_ns")]
    pub per_worker_nanos: Vec<u64>,
    #[serde(rename = "total_ns")]
    pub total_nanos: u64,
    pub edges: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<PartitionStats>,
}

/// Extra metrics of a partitioned run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PartitionStats {
    pub grid: usize,
    pub splits: usize,
    pub subtask_ns: Vec<u64>,
    pub part_edges: Vec<usize>,
    /// max / min subtask time.
    pub time_ir: f64,
    /// max / min worker busy time.
    pub worker_time_ir: f64,
    /// max / min partition edge count.
    pub space_ir: f64,
}

/// Locates flat index `k` of the combined 2-hop list.
///
/// `prefix` is the inclusive prefix sum of the neighbor degrees; the result is
/// the neighbor position `p` with `prefix[p-1] <= k < prefix[p]` and the offset
/// of `k` inside that neighbor's list.
pub fn virtual_index(prefix: &[usize], k: usize) -> Result<(usize, usize)> {
    let len = prefix.last().copied().unwrap_or(0);
    if k >= len {
        return Err(Error::IndexOutOfRange { index: k, len });
    }
    let p = prefix.partition_point(|&end| end <= k);
    let start = if p == 0 { 0 } else { prefix[p - 1] };
    Ok((p, k - start))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CostEstimate {
    pub phi: u64,
    pub max_collision: usize,
}

/// Intersection cost model: `Σ_u (Σ_{v∈N(u)} d(v)) · max bucket length`, with
/// each `u`'s table built over `N(u)` using `bucket_count` buckets and no
/// capacity limit.
pub fn estimate_cost(g: &OrientedGraph, bucket_count: usize) -> CostEstimate {
    let b = bucket_count.max(1);
    let mut lens = vec![0usize; b];
    let mut est = CostEstimate::default();
    for u in 0..g.vertex_count() {
        let nbrs = g.neighbors(u);
        if nbrs.is_empty() {
            continue;
        }
        lens.fill(0);
        let mut collective = 0u64;
        for &v in nbrs {
            lens[v as usize % b] += 1;
            collective += g.out_degree(v as usize) as u64;
        }
        let max_len = lens.iter().copied().max().unwrap_or(0);
        est.phi += collective * max_len as u64;
        est.max_collision = est.max_collision.max(max_len);
    }
    est
}

/// Per-worker tables, scratch space and statistics.
pub(crate) struct Worker {
    small: HashTable,
    large: HashTable,
    prefix: Vec<usize>,
    pub(crate) stats: WorkerStats,
}

#[derive(Debug, Default, Clone)]
pub(crate) struct WorkerStats {
    pub triangles: u64,
    pub max_collision: usize,
    pub phi: u64,
    pub construct_nanos: u64,
    pub intersect_nanos: u64,
    pub busy_nanos: u64,
}

impl Worker {
    pub(crate) fn new(cfg: &SchedulerConfig) -> Result<Self> {
        Ok(Self {
            small: HashTable::new(cfg.bucket_count_small, cfg.capacity)?,
            large: HashTable::new(cfg.bucket_count_large, cfg.capacity)?,
            prefix: Vec::new(),
            stats: WorkerStats::default(),
        })
    }

    // a list longer than the small table can hold always gets the large one
    fn wants_large(&self, class: DegreeClass, keys: usize) -> bool {
        class == DegreeClass::Large || keys > self.small.slots()
    }

    /// Builds a table over `table_keys` and probes every `w ∈ N_hop2(v)` for
    /// `v ∈ hop1`. Unpartitioned counting passes the same list for both.
    pub(crate) fn intersect(
        &mut self,
        table_keys: &[VertexId],
        hop1: &[VertexId],
        hop2: &CsrGraph,
        class: DegreeClass,
        lane_width: usize,
    ) -> Result<u64> {
        let large = self.wants_large(class, table_keys.len());
        let t0 = Instant::now();
        let table = if large {
            &mut self.large
        } else {
            &mut self.small
        };
        table.build(table_keys)?;
        let max_len = table.max_len();
        let t1 = Instant::now();

        self.prefix.clear();
        let mut total = 0;
        for &v in hop1 {
            total += hop2.degree(v as usize);
            self.prefix.push(total);
        }
        let table = if large { &self.large } else { &self.small };

        let mut found = 0u64;
        let mut k = 0;
        while k < total {
            let end = (k + lane_width).min(total);
            let (mut p, mut off) = virtual_index(&self.prefix, k)?;
            let mut list = hop2.neighbors(hop1[p] as usize);
            for _ in k..end {
                while off == list.len() {
                    p += 1;
                    off = 0;
                    list = hop2.neighbors(hop1[p] as usize);
                }
                found += u64::from(table.probe(list[off]));
                off += 1;
            }
            k = end;
        }
        let t2 = Instant::now();

        let s = &mut self.stats;
        s.triangles += found;
        s.max_collision = s.max_collision.max(max_len);
        s.phi += total as u64 * max_len as u64;
        s.construct_nanos += (t1 - t0).as_nanos() as u64;
        s.intersect_nanos += (t2 - t1).as_nanos() as u64;
        Ok(found)
    }
}

pub(crate) fn merge_stats(stats: Vec<WorkerStats>, edges: usize, wall_nanos: u64) -> CountReport {
    let mut report = CountReport {
        edges,
        total_nanos: wall_nanos,
        ..Default::default()
    };
    for s in stats {
        report.triangles += s.triangles;
        report.max_collision = report.max_collision.max(s.max_collision);
        report.phi += s.phi;
        report.hash_construct_nanos += s.construct_nanos;
        report.intersect_nanos += s.intersect_nanos;
        report.per_worker_nanos.push(s.busy_nanos);
    }
    report.teps = if wall_nanos == 0 {
        0.0
    } else {
        edges as f64 / (wall_nanos as f64 * 1e-9)
    };
    report
}

fn check_workers(cfg: &SchedulerConfig, workers: usize) -> Result<()> {
    cfg.validate()?;
    if workers == 0 {
        return Err(Error::Config("worker count must be at least 1".into()));
    }
    Ok(())
}

/// Vertex-centric counting: one table per vertex, reused for all its
/// neighbors. Workers claim `chunk_size` vertices at a time.
pub fn count_vertex_centric(
    g: &OrientedGraph,
    cfg: &SchedulerConfig,
    workers: usize,
) -> Result<CountReport> {
    check_workers(cfg, workers)?;
    let cursor = ChunkCursor::new(g.vertex_count(), cfg.chunk_size);
    let start = Instant::now();
    let results = run_workers(workers, |_| -> Result<WorkerStats> {
        let began = Instant::now();
        let mut worker = Worker::new(cfg)?;
        while let Some(range) = cursor.claim() {
            for u in range {
                let nbrs = g.neighbors(u);
                let class = cfg.classify(nbrs.len());
                if class == DegreeClass::Skip {
                    continue;
                }
                worker.intersect(nbrs, nbrs, &g.csr, class, cfg.lane_width(class))?;
            }
        }
        worker.stats.busy_nanos = began.elapsed().as_nanos() as u64;
        Ok(worker.stats)
    })?;
    let wall = start.elapsed().as_nanos() as u64;
    let stats = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(merge_stats(stats, g.edge_count(), wall))
}

/// Edge-centric counting: the source's table is rebuilt for every directed
/// edge `(u, v)`, then probed with `N(v)`. Workers claim `chunk_size` edges at
/// a time.
pub fn count_edge_centric(
    g: &OrientedGraph,
    cfg: &SchedulerConfig,
    workers: usize,
) -> Result<CountReport> {
    check_workers(cfg, workers)?;
    let sources: Vec<VertexId> = g.csr.edges().map(|(u, _)| u).collect();
    let adjacency = g.csr.adjacency();
    let cursor = ChunkCursor::new(adjacency.len(), cfg.chunk_size);
    let start = Instant::now();
    let results = run_workers(workers, |_| -> Result<WorkerStats> {
        let began = Instant::now();
        let mut worker = Worker::new(cfg)?;
        while let Some(range) = cursor.claim() {
            for e in range {
                let u = sources[e] as usize;
                let nbrs = g.neighbors(u);
                let class = cfg.classify(nbrs.len());
                if class == DegreeClass::Skip {
                    continue;
                }
                let v = &adjacency[e..e + 1];
                worker.intersect(nbrs, v, &g.csr, class, cfg.lane_width(class))?;
            }
        }
        worker.stats.busy_nanos = began.elapsed().as_nanos() as u64;
        Ok(worker.stats)
    })?;
    let wall = start.elapsed().as_nanos() as u64;
    let stats = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(merge_stats(stats, g.edge_count(), wall))
}
