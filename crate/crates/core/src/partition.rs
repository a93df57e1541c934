//! Hash-based 2D partitioning of an oriented graph and the subtask driver.
//!
//! Part `(i, j)` holds every oriented edge `(u, v)` with `u % n == i` and
//! `v % n == j`, stored under the local ids `u / n` and `v / n`. Since the
//! local id of a vertex only depends on the vertex itself, the destination id
//! of `v` in part `(r, k)` is also its source id in every part of row `k`, and
//! a subtask `(r, k, c)` can chain three parts without translating ids:
//! tables come from `(r, c)`, 1-hop lists from `(r, k)` and 2-hop lists from
//! `(k, c)`. Each triangle `u → v → w` with `u → w` lands in exactly one
//! subtask, `(u % n, v % n, w % n)`.

use std::fs::{self, File};
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{run_workers, ChunkCursor};
use crate::graph_io::{CsrGraph, VertexId};
use crate::hash_count::{
    merge_stats, CountReport, DegreeClass, Kernel, PartitionStats, SchedulerConfig, Worker,
    WorkerStats,
};
use crate::orient::OrientedGraph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionGrid {
    n: usize,
    vertex_count: usize,
    /// Row-major `n × n` parts. Every part shares the local id space
    /// `0..ceil(vertex_count / n)`.
    parts: Vec<CsrGraph>,
}

impl PartitionGrid {
    pub fn side(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn part(&self, i: usize, j: usize) -> &CsrGraph {
        &self.parts[i * self.n + j]
    }

    /// Number of global vertices `u` with `u % n == i`.
    pub fn row_len(&self, i: usize) -> usize {
        (self.vertex_count + self.n - 1 - i) / self.n
    }

    pub fn global_id(&self, row: usize, local: usize) -> usize {
        local * self.n + row
    }

    /// Out-degree of local vertex `u` inside part `(i, j)`.
    pub fn local_degree(&self, i: usize, j: usize, u: usize) -> usize {
        self.part(i, j).degree(u)
    }

    /// Edge counts of every part, row-major.
    pub fn part_edge_counts(&self) -> Vec<usize> {
        self.parts.iter().map(CsrGraph::edge_count).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.parts.iter().map(CsrGraph::edge_count).sum()
    }

    /// Edges read by a subtask: its 1-hop, 2-hop and table parts.
    pub fn touched_edges(&self, t: &Subtask) -> usize {
        self.part(t.row, t.bridge).edge_count()
            + self.part(t.bridge, t.col).edge_count()
            + self.part(t.row, t.col).edge_count()
    }

    /// Writes `part_i_j.bin` (binary CSR) for every part plus `manifest.json`.
    pub fn emit(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for i in 0..self.n {
            for j in 0..self.n {
                let file = File::create(dir.join(format!("part_{i}_{j}.bin")))?;
                self.part(i, j).write_binary(file)?;
            }
        }
        let manifest = GridManifest {
            n: self.n,
            vertex_counts: (0..self.n).map(|i| self.row_len(i)).collect(),
            edge_counts: (0..self.n)
                .map(|i| (0..self.n).map(|j| self.part(i, j).edge_count()).collect())
                .collect(),
        };
        let file = File::create(dir.join("manifest.json"))?;
        serde_json::to_writer_pretty(file, &manifest)?;
        Ok(())
    }

    /// Reads a grid written by [`PartitionGrid::emit`].
    pub fn load(dir: &Path) -> Result<Self> {
        let manifest: GridManifest =
            serde_json::from_reader(File::open(dir.join("manifest.json"))?)?;
        let n = manifest.n;
        if n == 0 || manifest.vertex_counts.len() != n {
            return Err(Error::Format(
                "manifest does not describe an n x n grid".into(),
            ));
        }
        let mut parts = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let file = File::open(dir.join(format!("part_{i}_{j}.bin")))?;
                parts.push(CsrGraph::read_binary(file)?);
            }
        }
        Ok(Self {
            n,
            vertex_count: manifest.vertex_counts.iter().sum(),
            parts,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridManifest {
    pub n: usize,
    pub vertex_counts: Vec<usize>,
    pub edge_counts: Vec<Vec<usize>>,
}

pub fn partition_graph(g: &OrientedGraph, n: usize) -> Result<PartitionGrid> {
    if n == 0 {
        return Err(Error::Config("grid side must be at least 1".into()));
    }
    let vertex_count = g.vertex_count();
    let local = vertex_count.div_ceil(n);
    let mut buckets: Vec<Vec<(VertexId, VertexId)>> = vec![Vec::new(); n * n];
    for u in 0..vertex_count {
        let (row, lu) = (u % n, (u / n) as VertexId);
        for &v in g.neighbors(u) {
            let v = v as usize;
            buckets[row * n + v % n].push((lu, (v / n) as VertexId));
        }
    }
    let parts = buckets
        .into_iter()
        .map(|edges| CsrGraph::from_edges(local, &edges))
        .collect();
    Ok(PartitionGrid {
        n,
        vertex_count,
        parts,
    })
}

/// One independent unit of partitioned work.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subtask {
    /// Row of `u`; the table part is `(row, col)`.
    pub row: usize,
    /// Row of `v`; the 1-hop part is `(row, bridge)`.
    pub bridge: usize,
    /// Column of `w`; the 2-hop part is `(bridge, col)`.
    pub col: usize,
    /// Only `u` with `u % splits == split` are processed.
    pub split: usize,
    pub splits: usize,
}

impl Subtask {
    pub fn whole(row: usize, bridge: usize, col: usize) -> Self {
        Self {
            row,
            bridge,
            col,
            split: 0,
            splits: 1,
        }
    }
}

pub fn enumerate_subtasks(n: usize, m: usize) -> Vec<Subtask> {
    let mut out = Vec::with_capacity(n * n * n * m);
    for row in 0..n {
        for bridge in 0..n {
            for col in 0..n {
                for split in 0..m {
                    out.push(Subtask {
                        row,
                        bridge,
                        col,
                        split,
                        splits: m,
                    });
                }
            }
        }
    }
    out
}

/// Degree class of local vertex `u` of row `t.row` for this subtask, decided
/// by its out-degree in the 1-hop part `(row, bridge)`.
///
/// The skip cutoff only applies to diagonal subtasks (`bridge == col`), where
/// the 1-hop and table parts coincide; otherwise a single 1-hop neighbor can
/// still close a triangle, so only degree 0 is skipped.
pub fn classify_after_partition(
    grid: &PartitionGrid,
    t: &Subtask,
    u: usize,
    cfg: &SchedulerConfig,
) -> DegreeClass {
    let degree = grid.local_degree(t.row, t.bridge, u);
    let skip_below = if t.bridge == t.col {
        cfg.skip_degree_below
    } else {
        cfg.skip_degree_below.min(1)
    };
    cfg.classify_with_skip(degree, skip_below)
}

fn check_subtask(grid: &PartitionGrid, t: &Subtask) -> Result<()> {
    let n = grid.side();
    if t.row >= n || t.bridge >= n || t.col >= n || t.splits == 0 || t.split >= t.splits {
        return Err(Error::Config(format!(
            "subtask {t:?} invalid for a {n}x{n} grid"
        )));
    }
    Ok(())
}

fn run_subtask(
    grid: &PartitionGrid,
    t: &Subtask,
    cfg: &SchedulerConfig,
    kernel: Kernel,
    worker: &mut Worker,
) -> Result<u64> {
    let table_part = grid.part(t.row, t.col);
    let hop1_part = grid.part(t.row, t.bridge);
    let hop2_part = grid.part(t.bridge, t.col);
    let mut found = 0;
    for u in 0..grid.row_len(t.row) {
        if t.splits > 1 && grid.global_id(t.row, u) % t.splits != t.split {
            continue;
        }
        let keys = table_part.neighbors(u);
        if keys.is_empty() {
            continue;
        }
        let class = classify_after_partition(grid, t, u, cfg);
        if class == DegreeClass::Skip {
            continue;
        }
        let hop1 = hop1_part.neighbors(u);
        let lanes = cfg.lane_width(class);
        match kernel {
            Kernel::VertexCentric => {
                found += worker.intersect(keys, hop1, hop2_part, class, lanes)?;
            }
            Kernel::EdgeCentric => {
                for v in hop1.chunks(1) {
                    found += worker.intersect(keys, v, hop2_part, class, lanes)?;
                }
            }
        }
    }
    Ok(found)
}

/// Counts the triangles owned by a single subtask.
pub fn count_subtask(
    grid: &PartitionGrid,
    t: &Subtask,
    cfg: &SchedulerConfig,
) -> Result<CountReport> {
    cfg.validate()?;
    check_subtask(grid, t)?;
    let start = Instant::now();
    let mut worker = Worker::new(cfg)?;
    run_subtask(grid, t, cfg, Kernel::VertexCentric, &mut worker)?;
    let wall = start.elapsed().as_nanos() as u64;
    worker.stats.busy_nanos = wall;
    Ok(merge_stats(vec![worker.stats], grid.touched_edges(t), wall))
}

/// `max / min`; infinite when the minimum is zero but the maximum is not.
pub fn imbalance_ratio<T: Copy + Into<f64>>(values: &[T]) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in values {
        let v = v.into();
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if values.is_empty() || hi == 0.0 {
        1.0
    } else if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

fn ratio_usize(values: &[usize]) -> f64 {
    let as_f: Vec<f64> = values.iter().map(|&v| v as f64).collect();
    imbalance_ratio(&as_f)
}

/// Partitions `g` into an `n × n` grid, runs all `n³·m` subtasks over the
/// worker pool and sums their counts.
pub fn count_partitioned(
    g: &OrientedGraph,
    n: usize,
    m: usize,
    workers: usize,
    cfg: &SchedulerConfig,
) -> Result<CountReport> {
    let grid = partition_graph(g, n)?;
    count_grid(&grid, m, workers, cfg, Kernel::VertexCentric)
}

/// Runs every subtask of an existing grid with the given kernel.
pub fn count_grid(
    grid: &PartitionGrid,
    m: usize,
    workers: usize,
    cfg: &SchedulerConfig,
    kernel: Kernel,
) -> Result<CountReport> {
    cfg.validate()?;
    if m == 0 || workers == 0 {
        return Err(Error::Config(
            "splits and workers must be at least 1".into(),
        ));
    }
    let tasks = enumerate_subtasks(grid.side(), m);
    let cursor = ChunkCursor::new(tasks.len(), cfg.chunk_size);
    let start = Instant::now();
    let results = run_workers(workers, |_| -> Result<(WorkerStats, Vec<(usize, u64)>)> {
        let began = Instant::now();
        let mut worker = Worker::new(cfg)?;
        let mut timings = Vec::new();
        while let Some(range) = cursor.claim() {
            for i in range {
                let t0 = Instant::now();
                run_subtask(grid, &tasks[i], cfg, kernel, &mut worker)?;
                timings.push((i, t0.elapsed().as_nanos() as u64));
            }
        }
        worker.stats.busy_nanos = began.elapsed().as_nanos() as u64;
        Ok((worker.stats, timings))
    })?;
    let wall = start.elapsed().as_nanos() as u64;

    let mut subtask_ns = vec![0; tasks.len()];
    let mut stats = Vec::with_capacity(workers);
    for r in results {
        let (s, timings) = r?;
        for (i, ns) in timings {
            subtask_ns[i] = ns;
        }
        stats.push(s);
    }
    let mut report = merge_stats(stats, grid.edge_count(), wall);
    let part_edges = grid.part_edge_counts();
    report.partition = Some(PartitionStats {
        grid: grid.side(),
        splits: m,
        time_ir: imbalance_ratio(&subtask_ns.iter().map(|&v| v as f64).collect::<Vec<_>>()),
        worker_time_ir: imbalance_ratio(
            &report
                .per_worker_nanos
                .iter()
                .map(|&v| v as f64)
                .collect::<Vec<_>>(),
        ),
        space_ir: ratio_usize(&part_edges),
        subtask_ns,
        part_edges,
    });
    Ok(report)
}

/// Smallest grid side whose average subtask footprint `3·|E|/n²` edges of
/// `edge_bytes` each fits in `memory_bytes`.
pub fn min_grid_for_memory(edge_count: usize, edge_bytes: usize, memory_bytes: usize) -> usize {
    let need = 3 * edge_count as u128 * edge_bytes as u128;
    let mut n = 1u128;
    while need > memory_bytes as u128 * n * n {
        n += 1;
    }
    n as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orient::orient_rank_by_degree;

    fn oriented_k4() -> OrientedGraph {
        let edges: Vec<_> = (0..4u32)
            .flat_map(|u| (0..4u32).filter(move |&v| v != u).map(move |v| (u, v)))
            .collect();
        orient_rank_by_degree(&CsrGraph::from_edges(4, &edges))
    }

    fn global_edges(grid: &PartitionGrid, i: usize, j: usize) -> Vec<(usize, usize)> {
        grid.part(i, j)
            .edges()
            .map(|(a, b)| (grid.global_id(i, a as usize), grid.global_id(j, b as usize)))
            .collect()
    }

    #[test]
    fn k4_grid_membership() {
        let g = oriented_k4();
        assert_eq!(
            g.csr.edges().collect::<Vec<_>>(),
            vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
        );
        let grid = partition_graph(&g, 2).unwrap();
        assert_eq!(global_edges(&grid, 0, 0), vec![(0, 2)]);
        assert_eq!(global_edges(&grid, 0, 1), vec![(0, 1), (0, 3), (2, 3)]);
        assert_eq!(global_edges(&grid, 1, 0), vec![(1, 2)]);
        assert_eq!(global_edges(&grid, 1, 1), vec![(1, 3)]);
        assert_eq!(grid.edge_count(), 6);
    }

    #[test]
    fn local_ids_are_floor_div() {
        let edges = [(5u32, 7u32), (7, 5)];
        let og = orient_rank_by_degree(&CsrGraph::from_edges(8, &edges));
        assert_eq!(og.csr.edges().collect::<Vec<_>>(), vec![(5, 7)]);
        let grid = partition_graph(&og, 3).unwrap();
        assert_eq!(grid.part(2, 1).edges().collect::<Vec<_>>(), vec![(1, 2)]);
        assert_eq!(grid.edge_count(), 1);
    }

    #[test]
    fn single_part_is_the_graph() {
        let g = oriented_k4();
        let grid = partition_graph(&g, 1).unwrap();
        assert_eq!(grid.part(0, 0), &g.csr);
        assert!(partition_graph(&g, 0).is_err());
    }

    #[test]
    fn subtask_enumeration() {
        assert_eq!(enumerate_subtasks(3, 1).len(), 27);
        assert_eq!(enumerate_subtasks(1, 4).len(), 4);
        let all = enumerate_subtasks(2, 2);
        assert_eq!(all.len(), 16);
        let uniq: std::collections::HashSet<_> = all
            .iter()
            .map(|t| (t.row, t.bridge, t.col, t.split))
            .collect();
        assert_eq!(uniq.len(), 16);
    }

    #[test]
    fn k4_subtask_walkthrough() {
        let cfg = SchedulerConfig::default();
        let grid = partition_graph(&oriented_k4(), 2).unwrap();
        let r = count_subtask(&grid, &Subtask::whole(0, 0, 1), &cfg).unwrap();
        assert_eq!(r.triangles, 1);

        let mut total = 0;
        for t in enumerate_subtasks(2, 1) {
            total += count_subtask(&grid, &t, &cfg).unwrap().triangles;
        }
        assert_eq!(total, 4);

        let whole = partition_graph(&oriented_k4(), 1).unwrap();
        let r = count_subtask(&whole, &Subtask::whole(0, 0, 0), &cfg).unwrap();
        assert_eq!(r.triangles, 4);
    }

    #[test]
    fn invalid_subtask_rejected() {
        let grid = partition_graph(&oriented_k4(), 2).unwrap();
        let cfg = SchedulerConfig::default();
        assert!(count_subtask(&grid, &Subtask::whole(2, 0, 0), &cfg).is_err());
        let t = Subtask {
            split: 2,
            splits: 2,
            ..Subtask::whole(0, 0, 0)
        };
        assert!(count_subtask(&grid, &t, &cfg).is_err());
    }

    #[test]
    fn classification_after_partition() {
        // u = 0 has 200 out-neighbors spread over three columns
        let n = 3;
        let pairs: Vec<_> = (1..=200u32).map(|v| (0, v)).collect();
        let og = OrientedGraph {
            csr: CsrGraph::from_edges(201, &pairs),
            original_degree: vec![1; 201],
        };
        let cfg = SchedulerConfig::default();
        assert_eq!(cfg.classify(og.out_degree(0)), DegreeClass::Large);

        let grid = partition_graph(&og, n).unwrap();
        let local: Vec<_> = (0..n).map(|j| grid.local_degree(0, j, 0)).collect();
        assert_eq!(local, vec![66, 67, 67]);
        let t = Subtask::whole(0, 1, 0);
        assert_eq!(
            classify_after_partition(&grid, &t, 0, &cfg),
            DegreeClass::Small
        );
    }

    #[test]
    fn skip_rule_only_on_diagonal() {
        let cfg = SchedulerConfig::default();
        // triangle 0→1, 0→2, 1→2 with n = 3: vertex 0 has one neighbor per part
        let edges: Vec<_> = [(0u32, 1u32), (0, 2), (1, 2)]
            .iter()
            .flat_map(|&(u, v)| [(u, v), (v, u)])
            .collect();
        let og = orient_rank_by_degree(&CsrGraph::from_edges(3, &edges));
        let grid = partition_graph(&og, 3).unwrap();
        assert_eq!(
            classify_after_partition(&grid, &Subtask::whole(0, 1, 2), 0, &cfg),
            DegreeClass::Small
        );
        assert_eq!(
            classify_after_partition(&grid, &Subtask::whole(0, 1, 1), 0, &cfg),
            DegreeClass::Skip
        );
        assert_eq!(
            classify_after_partition(&grid, &Subtask::whole(0, 0, 1), 0, &cfg),
            DegreeClass::Skip
        );
        let r = count_partitioned(&og, 3, 1, 1, &cfg).unwrap();
        assert_eq!(r.triangles, 1);
    }

    #[test]
    fn class_boundaries() {
        let cfg = SchedulerConfig::default();
        assert_eq!(cfg.classify_with_skip(0, 1), DegreeClass::Skip);
        assert_eq!(cfg.classify_with_skip(101, 1), DegreeClass::Large);
        assert_eq!(cfg.classify_with_skip(100, 1), DegreeClass::Small);
    }

    #[test]
    fn partitioned_report_metrics() {
        let cfg = SchedulerConfig::default();
        let r = count_partitioned(&oriented_k4(), 2, 2, 2, &cfg).unwrap();
        assert_eq!(r.triangles, 4);
        let p = r.partition.unwrap();
        assert_eq!(p.subtask_ns.len(), 16);
        assert_eq!(p.part_edges, vec![1, 3, 1, 1]);
        assert_eq!(p.space_ir, 3.0);
    }

    #[test]
    fn emit_and_reload() {
        let grid = partition_graph(&oriented_k4(), 2).unwrap();
        let dir = tempfile::tempdir().unwrap();
        grid.emit(dir.path()).unwrap();
        let manifest: GridManifest =
            serde_json::from_reader(File::open(dir.path().join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest.n, 2);
        assert_eq!(manifest.vertex_counts, vec![2, 2]);
        assert_eq!(manifest.edge_counts, vec![vec![1, 3], vec![1, 1]]);
        assert_eq!(PartitionGrid::load(dir.path()).unwrap(), grid);
    }

    #[test]
    fn ratios() {
        assert_eq!(imbalance_ratio(&[2.0, 4.0]), 2.0);
        assert_eq!(imbalance_ratio::<f64>(&[]), 1.0);
        assert!(imbalance_ratio(&[0.0, 1.0]).is_infinite());
        assert_eq!(imbalance_ratio(&[0.0, 0.0]), 1.0);
    }

    #[test]
    fn memory_helper() {
        assert_eq!(min_grid_for_memory(100, 8, 2400), 1);
        assert_eq!(min_grid_for_memory(100, 8, 2399), 2);
        assert_eq!(min_grid_for_memory(100, 8, 600), 2);
        assert_eq!(min_grid_for_memory(100, 8, 599), 3);
    }
}
