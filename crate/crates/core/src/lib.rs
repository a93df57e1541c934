//! Exact triangle counting with per-vertex hash tables.
//!
//! The engine orients an undirected graph by degree rank, optionally relabels
//! vertices to spread hash collisions, and counts triangles by building one
//! interleaved bucket table per vertex and probing it with the flattened
//! 2-hop neighborhood. Large graphs can be cut into an `n × n` hash grid whose
//! `n³·m` subtasks are independent.

pub mod error;
pub mod exec;
pub mod graph_io;
pub mod hash_count;
pub mod oracle;
pub mod orient;
pub mod partition;
pub mod pipeline;
pub mod synthetic;

pub use error::{Error, Result};
pub use graph_io::{
    build_csr, load_edge_list, normalize, CsrGraph, EdgeFormat, EdgeList, VertexId,
};
pub use hash_count::{
    count_edge_centric, count_vertex_centric, estimate_cost, virtual_index, CountReport, HashTable,
    Kernel, SchedulerConfig,
};
pub use oracle::{count_merge_path, count_naive};
pub use orient::{orient_rank_by_degree, OrientedGraph, Permutation};
pub use partition::{count_partitioned, partition_graph, PartitionGrid, Subtask};
pub use pipeline::{run_pipeline, PipelineConfig, PipelineReport};
