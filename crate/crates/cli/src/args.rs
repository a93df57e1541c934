use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tricount::graph_io::EdgeFormat;
use tricount::hash_count::SchedulerConfig;
use tricount::orient::CollectiveBasis;
use tricount::pipeline::{Input, Mode, PipelineConfig, Reorder, ReportFormat};
use tricount::synthetic::{SyntheticKind, SyntheticSpec};

/// Exact triangle counting with per-vertex hash tables.
///
/// Without a subcommand the count flags apply directly, so
/// `tricount --input g.txt` and `tricount count --input g.txt` are the same.
#[derive(Debug, Parser)]
#[command(name = "tricount", version, args_conflicts_with_subcommands = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,
    #[command(flatten)]
    pub count: CountArgs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count triangles (the default).
    Count(CountArgs),
    /// Download the SNAP datasets used by the acceptance suite.
    FetchDatasets(FetchArgs),
    /// Write a seeded synthetic graph as an edge list.
    Generate(GenerateArgs),
    /// Smallest grid side whose three resident parts fit a memory budget.
    PlanGrid(PlanArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Txt,
    Bin,
}

impl From<FormatArg> for EdgeFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Txt => EdgeFormat::Text,
            FormatArg::Bin => EdgeFormat::Binary,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ReorderArg {
    None,
    Degree,
    Indegree,
    Collective,
    ThreeSubset,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BasisArg {
    Oriented,
    Original,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Vertex,
    Edge,
    Naive,
    Merge,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ReportArg {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct CountArgs {
    /// Edge list to read; `.gz` files are decompressed on the fly.
    #[arg(long, value_name = "PATH", conflicts_with = "synthetic")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "txt")]
    pub format: FormatArg,
    /// Generate the input instead: gnp:N:P, lattice3d:XxYxZ or rmat:SCALE:EDGE_FACTOR.
    #[arg(long, value_name = "KIND")]
    pub synthetic: Option<SyntheticKind>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    #[arg(long, value_enum, default_value = "none")]
    pub reorder: ReorderArg,
    #[arg(long, value_enum, default_value = "oriented")]
    pub collective_basis: BasisArg,
    /// Write the relabeling as a little-endian u32 array (new id of each old id).
    #[arg(long, value_name = "PATH")]
    pub emit_perm: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "vertex")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, default_value_t = 1)]
    pub chunk_size: usize,
    #[arg(long, default_value_t = 32)]
    pub buckets_small: usize,
    #[arg(long, default_value_t = 1024)]
    pub buckets_large: usize,
    #[arg(long, default_value_t = 128)]
    pub capacity: usize,
    /// Out-degree above which a vertex uses the large table.
    #[arg(long, default_value_t = 100)]
    pub large_threshold: usize,
    /// Vertices with out-degree below this are skipped.
    #[arg(long, default_value_t = 2)]
    pub skip_below: usize,
    #[arg(long, default_value_t = 32)]
    pub lane_small: usize,
    #[arg(long, default_value_t = 256)]
    pub lane_large: usize,

    /// Hash-partition the oriented graph into an N × N grid.
    #[arg(long, default_value_t = 1, value_name = "N")]
    pub grid: usize,
    /// Split every subtask's 1-hop list M ways.
    #[arg(long, default_value_t = 1, value_name = "M")]
    pub splits: usize,
    /// Write every grid part as binary CSR plus a manifest.
    #[arg(long, value_name = "DIR")]
    pub emit_partitions: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "json")]
    pub report: ReportArg,
    /// Run the count R times and report mean and min.
    #[arg(long, default_value_t = 1, value_name = "R")]
    pub repeat: usize,
    /// Include load, normalization and reordering in the reported time.
    #[arg(long)]
    pub time_all: bool,
}

impl CountArgs {
    pub fn report_format(&self) -> ReportFormat {
        match self.report {
            ReportArg::Json => ReportFormat::Json,
            ReportArg::Csv => ReportFormat::Csv,
        }
    }

    pub fn to_config(&self) -> Option<PipelineConfig> {
        let input = match (&self.input, self.synthetic) {
            (Some(path), _) => Input::File {
                path: path.clone(),
                format: self.format.into(),
            },
            (None, Some(kind)) => Input::Synthetic(SyntheticSpec::new(kind, self.seed)),
            (None, None) => return None,
        };
        let mut cfg = PipelineConfig::new(input);
        cfg.reorder = match self.reorder {
            ReorderArg::None => Reorder::None,
            ReorderArg::Degree => Reorder::Degree,
            ReorderArg::Indegree => Reorder::Indegree,
            ReorderArg::Collective => Reorder::Collective,
            ReorderArg::ThreeSubset => Reorder::ThreeSubset,
        };
        cfg.collective_basis = match self.collective_basis {
            BasisArg::Oriented => CollectiveBasis::Oriented,
            BasisArg::Original => CollectiveBasis::Original,
        };
        cfg.mode = match self.mode {
            ModeArg::Vertex => Mode::Vertex,
            ModeArg::Edge => Mode::Edge,
            ModeArg::Naive => Mode::Naive,
            ModeArg::Merge => Mode::Merge,
        };
        cfg.workers = self.workers;
        cfg.grid = self.grid;
        cfg.splits = self.splits;
        cfg.repeat = self.repeat;
        cfg.time_all = self.time_all;
        cfg.emit_perm = self.emit_perm.clone();
        cfg.emit_partitions = self.emit_partitions.clone();
        cfg.scheduler = SchedulerConfig {
            large_degree_threshold: self.large_threshold,
            skip_degree_below: self.skip_below,
            chunk_size: self.chunk_size,
            lane_width_small: self.lane_small,
            lane_width_large: self.lane_large,
            bucket_count_small: self.buckets_small,
            bucket_count_large: self.buckets_large,
            capacity: self.capacity,
        };
        Some(cfg)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum DatasetArg {
    CitPatents,
    Orkut,
    All,
}

#[derive(Debug, Args)]
pub struct FetchArgs {
    #[arg(long, value_enum, default_value = "cit-patents")]
    pub dataset: DatasetArg,
    #[arg(long, default_value = "data", value_name = "DIR")]
    pub dir: PathBuf,
    /// Expected SHA-256 (hex) of the downloaded archive; needs a single dataset.
    #[arg(long, value_name = "HEX")]
    pub sha256: Option<String>,
    /// Download again even if the file exists.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_name = "KIND")]
    pub synthetic: SyntheticKind,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_name = "PATH")]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value = "txt")]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    /// Directed edge count of the oriented graph.
    #[arg(long)]
    pub edges: usize,
    /// Per-worker memory budget in bytes.
    #[arg(long)]
    pub memory: usize,
    /// Bytes per stored edge.
    #[arg(long, default_value_t = 4)]
    pub edge_bytes: usize,
}
