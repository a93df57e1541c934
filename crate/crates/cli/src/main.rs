mod args;
mod fetch;

use std::fs::File;
use std::io::{BufWriter, ErrorKind, Write};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use tricount::graph_io::{write_edge_list_binary, EdgeFormat};
use tricount::partition::min_grid_for_memory;
use tricount::pipeline::run_pipeline;
use tricount::synthetic::{generate_synthetic, SyntheticSpec};

use args::{Cli, Command, CountArgs, GenerateArgs, PlanArgs};

fn count(args: &CountArgs) -> Result<()> {
    let Some(cfg) = args.to_config() else {
        anyhow::bail!("[config] one of --input or --synthetic is required (see --help)");
    };
    let report = run_pipeline(&cfg)?;
    let mut text = report.render(args.report_format())?;
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn generate(args: &GenerateArgs) -> Result<()> {
    let edges = generate_synthetic(&SyntheticSpec::new(args.synthetic, args.seed));
    let file = File::create(&args.output)
        .with_context(|| format!("creating {}", args.output.display()))?;
    match EdgeFormat::from(args.format) {
        EdgeFormat::Binary => write_edge_list_binary(&edges, file)?,
        EdgeFormat::Text => {
            let mut out = BufWriter::new(file);
            writeln!(out, "# {} seed {}", args.synthetic, args.seed)?;
            for (u, v) in &edges.edges {
                writeln!(out, "{u}\t{v}")?;
            }
            out.flush()?;
        }
    }
    eprintln!(
        "wrote {} edges to {}",
        edges.edges.len(),
        args.output.display()
    );
    Ok(())
}

fn plan(args: &PlanArgs) {
    println!(
        "{}",
        min_grid_for_memory(args.edges, args.edge_bytes, args.memory)
    );
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Some(Command::Count(a)) => count(a),
        Some(Command::FetchDatasets(a)) => {
            fetch::fetch(a).map_err(|e| anyhow::anyhow!("[fetch] {e:#}"))
        }
        Some(Command::Generate(a)) => generate(a),
        Some(Command::PlanGrid(a)) => {
            plan(a);
            Ok(())
        }
        None => count(&cli.count),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // stage-tagged messages already embed their cause
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
