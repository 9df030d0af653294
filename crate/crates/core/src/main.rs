use clap::{Parser, Subcommand};
use gdlm::bench::{load_graphs, FileFormat};
use gdlm::config::ExperimentConfig;
use gdlm::error::{Error, Result};
use gdlm::eval::read_records;
use gdlm::layout::{improve_drawing, layout_force_directed, layout_orthogonal, quality_report};
use gdlm::render::{rasterize, render_svg, RenderStyle};
use gdlm::runner::{emit_report, generate_benchmark, run_experiment, BenchGenSpec, RunOptions};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

/// Evaluation harness for multimodal LLMs on graph-structure tasks.
#[derive(Parser)]
#[command(name = "gdlm", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override the configured backend: mock, replay, or http.
        #[arg(long)]
        backend: Option<String>,
        /// Reuse existing records when they cover the full job set.
        #[arg(long)]
        resume: bool,
        /// Allow live paid provider calls.
        #[arg(long)]
        allow_spend: bool,
    },
    /// Re-aggregate a records file into report tables.
    Report {
        /// records.jsonl file, or a directory containing one.
        #[arg(long)]
        records: PathBuf,
        /// Output directory; defaults to <records dir>/report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate one of the four benchmarks from a spec file.
    GenBench {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Lay out and render a single graph file.
    Render {
        #[arg(long)]
        graph: PathBuf,
        /// straight-line, orthogonal, or improved.
        #[arg(long, default_value = "straight-line")]
        paradigm: String,
        #[arg(long, default_value = "graph6")]
        format: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory for svg/png/drawing files.
        #[arg(long, default_value = "render-out")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(failures) if failures == 0 => ExitCode::SUCCESS,
        Ok(failures) => {
            eprintln!("completed with {failures} failed jobs");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<usize> {
    match cli.command {
        Command::Run { config, backend, resume, allow_spend } => {
            let config = ExperimentConfig::load(&config)?;
            let options = RunOptions {
                backend_override: backend,
                resume,
                allow_spend,
            };
            let summary = run_experiment(&config, &options)?;
            println!(
                "{} records ({} expected), {} live calls, {} cache hits, {} failures",
                summary.records,
                summary.expected_records,
                summary.live_calls,
                summary.cache_hits,
                summary.failures
            );
            println!("output: {}", summary.output_dir.display());
            Ok(summary.failures)
        }
        Command::Report { records, out } => {
            let records_file = if records.is_dir() {
                records.join("records.jsonl")
            } else {
                records.clone()
            };
            let loaded = read_records(&records_file)?;
            let out = out.unwrap_or_else(|| {
                records_file
                    .parent()
                    .unwrap_or(std::path::Path::new("."))
                    .join("report")
            });
            let written = emit_report(&loaded, &out)?;
            for path in written {
                println!("wrote {}", path.display());
            }
            Ok(0)
        }
        Command::GenBench { spec } => {
            let spec = BenchGenSpec::load(&spec)?;
            let manifest = generate_benchmark(&spec)?;
            println!(
                "generated {} ({} graphs) in {}",
                manifest.name,
                manifest.entries.len(),
                spec.out_dir.display()
            );
            Ok(0)
        }
        Command::Render { graph, paradigm, format, seed, out } => {
            let format = FileFormat::from_str(&format)?;
            let graphs = load_graphs(&graph, format)?;
            if graphs.is_empty() {
                return Err(Error::Config(format!("no graphs in {}", graph.display())));
            }
            std::fs::create_dir_all(&out).map_err(|e| Error::file(&out, e))?;
            let style = RenderStyle::default();
            for (i, g) in graphs.iter().enumerate() {
                let drawing = match paradigm.as_str() {
                    "straight-line" | "sl" => layout_force_directed(g, 500, seed)?,
                    "orthogonal" | "or" => layout_orthogonal(g, seed)?,
                    "improved" | "i-sl" => {
                        let base = layout_force_directed(g, 500, seed)?;
                        improve_drawing(&base, 400, seed)?
                    }
                    other => {
                        return Err(Error::Config(format!(
                            "unknown paradigm '{other}' (straight-line, orthogonal, improved)"
                        )))
                    }
                };
                let doc = render_svg(&drawing, &style)?;
                let stem = format!("graph{i:02}-{paradigm}");
                let svg_path = out.join(format!("{stem}.svg"));
                std::fs::write(&svg_path, doc.to_svg_string())
                    .map_err(|e| Error::file(&svg_path, e))?;
                let png_path = out.join(format!("{stem}.png"));
                std::fs::write(&png_path, rasterize(&doc, &style)?)
                    .map_err(|e| Error::file(&png_path, e))?;
                let toml_path = out.join(format!("{stem}.toml"));
                drawing.save(&toml_path)?;
                let q = quality_report(&drawing);
                println!(
                    "{}: n={} m={} crossings={} min_node_distance={:.2} angular_resolution={:.3} edge_length_cv={:.3}",
                    stem,
                    g.node_count(),
                    g.edge_count(),
                    q.crossings,
                    q.min_node_distance,
                    q.angular_resolution,
                    q.edge_length_cv
                );
                println!("wrote {} / .png / .toml", svg_path.display());
            }
            Ok(0)
        }
    }
}
