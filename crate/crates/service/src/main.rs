use std::fs;
use std::io::{self, Read, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use insights_core::ingest::{load_corpus, InputFormat};
use insights_core::linker::{link_store, CitingReferences, LinkerConfig};
use insights_core::queryfilter::FilterSet;
use insights_core::store::Store;
use insights_core::topics::{summarize, train, TrainConfig, TOP_TERMS};
use insights_service::api::{run, AggregateRequest, Operation};
use insights_service::auth::SystemClock;
use insights_service::export::{render, ExportFormat};
use insights_service::{http, ServiceConfig};

#[derive(Parser)]
#[command(name = "insights", version, about = "Scholarly metadata analytics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct DataDir {
    #[arg(long, env = "INSIGHTS_DATA_DIR")]
    data_dir: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Load JSONL or CSV records into the store.
    Ingest {
        #[command(flatten)]
        dir: DataDir,
        /// Input file, or `-` for stdin.
        #[arg(long)]
        input: String,
        #[arg(long, default_value = "jsonl")]
        format: InputFormat,
        /// Where to write the ingest report; stdout if unset.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Resolve reference titles to publications and rebuild citation counts.
    Link {
        #[command(flatten)]
        dir: DataDir,
        /// JSONL of `{"id": ..., "references": [title, ...]}`.
        #[arg(long)]
        references: String,
        #[arg(long, default_value_t = 0.8)]
        min_similarity: f64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run the HTTP API.
    Serve {
        #[command(flatten)]
        config: ServiceConfig,
    },
    /// One aggregation, printed as JSON.
    Query {
        #[command(flatten)]
        dir: DataDir,
        operation: Operation,
        /// Request JSON, `@file`, or `-` for stdin.
        #[arg(long, default_value = "{}")]
        request: String,
    },
    /// Train a topic model on the filtered selection and print the result.
    Topics {
        #[command(flatten)]
        dir: DataDir,
        /// FilterSet JSON, `@file`, or `-` for stdin.
        #[arg(long, default_value = "{}")]
        filter: String,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// One aggregation as CSV or JSON rows.
    Export {
        #[command(flatten)]
        dir: DataDir,
        operation: Operation,
        #[arg(long, default_value = "csv")]
        format: ExportFormat,
        #[arg(long, default_value = "{}")]
        request: String,
        /// Output file; stdout if unset.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn open_input(path: &str) -> Result<Box<dyn Read>> {
    if path == "-" {
        return Ok(Box::new(io::stdin()));
    }
    Ok(Box::new(fs::File::open(path).with_context(|| format!("opening {path}"))?))
}

/// Inline text, `@file` or `-`.
fn argument_text(arg: &str) -> Result<String> {
    if arg == "-" || arg.starts_with('@') {
        let mut s = String::new();
        open_input(arg.strip_prefix('@').unwrap_or(arg))?.read_to_string(&mut s)?;
        return Ok(s);
    }
    Ok(arg.to_string())
}

fn emit(bytes: &[u8], path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)?;
            out.write_all(b"\n")?;
            Ok(())
        }
    }
}

fn open_store(dir: &DataDir) -> Result<Store> {
    Store::open(&dir.data_dir).with_context(|| format!("opening store at {}", dir.data_dir.display()))
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Ingest { dir, input, format, report } => {
            let store = open_store(&dir)?;
            let r = load_corpus(open_input(&input)?, format, &store)?;
            emit(&serde_json::to_vec_pretty(&r)?, report.as_deref())?;
        }
        Command::Link { dir, references, min_similarity, report } => {
            let cfg = LinkerConfig::new(min_similarity)?;
            let mut refs = Vec::new();
            let mut text = String::new();
            open_input(&references)?.read_to_string(&mut text)?;
            for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
                let r: CitingReferences =
                    serde_json::from_str(line).with_context(|| format!("references line {}", i + 1))?;
                refs.push(r);
            }
            let graph = link_store(&open_store(&dir)?, &refs, &cfg)?;
            let summary = serde_json::json!({
                "edges": graph.edges.len(),
                "total_references": graph.total_references,
                "unmatched_references": graph.unmatched_references,
                "self_references": graph.self_references,
                "duplicate_references": graph.duplicate_references,
                "external_fraction": graph.external_fraction(),
            });
            emit(&serde_json::to_vec_pretty(&summary)?, report.as_deref())?;
        }
        Command::Serve { config } => {
            let state = Arc::new(config.build(Arc::new(SystemClock))?);
            let addr = SocketAddr::from(([0, 0, 0, 0], config.port));
            eprintln!("listening on {addr}");
            tokio::runtime::Runtime::new()?.block_on(http::serve(state, addr))?;
        }
        Command::Query { dir, operation, request } => {
            let req = AggregateRequest::parse(argument_text(&request)?.as_bytes())?;
            let out = run(&open_store(&dir)?.snapshot(), operation, &req)?;
            emit(&out.to_json(), None)?;
        }
        Command::Topics { dir, filter, k, seed } => {
            let filter: FilterSet = serde_json::from_str(&argument_text(&filter)?).context("parsing filter")?;
            let store = open_store(&dir)?;
            let snap = store.snapshot();
            let docs: Vec<String> = snap.select(&filter)?.iter().map(|p| p.topic_text()).collect();
            if docs.is_empty() {
                bail!("the filter selects no publications");
            }
            let model = train(&docs, &TrainConfig::with_k(k, seed))?;
            emit(&serde_json::to_vec_pretty(&summarize(&model, TOP_TERMS))?, None)?;
        }
        Command::Export { dir, operation, format, request, output } => {
            let req = AggregateRequest::parse(argument_text(&request)?.as_bytes())?;
            let out = run(&open_store(&dir)?.snapshot(), operation, &req)?;
            emit(&render(&out, format), output.as_deref())?;
        }
    }
    Ok(())
}
