use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use facetjoint_core::joint::{Ontology, ReaderState};
use facetjoint_service::engine::{evaluate, parse_script, resolve_headless};
use facetjoint_service::eval::{compute_stats, parse_log};
use facetjoint_service::formats::{parse_taxonomy, query_tags, DEFAULT_TAXONOMY};
use facetjoint_service::{http, Engine, Snapshot};
use parking_lot::Mutex;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "facetjoint",
    version,
    about = "Faceted folksonomy semantic search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CorpusArgs {
    /// Contributions file (TSV).
    #[arg(long)]
    corpus: PathBuf,
    /// Taxonomy file; the bundled one is used when omitted.
    #[arg(long)]
    taxonomy: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Build a snapshot and print its summary.
    Ingest(CorpusArgs),
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        taxonomy: Option<PathBuf>,
        /// Append the query log to this JSONL file.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Run one query without a reader in the loop.
    Query {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Take the top option when a collapse is required.
        #[arg(long)]
        auto_collapse: bool,
        /// Option id to keep when a collapse is required.
        #[arg(long)]
        choose: Option<String>,
        /// Restrict results to one facet.
        #[arg(long)]
        refine: Option<String>,
        #[arg(required = true)]
        text: Vec<String>,
    },
    /// Precision and recall against a judgments file.
    Eval {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        judgments: PathBuf,
    },
    /// Usage statistics from a query log.
    Stats {
        #[arg(long)]
        log: PathBuf,
        /// Corpus used to report lattice nodes per context.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        taxonomy: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Replay a script of query/refine/collapse steps, one JSON line each.
    Replay {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        script: PathBuf,
        #[arg(long, default_value = "replay")]
        reader: String,
    },
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_ontology(path: Option<&Path>) -> anyhow::Result<Arc<Ontology>> {
    let text = match path {
        Some(p) => read(p)?,
        None => DEFAULT_TAXONOMY.to_owned(),
    };
    Ok(Arc::new(parse_taxonomy(&text)?))
}

fn load_snapshot(args: &CorpusArgs) -> anyhow::Result<Snapshot> {
    let ontology = load_ontology(args.taxonomy.as_deref())?;
    Ok(Snapshot::from_text(&read(&args.corpus)?, ontology)?)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Ingest(args) => {
            let snapshot = load_snapshot(&args)?;
            println!("{}", serde_json::to_string_pretty(&snapshot.info())?);
        }
        Command::Serve {
            port,
            corpus,
            taxonomy,
            log,
        } => {
            let mut engine = Engine::new(load_ontology(taxonomy.as_deref())?);
            if let Some(path) = log {
                engine = engine.with_log_file(path);
            }
            if let Some(path) = corpus {
                let info = engine.ingest_text(&read(&path)?)?;
                tracing::info!(snapshot = %info.snapshot_id, "corpus loaded");
            }
            let app = http::router(Arc::new(Mutex::new(engine)));
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await?;
                tracing::info!(port, "listening");
                axum::serve(listener, app).await
            })?;
        }
        Command::Query {
            corpus,
            auto_collapse,
            choose,
            refine,
            text,
        } => {
            let snapshot = load_snapshot(&corpus)?;
            let text = text.join(" ");
            let tags = query_tags(&text);
            let mut state = ReaderState::default();
            let facet = refine.as_deref().map(facetjoint_core::label::normalize);
            let results = if auto_collapse || choose.is_some() {
                resolve_headless(
                    &snapshot.index,
                    &tags,
                    facet.as_deref(),
                    &mut state,
                    choose.as_deref(),
                )?
            } else {
                match facetjoint_core::joint::resolve_query(
                    &snapshot.index,
                    &tags,
                    facet.as_deref(),
                    &mut state,
                )? {
                    facetjoint_core::joint::Resolution::Ranked { results, .. } => results,
                    facetjoint_core::joint::Resolution::CollapseRequired(choice) => {
                        let out = json!({
                            "snapshot_id": snapshot.id,
                            "status": "collapse_required",
                            "options": choice.options,
                        });
                        println!("{}", serde_json::to_string_pretty(&out)?);
                        return Ok(());
                    }
                }
            };
            let out = json!({
                "snapshot_id": snapshot.id,
                "status": "ok",
                "query": text,
                "tags": tags,
                "facet": facet,
                "results": results,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Command::Eval { corpus, judgments } => {
            let snapshot = load_snapshot(&corpus)?;
            let report = evaluate(&snapshot, &read(&judgments)?)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Stats {
            log,
            corpus,
            taxonomy,
            json,
        } => {
            let entries = parse_log(&read(&log)?)?;
            let nodes = match corpus {
                Some(path) => {
                    let args = CorpusArgs {
                        corpus: path,
                        taxonomy,
                    };
                    Some(load_snapshot(&args)?.mean_nodes_per_context())
                }
                None => None,
            };
            let stats = compute_stats(&entries, nodes)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&stats)?);
            } else {
                print!("{}", stats.to_text());
            }
        }
        Command::Replay {
            corpus,
            script,
            reader,
        } => {
            let mut engine = Engine::new(load_ontology(corpus.taxonomy.as_deref())?);
            engine.ingest_text(&read(&corpus.corpus)?)?;
            let session = engine.create_session(&reader, None)?.session_id;
            for step in parse_script(&read(&script)?)? {
                let response = engine.run_step(&session, &step)?;
                println!("{}", serde_json::to_string(&response)?);
            }
        }
    }
    Ok(())
}

fn main() {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::from_default_env())
        .with_writer(std::io::stderr)
        .init();
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
