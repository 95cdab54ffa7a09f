//! Command-line surface: `build`, `query <op>` and `serve`.

use std::collections::BTreeMap;
use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use semviz_core::{Engine, Index, Response, Route};
use serde_json::{Map, Value};

use crate::build::{self, BuildInputs};
use crate::server;

#[derive(Debug, Parser)]
#[command(name = "semviz", version, about = "Build, query and serve semantic relation indices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an index directory from relation dumps and article metadata.
    Build(BuildArgs),
    /// Run one query against an index and print the JSON result.
    Query(QueryArgs),
    /// Serve the HTTP API over an index.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Causal-assertion JSON-lines file (repeatable).
    #[arg(long)]
    pub ca: Vec<PathBuf>,
    /// Knowledge-graph JSON-lines file (repeatable).
    #[arg(long)]
    pub kg: Vec<PathBuf>,
    /// Article metadata CSV.
    #[arg(long)]
    pub meta: Option<PathBuf>,
    /// Relation taxonomy (TOML). Defaults to the built-in taxonomy.
    #[arg(long)]
    pub taxonomy: Option<PathBuf>,
    /// Alias table: `alias<TAB>canonical` per line.
    #[arg(long)]
    pub aliases: Option<PathBuf>,
    /// Stopword list, one per line.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Output index directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    /// Index directory or artifact file.
    #[arg(long, env = "SEMVIZ_INDEX", global = true)]
    pub index: Option<PathBuf>,
    #[command(subcommand)]
    pub op: QueryOp,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ContextArgs {
    /// Filter constraint `field=term` (repeatable; all must hold).
    #[arg(long = "filter", value_name = "FIELD=TERM")]
    pub filters: Vec<String>,
    /// Free-text constraint.
    #[arg(long)]
    pub text: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum QueryOp {
    /// Corpus totals.
    Stats,
    /// Top terms of a field.
    Tagcloud {
        #[command(flatten)]
        ctx: ContextArgs,
        #[arg(long)]
        field: String,
        #[arg(short = 'k', long)]
        k: Option<u64>,
        /// docs or articles.
        #[arg(long)]
        count_by: Option<String>,
        /// Functional type scoping the upstream_regulator fields.
        #[arg(long)]
        functional_type: Option<String>,
    },
    /// Co-occurrence matrix of two fields.
    Heatmap {
        #[command(flatten)]
        ctx: ContextArgs,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        kx: Option<u64>,
        #[arg(long)]
        ky: Option<u64>,
    },
    /// Evidence rows, paginated.
    Table {
        #[command(flatten)]
        ctx: ContextArgs,
        #[arg(long)]
        page: Option<u64>,
        #[arg(long)]
        page_size: Option<u64>,
    },
    /// Evidence and article counts.
    Metrics {
        #[command(flatten)]
        ctx: ContextArgs,
    },
    /// Publish-date histogram.
    Histogram {
        #[command(flatten)]
        ctx: ContextArgs,
        /// year or month.
        #[arg(long)]
        granularity: Option<String>,
    },
    /// List functional types.
    FunctionalTypes {
        #[arg(long)]
        limit: Option<u64>,
        #[arg(long)]
        offset: Option<u64>,
    },
    /// Upstream regulators of a functional type (name or id).
    Upstream { name: String },
    /// Opposite-polarity upstream regulators of a functional type.
    OppositeUpstream { name: String },
    /// Ranked regulators and bounded pathways ending at a target.
    Pathways {
        #[arg(long)]
        target: String,
        #[arg(long)]
        max_depth: Option<u64>,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(short = 'k', long)]
        k: Option<u64>,
        /// Comma-separated relation types (default Activation).
        #[arg(long)]
        relations: Option<String>,
        /// Keep only pathways starting at this entity and attach first-edge evidence.
        #[arg(long)]
        regulator: Option<String>,
        /// evidence_records or distinct_articles.
        #[arg(long)]
        rank_by: Option<String>,
    },
    /// One evidence document.
    Doc { id: String },
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, env = "SEMVIZ_INDEX")]
    pub index: PathBuf,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: IpAddr,
}

/// A query translated into the engine's request form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Request {
    pub route: Route,
    pub query: BTreeMap<String, String>,
    pub body: Vec<u8>,
}

fn context_body(ctx: &ContextArgs) -> Result<Map<String, Value>, String> {
    let mut body = Map::new();
    if !ctx.filters.is_empty() {
        let mut filters = Vec::new();
        for f in &ctx.filters {
            let (field, term) = f.split_once('=').ok_or_else(|| format!("--filter expects FIELD=TERM, got {f:?}"))?;
            filters.push(serde_json::json!({"field": field.trim(), "term": term}));
        }
        body.insert("filters".into(), Value::Array(filters));
    }
    if let Some(t) = &ctx.text {
        body.insert("text".into(), Value::String(t.clone()));
    }
    Ok(body)
}

fn put<T: Into<Value>>(map: &mut Map<String, Value>, key: &str, value: Option<T>) {
    if let Some(v) = value {
        map.insert(key.to_string(), v.into());
    }
}

fn put_query<T: ToString>(query: &mut BTreeMap<String, String>, key: &str, value: &Option<T>) {
    if let Some(v) = value {
        query.insert(key.to_string(), v.to_string());
    }
}

impl QueryOp {
    /// The equivalent HTTP request: POST body for aggregations, query
    /// parameters for GET endpoints.
    pub fn to_request(&self) -> Result<Request, String> {
        let mut query = BTreeMap::new();
        let post = |route: Route, body: Map<String, Value>| Request {
            route,
            query: BTreeMap::new(),
            body: serde_json::to_vec(&Value::Object(body)).unwrap(),
        };
        Ok(match self {
            QueryOp::Stats => Request { route: Route::Stats, query, body: Vec::new() },
            QueryOp::Tagcloud { ctx, field, k, count_by, functional_type } => {
                let mut b = context_body(ctx)?;
                b.insert("field".into(), field.clone().into());
                put(&mut b, "k", *k);
                put(&mut b, "count_by", count_by.clone());
                put(&mut b, "functional_type", functional_type.clone());
                post(Route::TagCloud, b)
            }
            QueryOp::Heatmap { ctx, x, y, kx, ky } => {
                let mut b = context_body(ctx)?;
                b.insert("x".into(), x.clone().into());
                b.insert("y".into(), y.clone().into());
                put(&mut b, "kx", *kx);
                put(&mut b, "ky", *ky);
                post(Route::HeatMap, b)
            }
            QueryOp::Table { ctx, page, page_size } => {
                let mut b = context_body(ctx)?;
                put(&mut b, "page", *page);
                put(&mut b, "page_size", *page_size);
                post(Route::Table, b)
            }
            QueryOp::Metrics { ctx } => post(Route::Metrics, context_body(ctx)?),
            QueryOp::Histogram { ctx, granularity } => {
                let mut b = context_body(ctx)?;
                put(&mut b, "granularity", granularity.clone());
                post(Route::Histogram, b)
            }
            QueryOp::FunctionalTypes { limit, offset } => {
                put_query(&mut query, "limit", limit);
                put_query(&mut query, "offset", offset);
                Request { route: Route::FunctionalTypes, query, body: Vec::new() }
            }
            QueryOp::Upstream { name } => Request { route: Route::Upstream(name.clone()), query, body: Vec::new() },
            QueryOp::OppositeUpstream { name } => {
                Request { route: Route::OppositeUpstream(name.clone()), query, body: Vec::new() }
            }
            QueryOp::Pathways { target, max_depth, budget, k, relations, regulator, rank_by } => {
                query.insert("target".into(), target.clone());
                put_query(&mut query, "max_depth", max_depth);
                put_query(&mut query, "budget", budget);
                put_query(&mut query, "k", k);
                put_query(&mut query, "relations", relations);
                put_query(&mut query, "regulator", regulator);
                put_query(&mut query, "rank_by", rank_by);
                Request { route: Route::Pathways, query, body: Vec::new() }
            }
            QueryOp::Doc { id } => Request { route: Route::Doc(id.clone()), query, body: Vec::new() },
        })
    }
}

pub fn run_query(engine: &Engine, op: &QueryOp) -> Result<Response, String> {
    let req = op.to_request()?;
    Ok(engine.handle(&req.route, &req.query, &req.body))
}

fn load_engine(path: &std::path::Path) -> Result<Engine, String> {
    let index = Index::load(path).map_err(|e| format!("cannot load index: {e}"))?;
    Ok(Engine::new(Arc::new(index)))
}

/// Executes a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> ExitCode {
    match cli.command {
        Command::Build(a) => {
            let inputs = BuildInputs {
                ca: a.ca,
                kg: a.kg,
                meta: a.meta,
                taxonomy: a.taxonomy,
                aliases: a.aliases,
                stopwords: a.stopwords,
                out: a.out,
            };
            match build::run(&inputs) {
                Ok(report) => {
                    for w in &report.warnings {
                        tracing::warn!("{w}");
                    }
                    eprintln!(
                        "indexed {} records, {} evidence docs ({} aligned), {} articles, {} functional types; {} rejected lines",
                        report.records,
                        report.docs,
                        report.aligned_docs,
                        report.articles,
                        report.functional_types,
                        report.rejects.len()
                    );
                    ExitCode::SUCCESS
                }
                Err(f) => {
                    eprintln!("error: {}", f.message);
                    ExitCode::from(f.exit_code)
                }
            }
        }
        Command::Query(q) => {
            let Some(path) = q.index else {
                eprintln!("error: --index (or SEMVIZ_INDEX) is required");
                return ExitCode::from(2);
            };
            let engine = match load_engine(&path) {
                Ok(e) => e,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    return ExitCode::from(1);
                }
            };
            match run_query(&engine, &q.op) {
                Ok(resp) => {
                    println!("{}", String::from_utf8_lossy(&resp.body));
                    if resp.status == 200 {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(msg) => {
                    eprintln!("error: {msg}");
                    ExitCode::from(2)
                }
            }
        }
        Command::Serve(s) => {
            let engine = match load_engine(&s.index) {
                Ok(e) => Arc::new(e),
                Err(msg) => {
                    eprintln!("error: {msg}");
                    return ExitCode::from(1);
                }
            };
            let runtime = match tokio::runtime::Runtime::new() {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: cannot start runtime: {e}");
                    return ExitCode::from(1);
                }
            };
            match runtime.block_on(server::serve(engine, SocketAddr::new(s.host, s.port))) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
    }
}
