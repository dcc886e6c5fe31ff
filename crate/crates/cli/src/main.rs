mod artifacts;
mod config;
mod http;
mod viz;

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use itinbench::agent::prompts::PromptConfig;
use itinbench::agent::{run_react_episode, run_single_shot, ChatClient, MockClient, TaskSpec, ToolUseSummary};
use itinbench::dataset::{filter_pool, ingest_base, read_attributes_jsonl, read_businesses_jsonl};
use itinbench::exec::Execution;
use itinbench::metrics::{build_report, to_csv, EvaluationBatch, MetricError, MetricReport};
use itinbench::plan::{PlanFile, PlanSource, PoolMode};
use itinbench::querygen::{generate_queries, QueryRecord};
use itinbench::solvers::{plan_with_solver, SolverKind};
use itinbench::synth::synth_city;
use itinbench::{BusinessPool, PreferenceQuery};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use artifacts::*;
use config::RunConfig;

#[derive(Parser)]
#[command(name = "itinbench", version, about = "Itinerary-planning benchmark pipeline")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Root seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic city as raw business and attribute records.
    Synth {
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a candidate pool from raw records.
    Ingest {
        #[arg(long)]
        businesses: PathBuf,
        #[arg(long)]
        attributes: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample preference queries.
    GenQueries {
        #[arg(long)]
        first_seed: Option<u64>,
        #[arg(long)]
        count: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build plans with a baseline or exact solver.
    Solve {
        #[arg(long, default_value = "greedy")]
        solver: SolverKind,
        #[arg(long)]
        pool: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a model-backed planning task.
    Agent {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        task: u8,
        #[arg(long)]
        pool: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Replay scripted responses (query id -> responses) instead of a live endpoint.
        #[arg(long)]
        mock: Option<PathBuf>,
    },
    /// Score a directory of plans.
    Evaluate {
        #[arg(long)]
        pool: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        #[arg(long)]
        plans: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render evaluation results as a table.
    Report {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: ReportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a GeoJSON route figure for one plan.
    Viz {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        pool: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Csv,
    Json,
}

impl Command {
    fn stage(&self) -> &'static str {
        match self {
            Command::Synth { .. } => "synth",
            Command::Ingest { .. } => "ingest",
            Command::GenQueries { .. } => "gen-queries",
            Command::Solve { .. } => "solve",
            Command::Agent { .. } => "agent",
            Command::Evaluate { .. } => "evaluate",
            Command::Report { .. } => "report",
            Command::Viz { .. } => "viz",
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct EvaluationArtifact {
    config_hash: String,
    reports: Vec<MetricReport>,
}

fn source_name(s: PlanSource) -> String {
    serde_json::to_value(s).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_else(|| format!("{s:?}"))
}

fn load_queries(path: &Path) -> Result<Vec<PreferenceQuery>> {
    let art: QueryArtifact = read_json(path)?;
    Ok(art.queries.into_iter().map(|r| r.query).collect())
}

fn load_pool(path: &Path) -> Result<BusinessPool> {
    Ok(read_json::<PoolArtifact>(path)?.pool)
}

fn synth(cfg: &RunConfig, hash: &str, out: &Path) -> Result<()> {
    let city = synth_city(&cfg.synth);
    write_jsonl(&out.join("businesses.jsonl"), &city.businesses)?;
    write_jsonl(&out.join("attributes.jsonl"), &city.attributes)?;
    write_json(
        &out.join("manifest.json"),
        &json!({"config_hash": hash, "businesses": city.businesses.len(), "attributes": city.attributes.len()}),
    )
}

fn ingest(cfg: &RunConfig, hash: &str, businesses: &Path, attributes: &Path, out: &Path) -> Result<()> {
    let raw = read_businesses_jsonl(open_lines(businesses)?)?;
    let attrs = read_attributes_jsonl(open_lines(attributes)?)?;
    let (pool, report) = ingest_base(&raw, &attrs, &cfg.ingest)?;
    log::info!("ingested {} businesses ({} warnings)", pool.len(), report.warnings.len());
    write_json(out, &PoolArtifact { config_hash: hash.into(), report, pool })
}

fn gen_queries(cfg: &RunConfig, hash: &str, first: Option<u64>, count: Option<u64>, out: &Path) -> Result<()> {
    let first = first.unwrap_or(cfg.queries.first_seed);
    let count = count.unwrap_or(cfg.queries.count);
    let queries: Vec<QueryRecord> = generate_queries(first..first + count);
    write_json(out, &QueryArtifact { config_hash: hash.into(), queries })
}

fn plan_path(out: &Path, query_ref: &str, source: PlanSource) -> PathBuf {
    out.join(format!("{}.{}.json", slug(query_ref), source_name(source)))
}

fn solve(cfg: &RunConfig, hash: &str, kind: SolverKind, pool: &Path, queries: &Path, out: &Path) -> Result<()> {
    let pool = load_pool(pool)?;
    let queries = load_queries(queries)?;
    let results = Execution::Parallel.map(&queries, |q| -> Result<PlanFile> {
        let filtered = filter_pool(&pool, q, &cfg.metrics.filter)?;
        let plan = plan_with_solver(kind, &filtered, q).with_context(|| format!("query {}", q.id))?;
        Ok(PlanFile {
            query_ref: q.id.clone(),
            source: plan.source,
            pool_mode: PoolMode::Filtered,
            config_hash: Some(hash.into()),
            plan: plan.to_document(),
        })
    });
    for file in results {
        let file = file?;
        write_json(&plan_path(out, &file.query_ref, file.source), &file)?;
    }
    Ok(())
}

fn agent(cfg: &RunConfig, hash: &str, task: u8, pool: &Path, queries: &Path, out: &Path, mock: Option<&Path>) -> Result<()> {
    let spec = TaskSpec::for_task(task)?;
    let source = PlanSource::llm_task(task).ok_or_else(|| anyhow!("no plan source for task {task}"))?;
    let pool = load_pool(pool)?;
    let queries = load_queries(queries)?;
    let scripts: Option<HashMap<String, Vec<String>>> = mock.map(read_json).transpose()?;
    let live: Option<http::HttpClient> = if scripts.is_none() { Some(http::HttpClient::from_env()?) } else { None };
    let chat = &cfg.agent.chat;
    let prompt_cfg = PromptConfig { context_limit_bytes: cfg.agent.limits.context_limit_bytes, cluster_seed: cfg.seed };

    let client_for = |q: &PreferenceQuery| -> Box<dyn ChatClient + '_> {
        match (&scripts, &live) {
            (Some(s), _) => Box::new(MockClient::new(s.get(&q.id).cloned().unwrap_or_default())),
            (None, Some(l)) => Box::new(Ref(l)),
            (None, None) => unreachable!("a client is always configured"),
        }
    };
    let transcripts = out.join("transcripts");
    let write_plan = |q: &PreferenceQuery, plan: Option<Value>| -> Result<()> {
        if let Some(plan) = plan {
            let file = PlanFile { query_ref: q.id.clone(), source, pool_mode: spec.pool_mode, config_hash: Some(hash.into()), plan };
            write_json(&plan_path(out, &q.id, source), &file)?;
        }
        Ok(())
    };

    if spec.tool_use {
        let episodes = Execution::Parallel.map(&queries, |q| run_react_episode(q, &pool, client_for(q).as_ref(), chat, &cfg.agent.limits));
        for (q, ep) in queries.iter().zip(&episodes) {
            write_json(&transcripts.join(format!("{}.task{task}.json", slug(&q.id))), &json!({"config_hash": hash, "episode": ep}))?;
            write_plan(q, ep.plan.clone())?;
        }
        let summary = ToolUseSummary::new(&episodes, &queries);
        write_json(&out.join("tool_use.json"), &json!({"config_hash": hash, "summary": summary}))?;
    } else {
        let runs = Execution::Parallel.map(&queries, |q| {
            let visible = match spec.pool_mode {
                PoolMode::Full => pool.clone(),
                PoolMode::Filtered => filter_pool(&pool, q, &cfg.metrics.filter)?,
            };
            Ok::<_, anyhow::Error>(run_single_shot(&spec, q, &visible, client_for(q).as_ref(), chat, &prompt_cfg)?)
        });
        for (q, run) in queries.iter().zip(runs) {
            let run = run.with_context(|| format!("query {}", q.id))?;
            write_json(&transcripts.join(format!("{}.task{task}.json", slug(&q.id))), &json!({"config_hash": hash, "run": run}))?;
            write_plan(q, run.plan)?;
        }
    }
    Ok(())
}

/// Shares one live client across worker threads.
struct Ref<'a>(&'a http::HttpClient);

impl ChatClient for Ref<'_> {
    fn complete(&self, r: &itinbench::agent::ChatRequest) -> Result<String, itinbench::agent::TransportError> {
        self.0.complete(r)
    }
}

fn evaluate(cfg: &RunConfig, hash: &str, pool: &Path, queries: &Path, plans: &Path, out: &Path) -> Result<()> {
    let pool = load_pool(pool)?;
    let queries = load_queries(queries)?;
    let by_id: HashMap<&str, &PreferenceQuery> = queries.iter().map(|q| (q.id.as_str(), q)).collect();
    let files: Vec<PlanFile> = json_files(plans)?.iter().map(|p| read_json(p)).collect::<Result<_>>()?;
    if files.is_empty() {
        return Err(MetricError::EmptyBatch).with_context(|| format!("no plan files in {}", plans.display()));
    }

    let mut filtered: HashMap<&str, BusinessPool> = HashMap::new();
    for f in files.iter().filter(|f| f.pool_mode == PoolMode::Filtered) {
        let q = by_id.get(f.query_ref.as_str()).ok_or_else(|| anyhow!("plan for unknown query {}", f.query_ref))?;
        if !filtered.contains_key(q.id.as_str()) {
            filtered.insert(q.id.as_str(), filter_pool(&pool, q, &cfg.metrics.filter)?);
        }
    }

    let mut groups: BTreeMap<String, Vec<(itinbench::Itinerary, &PreferenceQuery, &BusinessPool)>> = BTreeMap::new();
    for f in &files {
        let q = *by_id.get(f.query_ref.as_str()).ok_or_else(|| anyhow!("plan for unknown query {}", f.query_ref))?;
        let seen = match f.pool_mode {
            PoolMode::Full => &pool,
            PoolMode::Filtered => &filtered[q.id.as_str()],
        };
        let plan = f.itinerary().with_context(|| format!("plan for {}", f.query_ref))?;
        groups.entry(source_name(f.source)).or_default().push((plan, q, seen));
    }

    let mut reports = Vec::new();
    for (label, items) in groups {
        let batch = EvaluationBatch::new(items, cfg.metrics.clone())?;
        let mut report = build_report(label, &batch, Execution::Parallel);
        report.config_hash = Some(hash.into());
        reports.push(report);
    }
    write_json(out, &EvaluationArtifact { config_hash: hash.into(), reports })
}

fn report(input: &Path, format: ReportFormat, out: Option<&Path>) -> Result<()> {
    let art: EvaluationArtifact = read_json(input)?;
    let text = match format {
        ReportFormat::Csv => to_csv(&art.reports),
        ReportFormat::Json => {
            let rows: Vec<Value> = art
                .reports
                .iter()
                .map(|r| {
                    let cells = r.table_row();
                    let row: serde_json::Map<String, Value> = itinbench::metrics::CSV_HEADER
                        .iter()
                        .zip(cells)
                        .map(|(h, c)| (h.to_string(), Value::String(c)))
                        .collect();
                    Value::Object(row)
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&json!({"config_hash": art.config_hash, "rows": rows}))?;
            s.push('\n');
            s
        }
    };
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn viz(cfg: &RunConfig, hash: &str, plan: &Path, pool: &Path, out: &Path) -> Result<()> {
    let file: PlanFile = read_json(plan)?;
    let itinerary = file.itinerary()?;
    let pool = load_pool(pool)?;
    let mut doc = viz::plan_geojson(&itinerary, &pool, cfg.seed);
    doc["config_hash"] = json!(hash);
    write_json(out, &doc)
}

fn run(cli: Cli) -> Result<()> {
    let cfg = RunConfig::load(cli.config.as_deref(), cli.seed)?;
    let hash = cfg.hash();
    match &cli.command {
        Command::Synth { out } => synth(&cfg, &hash, out),
        Command::Ingest { businesses, attributes, out } => ingest(&cfg, &hash, businesses, attributes, out),
        Command::GenQueries { first_seed, count, out } => gen_queries(&cfg, &hash, *first_seed, *count, out),
        Command::Solve { solver, pool, queries, out } => solve(&cfg, &hash, *solver, pool, queries, out),
        Command::Agent { task, pool, queries, out, mock } => agent(&cfg, &hash, *task, pool, queries, out, mock.as_deref()),
        Command::Evaluate { pool, queries, plans, out } => evaluate(&cfg, &hash, pool, queries, plans, out),
        Command::Report { input, format, out } => report(input, *format, out.as_deref()),
        Command::Viz { plan, pool, out } => viz(&cfg, &hash, plan, pool, out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let stage = cli.command.stage();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let causes: Vec<String> = e.chain().skip(1).map(|c| c.to_string()).collect();
            let body = json!({"stage": stage, "error": e.to_string(), "causes": causes});
            eprintln!("{body}");
            ExitCode::FAILURE
        }
    }
}
