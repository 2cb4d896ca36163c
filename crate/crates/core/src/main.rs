use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use clap::{Args, Parser, Subcommand};

use mutualspace::config::RunConfig;
use mutualspace::corpus::{self, Corpus};
use mutualspace::evaluation::{aggregate, format_table, report_csv, run_sweep, Condition, Sweep};
use mutualspace::floorplan::{Context, Floorplan};
use mutualspace::pipeline::{run_method, MatchCache, Method};
use mutualspace::render::{render_plan, render_scene, Scene};

#[derive(Parser)]
#[command(
    name = "mutualspace",
    version,
    about = "Mutual-space generation for multi-client mixed-reality telepresence"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Optimizer seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, env = "MUTUALSPACE_OUT")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Match client plans onto a host plan and write the mutual space.
    Match {
        host: PathBuf,
        #[arg(required = true)]
        clients: Vec<PathBuf>,
        #[arg(long)]
        context: Option<Context>,
        #[arg(long)]
        method: Option<Method>,
        #[arg(long)]
        n_hosts: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the method sweep over a corpus and write a CSV report.
    Evaluate {
        /// Corpus directory; the bundled corpus when omitted.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long = "methods", alias = "method", value_delimiter = ',')]
        methods: Vec<Method>,
        #[arg(long, value_delimiter = ',')]
        conditions: Vec<Condition>,
        #[arg(long, value_delimiter = ',')]
        n_hosts: Vec<usize>,
        /// Worker threads.
        #[arg(long)]
        jobs: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Render a match output or a floorplan as SVG.
    Render {
        input: PathBuf,
        /// Destination; defaults to the input path with an .svg extension.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write the authored corpus.
    GenCorpus {
        #[arg(long, default_value = "corpus")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the effective configuration.
    PrintConfig {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

/// Input problems exit with 1; algorithmic failures with 2.
enum Outcome {
    Done,
    Failed,
}

fn load_config(common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.matching.seed = s;
    }
    if let Some(o) = &common.out {
        cfg.out_dir = o.clone();
    }
    Ok(cfg)
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn cmd_match(
    host: &Path,
    clients: &[PathBuf],
    context: Option<Context>,
    method: Option<Method>,
    n_hosts: Option<usize>,
    common: &Common,
) -> Result<Outcome> {
    let mut cfg = load_config(common)?;
    cfg.context = context.or(cfg.context);
    cfg.method = method.or(cfg.method);
    if let Some(n) = n_hosts {
        cfg.placement.n_hosts = n;
    }
    cfg.validate()?;
    let host = Floorplan::load(host)?;
    let clients = clients.iter().map(Floorplan::load).collect::<Result<Vec<_>, _>>()?;
    let method = cfg.resolved_method();
    let outcome = run_method(method, &host, &clients, cfg.placement.n_hosts, &cfg, &MatchCache::new());
    let ok = outcome.success;
    let scene = Scene { host, clients, outcome };
    let json = cfg.out_dir.join("mutual-space.json");
    let svg = cfg.out_dir.join("mutual-space.svg");
    write(&json, &(serde_json::to_string_pretty(&scene)? + "\n"))?;
    write(&svg, &render_scene(&scene))?;
    println!("{method}: {}", if ok { "success" } else { "failed" });
    if let Some(why) = &scene.outcome.failure {
        println!("  {why}");
    }
    let m = &scene.outcome.metrics;
    if ok {
        println!(
            "  total interactable {:.2} m², total obstacle {:.2} m²",
            m.total_interactable, m.total_obstacle
        );
    }
    println!("  wrote {} and {}", json.display(), svg.display());
    Ok(if ok { Outcome::Done } else { Outcome::Failed })
}

fn cmd_evaluate(
    corpus: Option<&Path>,
    methods: Vec<Method>,
    conditions: Vec<Condition>,
    n_hosts: Vec<usize>,
    jobs: Option<usize>,
    common: &Common,
) -> Result<Outcome> {
    let cfg = load_config(common)?;
    let corpus = match corpus {
        Some(dir) => Corpus::load(dir)?,
        None => Corpus::bundled(),
    };
    corpus.check_shape()?;
    if n_hosts.iter().any(|h| !(1..=3).contains(h)) {
        bail!("--n-hosts values must be 1, 2 or 3");
    }
    let defaults = Sweep::default();
    let sweep = Sweep {
        methods: if methods.is_empty() { defaults.methods } else { methods },
        conditions: if conditions.is_empty() {
            defaults.conditions
        } else {
            conditions
        },
        host_counts: if n_hosts.is_empty() {
            defaults.host_counts
        } else {
            n_hosts
        },
        out_dir: Some(cfg.out_dir.clone()),
        jobs,
    };
    let records = run_sweep(&corpus, &sweep, &cfg, &MatchCache::new())?;
    let rows = aggregate(&records);
    let csv = cfg.out_dir.join("report.csv");
    report_csv(&rows, &csv)?;
    print!("{}", format_table(&rows));
    println!("wrote {}", csv.display());
    Ok(Outcome::Done)
}

fn cmd_render(input: &Path, output: Option<&Path>) -> Result<Outcome> {
    let text = std::fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let svg = match serde_json::from_str::<Scene>(&text) {
        Ok(scene) => render_scene(&scene),
        Err(scene_err) => match Floorplan::from_json(&text) {
            Ok(fp) => render_plan(&fp),
            Err(_) => bail!(
                "{} is neither a match output nor a floorplan: {scene_err}",
                input.display()
            ),
        },
    };
    let out = output
        .map(Path::to_path_buf)
        .unwrap_or_else(|| input.with_extension("svg"));
    write(&out, &svg)?;
    println!("wrote {}", out.display());
    Ok(Outcome::Done)
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Match {
            host,
            clients,
            context,
            method,
            n_hosts,
            common,
        } => cmd_match(&host, &clients, context, method, n_hosts, &common),
        Command::Evaluate {
            corpus,
            methods,
            conditions,
            n_hosts,
            jobs,
            common,
        } => cmd_evaluate(corpus.as_deref(), methods, conditions, n_hosts, jobs, &common),
        Command::Render { input, output } => cmd_render(&input, output.as_deref()),
        Command::GenCorpus { out, seed } => {
            corpus::generate(seed).save(&out)?;
            println!("wrote 14 plans to {}", out.display());
            Ok(Outcome::Done)
        }
        Command::PrintConfig { config } => {
            let cfg = match config {
                Some(p) => RunConfig::load(p)?,
                None => RunConfig::default(),
            };
            println!("{}", cfg.to_json());
            Ok(Outcome::Done)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
