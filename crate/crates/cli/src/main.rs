use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use comprestree::experiment::{self, ExperimentConfig};
use comprestree::netgraph::{self, Corner};
use comprestree::oracle::OracleBudget;
use comprestree::par;
use comprestree::verify::{self, VerifyOptions};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "comprestree", version, about = "Compression-tree data gathering experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a network file.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Run an experiment config and write its tables.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override the CSV output path.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Override the JSON output path.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Receiving energy per bit, relative to sending.
        #[arg(long)]
        rx_cost: Option<f64>,
    },
    /// Check shipped fixtures and compare algorithms with exact oracles.
    Verify {
        /// Largest random instance, in sensors.
        #[arg(long, default_value_t = 6)]
        budget: usize,
        #[arg(long, default_value_t = 8)]
        instances: usize,
        /// Extra cost fixture files.
        #[arg(long)]
        fixture: Vec<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GenKind {
    Grid(GridArgs),
    Random(RandomArgs),
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    rows: usize,
    #[arg(long)]
    cols: usize,
    #[arg(long, default_value_t = 1.0)]
    spacing: f64,
    /// Defaults to the spacing (four-neighbor links).
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long, value_enum, default_value = "lower-left")]
    corner: CornerArg,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RandomArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 200.0)]
    w: f64,
    #[arg(long, default_value_t = 200.0)]
    h: f64,
    #[arg(long, default_value_t = 30.0)]
    radius: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum CornerArg {
    LowerLeft,
    LowerRight,
    UpperLeft,
    UpperRight,
}

impl From<CornerArg> for Corner {
    fn from(c: CornerArg) -> Corner {
        match c {
            CornerArg::LowerLeft => Corner::LowerLeft,
            CornerArg::LowerRight => Corner::LowerRight,
            CornerArg::UpperLeft => Corner::UpperLeft,
            CornerArg::UpperRight => Corner::UpperRight,
        }
    }
}

fn threads() -> Option<usize> {
    std::env::var("COMPRESTREE_THREADS").ok()?.parse().ok()
}

fn write_or_print(out: Option<&PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn gen(kind: GenKind) -> Result<(), String> {
    let (net, out) = match kind {
        GenKind::Grid(a) => {
            let net = netgraph::gen_grid(a.rows, a.cols, a.spacing, a.radius.unwrap_or(a.spacing), a.corner.into());
            (net, a.out)
        }
        GenKind::Random(a) => (netgraph::gen_random(a.n, a.w, a.h, a.radius, a.seed), a.out),
    };
    let net = net.map_err(|e| e.to_string())?;
    write_or_print(out.as_ref(), &net.to_json_string())
}

fn run(config: PathBuf, csv: Option<PathBuf>, json: Option<PathBuf>, rx_cost: Option<f64>) -> Result<bool, String> {
    let mut cfg = ExperimentConfig::load(&config).map_err(|e| format!("{}: {e}", config.display()))?;
    if csv.is_some() {
        cfg.output.csv = csv;
    }
    if json.is_some() {
        cfg.output.json = json;
    }
    if let Some(rx) = rx_cost {
        cfg.rx_cost = rx;
    }
    let report = experiment::run(&cfg).map_err(|e| e.to_string())?;
    report.write_outputs().map_err(|e| e.to_string())?;
    if cfg.output.csv.is_none() {
        print!("{}", report.csv_string());
    }
    for r in report.failures() {
        eprintln!(
            "{} seed {} sweep {:?}: {}",
            r.method.name(),
            r.seed.map_or("-".into(), |s| s.to_string()),
            r.sweep,
            r.error.as_deref().unwrap_or("")
        );
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = par::with_threads(threads(), || match cli.cmd {
        Cmd::Gen { kind } => gen(kind).map(|_| true),
        Cmd::Run { config, csv, json, rx_cost } => run(config, csv, json, rx_cost),
        Cmd::Verify { budget, instances, fixture } => {
            let opts = VerifyOptions { max_sensors: budget, instances, fixtures: fixture, budget: OracleBudget::default() };
            let rep = verify::run_suite(&opts);
            print!("{}", rep.render());
            Ok(rep.ok())
        }
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
