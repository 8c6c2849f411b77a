//! `asl` — adaptive-sensing support-recovery experiments.
//!
//! Subcommands: `thresholds` (closed-form threshold report), `simulate`
//! (one configuration, trial CSV + summary JSON), `sweep` (signal-strength
//! grid), `compare` (two procedures on matched seeds).
//!
//! Exit codes: 0 success, 1 usage error, 2 configuration error.

use asl_core::harness::{self, ExperimentConfig, MuGridSpec, ProcedureId};
use asl_core::sensing::BudgetMode;
use asl_core::support::SupportClass;
use asl_core::theory;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "asl", version, about = "adaptive-sensing support recovery experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the threshold report for a class as JSON (or a flat CSV row).
    Thresholds(ThresholdArgs),
    /// Run one configuration; write per-trial CSV and a summary JSON.
    Simulate(RunArgs),
    /// Run a signal-strength grid; write the sweep JSON.
    Sweep(RunArgs),
    /// Run two procedures on matched seeds; emit paired deltas.
    Compare(CompareArgs),
}

#[derive(Args, Clone)]
struct ClassArgs {
    /// Class name: sset | intervals | stars | submatrix.
    #[arg(long)]
    class: Option<String>,
    /// Ambient dimension (sset, intervals).
    #[arg(long)]
    n: Option<usize>,
    /// Per-structure sparsity s.
    #[arg(long)]
    s: Option<usize>,
    /// Number of structures (intervals, stars).
    #[arg(long)]
    k: Option<usize>,
    /// Vertex count (stars).
    #[arg(long)]
    p: Option<usize>,
    /// Matrix rows (submatrix).
    #[arg(long)]
    nr: Option<usize>,
    /// Matrix columns (submatrix).
    #[arg(long)]
    nc: Option<usize>,
    /// Active rows (submatrix).
    #[arg(long)]
    sr: Option<usize>,
    /// Active columns (submatrix).
    #[arg(long)]
    sc: Option<usize>,
}

impl ClassArgs {
    fn build(&self) -> Result<Option<SupportClass>, String> {
        let Some(name) = &self.class else { return Ok(None) };
        let need = |field: &str, v: Option<usize>| {
            v.ok_or_else(|| format!("class.{field}: required for class '{name}'"))
        };
        let class = match name.as_str() {
            "sset" => SupportClass::Sset {
                n: need("n", self.n)?,
                s: need("s", self.s)?,
            },
            "intervals" => SupportClass::Intervals {
                n: need("n", self.n)?,
                s: need("s", self.s)?,
                k: self.k.unwrap_or(1),
            },
            "stars" => SupportClass::Stars {
                p: need("p", self.p)?,
                s: need("s", self.s)?,
                k: self.k.unwrap_or(1),
            },
            "submatrix" => SupportClass::Submatrix {
                n_r: need("nr", self.nr)?,
                n_c: need("nc", self.nc)?,
                s_r: need("sr", self.sr)?,
                s_c: need("sc", self.sc)?,
            },
            other => return Err(format!("class: unknown class '{other}'")),
        };
        Ok(Some(class))
    }
}

#[derive(Args)]
struct ThresholdArgs {
    #[command(flatten)]
    class: ClassArgs,
    /// Total sensing-energy budget.
    #[arg(long)]
    m: f64,
    /// Target expected symmetric difference.
    #[arg(long)]
    eps: f64,
    /// Optional working magnitude (enables the sample-complexity lower bound).
    #[arg(long)]
    mu: Option<f64>,
    /// Emit the flat CSV row instead of JSON.
    #[arg(long)]
    csv: bool,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// JSON configuration file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    class: ClassArgs,
    /// Procedure id (e.g. sset, cass_intervals, baseline).
    #[arg(long)]
    procedure: Option<String>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    /// Single signal magnitude (simulate).
    #[arg(long)]
    mu: Option<f64>,
    /// Grid spec: "0.5,1.0,2.0" absolute, or "xT:0.5,1.0" /
    /// "xprop2:0.5,1.0" for threshold multiples.
    #[arg(long)]
    mu_grid: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
    /// Seed; falls back to the ASL_SEED environment variable, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to available parallelism.
    #[arg(long)]
    jobs: Option<usize>,
    /// expected | hard.
    #[arg(long)]
    budget_mode: Option<String>,
    /// Hard-budget multiplier c (cap = c * m).
    #[arg(long)]
    hard_multiplier: Option<f64>,
    /// Calibration magnitude override.
    #[arg(long)]
    calibration_mu: Option<f64>,
    /// Output path prefix: writes <out>.json (and <out>_trials.csv for
    /// simulate). Defaults to stdout for the summary.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Second procedure id to compare against.
    #[arg(long)]
    procedure_b: String,
}

fn parse_mu_grid(spec: &str) -> Result<MuGridSpec, String> {
    let parse_list = |s: &str| -> Result<Vec<f64>, String> {
        s.split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|e| format!("mu_grid: {e}")))
            .collect()
    };
    if let Some(rest) = spec.strip_prefix('x') {
        let (name, list) = rest
            .split_once(':')
            .ok_or_else(|| "mu_grid: expected x<THRESHOLD>:v1,v2,...".to_string())?;
        let threshold = if name == "T" { None } else { Some(name.to_string()) };
        Ok(MuGridSpec::ThresholdMultiples { threshold, factors: parse_list(list)? })
    } else {
        Ok(MuGridSpec::Absolute { values: parse_list(spec)? })
    }
}

fn seed_fallback() -> u64 {
    std::env::var("ASL_SEED")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(0)
}

/// Merges a config file (if any) with flag overrides.
fn build_config(args: &RunArgs, single_mu: bool) -> Result<ExperimentConfig, String> {
    let mut config: Option<ExperimentConfig> = match &args.config {
        Some(path) => {
            let data = std::fs::read_to_string(path)
                .map_err(|e| format!("config: cannot read {}: {e}", path.display()))?;
            Some(serde_json::from_str(&data).map_err(|e| format!("config: {e}"))?)
        }
        None => None,
    };

    if let Some(class) = args.class.build()? {
        match &mut config {
            Some(c) => c.class = class,
            None => {
                config = Some(ExperimentConfig {
                    class,
                    procedure: ProcedureId::Sset,
                    m: 0.0,
                    epsilon: 0.1,
                    mu_grid: MuGridSpec::Absolute { values: vec![] },
                    trials: 1,
                    seed: seed_fallback(),
                    budget_mode: BudgetMode::Expected,
                    hard_budget_multiplier: 4.0,
                    calibration_mu: None,
                    fixed_support: None,
                });
            }
        }
    }
    let mut config = config.ok_or_else(|| "config: provide --config or --class".to_string())?;

    if let Some(p) = &args.procedure {
        config.procedure = ProcedureId::parse(p).map_err(|e| e.to_string())?;
    }
    if let Some(m) = args.m {
        config.m = m;
    }
    if let Some(eps) = args.eps {
        config.epsilon = eps;
    }
    if let Some(grid) = &args.mu_grid {
        config.mu_grid = parse_mu_grid(grid)?;
    }
    if let Some(mu) = args.mu {
        config.mu_grid = MuGridSpec::single(mu);
    }
    if let Some(t) = args.trials {
        config.trials = t;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    } else if args.config.is_none() {
        config.seed = seed_fallback();
    }
    if let Some(mode) = &args.budget_mode {
        config.budget_mode = match mode.as_str() {
            "expected" => BudgetMode::Expected,
            "hard" => BudgetMode::Hard,
            other => return Err(format!("budget_mode: unknown mode '{other}'")),
        };
    }
    if let Some(c) = args.hard_multiplier {
        config.hard_budget_multiplier = c;
    }
    if let Some(mu) = args.calibration_mu {
        config.calibration_mu = Some(mu);
    }
    if single_mu {
        if let MuGridSpec::Absolute { values } = &config.mu_grid {
            if values.len() != 1 {
                return Err("mu_grid: simulate takes exactly one mu (use --mu)".to_string());
            }
        }
    }
    config.validate().map_err(|e| e.to_string())?;
    Ok(config)
}

fn init_pool(jobs: Option<usize>) {
    if let Some(n) = jobs {
        // ignore the error if a global pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn write_or_print(out: &Option<PathBuf>, data: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, data).map_err(|e| format!("out: {e}")),
        None => {
            println!("{data}");
            Ok(())
        }
    }
}

fn cmd_thresholds(args: &ThresholdArgs) -> Result<(), String> {
    let class = args
        .class
        .build()?
        .ok_or_else(|| "class: required".to_string())?;
    let report =
        theory::evaluate(&class, args.m, args.eps, args.mu).map_err(|e| e.to_string())?;
    let text = if args.csv {
        theory::report_to_csv(&report)
    } else {
        serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?
    };
    write_or_print(&args.out, &text)
}

fn cmd_simulate(args: &RunArgs) -> Result<(), String> {
    init_pool(args.jobs);
    let config = build_config(args, true)?;
    let (summary, records) =
        harness::sweep_with_records(&config).map_err(|e| e.to_string())?;
    let json = serde_json::to_string_pretty(&summary).map_err(|e| e.to_string())?;
    let csv = harness::trials_to_csv(&records).map_err(|e| e.to_string())?;
    match &args.out {
        Some(prefix) => {
            let json_path = prefix.with_extension("json");
            let csv_path = {
                let mut name = prefix
                    .file_name()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "out".into());
                name.push_str("_trials.csv");
                prefix.with_file_name(name)
            };
            std::fs::write(&json_path, &json).map_err(|e| format!("out: {e}"))?;
            std::fs::write(&csv_path, &csv).map_err(|e| format!("out: {e}"))?;
        }
        None => println!("{json}"),
    }
    Ok(())
}

fn cmd_sweep(args: &RunArgs) -> Result<(), String> {
    init_pool(args.jobs);
    let config = build_config(args, false)?;
    let result = harness::sweep(&config).map_err(|e| e.to_string())?;
    let json = serde_json::to_string_pretty(&result).map_err(|e| e.to_string())?;
    write_or_print(&args.out.as_ref().map(|p| p.with_extension("json")), &json)
}

fn cmd_compare(args: &CompareArgs) -> Result<(), String> {
    init_pool(args.run.jobs);
    let config = build_config(&args.run, false)?;
    let proc_b = ProcedureId::parse(&args.procedure_b).map_err(|e| e.to_string())?;
    let result = harness::compare(&config, proc_b).map_err(|e| e.to_string())?;
    let json = serde_json::to_string_pretty(&result).map_err(|e| e.to_string())?;
    write_or_print(&args.run.out.as_ref().map(|p| p.with_extension("json")), &json)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are not usage errors
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let result = match &cli.command {
        Command::Thresholds(args) => cmd_thresholds(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Compare(args) => cmd_compare(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
