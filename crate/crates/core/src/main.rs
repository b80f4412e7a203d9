use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use netkit::boundary_layer::{solve_bleq, BLEQ_COEFF};
use netkit::harness::{self, ExperimentConfig, ParamValue, Report, Sweep};
use netkit::{NetError, Result};

#[derive(Parser)]
#[command(name = "netkit", version, about = "Narrow escape times through funnel-shaped bottlenecks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the asymptotic formula for a case.
    Predict(RunArgs),
    /// Monte Carlo estimate of the mean escape time.
    Simulate(RunArgs),
    /// Formula against simulation; exits 1 when a row fails the gate.
    Compare(RunArgs),
    /// Compare over a parameter sweep.
    Sweep(RunArgs),
    /// Solve the boundary-layer equation and print (xi, Y) pairs.
    Bleq(BleqArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment file; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    case: Option<String>,
    /// Geometry parameter as key=value; lists as key=v1,v2.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    n_paths: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_time: Option<f64>,
    /// Use the fixed step everywhere.
    #[arg(long)]
    no_adaptive: bool,
    #[arg(long)]
    refine_factor: Option<u32>,
    /// Worker threads (default: NETKIT_WORKERS or all cores).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    sweep_param: Option<String>,
    #[arg(long, value_delimiter = ',')]
    sweep_values: Vec<f64>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BleqArgs {
    #[arg(long, allow_hyphen_values = true)]
    y0: f64,
    #[arg(long, allow_hyphen_values = true)]
    dy0: f64,
    #[arg(long)]
    xi_max: f64,
    #[arg(long, default_value_t = BLEQ_COEFF)]
    coeff: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_param(s: &str) -> Result<(String, ParamValue)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| NetError::Config(format!("parameter '{s}' is not key=value")))?;
    let nums: Vec<f64> = v
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| NetError::Config(format!("bad number '{x}' in '{s}'"))))
        .collect::<Result<_>>()?;
    let value = if nums.len() == 1 { ParamValue::Num(nums[0]) } else { ParamValue::List(nums) };
    Ok((k.trim().to_string(), value))
}

fn build_config(a: &RunArgs) -> Result<ExperimentConfig> {
    let mut cfg = match (&a.config, &a.case) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(case)) => ExperimentConfig::new(case),
        (None, None) => return Err(NetError::Config("give --config or --case".into())),
    };
    if let Some(case) = &a.case {
        cfg.case = case.clone();
    }
    for p in &a.params {
        let (k, v) = parse_param(p)?;
        cfg.params.insert(k, v);
    }
    let sim = &mut cfg.sim;
    if let Some(v) = a.dt {
        sim.dt = v;
    }
    if let Some(v) = a.n_paths {
        sim.n_paths = v;
    }
    if let Some(v) = a.seed {
        sim.seed = v;
    }
    if let Some(v) = a.max_time {
        sim.max_time = v;
    }
    if a.no_adaptive {
        sim.adaptive = false;
    }
    if let Some(v) = a.refine_factor {
        sim.refine_factor = v;
    }
    if a.workers.is_some() {
        sim.workers = a.workers;
    }
    if let Some(param) = &a.sweep_param {
        cfg.sweep = Some(Sweep { param: param.clone(), values: a.sweep_values.clone() });
    } else if !a.sweep_values.is_empty() {
        return Err(NetError::Config("--sweep-values needs --sweep-param".into()));
    }
    if a.output.is_some() {
        cfg.output = a.output.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).map_err(|e| NetError::Io(format!("{}: {e}", p.display())))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit(cfg: &ExperimentConfig, rep: &Report) -> Result<()> {
    for n in &rep.notes {
        eprintln!("{n}");
    }
    harness::write_csv(&rep.rows, sink(&cfg.output)?)
}

fn compare(a: &RunArgs, is_sweep: bool) -> Result<bool> {
    let cfg = build_config(a)?;
    let cmp = if is_sweep { harness::sweep(&cfg)? } else { harness::compare(&cfg)? };
    emit(&cfg, &cmp.report)?;
    for (row, (ratio, z, ok)) in cmp.report.rows.iter().zip(&cmp.checks) {
        eprintln!(
            "{} {} eps={:?} ratio={ratio:.4} z={z:.2} {}",
            row.case,
            row.formula_id,
            row.epsilon_like,
            if *ok { "ok" } else { "FAIL" }
        );
    }
    Ok(cmp.passed())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Predict(a) => {
            let cfg = build_config(&a)?;
            emit(&cfg, &harness::predict(&cfg)?)?;
            Ok(true)
        }
        Command::Simulate(a) => {
            let cfg = build_config(&a)?;
            emit(&cfg, &harness::simulate(&cfg)?)?;
            Ok(true)
        }
        Command::Compare(a) => compare(&a, false),
        Command::Sweep(a) => compare(&a, true),
        Command::Bleq(b) => {
            let sol = solve_bleq(b.y0, b.dy0, b.xi_max, b.coeff)?;
            eprintln!(
                "asymptote {:.6} slope {:.3e} growing {} wronskian drift {:.2e}",
                sol.asymptote, sol.slope, sol.growing, sol.wronskian_drift
            );
            let mut out = sink(&b.output)?;
            out.write_all(sol.to_two_column().as_bytes())?;
            out.flush()?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
