use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;

use dynmirror::dynamics::{audit_contraction, network_family, shift_family_with, Boundary};
use dynmirror::experiments::output::evaluate_trace;
use dynmirror::experiments::{
    read_loss_trace, run_scenario, save_votes, video_setup, votes_setup, write_bundle, ConfigMap, ResultBundle,
};
use dynmirror::geometry::{BregmanGeometry, FeasibleSet};
use dynmirror::{Execution, Shape};

#[derive(Parser)]
#[command(name = "dynmirror", version, about = "Dynamic mirror descent and dynamic fixed share experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compressive video reconstruction with a family of shift models.
    RunVideo(VideoArgs),
    /// Influence-network tracking from roll-call votes.
    RunVotes(VotesArgs),
    /// Recompute regret and the best switching sequence from a saved losses.csv.
    EvalRegret(EvalArgs),
    /// Sampled contraction audit of a model family.
    AuditDynamics(AuditArgs),
}

/// Options shared by both run commands. Every flag overrides the config key
/// of the same name.
#[derive(Args)]
struct RunArgs {
    /// Flat key = value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra `key=value` override (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long)]
    tau: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    eta_r: Option<String>,
    /// constant | doubling
    #[arg(long)]
    schedule: Option<String>,
    #[arg(long)]
    reg_period: Option<u64>,
    #[arg(long)]
    switch_budget: Option<usize>,
    /// parallel | sequential
    #[arg(long)]
    execution: Option<String>,
    #[arg(long)]
    ma_window: Option<usize>,
    #[arg(long)]
    snapshot_every: Option<u64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct VideoArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    #[arg(long)]
    block: Option<usize>,
    /// Legs as `start:direction`, e.g. `1:NE,101:SE`.
    #[arg(long)]
    trajectory: Option<String>,
    #[arg(long)]
    measurements: Option<usize>,
    #[arg(long)]
    noise_variance: Option<f64>,
    /// zero | wrap
    #[arg(long)]
    boundary: Option<String>,
}

#[derive(Args)]
struct VotesArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Vote CSV (`t,<seats...>`); a planted network is sampled when absent.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    p: Option<usize>,
    /// Comma-separated attraction rates, one model each.
    #[arg(long)]
    alphas: Option<String>,
    #[arg(long)]
    planted_alpha: Option<f64>,
    /// Also write the (possibly synthetic) votes to this CSV.
    #[arg(long)]
    save_votes: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// losses.csv written by a run command.
    #[arg(long)]
    losses: PathBuf,
    #[arg(long, default_value_t = 1)]
    switch_budget: usize,
}

#[derive(Args)]
struct AuditArgs {
    /// shift | network
    #[arg(long, default_value = "shift")]
    family: String,
    #[arg(long, default_value_t = 32)]
    rows: usize,
    #[arg(long, default_value_t = 32)]
    cols: usize,
    /// zero | wrap
    #[arg(long, default_value = "zero")]
    boundary: String,
    #[arg(long, default_value_t = 20)]
    p: usize,
    #[arg(long, default_value = "0,0.001,0.002,0.003,0.004")]
    alphas: String,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// `psi = scale * ||.||^2`.
    #[arg(long, default_value_t = 1.0)]
    psi_scale: f64,
    #[arg(long)]
    box_lo: Option<f64>,
    #[arg(long)]
    box_hi: Option<f64>,
    #[arg(long, default_value = "parallel")]
    execution: String,
}

fn put<T: ToString>(map: &mut ConfigMap, key: &str, value: &Option<T>) {
    if let Some(v) = value {
        map.set(key, v.to_string());
    }
}

fn base_config(run: &RunArgs) -> Result<ConfigMap> {
    let mut map = match &run.config {
        Some(path) => ConfigMap::load(path).with_context(|| format!("reading {}", path.display()))?,
        None => ConfigMap::new(),
    };
    put(&mut map, "seed", &run.seed);
    put(&mut map, "horizon", &run.horizon);
    put(&mut map, "tau", &run.tau);
    put(&mut map, "lambda", &run.lambda);
    put(&mut map, "eta", &run.eta);
    put(&mut map, "eta_r", &run.eta_r);
    put(&mut map, "schedule", &run.schedule);
    put(&mut map, "reg_period", &run.reg_period);
    put(&mut map, "switch_budget", &run.switch_budget);
    put(&mut map, "execution", &run.execution);
    put(&mut map, "ma_window", &run.ma_window);
    put(&mut map, "snapshot_every", &run.snapshot_every);
    put(&mut map, "out_dir", &run.out_dir.as_ref().map(|p| p.display()));
    for s in &run.set {
        map.apply_override(s)?;
    }
    Ok(map)
}

fn report(bundle: &ResultBundle, out_dir: &Path, files: &[PathBuf]) {
    let (best, best_total) = bundle.best_expert();
    println!("rounds            {}", bundle.horizon());
    println!("dfs total loss    {:.6}", bundle.dfs_total());
    println!("comid total loss  {:.6}", bundle.comid_total());
    println!("best expert       {} ({:.6})", bundle.labels[best], best_total);
    if let Some(l) = &bundle.lemma {
        println!(
            "per-step check    {} of {} violated (min slack {:.3e})",
            l.violations, l.checks, l.min_slack
        );
    }
    if let Some(r) = &bundle.truth_regret {
        let above = r
            .experts
            .iter()
            .zip(&r.bounds)
            .filter(|(reg, bound)| reg.iter().zip(bound.iter()).any(|(a, b)| a > b))
            .count();
        println!("regret vs truth   dfs {:.6}", r.dfs.last().copied().unwrap_or(0.0));
        println!("bound exceeded    {above} of {} experts", r.experts.len());
    }
    println!("wrote {} files to {}", files.len(), out_dir.display());
}

fn run_video(args: VideoArgs) -> Result<ExitCode> {
    let mut map = base_config(&args.run)?;
    put(&mut map, "rows", &args.rows);
    put(&mut map, "cols", &args.cols);
    put(&mut map, "block", &args.block);
    put(&mut map, "trajectory", &args.trajectory);
    put(&mut map, "measurements", &args.measurements);
    put(&mut map, "noise_variance", &args.noise_variance);
    put(&mut map, "boundary", &args.boundary);
    let setup = video_setup(&map)?;
    let out_dir = setup.output.out_dir.clone().unwrap_or_else(|| PathBuf::from("out/video"));
    info!("running video scenario, {} rounds", setup.stream.scenario().horizon);
    let bundle = run_scenario(&setup.stream, &setup.settings)?;
    let files = write_bundle(&out_dir, &bundle, &setup.meta, setup.output.ma_window)?;
    report(&bundle, &out_dir, &files);
    Ok(ExitCode::SUCCESS)
}

fn run_votes(args: VotesArgs) -> Result<ExitCode> {
    let mut map = base_config(&args.run)?;
    put(&mut map, "input", &args.input.as_ref().map(|p| p.display()));
    put(&mut map, "p", &args.p);
    put(&mut map, "alphas", &args.alphas);
    put(&mut map, "planted_alpha", &args.planted_alpha);
    let setup = votes_setup(&map)?;
    if let Some(path) = &args.save_votes {
        save_votes(path, setup.stream.votes())?;
    }
    let out_dir = setup.output.out_dir.clone().unwrap_or_else(|| PathBuf::from("out/votes"));
    info!("running vote scenario, {} rounds", setup.stream.votes().len());
    let bundle = run_scenario(&setup.stream, &setup.settings)?;
    let files = write_bundle(&out_dir, &bundle, &setup.meta, setup.output.ma_window)?;
    report(&bundle, &out_dir, &files);
    Ok(ExitCode::SUCCESS)
}

fn eval_regret(args: EvalArgs) -> Result<ExitCode> {
    let trace = read_loss_trace(&args.losses)?;
    for (k, v) in evaluate_trace(&trace, args.switch_budget)? {
        println!("{k} = {v}");
    }
    Ok(ExitCode::SUCCESS)
}

fn audit(args: AuditArgs) -> Result<ExitCode> {
    let exec: Execution = args.execution.parse().map_err(anyhow::Error::msg)?;
    let geom = BregmanGeometry::scaled_euclidean(args.psi_scale)?;
    let (models, shape, lo, hi) = match args.family.as_str() {
        "shift" => {
            let boundary: Boundary = args.boundary.parse().map_err(anyhow::Error::msg)?;
            (
                shift_family_with(args.rows, args.cols, boundary)?,
                Shape::Matrix { rows: args.rows, cols: args.cols },
                0.0,
                1.0,
            )
        }
        "network" => {
            let alphas = args
                .alphas
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .context("parsing --alphas")?;
            (network_family(&alphas, args.p)?, Shape::Matrix { rows: args.p, cols: args.p }, -1.0, 1.0)
        }
        other => bail!("unknown family `{other}` (shift|network)"),
    };
    let set = FeasibleSet::uniform_box(shape.len(), args.box_lo.unwrap_or(lo), args.box_hi.unwrap_or(hi))?;
    let mut violations = 0;
    println!("{:<16} {:>14} {:>8}  status", "model", "delta_estimate", "samples");
    for model in &models {
        let a = audit_contraction(model, &geom, &set, shape, args.samples, args.seed, exec)?;
        if a.violation {
            violations += 1;
        }
        println!(
            "{:<16} {:>14.6e} {:>8}  {}",
            model.label(),
            a.estimate,
            a.samples,
            if a.violation { "EXPANSIVE" } else { "ok" }
        );
    }
    Ok(if violations == 0 { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::RunVideo(a) => run_video(a),
        Command::RunVotes(a) => run_votes(a),
        Command::EvalRegret(a) => eval_regret(a),
        Command::AuditDynamics(a) => audit(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
