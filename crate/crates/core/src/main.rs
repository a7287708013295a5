use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use sgqpt::harness::{
    emit_plot, export_results, fit_power_law, read_stats_csv, run_ensemble, ExperimentConfig, FitWindow, Mode,
    PlotSeries, Preset,
};
use sgqpt::measurement::{NoiseModel, ShotBudget};
use sgqpt::spsa::RecordSpacing;
use sgqpt::su2::Su2Params;

#[derive(Parser)]
#[command(name = "sgqpt", version, about = "Self-guided process tomography simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an SPSA learning ensemble over Haar-random targets.
    Simulate(RunArgs),
    /// Run the standard tomography baseline over the same targets.
    Baseline(RunArgs),
    /// Fit c k^beta to a stored stats.csv.
    Fit(FitArgs),
    /// Render one or more stored stats.csv files to SVG.
    Plot(PlotArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum NoiseKind {
    Ideal,
    Jitter,
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment file; flags given here override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Starting parameter set when no config file is given.
    #[arg(long, value_enum, default_value = "noiseless-scaling")]
    preset: Preset,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    iterations: Option<u64>,
    /// Shots per probability estimate.
    #[arg(long)]
    shots: Option<ShotBudget>,
    /// Baseline photons per target (defaults to 2 * shots * iterations).
    #[arg(long)]
    photons: Option<u64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long = "alpha-exp")]
    alpha_exp: Option<f64>,
    #[arg(long)]
    delta0: Option<f64>,
    #[arg(long)]
    g0: Option<f64>,
    /// Stability offset A of the step-size schedule.
    #[arg(long = "A")]
    a_stability: Option<f64>,
    #[arg(long, value_enum)]
    noise: Option<NoiseKind>,
    /// Jitter half-width in degrees (implies --noise jitter when given alone).
    #[arg(long = "epsilon-deg")]
    epsilon_deg: Option<f64>,
    /// Initial estimate as alpha,theta,phi in radians.
    #[arg(long, value_delimiter = ',', num_args = 3)]
    init: Option<Vec<f64>>,
    #[arg(long)]
    seed: Option<u64>,
    /// Record every m-th iteration.
    #[arg(long, conflicts_with = "log_per_decade")]
    stride: Option<u64>,
    /// Record this many log-spaced iterations per decade.
    #[arg(long = "log-per-decade")]
    log_per_decade: Option<u32>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (results do not depend on this).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long = "k-min")]
    k_min: Option<u64>,
    #[arg(long = "k-max")]
    k_max: Option<u64>,
    #[arg(long = "no-plot")]
    no_plot: bool,
}

#[derive(Args)]
struct FitArgs {
    /// stats.csv produced by simulate or baseline.
    #[arg(long)]
    stats: PathBuf,
    #[arg(long = "k-min")]
    k_min: Option<u64>,
    #[arg(long = "k-max")]
    k_max: Option<u64>,
}

#[derive(Args)]
struct PlotArgs {
    /// LABEL=PATH pairs; may be repeated.
    #[arg(long = "input", required = true)]
    inputs: Vec<String>,
    /// Overlay a power-law fit on each curve with enough points.
    #[arg(long)]
    fit: bool,
    #[arg(long = "k-min")]
    k_min: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

fn build_config(args: &RunArgs, mode: Mode) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_toml_file(path)?,
        None => ExperimentConfig::preset(args.preset),
    };
    cfg.mode = mode;
    if let Some(v) = args.trials {
        cfg.trials = v;
    }
    if let Some(v) = args.iterations {
        cfg.iterations = v;
    }
    if let Some(v) = args.shots {
        cfg.shots = v;
    }
    if args.photons.is_some() {
        cfg.photons = args.photons;
    }
    let s = &mut cfg.schedule;
    s.gamma = args.gamma.unwrap_or(s.gamma);
    s.alpha_exp = args.alpha_exp.unwrap_or(s.alpha_exp);
    s.delta0 = args.delta0.unwrap_or(s.delta0);
    s.g0 = args.g0.unwrap_or(s.g0);
    s.a_stability = args.a_stability.unwrap_or(s.a_stability);
    cfg.noise = match (args.noise, args.epsilon_deg) {
        (Some(NoiseKind::Ideal), Some(_)) => bail!("--epsilon-deg requires --noise jitter"),
        (Some(NoiseKind::Ideal), None) => NoiseModel::Ideal,
        (Some(NoiseKind::Jitter), eps) | (None, eps @ Some(_)) => {
            let eps = eps
                .or(cfg.noise.epsilon_deg())
                .context("--noise jitter needs --epsilon-deg")?;
            NoiseModel::jitter(eps)?
        }
        (None, None) => cfg.noise,
    };
    if let Some(v) = &args.init {
        cfg.init = Su2Params::from_array([v[0], v[1], v[2]]);
    }
    if let Some(v) = args.seed {
        cfg.master_seed = v;
    }
    if let Some(stride) = args.stride {
        cfg.spacing = RecordSpacing::Every { stride };
    }
    if let Some(per_decade) = args.log_per_decade {
        cfg.spacing = RecordSpacing::Log { per_decade };
    }
    if args.out.is_some() {
        cfg.output = args.out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn window(k_min: Option<u64>, k_max: Option<u64>, last: u64) -> FitWindow {
    let d = FitWindow::default_for(last);
    FitWindow::new(k_min.unwrap_or(d.k_min), k_max.unwrap_or(d.k_max))
}

fn run(args: RunArgs, mode: Mode) -> Result<()> {
    let cfg = build_config(&args, mode)?;
    let out_dir = cfg.output.clone().unwrap_or_else(|| PathBuf::from("results"));
    let output = match args.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .context("building thread pool")?
            .install(|| run_ensemble(&cfg)),
        None => run_ensemble(&cfg),
    }?;

    let fit = match mode {
        Mode::Sgqpt => match fit_power_law(&output.stats, window(args.k_min, args.k_max, cfg.iterations)) {
            Ok(f) => Some(f),
            Err(e) => {
                eprintln!("note: no power-law fit ({e})");
                None
            }
        },
        Mode::QptBaseline => None,
    };
    let files = export_results(&output, fit.as_ref(), &out_dir)?;
    if !args.no_plot {
        let plot_path = out_dir.join("plot.svg");
        emit_plot(
            &[PlotSeries {
                label: format!("{} ({})", mode_label(mode), cfg.noise),
                stats: &output.stats,
                fit,
            }],
            &plot_path,
        )?;
        println!("plot: {}", plot_path.display());
    }

    let last = output.stats.last().expect("export checked non-empty");
    println!(
        "{} trials, {} photons each, seed {}",
        cfg.trials,
        cfg.total_photons_per_trial(),
        cfg.master_seed
    );
    println!(
        "final (k = {}): median {:.4e}, q25 {:.4e}, q75 {:.4e}",
        last.iteration, last.median, last.q25, last.q75
    );
    if let Some(f) = fit {
        println!(
            "fit on [{}, {}]: c = {:.4e}, beta = {:.4}",
            f.window.k_min, f.window.k_max, f.c, f.beta
        );
    }
    println!("summary: {}", files.summary.display());
    println!("stats: {}", files.stats.display());
    Ok(())
}

fn mode_label(mode: Mode) -> &'static str {
    match mode {
        Mode::Sgqpt => "SGQPT",
        Mode::QptBaseline => "QPT",
    }
}

fn fit_cmd(args: FitArgs) -> Result<()> {
    let stats = read_stats_csv(&args.stats)?;
    let last = stats.last().context("empty stats file")?.iteration;
    let fit = fit_power_law(&stats, window(args.k_min, args.k_max, last))?;
    println!("{}", serde_json::to_string_pretty(&fit)?);
    Ok(())
}

fn parse_input(spec: &str) -> Result<(String, &Path)> {
    match spec.split_once('=') {
        Some((label, path)) if !label.is_empty() && !path.is_empty() => Ok((label.to_string(), Path::new(path))),
        _ => bail!("--input expects LABEL=PATH, got {spec:?}"),
    }
}

fn plot_cmd(args: PlotArgs) -> Result<()> {
    let mut loaded = Vec::new();
    for spec in &args.inputs {
        let (label, path) = parse_input(spec)?;
        loaded.push((label, read_stats_csv(path)?));
    }
    let series: Vec<PlotSeries<'_>> = loaded
        .iter()
        .map(|(label, stats)| {
            let fit = if args.fit {
                let last = stats.last().map_or(0, |r| r.iteration);
                fit_power_law(stats, window(args.k_min, None, last)).ok()
            } else {
                None
            };
            PlotSeries {
                label: label.clone(),
                stats,
                fit,
            }
        })
        .collect();
    emit_plot(&series, &args.out)?;
    println!("plot: {}", args.out.display());
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Simulate(a) => run(a, Mode::Sgqpt),
        Command::Baseline(a) => run(a, Mode::QptBaseline),
        Command::Fit(a) => fit_cmd(a),
        Command::Plot(a) => plot_cmd(a),
    }
}
