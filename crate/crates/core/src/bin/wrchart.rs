use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use weibull_ratio::chart::{phase1_train, phase2_step, ChartPoint, Window};
use weibull_ratio::experiments::{reproduce, ReproduceOptions, Target};
use weibull_ratio::io::config::RunConfig;
use weibull_ratio::io::plot::{render_svg, PlotOptions};
use weibull_ratio::io::{fixtures, read_samples, trace};
use weibull_ratio::{state, Error, Result};

const EXIT_SIGNAL: u8 = 2;
const EXIT_ERROR: u8 = 1;

#[derive(Parser)]
#[command(name = "wrchart", version, about = "Bayesian control chart for the ratio of two Weibull percentiles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train on the first m sample pairs, then monitor any remaining pairs.
    Train(ChartArgs),
    /// Resume a saved chart and monitor new sample pairs.
    Monitor {
        /// State document written by `train` or an earlier `monitor`.
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        args: ChartArgs,
    },
    /// Rerun a published figure or table and compare against it.
    Reproduce {
        /// fig1a, fig1b, fig1c, fig2, fig3, table3 or ic-arl.
        target: String,
        #[command(flatten)]
        args: ChartArgs,
    },
    /// Render a trace CSV as SVG.
    Plot {
        #[arg(long)]
        trace: PathBuf,
        /// Add the ratio density at the first and last Phase I steps (needs --n).
        #[arg(long)]
        overlay: bool,
        #[command(flatten)]
        args: ChartArgs,
    },
    /// Verify the bundled tables and write them as sample files.
    Fixtures {
        #[command(flatten)]
        args: ChartArgs,
    },
}

/// Flags shared by all subcommands; each mirrors a configuration key.
#[derive(Args, Default)]
struct ChartArgs {
    /// Samples of the first process (one sample per line).
    #[arg(long)]
    x: Option<PathBuf>,
    /// Samples of the second process.
    #[arg(long)]
    y: Option<PathBuf>,
    /// Flat key = value configuration file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "r-level")]
    r_level: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long = "prior-xr")]
    prior_xr: Option<f64>,
    #[arg(long = "prior-yr")]
    prior_yr: Option<f64>,
    #[arg(long = "prior-beta")]
    prior_beta: Option<f64>,
    #[arg(long = "interval-low")]
    interval_low: Option<f64>,
    #[arg(long = "interval-high")]
    interval_high: Option<f64>,
    /// `all`, `last(w)` or `w`.
    #[arg(long)]
    window: Option<Window>,
    #[arg(long = "rl-cap")]
    rl_cap: Option<usize>,
    /// Master seed (otherwise $WRCHART_SEED, otherwise the built-in default).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for simulations.
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory (or file, for `plot`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Reduced replication counts for `reproduce`.
    #[arg(long)]
    fast: bool,
}

impl ChartArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let file = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        Ok(file.overridden_by(RunConfig {
            alpha: self.alpha,
            r_level: self.r_level,
            n: self.n,
            m: self.m,
            prior_xr: self.prior_xr,
            prior_yr: self.prior_yr,
            prior_beta: self.prior_beta,
            interval_low: self.interval_low,
            interval_high: self.interval_high,
            window: self.window,
            rl_cap: self.rl_cap,
            seed: self.seed,
            jobs: self.jobs,
            out: self.out.clone(),
            x: self.x.clone(),
            y: self.y.clone(),
        }))
    }
}

fn required<'a>(path: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    path.as_deref().ok_or_else(|| Error::Usage(format!("--{flag} is required")))
}

fn out_dir(cfg: &RunConfig) -> Result<PathBuf> {
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| Error::Io { path: dir.clone(), source: e })?;
    Ok(dir)
}

fn read_pair(cfg: &RunConfig) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let x = read_samples(required(&cfg.x, "x")?)?;
    let y = read_samples(required(&cfg.y, "y")?)?;
    if x.len() != y.len() {
        return Err(Error::Shape(format!("--x has {} samples but --y has {}", x.len(), y.len())));
    }
    Ok((x, y))
}

fn sample_size(x: &[Vec<f64>], y: &[Vec<f64>]) -> Result<Option<usize>> {
    match (x.first(), y.first()) {
        (Some(a), Some(b)) if a.len() != b.len() => Err(Error::Shape(format!(
            "samples of the two processes differ in size ({} vs {})",
            a.len(),
            b.len()
        ))),
        (Some(a), _) => Ok(Some(a.len())),
        _ => Ok(None),
    }
}

fn finish(points: &[ChartPoint], st: &weibull_ratio::ChartState, dir: &Path) -> Result<ExitCode> {
    trace::write_trace(points, dir.join("trace.csv"))?;
    state::save(st, dir.join("state.json"))?;
    match points.iter().find(|p| p.signal) {
        Some(p) => {
            eprintln!("signal at step {} ({}), u = {}", p.index, p.phase.as_str(), trace::fmt_sig10(p.u_hat));
            Ok(ExitCode::from(EXIT_SIGNAL))
        }
        None => Ok(ExitCode::SUCCESS),
    }
}

fn train(args: &ChartArgs) -> Result<ExitCode> {
    let cfg = args.resolve()?;
    let (x, y) = read_pair(&cfg)?;
    let config = cfg.chart_config(sample_size(&x, &y)?)?;
    let prior = cfg.prior()?;
    if x.len() < config.m {
        return Err(Error::Shape(format!("training needs m = {} samples, the files hold {}", config.m, x.len())));
    }
    let (mut st, mut points) = phase1_train(&x[..config.m], &y[..config.m], config, prior)?;
    for (xs, ys) in x[config.m..].iter().zip(&y[config.m..]) {
        points.push(phase2_step(&mut st, xs, ys)?);
    }
    finish(&points, &st, &out_dir(&cfg)?)
}

fn monitor(state_path: &Path, args: &ChartArgs) -> Result<ExitCode> {
    let cfg = args.resolve()?;
    let mut st = state::load(state_path)?;
    let (x, y) = read_pair(&cfg)?;
    let mut points = Vec::with_capacity(x.len());
    for (xs, ys) in x.iter().zip(&y) {
        points.push(phase2_step(&mut st, xs, ys)?);
    }
    finish(&points, &st, &out_dir(&cfg)?)
}

fn run_reproduce(target: &str, args: &ChartArgs) -> Result<ExitCode> {
    let target: Target = target.parse()?;
    let cfg = args.resolve()?;
    let opts = ReproduceOptions {
        fast: args.fast,
        seed: cfg.master_seed()?,
        jobs: cfg.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
    };
    let report = reproduce(target, opts)?;
    let text = report.render();
    print!("{text}");
    let dir = out_dir(&cfg)?;
    let name = target.name();
    let write = |file: String, body: &str| {
        let path = dir.join(file);
        std::fs::write(&path, body).map_err(|e| Error::Io { path, source: e })
    };
    write(format!("{name}-report.txt"), &text)?;
    write(format!("{name}.csv"), &report.table)?;
    if let Some(points) = &report.trace {
        write(format!("{name}-trace.csv"), &trace::format_trace(points))?;
        let svg = render_svg(points, PlotOptions { density_overlay: Some(fixtures::SAMPLE_SIZE) })?;
        write(format!("{name}.svg"), &svg)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn plot(trace_path: &Path, overlay: bool, args: &ChartArgs) -> Result<ExitCode> {
    let cfg = args.resolve()?;
    let points = trace::read_trace(trace_path)?;
    let density_overlay = if overlay {
        Some(cfg.n.ok_or_else(|| Error::Usage("--overlay needs --n".into()))?)
    } else {
        None
    };
    let svg = render_svg(&points, PlotOptions { density_overlay })?;
    let path = cfg.out.unwrap_or_else(|| trace_path.with_extension("svg"));
    std::fs::write(&path, svg).map_err(|e| Error::Io { path, source: e })?;
    Ok(ExitCode::SUCCESS)
}

fn write_fixtures(args: &ChartArgs) -> Result<ExitCode> {
    fixtures::verify()?;
    let dir = out_dir(&args.resolve()?)?;
    for (name, body) in [("table1.csv", fixtures::TABLE1_CSV), ("table2.csv", fixtures::TABLE2_CSV)] {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| Error::Io { path, source: e })?;
    }
    println!("table1.csv sha256 {}", fixtures::TABLE1_SHA256);
    println!("table2.csv sha256 {}", fixtures::TABLE2_SHA256);
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Train(args) => train(args),
        Command::Monitor { state, args } => monitor(state, args),
        Command::Reproduce { target, args } => run_reproduce(target, args),
        Command::Plot { trace, overlay, args } => plot(trace, *overlay, args),
        Command::Fixtures { args } => write_fixtures(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("wrchart: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
