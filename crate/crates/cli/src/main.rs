mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rpdqs_core::circuit::{compile, gate_count, lower_to_basis};
use rpdqs_core::experiment::{self, ExperimentConfig};
use rpdqs_core::observables::{pearson, rescale_fit, YieldCurve, YieldMetadata};
use serde_json::{json, Map};

use output::{num, Output, Table};

#[derive(Debug)]
pub enum CliError {
    /// Bad config, override or argument: exit 2.
    Config(String),
    /// Anything that fails after the config was accepted: exit 1.
    Runtime(String),
}

impl From<rpdqs_core::Error> for CliError {
    fn from(e: rpdqs_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "rpdqs",
    version,
    about = "Radical-pair spin dynamics via emulated Trotter circuits"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// TOML experiment config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set system.k_singlet=2`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Output directory (default `out`).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweep points (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Yield integration window: `none` stops at t_max, `extend` runs until e^{-kt} < 1e-6.
    #[arg(long, global = true, value_parser = ["none", "extend"])]
    tail: Option<String>,
    /// Also prune zero-angle two-qubit rotations when lowering circuits.
    #[arg(long, global = true)]
    prune_all_zero: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Singlet population trace at `theta`, raw and with recombination decay.
    Population,
    /// Singlet yield over the θ grid, with anisotropy.
    YieldSweep,
    /// Yield at `theta` versus Trotter order.
    TrotterSweep {
        /// Comma list and/or inclusive ranges, e.g. `1..30,64,1024`.
        #[arg(long, default_value = "1..30")]
        n_list: String,
        /// Add a column run on the noisy density simulator.
        #[arg(long)]
        noisy: bool,
    },
    /// Yield at `theta` versus symmetric recombination rate.
    RateSweep {
        /// Rates in MHz.
        #[arg(long, default_value = "0.1,0.3,1,3,10")]
        k_list: String,
        /// Trotter order for circuit modes.
        #[arg(long, default_value_t = 5)]
        steps: usize,
    },
    /// RMS error of the sampled population trace versus shot count.
    ShotSweep {
        #[arg(long, default_value = "100,1000,10000")]
        shot_list: String,
    },
    /// Rescale a noisy yield curve onto a reference by matching extrema.
    Fit { noisy: PathBuf, reference: PathBuf },
    /// Write the compiled circuit for `theta` at one time point.
    DumpCircuit {
        /// Evolution time in µs (default: `t_max`).
        #[arg(long)]
        time: Option<f64>,
        /// Lower to the hardware gate set.
        #[arg(long)]
        lowered: bool,
    },
}

fn parse_list<T: std::str::FromStr>(raw: &str, what: &str) -> Result<Vec<T>, CliError> {
    let bad = || CliError::Config(format!("{what}: cannot parse `{raw}`"));
    let mut out = Vec::new();
    for part in raw.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        out.push(part.parse().map_err(|_| bad())?);
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

fn parse_n_list(raw: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Config(format!("--n-list: cannot parse `{raw}`"));
    let mut out = Vec::new();
    for part in raw.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let (a, b): (usize, usize) =
                (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
            if a > b {
                return Err(bad());
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    if out.is_empty() || out.contains(&0) {
        return Err(CliError::Config("--n-list: orders must be >= 1".into()));
    }
    Ok(out)
}

fn read_curve(path: &Path) -> Result<YieldCurve, CliError> {
    let mut r = csv::Reader::from_path(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let header = r
        .headers()
        .map_err(|e| CliError::Config(e.to_string()))?
        .clone();
    if header.iter().collect::<Vec<_>>() != ["theta_rad", "singlet_yield"] {
        return Err(CliError::Config(format!(
            "{}: expected header theta_rad,singlet_yield",
            path.display()
        )));
    }
    let (mut thetas, mut yields) = (Vec::new(), Vec::new());
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let field = |i: usize| -> Result<f64, CliError> {
            rec.get(i)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| {
                    CliError::Config(format!("{}: bad number in row {:?}", path.display(), rec))
                })
        };
        thetas.push(field(0)?);
        yields.push(field(1)?);
    }
    YieldCurve::new(thetas, yields, YieldMetadata::default())
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn curve_table(c: &YieldCurve) -> Table {
    let mut t = Table::new(&["theta_rad", "singlet_yield"]);
    for (th, y) in c.thetas.iter().zip(&c.yields) {
        t.push(vec![num(*th), num(*y)]);
    }
    t
}

fn run(cli: Cli) -> Result<(), CliError> {
    let g = &cli.global;
    if let Some(n) = g.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    let mut overrides = g.overrides.clone();
    if let Some(t) = &g.tail {
        overrides.push(format!("tail={t}"));
    }
    if g.prune_all_zero {
        overrides.push("lowering=prune-all".into());
    }
    let resolved = config::resolve(g.config.as_deref(), &overrides, g.seed)?;
    let cfg: ExperimentConfig = resolved.experiment;
    let dir = g
        .output
        .clone()
        .or(resolved.output.map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));

    let out = || Output::new(&dir);
    match &cli.command {
        Command::Population => {
            let (raw, decayed) = experiment::population(&cfg)?;
            let mut t = Table::new(&["time_us", "population_raw", "population_decayed"]);
            for i in 0..raw.len() {
                t.push(vec![
                    num(raw.times[i]),
                    num(raw.singlet_population[i]),
                    num(decayed.singlet_population[i]),
                ]);
            }
            let p = out()?.emit("population", "population", Some(&cfg), &t, Map::new())?;
            println!("wrote {}", p.display());
        }
        Command::YieldSweep => {
            let s = experiment::yield_sweep(&cfg)?;
            let mut extra = Map::new();
            extra.insert("anisotropy".into(), json!(num(s.anisotropy)));
            extra.insert("max_yield".into(), json!(num(s.curve.max())));
            extra.insert("min_yield".into(), json!(num(s.curve.min())));
            extra.insert(
                "theta_max".into(),
                json!(num(s.curve.thetas[s.curve.argmax()])),
            );
            extra.insert(
                "theta_min".into(),
                json!(num(s.curve.thetas[s.curve.argmin()])),
            );
            let p = out()?.emit(
                "yield_sweep",
                "yield-sweep",
                Some(&cfg),
                &curve_table(&s.curve),
                extra,
            )?;
            println!("anisotropy {}", num(s.anisotropy));
            println!("wrote {}", p.display());
        }
        Command::TrotterSweep { n_list, noisy } => {
            let ns = parse_n_list(n_list)?;
            let rows = experiment::trotter_sweep(&cfg, &ns, *noisy)
                .map_err(|e| CliError::Config(e.to_string()))?;
            let mut t = if *noisy {
                Table::new(&["n", "yield_noiseless", "yield_noisy"])
            } else {
                Table::new(&["n", "yield_noiseless"])
            };
            for r in &rows {
                let mut row = vec![r.n.to_string(), num(r.yield_noiseless)];
                if let Some(y) = r.yield_noisy {
                    row.push(num(y));
                }
                t.push(row);
            }
            let p = out()?.emit("trotter_sweep", "trotter-sweep", Some(&cfg), &t, Map::new())?;
            println!("wrote {}", p.display());
        }
        Command::RateSweep { k_list, steps } => {
            let ks: Vec<f64> = parse_list(k_list, "--k-list")?;
            if ks.iter().any(|k| !(k.is_finite() && *k >= 0.0)) {
                return Err(CliError::Config("--k-list: rates must be >= 0".into()));
            }
            let cfg = ExperimentConfig {
                trotter_steps: *steps,
                ..cfg
            };
            cfg.validate()
                .map_err(|e| CliError::Config(e.to_string()))?;
            let rows = experiment::rate_sweep(&cfg, &ks)?;
            let mut t = Table::new(&["k_MHz", "yield"]);
            for (k, y) in rows {
                t.push(vec![num(k), num(y)]);
            }
            let p = out()?.emit("rate_sweep", "rate-sweep", Some(&cfg), &t, Map::new())?;
            println!("wrote {}", p.display());
        }
        Command::ShotSweep { shot_list } => {
            let shots: Vec<u64> = parse_list(shot_list, "--shot-list")?;
            if shots.contains(&0) {
                return Err(CliError::Config(
                    "--shot-list: shot counts must be >= 1".into(),
                ));
            }
            let rows = experiment::shot_sweep(&cfg, &shots)?;
            let mut t = Table::new(&["shots", "rms_error"]);
            for (s, e) in rows {
                t.push(vec![s.to_string(), num(e)]);
            }
            let p = out()?.emit("shot_sweep", "shot-sweep", Some(&cfg), &t, Map::new())?;
            println!("wrote {}", p.display());
        }
        Command::Fit { noisy, reference } => {
            let noisy = read_curve(noisy)?;
            let reference = read_curve(reference)?;
            let (fit, params) =
                rescale_fit(&noisy, &reference).map_err(|e| CliError::Config(e.to_string()))?;
            let r = pearson(&fit.yields, &reference.yields);
            let mut extra = Map::new();
            extra.insert("scale".into(), json!(num(params.scale)));
            extra.insert("offset".into(), json!(num(params.offset)));
            extra.insert("pearson_r".into(), json!(r.map(num)));
            let p = out()?.emit("fit", "fit", None, &curve_table(&fit), extra)?;
            println!("a {}", num(params.scale));
            println!("b {}", num(params.offset));
            println!("r {}", r.map(num).unwrap_or_else(|| "undefined".into()));
            println!("wrote {}", p.display());
        }
        Command::DumpCircuit { time, lowered } => {
            let t = time.unwrap_or(cfg.t_max);
            if !(t.is_finite() && t >= 0.0) {
                return Err(CliError::Config("--time must be >= 0".into()));
            }
            let system = cfg.system.clone().with_angles(cfg.theta, cfg.system.phi);
            let mut c = compile(&system, t, cfg.trotter_steps)?;
            if *lowered {
                c = lower_to_basis(&c, cfg.lowering);
            }
            let gc = gate_count(&c);
            let p = out()?.write_text("circuit.txt", &c.to_text())?;
            println!("gates {} (trotter {})", gc.total, gc.trotter_only);
            for (k, n) in &gc.per_kind {
                println!("  {k} {n}");
            }
            println!("wrote {}", p.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(m)) => {
            eprintln!("config error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
