#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use calorijump::effective::{
    closed_form_ts, default_grid, drift_and_diffusion, ou_linearization, stationary_density,
    steady_state, zero_temperature_ts, EffectiveModel, Grid,
};
use calorijump::io::{
    floquet_records, load_config, write_coefficients, write_density, write_ensemble, write_jsonl,
    CsvWriter, RunConfig, RunManifest,
};
use calorijump::params::ModelParams;
use calorijump::sim::{InitialLevel, Record, SimConfig, Simulator};
use calorijump::stats::{default_band, periodogram, WelchOptions};
use calorijump::ErrorKind;

mod validate;

#[derive(Parser)]
#[command(
    name = "calorijump",
    version,
    about = "Driven qubit coupled to an electronic calorimeter"
)]
struct Cli {
    /// Run configuration (`key = value` lines); the built-in reference set when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for ensembles.
    #[arg(long, global = true, env = "CALORIJUMP_THREADS")]
    threads: Option<usize>,
    /// Coupling g²; repeat to sweep.
    #[arg(long = "g2", global = true)]
    g2: Vec<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum RecordKind {
    Final,
    Path,
    Histogram,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitialKind {
    /// Boltzmann weights over the folded quasi-energies.
    Thermal,
    /// Bare qubit Gibbs state projected onto the Floquet modes.
    Projected,
    Level0,
    Level1,
}

#[derive(Subcommand)]
enum Command {
    /// Floquet spectrum and jump channels as JSON lines.
    Floquet,
    /// Monte Carlo ensemble of qubit-temperature trajectories.
    Simulate {
        /// Re-run exactly the settings recorded in a manifest.
        #[arg(long, conflicts_with_all = ["config", "g2", "seed"])]
        manifest: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "final")]
        record: RecordKind,
        /// Initial Floquet level distribution.
        #[arg(long, value_enum, default_value = "thermal")]
        initial: InitialKind,
        /// Histogram bins over [t-min, t-max] K.
        #[arg(long, default_value_t = 200)]
        bins: usize,
        #[arg(long, default_value_t = 0.0)]
        t_min: f64,
        #[arg(long, default_value_t = 1.0)]
        t_max: f64,
    },
    /// Tabulates the effective drift and diffusion and the stationary density.
    Effective {
        #[arg(long, default_value_t = 2048)]
        points: usize,
    },
    /// Steady-state temperature and relaxation time.
    Steady,
    /// Power spectrum of a steady-state temperature path.
    Spectrum {
        /// Samples, one per drive period.
        #[arg(long, default_value_t = 1 << 16)]
        samples: usize,
        /// Burn-in in relaxation times.
        #[arg(long, default_value_t = 3.0)]
        burn_in: f64,
    },
    /// Checks the model invariants; exits with status 4 on failure.
    Validate,
}

#[derive(Debug)]
struct ValidationFailed(usize);

impl std::fmt::Display for ValidationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} invariant check(s) failed", self.0)
    }
}

impl std::error::Error for ValidationFailed {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (kind, code) = classify(&e);
            let record = serde_json::json!({
                "error": kind,
                "exit_code": code,
                "message": format!("{e:#}"),
            });
            eprintln!("{record}");
            ExitCode::from(code)
        }
    }
}

fn classify(e: &anyhow::Error) -> (&'static str, u8) {
    if e.downcast_ref::<ValidationFailed>().is_some() {
        return ("validation", 4);
    }
    match e.downcast_ref::<calorijump::Error>().map(|c| c.kind()) {
        Some(ErrorKind::Config) => ("config", 2),
        Some(ErrorKind::Numerical) => ("numerical", 3),
        Some(ErrorKind::Io) => ("io", 1),
        None => ("internal", 1),
    }
}

fn base_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => load_config(p)?,
        None => RunConfig::reference(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

/// One config per requested g², or the configured one.
fn sweep(cli: &Cli) -> Result<Vec<RunConfig>> {
    let cfg = base_config(cli)?;
    if cli.g2.is_empty() {
        return Ok(vec![cfg]);
    }
    cli.g2
        .iter()
        .map(|&g2| {
            let mut c = cfg.clone();
            c.g2 = g2;
            c.params()?;
            Ok(c)
        })
        .collect()
}

fn threads(cli: &Cli) -> usize {
    cli.threads.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    })
}

fn out_dir(cli: &Cli, default: &str) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| PathBuf::from(default))
}

/// Output directory for one sweep point.
fn point_dir(base: &Path, cfg: &RunConfig, sweeping: bool) -> PathBuf {
    if sweeping {
        base.join(format!("g2_{}", cfg.g2))
    } else {
        base.to_path_buf()
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Floquet => floquet(cli),
        Command::Simulate {
            manifest,
            record,
            initial,
            bins,
            t_min,
            t_max,
        } => {
            let initial = match initial {
                InitialKind::Thermal => InitialLevel::Thermal,
                InitialKind::Projected => InitialLevel::Projected,
                InitialKind::Level0 => InitialLevel::Fixed(0),
                InitialKind::Level1 => InitialLevel::Fixed(1),
            };
            let record = match record {
                RecordKind::Final => Record::Final,
                RecordKind::Path => Record::Path,
                RecordKind::Histogram => Record::Histogram {
                    bins: *bins,
                    lo: *t_min,
                    hi: *t_max,
                },
            };
            simulate(cli, manifest.as_deref(), record, initial)
        }
        Command::Effective { points } => effective(cli, *points),
        Command::Steady => steady(cli),
        Command::Spectrum { samples, burn_in } => spectrum(cli, *samples, *burn_in),
        Command::Validate => {
            let mut failed = 0;
            for cfg in sweep(cli)? {
                failed += validate::run(&cfg, threads(cli))?;
            }
            if failed > 0 {
                return Err(ValidationFailed(failed).into());
            }
            println!("all checks passed");
            Ok(())
        }
    }
}

fn floquet(cli: &Cli) -> Result<()> {
    let sweeping = cli.g2.len() > 1;
    for cfg in sweep(cli)? {
        let sol = cfg.params()?.floquet()?;
        let records = floquet_records(&sol);
        match &cli.out {
            Some(base) => {
                let dir = point_dir(base, &cfg, sweeping);
                fs::create_dir_all(&dir)?;
                let path = dir.join("floquet.jsonl");
                write_jsonl(&path, &records)?;
                println!("{}", path.display());
            }
            None => {
                let mut out = std::io::stdout().lock();
                for r in &records {
                    writeln!(out, "{}", serde_json::to_string(r)?)?;
                }
            }
        }
    }
    Ok(())
}

fn simulate(
    cli: &Cli,
    manifest: Option<&Path>,
    record: Record,
    initial: InitialLevel,
) -> Result<()> {
    let base = out_dir(cli, "calorijump-out");
    let jobs: Vec<(RunConfig, SimConfig)> = match manifest {
        Some(path) => {
            let m = RunManifest::load(path)
                .with_context(|| format!("reading manifest {}", path.display()))?;
            let sim = match m.sim {
                Some(s) => s,
                None => m.config.sim_config()?,
            };
            vec![(m.config, sim)]
        }
        None => sweep(cli)?
            .into_iter()
            .map(|c| {
                let mut s = c.sim_config()?;
                s.record = record;
                s.initial = initial;
                Ok((c, s))
            })
            .collect::<Result<_>>()?,
    };
    let sweeping = jobs.len() > 1;
    for (cfg, sim) in jobs {
        let params = cfg.params()?;
        let simulator = Simulator::from_params(&params, sim.dt)?;
        let mut man = RunManifest::start("simulate", &cfg)?;
        man.sim = Some(sim);
        let ens = simulator.run_ensemble(&sim, threads(cli))?;
        let dir = point_dir(&base, &cfg, sweeping);
        let files = write_ensemble(&dir, &ens)?;
        man.finish(&dir, &files)?;
        man.save(&dir.join("manifest.json"))?;
        let last = ens.mean.len() - 1;
        println!(
            "g2 = {}: {} trajectories, final mean T_e = {:.6} K, std = {:.6} K -> {}",
            cfg.g2,
            ens.n_trajectories,
            ens.mean[last],
            ens.std[last],
            dir.display()
        );
    }
    Ok(())
}

fn effective(cli: &Cli, points: usize) -> Result<()> {
    let base = out_dir(cli, "calorijump-out");
    let sweeping = cli.g2.len() > 1;
    for cfg in sweep(cli)? {
        let p = cfg.params()?;
        let model = EffectiveModel::from_params(&p)?;
        let ts0 = zero_temperature_ts(&model)?.max(p.thermo.t_p);
        let t_p = p.thermo.t_p;
        let grid = Grid::spanning((0.1 * t_p).powi(2), (3.0 * ts0).powi(2), points)?;
        let coeffs = drift_and_diffusion(&model, &grid)?;
        let dir = point_dir(&base, &cfg, sweeping);
        fs::create_dir_all(&dir)?;
        write_coefficients(&dir.join("coefficients.csv"), &coeffs.points)?;
        write_density(&dir.join("stationary.csv"), &stationary_density(&coeffs)?)?;
        println!("g2 = {}: {} points -> {}", cfg.g2, points, dir.display());
    }
    Ok(())
}

struct Resolved {
    model: EffectiveModel,
    grid: Grid,
    roots: Vec<f64>,
    x_s: f64,
    tau: f64,
}

fn resolve(p: &ModelParams) -> Result<Resolved> {
    let model = EffectiveModel::from_params(p)?;
    let grid = default_grid(&p.thermo, zero_temperature_ts(&model)?.max(p.thermo.t_p))?;
    let ss = steady_state(&model, &grid)?;
    let tau = ou_linearization(&model, ss.x_s, grid.h)?.tau;
    Ok(Resolved {
        model,
        grid,
        roots: ss.roots,
        x_s: ss.x_s,
        tau,
    })
}

fn steady(cli: &Cli) -> Result<()> {
    for cfg in sweep(cli)? {
        let p = cfg.params()?;
        let r = resolve(&p)?;
        let sol = p.floquet()?;
        let closed = closed_form_ts(&p, &sol.spectrum)?;
        let zero_t = zero_temperature_ts(&r.model)?;
        println!(
            "g2 = {}: T_S = {:.6} K (root of J), {:.6} K (closed form), {:.6} K (zero-temperature rates); tau_S = {:.4e} s",
            cfg.g2,
            r.x_s.sqrt(),
            closed,
            zero_t,
            r.tau
        );
        if r.roots.len() > 1 {
            let all: Vec<String> = r.roots.iter().map(|x| format!("{:.6}", x.sqrt())).collect();
            println!("  other roots (K): {}", all.join(", "));
        }
    }
    Ok(())
}

fn spectrum(cli: &Cli, samples: usize, burn_in: f64) -> Result<()> {
    if samples < 1024 {
        bail!(calorijump::Error::Config(format!(
            "--samples {samples} is below 1024"
        )));
    }
    let base = out_dir(cli, "calorijump-out");
    let sweeping = cli.g2.len() > 1;
    for cfg in sweep(cli)? {
        let p = cfg.params()?;
        let r = resolve(&p)?;
        let mut sim = cfg.sim_config()?;
        sim.n_trajectories = 1;
        sim.initial_t_e = Some(r.x_s.sqrt());
        let burn = (burn_in * r.tau / p.period()).ceil() as usize;
        sim.n_steps = sim.sample_every * (burn + samples) as u64;
        let simulator = Simulator::from_params(&p, sim.dt)?;
        let mut path = Vec::with_capacity(samples);
        simulator.run_with(&sim, 0, |k, st| {
            if k > burn {
                path.push(st.t_e());
            }
        })?;
        let sample_dt = sim.sample_every as f64 * sim.dt;
        let pg = periodogram(
            &path,
            sample_dt,
            default_band(r.tau, sample_dt),
            WelchOptions::default(),
        )?;
        let dir = point_dir(&base, &cfg, sweeping);
        fs::create_dir_all(&dir)?;
        let mut w = CsvWriter::create(
            &dir.join("periodogram.csv"),
            &["omega_rad_s", "psd_K2_s_per_rad"],
        )?;
        for (o, v) in pg.omega.iter().zip(&pg.power) {
            w.row(&[*o, *v])?;
        }
        w.finish()?;
        println!(
            "g2 = {}: slope {:.3} ± {:.3} over [{:.3e}, {:.3e}] rad/s (tau_S = {:.4e} s, grid {} points) -> {}",
            cfg.g2,
            pg.slope,
            pg.slope_stderr,
            pg.band.0,
            pg.band.1,
            r.tau,
            r.grid.n,
            dir.display()
        );
    }
    Ok(())
}
