//! Configuration files, CSV / JSON-lines output and run manifests.
//!
//! Config files are UTF-8 `key = value` lines with `#` comments. CSV numbers
//! carry 17 significant digits so that every value round-trips exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::effective::{CoeffPoint, Density};
use crate::error::{Error, Result};
use crate::floquet::FloquetSolution;
use crate::params::ModelParams;
use crate::sim::{Ensemble, SimConfig};
use crate::stats::Histogram;
use crate::thermo::ThermoParams;

/// How the electron–phonon coupling was specified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Coupling {
    /// ΣV (W/K⁵).
    SigmaV(f64),
    /// Σ (W/K⁵/m³) and V (m³).
    SigmaAndVolume(f64, f64),
}

impl Coupling {
    pub fn sigma_v(&self) -> f64 {
        match *self {
            Coupling::SigmaV(v) => v,
            Coupling::SigmaAndVolume(s, v) => s * v,
        }
    }
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub hbar_omega_q_over_kb: f64,
    pub omega_l_over_omega_q: f64,
    pub kappa: f64,
    pub g2: f64,
    pub coupling: Coupling,
    pub t_p: f64,
    pub c_over_kb: f64,
    pub dt_factor: f64,
    /// Horizon in drive periods.
    pub horizon_periods: f64,
    pub seed: u64,
    pub n_trajectories: usize,
}

pub const DEFAULT_DT_FACTOR: f64 = 100.0;

const KEYS: &[&str] = &[
    "hbar_omega_q_over_kB",
    "omega_L_over_omega_q",
    "kappa",
    "g2",
    "SigmaV",
    "Sigma",
    "V",
    "T_p",
    "C_over_kB",
    "dt_factor",
    "horizon_periods",
    "seed",
    "n_trajectories",
];

impl RunConfig {
    /// Reference set: 1 K qubit at resonance, κ = 0.05, g² = 0.01,
    /// ΣV = 2e-12 W/K⁵, T_p = 0.1 K, C = 1500 k_B/K, 10 periods.
    pub fn reference() -> Self {
        Self {
            hbar_omega_q_over_kb: 1.0,
            omega_l_over_omega_q: 1.0,
            kappa: 0.05,
            g2: 0.01,
            coupling: Coupling::SigmaV(2e-12),
            t_p: 0.1,
            c_over_kb: 1500.0,
            dt_factor: DEFAULT_DT_FACTOR,
            horizon_periods: 10.0,
            seed: 1,
            n_trajectories: 1000,
        }
    }

    pub fn params(&self) -> Result<ModelParams> {
        let p = ModelParams {
            hbar_omega_q_over_kb: self.hbar_omega_q_over_kb,
            omega_l_over_omega_q: self.omega_l_over_omega_q,
            kappa: self.kappa,
            g2: self.g2,
            thermo: ThermoParams::new(self.coupling.sigma_v(), self.t_p, self.c_over_kb)?,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn sim_config(&self) -> Result<SimConfig> {
        let p = self.params()?;
        Ok(SimConfig::for_params(
            &p,
            self.dt_factor,
            self.horizon_periods,
            self.seed,
            self.n_trajectories,
        ))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut map: BTreeMap<&str, &str> = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", no + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(Error::Config(format!("line {}: unknown key `{k}`", no + 1)));
            }
            if map.insert(k, v).is_some() {
                return Err(Error::Config(format!("duplicate key `{k}`")));
            }
        }
        let num = |k: &str| -> Result<f64> {
            let v = map
                .get(k)
                .ok_or_else(|| Error::Config(format!("missing key `{k}`")))?;
            v.parse::<f64>()
                .map_err(|_| Error::Config(format!("`{k}`: not a number: {v}")))
        };
        let int = |k: &str| -> Result<u64> {
            let v = map
                .get(k)
                .ok_or_else(|| Error::Config(format!("missing key `{k}`")))?;
            v.parse::<u64>()
                .map_err(|_| Error::Config(format!("`{k}`: not a non-negative integer: {v}")))
        };
        let coupling = match (
            map.contains_key("SigmaV"),
            map.contains_key("Sigma"),
            map.contains_key("V"),
        ) {
            (true, false, false) => Coupling::SigmaV(num("SigmaV")?),
            (false, true, true) => Coupling::SigmaAndVolume(num("Sigma")?, num("V")?),
            (true, _, _) => {
                return Err(Error::Config(
                    "give either `SigmaV` or `Sigma` with `V`, not both".into(),
                ))
            }
            (false, true, false) => return Err(Error::Config("missing key `V`".into())),
            (false, false, true) => return Err(Error::Config("missing key `Sigma`".into())),
            (false, false, false) => return Err(Error::Config("missing key `SigmaV`".into())),
        };
        let cfg = Self {
            hbar_omega_q_over_kb: num("hbar_omega_q_over_kB")?,
            omega_l_over_omega_q: num("omega_L_over_omega_q")?,
            kappa: num("kappa")?,
            g2: num("g2")?,
            coupling,
            t_p: num("T_p")?,
            c_over_kb: num("C_over_kB")?,
            dt_factor: if map.contains_key("dt_factor") {
                num("dt_factor")?
            } else {
                DEFAULT_DT_FACTOR
            },
            horizon_periods: num("horizon_periods")?,
            seed: int("seed")?,
            n_trajectories: int("n_trajectories")? as usize,
        };
        if !(cfg.dt_factor > 0.0) || !(cfg.horizon_periods >= 0.0) {
            return Err(Error::Config(
                "dt_factor must be positive and horizon_periods non-negative".into(),
            ));
        }
        cfg.params().map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }

    /// Text form accepted by [`RunConfig::parse`]; floats use the shortest
    /// exact representation.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv(
            "hbar_omega_q_over_kB",
            format!("{:?}", self.hbar_omega_q_over_kb),
        );
        kv(
            "omega_L_over_omega_q",
            format!("{:?}", self.omega_l_over_omega_q),
        );
        kv("kappa", format!("{:?}", self.kappa));
        kv("g2", format!("{:?}", self.g2));
        match self.coupling {
            Coupling::SigmaV(v) => kv("SigmaV", format!("{v:?}")),
            Coupling::SigmaAndVolume(a, b) => {
                kv("Sigma", format!("{a:?}"));
                kv("V", format!("{b:?}"));
            }
        }
        kv("T_p", format!("{:?}", self.t_p));
        kv("C_over_kB", format!("{:?}", self.c_over_kb));
        kv("dt_factor", format!("{:?}", self.dt_factor));
        kv("horizon_periods", format!("{:?}", self.horizon_periods));
        kv("seed", self.seed.to_string());
        kv("n_trajectories", self.n_trajectories.to_string());
        s
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    RunConfig::parse(&text)
}

/// Formats a float with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// Writes a CSV table with a fixed header.
pub struct CsvWriter {
    out: BufWriter<fs::File>,
    columns: usize,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &[&str]) -> Result<Self> {
        let mut out = BufWriter::new(fs::File::create(path)?);
        writeln!(out, "{}", header.join(","))?;
        Ok(Self {
            out,
            columns: header.len(),
        })
    }

    pub fn row(&mut self, values: &[f64]) -> Result<()> {
        debug_assert_eq!(values.len(), self.columns);
        let line: Vec<String> = values.iter().map(|v| fmt17(*v)).collect();
        writeln!(self.out, "{}", line.join(","))?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

/// One JSON object per line.
pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path)?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Derived quantities in internal units, for reference only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Internal {
    pub omega_q: f64,
    pub omega_l: f64,
    pub period: f64,
    pub dt: f64,
    pub n_steps: u64,
    pub sigma_over_kb: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    pub params: ModelParams,
    pub internal: Internal,
    pub seed: u64,
    /// Resolved simulation settings for `simulate` runs.
    #[serde(default)]
    pub sim: Option<SimConfig>,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub files: Vec<FileEntry>,
}

fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

impl RunManifest {
    pub fn start(command: &str, config: &RunConfig) -> Result<Self> {
        let params = config.params()?;
        let sim = config.sim_config()?;
        Ok(Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config: config.clone(),
            params,
            internal: Internal {
                omega_q: params.omega_q(),
                omega_l: params.omega_l(),
                period: params.period(),
                dt: sim.dt,
                n_steps: sim.n_steps,
                sigma_over_kb: params.thermo.sigma(),
            },
            seed: config.seed,
            sim: None,
            started_unix: unix_now(),
            finished_unix: 0,
            files: Vec::new(),
        })
    }

    /// Records hashes of `files` (paths relative to `dir`) and stamps the end time.
    pub fn finish(&mut self, dir: &Path, files: &[PathBuf]) -> Result<()> {
        self.files = files
            .iter()
            .map(|f| {
                let full = dir.join(f);
                Ok(FileEntry {
                    path: f.display().to_string(),
                    sha256: sha256_file(&full)?,
                    bytes: fs::metadata(&full)?.len(),
                })
            })
            .collect::<Result<_>>()?;
        self.finished_unix = unix_now();
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

/// Writes `mean.csv` (t_s, mean_T_e_K, std_T_e_K), `final.csv`
/// (trajectory, T_e_K, level), `histogram.csv` (lo_K, hi_K, count) when
/// present and `paths.csv` (trajectory, t_s, T_e_K, p0, p1) when paths were
/// recorded. Returns the written file names.
pub fn write_ensemble(dir: &Path, e: &Ensemble) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    let mut w = CsvWriter::create(&dir.join("mean.csv"), &["t_s", "mean_T_e_K", "std_T_e_K"])?;
    for i in 0..e.times.len() {
        w.row(&[e.times[i], e.mean[i], e.std[i]])?;
    }
    w.finish()?;
    files.push(PathBuf::from("mean.csv"));
    if !e.final_t_e.is_empty() {
        let mut w = CsvWriter::create(&dir.join("final.csv"), &["trajectory", "T_e_K", "level"])?;
        for (i, (t, l)) in e.final_t_e.iter().zip(&e.final_level).enumerate() {
            w.row(&[i as f64, *t, *l as f64])?;
        }
        w.finish()?;
        files.push(PathBuf::from("final.csv"));
    }
    if let Some(h) = &e.histogram {
        write_histogram(&dir.join("histogram.csv"), h)?;
        files.push(PathBuf::from("histogram.csv"));
    }
    if !e.records.is_empty() {
        let mut w = CsvWriter::create(
            &dir.join("paths.csv"),
            &["trajectory", "t_s", "T_e_K", "p0", "p1"],
        )?;
        for (k, r) in e.records.iter().enumerate() {
            for i in 0..r.times.len() {
                let p = r.populations[i];
                w.row(&[k as f64, r.times[i], r.t_e[i], p[0], p[1]])?;
            }
        }
        w.finish()?;
        files.push(PathBuf::from("paths.csv"));
    }
    Ok(files)
}

pub fn write_histogram(path: &Path, h: &Histogram) -> Result<()> {
    let mut w = CsvWriter::create(path, &["lo_K", "hi_K", "count"])?;
    for i in 0..h.counts.len() {
        w.row(&[h.edge(i), h.edge(i + 1), h.counts[i] as f64])?;
    }
    w.finish()
}

/// Columns: X_K2, T_K, J, S, phonon_drift, j1, j2, phonon_noise, delta1, delta2.
pub fn write_coefficients(path: &Path, points: &[CoeffPoint]) -> Result<()> {
    let mut w = CsvWriter::create(
        path,
        &[
            "X_K2",
            "T_K",
            "J",
            "S",
            "phonon_drift",
            "j1",
            "j2",
            "phonon_noise",
            "delta1",
            "delta2",
        ],
    )?;
    for p in points {
        w.row(&[
            p.x,
            p.x.sqrt(),
            p.j,
            p.s,
            p.phonon_drift,
            p.j1,
            p.j2,
            p.phonon_noise,
            p.delta1,
            p.delta2,
        ])?;
    }
    w.finish()
}

/// Columns: X_K2, density_per_K2.
pub fn write_density(path: &Path, d: &Density) -> Result<()> {
    let mut w = CsvWriter::create(path, &["X_K2", "density_per_K2"])?;
    for i in 0..d.grid.n {
        w.row(&[d.grid.x(i), d.f[i]])?;
    }
    w.finish()
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum FloquetRecord {
    Spectrum {
        omega_l: f64,
        period: f64,
        quasi_energies: [f64; 2],
        nu: f64,
        theta: Option<f64>,
    },
    Channel {
        label: String,
        s: i8,
        n: i32,
        omega: f64,
        hbar_omega_over_kb: f64,
        amplitude_re: f64,
        amplitude_im: f64,
        weight: f64,
    },
}

pub fn floquet_records(sol: &FloquetSolution) -> Vec<FloquetRecord> {
    let sp = &sol.spectrum;
    let mut out = vec![FloquetRecord::Spectrum {
        omega_l: sp.omega_l,
        period: sp.period,
        quasi_energies: sp.quasi_energies,
        nu: sp.nu,
        theta: sp.theta,
    }];
    for c in &sol.channels {
        out.push(FloquetRecord::Channel {
            label: c.label(),
            s: c.s,
            n: c.n,
            omega: c.omega,
            hbar_omega_over_kb: c.omega * crate::units::HBAR_OVER_KB,
            amplitude_re: c.amplitude.re,
            amplitude_im: c.amplitude.im,
            weight: c.weight(),
        });
    }
    out
}
