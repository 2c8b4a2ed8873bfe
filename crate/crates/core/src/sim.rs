//! Fixed-step simulation of the coupled qubit–calorimeter process and
//! reproducible parallel ensembles.
//!
//! Trajectory `i` of an ensemble draws from a ChaCha8 generator keyed by the
//! ensemble seed (expanded with `SeedableRng::seed_from_u64`) on stream `i`,
//! so every trajectory is reproducible independently of scheduling. Ensemble
//! reductions run over fixed-size chunks merged in index order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::floquet::{FloquetSolution, JumpChannel, OperatorForm};
use crate::params::ModelParams;
use crate::qubit::{drift_with, jump_form, QubitState, RateKernel};
use crate::stats::{histogram, Histogram};
use crate::thermo::{phonon_noise_amplitude, ThermoParams};
use crate::units::HBAR_OVER_KB;

const CHUNK: usize = 64;

/// Qubit state together with the squared calorimeter temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemState {
    pub psi: QubitState,
    pub xi: f64,
}

impl SystemState {
    pub fn t_e(&self) -> f64 {
        self.xi.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialLevel {
    /// Boltzmann weights over the folded quasi-energies at T_p.
    Thermal,
    /// The bare qubit's Gibbs state at T_p projected onto the Floquet modes at t = 0.
    Projected,
    Fixed(usize),
    Weights([f64; 2]),
}

/// How the calorimeter temperature evolves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Thermal {
    /// Jump kicks, phonon drift and phonon noise.
    Full,
    /// Phonon noise switched off.
    Deterministic,
    /// Temperature held at its initial value.
    Frozen,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Record {
    /// Keep every trajectory's sampled path and jump log.
    Path,
    /// Keep the final temperature and level of each trajectory.
    Final,
    /// Only a histogram of the final temperatures.
    Histogram { bins: usize, lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    pub n_steps: u64,
    /// Steps between recorded samples.
    pub sample_every: u64,
    pub seed: u64,
    pub n_trajectories: usize,
    pub record: Record,
    pub initial: InitialLevel,
    /// Initial temperature, T_p when absent.
    pub initial_t_e: Option<f64>,
    pub thermal: Thermal,
}

impl SimConfig {
    /// Time step 1/(dt_factor ω_q), one sample per drive period, horizon in periods.
    pub fn for_params(
        params: &ModelParams,
        dt_factor: f64,
        horizon_periods: f64,
        seed: u64,
        n_trajectories: usize,
    ) -> Self {
        let dt = params.dt(dt_factor);
        let period = params.period();
        Self {
            dt,
            n_steps: (horizon_periods * period / dt).round() as u64,
            sample_every: ((period / dt).round() as u64).max(1),
            seed,
            n_trajectories,
            record: Record::Final,
            initial: InitialLevel::Thermal,
            initial_t_e: None,
            thermal: Thermal::Full,
        }
    }

    pub fn horizon(&self) -> f64 {
        self.n_steps as f64 * self.dt
    }

    pub fn n_samples(&self) -> usize {
        (self.n_steps / self.sample_every) as usize + 1
    }
}

/// Child generator for trajectory `index`.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpEvent {
    pub time: f64,
    pub s: i8,
    pub n: i32,
    pub omega: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub t_e: Vec<f64>,
    pub populations: Vec<[f64; 2]>,
    pub jumps: Vec<JumpEvent>,
}

/// What happened during one step, split into the ξ increments.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepOutcome {
    pub jump: Option<usize>,
    pub kick: f64,
    pub drift: f64,
    pub noise: f64,
}

/// Scratch buffers reused across steps.
///
/// Also caches, per Floquet level, the total jump rate at a temperature
/// `bound_t` slightly above the current one. Rates grow with temperature, so
/// a uniform draw above `bound·dt` rules out a jump without evaluating any
/// rate; the jump decision is the same as with exact rates.
#[derive(Debug, Clone)]
pub struct Workspace {
    bare: Vec<f64>,
    rates: Vec<f64>,
    bound_t: f64,
    bound: [f64; 2],
}

/// Everything a trajectory needs, precomputed once per parameter set.
#[derive(Debug, Clone)]
pub struct Simulator {
    pub params: ModelParams,
    pub channels: Vec<JumpChannel>,
    quasi: [f64; 2],
    /// |⟨bare level b|φ_r(0)⟩|², bare level 0 excited.
    overlaps: [[f64; 2]; 2],
    kernel: RateKernel,
    kicks: Vec<f64>,
    dt: f64,
    sqrt_dt: f64,
    drift_scale: f64,
    tp5: f64,
    noise_amp: f64,
}

impl Simulator {
    pub fn new(params: &ModelParams, solution: &FloquetSolution, dt: f64) -> Result<Self> {
        params.validate()?;
        if !(dt > 0.0) {
            return Err(Error::InvalidInput(format!("dt = {dt} must be positive")));
        }
        let th: &ThermoParams = &params.thermo;
        let kernel = RateKernel::new(&solution.channels, params.g2);
        let mut bare = vec![0.0; kernel.len()];
        kernel.bare_rates(3.0 * th.t_p, &mut bare);
        let worst: f64 = bare.iter().sum::<f64>() * dt;
        if worst >= 0.05 {
            return Err(Error::TimeStepTooLarge(worst));
        }
        Ok(Self {
            params: *params,
            channels: solution.channels.clone(),
            quasi: solution.spectrum.quasi_energies,
            overlaps: {
                let m = solution.spectrum.basis();
                [0, 1].map(|b| [m[0][b].norm_sqr(), m[1][b].norm_sqr()])
            },
            kicks: solution.channels.iter().map(|c| th.kick(c.omega)).collect(),
            kernel,
            dt,
            sqrt_dt: dt.sqrt(),
            drift_scale: th.sigma() / th.c_over_kb,
            tp5: th.t_p.powi(5),
            noise_amp: phonon_noise_amplitude(th),
        })
    }

    /// Builds the Floquet solution from the parameters.
    pub fn from_params(params: &ModelParams, dt: f64) -> Result<Self> {
        Self::new(params, &params.floquet()?, dt)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn workspace(&self) -> Workspace {
        Workspace {
            bare: vec![0.0; self.kernel.len()],
            rates: vec![0.0; self.kernel.len()],
            bound_t: -1.0,
            bound: [0.0; 2],
        }
    }

    fn refresh_bound(&self, t_e: f64, ws: &mut Workspace) {
        ws.bound_t = 1.1 * t_e + 1e-9;
        self.kernel.bare_rates(ws.bound_t, &mut ws.bare);
        ws.bound = [0.0; 2];
        for (k, &r) in ws.bare.iter().enumerate() {
            match self.channels[k].form {
                OperatorForm::Dephasing => {
                    ws.bound[0] += r;
                    ws.bound[1] += r;
                }
                OperatorForm::Raising => ws.bound[0] += r,
                OperatorForm::Lowering => ws.bound[1] += r,
            }
        }
        // Headroom against rounding in the exact sum.
        ws.bound[0] *= 1.0 + 1e-12;
        ws.bound[1] *= 1.0 + 1e-12;
    }

    /// Probability of starting in level 1 at temperature T.
    pub fn thermal_excited_probability(&self, t: f64) -> f64 {
        let de = (self.quasi[1] - self.quasi[0]) * HBAR_OVER_KB;
        if t == 0.0 {
            return if de > 0.0 {
                0.0
            } else if de < 0.0 {
                1.0
            } else {
                0.5
            };
        }
        1.0 / (1.0 + (de / t).exp())
    }

    /// Probability of level 1 when the bare qubit starts in its Gibbs state at T.
    pub fn projected_excited_probability(&self, t: f64) -> f64 {
        let e = self.params.hbar_omega_q_over_kb;
        let pe = if t > 0.0 {
            1.0 / (1.0 + (e / t).exp())
        } else {
            0.0
        };
        let w = [0, 1].map(|r| pe * self.overlaps[0][r] + (1.0 - pe) * self.overlaps[1][r]);
        w[1] / (w[0] + w[1])
    }

    fn initial_state(&self, cfg: &SimConfig, rng: &mut ChaCha8Rng) -> Result<SystemState> {
        let t0 = cfg.initial_t_e.unwrap_or(self.params.thermo.t_p);
        if !(t0 >= 0.0) {
            return Err(Error::InvalidInput(format!("initial T_e = {t0} < 0")));
        }
        let p1 = match cfg.initial {
            InitialLevel::Thermal => self.thermal_excited_probability(self.params.thermo.t_p),
            InitialLevel::Projected => self.projected_excited_probability(self.params.thermo.t_p),
            InitialLevel::Fixed(r) if r < 2 => r as f64,
            InitialLevel::Fixed(r) => {
                return Err(Error::InvalidInput(format!("level {r} does not exist")))
            }
            InitialLevel::Weights([a, b]) => {
                if !(a >= 0.0 && b >= 0.0 && a + b > 0.0) {
                    return Err(Error::InvalidInput("invalid level weights".into()));
                }
                b / (a + b)
            }
        };
        let u: f64 = rng.random();
        let level = usize::from(u < p1);
        Ok(SystemState {
            psi: QubitState::level(level),
            xi: t0 * t0,
        })
    }

    /// One step driven by a uniform `u` ∈ [0, 1) and a standard normal `z`.
    #[inline]
    pub fn step_with(
        &self,
        state: &mut SystemState,
        u: f64,
        z: f64,
        thermal: Thermal,
        ws: &mut Workspace,
    ) -> Result<StepOutcome> {
        let t_e = state.xi.sqrt();
        if let Some(r) = state.psi.basis_level() {
            if !(t_e < ws.bound_t && 1.25 * t_e > ws.bound_t) {
                self.refresh_bound(t_e, ws);
            }
            let b = ws.bound[r] * self.dt;
            if b <= 0.5 && u >= b {
                return Ok(self.phonon_step(state, t_e, z, thermal, StepOutcome::default()));
            }
        }
        self.step_exact(state, u, z, thermal, ws)
    }

    /// [`Simulator::step_with`] without the cached rate bound.
    pub fn step_exact(
        &self,
        state: &mut SystemState,
        u: f64,
        z: f64,
        thermal: Thermal,
        ws: &mut Workspace,
    ) -> Result<StepOutcome> {
        let t_e = state.xi.sqrt();
        self.kernel.bare_rates(t_e, &mut ws.bare);
        ws.rates.copy_from_slice(&ws.bare);
        let p = state.psi.populations();
        let mut total = 0.0;
        for (k, r) in ws.rates.iter_mut().enumerate() {
            *r *= match self.channels[k].form {
                OperatorForm::Dephasing => p[0] + p[1],
                OperatorForm::Raising => p[0],
                OperatorForm::Lowering => p[1],
            };
            total += *r;
        }
        let prob = total * self.dt;
        if prob > 0.5 {
            return Err(Error::TimeStepTooLarge(prob));
        }
        let mut out = StepOutcome::default();
        if u < prob {
            let target = u / self.dt;
            let mut acc = 0.0;
            let mut pick = None;
            for (k, &r) in ws.rates.iter().enumerate() {
                if r > 0.0 {
                    pick = Some(k);
                    acc += r;
                    if target < acc {
                        break;
                    }
                }
            }
            let k = pick.expect("positive total rate");
            state.psi = jump_form(&state.psi, self.channels[k].form)
                .ok_or_else(|| Error::ImpossibleJump(self.channels[k].label()))?;
            out.jump = Some(k);
            out.kick = self.kicks[k];
        } else if state.psi.basis_level().is_none() {
            let lr = self.kernel.level_rates(&ws.bare);
            state.psi = drift_with(&state.psi, &lr, self.dt);
        }
        Ok(self.phonon_step(state, t_e, z, thermal, out))
    }

    #[inline]
    fn phonon_step(
        &self,
        state: &mut SystemState,
        t_e: f64,
        z: f64,
        thermal: Thermal,
        mut out: StepOutcome,
    ) -> StepOutcome {
        match thermal {
            Thermal::Frozen => return StepOutcome { kick: 0.0, ..out },
            Thermal::Deterministic => {}
            Thermal::Full => out.noise = self.noise_amp * self.sqrt_dt * z,
        }
        out.drift = self.drift_scale * (self.tp5 - state.xi * state.xi * t_e) * self.dt;
        state.xi = (state.xi + out.drift + out.noise + out.kick).abs();
        out
    }

    #[inline]
    pub fn step(
        &self,
        state: &mut SystemState,
        rng: &mut ChaCha8Rng,
        thermal: Thermal,
        ws: &mut Workspace,
    ) -> Result<StepOutcome> {
        let u: f64 = rng.random();
        let z: f64 = if thermal == Thermal::Full {
            rng.sample(StandardNormal)
        } else {
            0.0
        };
        self.step_with(state, u, z, thermal, ws)
    }

    /// Runs trajectory `index` of the ensemble described by `cfg`, calling
    /// `sample(k, state)` at every recorded step `k`.
    pub fn run_with<F>(
        &self,
        cfg: &SimConfig,
        index: u64,
        mut sample: F,
    ) -> Result<(SystemState, Vec<JumpEvent>)>
    where
        F: FnMut(usize, &SystemState),
    {
        if cfg.sample_every == 0 {
            return Err(Error::InvalidInput("sample_every must be >= 1".into()));
        }
        if (cfg.dt - self.dt).abs() > 1e-12 * self.dt {
            return Err(Error::InvalidInput(
                "config dt differs from simulator dt".into(),
            ));
        }
        let mut rng = trajectory_rng(cfg.seed, index);
        let mut state = self.initial_state(cfg, &mut rng)?;
        let mut ws = self.workspace();
        let log = matches!(cfg.record, Record::Path);
        let mut jumps = Vec::new();
        sample(0, &state);
        let mut next = cfg.sample_every;
        for k in 1..=cfg.n_steps {
            let o = self.step(&mut state, &mut rng, cfg.thermal, &mut ws)?;
            if log {
                if let Some(j) = o.jump {
                    let c = &self.channels[j];
                    jumps.push(JumpEvent {
                        time: k as f64 * self.dt,
                        s: c.s,
                        n: c.n,
                        omega: c.omega,
                    });
                }
            }
            if k == next {
                sample((k / cfg.sample_every) as usize, &state);
                next += cfg.sample_every;
            }
        }
        Ok((state, jumps))
    }

    pub fn run_trajectory(&self, cfg: &SimConfig, index: u64) -> Result<TrajectoryRecord> {
        let mut rec = TrajectoryRecord::default();
        let every = cfg.sample_every as f64;
        let (_, jumps) = self.run_with(cfg, index, |j, s| {
            rec.times.push(j as f64 * every * self.dt);
            rec.t_e.push(s.t_e());
            rec.populations.push(s.psi.populations());
        })?;
        rec.jumps = jumps;
        Ok(rec)
    }

    /// Runs `cfg.n_trajectories` trajectories on `threads` workers.
    pub fn run_ensemble(&self, cfg: &SimConfig, threads: usize) -> Result<Ensemble> {
        if cfg.n_trajectories == 0 {
            return Err(Error::InvalidInput("n_trajectories must be >= 1".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
        let n = cfg.n_trajectories;
        let n_samples = cfg.n_samples();
        let chunks: Vec<usize> = (0..n.div_ceil(CHUNK)).collect();
        let parts: Vec<Result<ChunkResult>> = pool.install(|| {
            chunks
                .par_iter()
                .map(|&c| self.run_chunk(cfg, c * CHUNK, ((c + 1) * CHUNK).min(n), n_samples))
                .collect()
        });
        let mut sum = vec![0.0; n_samples];
        let mut sum2 = vec![0.0; n_samples];
        let mut final_t_e = Vec::with_capacity(n);
        let mut final_level = Vec::with_capacity(n);
        let mut records = Vec::new();
        for part in parts {
            let part = part?;
            for (a, b) in sum.iter_mut().zip(&part.sum) {
                *a += b;
            }
            for (a, b) in sum2.iter_mut().zip(&part.sum2) {
                *a += b;
            }
            final_t_e.extend(part.final_t_e);
            final_level.extend(part.final_level);
            records.extend(part.records);
        }
        let inv = 1.0 / n as f64;
        let mean: Vec<f64> = sum.iter().map(|s| s * inv).collect();
        let std = sum2
            .iter()
            .zip(&mean)
            .map(|(s2, m)| (s2 * inv - m * m).max(0.0).sqrt())
            .collect();
        let hist = match cfg.record {
            Record::Histogram { bins, lo, hi } => Some(histogram(&final_t_e, bins, lo, hi)?),
            _ => None,
        };
        if let Record::Histogram { .. } = cfg.record {
            final_t_e.clear();
            final_level.clear();
        }
        Ok(Ensemble {
            times: (0..n_samples)
                .map(|j| j as f64 * cfg.sample_every as f64 * self.dt)
                .collect(),
            mean,
            std,
            final_t_e,
            final_level,
            histogram: hist,
            records,
            n_trajectories: n,
        })
    }

    fn run_chunk(
        &self,
        cfg: &SimConfig,
        lo: usize,
        hi: usize,
        n_samples: usize,
    ) -> Result<ChunkResult> {
        let mut out = ChunkResult {
            sum: vec![0.0; n_samples],
            sum2: vec![0.0; n_samples],
            final_t_e: Vec::with_capacity(hi - lo),
            final_level: Vec::with_capacity(hi - lo),
            records: Vec::new(),
        };
        for i in lo..hi {
            if matches!(cfg.record, Record::Path) {
                let rec = self.run_trajectory(cfg, i as u64)?;
                for (j, &t) in rec.t_e.iter().enumerate() {
                    out.sum[j] += t;
                    out.sum2[j] += t * t;
                }
                out.final_t_e.push(*rec.t_e.last().expect("initial sample"));
                let p = rec.populations.last().expect("initial sample");
                out.final_level.push(u8::from(p[1] > p[0]));
                out.records.push(rec);
            } else {
                let (sum, sum2) = (&mut out.sum, &mut out.sum2);
                let (state, _) = self.run_with(cfg, i as u64, |j, s| {
                    let t = s.t_e();
                    sum[j] += t;
                    sum2[j] += t * t;
                })?;
                out.final_t_e.push(state.t_e());
                let p = state.psi.populations();
                out.final_level.push(u8::from(p[1] > p[0]));
            }
        }
        Ok(out)
    }
}

struct ChunkResult {
    sum: Vec<f64>,
    sum2: Vec<f64>,
    final_t_e: Vec<f64>,
    final_level: Vec<u8>,
    records: Vec<TrajectoryRecord>,
}

/// Aggregated ensemble output, in trajectory-index order.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub times: Vec<f64>,
    /// Ensemble mean of T_e at each sample time.
    pub mean: Vec<f64>,
    /// Population standard deviation of T_e at each sample time.
    pub std: Vec<f64>,
    pub final_t_e: Vec<f64>,
    /// Final dominant Floquet level of each trajectory.
    pub final_level: Vec<u8>,
    pub histogram: Option<Histogram>,
    pub records: Vec<TrajectoryRecord>,
    pub n_trajectories: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sim(g2: f64) -> Simulator {
        let p = ModelParams::reference().with_g2(g2);
        Simulator::from_params(&p, p.dt(100.0)).unwrap()
    }

    #[test]
    fn forced_raising_jump() {
        let s = sim(0.01);
        let g = QubitState::level(0);
        let rates = crate::qubit::channel_rates(&g, 0.1, &s.channels, 0.01).unwrap();
        let k = s
            .channels
            .iter()
            .position(|c| c.form == OperatorForm::Raising)
            .unwrap();
        assert!(rates[k] > 0.0);
        let u = s.dt() * (rates[..k].iter().sum::<f64>() + 0.5 * rates[k]);
        let mut st = SystemState { psi: g, xi: 0.01 };
        let mut ws = s.workspace();
        let o = s
            .step_with(&mut st, u, 0.0, Thermal::Deterministic, &mut ws)
            .unwrap();
        assert_eq!(o.jump, Some(k));
        assert_eq!(st.psi, QubitState::level(1));
        assert_eq!(o.kick, s.params.thermo.kick(s.channels[k].omega));
        assert_eq!(st.xi, 0.01 + o.drift + o.kick);
        assert!(o.drift.abs() < 1e-15);
    }

    #[test]
    fn zero_coupling_relaxes_deterministically() {
        let s = sim(0.0);
        let mut st = SystemState {
            psi: QubitState::level(0),
            xi: 0.02,
        };
        let mut ws = s.workspace();
        let mut last = st.xi;
        for _ in 0..1000 {
            let o = s
                .step_with(&mut st, 0.3, 1.0, Thermal::Deterministic, &mut ws)
                .unwrap();
            assert!(o.jump.is_none());
            assert!(st.xi < last && st.xi > 0.01);
            last = st.xi;
        }
        assert_eq!(st.psi, QubitState::level(0));
    }

    #[test]
    fn horizon_zero_keeps_initial_sample() {
        let s = sim(0.01);
        let mut cfg = SimConfig::for_params(&s.params, 100.0, 0.0, 1, 1);
        cfg.record = Record::Path;
        let r = s.run_trajectory(&cfg, 0).unwrap();
        assert_eq!(r.times, vec![0.0]);
        assert_eq!(r.t_e, vec![0.1]);
    }
}
