//! Reduced description of the calorimeter temperature: rate matrices,
//! equilibrium Floquet populations, the effective drift J(X) and diffusion
//! S(X) of the squared temperature X, its steady state and linearization,
//! plus grid integrators for the Fokker–Planck and the full two-component
//! master equation.
//!
//! Everything is expressed in physical time with C = Nγ.

mod fp;
mod master;

pub use fp::{integrate_fp, stationary_density, Density, DensityPath, FpOperator, Grid};
pub use master::{integrate_master, kick_aligned_spacing, MasterOptions, MasterPath, MasterState};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::floquet::{FloquetSpectrum, JumpChannel, OperatorForm};
use crate::params::ModelParams;
use crate::qubit::gamma_rate;
use crate::thermo::{phonon_drift, ThermoParams};
use crate::units::HBAR_OVER_KB;

type Mat = [[f64; 2]; 2];

/// One transition `source → target` with frequency ω and weight |D|².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub target: usize,
    pub source: usize,
    pub omega: f64,
    pub weight: f64,
    /// ξ kick ħω/C (K²).
    pub kick: f64,
}

/// Transition list and thermal parameters of the reduced process.
#[derive(Debug, Clone)]
pub struct EffectiveModel {
    pub thermo: ThermoParams,
    pub g2: f64,
    pub transitions: Vec<Transition>,
}

impl EffectiveModel {
    pub fn new(thermo: &ThermoParams, g2: f64, channels: &[JumpChannel]) -> Self {
        let mut transitions = Vec::new();
        for c in channels {
            let (target, source) = c.levels();
            let t = Transition {
                target,
                source,
                omega: c.omega,
                weight: c.weight(),
                kick: thermo.kick(c.omega),
            };
            transitions.push(t);
            if c.form == OperatorForm::Dephasing {
                // D₀₀ₙ = −D₁₁ₙ: the same channel acts within level 0.
                transitions.push(Transition {
                    target: 0,
                    source: 0,
                    ..t
                });
            }
        }
        Self {
            thermo: *thermo,
            g2,
            transitions,
        }
    }

    pub fn from_params(params: &ModelParams) -> Result<Self> {
        let sol = params.floquet()?;
        Ok(Self::new(&params.thermo, params.g2, &sol.channels))
    }

    /// Phonon-only model (no transitions).
    pub fn phonons_only(thermo: &ThermoParams) -> Self {
        Self {
            thermo: *thermo,
            g2: 0.0,
            transitions: Vec::new(),
        }
    }

    fn coupled(&self) -> bool {
        self.g2 > 0.0 && !self.transitions.is_empty()
    }

    pub fn noise(&self) -> f64 {
        self.thermo.noise_variance_rate()
    }
}

/// Kramers–Moyal rate matrices `G⁽ᵏ⁾_{r,s}(X) = Σ_n (−δ)ᵏ 𝒢_{r,s,n}(X)` where
/// δ is the ξ kick of the transition s → r and 𝒢 = Γ(ω, √X)|D|².
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateMatrices {
    pub g: [Mat; 3],
}

pub fn rate_matrices(model: &EffectiveModel, x: f64) -> Result<RateMatrices> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("X = {x} K^2 must be positive")));
    }
    let t = x.sqrt();
    let mut g = [[[0.0; 2]; 2]; 3];
    for tr in &model.transitions {
        let rate = gamma_rate(tr.omega, t, model.g2)? * tr.weight;
        let d = -tr.kick;
        g[0][tr.target][tr.source] += rate;
        g[1][tr.target][tr.source] += d * rate;
        g[2][tr.target][tr.source] += d * d * rate;
    }
    Ok(RateMatrices { g })
}

/// Null space and complement of the level-transition generator
/// `M = [[−G₁₀, G₀₁], [G₁₀, −G₀₁]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralProjection {
    /// Equilibrium Floquet populations, M Q = 0, ⟨Z|Q⟩ = 1.
    pub q: [f64; 2],
    /// Nonzero eigenvalue −(G₁₀ + G₀₁).
    pub lambda: f64,
    pub q_perp: [f64; 2],
    pub v: [f64; 2],
    pub z: [f64; 2],
}

impl SpectralProjection {
    pub fn generator(g0: &Mat) -> Mat {
        [[-g0[1][0], g0[0][1]], [g0[1][0], -g0[0][1]]]
    }
}

fn symplectic(v: [f64; 2]) -> [f64; 2] {
    [-v[1], v[0]]
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn matvec(m: &Mat, v: [f64; 2]) -> [f64; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

pub fn spectral_projection(g0: &Mat) -> Result<SpectralProjection> {
    let up = g0[1][0];
    let down = g0[0][1];
    let sum = up + down;
    if !(sum > 0.0) {
        return Err(Error::DegenerateRates(sum));
    }
    let q = [down / sum, up / sum];
    let z = [1.0, 1.0];
    Ok(SpectralProjection {
        q,
        lambda: -sum,
        q_perp: symplectic(q),
        v: symplectic(z),
        z,
    })
}

/// Effective drift and diffusion at one point, with their components.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct CoeffPoint {
    pub x: f64,
    pub j: f64,
    pub s: f64,
    pub phonon_drift: f64,
    pub j1: f64,
    pub j2: f64,
    pub phonon_noise: f64,
    pub delta1: f64,
    pub delta2: f64,
}

struct Local {
    a: f64,
    q: [f64; 2],
    lambda: f64,
    qp: [f64; 2],
    g1q: [f64; 2],
    zg1q: f64,
    zg1v: f64,
    qp_g1q: f64,
    zg2q: f64,
}

impl Local {
    fn wu_over_lambda(&self) -> f64 {
        self.zg1v * self.qp_g1q / self.lambda
    }
}

fn local(model: &EffectiveModel, x: f64) -> Result<Local> {
    let a = phonon_drift(x, &model.thermo);
    let rm = rate_matrices(model, x)?;
    let p = spectral_projection(&rm.g[0])?;
    let g1q = matvec(&rm.g[1], p.q);
    let g1v = matvec(&rm.g[1], p.v);
    let g2q = matvec(&rm.g[2], p.q);
    Ok(Local {
        a,
        q: p.q,
        lambda: p.lambda,
        qp: p.q_perp,
        g1q,
        zg1q: dot(p.z, g1q),
        zg1v: dot(p.z, g1v),
        qp_g1q: dot(p.q_perp, g1q),
        zg2q: dot(p.z, g2q),
    })
}

/// Coefficients at `x`, with derivatives by central differences of step `h`
/// (reduced to x/2 close to the origin).
pub fn coefficients_at(model: &EffectiveModel, x: f64, h: f64) -> Result<CoeffPoint> {
    if !(x > 0.0) {
        return Err(Error::SingularBoundary);
    }
    let a = phonon_drift(x, &model.thermo);
    let b = model.noise();
    let mut out = CoeffPoint {
        x,
        phonon_drift: a,
        phonon_noise: b,
        j: a,
        s: b,
        ..CoeffPoint::default()
    };
    if !model.coupled() {
        return Ok(out);
    }
    let h = h.min(0.5 * x);
    let c = local(model, x)?;
    let p = local(model, x + h)?;
    let m = local(model, x - h)?;
    let inv = 0.5 / h;
    let dq = [(p.q[0] - m.q[0]) * inv, (p.q[1] - m.q[1]) * inv];
    let dg1q = [(p.g1q[0] - m.g1q[0]) * inv, (p.g1q[1] - m.g1q[1]) * inv];
    let dwu = (p.wu_over_lambda() - m.wu_over_lambda()) * inv;
    out.j1 = -c.zg1q;
    out.j2 = c.zg1v / c.lambda * (dot(c.qp, dg1q) - c.a * dot(c.qp, dq)) - dwu;
    out.delta1 = c.zg2q;
    out.delta2 = -2.0 * c.wu_over_lambda();
    out.j = a + out.j1 + out.j2;
    out.s = b + out.delta1 + out.delta2;
    Ok(out)
}

/// Tabulated coefficients on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectiveCoeffs {
    pub points: Vec<CoeffPoint>,
    pub h: f64,
}

impl EffectiveCoeffs {
    pub fn x(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.x).collect()
    }
    pub fn j(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.j).collect()
    }
    pub fn s(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.s).collect()
    }
}

pub fn drift_and_diffusion(model: &EffectiveModel, grid: &Grid) -> Result<EffectiveCoeffs> {
    if !(grid.x0 > 0.0) {
        return Err(Error::SingularBoundary);
    }
    let points: Result<Vec<CoeffPoint>> = (0..grid.n)
        .into_par_iter()
        .map(|i| coefficients_at(model, grid.x(i), grid.h))
        .collect();
    Ok(EffectiveCoeffs {
        points: points?,
        h: grid.h,
    })
}

/// Default coefficient grid: 2048 points on `[(T_p/10)², (3 T_S)²]`.
pub fn default_grid(thermo: &ThermoParams, t_s_estimate: f64) -> Result<Grid> {
    let lo = (0.1 * thermo.t_p).powi(2);
    let hi = (3.0 * t_s_estimate.max(thermo.t_p)).powi(2);
    Grid::spanning(lo, hi, 2048)
}

/// Roots of J(X) = 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteadyState {
    /// All roots found on the grid (K²), ascending.
    pub roots: Vec<f64>,
    /// Designated root (K²).
    pub x_s: f64,
}

impl SteadyState {
    pub fn t_s(&self) -> f64 {
        self.x_s.sqrt()
    }

    /// Re-designates the root closest to a Monte Carlo mean temperature.
    pub fn nearest_to(&mut self, t_mean: f64) {
        let x = t_mean * t_mean;
        if let Some(r) = self
            .roots
            .iter()
            .copied()
            .min_by(|a, b| (a - x).abs().total_cmp(&(b - x).abs()))
        {
            self.x_s = r;
        }
    }
}

/// Brackets sign changes of J on the grid and refines each by bisection to
/// 1e-12 K².
pub fn steady_state(model: &EffectiveModel, grid: &Grid) -> Result<SteadyState> {
    let j = |x: f64| coefficients_at(model, x, grid.h).map(|p| p.j);
    let xs = grid.points();
    let js: Result<Vec<f64>> = xs.par_iter().map(|&x| j(x)).collect();
    let js = js?;
    let mut roots = Vec::new();
    for i in 0..xs.len() {
        if js[i] == 0.0 {
            roots.push(xs[i]);
            continue;
        }
        if i + 1 < xs.len() && js[i] * js[i + 1] < 0.0 {
            let (mut a, mut b) = (xs[i], xs[i + 1]);
            let mut fa = js[i];
            while b - a > 1e-12 {
                let m = 0.5 * (a + b);
                let fm = j(m)?;
                if fm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if fa * fm < 0.0 {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            roots.push(0.5 * (a + b));
        }
    }
    if roots.is_empty() {
        return Err(Error::NoSteadyState);
    }
    if roots.len() > 1 {
        log::warn!("drift has {} roots: {:?}", roots.len(), roots);
    }
    Ok(SteadyState {
        x_s: roots[0],
        roots,
    })
}

/// Closed-form zero-temperature steady state of the monochromatic drive:
///
/// T_S⁵ = T_p⁵ + (g²ħ/ΣV) [ω_L² sin²θ + (ω₊³ sin⁴(θ/2) + ω₋³ cos⁴(θ/2)) / (ω₊ sin⁴(θ/2) + ω₋ cos⁴(θ/2))]
///
/// with ω± = ω_L ± ν.
pub fn closed_form_ts(params: &ModelParams, spectrum: &FloquetSpectrum) -> Result<f64> {
    let theta = spectrum.theta.ok_or_else(|| {
        Error::InvalidInput("closed form requires the monochromatic spectrum".into())
    })?;
    let wl = spectrum.omega_l;
    let nu = spectrum.nu;
    let (s, c) = (0.5 * theta).sin_cos();
    let (s4, c4) = (s.powi(4), c.powi(4));
    let (wp, wm) = (wl + nu, wl - nu);
    let bracket =
        wl * wl * theta.sin().powi(2) + (wp.powi(3) * s4 + wm.powi(3) * c4) / (wp * s4 + wm * c4);
    let th = &params.thermo;
    Ok((th.t_p.powi(5) + params.g2 * HBAR_OVER_KB * bracket / th.sigma()).powf(0.2))
}

/// Steady state with every rate taken at zero electron temperature:
/// T_S⁵ = T_p⁵ + C j₁(T = 0) / ΣV, with j₁ the mean jump heating at the
/// zero-temperature equilibrium populations.
pub fn zero_temperature_ts(model: &EffectiveModel) -> Result<f64> {
    let th = &model.thermo;
    if !model.coupled() {
        return Ok(th.t_p);
    }
    let mut g0 = [[0.0; 2]; 2];
    let mut g1 = [[0.0; 2]; 2];
    for tr in &model.transitions {
        let rate = gamma_rate(tr.omega, 0.0, model.g2)? * tr.weight;
        g0[tr.target][tr.source] += rate;
        g1[tr.target][tr.source] -= tr.kick * rate;
    }
    let p = spectral_projection(&g0)?;
    let j1 = -dot(p.z, matvec(&g1, p.q));
    Ok((th.t_p.powi(5) + th.c_over_kb * j1 / th.sigma()).powf(0.2))
}

/// Ornstein–Uhlenbeck approximation around a steady state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OuLinearization {
    pub x_s: f64,
    /// dJ/dX at X_S (1/s).
    pub slope: f64,
    pub tau: f64,
    /// S(X_S) (K⁴/s).
    pub s: f64,
    /// Stationary variance of X, S τ / 2 (K⁴).
    pub variance: f64,
}

impl OuLinearization {
    /// Lorentzian S τ² / (1 + ω²τ²).
    pub fn lorentzian(&self, omega: f64) -> f64 {
        let wt = omega * self.tau;
        self.s * self.tau * self.tau / (1.0 + wt * wt)
    }

    /// One-sided spectral density of X per unit ω, integrating to the variance.
    pub fn one_sided_psd(&self, omega: f64) -> f64 {
        self.lorentzian(omega) / std::f64::consts::PI
    }

    /// Stationary standard deviation of T = √X to leading order.
    pub fn t_std(&self) -> f64 {
        self.variance.sqrt() / (2.0 * self.x_s.sqrt())
    }
}

pub fn ou_linearization(model: &EffectiveModel, x_s: f64, h: f64) -> Result<OuLinearization> {
    let h = h.min(0.5 * x_s);
    let jp = coefficients_at(model, x_s + h, h)?.j;
    let jm = coefficients_at(model, x_s - h, h)?.j;
    let slope = (jp - jm) / (2.0 * h);
    if !(slope < 0.0) {
        return Err(Error::Unstable(slope));
    }
    let tau = -1.0 / slope;
    let s = coefficients_at(model, x_s, h)?.s;
    Ok(OuLinearization {
        x_s,
        slope,
        tau,
        s,
        variance: 0.5 * s * tau,
    })
}
