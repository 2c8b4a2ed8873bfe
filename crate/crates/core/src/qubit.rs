//! Piecewise-deterministic qubit process in the Floquet basis.

use crate::error::{Error, Result};
use crate::floquet::{JumpChannel, OperatorForm};
use crate::linalg::{C64, ONE, ZERO};
use crate::units::HBAR_OVER_KB;

/// Qubit state `c₀ φ₀(0) + c₁ φ₁(0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub c: [C64; 2],
}

impl QubitState {
    pub fn level(r: usize) -> Self {
        let mut c = [ZERO; 2];
        c[r] = ONE;
        Self { c }
    }

    pub fn new(c0: C64, c1: C64) -> Self {
        Self { c: [c0, c1] }
    }

    pub fn populations(&self) -> [f64; 2] {
        [self.c[0].norm_sqr(), self.c[1].norm_sqr()]
    }

    pub fn norm(&self) -> f64 {
        let p = self.populations();
        (p[0] + p[1]).sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self {
            c: [self.c[0] / n, self.c[1] / n],
        }
    }

    /// Level index if the state is (up to phase) a Floquet basis vector.
    pub fn basis_level(&self) -> Option<usize> {
        match (self.c[0] == ZERO, self.c[1] == ZERO) {
            (false, true) => Some(0),
            (true, false) => Some(1),
            _ => None,
        }
    }
}

/// Bath factor ω e^x/(e^x−1) as a function of the quantum energy E = ħω/k_B
/// (K) and temperature T (K), returned in rad/s. Both signs share one
/// exponential: the second value is the rate at −ω.
#[inline]
fn bath_pair(e: f64, t: f64) -> (f64, f64) {
    // e > 0 here.
    let w = e / HBAR_OVER_KB;
    if t == 0.0 {
        return (w, 0.0);
    }
    let x = e / t;
    if x < 1e-6 {
        // x/(1−e^{−x}) = 1 + x/2 + x²/12 + O(x⁴)
        let base = t / HBAR_OVER_KB;
        let s = x * x / 12.0;
        return (base * (1.0 + 0.5 * x + s), base * (1.0 - 0.5 * x + s));
    }
    let (m, em) = if x > 0.5 {
        let em = (-x).exp();
        (1.0 - em, em)
    } else {
        let m = -(-x).exp_m1();
        (m, 1.0 - m)
    };
    let up = w / m;
    (up, up * em)
}

/// Γ(ω, T) = g² ω e^x / (e^x − 1), x = ħω/(k_B T), in 1/s.
pub fn gamma_rate(omega: f64, t_e: f64, g2: f64) -> Result<f64> {
    if !(t_e >= 0.0) {
        return Err(Error::Domain(format!("T_e = {t_e} K < 0")));
    }
    Ok(g2 * gamma_unchecked(omega, t_e))
}

#[inline]
fn gamma_unchecked(omega: f64, t_e: f64) -> f64 {
    if omega == 0.0 {
        return t_e / HBAR_OVER_KB;
    }
    let (up, down) = bath_pair(omega.abs() * HBAR_OVER_KB, t_e);
    if omega > 0.0 {
        up
    } else {
        down
    }
}

/// Precomputed evaluation of all channel rates at a given temperature.
///
/// Channels sharing |ω| are evaluated with a single exponential.
#[derive(Debug, Clone)]
pub struct RateKernel {
    g2: f64,
    groups: Vec<RateGroup>,
    weights: Vec<f64>,
    forms: Vec<OperatorForm>,
}

#[derive(Debug, Clone)]
struct RateGroup {
    energy: f64,
    /// (channel index, emits into the bath: ω > 0)
    members: Vec<(usize, bool)>,
}

impl RateKernel {
    pub fn new(channels: &[JumpChannel], g2: f64) -> Self {
        let mut groups: Vec<RateGroup> = Vec::new();
        for (k, ch) in channels.iter().enumerate() {
            let e = ch.omega.abs() * HBAR_OVER_KB;
            let member = (k, ch.omega > 0.0);
            match groups
                .iter_mut()
                .find(|g| (g.energy - e).abs() <= 1e-12 * e.max(1e-300))
            {
                Some(g) => g.members.push(member),
                None => groups.push(RateGroup {
                    energy: e,
                    members: vec![member],
                }),
            }
        }
        Self {
            g2,
            groups,
            weights: channels.iter().map(JumpChannel::weight).collect(),
            forms: channels.iter().map(|c| c.form).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Γ(ω_k, T)|A_k|² for every channel k, ignoring the state.
    #[inline]
    pub fn bare_rates(&self, t_e: f64, out: &mut [f64]) {
        for g in &self.groups {
            let (up, down) = if g.energy == 0.0 {
                let r = t_e / HBAR_OVER_KB;
                (r, r)
            } else {
                bath_pair(g.energy, t_e)
            };
            for &(k, emits) in &g.members {
                out[k] = self.g2 * self.weights[k] * if emits { up } else { down };
            }
        }
    }

    /// Per-channel jump intensities Γ_k ‖A_k ψ‖²; returns their sum.
    #[inline]
    pub fn rates(&self, state: &QubitState, t_e: f64, out: &mut [f64]) -> f64 {
        self.bare_rates(t_e, out);
        let p = state.populations();
        let mut total = 0.0;
        for (r, form) in out.iter_mut().zip(&self.forms) {
            *r *= match form {
                OperatorForm::Dephasing => p[0] + p[1],
                OperatorForm::Raising => p[0],
                OperatorForm::Lowering => p[1],
            };
            total += *r;
        }
        total
    }

    /// Sums of bare rates per operator form.
    pub fn level_rates(&self, bare: &[f64]) -> LevelRates {
        let mut lr = LevelRates::default();
        for (r, form) in bare.iter().zip(&self.forms) {
            match form {
                OperatorForm::Dephasing => lr.dephase += r,
                OperatorForm::Raising => lr.raise += r,
                OperatorForm::Lowering => lr.lower += r,
            }
        }
        lr
    }
}

/// Σ Γ|A|² grouped by operator form; Σ A†A = raise·P₀ + lower·P₁ + dephase·1.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LevelRates {
    pub raise: f64,
    pub lower: f64,
    pub dephase: f64,
}

/// Per-channel rates Γ(ω_k, T_e)‖A_k ψ‖².
pub fn channel_rates(
    state: &QubitState,
    t_e: f64,
    channels: &[JumpChannel],
    g2: f64,
) -> Result<Vec<f64>> {
    if !(t_e >= 0.0) {
        return Err(Error::Domain(format!("T_e = {t_e} K < 0")));
    }
    if (state.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "state norm {} is not 1",
            state.norm()
        )));
    }
    let kernel = RateKernel::new(channels, g2);
    let mut out = vec![0.0; channels.len()];
    kernel.rates(state, t_e, &mut out);
    Ok(out)
}

/// Explicit Euler step of the no-jump drift followed by renormalization.
#[inline]
pub fn drift_with(state: &QubitState, lr: &LevelRates, dt: f64) -> QubitState {
    let p = state.populations();
    let mean = lr.raise * p[0] + lr.lower * p[1] + lr.dephase;
    let f0 = 1.0 + 0.5 * dt * (mean - lr.raise - lr.dephase);
    let f1 = 1.0 + 0.5 * dt * (mean - lr.lower - lr.dephase);
    QubitState::new(state.c[0] * f0, state.c[1] * f1).normalized()
}

/// ψ → ψ − (i/ħ) G(ψ) dt, renormalized.
pub fn drift_step(
    state: &QubitState,
    t_e: f64,
    channels: &[JumpChannel],
    g2: f64,
    dt: f64,
) -> Result<QubitState> {
    if !(t_e >= 0.0) {
        return Err(Error::Domain(format!("T_e = {t_e} K < 0")));
    }
    if dt == 0.0 {
        return Ok(*state);
    }
    let kernel = RateKernel::new(channels, g2);
    let mut bare = vec![0.0; channels.len()];
    kernel.bare_rates(t_e, &mut bare);
    Ok(drift_with(state, &kernel.level_rates(&bare), dt))
}

/// A_k ψ / ‖A_k ψ‖ with the global phase dropped.
#[inline]
pub fn jump_form(state: &QubitState, form: OperatorForm) -> Option<QubitState> {
    match form {
        OperatorForm::Raising if state.c[0] != ZERO => Some(QubitState::level(1)),
        OperatorForm::Lowering if state.c[1] != ZERO => Some(QubitState::level(0)),
        OperatorForm::Dephasing => {
            let n = state.norm();
            (n > 0.0).then(|| QubitState::new(-state.c[0] / n, state.c[1] / n))
        }
        _ => None,
    }
}

pub fn apply_jump(state: &QubitState, channel: &JumpChannel) -> Result<QubitState> {
    jump_form(state, channel.form).ok_or_else(|| Error::ImpossibleJump(channel.label()))
}
