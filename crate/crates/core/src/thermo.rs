//! Calorimeter temperature process in the squared temperature ξ = T_e².

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{HBAR, HBAR_OVER_KB, KB, ZETA_5};

/// Microscopic decomposition of the heat-capacity coefficient, C = Nγ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElectronGas {
    pub n: f64,
    /// Per-electron coefficient γ (J/K²).
    pub gamma: f64,
    /// Fermi energy (J), if known.
    pub epsilon_f: Option<f64>,
}

impl ElectronGas {
    /// γ = π² k_B² / (4 ε_F).
    pub fn gamma_from_fermi_energy(epsilon_f: f64) -> f64 {
        PI * PI * KB * KB / (4.0 * epsilon_f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoParams {
    /// Electron–phonon coupling times volume, ΣV (W/K⁵).
    pub sigma_v: f64,
    /// Phonon temperature (K).
    pub t_p: f64,
    /// Heat-capacity coefficient C/k_B (1/K): dT_e² = dE / C.
    pub c_over_kb: f64,
    pub electrons: Option<ElectronGas>,
}

impl ThermoParams {
    pub fn new(sigma_v: f64, t_p: f64, c_over_kb: f64) -> Result<Self> {
        let p = Self {
            sigma_v,
            t_p,
            c_over_kb,
            electrons: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("SigmaV", self.sigma_v),
            ("T_p", self.t_p),
            ("C_over_kB", self.c_over_kb),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "{name} = {v} must be positive"
                )));
            }
        }
        if let Some(e) = &self.electrons {
            if let Some(ef) = e.epsilon_f {
                let want = ElectronGas::gamma_from_fermi_energy(ef);
                if ((e.gamma - want) / want).abs() > 1e-12 {
                    return Err(Error::InvalidInput(format!(
                        "gamma = {:e} inconsistent with epsilon_F (expected {want:e})",
                        e.gamma
                    )));
                }
            }
            let c = e.n * e.gamma / KB;
            if ((c - self.c_over_kb) / self.c_over_kb).abs() > 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "N gamma / k_B = {c:e} differs from C_over_kB = {:e}",
                    self.c_over_kb
                )));
            }
        }
        Ok(())
    }

    /// ΣV/k_B in 1/(s K⁴).
    #[inline]
    pub fn sigma(&self) -> f64 {
        self.sigma_v / KB
    }

    /// Temperature kick ħω/C (K²) of a quantum ħω.
    #[inline]
    pub fn kick(&self, omega: f64) -> f64 {
        omega * HBAR_OVER_KB / self.c_over_kb
    }

    /// Variance rate 10 ΣV k_B T_p⁶ / C² of the phonon noise (K⁴/s).
    pub fn noise_variance_rate(&self) -> f64 {
        let a = phonon_noise_amplitude(self);
        a * a
    }
}

#[inline]
fn reflect(x: f64) -> f64 {
    x.abs()
}

/// ξ after absorbing a quantum ħω, reflected at ξ = 0.
#[inline]
pub fn jump_kick(xi: f64, omega: f64, params: &ThermoParams) -> f64 {
    reflect(xi + params.kick(omega))
}

/// Deterministic phonon drift ΣV(T_p⁵ − ξ^{5/2})/C in K²/s.
#[inline]
pub fn phonon_drift(xi: f64, params: &ThermoParams) -> f64 {
    let tp2 = params.t_p * params.t_p;
    let tp5 = tp2 * tp2 * params.t_p;
    params.sigma() * (tp5 - xi * xi * xi.sqrt()) / params.c_over_kb
}

/// Noise amplitude √(10ΣV k_B) T_p³ / C in K²/√s, frozen at T_p.
#[inline]
pub fn phonon_noise_amplitude(params: &ThermoParams) -> f64 {
    (10.0 * params.sigma()).sqrt() * params.t_p.powi(3) / params.c_over_kb
}

/// Σ = 12 κ² ζ(5) m k_B⁵ / (π k_F v_s² ħ⁶) in W K⁻⁵ m⁻³.
pub fn sigma_from_material(kappa_ep: f64, m: f64, k_f: f64, v_s: f64) -> Result<f64> {
    for (name, v) in [("kappa", kappa_ep), ("m", m), ("k_F", k_f), ("v_s", v_s)] {
        if !(v > 0.0) {
            return Err(Error::InvalidInput(format!(
                "{name} = {v} must be positive"
            )));
        }
    }
    // Grouped to keep intermediates inside f64 range.
    let kb_over_hbar = KB / HBAR;
    Ok(
        12.0 * kappa_ep * kappa_ep * ZETA_5 * m * KB * kb_over_hbar.powi(4)
            / (PI * k_f * v_s * v_s * HBAR * HBAR),
    )
}

/// One Euler–Maruyama step `reflect(ξ + drift·dt + amp·dW + Σ kicks)`.
#[inline]
pub fn euler_step(xi: f64, drift: f64, dt: f64, noise_amp: f64, dw: f64, kicks: f64) -> f64 {
    reflect(xi + drift * dt + noise_amp * dw + kicks)
}
