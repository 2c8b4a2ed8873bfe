use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::floquet::{self, FloquetSolution, PeriodicHamiltonian};
use crate::thermo::ThermoParams;
use crate::units::omega_from_k;

/// Physical parameters of the driven qubit and its calorimeter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Qubit level spacing ħω_q/k_B (K).
    pub hbar_omega_q_over_kb: f64,
    pub omega_l_over_omega_q: f64,
    pub kappa: f64,
    /// Squared qubit–calorimeter coupling g².
    pub g2: f64,
    pub thermo: ThermoParams,
}

impl ModelParams {
    /// Reference parameter set: 1 K qubit driven at resonance with κ = 0.05,
    /// ΣV = 2e-12 W/K⁵, T_p = 0.1 K, C = 1500 k_B/K and g² = 0.01.
    pub fn reference() -> Self {
        Self {
            hbar_omega_q_over_kb: 1.0,
            omega_l_over_omega_q: 1.0,
            kappa: 0.05,
            g2: 0.01,
            thermo: ThermoParams {
                sigma_v: 2e-12,
                t_p: 0.1,
                c_over_kb: 1500.0,
                electrons: None,
            },
        }
    }

    pub fn with_g2(mut self, g2: f64) -> Self {
        self.g2 = g2;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hbar_omega_q_over_kb > 0.0 && self.omega_l_over_omega_q > 0.0) {
            return Err(Error::InvalidInput(
                "qubit and drive frequencies must be positive".into(),
            ));
        }
        if !(self.kappa >= 0.0) {
            return Err(Error::InvalidInput(format!("kappa = {} < 0", self.kappa)));
        }
        if !(self.g2 >= 0.0 && self.g2.is_finite()) {
            return Err(Error::InvalidInput(format!("g2 = {} < 0", self.g2)));
        }
        if self.kappa > 0.0 && self.g2 / self.kappa > 0.1 {
            log::warn!(
                "g2/kappa = {:.3} > 0.1: the secular approximation is questionable",
                self.g2 / self.kappa
            );
        }
        self.thermo.validate()
    }

    /// ω_q in rad/s.
    pub fn omega_q(&self) -> f64 {
        omega_from_k(self.hbar_omega_q_over_kb)
    }

    /// ω_L in rad/s.
    pub fn omega_l(&self) -> f64 {
        self.omega_q() * self.omega_l_over_omega_q
    }

    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega_l()
    }

    /// Default time step 1/(dt_factor ω_q).
    pub fn dt(&self, dt_factor: f64) -> f64 {
        1.0 / (dt_factor * self.omega_q())
    }

    pub fn hamiltonian(&self) -> Result<PeriodicHamiltonian> {
        PeriodicHamiltonian::monochromatic(self.omega_q(), self.kappa, self.omega_l())
    }

    pub fn floquet(&self) -> Result<FloquetSolution> {
        self.validate()?;
        floquet::solve(&self.hamiltonian()?)
    }
}
