//! Physical constants and the internal unit system.
//!
//! Internally ħ = k_B = 1: energies are expressed as temperatures (K), time is
//! in seconds and angular frequencies in rad/s. A frequency ω enters an energy
//! expression as `ω * HBAR_OVER_KB` kelvin. All conversions from SI happen once
//! when parameters are built.

/// Reduced Planck constant, CODATA 2018 (J s).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant, exact SI value (J/K).
pub const KB: f64 = 1.380_649e-23;

/// ħ / k_B in K s.
pub const HBAR_OVER_KB: f64 = HBAR / KB;

/// Riemann ζ(5).
pub const ZETA_5: f64 = 1.036_927_755_143_37;

/// Energy of a quantum ħω expressed in kelvin.
#[inline]
pub fn energy_k(omega: f64) -> f64 {
    omega * HBAR_OVER_KB
}

/// Angular frequency (rad/s) of a quantum whose energy is `kelvin` k_B.
#[inline]
pub fn omega_from_k(kelvin: f64) -> f64 {
    kelvin / HBAR_OVER_KB
}
