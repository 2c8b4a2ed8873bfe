//! Floquet spectral problem for a periodically driven two-level system.
//!
//! Two independent routes produce a [`FloquetSpectrum`]: a closed form for the
//! monochromatic co-rotating drive ([`build_monochromatic`]) and a numerical
//! path that integrates the propagator over one period and diagonalizes the
//! monodromy matrix ([`propagate`] + [`diagonalize_monodromy`]). Both feed
//! [`matrix_elements`] and [`jump_channels`].
//!
//! Quasi-energies are stored as ε/ħ (rad/s), folded into `[−ω_L/2, ω_L/2)`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{inner, norm_sqr, scale_vec, Mat2, Vec2, C64, ZERO};

/// Default number of samples of the Floquet modes over one period.
pub const DEFAULT_GRID: usize = 256;

/// Default relative threshold (fraction of max |D|) for pruning jump channels.
pub const DEFAULT_CHANNEL_THRESHOLD: f64 = 1e-10;

/// Default Fourier cutoff for the matrix elements.
pub const DEFAULT_N_MAX: usize = 8;

const HERMITICITY_TOL: f64 = 1e-12;
const DEGENERACY_TOL: f64 = 1e-10;
// Ground-state overlaps closer than this count as a tie, so that the
// numeric and closed-form paths label resonant modes identically.
const LABEL_TIE_TOL: f64 = 1e-7;

type HamiltonianFn = dyn Fn(f64) -> Mat2 + Send + Sync;

/// Time dependence of the drive.
#[derive(Clone)]
pub enum Drive {
    /// `κħω_q (e^{−iω_L t} σ₊ + e^{iω_L t} σ₋)` on top of `(ħω_q/2) σ_z`.
    Monochromatic,
    /// Full `H(t)/ħ` (rad/s), periodic with period `2π/ω_L`.
    Custom(Arc<HamiltonianFn>),
}

impl fmt::Debug for Drive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Drive::Monochromatic => write!(f, "Monochromatic"),
            Drive::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// A 2×2 Hamiltonian periodic in time, expressed as `H(t)/ħ` in rad/s.
#[derive(Debug, Clone)]
pub struct PeriodicHamiltonian {
    pub omega_q: f64,
    pub kappa: f64,
    pub omega_l: f64,
    pub drive: Drive,
}

impl PeriodicHamiltonian {
    pub fn monochromatic(omega_q: f64, kappa: f64, omega_l: f64) -> Result<Self> {
        if !(omega_q > 0.0 && omega_l > 0.0) {
            return Err(Error::InvalidInput(format!(
                "frequencies must be positive (omega_q = {omega_q}, omega_L = {omega_l})"
            )));
        }
        if !(kappa >= 0.0) {
            return Err(Error::InvalidInput(format!("kappa = {kappa} < 0")));
        }
        Ok(Self {
            omega_q,
            kappa,
            omega_l,
            drive: Drive::Monochromatic,
        })
    }

    pub fn custom<F>(omega_q: f64, kappa: f64, omega_l: f64, h: F) -> Self
    where
        F: Fn(f64) -> Mat2 + Send + Sync + 'static,
    {
        Self {
            omega_q,
            kappa,
            omega_l,
            drive: Drive::Custom(Arc::new(h)),
        }
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega_l
    }

    pub fn is_monochromatic(&self) -> bool {
        matches!(self.drive, Drive::Monochromatic)
    }

    /// `H(t)/ħ` in rad/s.
    pub fn at(&self, t: f64) -> Mat2 {
        match &self.drive {
            Drive::Monochromatic => {
                let w = self.omega_q;
                let c = self.kappa * w;
                let ph = C64::from_polar(c, -self.omega_l * t);
                Mat2::new(
                    C64::new(0.5 * w, 0.0),
                    ph,
                    ph.conj(),
                    C64::new(-0.5 * w, 0.0),
                )
            }
            Drive::Custom(h) => h(t),
        }
    }

    /// Checks Hermiticity and periodicity on `samples` points of one period.
    pub fn validate(&self, samples: usize) -> Result<()> {
        let period = self.period();
        for k in 0..samples {
            let t = period * k as f64 / samples as f64;
            let h = self.at(t);
            let scale = h.norm().max(self.omega_q);
            if h.hermiticity_defect() > HERMITICITY_TOL * scale {
                return Err(Error::InvalidInput(format!(
                    "H(t) is not Hermitian at t = {t:e} s"
                )));
            }
            if (h - self.at(t + period)).norm() > 1e-9 * scale {
                return Err(Error::InvalidInput(format!(
                    "H(t) is not periodic at t = {t:e} s"
                )));
            }
        }
        Ok(())
    }
}

/// Propagator samples `F(t_k, 0)` on a uniform grid `t_k = k T / M`, `k = 0..=M`.
#[derive(Debug, Clone)]
pub struct PropagatorPath {
    pub period: f64,
    pub omega_l: f64,
    pub samples: Vec<Mat2>,
}

impl PropagatorPath {
    pub fn grid(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn time(&self, k: usize) -> f64 {
        self.period * k as f64 / self.grid() as f64
    }

    pub fn monodromy(&self) -> &Mat2 {
        self.samples.last().expect("non-empty path")
    }

    pub fn max_unitarity_defect(&self) -> f64 {
        self.samples
            .iter()
            .map(Mat2::unitarity_defect)
            .fold(0.0, f64::max)
    }
}

/// Integrates the propagator over one period with `grid * substeps` midpoint
/// steps, each evaluated exactly as `exp(−i H(t_mid) Δt)`.
pub fn propagate(
    ham: &PeriodicHamiltonian,
    grid: usize,
    substeps: usize,
) -> Result<PropagatorPath> {
    if grid == 0 || substeps == 0 {
        return Err(Error::InvalidInput(
            "grid and substeps must be positive".into(),
        ));
    }
    let period = ham.period();
    let steps = grid * substeps;
    let dt = period / steps as f64;
    let mut f = Mat2::IDENTITY;
    let mut samples = Vec::with_capacity(grid + 1);
    samples.push(f);
    let mut max_norm: f64 = 0.0;
    for k in 0..steps {
        let tm = (k as f64 + 0.5) * dt;
        let h = ham.at(tm);
        let scale = h.norm().max(ham.omega_q);
        if h.hermiticity_defect() > HERMITICITY_TOL * scale {
            return Err(Error::InvalidInput(format!(
                "H(t) is not Hermitian at t = {tm:e} s"
            )));
        }
        max_norm = max_norm.max(spectral_radius(&h));
        f = Mat2::unitary_exp(&h, dt) * f;
        if (k + 1) % substeps == 0 {
            samples.push(f);
        }
    }
    if dt * max_norm >= 0.1 {
        return Err(Error::InvalidInput(format!(
            "{steps} steps per period too few: dt·max‖H‖/ħ = {:.3} >= 0.1",
            dt * max_norm
        )));
    }
    Ok(PropagatorPath {
        period,
        omega_l: ham.omega_l,
        samples,
    })
}

/// Monodromy matrix `F(T, 0)` from `steps` unitary midpoint steps.
pub fn integrate_monodromy(ham: &PeriodicHamiltonian, steps: usize) -> Result<Mat2> {
    Ok(*propagate(ham, 1, steps)?.monodromy())
}

fn spectral_radius(h: &Mat2) -> f64 {
    let (h0, v) = h.pauli_coefficients();
    h0.abs() + (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Solution of the Floquet spectral problem.
#[derive(Debug, Clone)]
pub struct FloquetSpectrum {
    pub omega_l: f64,
    pub period: f64,
    /// ε_r/ħ (rad/s), folded into the first Brillouin zone.
    pub quasi_energies: [f64; 2],
    /// `modes[k][r]` = φ_{r,0}(t_k), `k = 0..=M` (the last sample is at `t = T`).
    pub modes: Vec<[Vec2; 2]>,
    /// Quasi-energy gap |ε₀ − ε₁|/ħ (rad/s). For the closed form this is the
    /// unfolded gap; for the numerical path it is the folded difference.
    pub nu: f64,
    /// Mixing angle, closed-form path only.
    pub theta: Option<f64>,
}

impl FloquetSpectrum {
    pub fn grid(&self) -> usize {
        self.modes.len() - 1
    }

    pub fn time(&self, k: usize) -> f64 {
        self.period * k as f64 / self.grid() as f64
    }

    /// Floquet basis vectors φ_{r,0}(0).
    pub fn basis(&self) -> [Vec2; 2] {
        self.modes[0]
    }

    /// Largest deviation from orthonormality over the grid.
    pub fn orthonormality_defect(&self) -> f64 {
        self.modes
            .iter()
            .map(|m| {
                let a = (norm_sqr(&m[0]).sqrt() - 1.0).abs();
                let b = (norm_sqr(&m[1]).sqrt() - 1.0).abs();
                let c = inner(&m[0], &m[1]).norm();
                a.max(b).max(c)
            })
            .fold(0.0, f64::max)
    }

    /// ‖φ_r(T) − φ_r(0)‖, maximized over r.
    pub fn periodicity_defect(&self) -> f64 {
        let first = &self.modes[0];
        let last = self.modes.last().expect("non-empty");
        (0..2)
            .map(|r| {
                let d = [last[r][0] - first[r][0], last[r][1] - first[r][1]];
                norm_sqr(&d).sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Distance between two quasi-energies modulo ω_L.
    pub fn zone_distance(&self, a: f64, b: f64) -> f64 {
        let d = (a - b).rem_euclid(self.omega_l);
        d.min(self.omega_l - d)
    }

    /// Relabels mode `r` into Brillouin zone `m`: ε_r → ε_r + m ω_L and
    /// φ_r(t) → e^{i m ω_L t} φ_r(t). Describes the same physical solution.
    pub fn shifted_zone(&self, r: usize, m: i32) -> FloquetSpectrum {
        let mut out = self.clone();
        out.quasi_energies[r] += f64::from(m) * self.omega_l;
        for (k, modes) in out.modes.iter_mut().enumerate() {
            let t = self.time(k);
            let ph = C64::from_polar(1.0, f64::from(m) * self.omega_l * t);
            modes[r] = scale_vec(&modes[r], ph);
        }
        out.nu = (out.quasi_energies[0] - out.quasi_energies[1]).abs();
        out
    }
}

fn fold(eps: f64, omega_l: f64) -> f64 {
    eps - omega_l * ((eps + 0.5 * omega_l) / omega_l).floor()
}

/// Orders two eigenpairs so that r = 0 has the larger overlap with the
/// ground state (0, 1)ᵀ (ties broken by the smaller quasi-energy), and fixes
/// each global phase so that the largest-modulus component of φ_r(0) is real
/// positive. Returns the permutation and the phase factors.
fn canonical_labels(e: &[Vec2; 2], eps: &[f64; 2]) -> ([usize; 2], [C64; 2]) {
    let g0 = e[0][1].norm();
    let g1 = e[1][1].norm();
    let swap = if (g0 - g1).abs() > LABEL_TIE_TOL {
        g1 > g0
    } else {
        eps[1] < eps[0]
    };
    let perm = if swap { [1, 0] } else { [0, 1] };
    let phases = perm.map(|i| {
        let v = &e[i];
        let big = if v[0].norm() >= v[1].norm() {
            v[0]
        } else {
            v[1]
        };
        if big.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            (big / big.norm()).conj()
        }
    });
    (perm, phases)
}

/// Closed-form Floquet solution for the monochromatic co-rotating drive,
/// obtained from the time-independent Hamiltonian in the frame rotating at ω_L.
pub fn build_monochromatic(ham: &PeriodicHamiltonian, grid: usize) -> Result<FloquetSpectrum> {
    if !ham.is_monochromatic() {
        return Err(Error::InvalidInput(
            "closed form requires the monochromatic drive".into(),
        ));
    }
    if grid < 4 {
        return Err(Error::InvalidInput(
            "grid must hold at least 4 samples".into(),
        ));
    }
    let detuning = ham.omega_q - ham.omega_l;
    let rabi = 2.0 * ham.kappa * ham.omega_q;
    let nu = detuning.hypot(rabi);
    if nu == 0.0 {
        return Err(Error::DegenerateSpectrum(
            "resonant undriven qubit has a degenerate quasi-energy spectrum".into(),
        ));
    }
    let theta = (detuning / nu).clamp(-1.0, 1.0).acos();
    let (s, c) = (0.5 * theta).sin_cos();
    // Rotating-frame eigenvectors: eigenvalue −ν/2 and +ν/2.
    let lower: Vec2 = [C64::new(-s, 0.0), C64::new(c, 0.0)];
    let upper: Vec2 = [C64::new(c, 0.0), C64::new(s, 0.0)];
    let raw = [0.5 * (ham.omega_l - nu), 0.5 * (ham.omega_l + nu)];
    let eps = raw.map(|x| fold(x, ham.omega_l));
    let vecs = [lower, upper];
    if fold(eps[0] - eps[1], ham.omega_l).abs() * ham.period() < DEGENERACY_TOL {
        return Err(Error::DegenerateSpectrum(format!(
            "quasi-energies coincide modulo omega_L (nu = {nu:e})"
        )));
    }
    let (perm, phases) = canonical_labels(&vecs, &eps);
    let period = ham.period();
    let modes = (0..=grid)
        .map(|k| {
            let t = period * k as f64 / grid as f64;
            perm.map(|i| {
                let j = perm.iter().position(|&p| p == i).expect("permutation");
                let shift = C64::from_polar(1.0, (eps[i] - raw[i]) * t);
                let v = vecs[i];
                let drive = C64::from_polar(1.0, ham.omega_l * t);
                [v[0] * shift * phases[j], v[1] * drive * shift * phases[j]]
            })
        })
        .collect();
    let quasi = perm.map(|i| eps[i]);
    Ok(FloquetSpectrum {
        omega_l: ham.omega_l,
        period,
        quasi_energies: quasi,
        modes,
        nu,
        theta: Some(theta),
    })
}

/// Eigen-decomposition of a 2×2 unitary. Eigenvectors are orthonormalized.
fn eigen_unitary(f: &Mat2) -> Result<([C64; 2], [Vec2; 2])> {
    let m = &f.0;
    let half_tr = 0.5 * (m[0][0] + m[1][1]);
    let disc = (0.25 * (m[0][0] - m[1][1]) * (m[0][0] - m[1][1]) + m[0][1] * m[1][0]).sqrt();
    let lam = [half_tr + disc, half_tr - disc];
    if (lam[0] - lam[1]).norm() < DEGENERACY_TOL {
        return Err(Error::DegenerateSpectrum(format!(
            "monodromy eigenvalues coincide: {:?}",
            lam
        )));
    }
    let eigvec = |l: C64| -> Vec2 {
        let a: Vec2 = [m[0][1], l - m[0][0]];
        let b: Vec2 = [l - m[1][1], m[1][0]];
        let v = if norm_sqr(&a) >= norm_sqr(&b) { a } else { b };
        let n = norm_sqr(&v).sqrt();
        [v[0] / n, v[1] / n]
    };
    let e0 = eigvec(lam[0]);
    let e1_raw = eigvec(lam[1]);
    // Gram–Schmidt against e0: exact for a normal matrix up to rounding.
    let p = inner(&e0, &e1_raw);
    let mut e1 = [e1_raw[0] - p * e0[0], e1_raw[1] - p * e0[1]];
    let n1 = norm_sqr(&e1).sqrt();
    e1 = [e1[0] / n1, e1[1] / n1];
    Ok((lam, [e0, e1]))
}

/// Floquet spectrum from a propagator path: eigenvectors e_r of the monodromy
/// matrix, ε_r = −arg(λ_r)/T, and modes φ_r(t) = e^{iε_r t} F(t, 0) e_r.
pub fn diagonalize_monodromy(path: &PropagatorPath) -> Result<FloquetSpectrum> {
    let f = path.monodromy();
    if f.unitarity_defect() > 1e-8 {
        return Err(Error::InvalidInput(format!(
            "monodromy is not unitary (defect {:e})",
            f.unitarity_defect()
        )));
    }
    let (lam, vecs) = eigen_unitary(f)?;
    let period = path.period;
    let eps = lam.map(|l| fold(-l.arg() / period, path.omega_l));
    let (perm, phases) = canonical_labels(&vecs, &eps);
    let e = [0, 1].map(|j| scale_vec(&vecs[perm[j]], phases[j]));
    let quasi = perm.map(|i| eps[i]);
    let modes = path
        .samples
        .iter()
        .enumerate()
        .map(|(k, fk)| {
            let t = path.time(k);
            [0, 1].map(|r| {
                let v = fk.apply(&e[r]);
                scale_vec(&v, C64::from_polar(1.0, quasi[r] * t))
            })
        })
        .collect();
    Ok(FloquetSpectrum {
        omega_l: path.omega_l,
        period,
        quasi_energies: quasi,
        modes,
        nu: (quasi[0] - quasi[1]).abs(),
        theta: None,
    })
}

/// Numerical Floquet solution: [`propagate`] followed by [`diagonalize_monodromy`].
pub fn solve_numeric(
    ham: &PeriodicHamiltonian,
    grid: usize,
    substeps: usize,
) -> Result<FloquetSpectrum> {
    ham.validate(grid.max(16))?;
    diagonalize_monodromy(&propagate(ham, grid, substeps)?)
}

/// Fourier coefficients `D_{r,s,n}` of `⟨φ_{r,0}(t)|σ₊+σ₋|φ_{s,0}(t)⟩`,
/// normalized so that `D̃_{r,s}(t) = Σ_n e^{i n ω_L t} D_{r,s,n}`.
#[derive(Debug, Clone)]
pub struct MatrixElements {
    pub n_max: usize,
    data: Vec<[[C64; 2]; 2]>,
}

impl MatrixElements {
    pub fn get(&self, r: usize, s: usize, n: i32) -> C64 {
        let idx = n + self.n_max as i32;
        if idx < 0 || idx as usize >= self.data.len() {
            return ZERO;
        }
        self.data[idx as usize][r][s]
    }

    pub fn orders(&self) -> impl Iterator<Item = i32> {
        let n = self.n_max as i32;
        -n..=n
    }

    pub fn max_modulus(&self) -> f64 {
        self.data
            .iter()
            .flat_map(|m| m.iter().flat_map(|row| row.iter()))
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

pub fn matrix_elements(spectrum: &FloquetSpectrum, n_max: usize) -> Result<MatrixElements> {
    let m = spectrum.grid();
    if 4 * n_max > m {
        return Err(Error::Aliasing { n_max, grid: m });
    }
    let sx = Mat2::pauli_x();
    let dtilde: Vec<[[C64; 2]; 2]> = spectrum.modes[..m]
        .iter()
        .map(|phi| {
            let x = [sx.apply(&phi[0]), sx.apply(&phi[1])];
            [
                [inner(&phi[0], &x[0]), inner(&phi[0], &x[1])],
                [inner(&phi[1], &x[0]), inner(&phi[1], &x[1])],
            ]
        })
        .collect();
    let data = (-(n_max as i64)..=n_max as i64)
        .map(|n| {
            let mut acc = [[ZERO; 2]; 2];
            for (k, d) in dtilde.iter().enumerate() {
                let w = C64::from_polar(1.0, -2.0 * PI * (n * k as i64) as f64 / m as f64);
                for r in 0..2 {
                    for s in 0..2 {
                        acc[r][s] += d[r][s] * w;
                    }
                }
            }
            let inv = 1.0 / m as f64;
            acc.map(|row| row.map(|z| z * inv))
        })
        .collect();
    Ok(MatrixElements { n_max, data })
}

/// Which dyad of the Floquet basis a jump operator applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorForm {
    /// `|φ₁⟩⟨φ₁| − |φ₀⟩⟨φ₀|`
    Dephasing,
    /// `|φ₁⟩⟨φ₀|`
    Raising,
    /// `|φ₀⟩⟨φ₁|`
    Lowering,
}

/// One Lindblad channel `A_{s,n}` with radiation frequency `ω_{s,n}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpChannel {
    pub s: i8,
    pub n: i32,
    /// ω_{s,n} (rad/s); positive values heat the calorimeter.
    pub omega: f64,
    pub amplitude: C64,
    pub form: OperatorForm,
}

impl JumpChannel {
    /// |amplitude|².
    pub fn weight(&self) -> f64 {
        self.amplitude.norm_sqr()
    }

    /// Floquet level the jump starts from, `None` for dephasing.
    pub fn source_level(&self) -> Option<usize> {
        match self.form {
            OperatorForm::Dephasing => None,
            OperatorForm::Raising => Some(0),
            OperatorForm::Lowering => Some(1),
        }
    }

    /// Matrix-element indices `(r, r')` of `D_{r,r',n}`: target and source level.
    pub fn levels(&self) -> (usize, usize) {
        match self.form {
            OperatorForm::Dephasing => (1, 1),
            OperatorForm::Raising => (1, 0),
            OperatorForm::Lowering => (0, 1),
        }
    }

    pub fn label(&self) -> String {
        format!("(s={}, n={})", self.s, self.n)
    }
}

impl fmt::Display for JumpChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:?} omega={:.6e} |A|={:.6e}",
            self.label(),
            self.form,
            self.omega,
            self.amplitude.norm()
        )
    }
}

/// Channel frequency `ω_{s,n} = s(ε₀ − ε₁)/ħ − n ω_L`.
pub fn channel_frequency(spectrum: &FloquetSpectrum, s: i8, n: i32) -> f64 {
    f64::from(s) * (spectrum.quasi_energies[0] - spectrum.quasi_energies[1])
        - f64::from(n) * spectrum.omega_l
}

/// Jump channels whose amplitude exceeds `threshold × max|D|`.
pub fn jump_channels(
    elements: &MatrixElements,
    spectrum: &FloquetSpectrum,
    threshold: f64,
) -> Result<Vec<JumpChannel>> {
    if !(threshold > 0.0) {
        return Err(Error::InvalidInput(format!(
            "threshold {threshold} must be positive"
        )));
    }
    let cut = threshold * elements.max_modulus();
    let mut out: Vec<JumpChannel> = Vec::new();
    for s in [0i8, 1, -1] {
        let (form, (r, rp)) = match s {
            0 => (OperatorForm::Dephasing, (1, 1)),
            1 => (OperatorForm::Raising, (1, 0)),
            _ => (OperatorForm::Lowering, (0, 1)),
        };
        for n in elements.orders() {
            let amplitude = elements.get(r, rp, n);
            if amplitude.norm() > cut {
                out.push(JumpChannel {
                    s,
                    n,
                    omega: channel_frequency(spectrum, s, n),
                    amplitude,
                    form,
                });
            }
        }
    }
    if out.is_empty() {
        return Err(Error::NoChannels(threshold));
    }
    let tol = 1e-9 * spectrum.omega_l;
    for (i, a) in out.iter().enumerate() {
        for b in &out[i + 1..] {
            if (a.omega - b.omega).abs() <= tol {
                return Err(Error::FrequencyCollision {
                    first: a.label(),
                    second: b.label(),
                    omega: a.omega,
                });
            }
        }
    }
    Ok(out)
}

/// Spectrum summary and channel list of a drive, as used by the simulators.
#[derive(Debug, Clone)]
pub struct FloquetSolution {
    pub spectrum: FloquetSpectrum,
    pub elements: MatrixElements,
    pub channels: Vec<JumpChannel>,
}

/// Full pipeline with default grid, cutoff and threshold. Uses the closed
/// form for the monochromatic drive and the monodromy path otherwise.
pub fn solve(ham: &PeriodicHamiltonian) -> Result<FloquetSolution> {
    let spectrum = if ham.is_monochromatic() {
        build_monochromatic(ham, DEFAULT_GRID)?
    } else {
        solve_numeric(ham, DEFAULT_GRID, 256)?
    };
    let elements = matrix_elements(&spectrum, DEFAULT_N_MAX)?;
    let channels = jump_channels(&elements, &spectrum, DEFAULT_CHANNEL_THRESHOLD)?;
    Ok(FloquetSolution {
        spectrum,
        elements,
        channels,
    })
}
