//! Finite-volume Fokker–Planck operator in X with no-flux boundaries.
//!
//! Face fluxes use Scharfetter–Gummel (exponential) fitting against the
//! local stationary density, so the discrete stationary state is exact,
//! positivity holds for any step under backward Euler and mass is conserved
//! up to rounding.

use serde::Serialize;

use super::EffectiveCoeffs;
use crate::error::{Error, Result};

/// Uniform node grid `x0 + i h`, `i = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub x0: f64,
    pub h: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(x0: f64, h: f64, n: usize) -> Result<Self> {
        if !(h > 0.0) || n < 3 {
            return Err(Error::InvalidInput(format!(
                "invalid grid (h = {h}, n = {n})"
            )));
        }
        if !(x0 > 0.0) {
            return Err(Error::SingularBoundary);
        }
        Ok(Self { x0, h, n })
    }

    /// `n` points from `lo` to `hi` inclusive.
    pub fn spanning(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(hi > lo) || n < 3 {
            return Err(Error::InvalidInput(format!("invalid range [{lo}, {hi}]")));
        }
        Self::new(lo, (hi - lo) / (n - 1) as f64, n)
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.h
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Nearest node to `x`, clamped to the grid.
    pub fn index_of(&self, x: f64) -> usize {
        let i = ((x - self.x0) / self.h).round();
        i.clamp(0.0, (self.n - 1) as f64) as usize
    }

    /// Cell edges `x_i ± h/2`.
    pub fn edges(&self) -> Vec<f64> {
        (0..=self.n)
            .map(|i| self.x0 + (i as f64 - 0.5) * self.h)
            .collect()
    }
}

/// Density per unit X on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Density {
    pub grid: Grid,
    pub f: Vec<f64>,
}

impl Density {
    pub fn mass(&self) -> f64 {
        self.f.iter().sum::<f64>() * self.grid.h
    }

    /// Probability of each cell.
    pub fn masses(&self) -> Vec<f64> {
        self.f.iter().map(|v| v * self.grid.h).collect()
    }

    pub fn mean_x(&self) -> f64 {
        (0..self.grid.n)
            .map(|i| self.grid.x(i) * self.f[i])
            .sum::<f64>()
            * self.grid.h
            / self.mass()
    }

    /// Mean of T = √X.
    pub fn mean_t(&self) -> f64 {
        (0..self.grid.n)
            .map(|i| self.grid.x(i).sqrt() * self.f[i])
            .sum::<f64>()
            * self.grid.h
            / self.mass()
    }

    /// Density in T = √X at the nodes, f_T = 2T f_X.
    pub fn temperature_density(&self) -> Vec<(f64, f64)> {
        (0..self.grid.n)
            .map(|i| {
                let t = self.grid.x(i).sqrt();
                (t, 2.0 * t * self.f[i])
            })
            .collect()
    }
}

/// x / (eˣ − 1), finite for all x.
#[inline]
fn bernoulli(x: f64) -> f64 {
    if x.abs() < 1e-10 {
        1.0 - 0.5 * x
    } else {
        x / x.exp_m1()
    }
}

/// log π at the nodes, π ∝ S⁻¹ exp(∫ 2J/S) by the trapezoid rule.
fn log_stationary(j: &[f64], s: &[f64], h: f64) -> Result<Vec<f64>> {
    if s.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidInput(
            "diffusion must be positive on the grid".into(),
        ));
    }
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(j.len());
    for i in 0..j.len() {
        if i > 0 {
            acc += 0.5 * h * (2.0 * j[i - 1] / s[i - 1] + 2.0 * j[i] / s[i]);
        }
        out.push(acc - s[i].ln());
    }
    Ok(out)
}

/// Stationary density of the Fokker–Planck equation with no-flux ends,
/// normalized to unit mass.
pub fn stationary_density(coeffs: &EffectiveCoeffs) -> Result<Density> {
    let xs = coeffs.x();
    let grid = Grid::new(xs[0], coeffs.h, xs.len())?;
    let lp = log_stationary(&coeffs.j(), &coeffs.s(), coeffs.h)?;
    Ok(Density {
        grid,
        f: normalize_log(&lp, coeffs.h),
    })
}

fn normalize_log(lp: &[f64], h: f64) -> Vec<f64> {
    let m = lp.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut f: Vec<f64> = lp.iter().map(|v| (v - m).exp()).collect();
    let z: f64 = f.iter().sum::<f64>() * h;
    for v in &mut f {
        *v /= z;
    }
    f
}

/// Tridiagonal generator A with dF/dt = A F.
#[derive(Debug, Clone, PartialEq)]
pub struct FpOperator {
    pub h: f64,
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
}

impl FpOperator {
    pub fn from_coeffs(j: &[f64], s: &[f64], h: f64) -> Result<Self> {
        let n = j.len();
        if s.len() != n || n < 2 {
            return Err(Error::InvalidInput("coefficient arrays mismatch".into()));
        }
        let lp = log_stationary(j, s, h)?;
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        for i in 0..n - 1 {
            // Flux through face i+½: k (B(δ) F_i − B(−δ) F_{i+1}) / h.
            let sf = 0.5 * (s[i] + s[i + 1]);
            let k = sf / (2.0 * h * h);
            let d = lp[i] - lp[i + 1];
            let out_of_i = k * bernoulli(d);
            let out_of_next = k * bernoulli(-d);
            diag[i] -= out_of_i;
            lower[i + 1] += out_of_i;
            diag[i + 1] -= out_of_next;
            upper[i] += out_of_next;
        }
        Ok(Self {
            h,
            lower,
            diag,
            upper,
        })
    }

    pub fn from_effective(coeffs: &EffectiveCoeffs) -> Result<Self> {
        Self::from_coeffs(&coeffs.j(), &coeffs.s(), coeffs.h)
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * f[i];
                if i > 0 {
                    v += self.lower[i] * f[i - 1];
                }
                if i + 1 < n {
                    v += self.upper[i] * f[i + 1];
                }
                v
            })
            .collect()
    }

    /// Factorization of `I − dt A` for repeated backward-Euler steps.
    pub fn implicit(&self, dt: f64) -> ImplicitStep {
        let n = self.len();
        let mut c = vec![0.0; n];
        let mut inv = vec![0.0; n];
        let mut a = vec![0.0; n];
        for i in 0..n {
            a[i] = -dt * self.lower[i];
            let b = 1.0 - dt * self.diag[i];
            let up = -dt * self.upper[i];
            let denom = if i == 0 { b } else { b - a[i] * c[i - 1] };
            inv[i] = 1.0 / denom;
            c[i] = up * inv[i];
        }
        ImplicitStep { a, c, inv }
    }
}

/// Thomas-algorithm factors of a diagonally dominant tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct ImplicitStep {
    a: Vec<f64>,
    c: Vec<f64>,
    inv: Vec<f64>,
}

impl ImplicitStep {
    pub fn solve(&self, f: &mut [f64]) {
        let n = f.len();
        f[0] *= self.inv[0];
        for i in 1..n {
            f[i] = (f[i] - self.a[i] * f[i - 1]) * self.inv[i];
        }
        for i in (0..n - 1).rev() {
            f[i] -= self.c[i] * f[i + 1];
        }
    }
}

/// Densities at the requested output times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityPath {
    pub grid: Grid,
    pub times: Vec<f64>,
    pub densities: Vec<Vec<f64>>,
}

impl DensityPath {
    pub fn last(&self) -> Density {
        Density {
            grid: self.grid,
            f: self.densities.last().expect("non-empty").clone(),
        }
    }
}

pub(crate) fn check_density(f: &[f64]) -> Result<()> {
    if let Some(v) = f.iter().find(|v| **v < -1e-10 || !v.is_finite()) {
        return Err(Error::SchemeFailure(format!("density value {v:e}")));
    }
    Ok(())
}

/// Backward-Euler integration of ∂F/∂t = −∂(JF) + ½∂²(SF) up to `t_final`
/// with step `dt`, recording `n_out` evenly spaced snapshots after t = 0.
pub fn integrate_fp(
    initial: &[f64],
    coeffs: &EffectiveCoeffs,
    t_final: f64,
    dt: f64,
    n_out: usize,
) -> Result<DensityPath> {
    let op = FpOperator::from_effective(coeffs)?;
    let xs = coeffs.x();
    let grid = Grid::new(xs[0], coeffs.h, xs.len())?;
    if initial.len() != grid.n {
        return Err(Error::InvalidInput(
            "initial density does not match the grid".into(),
        ));
    }
    if !(dt > 0.0 && t_final >= 0.0) {
        return Err(Error::InvalidInput("dt must be positive".into()));
    }
    let steps = (t_final / dt).ceil().max(0.0) as usize;
    let dt = if steps > 0 {
        t_final / steps as f64
    } else {
        dt
    };
    let solver = op.implicit(dt);
    let mut f = initial.to_vec();
    let mut times = vec![0.0];
    let mut densities = vec![f.clone()];
    let n_out = n_out.max(1);
    let mut next = 1;
    for k in 1..=steps {
        solver.solve(&mut f);
        check_density(&f)?;
        while next <= n_out && k * n_out >= next * steps {
            times.push(k as f64 * dt);
            densities.push(f.clone());
            next += 1;
        }
    }
    Ok(DensityPath {
        grid,
        times,
        densities,
    })
}
