//! Two-component master equation for (Floquet level, X) on a grid aligned to
//! the jump kicks.

use serde::Serialize;

use super::fp::{check_density, FpOperator, Grid, ImplicitStep};
use super::EffectiveModel;
use crate::error::{Error, Result};
use crate::qubit::gamma_rate;
use crate::thermo::phonon_drift;

/// Largest spacing `h ≤ max_h` dividing every nonzero kick within 1% of `h`.
pub fn kick_aligned_spacing(kicks: &[f64], max_h: f64) -> Result<f64> {
    let nonzero: Vec<f64> = kicks.iter().map(|k| k.abs()).filter(|k| *k > 0.0).collect();
    let Some(base) = nonzero.iter().copied().reduce(f64::min) else {
        return Ok(max_h);
    };
    for k in 1..=10_000 {
        let h = base / k as f64;
        if h > max_h {
            continue;
        }
        if nonzero
            .iter()
            .all(|d| (d / h - (d / h).round()).abs() <= 0.01)
        {
            return Ok(h);
        }
    }
    Err(Error::GridMisaligned {
        kick: base,
        spacing: max_h,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MasterOptions {
    /// Phonon drift and noise on X.
    pub phonons: bool,
    /// Jumps shift X by their kick; otherwise X stays put.
    pub kicks: bool,
}

impl Default for MasterOptions {
    fn default() -> Self {
        Self {
            phonons: true,
            kicks: true,
        }
    }
}

/// Densities P_r(X) per unit X for both Floquet levels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MasterState {
    pub grid: Grid,
    pub p: [Vec<f64>; 2],
}

impl MasterState {
    /// Both levels concentrated at the node nearest `x`, with weights `w`.
    pub fn delta(grid: Grid, x: f64, w: [f64; 2]) -> Self {
        let i = grid.index_of(x);
        let mut p = [vec![0.0; grid.n], vec![0.0; grid.n]];
        p[0][i] = w[0] / grid.h;
        p[1][i] = w[1] / grid.h;
        Self { grid, p }
    }

    pub fn mass(&self) -> f64 {
        (self.p[0].iter().sum::<f64>() + self.p[1].iter().sum::<f64>()) * self.grid.h
    }

    pub fn level_mass(&self, r: usize) -> f64 {
        self.p[r].iter().sum::<f64>() * self.grid.h
    }

    /// Marginal density of X.
    pub fn marginal(&self) -> Vec<f64> {
        self.p[0]
            .iter()
            .zip(&self.p[1])
            .map(|(a, b)| a + b)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MasterPath {
    pub times: Vec<f64>,
    pub states: Vec<MasterState>,
}

struct Shift {
    source: usize,
    target: usize,
    rate: Vec<f64>,
    to: Vec<usize>,
}

fn shifted_index(i: usize, m: i64, n: usize) -> usize {
    // Node i sits at X = (i + 1) h when the grid starts at h; generally the
    // shift is clamped at the top and reflected at X = 0.
    let j = i as i64 + m;
    if j < 0 {
        // Node index j ↔ X = x0 + j h; reflect about the origin using x0 = h.
        let r = -j - 2;
        r.clamp(0, n as i64 - 1) as usize
    } else {
        (j as usize).min(n - 1)
    }
}

fn jump_generator(p: &[Vec<f64>; 2], shifts: &[Shift], out: &mut [Vec<f64>; 2]) {
    for o in out.iter_mut() {
        o.iter_mut().for_each(|v| *v = 0.0);
    }
    for s in shifts {
        for (i, (&r, &j)) in s.rate.iter().zip(&s.to).enumerate() {
            let flow = r * p[s.source][i];
            out[s.source][i] -= flow;
            out[s.target][j] += flow;
        }
    }
}

/// Integrates the master equation up to `t_final`: Strang splitting of the
/// phonon Fokker–Planck part (backward Euler, each level independently) and
/// the jump part (Heun's method with exact index shifts). Returns
/// `n_out` evenly spaced snapshots plus the initial state.
pub fn integrate_master(
    initial: &MasterState,
    model: &EffectiveModel,
    t_final: f64,
    dt: f64,
    n_out: usize,
    opts: MasterOptions,
) -> Result<MasterPath> {
    let grid = initial.grid;
    let n = grid.n;
    if (grid.x0 - grid.h).abs() > 1e-9 * grid.h {
        return Err(Error::InvalidInput(
            "master grid must start at X = h".into(),
        ));
    }
    if !(dt > 0.0 && t_final >= 0.0) {
        return Err(Error::InvalidInput("dt must be positive".into()));
    }
    let xs = grid.points();
    let mut shifts = Vec::new();
    let mut out_rate = [vec![0.0; n], vec![0.0; n]];
    if model.g2 > 0.0 {
        for tr in &model.transitions {
            let m = if opts.kicks {
                let q = tr.kick / grid.h;
                if (q - q.round()).abs() > 0.01 {
                    return Err(Error::GridMisaligned {
                        kick: tr.kick,
                        spacing: grid.h,
                    });
                }
                q.round() as i64
            } else {
                0
            };
            if m == 0 && tr.source == tr.target {
                continue;
            }
            let rate: Vec<f64> = xs
                .iter()
                .map(|x| gamma_rate(tr.omega, x.sqrt(), model.g2).map(|g| g * tr.weight))
                .collect::<Result<_>>()?;
            for (o, r) in out_rate[tr.source].iter_mut().zip(&rate) {
                *o += r;
            }
            shifts.push(Shift {
                source: tr.source,
                target: tr.target,
                to: (0..n).map(|i| shifted_index(i, m, n)).collect(),
                rate,
            });
        }
    }
    let max_rate = out_rate.iter().flatten().copied().fold(0.0, f64::max);
    let steps = (t_final / dt).ceil().max(0.0) as usize;
    let dt = if steps > 0 {
        t_final / steps as f64
    } else {
        dt
    };
    if max_rate * dt > 0.5 {
        return Err(Error::TimeStepTooLarge(max_rate * dt));
    }
    let half: Option<ImplicitStep> = if opts.phonons {
        let j: Vec<f64> = xs.iter().map(|&x| phonon_drift(x, &model.thermo)).collect();
        let s = vec![model.noise(); n];
        Some(FpOperator::from_coeffs(&j, &s, grid.h)?.implicit(0.5 * dt))
    } else {
        None
    };

    let mut p = initial.p.clone();
    let mut k1 = [vec![0.0; n], vec![0.0; n]];
    let mut k2 = [vec![0.0; n], vec![0.0; n]];
    let mut tmp = [vec![0.0; n], vec![0.0; n]];
    let mut times = vec![0.0];
    let mut states = vec![initial.clone()];
    let n_out = n_out.max(1);
    let mut next = 1;
    for k in 1..=steps {
        if let Some(h) = &half {
            h.solve(&mut p[0]);
            h.solve(&mut p[1]);
        }
        if !shifts.is_empty() {
            jump_generator(&p, &shifts, &mut k1);
            for r in 0..2 {
                for i in 0..n {
                    tmp[r][i] = p[r][i] + dt * k1[r][i];
                }
            }
            jump_generator(&tmp, &shifts, &mut k2);
            for r in 0..2 {
                for i in 0..n {
                    p[r][i] += 0.5 * dt * (k1[r][i] + k2[r][i]);
                }
            }
        }
        if let Some(h) = &half {
            h.solve(&mut p[0]);
            h.solve(&mut p[1]);
        }
        check_density(&p[0])?;
        check_density(&p[1])?;
        while next <= n_out && k * n_out >= next * steps {
            times.push(k as f64 * dt);
            states.push(MasterState { grid, p: p.clone() });
            next += 1;
        }
    }
    Ok(MasterPath { times, states })
}
