//! Invariant suite behind `calorijump validate`.

use anyhow::Result;

use calorijump::effective::{
    default_grid, drift_and_diffusion, integrate_fp, integrate_master, kick_aligned_spacing,
    ou_linearization, rate_matrices, spectral_projection, stationary_density, steady_state,
    zero_temperature_ts, EffectiveModel, Grid, MasterOptions, MasterState, SpectralProjection,
};
use calorijump::floquet::{build_monochromatic, solve_numeric};
use calorijump::io::RunConfig;
use calorijump::qubit::gamma_rate;
use calorijump::sim::{Record, Simulator};
use calorijump::units::{energy_k, omega_from_k};

struct Report {
    failed: usize,
}

impl Report {
    fn check(&mut self, name: &str, ok: bool, detail: String) {
        println!("{} {name}: {detail}", if ok { "ok  " } else { "FAIL" });
        self.failed += usize::from(!ok);
    }
}

fn wrap_gap(d: f64, period: f64) -> f64 {
    let r = d.rem_euclid(period);
    r.min(period - r)
}

/// Runs every check for one configuration and returns the number of failures.
pub fn run(cfg: &RunConfig, threads: usize) -> Result<usize> {
    let mut rep = Report { failed: 0 };
    println!("# g2 = {}", cfg.g2);
    let p = cfg.params()?;

    let text = cfg.dump();
    let back = RunConfig::parse(&text)?;
    rep.check(
        "config round trip",
        back == *cfg,
        "parse(dump(config))".into(),
    );

    // Floquet problem.
    let ham = p.hamiltonian()?;
    let exact = build_monochromatic(&ham, 64)?;
    let num = solve_numeric(&ham, 64, 4096)?;
    let g = num.quasi_energies[0] - num.quasi_energies[1];
    let err =
        wrap_gap(g - exact.nu, p.omega_l()).min(wrap_gap(g + exact.nu, p.omega_l())) / exact.nu;
    rep.check(
        "quasi-energy gap",
        err <= 1e-7,
        format!("relative error {err:.2e}"),
    );
    let sol = p.floquet()?;
    let orth = sol.spectrum.orthonormality_defect();
    let per = sol.spectrum.periodicity_defect();
    rep.check(
        "floquet modes",
        orth < 1e-9 && per < 1e-8,
        format!("orthonormality {orth:.1e}, periodicity {per:.1e}"),
    );
    if let Some(th) = sol.spectrum.theta {
        let (s, c) = (0.5 * th).sin_cos();
        let mut want = vec![th.sin() / 2.0, th.sin() / 2.0, c * c, c * c, s * s, s * s];
        want.retain(|a| *a > 1e-10);
        let mut got: Vec<f64> = sol.channels.iter().map(|x| x.amplitude.norm()).collect();
        want.sort_by(f64::total_cmp);
        got.sort_by(f64::total_cmp);
        let worst = if got.len() == want.len() {
            want.iter()
                .zip(&got)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        rep.check(
            "selection rules",
            worst <= 1e-8,
            format!("{} channels, amplitude error {worst:.1e}", got.len()),
        );
    }

    // Rates.
    let w = omega_from_k(1.0);
    let ratio = gamma_rate(-w, 0.1, 1.0)? / gamma_rate(w, 0.1, 1.0)?;
    let db = (ratio / (-energy_k(w) / 0.1).exp() - 1.0).abs();
    rep.check(
        "detailed balance",
        db < 1e-12,
        format!("relative error {db:.1e}"),
    );

    // Effective process.
    let model = EffectiveModel::from_params(&p)?;
    let ts0 = zero_temperature_ts(&model)?.max(p.thermo.t_p);
    let grid = default_grid(&p.thermo, ts0)?;
    let coeffs = drift_and_diffusion(&model, &grid)?;
    if model.g2 > 0.0 {
        let mut worst: f64 = 0.0;
        let mut negative = 0;
        for i in (0..grid.n).step_by(grid.n / 16) {
            let rm = rate_matrices(&model, grid.x(i))?;
            negative += rm.g[0]
                .iter()
                .chain(&rm.g[2])
                .flatten()
                .filter(|v| **v < 0.0)
                .count();
            let pr = spectral_projection(&rm.g[0])?;
            let m = SpectralProjection::generator(&rm.g[0]);
            let scale = -pr.lambda;
            for (r, row) in m.iter().enumerate() {
                let mq = row[0] * pr.q[0] + row[1] * pr.q[1];
                worst = worst.max(mq.abs() / scale);
                for c in 0..2 {
                    let id = pr.q[r] * pr.z[c] + pr.v[r] * pr.q_perp[c];
                    worst = worst.max((id - f64::from(u8::from(r == c))).abs());
                }
            }
            worst = worst.max((pr.z[0] * pr.q[0] + pr.z[1] * pr.q[1] - 1.0).abs());
        }
        rep.check(
            "spectral projection",
            worst < 1e-12,
            format!("null space, normalization and completeness within {worst:.1e}"),
        );
        rep.check(
            "rate matrices",
            negative == 0,
            format!("{negative} negative entries in G0, G2"),
        );
    }
    let bad_s = coeffs.points.iter().filter(|c| !(c.s > 0.0)).count();
    let bad_d1 = coeffs.points.iter().filter(|c| c.delta1 < 0.0).count();
    rep.check(
        "diffusion",
        bad_s == 0 && bad_d1 == 0,
        format!(
            "S <= 0 at {bad_s}, delta1 < 0 at {bad_d1} of {} points",
            grid.n
        ),
    );
    let d2_neg = coeffs.points.iter().filter(|c| c.delta2 < 0.0).count();
    if d2_neg > 0 {
        let min = coeffs
            .points
            .iter()
            .filter(|c| c.delta1 > 0.0)
            .map(|c| c.delta2 / c.delta1)
            .fold(f64::INFINITY, f64::min);
        println!("note delta2: negative at {d2_neg} points, min delta2/delta1 = {min:.2e}");
    }

    let ss = steady_state(&model, &grid)?;
    let ou = ou_linearization(&model, ss.x_s, grid.h)?;
    rep.check(
        "steady state",
        !ss.roots.is_empty() && ou.tau > 0.0,
        format!("T_S = {:.6} K, tau_S = {:.3e} s", ss.t_s(), ou.tau),
    );

    let st = stationary_density(&coeffs)?;
    let path = integrate_fp(&st.f, &coeffs, 0.1 * ou.tau, ou.tau / 200.0, 1)?;
    let last = path.last();
    let peak = st.f.iter().copied().fold(0.0, f64::max);
    let drift =
        st.f.iter()
            .zip(&last.f)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
            / peak;
    rep.check(
        "stationary density",
        (st.mass() - 1.0).abs() < 1e-12 && drift < 1e-6 && (last.mass() - 1.0).abs() < 1e-10,
        format!(
            "mass {:.15}, relative change under evolution {drift:.1e}",
            last.mass()
        ),
    );

    if model.g2 > 0.0 {
        let kicks: Vec<f64> = model.transitions.iter().map(|t| t.kick).collect();
        let delta = kicks.iter().copied().map(f64::abs).fold(0.0, f64::max);
        let h = kick_aligned_spacing(&kicks, delta / 10.0)?;
        let x0 = p.thermo.t_p * p.thermo.t_p;
        let n = ((x0 + 40.0 * delta) / h).ceil() as usize;
        let mgrid = Grid::new(h, h, n)?;
        let init = MasterState::delta(mgrid, x0, [0.5, 0.5]);
        let mp = integrate_master(
            &init,
            &model,
            5.0 * p.period(),
            p.period() / 100.0,
            5,
            MasterOptions::default(),
        )?;
        let worst = mp
            .states
            .iter()
            .map(|s| (s.mass() - 1.0).abs())
            .fold(0.0, f64::max);
        let positive = mp
            .states
            .iter()
            .all(|s| s.p.iter().flatten().all(|v| *v >= 0.0));
        rep.check(
            "master equation",
            worst < 1e-10 && positive,
            format!("mass error {worst:.1e}, positive {positive}"),
        );
    }

    // Trajectories.
    let mut sim = cfg.sim_config()?;
    sim.n_trajectories = 16;
    sim.n_steps = sim.n_steps.min(5 * sim.sample_every);
    sim.record = Record::Path;
    let s = Simulator::from_params(&p, sim.dt)?;
    let a = s.run_ensemble(&sim, 1)?;
    let b = s.run_ensemble(&sim, threads.max(2))?;
    rep.check(
        "ensemble determinism",
        a == b,
        format!("1 vs {} threads", threads.max(2)),
    );
    let norm = a
        .records
        .iter()
        .flat_map(|r| &r.populations)
        .map(|q| (q[0] + q[1] - 1.0).abs())
        .fold(0.0, f64::max);
    let nonneg = a.records.iter().flat_map(|r| &r.t_e).all(|t| *t >= 0.0);
    rep.check(
        "trajectory invariants",
        norm < 1e-9 && nonneg,
        format!("norm error {norm:.1e}, T_e >= 0 {nonneg}"),
    );
    Ok(rep.failed)
}
