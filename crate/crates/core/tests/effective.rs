use calorijump::effective::*;
use calorijump::floquet::{self, PeriodicHamiltonian};
use calorijump::params::ModelParams;
use calorijump::thermo::ThermoParams;
use calorijump::units::omega_from_k;
use proptest::prelude::*;

fn model(g2: f64) -> (ModelParams, EffectiveModel) {
    let p = ModelParams::reference().with_g2(g2);
    let m = EffectiveModel::from_params(&p).unwrap();
    (p, m)
}

#[test]
fn mean_heating_at_zero_temperature() {
    // (ħ/k_B C) g² Σ ω²|D|²Q over emission channels, with Q from the T = 0
    // balance; evaluated independently in 40-digit arithmetic.
    let (_, m) = model(0.01);
    let c = coefficients_at(&m, 1e-6, 1e-8).unwrap();
    assert!(
        (c.j1 / 434_219.125_037_234_6 - 1.0).abs() < 1e-9,
        "{}",
        c.j1
    );
}

#[test]
fn diffusion_is_the_exact_kick_variance_rate() {
    // Mean and variance rates of the accumulated kick from the tilted
    // generator, evaluated independently at this X.
    let (_, m) = model(0.01);
    let x = 0.115_292_169_299_708_65;
    let c = coefficients_at(&m, x, 1e-6).unwrap();
    assert!((c.j1 / 434_902.115_300_160_1 - 1.0).abs() < 1e-10);
    assert!((c.delta1 / 323.468_384_399_319_4 - 1.0).abs() < 1e-10);
    let qubit = c.delta1 + c.delta2;
    assert!(
        (qubit / 323.275_436_798_028_7 - 1.0).abs() < 1e-9,
        "{qubit}"
    );
}

#[test]
fn first_order_matrix_is_odd_in_the_kick() {
    let (_, m) = model(0.05);
    let mut flipped = m.clone();
    for t in &mut flipped.transitions {
        t.kick = -t.kick;
    }
    let a = rate_matrices(&m, 0.05).unwrap();
    let b = rate_matrices(&flipped, 0.05).unwrap();
    for r in 0..2 {
        for s in 0..2 {
            assert_eq!(a.g[0][r][s], b.g[0][r][s]);
            assert_eq!(a.g[1][r][s], -b.g[1][r][s]);
            assert_eq!(a.g[2][r][s], b.g[2][r][s]);
        }
    }
}

#[test]
fn cold_undriven_qubit_sits_in_the_ground_level() {
    let w = omega_from_k(1.0);
    let h = PeriodicHamiltonian::monochromatic(w, 0.0, 0.7 * w).unwrap();
    let sol = floquet::solve(&h).unwrap();
    let th = ThermoParams::new(2e-12, 0.1, 1500.0).unwrap();
    let m = EffectiveModel::new(&th, 0.01, &sol.channels);
    let r = rate_matrices(&m, 1e-6).unwrap();
    let p = spectral_projection(&r.g[0]).unwrap();
    assert_eq!(p.q, [1.0, 0.0]);
}

proptest! {
    #[test]
    fn projection_duality(up in 1e-6f64..1e6, down in 1e-6f64..1e6) {
        let p = spectral_projection(&[[0.0, down], [up, 0.0]]).unwrap();
        let dot = |a: [f64; 2], b: [f64; 2]| a[0] * b[0] + a[1] * b[1];
        prop_assert!(dot(p.q_perp, p.q).abs() < 1e-15);
        prop_assert!((dot(p.q_perp, p.v) - 1.0).abs() < 1e-14);
        prop_assert!((p.q[0] + p.q[1] - 1.0).abs() < 1e-15);
        prop_assert!((p.lambda + up + down).abs() <= 1e-12 * (up + down));
    }
}

#[test]
fn zero_temperature_route_matches_the_root() {
    for g2 in [0.005, 0.01, 0.02, 0.05, 0.1] {
        let (p, m) = model(g2);
        let ts0 = zero_temperature_ts(&m).unwrap();
        let grid = default_grid(&p.thermo, ts0).unwrap();
        let ss = steady_state(&m, &grid).unwrap();
        assert_eq!(ss.roots.len(), 1);
        let rel = (ss.t_s() - ts0).abs() / (ss.t_s() - p.thermo.t_p);
        assert!(rel < 0.01, "g2 = {g2}: {} vs {ts0}", ss.t_s());
    }
}

#[test]
fn steady_state_follows_fifth_power_law() {
    // T_S⁵ − T_p⁵ is linear in g² up to the small thermal corrections.
    let tp5 = 0.1f64.powi(5);
    let excess = |g2: f64| {
        let (p, m) = model(g2);
        let grid = default_grid(&p.thermo, zero_temperature_ts(&m).unwrap()).unwrap();
        steady_state(&m, &grid).unwrap().t_s().powi(5) - tp5
    };
    let ratio = excess(0.1) / excess(0.01);
    assert!((ratio / 10.0 - 1.0).abs() < 0.02, "{ratio}");
}

#[test]
fn zero_coupling_steady_state_is_the_bath() {
    let (p, m) = model(0.0);
    let grid = default_grid(&p.thermo, 0.1).unwrap();
    let ss = steady_state(&m, &grid).unwrap();
    assert!((ss.t_s() - 0.1).abs() < 1e-10);
}

#[test]
fn lorentzian_tail_has_slope_minus_two() {
    let (p, m) = model(0.05);
    let grid = default_grid(&p.thermo, 0.5).unwrap();
    let ss = steady_state(&m, &grid).unwrap();
    let ou = ou_linearization(&m, ss.x_s, grid.h).unwrap();
    let w1 = 100.0 / ou.tau;
    let w2 = 1000.0 / ou.tau;
    let slope = (ou.lorentzian(w2) / ou.lorentzian(w1)).ln() / 10f64.ln();
    assert!((slope + 2.0).abs() < 1e-3, "{slope}");
    // One-sided density integrates to the variance.
    let n = 400_000;
    let top = 1e4 / ou.tau;
    let dw = top / n as f64;
    let total: f64 = (0..n)
        .map(|i| ou.one_sided_psd((i as f64 + 0.5) * dw) * dw)
        .sum();
    assert!(
        (total / ou.variance - 1.0).abs() < 1e-3,
        "{}",
        total / ou.variance
    );
}

#[test]
fn stationary_density_is_preserved_for_one_relaxation_time() {
    let (_, m) = model(0.01);
    let grid = Grid::spanning(0.08, 0.16, 1201).unwrap();
    let c = drift_and_diffusion(&m, &grid).unwrap();
    let st = stationary_density(&c).unwrap();
    let ss = steady_state(&m, &grid).unwrap();
    let tau = ou_linearization(&m, ss.x_s, grid.h).unwrap().tau;
    let path = integrate_fp(&st.f, &c, tau, tau / 200.0, 1).unwrap();
    let last = path.last();
    let peak = st.f.iter().copied().fold(0.0, f64::max);
    let err =
        st.f.iter()
            .zip(&last.f)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
    assert!(err < 1e-6 * peak, "{err}");
    assert!((last.mass() - 1.0).abs() < 1e-10);
}

#[test]
fn fp_relaxes_to_the_stationary_density() {
    let (_, m) = model(0.01);
    let grid = Grid::spanning(0.005, 0.16, 1500).unwrap();
    let c = drift_and_diffusion(&m, &grid).unwrap();
    let st = stationary_density(&c).unwrap();
    let mut f0 = vec![0.0; grid.n];
    f0[grid.index_of(0.01)] = 1.0 / grid.h;
    let path = integrate_fp(&f0, &c, 2e-6, 2e-9, 4).unwrap();
    assert_eq!(path.times.len(), 5);
    let last = path.last();
    let tv = calorijump::stats::total_variation(&st.masses(), &last.masses());
    assert!(tv < 1e-3, "{tv}");
    for d in &path.densities {
        let mass: f64 = d.iter().sum::<f64>() * grid.h;
        assert!((mass - 1.0).abs() < 1e-10);
        assert!(d.iter().all(|v| *v >= 0.0));
    }
}

#[test]
fn master_without_channels_is_the_phonon_fp() {
    let th = ThermoParams::new(2e-12, 0.1, 1500.0).unwrap();
    let m = EffectiveModel::phonons_only(&th);
    let h = 1e-5;
    let grid = Grid::new(h, h, 3000).unwrap();
    let init = MasterState::delta(grid, 0.012, [0.3, 0.7]);
    let t = 2e-6;
    let dt = 1e-8;
    let mp = integrate_master(&init, &m, t, dt, 1, MasterOptions::default()).unwrap();
    let coeffs = drift_and_diffusion(&m, &grid).unwrap();
    let mut f0 = vec![0.0; grid.n];
    f0[grid.index_of(0.012)] = 1.0 / h;
    // Two half steps per step in the split scheme against full steps here.
    let fp = integrate_fp(&f0, &coeffs, t, 0.5 * dt, 1).unwrap().last();
    let last = mp.states.last().unwrap();
    for r in 0..2 {
        let w = [0.3, 0.7][r];
        let err = last.p[r]
            .iter()
            .zip(&fp.f)
            .map(|(a, b)| (a - w * b).abs())
            .fold(0.0, f64::max);
        assert!(
            err < 1e-9 * fp.f.iter().copied().fold(0.0, f64::max),
            "{err}"
        );
    }
}

#[test]
fn frozen_temperature_relaxes_populations_at_lambda() {
    let (_, m) = model(0.05);
    let h = 1e-4;
    let grid = Grid::new(h, h, 1000).unwrap();
    let x = 0.04;
    let init = MasterState::delta(grid, x, [1.0, 0.0]);
    let opts = MasterOptions {
        phonons: false,
        kicks: false,
    };
    let rm = rate_matrices(&m, grid.x(grid.index_of(x))).unwrap();
    let pr = spectral_projection(&rm.g[0]).unwrap();
    let t = 2.0 / -pr.lambda;
    let path = integrate_master(&init, &m, t, t / 4000.0, 8, opts).unwrap();
    let i = grid.index_of(x);
    for (tk, st) in path.times.iter().zip(&path.states) {
        let p1 = st.p[1][i] * grid.h;
        let want = pr.q[1] * (1.0 - (pr.lambda * tk).exp());
        assert!((p1 - want).abs() < 1e-6, "t = {tk}: {p1} vs {want}");
        assert!((st.mass() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn master_conserves_mass_and_stays_positive() {
    let (p, m) = model(0.05);
    let kicks: Vec<f64> = m.transitions.iter().map(|t| t.kick).collect();
    let h = kick_aligned_spacing(&kicks, 1e-4).unwrap();
    let grid = Grid::new(h, h, 1500).unwrap();
    let init = MasterState::delta(grid, 0.01, [0.5, 0.5]);
    let t = 20.0 * p.period();
    let path =
        integrate_master(&init, &m, t, p.period() / 20.0, 5, MasterOptions::default()).unwrap();
    for st in &path.states {
        assert!((st.mass() - 1.0).abs() < 1e-10);
        assert!(st.p.iter().flatten().all(|v| *v >= 0.0));
    }
}

#[test]
fn misaligned_grid_is_rejected() {
    let (_, m) = model(0.01);
    let kick = m.transitions[0].kick;
    let h = kick / 7.3;
    let grid = Grid::new(h, h, 100).unwrap();
    let init = MasterState::delta(grid, 0.01, [1.0, 0.0]);
    let r = integrate_master(&init, &m, 1e-12, 1e-13, 1, MasterOptions::default());
    assert!(matches!(r, Err(calorijump::Error::GridMisaligned { .. })));
}
