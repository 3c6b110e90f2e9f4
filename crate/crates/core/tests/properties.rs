use std::f64::consts::PI;

use ndarray::Array1;
use proptest::prelude::*;

use blochsim_core::experiments::{
    estimate_period, fit_power_law, index_width, participation_ratio, population_fidelity, preset, run_scenario,
    total_variation, RunOptions, ScenarioConfig,
};
use blochsim_core::linalg::{eig_hermitian, Basis, LinearOperator, StateVector};
use blochsim_core::models::{
    DisorderSpec, DrivenHo, DrivenHoSpec, Hamiltonian, LzGrid, LzGridSpec, SingleBand, SingleBandSpec,
};
use blochsim_core::propagator::{propagate, PropagationPlan};
use blochsim_core::C64;

fn state(re: &[f64], im: &[f64], basis: Basis) -> StateVector {
    let a: Array1<C64> = re.iter().zip(im).map(|(&x, &y)| C64::new(x, y)).collect();
    StateVector::normalized(a, basis).unwrap()
}

fn distribution(w: &[f64]) -> Vec<f64> {
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

fn ho(n: usize, j: f64, std_dev: f64) -> DrivenHo {
    DrivenHo::new(DrivenHoSpec {
        omega: 1.0,
        drive_frequency: 1.2,
        drive_amplitude: j,
        n_fock: n,
        disorder: Some(DisorderSpec { std_dev, seed: 3 }),
    })
    .unwrap()
}

fn check_operator<H: Hamiltonian>(m: &H, t: f64, re: &[f64], im: &[f64]) {
    let h = m.matrix(t);
    let psi = state(re, im, m.basis());
    let dense = h.apply(psi.view());
    let mut y = Array1::zeros(m.dim());
    m.apply(t, psi.view(), y.view_mut());
    let err = (&dense - &y).iter().fold(0.0_f64, |a, z| a.max(z.norm()));
    assert!(err < 1e-12, "{err}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn structured_apply_matches_dense_matrix(
        t in -10.0..10.0f64,
        j in 0.05..2.0f64,
        re in prop::collection::vec(-1.0..1.0f64, 22),
        im in prop::collection::vec(-1.0..1.0f64, 22),
    ) {
        let sb = SingleBand::new(SingleBandSpec { hopping: j, tilt: 0.7, n_sites: 11, disorder: None }).unwrap();
        check_operator(&sb, t, &re[..11], &im[..11]);
        check_operator(&ho(22, j, 0.1), t, &re, &im);
        let g = LzGrid::new(LzGridSpec { omega: 0.5, lambda: 1.0, coupling: j, n_levels: 11 }).unwrap();
        check_operator(&g, t, &re, &im);
    }

    #[test]
    fn propagation_preserves_norm(
        j in 0.1..1.0f64,
        t1 in 0.5..4.0f64,
        re in prop::collection::vec(-1.0..1.0f64, 30),
        im in prop::collection::vec(-1.0..1.0f64, 30),
    ) {
        let m = ho(30, j, 0.2);
        let psi0 = state(&re, &im, Basis::Fock);
        let plan = PropagationPlan::new(0.0, t1, t1 / 400.0, &[t1]).unwrap();
        let traj = propagate(&m, &psi0, &plan).unwrap();
        prop_assert!((traj.final_state().norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn grid_relabeling_is_invertible_away_from_the_edges(
        k in 0i64..4,
        re in prop::collection::vec(-1.0..1.0f64, 26),
        im in prop::collection::vec(-1.0..1.0f64, 26),
    ) {
        let g = LzGrid::new(LzGridSpec { omega: 0.5, lambda: 1.0, coupling: 0.2, n_levels: 13 }).unwrap();
        let psi = state(&re, &im, Basis::DiabaticLz);
        let back = g.relabel(g.relabel(psi.view(), k).view(), -k);
        let n = 13usize;
        let k = k as usize;
        for i in (k..n - k).chain(n + k..2 * n - k) {
            prop_assert_eq!(back[i], psi.amplitudes()[i]);
        }
    }

    #[test]
    fn oscillator_ladder_matches_diagonalisation(t in 0.0..6.0f64, j in 0.0..1.0f64) {
        let m = ho(80, j, 0.0);
        let numeric = eig_hermitian(&m.matrix(t)).unwrap().values;
        let analytic = m.analytic_adiabatic_energies(t).unwrap();
        for n in 0..30 {
            prop_assert!((numeric[n] - analytic[n]).abs() < 1e-9, "level {}: {} vs {}", n, numeric[n], analytic[n]);
        }
    }

    #[test]
    fn distribution_measures_stay_in_range(w in prop::collection::vec(0.001..1.0f64, 2..60), v in prop::collection::vec(0.001..1.0f64, 60)) {
        let p = distribution(&w);
        let q = distribution(&v[..p.len()]);
        let n = p.len() as f64;
        let pr = participation_ratio(&p);
        prop_assert!(pr >= 1.0 - 1e-12 && pr <= n + 1e-9);
        let s = index_width(&p);
        prop_assert!(s >= 0.0 && s <= 0.5 * (n - 1.0) + 1e-12);
        let f = population_fidelity(&p, &q);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&f));
        prop_assert!((f - population_fidelity(&q, &p)).abs() < 1e-15);
        prop_assert!((population_fidelity(&p, &p) - 1.0).abs() < 1e-12);
        let tv = total_variation(&p, &q);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&tv));
    }

    #[test]
    fn power_law_recovers_exponent(gamma in -1.5..2.5f64, a in 0.1..10.0f64) {
        let t: Vec<f64> = (1..40).map(|k| k as f64 * 0.25).collect();
        let y: Vec<f64> = t.iter().map(|s| a * s.powf(gamma)).collect();
        let f = fit_power_law(&t, &y, [0.25, 10.0]).unwrap();
        prop_assert!((f.exponent - gamma).abs() < 1e-9);
        prop_assert!((f.prefactor - a).abs() < 1e-8 * a);
    }

    #[test]
    fn period_of_squared_sine_within_one_sample(t0 in 1.0..6.0f64) {
        let h = 0.02;
        let t: Vec<f64> = (0..(8.0 * t0 / h) as usize).map(|k| k as f64 * h).collect();
        let y: Vec<f64> = t.iter().map(|s| (PI * s / t0).sin().powi(2)).collect();
        let e = estimate_period(&t, &y).unwrap();
        prop_assert!((e.period - t0).abs() <= h, "{:?} vs {}", e, t0);
    }

    #[test]
    fn overrides_survive_a_text_round_trip(j in 0.01..50.0f64, seed in 0u64..1_000_000) {
        let c = preset("fig2c").unwrap()
            .with_overrides(&[format!("model.J={j:e}"), format!("ensemble.master_seed={seed}")])
            .unwrap()
            .resolved()
            .unwrap();
        let text = serde_json::to_string(&c.to_value()).unwrap();
        let back = ScenarioConfig::from_json_str(&text).unwrap();
        prop_assert_eq!(back.hash().unwrap(), c.hash().unwrap());
        prop_assert_eq!(&back, &c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn ensemble_average_is_normalized(std_dev in 0.0..1.0f64, seed in 0u64..1000) {
        let c = ScenarioConfig::from_json_str(&format!(r#"{{
            "name": "p",
            "model": {{"kind": "driven_ho", "omega": 1.0, "Omega": 1.2, "J": 0.5, "n_fock": 40,
                       "disorder": {{"std_dev": {std_dev}, "seed": 0}}}},
            "initial": {{"kind": "fock", "n": 10}},
            "plan": {{"t1": 5.235987755982989, "dt": 0.005235987755982988}},
            "ensemble": {{"n_realizations": 3, "master_seed": {seed}}}
        }}"#)).unwrap();
        let out = run_scenario(&c, &RunOptions::default()).unwrap();
        for p in &out.populations {
            prop_assert!((p.sum() - 1.0).abs() < 1e-9);
        }
    }
}
