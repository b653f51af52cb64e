use std::f64::consts::{PI, TAU};

use rand::Rng;
use talbot_core::analytic::{
    averaged_overlap_exact, averaged_overlap_revival, density_overlap, PhaseConfiguration,
};
use talbot_core::disorder::{empirical_correlator, SiteWindow};
use talbot_core::oracle::{
    monte_carlo_average, overlap_by_quadrature, overlap_by_quadrature_unchecked,
    QuadratureOptions,
};
use talbot_core::quench::{
    fit_damped_sine, synthesize_signal, uniform_times, FitOptions, SignalShape,
};
use talbot_core::rng;
use talbot_core::{CorrelatorProfile, DecayLength, DisorderModel, LatticeParams};

const D: f64 = 547e-9;

fn depth_five() -> LatticeParams {
    LatticeParams::rubidium87(D, 5.0).unwrap()
}

#[test]
fn quadrature_agrees_with_closed_form_for_random_phases() {
    let params = depth_five();
    let mut rng = rng::stream(2024, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let draws: Vec<f64> = (0..25).map(|_| rng.random::<f64>() * TAU).collect();
        let phases = PhaseConfiguration::new(-12, draws).unwrap();
        let tau = rng.random::<f64>() * 2.5;
        let q = overlap_by_quadrature(tau, &params, &phases).unwrap();
        let a = density_overlap(tau, &params, &phases).value;
        worst = worst.max((q.overlap.value - a).abs());
        assert!(q.error_estimate < 1e-6);
    }
    assert!(worst < 1e-6, "max deviation {worst:e}");
}

#[test]
fn halving_the_step_shrinks_the_error_estimate() {
    let params = depth_five();
    let phases = PhaseConfiguration::from_fn(-6, 6, |n| 0.7 * n as f64).unwrap();
    let exact = density_overlap(0.37, &params, &phases).value;
    let mut previous: Option<(f64, f64)> = None;
    for step in [1.0, 0.5, 0.25] {
        let q = overlap_by_quadrature_unchecked(
            0.37,
            &params,
            &phases,
            QuadratureOptions {
                step,
                ..QuadratureOptions::default()
            },
        )
        .unwrap();
        let err = (q.overlap.value - exact).abs();
        if let Some((prev_est, prev_err)) = previous {
            if prev_est > 1e-13 {
                assert!(prev_est / q.error_estimate >= 3.0, "{prev_est:e} -> {:e}", q.error_estimate);
            }
            assert!(err <= prev_err + 1e-13);
        }
        previous = Some((q.error_estimate, err));
    }
}

#[test]
fn random_walk_monte_carlo_matches_exact_average() {
    let params = depth_five();
    let model = DisorderModel::random_walk(1.0).unwrap();
    let profile = model.correlator_profile(300).unwrap();
    for tau in [0.5, 1.0, 1.5, 2.0] {
        let mc = monte_carlo_average(tau, &params, &model, SiteWindow::default(), 10_000, 77).unwrap();
        let exact = averaged_overlap_exact(tau, &params, &profile).unwrap().value();
        assert!(
            (mc.mean - exact).abs() < 3.0 * mc.stderr,
            "tau {tau}: {} ± {} vs {exact}",
            mc.mean,
            mc.stderr
        );
    }
}

#[test]
fn empirical_correlators_match_closed_forms() {
    let models = [
        DisorderModel::Coherent,
        DisorderModel::IndependentUniform,
        DisorderModel::random_walk(0.5).unwrap(),
        DisorderModel::random_walk(1.3).unwrap(),
    ];
    for (k, model) in models.iter().enumerate() {
        let emp = empirical_correlator(model, SiteWindow::default(), 8, 10_000, k as u64).unwrap();
        for n in 0..=8 {
            let expected = model.closed_form_correlator(n);
            let tol = 3.0 * emp.stderr[n] + 1e-12;
            assert!(
                (emp.mean[n] - expected).abs() <= tol,
                "{model:?} N={n}: {} ± {} vs {expected}",
                emp.mean[n],
                emp.stderr[n]
            );
        }
    }
}

#[test]
fn coherence_length_survives_the_revival_sums() {
    // Revival peak heights above the plateau decay as C_{2N}; a log-linear
    // fit over N recovers the decay length of the correlator.
    let params = depth_five();
    let plateau = params.plateau();
    for xi in [3.0, 6.0, 12.0] {
        let model = DisorderModel::random_walk_with_length(DecayLength::Finite(xi)).unwrap();
        let profile = model.correlator_profile(400).unwrap();
        let points: Vec<(f64, f64)> = (1..=4)
            .map(|n| {
                let r = averaged_overlap_revival(n, &params, &profile).unwrap().value();
                (2.0 * n as f64, (r / plateau - 1.0).ln())
            })
            .collect();
        let m = points.len() as f64;
        let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
        let my = points.iter().map(|p| p.1).sum::<f64>() / m;
        let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        let recovered = -1.0 / slope;
        assert!((recovered / xi - 1.0).abs() < 0.05, "{xi} -> {recovered}");
    }
}

#[test]
fn noisy_fits_at_experimental_sampling() {
    let shape = SignalShape {
        talbot_time: 130e-6,
        amplitude: 0.1,
        baseline: 0.5,
        phase: -PI / 2.0,
    };
    let xi0 = 2.0 * 525.0 / 130.0;
    let times = uniform_times(0.0, 1e-3, 28).unwrap();
    let profile = CorrelatorProfile::coherent(4);
    let mut dt = Vec::new();
    let mut dd = Vec::new();
    for seed in 0..100 {
        let s = synthesize_signal(&shape, &profile, DecayLength::Finite(xi0), &times, 0.05 * 0.1, seed)
            .unwrap();
        let fit = fit_damped_sine(&s, &FitOptions::with_hint(130e-6)).unwrap();
        dt.push((fit.talbot_time_fit / 130e-6 - 1.0).abs());
        dd.push((fit.decay_time / 525e-6 - 1.0).abs());
    }
    let median = |v: &mut Vec<f64>| {
        v.sort_by(f64::total_cmp);
        0.5 * (v[49] + v[50])
    };
    let (mt, md) = (median(&mut dt), median(&mut dd));
    assert!(mt < 0.02, "median period error {mt}");
    assert!(md < 0.15, "median decay error {md}");
}
