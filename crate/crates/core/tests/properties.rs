use std::f64::consts::PI;

use proptest::prelude::*;
use talbot_core::analytic::{
    averaged_overlap_antirevival, averaged_overlap_decomposed, averaged_overlap_exact,
    averaged_overlap_revival, density_overlap, weight_even, weight_even_dual, weight_odd,
    weight_odd_dual,
};
use talbot_core::lattice::{constants::RB87_MASS, gaussian_width_from_depth, talbot_length};
use talbot_core::quench::{
    coherence_correction, compose, decay_from_xi, fit_damped_sine, transport_bounds,
    uniform_times, xi_from_decay, FitOptions, SignalShape, TalbotSignal,
};
use talbot_core::{CorrelatorProfile, DecayLength, LatticeParams, PhaseConfiguration};

const D: f64 = 547e-9;

fn lattice(ratio: f64) -> LatticeParams {
    LatticeParams::with_sigma(D, RB87_MASS, 5.0, ratio * D).unwrap()
}

fn random_profile() -> impl Strategy<Value = CorrelatorProfile> {
    prop::collection::vec(-1.0f64..=1.0, 60).prop_map(|mut v| {
        v[0] = 1.0;
        CorrelatorProfile::new(v).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn uniform_phases_revive_every_talbot_time(tau in 0.0f64..3.0, ratio in 0.12f64..0.3) {
        let params = lattice(ratio);
        let phases = PhaseConfiguration::uniform(-120, 120).unwrap();
        let a = density_overlap(tau, &params, &phases).value;
        let b = density_overlap(tau + 1.0, &params, &phases).value;
        prop_assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn overlaps_are_non_negative(
        tau in 0.0f64..4.0,
        phases in prop::collection::vec(0.0f64..(2.0 * PI), 21),
    ) {
        let cfg = PhaseConfiguration::new(-10, phases).unwrap();
        prop_assert!(density_overlap(tau, &lattice(0.2), &cfg).value >= 0.0);
    }

    #[test]
    fn decomposition_matches_double_sum(profile in random_profile(), tau in 0.0f64..2.5) {
        let params = lattice(0.2);
        let exact = averaged_overlap_exact(tau, &params, &profile).unwrap();
        let split = averaged_overlap_decomposed(tau, &params, &profile).unwrap();
        prop_assert!((exact.value() - split.value()).abs() < 1e-9);
    }

    #[test]
    fn ensemble_average_is_positive_and_bounded(xi in 0.05f64..200.0, tau in 0.0f64..4.0, ratio in 0.12f64..0.25) {
        let params = lattice(ratio);
        let profile = CorrelatorProfile::exponential(xi, 120).unwrap();
        let avg = averaged_overlap_exact(tau, &params, &profile).unwrap();
        let peak = averaged_overlap_exact(0.0, &params, &CorrelatorProfile::coherent(120)).unwrap();
        prop_assert!(avg.value() > 0.0);
        prop_assert!(avg.value() <= peak.value() + avg.truncation_bound + 1e-12);
    }

    #[test]
    fn direct_and_dual_weights_agree(l in -6i64..=6, tau in 0.05f64..4.0, ratio in 0.12f64..0.3) {
        let params = lattice(ratio);
        let (e, ed) = (weight_even(l, tau, &params), weight_even_dual(l, tau, &params).unwrap());
        let (o, od) = (weight_odd(l, tau, &params), weight_odd_dual(l, tau, &params).unwrap());
        prop_assume!(e.tail_bound < 1e-12 && ed.tail_bound < 1e-12);
        prop_assume!(o.tail_bound < 1e-12 && od.tail_bound < 1e-12);
        prop_assert!((e.value - ed.value).norm() < 1e-10);
        prop_assert!((o.value - od.value).norm() < 1e-10);
    }

    #[test]
    fn contrast_is_monotone_in_constant_correlator(
        c1 in 0.0f64..1.0,
        c2 in 0.0f64..1.0,
        order in 0u32..4,
    ) {
        let (lo, hi) = if c1 <= c2 { (c1, c2) } else { (c2, c1) };
        let params = lattice(0.2);
        let flat = |c: f64| CorrelatorProfile::from_fn(200, |n| if n == 0 { 1.0 } else { c }).unwrap();
        if order > 0 {
            let r_lo = averaged_overlap_revival(order, &params, &flat(lo)).unwrap().value();
            let r_hi = averaged_overlap_revival(order, &params, &flat(hi)).unwrap().value();
            prop_assert!(r_hi >= r_lo - 1e-14);
        }
        let a_lo = averaged_overlap_antirevival(order, &params, &flat(lo)).unwrap().value();
        let a_hi = averaged_overlap_antirevival(order, &params, &flat(hi)).unwrap().value();
        prop_assert!(a_hi <= a_lo + 1e-14);
    }

    #[test]
    fn width_decreases_with_depth(s in 0.1f64..100.0, ds in 0.01f64..10.0) {
        prop_assert!(gaussian_width_from_depth(s + ds, D).unwrap() < gaussian_width_from_depth(s, D).unwrap());
    }

    #[test]
    fn derived_scales_rescale_with_spacing(c in 0.1f64..10.0, s in 0.5f64..40.0) {
        let a = LatticeParams::rubidium87(D, s).unwrap().derived().unwrap();
        let b = LatticeParams::rubidium87(c * D, s).unwrap().derived().unwrap();
        prop_assert!((b.talbot_time / a.talbot_time / (c * c) - 1.0).abs() < 1e-12);
        prop_assert!((b.recoil_energy * c * c / a.recoil_energy - 1.0).abs() < 1e-12);
        prop_assert!((a.exponent_factor - b.exponent_factor).abs() < 1e-12);
        let lam = 774e-9;
        prop_assert!((talbot_length(lam, c * D).unwrap() / talbot_length(lam, D).unwrap() / (c * c) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn decay_conversion_inverts(xi in 0.01f64..1e4, t in 1e-6f64..1e-2) {
        let back = xi_from_decay(decay_from_xi(DecayLength::Finite(xi), t).unwrap(), t).unwrap();
        prop_assert!((back.sites().unwrap() / xi - 1.0).abs() < 1e-14);
    }

    #[test]
    fn reference_correction_inverts_composition(coh in 0.05f64..1e3, r in 0.05f64..1e3) {
        let xi0 = compose(DecayLength::Finite(coh), DecayLength::Finite(r));
        let x = xi0.sites().unwrap();
        prop_assert!((x * (1.0 / coh + 1.0 / r) - 1.0).abs() < 1e-14);
        let back = coherence_correction(xi0, DecayLength::Finite(r)).unwrap();
        prop_assert!((1.0 / back.sites().unwrap() + 1.0 / r - 1.0 / x).abs() * x < 1e-12);
    }

    #[test]
    fn ballistic_exceeds_diffusive(rate in 1.0f64..1e4, factor in 1.0001f64..1e3) {
        let t = factor / (4.0 * rate);
        let b = transport_bounds(rate, t).unwrap();
        prop_assert!(b.ballistic > b.diffusive);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn fit_is_affine_invariant(
        scale in prop::sample::select(vec![-3.0, -0.2, 0.5, 7.0, 1e3]),
        offset in -50.0f64..50.0,
        decay in 150e-6f64..900e-6,
    ) {
        let shape = SignalShape { talbot_time: 130e-6, amplitude: 0.1, baseline: 0.5, phase: -PI / 2.0 };
        let times = uniform_times(0.0, 1e-3, 40).unwrap();
        let v = times.iter().map(|&t| shape.evaluate(t, decay)).collect();
        let s = TalbotSignal::new(times, v, None).unwrap();
        let opts = FitOptions::with_hint(130e-6);
        let a = fit_damped_sine(&s, &opts).unwrap();
        let b = fit_damped_sine(&s.affine(scale, offset).unwrap(), &opts).unwrap();
        prop_assert!((a.talbot_time_fit / b.talbot_time_fit - 1.0).abs() < 1e-8);
        prop_assert!((a.decay_time / b.decay_time - 1.0).abs() < 1e-7);
        prop_assert!((b.amplitude / (a.amplitude * scale.abs()) - 1.0).abs() < 1e-7);
    }
}
