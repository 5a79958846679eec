//! Property tests tying the closed forms, the amplitude propagation, and
//! the brute-force oracle together over randomized inputs.

use num_complex::Complex64;
use proptest::prelude::*;

use cavityline::dynamics::{
    evolve, inversion, inversion_excited, inversion_ground, sector_propagator, state_from,
    state_from_raw, AtomInit,
};
use cavityline::field::{FieldSpec, PhotonDistribution, TruncationPolicy};
use cavityline::oracle::{inversion_numeric, propagate_numeric, PropagationMethod};
use cavityline::params::ModelParams;

const TR: TruncationPolicy = TruncationPolicy { tail_eps: 1e-12 };

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn arb_params() -> impl Strategy<Value = ModelParams> {
    (-10.0..10.0f64, -1.0..1.0f64, 0.05..3.0f64)
        .prop_map(|(d, chi, g)| ModelParams::new(d, chi, g).unwrap())
}

fn arb_dist() -> impl Strategy<Value = PhotonDistribution> {
    prop_oneof![
        (0usize..9).prop_map(PhotonDistribution::fock),
        (0.0..2.2f64).prop_map(|a| PhotonDistribution::coherent(c(a), TR)),
        (0.3..2.2f64, prop_oneof![Just(0.0), Just(std::f64::consts::PI), Just(1.3)])
            .prop_map(|(a, phi)| PhotonDistribution::cat(c(a), phi, TR).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sector_propagator_is_unitary(
        p in arb_params(),
        n in 0usize..60,
        t in 0.0..100.0f64,
    ) {
        let u = sector_propagator(&p, n, t);
        let s = u.m11.norm_sqr() + u.m12.norm_sqr();
        prop_assert!((s - 1.0).abs() <= 1e-12);
        prop_assert!((u.global_phase.norm() - 1.0).abs() <= 1e-12);
        prop_assert!(u.beta > 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    // the closed forms against amplitude propagation of the same state
    #[test]
    fn closed_forms_match_amplitude_propagation(
        dist in arb_dist(),
        p in arb_params(),
        t in 0.0..50.0f64,
    ) {
        let exc = state_from(&dist, AtomInit::Excited, None);
        let w_amp = inversion(&evolve(&exc, &p, t));
        let w_closed = inversion_excited(&dist, &p, t);
        prop_assert!((w_amp - w_closed).abs() <= 1e-10,
            "excited: {w_amp} vs {w_closed}");

        // ground closed form uses raw P_{n+1} weights
        let gnd = state_from_raw(&dist, AtomInit::Ground, None);
        let w_amp = inversion(&evolve(&gnd, &p, t));
        let w_closed = inversion_ground(&dist, &p, t);
        prop_assert!((w_amp - w_closed).abs() <= 1e-10,
            "ground: {w_amp} vs {w_closed}");
    }

    #[test]
    fn evolution_preserves_norm_and_bounds(
        dist in arb_dist(),
        p in arb_params(),
        t in 0.0..200.0f64,
    ) {
        let s = state_from(&dist, AtomInit::Excited, None);
        let out = evolve(&s, &p, t);
        prop_assert!((out.norm_sqr() - s.norm_sqr()).abs() <= 1e-10);

        let w = inversion_excited(&dist, &p, t);
        prop_assert!((-1.0 - 1e-9..=1.0 + 1e-9).contains(&w));
        let w = inversion_ground(&dist, &p, t);
        prop_assert!((-1.0 - 1e-9..=1.0 + 1e-9).contains(&w));
    }

    #[test]
    fn chi_zero_reduces_to_plain_rabi_frequencies(
        delta in -10.0..10.0f64,
        g in 0.05..3.0f64,
        n in 0usize..80,
    ) {
        let p = ModelParams::new(delta, 0.0, g).unwrap();
        let plain = (delta * delta + 4.0 * g * g * (n as f64 + 1.0)).sqrt();
        prop_assert!((p.rabi_freq(n) - plain).abs() <= 1e-12 * plain);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // closed forms against full-matrix diagonalization, population level
    #[test]
    fn closed_forms_match_oracle(
        dist in arb_dist(),
        p in arb_params(),
        atom in prop_oneof![Just(AtomInit::Excited), Just(AtomInit::Ground)],
    ) {
        let state0 = state_from_raw(&dist, atom, None);
        let times: Vec<f64> = (0..40).map(|i| i as f64 * 0.5).collect();
        let oracle = inversion_numeric(&state0, &p, &times).unwrap();
        for (&t, &w_o) in times.iter().zip(&oracle) {
            let w_c = match atom {
                AtomInit::Excited => inversion_excited(&dist, &p, t),
                AtomInit::Ground => inversion_ground(&dist, &p, t),
            };
            prop_assert!((w_c - w_o).abs() <= 1e-8, "t={t}: {w_c} vs {w_o}");
        }
    }

    // full complex amplitudes against the oracle, which pins the
    // e^{i chi t/2} phase convention
    #[test]
    fn amplitudes_match_oracle_including_phase(
        dist in arb_dist(),
        p in arb_params(),
        t in 0.0..30.0f64,
    ) {
        let s0 = state_from(&dist, AtomInit::Excited, None);
        let closed = evolve(&s0, &p, t);
        let oracle = propagate_numeric(&s0, &p, t, PropagationMethod::Eigen).unwrap();
        for (a, b) in closed.sectors.iter().zip(&oracle.sectors) {
            prop_assert!((a.0 - b.0).norm() <= 1e-8);
            prop_assert!((a.1 - b.1).norm() <= 1e-8);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    // the two structurally different oracle integrators agree
    #[test]
    fn eigen_and_rk_oracles_agree(
        n0 in 0usize..6,
        p in arb_params(),
        t in 0.0..15.0f64,
    ) {
        let dist = PhotonDistribution::fock(n0);
        let s0 = state_from(&dist, AtomInit::Excited, None);
        let a = propagate_numeric(&s0, &p, t, PropagationMethod::Eigen).unwrap();
        let b = propagate_numeric(&s0, &p, t, PropagationMethod::rk_default()).unwrap();
        for (x, y) in a.sectors.iter().zip(&b.sectors) {
            prop_assert!((x.0 - y.0).norm() <= 1e-8);
            prop_assert!((x.1 - y.1).norm() <= 1e-8);
        }
    }
}

#[test]
fn field_spec_distributions_round_trip_through_parser() {
    for s in ["fock:2", "coherent:1.4", "cat:1.2:pi", "cat:0.9:0"] {
        let spec: FieldSpec = s.parse().unwrap();
        let d1 = spec.distribution(TR).unwrap();
        let d2: PhotonDistribution =
            spec.to_string().parse::<FieldSpec>().unwrap().distribution(TR).unwrap();
        assert_eq!(d1.probs(), d2.probs());
    }
}
