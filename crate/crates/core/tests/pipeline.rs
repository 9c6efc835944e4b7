mod common;

use std::f64::consts::PI;

use gaussreg::loops::{
    self_energy, self_energy_derivative, tadpole_reduced, tadpole_regularized, vertex, vertex_mass_sq,
    ward_takahashi_check, CouplingParams, TadpoleParams,
};
use gaussreg::propagator::{feynman_propagator_p, PropagatorParams};
use gaussreg::quad::{integrate_1d, QuadratureConfig};
use gaussreg::testfn::{eval_g0_p, DispersionTensors, FourMomentum, TestFunctionParams};
use gaussreg::tlr::{amplitude, extend_distribution, partition_of_unity, RationalKernel, RunningSupport, TlrConfig};
use gaussreg::Error;

#[test]
fn known_answer_suite_converges_honestly() {
    // x^-1/2 reaches the bisection floor before 1e-8; it must still be honest
    for case in common::known_answer_suite() {
        assert!(
            case.converged || case.estimate > 1e-10,
            "{} claims an unconverged tiny error",
            case.name
        );
        assert!(
            case.honest(),
            "{}: error {:e} vs estimate {:e}",
            case.name,
            case.abs_error,
            case.estimate
        );
    }
}

#[test]
fn radial_tadpole_matches_reduced_form() {
    for (b, m) in [(0.5, 0.3), (2.0, 1.0), (10.0, 4.0)] {
        let p = TadpoleParams::new(b, CouplingParams::new(0.7, m, 0.01)).unwrap();
        let radial = tadpole_regularized(&p, &QuadratureConfig::default()).unwrap();
        let reduced = tadpole_reduced(p.c_sq(), b, 0.7, &QuadratureConfig::default()).unwrap();
        assert!(
            (radial.value - reduced.value).abs() < 1e-8 * reduced.value,
            "{radial:?} vs {reduced:?}"
        );
    }
}

#[test]
fn propagator_regulator_is_squared_test_function() {
    // G(p) ∝ |g~0(p)|² for the ground state
    let disp = DispersionTensors::diagonal([0.4, 0.7, 0.5, 0.9]).unwrap();
    let tf = TestFunctionParams::ground([0.0; 4], [0.1, -0.2, 0.0, 0.3], disp);
    let params = PropagatorParams::new(1.3, 1e-6, tf, 3).unwrap();
    let ratio = |p: [f64; 4]| params.regulator(&p) / eval_g0_p(&tf, &p).norm_sqr();
    let r0 = ratio([0.0; 4]);
    for p in [[0.5, 0.1, -0.3, 0.2], [-1.0, 0.4, 0.8, -0.6]] {
        assert!((ratio(p) / r0 - 1.0).abs() < 1e-12);
    }
    let pole_side = feynman_propagator_p(&FourMomentum([2.0, 0.0, 0.0, 0.0]), &params);
    assert!(pole_side.re > 0.0);
}

#[test]
fn running_support_turns_cutoff_into_log() {
    // ∫ extension of 1/(X+1) with running edge X_e is ln(η² X_e)
    let tlr = TlrConfig::default();
    let kernel = RationalKernel::inverse_power(1);
    let cfg = QuadratureConfig::with_tolerances(1e-13, 1e-11);
    for edge in [1e2, 1e4, 1e6] {
        let v = extend_distribution(&kernel, &tlr, RunningSupport::Inverse { edge })
            .unwrap()
            .integrate(None, &cfg)
            .unwrap();
        let expected = (tlr.eta_sq() * edge).ln();
        assert!((v.value - expected).abs() < 1e-8, "{edge}: {} vs {expected}", v.value);
    }
}

#[test]
fn convergent_kernel_survives_extension() {
    let tlr = TlrConfig::default();
    let kernel = RationalKernel::inverse_power(3);
    let cfg = QuadratureConfig::with_tolerances(1e-13, 1e-10);
    let running = extend_distribution(&kernel, &tlr, RunningSupport::Inverse { edge: 1e3 })
        .unwrap()
        .integrate(None, &cfg)
        .unwrap();
    assert!((running.value - 0.5).abs() < 1e-8, "{running:?}");

    // a partition flat on [0, ~990] sees nearly all of ∫ (X+1)^-3 = 1/2
    let f = partition_of_unity(-20.0, 1e3, 10.0).unwrap();
    let amp = amplitude(&kernel, &f, &tlr, RunningSupport::Constant, &cfg).unwrap();
    assert!((amp.direct.value - 0.5).abs() < 1e-5, "{amp:?}");
}

#[test]
fn ward_sum_matches_independent_assembly() {
    // δΓ from the log oracle and Σ' from closed-form a, a', b' must cancel in ln Λ²
    let c = CouplingParams::default();
    let m: f64 = c.mass;
    let tight = QuadratureConfig::with_tolerances(1e-15, 1e-12);
    let pre = c.alpha_over_4pi();
    let sum_at = |lambda: f64| {
        let tlr = TlrConfig {
            lambda,
            ..TlrConfig::default()
        };
        let g = integrate_1d(
            |z: f64| (1.0 - z) * ((tlr.eta_sq() * lambda * lambda / vertex_mass_sq(z, m, c.photon_mass)).ln() - 2.0),
            0.0,
            1.0,
            &tight,
        )
        .unwrap()
        .value
            * c.alpha
            / (2.0 * PI);
        let s = self_energy(m * m, &c, &tlr, &tight).unwrap();
        let mass_sq = |x: f64| x * (1.0 - x) * m * m + x * m * m + (1.0 - x) * c.photon_mass.powi(2);
        let dlog = |x: f64| -x * (1.0 - x) / mass_sq(x);
        let a_prime = -pre
            * integrate_1d(|x: f64| 2.0 * x * dlog(x), 0.0, 1.0, &tight)
                .unwrap()
                .value;
        let b_prime = pre
            * integrate_1d(|x: f64| 4.0 * m * dlog(x), 0.0, 1.0, &tight)
                .unwrap()
                .value;
        g + s.a_coeff + 2.0 * m * m * a_prime + 2.0 * m * b_prime
    };
    let (lo, hi) = (sum_at(1e2), sum_at(1e4));
    assert!((lo - hi).abs() < 1e-9 * pre, "{lo} {hi}");

    let report = ward_takahashi_check(&c, &TlrConfig::default(), &[1e2, 1e4], &QuadratureConfig::default()).unwrap();
    assert!(
        (report.constant_offset - 0.5 * (lo + hi)).abs() < 1e-7 * pre,
        "{report:?}"
    );
    let direct = vertex(
        &c,
        &TlrConfig {
            lambda: 1e2,
            ..TlrConfig::default()
        },
        &QuadratureConfig::default(),
    )
    .unwrap();
    let d = self_energy_derivative(
        &c,
        &TlrConfig {
            lambda: 1e2,
            ..TlrConfig::default()
        },
        &QuadratureConfig::default(),
    )
    .unwrap();
    assert!((direct.value + d.value - lo).abs() < 1e-7 * pre);
}

#[test]
fn errors_carry_context() {
    let c = CouplingParams::default();
    match self_energy(-50.0, &c, &TlrConfig::default(), &QuadratureConfig::default()) {
        Err(Error::NonPositiveMass { x, value }) => assert!(value <= 0.0 && (0.0..=1.0).contains(&x)),
        other => panic!("unexpected {other:?}"),
    }
    assert!(TlrConfig::new(0, 1.0, 1e3).is_err());
    assert!(TadpoleParams::new(-1.0, c).is_err());
}
