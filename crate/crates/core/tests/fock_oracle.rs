use approx::assert_relative_eq;
use num_complex::Complex;

use teleamp_core::fock::{
    amplifier_gn, apply_ladder, coherent_amplitudes, coherent_state, metrics_fock,
    photon_addition_teleport_demo, prepare_resource_fock, teleport_fock, tmsv_state,
    windowed_teleport_fock, LadderKind,
};
use teleamp_core::gaussian::{tmsv_covariance, RealPhaseVector};
use teleamp_core::pure::{gn_model, ideal_metrics, ptele_window, resource_engineering};
use teleamp_core::quadrature::PolarGrid;
use teleamp_core::{Detector, FidelityTarget, FockMix, FockVec};

type C = Complex<f64>;

fn c(re: f64, im: f64) -> C {
    Complex::new(re, im)
}

/// Two-mode state Σ c_n |n, n⟩.
fn diagonal_resource(coeffs: &[f64]) -> FockMix<f64> {
    let d = coeffs.len();
    let mut amps = vec![c(0.0, 0.0); d * d];
    for (n, &x) in coeffs.iter().enumerate() {
        amps[n * d + n] = c(x, 0.0);
    }
    FockMix::pure(FockVec::new(2, d, amps).unwrap().normalized().unwrap().1).unwrap()
}

fn log_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

const T: f64 = 0.95;
// (λ, μ) with λ_eff = 0.5 and g_eff = 1.5, 2 at T = 0.95.
const ENGINEERED: [(f64, f64, f64); 2] = [
    (0.5270078313273802, -0.013148795220224033, 1.5),
    (0.5272550404671678, -0.017845768876186347, 2.0),
];

#[test]
fn engineered_resource_reproduces_pure_model() {
    for (lambda, mu, g_eff) in ENGINEERED {
        let pure = resource_engineering(lambda, mu, T).unwrap();
        assert_relative_eq!(pure.lambda_eff, 0.5, epsilon = 1e-12);
        assert_relative_eq!(pure.g_eff, g_eff, epsilon = 1e-12);

        let d = 30;
        let res = prepare_resource_fock(lambda, mu, T, d, Detector::Pnr).unwrap();
        assert_relative_eq!(res.p_ab, pure.p_s, max_relative = 1e-8);
        let schmidt = res.diagonal().unwrap();
        // The top level misses the feed from |d, d⟩ of the truncated input.
        for (n, &s) in schmidt.iter().enumerate().take(d - 1) {
            assert!((s - pure.coefficient(n)).abs() < 1e-8, "n = {n}");
        }

        for a in [1e-6, 0.25, 0.5, 1.0] {
            let alpha = c(a, 0.0);
            let out = teleport_fock(&res.state, alpha, c(0.0, 0.0), 0.0).unwrap();
            let f = metrics_fock(&out.state, alpha, FidelityTarget::MeasuredGain).unwrap();
            let p = ideal_metrics(pure.lambda_eff, pure.g, alpha, FidelityTarget::MeasuredGain);
            assert!((f.gain - p.gain).abs() < 1e-6, "gain at {a}: {} vs {}", f.gain, p.gain);
            assert!((f.fidelity - p.fidelity).abs() < 1e-6);
            assert!((f.v_x - p.v_x).abs() < 1e-6 && (f.v_p - p.v_p).abs() < 1e-6);
        }
    }
}

#[test]
fn coherent_state_matches_series() {
    let a = 1.2f64;
    let v = coherent_state(c(a, 0.0), 40).unwrap();
    for (n, amp) in v.amplitudes().iter().enumerate() {
        let expected = (-a * a / 2.0 + n as f64 * a.ln() - 0.5 * log_factorial(n)).exp();
        assert!((amp.re - expected).abs() < 1e-14 && amp.im.abs() < 1e-15);
    }
    assert!((v.norm_sqr() - 1.0).abs() < 1e-14);
}

#[test]
fn tmsv_is_normalised() {
    for lambda in [0.1f64, 0.5, 0.7] {
        let d = 60;
        let v = tmsv_state(lambda, d).unwrap();
        assert!((v.norm_sqr() - 1.0).abs() < 1e-15);
    }
}

#[test]
fn tmsv_husimi_matches_gaussian() {
    let lambda = 0.5;
    let v = tmsv_state(lambda, 40).unwrap();
    let ex = tmsv_covariance(lambda).unwrap().q_exponent().unwrap();
    let mut seed = 7u32;
    let mut next = move || {
        seed = seed.wrapping_mul(1_103_515_245).wrapping_add(12_345);
        (seed >> 8) as f64 / (1u32 << 24) as f64 - 0.5
    };
    for _ in 0..10 {
        let (za, zb) = (c(2.0 * next(), 2.0 * next()), c(2.0 * next(), 2.0 * next()));
        let r = RealPhaseVector::from_complex(&[za, zb]).0;
        let gauss = ex.density(&r, &nalgebra::DVector::zeros(4)).unwrap();
        let fock = v.q_function(&[za, zb]).unwrap();
        assert!((gauss - fock).abs() < 1e-8, "{gauss} vs {fock}");
    }
}

#[test]
fn on_off_resource_close_to_resolving_for_weak_tap() {
    let (lambda, mu, t) = (0.5f64, -0.002f64, 0.995f64);
    let pnr = prepare_resource_fock(lambda, mu, t, 28, Detector::Pnr).unwrap();
    let onoff = prepare_resource_fock(lambda, mu, t, 28, Detector::OnOff).unwrap();
    let target = &pnr.state.members()[0].1;
    // Multi-click branches carry ~0.5 % of the heralded weight here.
    let f = onoff.state.fidelity_with(target).unwrap();
    assert_relative_eq!(f, 0.9953698831485, epsilon = 1e-8);
    assert_relative_eq!(onoff.p_ab, 4.5742753995208e-6, max_relative = 1e-7);
    assert!(onoff.p_ab > pnr.p_ab);
    assert!((onoff.clicks.total() - 1.0).abs() < 1e-8);
}

#[test]
fn output_converges_with_cutoff() {
    let (lambda, mu, _) = ENGINEERED[1];
    let alpha = c(0.8, 0.0);
    let run = |d: usize| {
        let r = prepare_resource_fock(lambda, mu, T, d, Detector::OnOff).unwrap();
        let out = teleport_fock(&r.state, alpha, c(0.0, 0.0), 0.0).unwrap();
        metrics_fock(&out.state, alpha, FidelityTarget::MeasuredGain).unwrap()
    };
    let (a, b) = (run(29), run(34));
    assert!((a.gain - b.gain).abs() < 1e-6);
    assert!((a.fidelity - b.fidelity).abs() < 1e-6);
    assert!((a.v_x - b.v_x).abs() < 1e-6);
}

#[test]
fn truncated_amplifier_golden() {
    let input = coherent_state(c(0.2, 0.0), 30).unwrap();
    let out = amplifier_gn(&input, 0, 1.5, 3).unwrap();
    assert_relative_eq!(out.norm_sqr(), 0.092292529916674, max_relative = 1e-12);
    let target = coherent_state(c(0.3, 0.0), 30).unwrap();
    let f = out.normalized().unwrap().1.fidelity(&target).unwrap();
    assert_relative_eq!(f, 0.9999997081736807, epsilon = 1e-12);
}

#[test]
fn truncated_resource_teleports_faithfully_below_threshold() {
    let m = gn_model(0.5, 3.0, 8).unwrap();
    let res = diagonal_resource(&m.coefficients(45));
    for frac in [0.1, 0.3, 0.5] {
        let alpha = c(frac * m.alpha_th, 0.0);
        let out = teleport_fock(&res, alpha, c(0.0, 0.0), 0.0).unwrap();
        let f = metrics_fock(&out.state, alpha, FidelityTarget::Fixed(1.5)).unwrap();
        assert!(f.fidelity > 1.0 - 1e-6, "alpha = {}: {}", alpha.re, f.fidelity);
    }
}

#[test]
fn narrow_window_reduces_to_beta_zero() {
    let (lambda, mu, _) = ENGINEERED[0];
    let res = prepare_resource_fock(lambda, mu, T, 29, Detector::OnOff).unwrap();
    let alpha = c(0.5, 0.0);
    let at0 = teleport_fock(&res.state, alpha, c(0.0, 0.0), 1.0).unwrap();
    let sigma = 1e-3;
    let w = windowed_teleport_fock(&res.state, alpha, sigma, 1.0, &PolarGrid::for_window(sigma)).unwrap();
    let pi_s2 = std::f64::consts::PI * sigma * sigma;
    assert_relative_eq!(w.p_tele / pi_s2, at0.density, max_relative = 1e-4);
    let a = metrics_fock(&at0.state, alpha, FidelityTarget::MeasuredGain).unwrap();
    let b = metrics_fock(&w.state, alpha, FidelityTarget::MeasuredGain).unwrap();
    assert!((a.fidelity - b.fidelity).abs() < 1e-5);
    assert!((a.gain - b.gain).abs() < 1e-5);

    let zero = windowed_teleport_fock(&res.state, alpha, 0.0, 1.0, &PolarGrid::for_window(0.0)).unwrap();
    assert_relative_eq!(zero.p_tele, at0.density, max_relative = 1e-12);
}

#[test]
fn tmsv_with_matched_correction_outputs_coherent_state() {
    let lambda = 0.5;
    let res = FockMix::pure(tmsv_state(lambda, 40).unwrap()).unwrap();
    let alpha = c(0.6, 0.2);
    for sigma in [0.2, 0.5] {
        let w = windowed_teleport_fock(&res, alpha, sigma, lambda, &PolarGrid::for_window(sigma)).unwrap();
        let m = metrics_fock(&w.state, alpha, FidelityTarget::Fixed(lambda)).unwrap();
        assert!((m.fidelity - 1.0).abs() < 1e-8);
        let (a, b) = (1.0 / (sigma * sigma), 1.0 - lambda * lambda);
        let closed = b / (a + b) * (-a * b / (a + b) * alpha.norm_sqr()).exp();
        assert_relative_eq!(w.p_tele, closed, max_relative = 1e-8);
    }
}

#[test]
fn truncated_resource_window_probability_matches_closed_form() {
    let points = [
        (0.5, 3.0, 8, 0.08, 0.3),
        (0.5, 2.0, 6, 0.05, 0.2),
        (0.4, 3.0, 10, 0.1, 0.0),
        (0.5, 1.8, 5, 0.2, 0.3),
        (0.5, 3.0, 8, 0.02, 0.5),
    ];
    for (lambda, g, n, s2, a) in points {
        let sigma = f64::sqrt(s2);
        let m = gn_model(lambda, g, n).unwrap();
        let res = diagonal_resource(&m.coefficients(50));
        let w = windowed_teleport_fock(&res, c(a, 0.0), sigma, 1.0, &PolarGrid::for_window(sigma)).unwrap();
        let closed = ptele_window(lambda, g, n, sigma, a).unwrap();
        assert!(closed.valid());
        assert!(
            ((w.p_tele - closed.p_tele) / closed.p_tele).abs() < 1e-4,
            "λ={lambda} g={g} N={n}: {} vs {}",
            w.p_tele,
            closed.p_tele
        );
    }
}

#[test]
fn outcome_density_integrates_to_one() {
    let res = FockMix::pure(tmsv_state(0.5, 44).unwrap()).unwrap();
    let grid = PolarGrid {
        radius: 7.0,
        n_radial: 90,
        n_angular: 48,
    };
    let alpha = c(0.4, -0.1);
    let total: f64 = grid
        .points()
        .iter()
        .map(|&(x, y, w)| w * teleport_fock(&res, alpha, c(x, y), 0.0).unwrap().density)
        .sum();
    assert_relative_eq!(total, 1.0, epsilon = 1e-8);
}

#[test]
fn coherent_projectors_resolve_identity() {
    let d = 12;
    let grid = PolarGrid {
        radius: 9.0,
        n_radial: 80,
        n_angular: 64,
    };
    let mut diag = vec![0.0; d];
    for (x, y, w) in grid.points() {
        let amps = coherent_amplitudes(c(x, y), d);
        for (acc, a) in diag.iter_mut().zip(&amps) {
            *acc += w * a.norm_sqr() / std::f64::consts::PI;
        }
    }
    for v in diag {
        assert!((v - 1.0).abs() < 1e-9);
    }
}

fn added_photon(lambda: f64, input: &FockVec<f64>) -> FockVec<f64> {
    let amps: Vec<C> = input
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(n, a)| a * lambda.powi(n as i32))
        .collect();
    let shrunk = FockVec::new(1, input.dim(), amps).unwrap();
    apply_ladder(&shrunk, 0, LadderKind::Create).unwrap().normalized().unwrap().1
}

#[test]
fn subtracted_resource_adds_a_photon() {
    let d = 40;
    for input in [FockVec::basis(d, &[0]).unwrap(), coherent_state(c(0.5, 0.0), d).unwrap()] {
        let out = photon_addition_teleport_demo(0.5, &input, d).unwrap();
        assert!(out.fidelity(&added_photon(0.5, &input)).unwrap() > 1.0 - 1e-8);
    }
    // Near-perfect squeezing approaches bare photon addition.
    let input = coherent_state(c(0.5, 0.0), d).unwrap();
    let out = photon_addition_teleport_demo(0.99, &input, 1850).unwrap();
    let ideal = added_photon(1.0, &input).resized(1850);
    assert!(out.fidelity(&ideal).unwrap() > 0.99);
}
