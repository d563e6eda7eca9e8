use approx::assert_relative_eq;
use num_complex::Complex;

use teleamp_core::fock::prepare_resource_fock;
use teleamp_core::phase_space::{
    metrics_q, phase_space_metrics, resource_q, teleamp_beta0, teleamp_windowed,
};
use teleamp_core::{AmplifierParams, Detector, FidelityTarget, Metrics, RealPhaseVector};

type P = AmplifierParams<f64>;

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

fn noisy(mu: f64, t: f64) -> P {
    AmplifierParams::new(0.5, mu, t).with_efficiencies(0.9, 0.9, 0.85)
}

fn beta0(p: &P, a: Complex<f64>) -> Metrics<f64> {
    let res = resource_q(p).unwrap();
    metrics_q(&teleamp_beta0(&res, a).unwrap(), a, FidelityTarget::MeasuredGain).unwrap()
}

fn windowed(p: &P, a: f64) -> Metrics<f64> {
    let res = resource_q(p).unwrap();
    phase_space_metrics(p, &res, c(a, 0.0), FidelityTarget::MeasuredGain).unwrap()
}

#[test]
fn calibrated_gains() {
    assert_relative_eq!(beta0(&noisy(-0.015, 0.95), c(0.0, 0.0)).gain, 1.497472, epsilon = 1e-6);
    assert_relative_eq!(beta0(&noisy(-0.0197, 0.95), c(0.0, 0.0)).gain, 1.999095, epsilon = 1e-6);
}

#[test]
fn noisy_fidelity_grows_with_amplitude() {
    for mu in [-0.015, -0.0197] {
        let p = noisy(mu, 0.95);
        let ms: Vec<Metrics<f64>> = (1..=10).map(|i| beta0(&p, c(0.1 * i as f64, 0.0))).collect();
        for w in ms.windows(2) {
            assert!(w[1].fidelity > w[0].fidelity);
            assert!(w[1].uncertainty_product() < w[0].uncertainty_product());
        }
    }
    let p = noisy(-0.015, 0.95);
    let (lo, hi) = (beta0(&p, c(0.0, 0.0)), beta0(&p, c(1.0, 0.0)));
    assert_relative_eq!(lo.fidelity, 0.7753, epsilon = 1e-4);
    assert_relative_eq!(hi.fidelity, 0.8825, epsilon = 1e-4);
    assert_relative_eq!(lo.uncertainty_product(), 0.551, epsilon = 1e-3);
    assert_relative_eq!(hi.uncertainty_product(), 0.420, epsilon = 1e-3);
}

#[test]
fn window_anchors() {
    let p = noisy(-0.0179, 0.95).with_window(0.08f64.sqrt(), 1.0);
    let m0 = windowed(&p, 0.0);
    assert_relative_eq!(m0.p_ab.unwrap(), 3.1237e-4, max_relative = 1e-4);
    assert_relative_eq!(m0.p_tele.unwrap(), 0.0124, epsilon = 1e-4);
    assert_relative_eq!(windowed(&p, 1.0).p_tele.unwrap(), 0.0200, epsilon = 1e-4);
    for (a, f) in [(0.0, 0.722), (0.2, 0.750), (0.5, 0.813), (1.0, 0.843)] {
        assert_relative_eq!(windowed(&p, a).fidelity, f, epsilon = 1e-3);
    }
    for a in [0.0, 0.1, 0.3, 0.5] {
        let m = windowed(&p, a);
        assert!((0.002..=0.05).contains(&m.p_tele.unwrap()));
        assert_relative_eq!(m.p_tot.unwrap(), m.p_ab.unwrap() * m.p_tele.unwrap(), max_relative = 1e-12);
    }
}

#[test]
fn corrective_displacement_helps() {
    let with_k = noisy(-0.0179, 0.95).with_window(0.08f64.sqrt(), 1.0);
    // Without correction the tap and μ are re-tuned to the same gain and P_tot.
    let without = noisy(-0.01475, 0.955).with_window(0.08f64.sqrt(), 0.0);
    let (a, b) = (windowed(&with_k, 1e-4), windowed(&without, 1e-4));
    assert!((a.gain - b.gain).abs() < 0.02);
    assert!((a.p_tot.unwrap() / b.p_tot.unwrap() - 1.0).abs() < 0.1);
    for i in 2..=10 {
        let alpha = 0.1 * i as f64;
        let (a, b) = (windowed(&with_k, alpha), windowed(&without, alpha));
        assert!(a.fidelity > b.fidelity, "alpha = {alpha}");
        if alpha < 0.75 {
            assert!(a.uncertainty_product() < b.uncertainty_product());
        }
    }
    // At matched gain the uncorrected product crosses below near α = 1.
    let (a, b) = (windowed(&with_k, 1.0), windowed(&without, 1.0));
    assert!(a.uncertainty_product() > b.uncertainty_product());
}

#[test]
fn corrective_displacement_at_fixed_resource() {
    let with_k = noisy(-0.0179, 0.95).with_window(0.08f64.sqrt(), 1.0);
    let without = noisy(-0.0179, 0.95).with_window(0.08f64.sqrt(), 0.0);
    for i in 0..=10 {
        let alpha = 0.1 * i as f64;
        let (a, b) = (windowed(&with_k, alpha), windowed(&without, alpha));
        assert_relative_eq!(a.p_tot.unwrap(), b.p_tot.unwrap(), max_relative = 1e-12);
        assert!(a.fidelity > b.fidelity);
        assert!(a.uncertainty_product() < b.uncertainty_product());
    }
}

#[test]
fn narrow_window_is_continuous() {
    let p = noisy(-0.015, 0.95);
    let narrow = p.with_window(1e-3, 1.0);
    for a in [0.0, 0.5, 1.0] {
        let (x, y) = (beta0(&p, c(a, 0.0)), windowed(&narrow, a));
        assert!((x.gain - y.gain).abs() < 1e-4);
        assert!((x.fidelity - y.fidelity).abs() < 1e-4);
        assert!((x.v_x - y.v_x).abs() < 1e-4 && (x.v_p - y.v_p).abs() < 1e-4);
    }
}

#[test]
fn phase_rotation_covariance() {
    let p = noisy(-0.0179, 0.95);
    let res = resource_q(&p).unwrap();
    let (r, phi) = (0.7, 1.234);
    let a = c(r, 0.0);
    let b = Complex::from_polar(r, phi);
    for (sa, sb) in [
        (teleamp_beta0(&res, a).unwrap(), teleamp_beta0(&res, b).unwrap()),
        (
            teleamp_windowed(&res, a, 0.3, 1.0).unwrap().state,
            teleamp_windowed(&res, b, 0.3, 1.0).unwrap().state,
        ),
    ] {
        assert_relative_eq!(sa.total(), sb.total(), max_relative = 1e-10);
        let (ma, mb) = (sa.mean().unwrap(), sb.mean().unwrap());
        let rotated = Complex::new(ma[0], ma[1]) * Complex::from_polar(1.0, phi);
        assert!((rotated.re - mb[0]).abs() < 1e-10 && (rotated.im - mb[1]).abs() < 1e-10);
        let fa = metrics_q(&sa, a, FidelityTarget::MeasuredGain).unwrap();
        let fb = metrics_q(&sb, b, FidelityTarget::MeasuredGain).unwrap();
        assert!((fa.fidelity - fb.fidelity).abs() < 1e-10);
        assert!((fa.v_x + fa.v_p - fb.v_x - fb.v_p).abs() < 1e-10);
    }
}

#[test]
fn mixtures_are_normalised_and_nonnegative() {
    let p = noisy(-0.0179, 0.95);
    let res = resource_q(&p).unwrap();
    assert_relative_eq!(res.mix.quadrature_norm(6.0, 24).unwrap(), 1.0, epsilon = 1e-6);
    assert!(res.mix.probe_min().unwrap() >= -1e-10);
    let a = c(0.6, 0.2);
    for out in [
        teleamp_beta0(&res, a).unwrap(),
        teleamp_windowed(&res, a, 0.08f64.sqrt(), 1.0).unwrap().state,
    ] {
        assert_relative_eq!(out.quadrature_norm(10.0, 120).unwrap(), 1.0, epsilon = 1e-6);
        assert!(out.probe_min().unwrap() >= -1e-10);
    }
}

#[test]
fn heralding_rate_grows_with_detector_efficiency() {
    let mut last = 0.0;
    for i in 1..=10 {
        let p = AmplifierParams::new(0.5, -0.0179, 0.95).with_efficiencies(0.9, 0.9, 0.1 * i as f64);
        let now = resource_q(&p).unwrap().p_ab;
        assert!(now > last);
        last = now;
    }
}

#[test]
fn resource_matches_fock_oracle() {
    let (lambda, mu, t) = (0.5, -0.002, 0.995);
    let gauss = resource_q(&AmplifierParams::new(lambda, mu, t)).unwrap();
    let fock = prepare_resource_fock(lambda, mu, t, 28, Detector::OnOff).unwrap();
    assert_relative_eq!(gauss.p_ab, fock.p_ab, max_relative = 1e-8);
    let pts = [(0.0, 0.0, 0.0, 0.0), (0.3, -0.2, 0.4, 0.1), (1.0, 0.5, -0.8, 0.6), (-0.7, 1.2, 0.9, 0.9)];
    for (ax, ay, bx, by) in pts {
        let za = c(ax, ay);
        let zb = c(bx, by);
        let r = RealPhaseVector::from_complex(&[za, zb]).0;
        let qg = gauss.mix.q(&r).unwrap();
        let qf: f64 = fock
            .state
            .members()
            .iter()
            .map(|(w, s)| w * s.q_function(&[za, zb]).unwrap())
            .sum::<f64>()
            / fock.state.total_weight();
        assert!((qg - qf).abs() < 1e-6 * qg.max(1e-3), "{qg} vs {qf}");
    }
}

#[test]
fn small_amplitude_gain_matches_linear_limit() {
    for mu in [-0.015, -0.0197, 0.0] {
        let p = noisy(mu, 0.95);
        assert!((beta0(&p, c(1e-4, 0.0)).gain - beta0(&p, c(0.0, 0.0)).gain).abs() < 1e-6);
    }
}

#[test]
fn single_precision_smoke() {
    let p = AmplifierParams::<f32>::new(0.5, -0.015, 0.95).with_efficiencies(0.9, 0.9, 0.85);
    let res = resource_q(&p).unwrap();
    let m = metrics_q(&teleamp_beta0(&res, Complex::new(0.5f32, 0.0)).unwrap(), Complex::new(0.5, 0.0), FidelityTarget::MeasuredGain).unwrap();
    assert!((m.fidelity - 0.81).abs() < 0.05);
}
