use teleamp_harness::config::RunConfig;
use teleamp_harness::figures::FigureSpec;
use teleamp_harness::solve::{probe_gain, solve_mu};
use teleamp_harness::sweep::run_sweep;
use teleamp_harness::validate::ENGINEERED;

const NOISY: &str = "[model]\nkind = \"phase\"\n[params]\nlambda = 0.5\ntransmittance = 0.95\n\
                     eta_ab = 0.9\neta_cd = 0.9\neta_apd = 0.85\n";

#[test]
fn solve_mu_recovers_a_known_mu() {
    let mut cfg = RunConfig::from_toml(NOISY).unwrap();
    cfg.solve.mu_hi = 0.01;
    let target = probe_gain(&cfg, 0.0).unwrap();
    let s = solve_mu(&cfg, target).unwrap();
    assert!(s.mu.abs() < 1e-6, "{s:?}");
    assert!((probe_gain(&cfg, s.mu).unwrap() - target).abs() < 1e-5);
}

#[test]
fn calibrated_mu_for_both_gains() {
    let cfg = RunConfig::from_toml(NOISY).unwrap();
    for (target, mu) in [(1.5, -0.0150), (2.0, -0.0197)] {
        let s = solve_mu(&cfg, target).unwrap();
        assert!((s.mu - mu).abs() < 5e-4, "{s:?}");
        assert!((s.gain - target).abs() < 1e-6);
    }
}

#[test]
fn nominal_pure_model_has_no_mu() {
    let cfg = RunConfig::from_toml("[model]\nkind = \"pure\"\n[params]\nlambda = 0.5\n").unwrap();
    assert!(solve_mu(&cfg, 1.5).is_err());
}

#[test]
fn fock_and_engineered_pure_sweeps_agree() {
    let (lambda, mu) = ENGINEERED[0];
    let body = format!(
        "[params]\nlambda = {lambda}\nmu = {mu}\ntransmittance = 0.95\n\
         [sweep]\nalpha_start = 0.0\nalpha_stop = 0.6\ncount = 7\n"
    );
    let fock = RunConfig::from_toml(&format!(
        "[model]\nkind = \"fock\"\ndetector = \"pnr\"\nfock_dim = 30\n{body}"
    ))
    .unwrap();
    let pure = RunConfig::from_toml(&format!("[model]\nkind = \"pure\"\nresource = \"engineered\"\n{body}")).unwrap();
    let (a, b) = (run_sweep(&fock).unwrap(), run_sweep(&pure).unwrap());
    for (x, y) in a.iter().zip(&b) {
        let (x, y) = (x.metrics().unwrap(), y.metrics().unwrap());
        for (u, v) in [(x.gain, y.gain), (x.fidelity, y.fidelity), (x.v_x, y.v_x), (x.v_p, y.v_p)] {
            assert!((u - v).abs() < 1e-6, "{u} vs {v}");
        }
    }
}

#[test]
fn sweep_keeps_grid_order() {
    let cfg = RunConfig::from_toml(&format!(
        "{NOISY}mu = -0.015\n[sweep]\nalpha_start = 0.0\nalpha_stop = 1.0\ncount = 11\n"
    ))
    .unwrap();
    let rows = run_sweep(&cfg).unwrap();
    assert!(rows.windows(2).all(|w| w[0].alpha < w[1].alpha));
    assert!(rows.iter().all(|r| r.outcome.is_ok()));
}

#[test]
fn figure_five_starts_at_the_calibrated_gains() {
    let spec = FigureSpec::builtin(5).unwrap();
    for ((_, cfg), g) in spec.series.iter().zip([1.5, 2.0]) {
        let gain0 = run_sweep(cfg).unwrap()[0].metrics().unwrap().gain;
        assert!((gain0 - g).abs() < 5e-3, "{gain0}");
    }
}
