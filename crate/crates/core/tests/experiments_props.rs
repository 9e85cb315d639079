use simo_core::bounds::theta_star;
use simo_core::experiments::*;
use simo_core::{NetworkConfig, ReceiverSpec};

fn cfg(alpha: f64, n_r: usize) -> NetworkConfig {
    NetworkConfig {
        alpha,
        n_r,
        ..NetworkConfig::default()
    }
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn doubling_threshold_scales_density_exactly() {
    // Without noise λ_ε(2β) = 2^{-2/α} λ_ε(β) on common realizations.
    for alpha in [3.0, 4.0] {
        let base = cfg(alpha, 4);
        let doubled = NetworkConfig { beta: 2.0 * base.beta, ..base };
        let spec = ReceiverSpec::mmse();
        let a = max_density_value(&base, &spec, Geometry::Poisson, 4000, 9).unwrap();
        let b = max_density_value(&doubled, &spec, Geometry::Poisson, 4000, 9).unwrap();
        let want = 2f64.powf(-2.0 / alpha);
        assert!((b / a - want).abs() < 1e-3 * want, "α={alpha}: {}", b / a);
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let c = NetworkConfig { snr: 10.0, ..cfg(3.0, 4) };
    let spec = ReceiverSpec::pzf(1);
    let run = || {
        (
            estimate_outage(&c, 0.2, &spec, 3000, 4).unwrap(),
            max_density(&c, &spec, 2000, 4).unwrap(),
            simulate_sinr(&c, 0.1, &ReceiverSpec::sample_cov(8), Geometry::Grid, 500, 4).unwrap(),
        )
    };
    assert_eq!(in_pool(1, run), in_pool(3, run));
}

#[test]
fn receivers_rank_as_expected_on_common_realizations() {
    let c = cfg(4.0, 6);
    let trials = 5000;
    let lam = |spec: ReceiverSpec| max_density_value(&c, &spec, Geometry::Poisson, trials, 2).unwrap();
    let mmse = lam(ReceiverSpec::mmse());
    let k = (theta_star(4.0) * 6.0).round() as usize;
    let pzf = lam(ReceiverSpec::pzf(k));
    let mrc = lam(ReceiverSpec::mrc());
    let zf = lam(ReceiverSpec::full_zf());
    assert!(mmse >= pzf && mmse >= mrc && mmse >= zf);
    assert!(pzf > mrc && pzf > zf, "pzf {pzf} mrc {mrc} zf {zf}");
}

#[test]
fn outage_grows_with_density() {
    let c = cfg(4.0, 2);
    let spec = ReceiverSpec::mrc();
    let mut last = -1.0;
    for lambda in [0.01, 0.05, 0.2, 1.0] {
        let p = estimate_outage(&c, lambda, &spec, 3000, 6).unwrap();
        assert!(p.ci_low <= p.p_hat && p.p_hat <= p.ci_high);
        assert!(p.p_hat >= last);
        last = p.p_hat;
    }
}

#[test]
fn bad_inputs_are_errors() {
    let c = cfg(4.0, 3);
    assert!(estimate_outage(&c, 0.1, &ReceiverSpec::pzf(3), 100, 1).is_err());
    assert!(estimate_outage(&c, 0.1, &ReceiverSpec::mmse(), 0, 1).is_err());
    let bad = NetworkConfig { alpha: 2.0, ..c };
    assert!(max_density(&bad, &ReceiverSpec::mmse(), 100, 1).is_err());
}
