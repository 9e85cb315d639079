use proptest::prelude::*;
use simo_core::field::sample_ppp_field;
use simo_core::mathkit::stats::ks_test;
use simo_core::mathkit::{gamma_cdf, StreamFactory};
use simo_core::receivers::{build_filter, evaluate_sinr, receive};
use simo_core::{NetworkConfig, ReceiverSpec};

fn cfg(n_r: usize, alpha: f64, snr: f64) -> NetworkConfig {
    NetworkConfig {
        n_r,
        alpha,
        snr,
        ..NetworkConfig::default()
    }
}

#[test]
fn pzf_signal_and_leakage_laws() {
    // n_r = 6, k = 3: signal power is gamma(3), the first uncancelled
    // coefficient is unit exponential and the two are independent.
    let c = cfg(6, 4.0, f64::INFINITY);
    let spec = ReceiverSpec::pzf(3);
    let streams = StreamFactory::new(12);
    let n = 20_000;
    let (mut s, mut h4) = (Vec::with_capacity(n), Vec::with_capacity(n));
    let mut worst_leak: f64 = 0.0;
    for t in 0..n as u64 {
        let mut rng = streams.stream(&[t]);
        let f = sample_ppp_field(&c, 0.1, 8, &mut rng);
        let v = build_filter(&spec, &f, &c, &mut rng).unwrap();
        s.push(v.inner(&f.h0).norm_sqr());
        h4.push(v.inner(&f.channels[3]).norm_sqr());
        for h in &f.channels[..3] {
            worst_leak = worst_leak.max(v.inner(h).norm_sqr());
        }
    }
    assert!(worst_leak <= 1e-20, "{worst_leak:e}");
    assert!(ks_test(&s, |x| gamma_cdf(3.0, x)).p_value > 0.01);
    assert!(ks_test(&h4, |x| 1.0 - (-x).exp()).p_value > 0.01);
    let r = simo_core::mathkit::stats::pearson(&s, &h4);
    assert!(r.abs() < 0.03, "corr {r}");
}

#[test]
fn full_zf_has_one_degree_of_signal() {
    let c = cfg(4, 3.0, f64::INFINITY);
    let streams = StreamFactory::new(5);
    let s: Vec<f64> = (0..20_000u64)
        .map(|t| {
            let mut rng = streams.stream(&[t]);
            let f = sample_ppp_field(&c, 0.2, 6, &mut rng);
            receive(&ReceiverSpec::full_zf(), &f, &c, &mut rng).unwrap().signal_power
        })
        .collect();
    assert!(ks_test(&s, |x| gamma_cdf(1.0, x)).p_value > 0.01);
}

#[test]
fn too_many_cancelled_is_rejected() {
    let c = cfg(3, 4.0, f64::INFINITY);
    let mut rng = StreamFactory::new(1).stream(&[]);
    let f = sample_ppp_field(&c, 0.1, 5, &mut rng);
    assert!(build_filter(&ReceiverSpec::pzf(3), &f, &c, &mut rng).is_err());
    assert!(build_filter(&ReceiverSpec::sample_cov(2), &f, &c, &mut rng).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mmse_beats_every_pzf(n_r in 1usize..9, lambda in 0.01f64..1.0, alpha in 2.2f64..6.0,
                            snr_db in prop_oneof![Just(f64::INFINITY), -10.0f64..30.0],
                            seed in any::<u64>()) {
        let snr = if snr_db.is_finite() { 10f64.powf(snr_db / 10.0) } else { snr_db };
        let c = cfg(n_r, alpha, snr);
        let mut rng = StreamFactory::new(seed).stream(&[]);
        let f = sample_ppp_field(&c, lambda, 30, &mut rng);
        let best = receive(&ReceiverSpec::mmse(), &f, &c, &mut rng).unwrap().sinr;
        for k in 0..n_r {
            let spec = ReceiverSpec::pzf(k);
            let v = build_filter(&spec, &f, &c, &mut rng).unwrap();
            // Evaluated without skipping, PZF leakage is counted honestly.
            let pzf = evaluate_sinr(&v, &f, &c, 0).sinr;
            prop_assert!(best >= pzf * (1.0 - 1e-9) - 1e-9, "k={} mmse={} pzf={}", k, best, pzf);
        }
    }

    #[test]
    fn sinr_is_scale_free_in_filter(n_r in 1usize..7, seed in any::<u64>()) {
        let c = cfg(n_r, 4.0, 10.0);
        let mut rng = StreamFactory::new(seed).stream(&[]);
        let f = sample_ppp_field(&c, 0.3, 20, &mut rng);
        let v = build_filter(&ReceiverSpec::mmse(), &f, &c, &mut rng).unwrap();
        prop_assert!((v.norm() - 1.0).abs() < 1e-12);
        let s = evaluate_sinr(&v, &f, &c, 0);
        prop_assert!(s.correlation <= 1.0 + 1e-12 && s.correlation >= 0.0);
    }
}
