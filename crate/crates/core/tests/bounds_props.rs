use proptest::prelude::*;
use simo_core::bounds::*;
use simo_core::NetworkConfig;

fn cfg(alpha: f64, n_r: usize) -> NetworkConfig {
    NetworkConfig {
        alpha,
        n_r,
        ..NetworkConfig::default()
    }
}

fn theta_k(alpha: f64, n: usize) -> usize {
    (theta_star(alpha) * n as f64).round() as usize
}

#[test]
fn analytic_sandwich_on_figure_grid() {
    for alpha in [3.0, 4.0] {
        for n in [4usize, 8, 12, 16] {
            let c = cfg(alpha, n);
            let k = theta_k(alpha, n);
            let t2 = mmse_density_ub(&c).value;
            let cheb_ub = mmse_density_ub_chebyshev(&c);
            let cheb_lb = pzf_density_lb_chebyshev(&c, k);
            let markov_lb = pzf_density_lb_markov(&c, k);
            if let Some(u) = cheb_ub.get() {
                assert!(u <= t2 * (1.0 + 1e-9), "α={alpha} n={n}: {u} > {t2}");
            }
            if let (Some(m), Some(ch)) = (markov_lb.get(), cheb_lb.get()) {
                assert!(m <= ch * (1.0 + 1e-9), "α={alpha} n={n}: {m} > {ch}");
            }
            if let Some(ch) = cheb_lb.get() {
                assert!(ch <= t2, "α={alpha} n={n}");
            }
            assert!(mrc_density_ub(&c).value <= t2 || n < 2);
        }
    }
}

#[test]
fn linear_scaling_constant_settles() {
    // λ LB / n_r at θ* approaches a constant; the n_r = 64 value is within
    // a few percent of n_r = 128.
    let per_antenna = |n: usize| pzf_density_lb_markov(&cfg(4.0, n), theta_k(4.0, n)).value / n as f64;
    let (a, b) = (per_antenna(64), per_antenna(128));
    assert!((a / b - 1.0).abs() < 0.05, "{a} vs {b}");
    let ub = |n: usize| mmse_density_ub(&cfg(4.0, n)).value / n as f64;
    assert!((ub(64) / ub(128) - 1.0).abs() < 0.02);
}

#[test]
fn inversion_recovers_known_roots() {
    let c = cfg(4.0, 4);
    // 1 − exp(−sλ) = ε  ⇒  λ = −ln(1 − ε)/s
    for s in [0.3, 5.0, 400.0] {
        let got = density_from_bound(&c, |l| Ok(1.0 - (-s * l).exp())).unwrap();
        let want = -(1.0 - c.epsilon).ln() / s;
        assert!((got - want).abs() <= 1e-5 * want, "s={s}: {got} vs {want}");
    }
    let got = density_from_bound(&c, |l| Ok((l * l).min(1.0))).unwrap();
    assert!((got - c.epsilon.sqrt()).abs() < 1e-5);
}

#[test]
fn invalid_bounds_say_why() {
    let c = cfg(4.0, 12);
    let r = pzf_density_lb_markov(&c, 11);
    assert!(!r.valid && r.value.is_nan() && r.reason.is_some());
    assert!(pzf_density_ub(&c, 3, 1.0).get().is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn outage_bounds_grow_with_density(alpha in 2.5f64..6.0, n in 4usize..20, l1 in 0.001f64..1.0, f in 1.01f64..4.0) {
        let c = cfg(alpha, n);
        let l2 = l1 * f;
        let k = theta_k(alpha, n);
        if let (Some(a), Some(b)) = (pzf_markov(&c, l1, k).get(), pzf_markov(&c, l2, k).get()) {
            prop_assert!(a <= b);
        }
        if let (Some(a), Some(b)) = (pzf_chebyshev(&c, l1, k).get(), pzf_chebyshev(&c, l2, k).get()) {
            prop_assert!(a <= b + 1e-12);
        }
        let (a, b) = (mmse_markov(&c, l1).value, mmse_markov(&c, l2).value);
        prop_assert!(a <= b);
    }

    #[test]
    fn density_bounds_grow_with_antennas(alpha in 2.5f64..6.0, n in 2usize..40) {
        let (small, big) = (cfg(alpha, n), cfg(alpha, n + 1));
        prop_assert!(mmse_density_ub(&small).value < mmse_density_ub(&big).value);
        prop_assert!(mrc_density_ub(&small).value < mrc_density_ub(&big).value);
        prop_assert!(full_zf_density_ub(&small).value < full_zf_density_ub(&big).value);
        let k = theta_k(alpha, n);
        if let (Some(a), Some(b)) = (pzf_density_lb_markov(&small, k).get(), pzf_density_lb_markov(&big, k).get()) {
            prop_assert!(a < b);
        }
    }

    #[test]
    fn interference_mean_drops_with_cancellation(alpha in 2.2f64..6.0, lambda in 0.001f64..2.0, k in 3usize..200) {
        let c = cfg(alpha, 1);
        let a = expected_interference(&c, lambda, k).unwrap();
        let b = expected_interference(&c, lambda, k + 1).unwrap();
        prop_assert!(b.exact < a.exact);
        if let Some(u) = a.upper {
            prop_assert!(a.exact <= u * (1.0 + 1e-12));
        }
    }
}
