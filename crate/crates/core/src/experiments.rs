//! Monte Carlo estimators: outage, maximum density, filter correlation,
//! sample-covariance losses and the Poisson versus grid comparison.
//!
//! Every trial owns its RNG streams, keyed by `(seed, trial, lane)`, so the
//! same trial sees the same field at every density and for every receiver.
//! Densities only rescale distances, which keeps the estimated outage
//! monotone in `λ`.

use std::collections::HashMap;
use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;

use crate::bounds::{mmse_density_ub, var_ub_interference};
use crate::field::{sample_grid_field, sample_ppp_field, FieldRealization, NetworkConfig};
use crate::mathkit::stats::{wilson_interval, Z95};
use crate::mathkit::{gamma_ratio_tail_sum, sample_complex_normal, ComplexVec, StreamFactory};
use crate::receivers::{
    build_filter, build_filter_with_estimate, evaluate_sinr, evaluate_sinr_against, receive,
    ReceiverSpec,
};
use crate::{Error, Result};

const LANE_FIELD: u64 = 0;
const LANE_RECEIVER: u64 = 1;
const LANE_PILOT: u64 = 2;

/// Relative tolerance of the interference truncation.
pub const TRUNCATION_TOL: f64 = 1e-3;

/// Interferer placement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Geometry {
    Poisson,
    Grid,
}

/// Monte Carlo outage probability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutageEstimate {
    pub p_hat: f64,
    pub trials: usize,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

impl OutageEstimate {
    fn from_count(outages: usize, trials: usize, seed: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(outages as u64, trials as u64, Z95);
        Self {
            p_hat: outages as f64 / trials as f64,
            trials,
            ci_low,
            ci_high,
            seed,
        }
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci_high - self.ci_low)
    }
}

/// Maximum density with an interval from the outage confidence band.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityEstimate {
    pub lambda: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: usize,
    pub seed: u64,
}

/// How many interferers to draw explicitly and the mean interference
/// attributed to the rest.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationPlan {
    pub m: usize,
    pub residual: f64,
}

fn std_unit(cfg: &NetworkConfig, m: usize) -> f64 {
    // (π d² λ)^{α/2} = 1
    let unit = 1.0 / (PI * cfg.d * cfg.d);
    var_ub_interference(cfg, unit, m)
        .map(f64::sqrt)
        .unwrap_or(f64::INFINITY)
}

/// Chooses `M` so that the fluctuation of the interference beyond the `M`-th
/// interferer (standard deviation bound) is below `tol` times the
/// interference-plus-noise level. Its mean is kept as `residual`.
pub fn truncation_plan(
    cfg: &NetworkConfig,
    lambda: f64,
    geometry: Geometry,
    tol: f64,
) -> TruncationPlan {
    let a = cfg.half_alpha();
    let c = cfg.interference_scale(lambda);
    let level_unit = gamma_ratio_tail_sum(a, cfg.ceil_half_alpha() + 1).expect("finite mean")
        + if c > 0.0 { cfg.inv_snr() / c } else { f64::INFINITY };
    let target = tol * level_unit;
    let floor = (5 * cfg.n_r).max(cfg.alpha.floor() as usize + 1);
    let cap = crate::field::MAX_TRUNCATION;
    let m = if std_unit(cfg, floor) <= target {
        floor
    } else {
        let (mut lo, mut hi) = (floor, floor * 2);
        while std_unit(cfg, hi) > target && hi < cap {
            lo = hi;
            hi = (hi * 2).min(cap);
        }
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if std_unit(cfg, mid) <= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    let residual = match geometry {
        Geometry::Poisson => c * gamma_ratio_tail_sum(a, m as u64).expect("finite mean"),
        Geometry::Grid => {
            // Continuum beyond the disc that holds m grid points.
            let r2 = m as f64 / (PI * lambda);
            cfg.d.powf(cfg.alpha) * 2.0 * PI * lambda * r2.powf(1.0 - a) / (cfg.alpha - 2.0)
        }
    };
    TruncationPlan { m, residual }
}

fn field_for<R: Rng + ?Sized>(
    cfg: &NetworkConfig,
    lambda: f64,
    geometry: Geometry,
    plan: &TruncationPlan,
    rng: &mut R,
) -> FieldRealization {
    let mut f = match geometry {
        Geometry::Poisson => sample_ppp_field(cfg, lambda, plan.m, rng),
        Geometry::Grid => sample_grid_field(cfg, lambda, plan.m, rng),
    };
    f.residual_interference = plan.residual;
    f
}

fn check_common(cfg: &NetworkConfig, spec: &ReceiverSpec, trials: usize) -> Result<()> {
    cfg.validate()?;
    spec.check(cfg.n_r)?;
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be positive".into()));
    }
    Ok(())
}

/// Per-trial SINR at density `lambda`, in trial order.
pub fn simulate_sinr(
    cfg: &NetworkConfig,
    lambda: f64,
    spec: &ReceiverSpec,
    geometry: Geometry,
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    check_common(cfg, spec, trials)?;
    let plan = truncation_plan(cfg, lambda, geometry, TRUNCATION_TOL);
    let streams = StreamFactory::new(seed);
    (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let field = field_for(cfg, lambda, geometry, &plan, &mut streams.stream(&[t, LANE_FIELD]));
            let mut rng = streams.stream(&[t, LANE_RECEIVER]);
            Ok(receive(spec, &field, cfg, &mut rng)?.sinr)
        })
        .collect()
}

/// Fraction of trials with `SINR ≤ β` on a Poisson field.
pub fn estimate_outage(
    cfg: &NetworkConfig,
    lambda: f64,
    spec: &ReceiverSpec,
    trials: usize,
    seed: u64,
) -> Result<OutageEstimate> {
    estimate_outage_in(cfg, lambda, spec, Geometry::Poisson, trials, seed)
}

pub fn estimate_outage_in(
    cfg: &NetworkConfig,
    lambda: f64,
    spec: &ReceiverSpec,
    geometry: Geometry,
    trials: usize,
    seed: u64,
) -> Result<OutageEstimate> {
    let sinr = simulate_sinr(cfg, lambda, spec, geometry, trials, seed)?;
    let outages = sinr.iter().filter(|s| **s <= cfg.beta).count();
    Ok(OutageEstimate::from_count(outages, trials, seed))
}

/// Outage as a function of density for a fixed set of trials.
enum OutageCurve<'a> {
    /// Noise-free Poisson fields: every trial fails exactly above its own
    /// critical density, so the curve is an empirical CDF.
    Critical(Vec<f64>),
    Simulated {
        cfg: &'a NetworkConfig,
        spec: &'a ReceiverSpec,
        geometry: Geometry,
        trials: usize,
        seed: u64,
        cache: HashMap<u64, f64>,
    },
}

impl OutageCurve<'_> {
    fn outage(&mut self, lambda: f64) -> Result<f64> {
        match self {
            OutageCurve::Critical(sorted) => {
                let n = sorted.partition_point(|c| *c <= lambda);
                Ok(n as f64 / sorted.len() as f64)
            }
            OutageCurve::Simulated {
                cfg,
                spec,
                geometry,
                trials,
                seed,
                cache,
            } => {
                if let Some(v) = cache.get(&lambda.to_bits()) {
                    return Ok(*v);
                }
                let e = estimate_outage_in(cfg, lambda, spec, *geometry, *trials, *seed)?;
                cache.insert(lambda.to_bits(), e.p_hat);
                Ok(e.p_hat)
            }
        }
    }
}

fn outage_curve<'a>(
    cfg: &'a NetworkConfig,
    spec: &'a ReceiverSpec,
    geometry: Geometry,
    trials: usize,
    seed: u64,
) -> Result<OutageCurve<'a>> {
    check_common(cfg, spec, trials)?;
    if geometry == Geometry::Poisson && cfg.snr.is_infinite() {
        // SINR(λ) = SINR(λ_ref) (λ_ref/λ)^{α/2} trial by trial.
        let reference = 1.0 / (PI * cfg.d * cfg.d);
        let sinr = simulate_sinr(cfg, reference, spec, geometry, trials, seed)?;
        let inv_a = 1.0 / cfg.half_alpha();
        let mut crit: Vec<f64> = sinr
            .iter()
            .map(|s| reference * (s / cfg.beta).powf(inv_a))
            .collect();
        crit.sort_by(f64::total_cmp);
        Ok(OutageCurve::Critical(crit))
    } else {
        Ok(OutageCurve::Simulated {
            cfg,
            spec,
            geometry,
            trials,
            seed,
            cache: HashMap::new(),
        })
    }
}

/// Largest `λ` with outage at most `target`: doubling from `start`, then
/// bisection to 1% relative width.
fn bisect_density(curve: &mut OutageCurve<'_>, target: f64, start: f64) -> Result<f64> {
    const MAX_DOUBLINGS: usize = 60;
    let mut lo = 0.0;
    let mut hi = start;
    let mut steps = 0;
    while curve.outage(hi)? <= target {
        lo = hi;
        hi *= 2.0;
        steps += 1;
        if steps >= MAX_DOUBLINGS {
            return Err(Error::BracketFailure(MAX_DOUBLINGS));
        }
    }
    while (hi - lo) / hi > 0.01 {
        let mid = 0.5 * (lo + hi);
        if curve.outage(mid)? <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `λ_ε` for a Poisson field, with common random numbers across densities.
pub fn max_density(
    cfg: &NetworkConfig,
    spec: &ReceiverSpec,
    trials: usize,
    seed: u64,
) -> Result<DensityEstimate> {
    max_density_in(cfg, spec, Geometry::Poisson, trials, seed)
}

pub fn max_density_in(
    cfg: &NetworkConfig,
    spec: &ReceiverSpec,
    geometry: Geometry,
    trials: usize,
    seed: u64,
) -> Result<DensityEstimate> {
    let mut curve = outage_curve(cfg, spec, geometry, trials, seed)?;
    let start = mmse_density_ub(cfg).value;
    let lambda = bisect_density(&mut curve, cfg.epsilon, start)?;
    // Interval: densities where ε sits at the edge of the outage band.
    let half = Z95 * (cfg.epsilon * (1.0 - cfg.epsilon) / trials as f64).sqrt();
    let ci_low = bisect_density(&mut curve, (cfg.epsilon - half).max(0.0), start)?;
    let ci_high = bisect_density(&mut curve, (cfg.epsilon + half).min(1.0), start)?;
    Ok(DensityEstimate {
        lambda,
        ci_low: ci_low.min(lambda),
        ci_high: ci_high.max(lambda),
        trials,
        seed,
    })
}

/// `λ_ε` without the interval (one bisection instead of three).
pub fn max_density_value(
    cfg: &NetworkConfig,
    spec: &ReceiverSpec,
    geometry: Geometry,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    let mut curve = outage_curve(cfg, spec, geometry, trials, seed)?;
    bisect_density(&mut curve, cfg.epsilon, mmse_density_ub(cfg).value)
}

/// Mean squared correlation between `h₀` and the MMSE filter.
pub fn mmse_correlation(cfg: &NetworkConfig, lambda: f64, trials: usize, seed: u64) -> Result<f64> {
    let spec = ReceiverSpec::mmse();
    check_common(cfg, &spec, trials)?;
    let plan = truncation_plan(cfg, lambda, Geometry::Poisson, TRUNCATION_TOL);
    let streams = StreamFactory::new(seed);
    let corr: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let field = field_for(cfg, lambda, Geometry::Poisson, &plan, &mut streams.stream(&[t, LANE_FIELD]));
            let mut rng = streams.stream(&[t, LANE_RECEIVER]);
            Ok(receive(&spec, &field, cfg, &mut rng)?.correlation)
        })
        .collect::<Result<_>>()?;
    Ok(corr.iter().sum::<f64>() / trials as f64)
}

/// Mean SINR of the `K`-snapshot sample-covariance filter over mean SINR of
/// the exact MMSE filter, on common realizations.
pub fn reed_mallett_ratio(
    cfg: &NetworkConfig,
    lambda: f64,
    snapshots: usize,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    let spec = ReceiverSpec::sample_cov(snapshots);
    check_common(cfg, &spec, trials)?;
    let plan = truncation_plan(cfg, lambda, Geometry::Poisson, TRUNCATION_TOL);
    let streams = StreamFactory::new(seed);
    let pairs: Vec<(f64, f64)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let field = field_for(cfg, lambda, Geometry::Poisson, &plan, &mut streams.stream(&[t, LANE_FIELD]));
            let mut rng = streams.stream(&[t, LANE_RECEIVER]);
            let sampled = receive(&spec, &field, cfg, &mut rng)?.sinr;
            let exact = receive(&ReceiverSpec::mmse(), &field, cfg, &mut rng)?.sinr;
            Ok((sampled, exact))
        })
        .collect::<Result<_>>()?;
    let (s, e) = pairs
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    Ok(s / e)
}

/// Expected-SINR loss factor `1 − (n_r − 1)/(K + 1)` of a `K`-snapshot
/// sample covariance.
pub fn reed_mallett_factor(n_r: usize, snapshots: usize) -> f64 {
    1.0 - (n_r as f64 - 1.0) / (snapshots as f64 + 1.0)
}

/// Pilot SNR used for the noisy desired-channel estimate (10 dB).
pub const PILOT_SNR: f64 = 10.0;

/// Desired-channel estimate from two noisy pilots: per-entry complex noise
/// of variance `1/(2 snr_pilot)`.
pub fn noisy_estimate<R: Rng + ?Sized>(h0: &ComplexVec, pilot_snr: f64, rng: &mut R) -> ComplexVec {
    let sd = (1.0 / (2.0 * pilot_snr)).sqrt();
    let entries = h0
        .entries()
        .iter()
        .map(|z| z + sample_complex_normal(rng) * sd)
        .collect();
    ComplexVec::new(entries).expect("finite entries")
}

/// Outage of a sample-covariance filter aligned with a noisy `h₀` estimate.
pub fn estimate_outage_noisy_h0(
    cfg: &NetworkConfig,
    lambda: f64,
    spec: &ReceiverSpec,
    trials: usize,
    seed: u64,
) -> Result<OutageEstimate> {
    check_common(cfg, spec, trials)?;
    let plan = truncation_plan(cfg, lambda, Geometry::Poisson, TRUNCATION_TOL);
    let streams = StreamFactory::new(seed);
    let sinr: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let field = field_for(cfg, lambda, Geometry::Poisson, &plan, &mut streams.stream(&[t, LANE_FIELD]));
            let mut rng = streams.stream(&[t, LANE_RECEIVER]);
            let est = noisy_estimate(&field.h0, PILOT_SNR, &mut streams.stream(&[t, LANE_PILOT]));
            let v = build_filter_with_estimate(spec, &field, &est, cfg, &mut rng)?;
            Ok(evaluate_sinr_against(&v, &field, &field.h0, cfg, 0).sinr)
        })
        .collect::<Result<_>>()?;
    let outages = sinr.iter().filter(|s| **s <= cfg.beta).count();
    Ok(OutageEstimate::from_count(outages, trials, seed))
}

fn bisect_with<F>(cfg: &NetworkConfig, mut outage: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut cache: HashMap<u64, f64> = HashMap::new();
    let mut eval = |l: f64| -> Result<f64> {
        if let Some(v) = cache.get(&l.to_bits()) {
            return Ok(*v);
        }
        let v = outage(l)?;
        cache.insert(l.to_bits(), v);
        Ok(v)
    };
    let mut lo = 0.0;
    let mut hi = mmse_density_ub(cfg).value;
    let mut steps = 0;
    while eval(hi)? <= cfg.epsilon {
        lo = hi;
        hi *= 2.0;
        steps += 1;
        if steps >= 60 {
            return Err(Error::BracketFailure(60));
        }
    }
    while (hi - lo) / hi > 0.01 {
        let mid = 0.5 * (lo + hi);
        if eval(mid)? <= cfg.epsilon {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One point of the density versus snapshot count curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CsiPoint {
    pub snapshots: usize,
    /// Sample-covariance filter, `h₀` known.
    pub lambda: f64,
    /// Sample-covariance filter, `h₀` estimated from two pilots.
    pub lambda_noisy_h0: f64,
    /// `λ_perfect (1 − (n_r − 1)/(K + 1))^{2/α}`
    pub approximation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CsiCurve {
    pub perfect: f64,
    pub points: Vec<CsiPoint>,
}

/// Maximum density with sample-covariance MMSE for each snapshot count.
pub fn csi_density_curve(
    cfg: &NetworkConfig,
    snapshot_counts: &[usize],
    trials: usize,
    seed: u64,
) -> Result<CsiCurve> {
    for &k in snapshot_counts {
        ReceiverSpec::sample_cov(k).check(cfg.n_r)?;
    }
    let perfect = max_density_value(cfg, &ReceiverSpec::mmse(), Geometry::Poisson, trials, seed)?;
    let mut points = Vec::with_capacity(snapshot_counts.len());
    for &k in snapshot_counts {
        let spec = ReceiverSpec::sample_cov(k);
        let lambda = max_density_value(cfg, &spec, Geometry::Poisson, trials, seed)?;
        let lambda_noisy_h0 = bisect_with(cfg, |l| {
            Ok(estimate_outage_noisy_h0(cfg, l, &spec, trials, seed)?.p_hat)
        })?;
        points.push(CsiPoint {
            snapshots: k,
            lambda,
            lambda_noisy_h0,
            approximation: perfect * reed_mallett_factor(cfg.n_r, k).powf(2.0 / cfg.alpha),
        });
    }
    Ok(CsiCurve { perfect, points })
}

/// `(n_r, λ_ε Poisson, λ_ε grid)` with the MMSE receiver.
pub fn geometry_comparison(
    cfgs: &[NetworkConfig],
    trials: usize,
    seed: u64,
) -> Result<Vec<(usize, f64, f64)>> {
    let spec = ReceiverSpec::mmse();
    cfgs.iter()
        .map(|cfg| {
            let p = max_density_value(cfg, &spec, Geometry::Poisson, trials, seed)?;
            let g = max_density_value(cfg, &spec, Geometry::Grid, trials, seed)?;
            Ok((cfg.n_r, p, g))
        })
        .collect()
}

/// Per-trial SINR for several receivers on the same realizations, trial major.
pub fn paired_sinr(
    cfg: &NetworkConfig,
    lambda: f64,
    specs: &[ReceiverSpec],
    trials: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    cfg.validate()?;
    for s in specs {
        s.check(cfg.n_r)?;
    }
    let plan = truncation_plan(cfg, lambda, Geometry::Poisson, TRUNCATION_TOL);
    let streams = StreamFactory::new(seed);
    (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let field = field_for(cfg, lambda, Geometry::Poisson, &plan, &mut streams.stream(&[t, LANE_FIELD]));
            specs
                .iter()
                .map(|spec| {
                    let mut rng = streams.stream(&[t, LANE_RECEIVER]);
                    let v = build_filter(spec, &field, cfg, &mut rng)?;
                    Ok(evaluate_sinr(&v, &field, cfg, spec.cancel_count(cfg.n_r)).sinr)
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(alpha: f64, n_r: usize) -> NetworkConfig {
        NetworkConfig {
            alpha,
            n_r,
            ..Default::default()
        }
    }

    #[test]
    fn truncation_plan_sizes() {
        let p4 = truncation_plan(&cfg(4.0, 4), 0.1, Geometry::Poisson, TRUNCATION_TOL);
        let p3 = truncation_plan(&cfg(3.0, 4), 0.1, Geometry::Poisson, TRUNCATION_TOL);
        assert!(p4.m > 20 && p4.m < 1000, "{}", p4.m);
        assert!(p3.m > p4.m && p3.m < 5000, "{}", p3.m);
        // residual equals the exact tail mean
        let c = cfg(4.0, 4).interference_scale(0.1);
        assert!((p4.residual - c * gamma_ratio_tail_sum(2.0, p4.m as u64).unwrap()).abs() < 1e-15);
        let loose = truncation_plan(&cfg(4.0, 4), 0.1, Geometry::Poisson, 1.0);
        assert_eq!(loose.m, 20);
    }

    #[test]
    fn residual_makes_mean_interference_exact() {
        // MRC with one antenna: E[I_0] diverges, but E[I_3] for full ZF with
        // four antennas is (πλ)^2 · 1/2.
        let c = cfg(4.0, 4);
        let lambda = 1.0 / PI;
        let plan = truncation_plan(&c, lambda, Geometry::Poisson, TRUNCATION_TOL);
        let streams = StreamFactory::new(1);
        let n = 20_000u64;
        let spec = ReceiverSpec::full_zf();
        let total: f64 = (0..n)
            .map(|t| {
                let f = field_for(&c, lambda, Geometry::Poisson, &plan, &mut streams.stream(&[t, 0]));
                let v = build_filter(&spec, &f, &c, &mut streams.stream(&[t, 1])).unwrap();
                evaluate_sinr(&v, &f, &c, 3).interference_power
            })
            .sum();
        let mean = total / n as f64;
        assert!((mean - 0.5).abs() < 0.03, "{mean}");
    }

    #[test]
    fn outage_is_deterministic_and_monotone() {
        let c = cfg(4.0, 2);
        let spec = ReceiverSpec::mmse();
        let a = estimate_outage(&c, 0.05, &spec, 2000, 7).unwrap();
        let b = estimate_outage(&c, 0.05, &spec, 2000, 7).unwrap();
        assert_eq!(a, b);
        let hi = estimate_outage(&c, 0.1, &spec, 2000, 7).unwrap();
        assert!(hi.p_hat >= a.p_hat);
        assert!(a.ci_low <= a.p_hat && a.p_hat <= a.ci_high);
    }

    #[test]
    fn fast_and_simulated_curves_agree() {
        let c = cfg(3.0, 3);
        let spec = ReceiverSpec::pzf(1);
        let mut fast = outage_curve(&c, &spec, Geometry::Poisson, 3000, 5).unwrap();
        for lambda in [0.02, 0.1, 0.3] {
            let sim = estimate_outage(&c, lambda, &spec, 3000, 5).unwrap();
            let f = fast.outage(lambda).unwrap();
            // Only the truncation plan may differ: none here, snr is infinite.
            assert!((f - sim.p_hat).abs() <= 1.0 / 3000.0 + 1e-12, "{lambda}: {f} {}", sim.p_hat);
        }
    }

    #[test]
    fn reed_mallett_factor_values() {
        assert!((reed_mallett_factor(4, 5) - 0.5).abs() < 1e-15);
        assert!((reed_mallett_factor(6, 10) - 6.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn noisy_estimate_variance() {
        let h = ComplexVec::zeros(1);
        let mut rng = StreamFactory::new(2).stream(&[]);
        let n = 100_000;
        let v: f64 = (0..n)
            .map(|_| noisy_estimate(&h, 10.0, &mut rng).norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((v - 0.05).abs() < 0.002);
    }
}
