//! Linear receive filters and the SINR they achieve on a field realization.

use std::fmt;

use rand::Rng;

use crate::field::{FieldRealization, NetworkConfig};
use crate::mathkit::{
    hermitian_solve, nullspace_project, sample_complex_normal, Complex64, ComplexVec, HermitianMat,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReceiverKind {
    Mrc,
    Pzf,
    FullZf,
    Mmse,
    MmseSampleCov,
}

/// Which filter to build. `k` is used by `Pzf` only, `snapshots` by
/// `MmseSampleCov` only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ReceiverSpec {
    pub kind: ReceiverKind,
    pub k: usize,
    pub snapshots: usize,
}

impl ReceiverSpec {
    pub fn mrc() -> Self {
        Self::of(ReceiverKind::Mrc)
    }

    pub fn pzf(k: usize) -> Self {
        Self {
            k,
            ..Self::of(ReceiverKind::Pzf)
        }
    }

    pub fn full_zf() -> Self {
        Self::of(ReceiverKind::FullZf)
    }

    pub fn mmse() -> Self {
        Self::of(ReceiverKind::Mmse)
    }

    pub fn sample_cov(snapshots: usize) -> Self {
        Self {
            snapshots,
            ..Self::of(ReceiverKind::MmseSampleCov)
        }
    }

    fn of(kind: ReceiverKind) -> Self {
        Self {
            kind,
            k: 0,
            snapshots: 0,
        }
    }

    /// Number of nearest interferers the filter nulls for `n_r` antennas.
    pub fn cancel_count(&self, n_r: usize) -> usize {
        match self.kind {
            ReceiverKind::Mrc => 0,
            ReceiverKind::Pzf => self.k,
            ReceiverKind::FullZf => n_r - 1,
            ReceiverKind::Mmse | ReceiverKind::MmseSampleCov => 0,
        }
    }

    pub fn check(&self, n_r: usize) -> Result<()> {
        let k = self.cancel_count(n_r);
        if k >= n_r {
            return Err(Error::TooManyCancelled { cancelled: k, dim: n_r });
        }
        if self.kind == ReceiverKind::MmseSampleCov && self.snapshots < n_r {
            return Err(Error::SingularSampleCovariance {
                snapshots: self.snapshots,
                dim: n_r,
            });
        }
        Ok(())
    }
}

impl fmt::Display for ReceiverSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ReceiverKind::Mrc => write!(f, "mrc"),
            ReceiverKind::Pzf => write!(f, "pzf-{}", self.k),
            ReceiverKind::FullZf => write!(f, "full-zf"),
            ReceiverKind::Mmse => write!(f, "mmse"),
            ReceiverKind::MmseSampleCov => write!(f, "mmse-sample-{}", self.snapshots),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SinrSample {
    pub sinr: f64,
    /// `|v₀† h₀|²`
    pub signal_power: f64,
    /// Interference after filtering, including the white residual.
    pub interference_power: f64,
    /// `|v₀† h₀|² / (‖v₀‖² ‖h₀‖²)`
    pub correlation: f64,
}

#[inline]
pub(crate) fn path_gain(d: f64, sq_distance: f64, half_alpha: f64) -> f64 {
    let x = d * d / sq_distance;
    if half_alpha == 2.0 {
        x * x
    } else if half_alpha == 1.5 {
        x * x.sqrt()
    } else {
        x.powf(half_alpha)
    }
}

/// Interference-plus-noise covariance of the retained interferers:
/// `(1/snr + residual) I + Σ_i d^α |X_i|^{-α} h_i h_i†`.
pub fn interference_covariance(field: &FieldRealization, cfg: &NetworkConfig) -> HermitianMat {
    let mut sigma =
        HermitianMat::scaled_identity(field.n_r(), cfg.inv_snr() + field.residual_interference);
    let a = cfg.half_alpha();
    for (q, h) in field.sq_distances.iter().zip(&field.channels).take(field.m) {
        sigma.add_outer(path_gain(cfg.d, *q, a), h.entries());
    }
    sigma
}

/// Builds the unit-norm filter described by `spec`.
pub fn build_filter<R: Rng + ?Sized>(
    spec: &ReceiverSpec,
    field: &FieldRealization,
    cfg: &NetworkConfig,
    rng: &mut R,
) -> Result<ComplexVec> {
    build_filter_with_estimate(spec, field, &field.h0, cfg, rng)
}

/// As [`build_filter`], but aligns the filter with `h0_est` instead of the
/// true desired channel.
pub fn build_filter_with_estimate<R: Rng + ?Sized>(
    spec: &ReceiverSpec,
    field: &FieldRealization,
    h0_est: &ComplexVec,
    cfg: &NetworkConfig,
    rng: &mut R,
) -> Result<ComplexVec> {
    let n_r = field.n_r();
    spec.check(n_r)?;
    match spec.kind {
        ReceiverKind::Mrc | ReceiverKind::Pzf | ReceiverKind::FullZf => {
            let k = spec.cancel_count(n_r).min(field.m);
            nullspace_project(h0_est, &field.channels[..k])
        }
        ReceiverKind::Mmse => {
            if field.m == 0 && field.residual_interference == 0.0 && cfg.inv_snr() == 0.0 {
                // Nothing to suppress: every filter is optimal.
                return h0_est.normalized().ok_or(Error::DegenerateProjection);
            }
            let sigma = interference_covariance(field, cfg);
            unit(hermitian_solve(&sigma, h0_est)?)
        }
        ReceiverKind::MmseSampleCov => {
            let sigma = sample_covariance(field, cfg, spec.snapshots, rng)?;
            let chol = sigma.cholesky().map_err(|_| Error::SingularSampleCovariance {
                snapshots: spec.snapshots,
                dim: n_r,
            })?;
            unit(ComplexVec::from_vec_unchecked(chol.solve(h0_est.entries())))
        }
    }
}

fn unit(v: ComplexVec) -> Result<ComplexVec> {
    v.normalized().ok_or(Error::DegenerateProjection)
}

/// `(1/K) Σ_t r_t r_t†` over `K` interference-plus-noise snapshots.
///
/// Interferers send independent Gaussian symbols, so each snapshot is a
/// zero-mean complex Gaussian vector with the true covariance; snapshots are
/// drawn by colouring white vectors with its Cholesky factor.
pub fn sample_covariance<R: Rng + ?Sized>(
    field: &FieldRealization,
    cfg: &NetworkConfig,
    snapshots: usize,
    rng: &mut R,
) -> Result<HermitianMat> {
    let n_r = field.n_r();
    if snapshots < n_r {
        return Err(Error::SingularSampleCovariance { snapshots, dim: n_r });
    }
    let chol = interference_covariance(field, cfg).cholesky()?;
    let mut acc = HermitianMat::zeros(n_r);
    let mut w = vec![Complex64::new(0.0, 0.0); n_r];
    for _ in 0..snapshots {
        for z in w.iter_mut() {
            *z = sample_complex_normal(rng);
        }
        acc.add_outer(1.0, &chol.mul_lower(&w));
    }
    acc.scale(1.0 / snapshots as f64);
    Ok(acc)
}

/// SINR of `filter` on `field`; the first `skip` interferers are treated as
/// perfectly cancelled.
pub fn evaluate_sinr(
    filter: &ComplexVec,
    field: &FieldRealization,
    cfg: &NetworkConfig,
    skip: usize,
) -> SinrSample {
    evaluate_sinr_against(filter, field, &field.h0, cfg, skip)
}

pub(crate) fn evaluate_sinr_against(
    filter: &ComplexVec,
    field: &FieldRealization,
    h0: &ComplexVec,
    cfg: &NetworkConfig,
    skip: usize,
) -> SinrSample {
    let vv = filter.norm_sqr();
    let signal = filter.inner(h0).norm_sqr();
    let a = cfg.half_alpha();
    let mut interference = field.residual_interference * vv;
    for i in skip.min(field.m)..field.m {
        let g = path_gain(cfg.d, field.sq_distances[i], a);
        interference += g * filter.inner(&field.channels[i]).norm_sqr();
    }
    let denom = cfg.inv_snr() * vv + interference;
    SinrSample {
        sinr: if denom > 0.0 { signal / denom } else { f64::INFINITY },
        signal_power: signal,
        interference_power: interference,
        correlation: signal / (vv * h0.norm_sqr()),
    }
}

/// Builds the filter and evaluates it, skipping the interferers it nulls.
pub fn receive<R: Rng + ?Sized>(
    spec: &ReceiverSpec,
    field: &FieldRealization,
    cfg: &NetworkConfig,
    rng: &mut R,
) -> Result<SinrSample> {
    let v = build_filter(spec, field, cfg, rng)?;
    Ok(evaluate_sinr(&v, field, cfg, spec.cancel_count(field.n_r())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::sample_ppp_field;
    use crate::mathkit::StreamFactory;

    fn cfg(n_r: usize, snr: f64) -> NetworkConfig {
        NetworkConfig {
            n_r,
            snr,
            ..Default::default()
        }
    }

    #[test]
    fn mmse_without_interferers_is_mrc() {
        let c = cfg(4, 10.0);
        let mut rng = StreamFactory::new(1).stream(&[]);
        let f = sample_ppp_field(&c, 0.1, 0, &mut rng);
        let v = build_filter(&ReceiverSpec::mmse(), &f, &c, &mut rng).unwrap();
        let want = f.h0.normalized().unwrap();
        for (a, b) in v.entries().iter().zip(want.entries()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn full_zf_two_antennas_nulls_nearest() {
        let c = cfg(2, f64::INFINITY);
        let mut rng = StreamFactory::new(2).stream(&[]);
        let f = sample_ppp_field(&c, 0.1, 10, &mut rng);
        let v = build_filter(&ReceiverSpec::full_zf(), &f, &c, &mut rng).unwrap();
        assert!(v.inner(&f.channels[0]).norm_sqr() < 1e-20);
    }

    #[test]
    fn single_antenna_no_interference() {
        let c = cfg(1, 7.0);
        let mut rng = StreamFactory::new(3).stream(&[]);
        let f = sample_ppp_field(&c, 0.1, 0, &mut rng);
        let s = receive(&ReceiverSpec::mrc(), &f, &c, &mut rng).unwrap();
        assert!((s.sinr - 7.0 * f.h0.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn mmse_sinr_matches_quadratic_form() {
        let c = cfg(4, 3.0);
        let f_ = StreamFactory::new(4);
        for t in 0..50 {
            let mut rng = f_.stream(&[t]);
            let mut f = sample_ppp_field(&c, 0.2, 30, &mut rng);
            f.residual_interference = 0.05;
            let s = receive(&ReceiverSpec::mmse(), &f, &c, &mut rng).unwrap();
            let sigma = interference_covariance(&f, &c);
            let x = hermitian_solve(&sigma, &f.h0).unwrap();
            let q = f.h0.inner(&x).re;
            assert!((s.sinr / q - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn mrc_and_pzf0_are_identical() {
        let c = cfg(3, f64::INFINITY);
        let mut rng = StreamFactory::new(5).stream(&[]);
        let f = sample_ppp_field(&c, 0.2, 30, &mut rng);
        let a = build_filter(&ReceiverSpec::mrc(), &f, &c, &mut rng).unwrap();
        let b = build_filter(&ReceiverSpec::pzf(0), &f, &c, &mut rng).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_specs() {
        let c = cfg(3, f64::INFINITY);
        let mut rng = StreamFactory::new(6).stream(&[]);
        let f = sample_ppp_field(&c, 0.2, 30, &mut rng);
        assert!(matches!(
            build_filter(&ReceiverSpec::pzf(3), &f, &c, &mut rng),
            Err(Error::TooManyCancelled { .. })
        ));
        assert!(matches!(
            build_filter(&ReceiverSpec::sample_cov(2), &f, &c, &mut rng),
            Err(Error::SingularSampleCovariance { .. })
        ));
    }

    #[test]
    fn pzf_with_few_interferers_cancels_all() {
        let c = cfg(4, 5.0);
        let mut rng = StreamFactory::new(7).stream(&[]);
        let f = sample_ppp_field(&c, 0.2, 1, &mut rng);
        let s = receive(&ReceiverSpec::pzf(3), &f, &c, &mut rng).unwrap();
        assert_eq!(s.interference_power, 0.0);
    }

    #[test]
    fn sample_cov_converges_to_mmse() {
        let c = cfg(4, 10.0);
        let f_ = StreamFactory::new(8);
        let mut angles = Vec::new();
        for t in 0..41 {
            let mut rng = f_.stream(&[t]);
            let f = sample_ppp_field(&c, 0.1, 40, &mut rng);
            let a = build_filter(&ReceiverSpec::mmse(), &f, &c, &mut rng).unwrap();
            let b = build_filter(&ReceiverSpec::sample_cov(4000), &f, &c, &mut rng).unwrap();
            let cos = a.inner(&b).norm().min(1.0);
            angles.push(cos.acos().to_degrees());
        }
        angles.sort_by(f64::total_cmp);
        assert!(angles[20] < 2.0, "median angle {}", angles[20]);
    }

    #[test]
    fn labels() {
        assert_eq!(ReceiverSpec::pzf(3).to_string(), "pzf-3");
        assert_eq!(ReceiverSpec::sample_cov(9).to_string(), "mmse-sample-9");
    }
}
