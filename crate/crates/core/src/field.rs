//! Interferer geometries and Rayleigh vector channels.
//!
//! A realization holds the `M` nearest interferers to the receiver, ordered by
//! distance. Anything beyond the `M`-th interferer can be folded into
//! `residual_interference`, a white interference floor (per antenna, in units
//! of the desired received power) added on top of the noise.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::mathkit::{gamma_ratio_tail_sum, sample_channel, ComplexVec};
use crate::{Error, Result};

/// Physical parameters shared by every formula and simulation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NetworkConfig {
    /// Transmitter to receiver distance (m).
    pub d: f64,
    /// Path-loss exponent, strictly above 2.
    pub alpha: f64,
    /// Interference-free SNR (linear). May be infinite.
    pub snr: f64,
    /// SINR threshold (linear).
    pub beta: f64,
    /// Outage constraint.
    pub epsilon: f64,
    /// Number of receive antennas.
    pub n_r: usize,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            d: 1.0,
            alpha: 4.0,
            snr: f64::INFINITY,
            beta: 1.0,
            epsilon: 0.1,
            n_r: 1,
        }
    }
}

impl NetworkConfig {
    pub fn new(d: f64, alpha: f64, snr: f64, beta: f64, epsilon: f64, n_r: usize) -> Result<Self> {
        let cfg = Self {
            d,
            alpha,
            snr,
            beta,
            epsilon,
            n_r,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.d > 0.0) || !self.d.is_finite() {
            return bad(format!("d must be positive and finite, got {}", self.d));
        }
        if !(self.alpha > 2.0) || !self.alpha.is_finite() {
            return bad(format!("alpha must exceed 2, got {}", self.alpha));
        }
        if !(self.snr > 0.0) {
            return bad(format!("snr must be positive, got {}", self.snr));
        }
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return bad(format!("beta must be positive, got {}", self.beta));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon must lie in (0, 1), got {}", self.epsilon));
        }
        if self.n_r == 0 {
            return bad("n_r must be at least 1".into());
        }
        Ok(())
    }

    /// α/2
    pub fn half_alpha(&self) -> f64 {
        self.alpha / 2.0
    }

    /// ⌈α/2⌉
    pub fn ceil_half_alpha(&self) -> u64 {
        self.half_alpha().ceil() as u64
    }

    /// Noise power relative to the desired signal, zero when noise-free.
    pub fn inv_snr(&self) -> f64 {
        if self.snr.is_infinite() {
            0.0
        } else {
            1.0 / self.snr
        }
    }

    /// `(π d² λ)^{α/2}`, the common scale of every interference moment.
    pub fn interference_scale(&self, lambda: f64) -> f64 {
        (PI * self.d * self.d * lambda).powf(self.half_alpha())
    }
}

/// One draw of the interferer field seen by the reference receiver.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldRealization {
    /// Strictly increasing squared distances `|X_i|²`.
    pub sq_distances: Vec<f64>,
    /// Vector channel of each interferer, in distance order.
    pub channels: Vec<ComplexVec>,
    /// Desired channel.
    pub h0: ComplexVec,
    /// Number of explicitly modelled interferers.
    pub m: usize,
    /// Mean interference from beyond the `m`-th interferer, treated as white.
    pub residual_interference: f64,
}

impl FieldRealization {
    pub fn n_r(&self) -> usize {
        self.h0.dim()
    }

    /// Relative received power `d^α |X_i|^{-α}` of interferer `i` (zero based).
    pub fn gain(&self, cfg: &NetworkConfig, i: usize) -> f64 {
        (cfg.d * cfg.d / self.sq_distances[i]).powf(cfg.half_alpha())
    }

    /// All gains, in distance order.
    pub fn gains(&self, cfg: &NetworkConfig) -> Vec<f64> {
        (0..self.m).map(|i| self.gain(cfg, i)).collect()
    }

    /// Writes the realization as CSV rows: index, squared distance, then the
    /// real and imaginary part of every channel entry. Row 0 is the desired
    /// link with distance `d²`.
    pub fn to_csv_rows(&self, cfg: &NetworkConfig) -> Vec<Vec<f64>> {
        let row = |idx: usize, sq: f64, h: &ComplexVec| {
            let mut r = vec![idx as f64, sq];
            for z in h.entries() {
                r.push(z.re);
                r.push(z.im);
            }
            r
        };
        let mut rows = vec![row(0, cfg.d * cfg.d, &self.h0)];
        for i in 0..self.m {
            rows.push(row(i + 1, self.sq_distances[i], &self.channels[i]));
        }
        rows
    }
}

/// Outcome of [`truncation_order`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub m: usize,
    /// True when the cap of 10⁵ interferers was hit before the tolerance.
    pub capped: bool,
}

pub const MAX_TRUNCATION: usize = 100_000;

/// Upper bound on the mean interference from interferers beyond index `m`.
pub fn tail_bound(cfg: &NetworkConfig, lambda: f64, m: usize) -> f64 {
    let a = cfg.half_alpha();
    let excess = m as f64 - cfg.ceil_half_alpha() as f64;
    if excess <= 0.0 {
        return f64::INFINITY;
    }
    cfg.interference_scale(lambda) / (a - 1.0) * excess.powf(1.0 - a)
}

/// Smallest `M ≥ 5 n_r` whose tail bound is within `tol` of the
/// interference-plus-noise level `1/snr + E[I_{⌈α/2⌉+1}]`.
pub fn truncation_order(cfg: &NetworkConfig, lambda: f64, tol: f64) -> Truncation {
    let a = cfg.half_alpha();
    let k = cfg.ceil_half_alpha() + 1;
    let mean = cfg.interference_scale(lambda)
        * gamma_ratio_tail_sum(a, k).expect("k exceeds α/2 by construction");
    let target = tol * (cfg.inv_snr() + mean);
    let floor = 5 * cfg.n_r;
    let ok = |m: usize| tail_bound(cfg, lambda, m) <= target;
    // Closed-form guess, then nudge for rounding.
    let guess = cfg.ceil_half_alpha() as f64
        + (target * (a - 1.0) / cfg.interference_scale(lambda)).powf(1.0 / (1.0 - a));
    let mut m = if guess.is_finite() && guess < MAX_TRUNCATION as f64 {
        (guess.ceil() as usize).max(floor)
    } else {
        MAX_TRUNCATION.max(floor)
    };
    while m > floor && ok(m - 1) {
        m -= 1;
    }
    while !ok(m) && m < MAX_TRUNCATION.max(floor) {
        m += 1;
    }
    Truncation {
        m,
        capped: !ok(m),
    }
}

/// Poisson field: squared distances are cumulative sums of unit exponentials
/// divided by `πλ`. The desired channel is drawn first so that realizations
/// with different `m` share a prefix.
pub fn sample_ppp_field<R: Rng + ?Sized>(
    cfg: &NetworkConfig,
    lambda: f64,
    m: usize,
    rng: &mut R,
) -> FieldRealization {
    let n_r = cfg.n_r;
    let h0 = sample_channel(n_r, rng);
    let scale = 1.0 / (PI * lambda);
    let mut acc = 0.0;
    let mut sq_distances = Vec::with_capacity(m);
    let mut channels = Vec::with_capacity(m);
    for _ in 0..m {
        let e: f64 = Exp1.sample(rng);
        acc += e;
        sq_distances.push(acc * scale);
        channels.push(sample_channel(n_r, rng));
    }
    FieldRealization {
        sq_distances,
        channels,
        h0,
        m,
        residual_interference: 0.0,
    }
}

/// The `m` grid points `(a, b)/√λ`, origin excluded, nearest to `rx`, as
/// `(squared distance, a, b)` sorted by distance then lexicographically.
pub fn nearest_grid_points(lambda: f64, rx: (f64, f64), m: usize) -> Vec<(f64, i64, i64)> {
    let s = 1.0 / lambda.sqrt();
    let (ux, uy) = (rx.0 / s, rx.1 / s);
    // Radius in grid units that holds at least m + 1 points with margin.
    let mut r = ((m as f64 + 1.0) / PI).sqrt() + 2.0;
    loop {
        let mut pts = Vec::new();
        let (a0, a1) = ((ux - r).floor() as i64, (ux + r).ceil() as i64);
        let (b0, b1) = ((uy - r).floor() as i64, (uy + r).ceil() as i64);
        for a in a0..=a1 {
            for b in b0..=b1 {
                if a == 0 && b == 0 {
                    continue;
                }
                let (dx, dy) = (a as f64 - ux, b as f64 - uy);
                let q = dx * dx + dy * dy;
                if q <= r * r {
                    pts.push((q, a, b));
                }
            }
        }
        if pts.len() >= m {
            pts.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
            pts.truncate(m);
            for p in &mut pts {
                p.0 *= s * s;
            }
            return pts;
        }
        r *= 1.5;
    }
}

/// Square-grid field with spacing `1/√λ`. The desired transmitter sits on the
/// origin grid point and the receiver at a uniform angle on the circle of
/// radius `d` around it.
pub fn sample_grid_field<R: Rng + ?Sized>(
    cfg: &NetworkConfig,
    lambda: f64,
    m: usize,
    rng: &mut R,
) -> FieldRealization {
    let phi = rng.random::<f64>() * 2.0 * PI;
    let rx = (cfg.d * phi.cos(), cfg.d * phi.sin());
    let pts = nearest_grid_points(lambda, rx, m);
    let mut sq_distances: Vec<f64> = pts.iter().map(|p| p.0).collect();
    for i in 1..sq_distances.len() {
        if sq_distances[i] <= sq_distances[i - 1] {
            sq_distances[i] = sq_distances[i - 1].next_up();
        }
    }
    let h0 = sample_channel(cfg.n_r, rng);
    let channels = (0..m).map(|_| sample_channel(cfg.n_r, rng)).collect();
    FieldRealization {
        sq_distances,
        channels,
        h0,
        m,
        residual_interference: 0.0,
    }
}
