//! Expected forward progress of ALOHA multihop routing with opportunistic
//! relay selection.
//!
//! Every node of a PPP(ν) transmits with probability `p` and otherwise acts
//! as a candidate relay. The reference transmitter sits at the origin and
//! sends towards `+x`; its packet is picked up by the successful relay with
//! the largest `x` coordinate (progress `X₀`, zero when no relay with
//! positive progress decodes). The figure of merit is
//! `EFP = νp · E[X₀] · log₂(1 + β)`.
//!
//! # Normalised coordinates
//!
//! Lengths are measured in units of `1/√(νp)`, so transmitters always form a
//! unit-density PPP and the candidate relays a PPP of density `(1 − p)/p`.
//! Without noise the SIR is scale-free, so whether a given relay decodes does
//! not depend on `p` at all. Relays are generated as a stack of unit-density
//! slabs with uniform marks; a relay at slab `j` with mark `u` exists for all
//! `p` with `(1 − p)/p > j + u`. One trial therefore serves a whole grid of
//! `p` values with common random numbers, and `simulate_efp` at one `p`
//! returns exactly the value that `efp_curve` reports for it.
//!
//! # Interference
//!
//! Each relay combines with the MMSE filter for the `near_field` transmitters
//! nearest to it, treated exactly, plus the mean power of the remaining
//! transmitters in the window as white interference. `near_field = 0`
//! switches to the exact sum over every transmitter in the window.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use crate::mathkit::stats::Z95;
use crate::mathkit::{sample_complex_normal, Complex64, HermitianMat, StreamFactory};
use crate::{Error, Result};

const LANE_TX: u64 = 10;
const LANE_RELAY: u64 = 11;
const LANE_LINK: u64 = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct EfpConfig {
    /// Node density ν (nodes per unit area).
    pub node_density: f64,
    pub alpha: f64,
    /// SIR threshold (linear).
    pub beta: f64,
    pub n_r: usize,
    /// Simulation disc radius in units of `1/√(νp)`.
    pub window_scale: f64,
    /// Transmitters per relay treated exactly; 0 means all of them.
    pub near_field: usize,
}

impl Default for EfpConfig {
    fn default() -> Self {
        Self {
            node_density: 1.0,
            alpha: 3.0,
            beta: 1.0,
            n_r: 1,
            window_scale: 15.0,
            near_field: 0,
        }
    }
}

impl EfpConfig {
    pub fn with_antennas(n_r: usize) -> Self {
        Self {
            n_r,
            near_field: Self::default_near_field(n_r),
            ..Self::default()
        }
    }

    /// Near-field size used by [`EfpConfig::with_antennas`].
    pub fn default_near_field(n_r: usize) -> usize {
        8 * n_r + 40
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.node_density > 0.0 && self.node_density.is_finite()) {
            return bad(format!("node_density must be positive, got {}", self.node_density));
        }
        if !(self.alpha > 2.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must exceed 2, got {}", self.alpha));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be positive, got {}", self.beta));
        }
        if self.n_r == 0 {
            return bad("n_r must be positive".into());
        }
        if !(self.window_scale > 1.0 && self.window_scale.is_finite()) {
            return bad(format!("window_scale must exceed 1, got {}", self.window_scale));
        }
        Ok(())
    }

    /// `log₂(1 + β)`.
    pub fn spectral_efficiency(&self) -> f64 {
        self.beta.ln_1p() / std::f64::consts::LN_2
    }

    /// Threshold that yields a given spectral efficiency.
    pub fn beta_for_spectral_efficiency(se: f64) -> f64 {
        se.exp2() - 1.0
    }

    /// Squared radius (normalised units) of the half-disc searched for
    /// relays. A relay at normalised distance `r` decodes only if the
    /// critical density of its link exceeds `r²`; with unit threshold the
    /// 0.9999 quantile of that density is below `0.9 + 0.27 n_r` at α = 3, so
    /// the margin here leaves no measurable mass outside.
    pub fn relay_radius_sq(&self) -> f64 {
        2.5 * (1.0 + 0.3 * self.n_r as f64) * self.beta.powf(-2.0 / self.alpha) * (self.alpha / 3.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EfpPoint {
    pub p: f64,
    pub efp: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `E[X₀]` in physical units.
    pub mean_progress: f64,
}

impl EfpPoint {
    pub fn half_width(&self) -> f64 {
        (self.ci_high - self.ci_low) / 2.0
    }
}

/// Transmitters of one trial, bucketed on a square grid for neighbour search.
struct TxField {
    xs: Vec<f64>,
    ys: Vec<f64>,
    origin: f64,
    cells: usize,
    // CSR layout: points of cell c are idx[start[c]..start[c + 1]].
    start: Vec<usize>,
    idx: Vec<u32>,
}

impl TxField {
    fn sample(window: f64, rng: &mut ChaCha8Rng) -> Self {
        let count = Poisson::new(PI * window * window)
            .expect("positive mean")
            .sample(rng) as usize;
        let mut xs = Vec::with_capacity(count);
        let mut ys = Vec::with_capacity(count);
        for _ in 0..count {
            let r = window * rng.random::<f64>().sqrt();
            let th = 2.0 * PI * rng.random::<f64>();
            xs.push(r * th.cos());
            ys.push(r * th.sin());
        }
        let cells = (2.0 * window).ceil() as usize;
        let mut field = Self {
            xs,
            ys,
            origin: -window,
            cells,
            start: vec![0; cells * cells + 1],
            idx: vec![0; count],
        };
        let ids: Vec<usize> = (0..count).map(|i| field.cell_of(field.xs[i], field.ys[i])).collect();
        for &c in &ids {
            field.start[c + 1] += 1;
        }
        for c in 0..cells * cells {
            field.start[c + 1] += field.start[c];
        }
        let mut fill = field.start.clone();
        for (i, &c) in ids.iter().enumerate() {
            field.idx[fill[c]] = i as u32;
            fill[c] += 1;
        }
        field
    }

    fn len(&self) -> usize {
        self.xs.len()
    }

    fn cell_coord(&self, v: f64) -> usize {
        (((v - self.origin).floor()).max(0.0) as usize).min(self.cells - 1)
    }

    fn cell_of(&self, x: f64, y: f64) -> usize {
        self.cell_coord(y) * self.cells + self.cell_coord(x)
    }

    /// The `l` transmitters nearest to `(x, y)` as `(squared distance, index)`,
    /// sorted by distance.
    fn nearest(&self, x: f64, y: f64, l: usize, out: &mut Vec<(f64, u32)>) {
        out.clear();
        let l = l.min(self.len());
        let (cx, cy) = (self.cell_coord(x) as isize, self.cell_coord(y) as isize);
        let n = self.cells as isize;
        let mut ring = 0isize;
        loop {
            for dy in -ring..=ring {
                for dx in -ring..=ring {
                    if dx.abs() != ring && dy.abs() != ring {
                        continue;
                    }
                    let (gx, gy) = (cx + dx, cy + dy);
                    if gx < 0 || gy < 0 || gx >= n || gy >= n {
                        continue;
                    }
                    let c = (gy * n + gx) as usize;
                    for &i in &self.idx[self.start[c]..self.start[c + 1]] {
                        let (ddx, ddy) = (self.xs[i as usize] - x, self.ys[i as usize] - y);
                        out.push((ddx * ddx + ddy * ddy, i));
                    }
                }
            }
            // Anything outside the block lies at least `ring` cells away.
            let reach = (ring as f64) * (ring as f64);
            let covered = out.iter().filter(|(d, _)| *d <= reach).count();
            if covered >= l || ring > n {
                break;
            }
            ring += 1;
        }
        let by_dist = |a: &(f64, u32), b: &(f64, u32)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if out.len() > l && l > 0 {
            out.select_nth_unstable_by(l - 1, by_dist);
            out.truncate(l);
        }
        out.sort_by(by_dist);
    }
}

#[derive(Clone, Copy, Debug)]
struct Relay {
    x: f64,
    y: f64,
    // Existence threshold `j + u` on the relay density (1 − p)/p.
    level: f64,
    slab: u64,
    index: u64,
}

fn sample_relays(streams: &StreamFactory, trial: u64, radius_sq: f64, max_level: f64) -> Vec<Relay> {
    let radius = radius_sq.sqrt();
    let per_slab = Poisson::new(PI * radius_sq / 2.0).expect("positive mean");
    let mut relays = Vec::new();
    for slab in 0..max_level.ceil() as u64 {
        let mut rng = streams.stream(&[trial, LANE_RELAY, slab]);
        let count = per_slab.sample(&mut rng) as u64;
        for index in 0..count {
            let r = radius * rng.random::<f64>().sqrt();
            let th = PI * (rng.random::<f64>() - 0.5);
            let level = slab as f64 + rng.random::<f64>();
            if level < max_level {
                relays.push(Relay {
                    x: r * th.cos(),
                    y: r * th.sin(),
                    level,
                    slab,
                    index,
                });
            }
        }
    }
    relays.sort_by(|a, b| b.x.total_cmp(&a.x).then(a.slab.cmp(&b.slab)).then(a.index.cmp(&b.index)));
    relays
}

/// Per-trial scratch buffers.
struct Scratch {
    near: Vec<(f64, u32)>,
    h: Vec<Complex64>,
    h0: Vec<Complex64>,
}

/// Mean interference power per antenna from transmitters between distance
/// `inner` and the window edge, approximating the window as centred on the
/// relay.
fn far_field_mean(alpha: f64, inner: f64, window: f64) -> f64 {
    if inner >= window {
        return 0.0;
    }
    2.0 * PI * (inner.powf(2.0 - alpha) - window.powf(2.0 - alpha)) / (alpha - 2.0)
}

fn relay_decodes(
    cfg: &EfpConfig,
    tx: &TxField,
    relay: &Relay,
    rng: &mut ChaCha8Rng,
    scratch: &mut Scratch,
) -> Result<bool> {
    let n = cfg.n_r;
    let half_alpha = cfg.alpha / 2.0;
    let l = if cfg.near_field == 0 { tx.len() } else { cfg.near_field };
    tx.nearest(relay.x, relay.y, l, &mut scratch.near);

    scratch.h0.clear();
    scratch.h0.extend((0..n).map(|_| sample_complex_normal(rng)));
    let d0_sq = relay.x * relay.x + relay.y * relay.y;
    let g0 = d0_sq.powf(-half_alpha);

    let mut sigma = HermitianMat::zeros(n);
    for &(dsq, _) in &scratch.near {
        scratch.h.clear();
        scratch.h.extend((0..n).map(|_| sample_complex_normal(rng)));
        sigma.add_outer(dsq.powf(-half_alpha), &scratch.h);
    }
    if cfg.near_field != 0 && scratch.near.len() < tx.len() {
        let edge = scratch.near.last().map_or(0.0, |v| v.0.sqrt());
        sigma.add_diagonal(far_field_mean(cfg.alpha, edge, cfg.window_scale));
    }
    if scratch.near.is_empty() {
        return Ok(true);
    }
    let chol = match sigma.cholesky() {
        Ok(c) => c,
        // Fewer interferers than antennas: the desired signal can be
        // received interference-free.
        Err(Error::NotPositiveDefinite { .. }) => return Ok(true),
        Err(e) => return Err(e),
    };
    let w = chol.solve(&scratch.h0);
    let q: f64 = scratch.h0.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
    Ok(g0 * q >= cfg.beta)
}

/// Normalised progress `X̃₀` of one trial for every relay-density level in
/// `levels` (sorted descending).
fn trial_progress(
    cfg: &EfpConfig,
    streams: &StreamFactory,
    trial: u64,
    levels: &[f64],
) -> Result<Vec<f64>> {
    let tx = TxField::sample(cfg.window_scale, &mut streams.stream(&[trial, LANE_TX]));
    let relays = sample_relays(streams, trial, cfg.relay_radius_sq(), levels[0]);
    let mut progress = vec![0.0; levels.len()];
    // levels[open..] are still waiting for a successful relay.
    let mut open = 0;
    let mut scratch = Scratch {
        near: Vec::new(),
        h: Vec::with_capacity(cfg.n_r),
        h0: Vec::with_capacity(cfg.n_r),
    };
    for relay in &relays {
        if open == levels.len() {
            break;
        }
        if relay.level >= levels[open] {
            continue;
        }
        let mut rng = streams.stream(&[trial, LANE_LINK, relay.slab, relay.index]);
        if relay_decodes(cfg, &tx, relay, &mut rng, &mut scratch)? {
            while open < levels.len() && relay.level < levels[open] {
                progress[open] = relay.x;
                open += 1;
            }
        }
    }
    Ok(progress)
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidConfig(format!("p must lie in (0, 1), got {p}")));
    }
    Ok(())
}

/// EFP at every `p` of `grid`, all estimated from the same trials.
/// Points are returned in grid order.
pub fn efp_curve(cfg: &EfpConfig, grid: &[f64], trials: u64, seed: u64) -> Result<Vec<EfpPoint>> {
    cfg.validate()?;
    if grid.is_empty() {
        return Err(Error::InvalidConfig("p grid is empty".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be positive".into()));
    }
    for &p in grid {
        check_p(p)?;
    }
    // Distinct p sorted by decreasing relay density.
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&a, &b| grid[a].total_cmp(&grid[b]));
    order.dedup_by(|a, b| grid[*a] == grid[*b]);
    let levels: Vec<f64> = order.iter().map(|&i| (1.0 - grid[i]) / grid[i]).collect();

    let streams = StreamFactory::new(seed);
    let per_trial: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| trial_progress(cfg, &streams, t, &levels))
        .collect::<Result<_>>()?;

    let se = cfg.spectral_efficiency();
    let tf = trials as f64;
    let points: Vec<EfpPoint> = order
        .iter()
        .enumerate()
        .map(|(slot, &gi)| {
            let p = grid[gi];
            let scale = (cfg.node_density * p).sqrt();
            let (mut sum, mut sq) = (0.0, 0.0);
            for row in &per_trial {
                sum += row[slot];
                sq += row[slot] * row[slot];
            }
            let mean = sum / tf;
            let var = if trials > 1 { ((sq - tf * mean * mean) / (tf - 1.0)).max(0.0) } else { 0.0 };
            let efp = scale * mean * se;
            let half = Z95 * scale * se * (var / tf).sqrt();
            EfpPoint {
                p,
                efp,
                ci_low: (efp - half).max(0.0),
                ci_high: efp + half,
                mean_progress: mean / scale,
            }
        })
        .collect();
    Ok(grid
        .iter()
        .map(|&p| *points.iter().find(|pt| pt.p == p).expect("every grid value evaluated"))
        .collect())
}

pub fn simulate_efp(cfg: &EfpConfig, p: f64, trials: u64, seed: u64) -> Result<f64> {
    Ok(efp_curve(cfg, &[p], trials, seed)?[0].efp)
}

/// Grid maximiser of the EFP; ties go to the smaller `p`.
pub fn optimize_p(cfg: &EfpConfig, grid: &[f64], trials: u64, seed: u64) -> Result<(f64, f64)> {
    let best = best_point(&efp_curve(cfg, grid, trials, seed)?);
    Ok((best.p, best.efp))
}

/// Largest-EFP point of a curve, ties to the smaller `p`.
pub fn best_point(curve: &[EfpPoint]) -> EfpPoint {
    let mut best = curve[0];
    for pt in &curve[1..] {
        if pt.efp > best.efp || (pt.efp == best.efp && pt.p < best.p) {
            best = *pt;
        }
    }
    best
}
