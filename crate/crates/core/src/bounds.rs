//! Closed-form interference moments and outage / density bounds.
//!
//! Throughout, `a = α/2` and `c = (π d² λ)^{α/2}`. `T_i` is a unit-scale gamma
//! variable with shape `i` (the normalised squared distance of the `i`-th
//! nearest interferer), so `E[T_i^b] = Γ(i + b)/Γ(i)`.

use std::f64::consts::PI;

use crate::field::NetworkConfig;
use crate::mathkit::{
    chi2_variance, digamma, gamma_cdf, gamma_ratio_tail_sum, ln_gamma, power_series_tail, quad,
    EULER_GAMMA,
};
use crate::{Error, Result};

/// A bound value plus whether its preconditions hold.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundResult {
    pub value: f64,
    pub valid: bool,
    pub reason: Option<String>,
}

impl BoundResult {
    fn ok(value: f64) -> Self {
        Self {
            value,
            valid: true,
            reason: None,
        }
    }

    fn probability(value: f64) -> Self {
        Self::ok(value.clamp(0.0, 1.0))
    }

    fn invalid(reason: impl Into<String>) -> Self {
        Self {
            value: f64::NAN,
            valid: false,
            reason: Some(reason.into()),
        }
    }

    /// The value if valid, `None` otherwise.
    pub fn get(&self) -> Option<f64> {
        self.valid.then_some(self.value)
    }
}

/// `1 − 2/α`, the cancellation fraction that maximises the PZF lower bound.
pub fn theta_star(alpha: f64) -> f64 {
    1.0 - 2.0 / alpha
}

/// Mean interference after cancelling the `k` nearest interferers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpectedInterference {
    pub exact: f64,
    /// Simple upper bound, available for `k > ⌈α/2⌉`.
    pub upper: Option<f64>,
}

/// `E[I_k] = c Σ_{i>k} Γ(i − α/2)/Γ(i)`, finite for `k > α/2 − 1`.
pub fn expected_interference(
    cfg: &NetworkConfig,
    lambda: f64,
    k: usize,
) -> Result<ExpectedInterference> {
    let a = cfg.half_alpha();
    let c = cfg.interference_scale(lambda);
    let exact = c * gamma_ratio_tail_sum(a, k as u64)?;
    let ceil = cfg.ceil_half_alpha() as f64;
    let upper = (k as f64 > ceil).then(|| c / (a - 1.0) * (k as f64 - ceil).powf(1.0 - a));
    Ok(ExpectedInterference { exact, upper })
}

/// Outage upper bound for PZF-k from Markov's inequality.
pub fn pzf_markov(cfg: &NetworkConfig, lambda: f64, k: usize) -> BoundResult {
    let a = cfg.half_alpha();
    let ceil = cfg.ceil_half_alpha() as usize;
    let n = cfg.n_r;
    if !(k > ceil && k + 1 < n) {
        return BoundResult::invalid(format!(
            "needs {ceil} < k < n_r - 1, got k = {k}, n_r = {n}"
        ));
    }
    let c = cfg.interference_scale(lambda);
    let mean_ub = c / (a - 1.0) * ((k - ceil) as f64).powf(1.0 - a);
    BoundResult::probability(cfg.beta * (mean_ub + cfg.inv_snr()) / (n - k - 1) as f64)
}

/// Density lower bound for PZF-k obtained by inverting [`pzf_markov`].
pub fn pzf_density_lb_markov(cfg: &NetworkConfig, k: usize) -> BoundResult {
    let a = cfg.half_alpha();
    let two_over = 2.0 / cfg.alpha;
    let ceil = cfg.ceil_half_alpha() as usize;
    let n = cfg.n_r as f64;
    let room = n - k as f64 - 1.0 - cfg.beta * cfg.inv_snr() / cfg.epsilon;
    if !(k > ceil && room > 0.0) {
        return BoundResult::invalid(format!(
            "needs {ceil} < k < n_r - 1 - beta/(epsilon snr), got k = {k}"
        ));
    }
    let v = (cfg.epsilon / cfg.beta).powf(two_over) * (a - 1.0).powf(two_over)
        / (PI * cfg.d * cfg.d)
        * room.powf(two_over)
        * ((k - ceil) as f64).powf(1.0 - two_over);
    BoundResult::ok(v)
}

/// Outage lower bound for MMSE from Markov's inequality on the success event.
pub fn mmse_markov(cfg: &NetworkConfig, lambda: f64) -> BoundResult {
    let a = cfg.half_alpha();
    let n = cfg.n_r as f64;
    let v = 1.0
        - cfg.d.powf(-cfg.alpha) / cfg.beta * ((2.0 * n + 1.0 + a) / (PI * lambda)).powf(a);
    BoundResult::probability(v)
}

fn density_denominator(cfg: &NetworkConfig) -> f64 {
    let two_over = 2.0 / cfg.alpha;
    PI * cfg.d * cfg.d * cfg.beta.powf(two_over) * (1.0 - cfg.epsilon).powf(two_over)
}

/// Density upper bound for MMSE (and hence every linear receiver).
pub fn mmse_density_ub(cfg: &NetworkConfig) -> BoundResult {
    let n = cfg.n_r as f64;
    BoundResult::ok((2.0 * n + 1.0 + cfg.half_alpha()) / density_denominator(cfg))
}

/// Density upper bound for PZF-k with free parameter `l > 1`.
pub fn pzf_density_ub(cfg: &NetworkConfig, k: usize, l: f64) -> BoundResult {
    if !(l > 1.0) {
        return BoundResult::invalid(format!("needs l > 1, got {l}"));
    }
    if k >= cfg.n_r {
        return BoundResult::invalid(format!("needs k < n_r, got k = {k}"));
    }
    let n = cfg.n_r as f64;
    let kf = k as f64;
    let v = (kf + l + cfg.half_alpha()) / density_denominator(cfg)
        * ((n - kf) / (l - 1.0)).powf(2.0 / cfg.alpha);
    BoundResult::ok(v)
}

/// [`pzf_density_ub`] with `l = (2/α)/(1 − 2/α) · θ n_r`, where `θ = k/n_r`.
pub fn pzf_density_ub_auto(cfg: &NetworkConfig, k: usize) -> BoundResult {
    let two_over = 2.0 / cfg.alpha;
    let l = two_over / (1.0 - two_over) * k as f64;
    pzf_density_ub(cfg, k, l)
}

/// MRC density upper bound, `(2 + α/2) n_r^{2/α} / (π d² β^{2/α} (1−ε)^{2/α})`.
pub fn mrc_density_ub(cfg: &NetworkConfig) -> BoundResult {
    let n = cfg.n_r as f64;
    BoundResult::ok(
        (2.0 + cfg.half_alpha()) / density_denominator(cfg) * n.powf(2.0 / cfg.alpha),
    )
}

/// Full zero-forcing density upper bound,
/// `(2 + α/(2 n_r)) n_r^{1−2/α} / (π d² β^{2/α} (1−ε)^{2/α})`.
pub fn full_zf_density_ub(cfg: &NetworkConfig) -> BoundResult {
    let n = cfg.n_r as f64;
    BoundResult::ok(
        (2.0 + cfg.alpha / (2.0 * n)) / density_denominator(cfg) * n.powf(1.0 - 2.0 / cfg.alpha),
    )
}

// Explicit terms summed before switching to asymptotic tails.
const EXPLICIT_TERMS: u64 = 4000;

/// Coefficients `A_1..A_3` of `Γ(i + c)/Γ(i) = i^c (1 + A_1/i + A_2/i² + A_3/i³ + …)`.
fn gamma_ratio_coeffs(c: f64) -> [f64; 3] {
    [
        c * (c - 1.0) / 2.0,
        c * (c - 1.0) * (c - 2.0) * (3.0 * c - 1.0) / 24.0,
        c * c * (c - 1.0).powi(2) * (c - 2.0) * (c - 3.0) / 48.0,
    ]
}

/// Leading exponent and coefficients of `Var(T_i^{-a}) ~ i^{-p} Σ_j v_j i^{-j}`.
fn variance_expansion(a: f64) -> (f64, [f64; 3]) {
    let alpha = 2.0 * a;
    let full = gamma_ratio_coeffs(-alpha);
    let half = gamma_ratio_coeffs(-a);
    (
        alpha + 1.0,
        [
            full[0] - 2.0 * half[0],
            full[1] - 2.0 * half[1] - half[0] * half[0],
            full[2] - 2.0 * half[2] - 2.0 * half[0] * half[1],
        ],
    )
}

/// Same for `sqrt(Var(T_i^{-a}))`.
fn std_expansion(a: f64) -> (f64, [f64; 3]) {
    let (p, v) = variance_expansion(a);
    let (r1, r2) = (v[1] / v[0], v[2] / v[0]);
    let s = v[0].sqrt();
    (p / 2.0, [s, s * r1 / 2.0, s * (r2 / 2.0 - r1 * r1 / 8.0)])
}

/// Series sums behind the variance bound, at unit scale `c = 1`.
#[derive(Clone, Copy, Debug)]
struct VarianceSeries {
    /// Σ_{i>k} E[T_i^{-α}]
    second_moment: f64,
    /// Σ_{i>k} Var(T_i^{-α/2})
    variance: f64,
    /// Σ_{i>k} sqrt(Var(T_i^{-α/2})) Σ_{j>i} sqrt(Var(T_j^{-α/2}))
    cross: f64,
    /// Σ_{i>k} sqrt(Var(T_i^{-α/2}))
    std_sum: f64,
}

fn variance_series(cfg: &NetworkConfig, k: usize) -> Result<VarianceSeries> {
    let a = cfg.half_alpha();
    let alpha = cfg.alpha;
    if !((k + 1) as f64 > alpha) {
        return Err(Error::DivergentMoment(format!(
            "E[T_{{k+1}}^-{alpha}] is infinite for k = {k}; needs k + 1 > alpha"
        )));
    }
    let first = k as u64 + 1;
    let last = first + EXPLICIT_TERMS - 1;
    let mut stds = Vec::with_capacity(EXPLICIT_TERMS as usize);
    let mut variance = 0.0;
    for i in first..=last {
        let v = chi2_variance(i, -a)?;
        variance += v;
        stds.push(v.sqrt());
    }
    let (pv, cv) = variance_expansion(a);
    let (ps, cs) = std_expansion(a);
    let var_tail = power_series_tail(pv, &cv, last + 1)?;
    let std_tail = power_series_tail(ps, &cs, last + 1)?;
    // Suffix sums S_{i+1} = Σ_{j>i} s_j, walking backwards.
    let mut suffix = std_tail;
    let mut cross = 0.0;
    for s in stds.iter().rev() {
        cross += s * suffix;
        suffix += s;
    }
    // Σ_{N<i<j} s_i s_j = ((Σ s)² − Σ s²) / 2 over the tail.
    cross += 0.5 * (std_tail * std_tail - var_tail);
    Ok(VarianceSeries {
        second_moment: gamma_ratio_tail_sum(alpha, k as u64)?,
        variance: variance + var_tail,
        cross,
        std_sum: suffix,
    })
}

/// Upper bound on `Var(I_k)` from Cauchy–Schwarz on the covariances.
///
/// Needs `k + 1 > α` so that `E[T_{k+1}^{-α}]` is finite.
pub fn var_ub_interference(cfg: &NetworkConfig, lambda: f64, k: usize) -> Result<f64> {
    let s = variance_series(cfg, k)?;
    let c = cfg.interference_scale(lambda);
    Ok(c * c * (s.second_moment + s.variance + 2.0 * s.cross))
}

/// The same bound through `Σ_i Var_i + 2 Σ_{i<j} s_i s_j = (Σ_i s_i)²`.
pub fn var_ub_interference_alt(cfg: &NetworkConfig, lambda: f64, k: usize) -> Result<f64> {
    let s = variance_series(cfg, k)?;
    let c = cfg.interference_scale(lambda);
    Ok(c * c * (s.second_moment + s.std_sum * s.std_sum))
}

/// Chebyshev outage upper bound for PZF-k. The series are evaluated once;
/// [`PzfChebyshev::outage`] is then cheap for any density.
#[derive(Clone, Debug)]
pub struct PzfChebyshev {
    cfg: NetworkConfig,
    k: usize,
    mean_unit: f64,
    var_unit: f64,
}

impl PzfChebyshev {
    pub fn new(cfg: &NetworkConfig, k: usize) -> Result<Self> {
        if k >= cfg.n_r {
            return Err(Error::TooManyCancelled {
                cancelled: k,
                dim: cfg.n_r,
            });
        }
        let s = variance_series(cfg, k)?;
        Ok(Self {
            cfg: *cfg,
            k,
            mean_unit: gamma_ratio_tail_sum(cfg.half_alpha(), k as u64)?,
            var_unit: s.second_moment + s.variance + 2.0 * s.cross,
        })
    }

    pub fn outage(&self, lambda: f64) -> Result<f64> {
        let cfg = &self.cfg;
        let c = cfg.interference_scale(lambda);
        let mean = c * self.mean_unit;
        let var = c * c * self.var_unit;
        let beta = cfg.beta;
        let shape = (cfg.n_r - self.k) as f64;
        let sigma = beta * (mean + cfg.inv_snr() + var.sqrt());
        let below = gamma_cdf(shape, sigma);
        if var == 0.0 {
            return Ok(below.clamp(0.0, 1.0));
        }
        let pole = beta * cfg.inv_snr() + beta * mean;
        let scale = beta * beta * var;
        let ln_norm = ln_gamma(shape)?;
        let density = |s: f64| {
            if s <= 0.0 {
                0.0
            } else {
                ((shape - 1.0) * s.ln() - s - ln_norm).exp()
            }
        };
        let integrand = |s: f64| scale / ((s - pole) * (s - pole)) * density(s);
        let upper = sigma.max(shape) + 60.0 + 12.0 * shape.sqrt();
        let tail = quad::integrate(integrand, sigma, upper, 1e-10)?;
        Ok((below + tail).clamp(0.0, 1.0))
    }
}

/// Chebyshev outage upper bound for PZF-k at a single density.
pub fn pzf_chebyshev(cfg: &NetworkConfig, lambda: f64, k: usize) -> BoundResult {
    match PzfChebyshev::new(cfg, k).and_then(|b| b.outage(lambda)) {
        Ok(v) => BoundResult::probability(v),
        Err(e) => BoundResult::invalid(e.to_string()),
    }
}

/// `Σ_{i≥n} exp(−γ − (α/2) ψ₀(i))`.
pub fn digamma_series(alpha: f64, n: usize) -> Result<f64> {
    let a = alpha / 2.0;
    if !(a > 1.0) {
        return Err(Error::DivergentMoment(format!(
            "digamma series diverges for alpha = {alpha}"
        )));
    }
    let n = n.max(1) as u64;
    let last = n + EXPLICIT_TERMS - 1;
    let mut sum = 0.0;
    for i in n..=last {
        sum += (-EULER_GAMMA - a * digamma(i as f64)?).exp();
    }
    let e = (-EULER_GAMMA).exp();
    let coeffs = [
        e,
        e * a / 2.0,
        e * (a / 12.0 + a * a / 8.0),
        e * (a * a / 24.0 + a * a * a / 48.0),
    ];
    Ok(sum + power_series_tail(a, &coeffs, last + 1)?)
}

/// Chebyshev outage lower bound for MMSE. The series are evaluated once.
#[derive(Clone, Debug)]
pub struct MmseChebyshev {
    cfg: NetworkConfig,
    /// Σ_{i≥n_r} Γ(i − α/2)/Γ(i)
    gamma_sum: f64,
    /// Σ_{i≥n_r} exp(−γ − (α/2) ψ₀(i))
    digamma_sum: f64,
}

/// Mean lower bound and variance upper bound of `S/I`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SirMoments {
    pub mean_lb: f64,
    pub var_ub: f64,
}

impl MmseChebyshev {
    pub fn new(cfg: &NetworkConfig) -> Result<Self> {
        let n = cfg.n_r;
        if n == 0 {
            return Err(Error::InvalidConfig("n_r must be positive".into()));
        }
        Ok(Self {
            cfg: *cfg,
            gamma_sum: gamma_ratio_tail_sum(cfg.half_alpha(), n as u64 - 1)?,
            digamma_sum: digamma_series(cfg.alpha, n)?,
        })
    }

    pub fn moments(&self, lambda: f64) -> SirMoments {
        let n = self.cfg.n_r as f64;
        let c = self.cfg.interference_scale(lambda);
        SirMoments {
            mean_lb: n / (c * self.gamma_sum),
            var_ub: n * (n + 1.0) / (c * c * self.digamma_sum.powi(2))
                - n * n / (c * c * self.gamma_sum.powi(2)),
        }
    }

    /// Outage lower bound; invalid when `β ≤ E^lb[S/I]`.
    pub fn outage(&self, lambda: f64) -> BoundResult {
        let m = self.moments(lambda);
        let beta = self.cfg.beta;
        if beta <= m.mean_lb {
            return BoundResult::invalid(format!(
                "bound vacuous: beta = {beta} <= E_lb[S/I] = {}",
                m.mean_lb
            ));
        }
        BoundResult::probability(1.0 - m.var_ub / (beta - m.mean_lb).powi(2))
    }
}

/// Chebyshev outage lower bound for MMSE at a single density.
pub fn mmse_chebyshev(cfg: &NetworkConfig, lambda: f64) -> BoundResult {
    match MmseChebyshev::new(cfg) {
        Ok(b) => b.outage(lambda),
        Err(e) => BoundResult::invalid(e.to_string()),
    }
}

/// Solves `bound(λ) = ε` for an outage bound nondecreasing in `λ`.
///
/// The bracket grows by doubling (or shrinks by halving) from
/// `ε / (π d² β^{2/α})`, then bisection runs until `|bound − ε| ≤ 1e-6`.
pub fn density_from_bound<F>(cfg: &NetworkConfig, mut bound: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    const MAX_STEPS: usize = 60;
    let eps = cfg.epsilon;
    let start = eps / (PI * cfg.d * cfg.d * cfg.beta.powf(2.0 / cfg.alpha));
    let (mut lo, mut hi);
    if bound(start)? < eps {
        lo = start;
        hi = 2.0 * start;
        let mut steps = 0;
        while bound(hi)? < eps {
            lo = hi;
            hi *= 2.0;
            steps += 1;
            if steps >= MAX_STEPS {
                return Err(Error::BracketFailure(MAX_STEPS));
            }
        }
    } else {
        hi = start;
        lo = start / 2.0;
        let mut steps = 0;
        while bound(lo)? >= eps {
            hi = lo;
            lo /= 2.0;
            steps += 1;
            if steps >= MAX_STEPS {
                return Err(Error::BracketFailure(MAX_STEPS));
            }
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = bound(mid)?;
        if (v - eps).abs() <= 1e-6 || hi - lo <= 1e-14 * hi {
            return Ok(mid);
        }
        if v < eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Density lower bound for PZF-k from the Chebyshev outage bound.
pub fn pzf_density_lb_chebyshev(cfg: &NetworkConfig, k: usize) -> BoundResult {
    let b = match PzfChebyshev::new(cfg, k) {
        Ok(b) => b,
        Err(e) => return BoundResult::invalid(e.to_string()),
    };
    match density_from_bound(cfg, |l| b.outage(l)) {
        Ok(v) => BoundResult::ok(v),
        Err(e) => BoundResult::invalid(e.to_string()),
    }
}

/// Density upper bound for MMSE from the Chebyshev outage bound. A vacuous
/// bound counts as zero outage.
pub fn mmse_density_ub_chebyshev(cfg: &NetworkConfig) -> BoundResult {
    let b = match MmseChebyshev::new(cfg) {
        Ok(b) => b,
        Err(e) => return BoundResult::invalid(e.to_string()),
    };
    match density_from_bound(cfg, |l| Ok(b.outage(l).get().unwrap_or(0.0))) {
        Ok(v) => BoundResult::ok(v),
        Err(e) => BoundResult::invalid(e.to_string()),
    }
}
