//! One function per subcommand. Each reads every parameter it needs first,
//! rejects leftovers, validates, and only then runs the experiment.

use simo_core::bounds::{
    self, full_zf_density_ub, mmse_density_ub, mmse_density_ub_chebyshev, mmse_markov, mrc_density_ub,
    pzf_density_lb_chebyshev, pzf_density_lb_markov, pzf_density_ub_auto, pzf_markov, theta_star, BoundResult,
};
use simo_core::efp::{self, EfpConfig};
use simo_core::experiments::{self, Geometry};
use simo_core::{NetworkConfig, ReceiverSpec};

use crate::output::{Cell, Table};
use crate::params::{fmt_real, Params};
use crate::CliError;

/// What a command produced: the table plus extra header lines.
pub struct Artifact {
    pub table: Table,
    pub notes: Vec<String>,
}

impl Artifact {
    fn plain(table: Table) -> Self {
        Self { table, notes: Vec::new() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Outage,
    Density,
    Bounds,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig7,
    Fig8,
    Sweep,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Outage => "outage",
            Experiment::Density => "density",
            Experiment::Bounds => "bounds",
            Experiment::Fig2 => "fig2",
            Experiment::Fig3 => "fig3",
            Experiment::Fig4 => "fig4",
            Experiment::Fig5 => "fig5",
            Experiment::Fig7 => "fig7",
            Experiment::Fig8 => "fig8",
            Experiment::Sweep => "sweep",
        }
    }
}

/// Figure presets for the network parameters.
fn preset(name: &str) -> Result<NetworkConfig, CliError> {
    let base = NetworkConfig::default();
    match name {
        "default" => Ok(base),
        "fig2" => Ok(NetworkConfig { n_r: 8, ..base }),
        "fig3" => Ok(NetworkConfig { alpha: 3.0, ..base }),
        "fig4" => Ok(NetworkConfig { alpha: 4.0, ..base }),
        "fig5" => Ok(NetworkConfig {
            alpha: 3.0,
            snr: 10.0,
            n_r: 6,
            ..base
        }),
        other => Err(CliError::Config(format!(
            "unknown preset `{other}` (expected default, fig2, fig3, fig4 or fig5)"
        ))),
    }
}

fn network(p: &mut Params, base: NetworkConfig) -> Result<NetworkConfig, CliError> {
    Ok(NetworkConfig {
        d: p.f64("d", base.d)?,
        alpha: p.f64("alpha", base.alpha)?,
        snr: p.level("snr", base.snr)?,
        beta: p.level("beta", base.beta)?,
        epsilon: p.f64("epsilon", base.epsilon)?,
        n_r: p.usize("n_r", base.n_r)?,
    })
}

fn network_with_preset(p: &mut Params, default_preset: &str) -> Result<NetworkConfig, CliError> {
    let name = p.string("preset", default_preset)?;
    let base = preset(&name)?;
    network(p, base)
}

fn default_k(cfg: &NetworkConfig) -> usize {
    (theta_star(cfg.alpha) * cfg.n_r as f64).round() as usize
}

fn receiver(p: &mut Params, cfg: &NetworkConfig) -> Result<ReceiverSpec, CliError> {
    let name = p.string("receiver", "mmse")?;
    let spec = match name.as_str() {
        "mrc" => ReceiverSpec::mrc(),
        "mmse" => ReceiverSpec::mmse(),
        "full-zf" | "zf" => ReceiverSpec::full_zf(),
        "pzf" => ReceiverSpec::pzf(p.usize("k", default_k(cfg))?),
        "mmse-sample" => ReceiverSpec::sample_cov(p.usize("snapshots", 2 * cfg.n_r)?),
        other => {
            return Err(CliError::Config(format!(
                "unknown receiver `{other}` (expected mrc, pzf, full-zf, mmse or mmse-sample)"
            )))
        }
    };
    Ok(spec)
}

fn geometry(p: &mut Params) -> Result<Geometry, CliError> {
    match p.string("geometry", "poisson")?.as_str() {
        "poisson" => Ok(Geometry::Poisson),
        "grid" => Ok(Geometry::Grid),
        other => Err(CliError::Config(format!("unknown geometry `{other}` (expected poisson or grid)"))),
    }
}

fn geometry_name(g: Geometry) -> &'static str {
    match g {
        Geometry::Poisson => "poisson",
        Geometry::Grid => "grid",
    }
}

struct Run {
    trials: usize,
    seed: u64,
}

fn run_params(p: &mut Params, default_trials: u64) -> Result<Run, CliError> {
    let trials = p.u64("trials", default_trials)?;
    if trials == 0 {
        return Err(CliError::Config("trials must be positive".into()));
    }
    Ok(Run {
        trials: trials as usize,
        seed: p.u64("seed", 1)?,
    })
}

fn check(cfg: &NetworkConfig, spec: Option<&ReceiverSpec>) -> Result<(), CliError> {
    cfg.validate()?;
    if let Some(s) = spec {
        s.check(cfg.n_r)?;
    }
    Ok(())
}

pub fn run(exp: Experiment, p: &mut Params) -> Result<Artifact, CliError> {
    match exp {
        Experiment::Outage => outage(p),
        Experiment::Density => density(p),
        Experiment::Bounds => bounds_table(p),
        Experiment::Fig2 => fig2(p),
        Experiment::Fig3 => density_vs_antennas(p, "fig3"),
        Experiment::Fig4 => density_vs_antennas(p, "fig4"),
        Experiment::Fig5 => fig5(p),
        Experiment::Fig7 => fig7(p),
        Experiment::Fig8 => fig8(p),
        Experiment::Sweep => sweep(p),
    }
}

const ESTIMATE_COLUMNS: [&str; 5] = ["value", "ci_low", "ci_high", "trials", "seed"];

fn columns(prefix: &[&'static str], suffix: &[&'static str]) -> Vec<&'static str> {
    prefix.iter().chain(suffix).copied().collect()
}

fn outage(p: &mut Params) -> Result<Artifact, CliError> {
    let cfg = network_with_preset(p, "default")?;
    let lambda = p.f64("lambda", 0.05)?;
    let spec = receiver(p, &cfg)?;
    let geo = geometry(p)?;
    let run = run_params(p, 100_000)?;
    p.finish()?;
    check(&cfg, Some(&spec))?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(CliError::Config(format!("lambda must be positive, got {lambda}")));
    }
    let est = experiments::estimate_outage_in(&cfg, lambda, &spec, geo, run.trials, run.seed)?;
    let mut t = Table::new(&columns(
        &["experiment", "receiver", "geometry", "n_r", "alpha", "lambda"],
        &ESTIMATE_COLUMNS,
    ));
    t.push(vec![
        "outage".into(),
        spec.to_string().into(),
        geometry_name(geo).into(),
        cfg.n_r.into(),
        cfg.alpha.into(),
        lambda.into(),
        est.p_hat.into(),
        est.ci_low.into(),
        est.ci_high.into(),
        est.trials.into(),
        est.seed.into(),
    ]);
    Ok(Artifact::plain(t))
}

fn density(p: &mut Params) -> Result<Artifact, CliError> {
    let cfg = network_with_preset(p, "default")?;
    let spec = receiver(p, &cfg)?;
    let geo = geometry(p)?;
    let run = run_params(p, 20_000)?;
    p.finish()?;
    check(&cfg, Some(&spec))?;
    let est = experiments::max_density_in(&cfg, &spec, geo, run.trials, run.seed)?;
    let mut t = Table::new(&columns(&["experiment", "receiver", "geometry", "n_r", "alpha"], &ESTIMATE_COLUMNS));
    t.push(vec![
        "density".into(),
        spec.to_string().into(),
        geometry_name(geo).into(),
        cfg.n_r.into(),
        cfg.alpha.into(),
        est.lambda.into(),
        est.ci_low.into(),
        est.ci_high.into(),
        est.trials.into(),
        est.seed.into(),
    ]);
    Ok(Artifact::plain(t))
}

type DensityBound = fn(&NetworkConfig, usize) -> BoundResult;
type OutageBound = fn(&NetworkConfig, f64, usize) -> BoundResult;

const DENSITY_BOUNDS: [(&str, DensityBound); 7] = [
    ("pzf_density_lb_markov", pzf_density_lb_markov),
    ("pzf_density_lb_chebyshev", pzf_density_lb_chebyshev),
    ("pzf_density_ub", pzf_density_ub_auto),
    ("mmse_density_ub_chebyshev", |c, _| mmse_density_ub_chebyshev(c)),
    ("mmse_density_ub", |c, _| mmse_density_ub(c)),
    ("mrc_density_ub", |c, _| mrc_density_ub(c)),
    ("full_zf_density_ub", |c, _| full_zf_density_ub(c)),
];

const OUTAGE_BOUNDS: [(&str, OutageBound); 4] = [
    ("pzf_markov", pzf_markov),
    ("pzf_chebyshev", bounds::pzf_chebyshev),
    ("mmse_chebyshev", |c, l, _| bounds::mmse_chebyshev(c, l)),
    ("mmse_markov", |c, l, _| mmse_markov(c, l)),
];

fn bounds_table(p: &mut Params) -> Result<Artifact, CliError> {
    let cfg = network_with_preset(p, "default")?;
    let k = p.usize("k", default_k(&cfg))?;
    let lambda = p.opt_f64("lambda")?;
    let only = p.opt_string("bound");
    // Accepted for uniformity with the other subcommands.
    run_params(p, 1)?;
    p.finish()?;
    check(&cfg, None)?;
    if let Some(l) = lambda {
        if !(l > 0.0 && l.is_finite()) {
            return Err(CliError::Config(format!("lambda must be positive, got {l}")));
        }
    }
    if let Some(name) = &only {
        let known = DENSITY_BOUNDS.iter().any(|(n, _)| n == name)
            || OUTAGE_BOUNDS.iter().any(|(n, _)| n == name);
        if !known {
            return Err(CliError::Config(format!("unknown bound `{name}`")));
        }
        if lambda.is_none() && OUTAGE_BOUNDS.iter().any(|(n, _)| n == name) {
            return Err(CliError::Config(format!("bound `{name}` needs lambda")));
        }
    }
    let wanted = |name: &str| only.as_deref().is_none_or(|o| o == name);

    let mut t = Table::new(&[
        "experiment", "bound", "quantity", "n_r", "alpha", "k", "lambda", "value", "valid", "reason",
    ]);
    let mut push = |name: &str, quantity: &str, lam: Option<f64>, b: &BoundResult| -> Result<(), CliError> {
        if only.is_some() && !b.valid {
            return Err(CliError::Numerical(format!(
                "{name} is vacuous here: {}",
                b.reason.clone().unwrap_or_default()
            )));
        }
        t.push(vec![
            "bounds".into(),
            name.into(),
            quantity.into(),
            cfg.n_r.into(),
            cfg.alpha.into(),
            k.into(),
            lam.into(),
            b.get().into(),
            b.valid.into(),
            b.reason.clone().unwrap_or_default().into(),
        ]);
        Ok(())
    };
    for (name, f) in DENSITY_BOUNDS {
        if wanted(name) {
            push(name, "density", None, &f(&cfg, k))?;
        }
    }
    if let Some(l) = lambda {
        for (name, f) in OUTAGE_BOUNDS {
            if wanted(name) {
                push(name, "outage", Some(l), &f(&cfg, l, k))?;
            }
        }
    }
    Ok(Artifact::plain(t))
}

fn fig2(p: &mut Params) -> Result<Artifact, CliError> {
    let base = network(p, preset("fig2")?)?;
    let alphas = p.f64_list("alpha_list", &[2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0])?;
    let fixed = p.f64("fixed_lambda", 0.5)?;
    let run = run_params(p, 20_000)?;
    p.finish()?;
    let mut t = Table::new(&[
        "experiment", "alpha", "n_r", "lambda_mode", "lambda", "value", "approximation", "trials", "seed",
    ]);
    for &alpha in &alphas {
        let cfg = NetworkConfig { alpha, ..base };
        check(&cfg, None)?;
        let at_eps = experiments::max_density_value(&cfg, &ReceiverSpec::mmse(), Geometry::Poisson, run.trials, run.seed)?;
        for (mode, lambda) in [("epsilon", at_eps), ("fixed", fixed)] {
            let corr = experiments::mmse_correlation(&cfg, lambda, run.trials, run.seed)?;
            t.push(vec![
                "fig2".into(),
                alpha.into(),
                cfg.n_r.into(),
                mode.into(),
                lambda.into(),
                corr.into(),
                (2.0 / alpha).into(),
                run.trials.into(),
                run.seed.into(),
            ]);
        }
    }
    Ok(Artifact::plain(t))
}

fn density_vs_antennas(p: &mut Params, name: &'static str) -> Result<Artifact, CliError> {
    let base = network(p, preset(name)?)?;
    let n_list = p.usize_list("n_r_list", &[2, 4, 8, 12, 16])?;
    let run = run_params(p, 20_000)?;
    p.finish()?;
    let mut t = Table::new(&[
        "experiment", "series", "source", "n_r", "alpha", "k", "value", "ci_low", "ci_high", "valid", "trials", "seed",
    ]);
    for &n_r in &n_list {
        let cfg = NetworkConfig { n_r, ..base };
        check(&cfg, None)?;
        let k = default_k(&cfg).min(n_r.saturating_sub(1));
        let specs = [
            ("mmse", ReceiverSpec::mmse()),
            ("pzf-theta", ReceiverSpec::pzf(k)),
            ("mrc", ReceiverSpec::mrc()),
            ("full-zf", ReceiverSpec::full_zf()),
        ];
        for (series, spec) in specs {
            let est = experiments::max_density(&cfg, &spec, run.trials, run.seed)?;
            t.push(vec![
                name.into(),
                series.into(),
                "mc".into(),
                n_r.into(),
                cfg.alpha.into(),
                spec.cancel_count(n_r).into(),
                est.lambda.into(),
                est.ci_low.into(),
                est.ci_high.into(),
                true.into(),
                run.trials.into(),
                run.seed.into(),
            ]);
        }
        let bound_rows: [(&str, BoundResult); 6] = [
            ("pzf-markov-lb", pzf_density_lb_markov(&cfg, k)),
            ("pzf-chebyshev-lb", pzf_density_lb_chebyshev(&cfg, k)),
            ("mmse-chebyshev-ub", mmse_density_ub_chebyshev(&cfg)),
            ("mmse-markov-ub", mmse_density_ub(&cfg)),
            ("mrc-ub", mrc_density_ub(&cfg)),
            ("full-zf-ub", full_zf_density_ub(&cfg)),
        ];
        for (series, b) in bound_rows {
            t.push(vec![
                name.into(),
                series.into(),
                "bound".into(),
                n_r.into(),
                cfg.alpha.into(),
                k.into(),
                b.get().into(),
                Cell::Empty,
                Cell::Empty,
                b.valid.into(),
                Cell::Empty,
                Cell::Empty,
            ]);
        }
    }
    Ok(Artifact::plain(t))
}

fn fig5(p: &mut Params) -> Result<Artifact, CliError> {
    let cfg = network(p, preset("fig5")?)?;
    let ks = p.usize_list("snapshot_list", &[7, 9, 12, 20, 40, 80])?;
    let run = run_params(p, 10_000)?;
    p.finish()?;
    check(&cfg, None)?;
    for &k in &ks {
        ReceiverSpec::sample_cov(k).check(cfg.n_r)?;
    }
    let curve = experiments::csi_density_curve(&cfg, &ks, run.trials, run.seed)?;
    let mut t = Table::new(&["experiment", "series", "n_r", "alpha", "snapshots", "value", "trials", "seed"]);
    let row = |series: &str, k: Cell, v: f64| -> Vec<Cell> {
        vec![
            "fig5".into(),
            series.into(),
            cfg.n_r.into(),
            cfg.alpha.into(),
            k,
            v.into(),
            run.trials.into(),
            run.seed.into(),
        ]
    };
    t.push(row("perfect", Cell::Empty, curve.perfect));
    for pt in &curve.points {
        t.push(row("sample-cov", pt.snapshots.into(), pt.lambda));
        t.push(row("sample-cov-pilot-h0", pt.snapshots.into(), pt.lambda_noisy_h0));
        t.push(row("approximation", pt.snapshots.into(), pt.approximation));
    }
    Ok(Artifact {
        table: t,
        notes: vec![format!("pilot_snr={}", fmt_real(experiments::PILOT_SNR))],
    })
}

const P_GRID: [f64; 16] = [
    0.01, 0.015, 0.02, 0.03, 0.04, 0.05, 0.065, 0.08, 0.1, 0.125, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5,
];

fn fig7(p: &mut Params) -> Result<Artifact, CliError> {
    let base = EfpConfig {
        node_density: p.f64("node_density", 1.0)?,
        alpha: p.f64("alpha", 3.0)?,
        beta: p.level("beta", 1.0)?,
        window_scale: p.f64("window_scale", 15.0)?,
        ..EfpConfig::default()
    };
    let near_field = p.opt_usize("near_field")?;
    let n_list = p.usize_list("n_r_list", &[1, 2, 3, 4, 5, 6, 7, 8])?;
    let grid = p.f64_list("p_grid", &P_GRID)?;
    let fixed_p = p.f64("fixed_p", 0.075)?;
    let fixed_se = p.f64("fixed_se", 4.0)?;
    let run = run_params(p, 10_000)?;
    p.finish()?;
    for &q in grid.iter().chain([&fixed_p]) {
        if !(q > 0.0 && q < 1.0) {
            return Err(CliError::Config(format!("p must lie in (0, 1), got {q}")));
        }
    }
    if !(fixed_se > 0.0 && fixed_se.is_finite()) {
        return Err(CliError::Config(format!("fixed_se must be positive, got {fixed_se}")));
    }
    let mut t = Table::new(&[
        "experiment", "series", "n_r", "p", "efp", "ci_low", "ci_high", "mean_progress", "optimal", "trials", "seed",
    ]);
    for &n_r in &n_list {
        let cfg = EfpConfig {
            n_r,
            near_field: near_field.unwrap_or(EfpConfig::default_near_field(n_r)),
            ..base.clone()
        };
        cfg.validate()?;
        let curve = efp::efp_curve(&cfg, &grid, run.trials as u64, run.seed)?;
        let best = efp::best_point(&curve);
        let fixed_cfg = EfpConfig {
            beta: EfpConfig::beta_for_spectral_efficiency(fixed_se),
            ..cfg.clone()
        };
        let fixed = efp::efp_curve(&fixed_cfg, &[fixed_p], run.trials as u64, run.seed)?[0];
        for (series, pt, opt) in curve
            .iter()
            .map(|pt| ("efp", pt, pt.p == best.p))
            .chain([("fixed-rate", &fixed, false)])
        {
            t.push(vec![
                "fig7".into(),
                series.into(),
                n_r.into(),
                pt.p.into(),
                pt.efp.into(),
                pt.ci_low.into(),
                pt.ci_high.into(),
                pt.mean_progress.into(),
                opt.into(),
                run.trials.into(),
                run.seed.into(),
            ]);
        }
    }
    Ok(Artifact {
        table: t,
        notes: vec![
            "relay_receiver=mmse".into(),
            "negative_progress=counted as zero".into(),
        ],
    })
}

fn fig8(p: &mut Params) -> Result<Artifact, CliError> {
    let base = network(p, preset("default")?)?;
    let n_list = p.usize_list("n_r_list", &[1, 2, 4, 8])?;
    let run = run_params(p, 20_000)?;
    p.finish()?;
    let mut t = Table::new(&columns(&["experiment", "geometry", "n_r", "alpha"], &ESTIMATE_COLUMNS));
    for &n_r in &n_list {
        let cfg = NetworkConfig { n_r, ..base };
        check(&cfg, None)?;
        for geo in [Geometry::Poisson, Geometry::Grid] {
            let est = experiments::max_density_in(&cfg, &ReceiverSpec::mmse(), geo, run.trials, run.seed)?;
            t.push(vec![
                "fig8".into(),
                geometry_name(geo).into(),
                n_r.into(),
                cfg.alpha.into(),
                est.lambda.into(),
                est.ci_low.into(),
                est.ci_high.into(),
                est.trials.into(),
                est.seed.into(),
            ]);
        }
    }
    Ok(Artifact::plain(t))
}

const SWEEPABLE: [&str; 9] = ["d", "alpha", "snr", "beta", "epsilon", "n_r", "lambda", "k", "snapshots"];

fn sweep(p: &mut Params) -> Result<Artifact, CliError> {
    let vary = p.string("vary", "n_r")?;
    let values = p.hidden_string("values").ok_or_else(|| CliError::Config("sweep needs values=v1,v2,…".into()))?;
    let measure = p.string("measure", "density")?;
    if !SWEEPABLE.contains(&vary.as_str()) {
        return Err(CliError::Config(format!("cannot sweep `{vary}` (expected one of {})", SWEEPABLE.join(", "))));
    }
    let values: Vec<String> = values.split(',').map(|s| s.trim().to_string()).collect();
    if values.iter().any(String::is_empty) {
        return Err(CliError::Config("values must be a comma-separated list".into()));
    }
    // The base resolution documents the shared parameters; the swept key is
    // then overridden per point. Everything resolves before any work starts.
    sweep_point(p, &measure)?;
    p.record_raw(&vary, values.join(","));
    p.finish()?;
    let mut points = Vec::with_capacity(values.len());
    for v in &values {
        let mut q = p.fork();
        q.set(&vary, v);
        let point = sweep_point(&mut q, &measure)?;
        q.finish()?;
        points.push((v.clone(), point));
    }

    let mut t = Table::new(&columns(&["experiment", "vary", "x", "measure", "receiver", "geometry"], &ESTIMATE_COLUMNS));
    for (x, pt) in points {
        let (value, lo, hi) = match pt.measure {
            Measure::Outage(lambda) => {
                let e = experiments::estimate_outage_in(&pt.cfg, lambda, &pt.spec, pt.geometry, pt.run.trials, pt.run.seed)?;
                (e.p_hat, Cell::from(e.ci_low), Cell::from(e.ci_high))
            }
            Measure::Density => {
                let e = experiments::max_density_in(&pt.cfg, &pt.spec, pt.geometry, pt.run.trials, pt.run.seed)?;
                (e.lambda, e.ci_low.into(), e.ci_high.into())
            }
            Measure::Correlation(lambda) => {
                let c = experiments::mmse_correlation(&pt.cfg, lambda, pt.run.trials, pt.run.seed)?;
                (c, Cell::Empty, Cell::Empty)
            }
        };
        t.push(vec![
            "sweep".into(),
            vary.as_str().into(),
            x.into(),
            measure.as_str().into(),
            pt.spec.to_string().into(),
            geometry_name(pt.geometry).into(),
            value.into(),
            lo,
            hi,
            pt.run.trials.into(),
            pt.run.seed.into(),
        ]);
    }
    Ok(Artifact::plain(t))
}

enum Measure {
    Outage(f64),
    Density,
    Correlation(f64),
}

struct SweepPoint {
    cfg: NetworkConfig,
    spec: ReceiverSpec,
    geometry: Geometry,
    measure: Measure,
    run: Run,
}

fn sweep_point(p: &mut Params, measure: &str) -> Result<SweepPoint, CliError> {
    let cfg = network_with_preset(p, "default")?;
    let measure = match measure {
        "outage" => Measure::Outage(p.f64("lambda", 0.05)?),
        "density" => Measure::Density,
        "correlation" => Measure::Correlation(p.f64("lambda", 0.5)?),
        other => {
            return Err(CliError::Config(format!(
                "unknown measure `{other}` (expected outage, density or correlation)"
            )))
        }
    };
    let spec = match measure {
        Measure::Correlation(_) => ReceiverSpec::mmse(),
        _ => receiver(p, &cfg)?,
    };
    let geometry = match measure {
        Measure::Correlation(_) => Geometry::Poisson,
        _ => geometry(p)?,
    };
    let run = run_params(p, 20_000)?;
    check(&cfg, Some(&spec))?;
    if let Measure::Outage(l) | Measure::Correlation(l) = measure {
        if !(l > 0.0 && l.is_finite()) {
            return Err(CliError::Config(format!("lambda must be positive, got {l}")));
        }
    }
    Ok(SweepPoint {
        cfg,
        spec,
        geometry,
        measure,
        run,
    })
}
