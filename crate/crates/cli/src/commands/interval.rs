use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{float, Artifacts, Table};
use birkdist_core::birkhoff::{Birkhoff, BirkhoffOptions, RouteRegistry};
use birkdist_core::regularity::{
    bv_test as bv_report, clt_modulus as clt_report, dyadic_scales, log_lipschitz_ratio, zygmund_profile, PrimitiveGrid,
};
use birkdist_core::system::IntervalSystem;
use birkdist_core::variance::{coboundary_solve, monte_carlo_sigma2, obstruction_scan, variance_report, MonteCarloOptions};
use serde_json::json;

fn system(cfg: &ExperimentConfig) -> Result<IntervalSystem, CliError> {
    Ok(IntervalSystem::build(cfg.system.interval_map()?, &cfg.spectral)?)
}

fn birkhoff<'a>(sys: &'a IntervalSystem, cfg: &ExperimentConfig, route: &str) -> Result<Birkhoff<'a>, CliError> {
    let phi = cfg.interval_observable()?;
    let opts = BirkhoffOptions { route: route.into(), tol: cfg.primitive.tol, ..Default::default() };
    Ok(Birkhoff::new(sys, phi.function(), &RouteRegistry::default(), &opts)?)
}

/// Schema: `spectrum.json` {map, bins, eigenvalues [[re, im]], period,
/// components, basin_masses, supports, lasota_yorke, tail, residuals};
/// `densities.csv` (x, rho_1, …, rho_E).
pub fn spectrum(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let sys = system(cfg)?;
    let spec = sys.decomposition().spectrum();
    let erg = sys.ergodic();
    let eigenvalues: Vec<[f64; 2]> = spec.values().iter().map(|z| [z.re, z.im]).collect();
    let tail = sys.decomposition().tail();
    let mut a = Artifacts::default();
    a.json(
        "spectrum.json",
        &json!({
            "map": sys.map().name(),
            "bins": sys.ulam().bin_count(),
            "eigenvalues": eigenvalues,
            "period": sys.period(),
            "components": erg.count(),
            "basin_masses": erg.basin_masses(),
            "supports": erg.components.iter().map(|c| c.support.clone()).collect::<Vec<_>>(),
            "lasota_yorke": sys.lasota_yorke(),
            "tail": {"rate": tail.rate, "constant": tail.constant},
            "residuals": sys.decomposition().residuals(),
        }),
    )?;
    let mut header = vec!["x".to_string()];
    header.extend((1..=erg.count()).map(|l| format!("rho_{l}")));
    let mut t = Table::with_header(header);
    for i in 0..sys.ulam().bin_count() {
        let mut row = vec![float(sys.ulam().bin_center(i))];
        row.extend(erg.components.iter().map(|c| float(c.density[i])));
        t.row(row);
    }
    a.csv("densities.csv", &t)?;
    a.verdict("eigenvalues", eigenvalues);
    a.verdict("period", sys.period());
    a.verdict("components", erg.count());
    Ok(a)
}

/// Schema: `primitive.csv` (x, psi, tail_bound, i0) on `2^level + 1` points;
/// `primitive.json` {route, block_length, points, max_tail_bound}.
pub fn primitive(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let sys = system(cfg)?;
    let b = birkhoff(&sys, cfg, &cfg.primitive.route)?;
    let (lo, hi) = sys.interval();
    let n = 1usize << cfg.primitive.level;
    let xs: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let evals = b.primitive_grid(&xs)?;
    let mut t = Table::new(&["x", "psi", "tail_bound", "i0"]);
    for e in &evals {
        t.row(vec![float(e.x), float(e.value.re), float(e.tail_bound), e.i0.to_string()]);
    }
    let worst = evals.iter().map(|e| e.tail_bound).fold(0.0, f64::max);
    let mut a = Artifacts::default();
    a.csv("primitive.csv", &t)?;
    a.json(
        "primitive.json",
        &json!({"route": b.route_name(), "block_length": b.block_length(), "points": xs.len(), "max_tail_bound": worst}),
    )?;
    a.verdict("route", b.route_name());
    a.verdict("max_tail_bound", worst);
    Ok(a)
}

/// Schema: `variance.json`, the full report with per-component ledgers and,
/// when enabled, the Monte Carlo estimate.
pub fn variance(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let sys = system(cfg)?;
    let phi = cfg.interval_observable()?;
    let mut r = variance_report(&sys, phi.function(), &cfg.variance.options)?;
    let mc = &cfg.variance.monte_carlo;
    if mc.enabled {
        let opts = MonteCarloOptions { samples: mc.samples, horizon: mc.horizon, seed: cfg.seed };
        r.monte_carlo = Some(monte_carlo_sigma2(sys.map(), phi.function(), &opts)?);
    }
    let mut a = Artifacts::default();
    a.json("variance.json", &r)?;
    a.verdict("sigma2_m", r.sigma2_m);
    a.verdict("component_sigma2", r.components.iter().map(|c| c.sigma2).collect::<Vec<_>>());
    a.verdict("identity_residual", r.identity_residual);
    if let Some(e) = &r.monte_carlo {
        a.verdict("monte_carlo", [e.mean, e.half_width()]);
    }
    Ok(a)
}

/// Schema: `coboundary.json` {verdict, sigma2_m}; `transfer_function.csv`
/// (x, g), empty unless a coboundary.
pub fn coboundary(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let sys = system(cfg)?;
    let phi = cfg.interval_observable()?;
    let r = coboundary_solve(&sys, phi.function(), &cfg.coboundary)?;
    let mut t = Table::new(&["x", "g"]);
    for (x, g) in r.grid.iter().zip(&r.g) {
        t.row(vec![float(*x), float(*g)]);
    }
    let mut a = Artifacts::default();
    a.json("coboundary.json", &json!({"verdict": r.verdict, "sigma2_m": r.sigma2_m}))?;
    a.csv("transfer_function.csv", &t)?;
    a.verdict("coboundary", r.is_coboundary());
    a.verdict("sigma2_m", r.sigma2_m);
    Ok(a)
}

/// Schema: `obstructions.csv` (period, point, side, component, multiplier,
/// sum, flagged), one row per cycle.
pub fn obstructions(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let sys = system(cfg)?;
    let phi = cfg.interval_observable()?;
    let records = obstruction_scan(&sys, &phi, cfg.obstructions.period_max)?;
    let mut t = Table::new(&["period", "point", "side", "component", "multiplier", "sum", "flagged"]);
    for r in &records {
        t.row(vec![
            r.orbit.period.to_string(),
            float(r.orbit.point.position),
            r.orbit.point.side.symbol().to_string(),
            r.component.to_string(),
            float(r.orbit.multiplier),
            float(r.sum),
            r.flagged.to_string(),
        ]);
    }
    let mut a = Artifacts::default();
    a.csv("obstructions.csv", &t)?;
    a.verdict("cycles", records.len());
    a.verdict("flagged", records.iter().filter(|r| r.flagged).count());
    a.verdict("max_abs_sum", records.iter().map(|r| r.sum.abs()).fold(0.0, f64::max));
    Ok(a)
}

/// Schema: `clt.csv` (h, ks); `clt_samples.csv` (h, x, z); `clt.json`
/// {component, sigma2, lyapunov, levels}.
pub fn clt_modulus(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let sys = system(cfg)?;
    let phi = cfg.interval_observable()?;
    let p = &cfg.clt;
    let hs: Vec<f64> = p.scale_exponents.iter().map(|&k| (-(k as f64)).exp2()).collect();
    let r = clt_report(&sys, phi.function(), p.component, &hs, &p.options(cfg.seed))?;
    let mut levels = Table::new(&["h", "ks"]);
    let mut samples = Table::new(&["h", "x", "z"]);
    for l in &r.levels {
        levels.row(vec![float(l.h), float(l.ks)]);
        for s in &l.samples {
            samples.row(vec![float(s.h), float(s.x), float(s.z)]);
        }
    }
    let ks: Vec<f64> = r.levels.iter().map(|l| l.ks).collect();
    let mut a = Artifacts::default();
    a.csv("clt.csv", &levels)?;
    a.csv("clt_samples.csv", &samples)?;
    a.json(
        "clt.json",
        &json!({
            "component": r.component,
            "sigma2": r.sigma2,
            "lyapunov": r.lyapunov,
            "levels": r.levels.iter().map(|l| json!({"h": l.h, "ks": l.ks})).collect::<Vec<_>>(),
        }),
    )?;
    a.verdict("ks", ks);
    Ok(a)
}

/// Schema: `zygmund.csv` (h, second_difference); `zygmund.json` {probe, fit,
/// slope_ci, predicted, zygmund}.
pub fn zygmund(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let sys = system(cfg)?;
    let z = &cfg.zygmund;
    let b = birkhoff(&sys, cfg, &z.route)?;
    let p = zygmund_profile(&b, z.probe, &dyadic_scales(z.k_min, z.k_max))?;
    let mut t = Table::new(&["h", "second_difference"]);
    for (h, d) in p.scales.iter().zip(&p.second_differences) {
        t.row(vec![float(*h), float(*d)]);
    }
    let mut a = Artifacts::default();
    a.csv("zygmund.csv", &t)?;
    a.json(
        "zygmund.json",
        &json!({
            "probe": p.probe,
            "fit": p.fit,
            "slope_ci": p.fit.slope_ci(),
            "predicted": p.predicted,
            "zygmund": p.zygmund,
        }),
    )?;
    a.verdict("zygmund", p.zygmund);
    a.verdict("slope", p.fit.slope);
    Ok(a)
}

/// Schema: `bv.csv` (h, variation); `bv.json` {verdict, levels,
/// log_lipschitz}.
pub fn bv_test(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let sys = system(cfg)?;
    let b = birkhoff(&sys, cfg, &cfg.bv.route)?;
    let grid = PrimitiveGrid::sample(&b, cfg.bv.level)?;
    let r = bv_report(&grid);
    let ll = log_lipschitz_ratio(&grid);
    let mut t = Table::new(&["h", "variation"]);
    for l in &r.levels {
        t.row(vec![float(l.h), float(l.variation)]);
    }
    let mut a = Artifacts::default();
    a.csv("bv.csv", &t)?;
    a.json("bv.json", &json!({"verdict": r.verdict, "levels": r.levels, "log_lipschitz": ll}))?;
    a.verdict("bv", r.verdict.as_str());
    a.verdict("log_lipschitz_stable", ll.stable);
    Ok(a)
}
