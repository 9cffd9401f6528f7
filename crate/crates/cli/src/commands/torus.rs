use crate::config::{trig_polynomial, ExperimentConfig};
use crate::error::CliError;
use crate::output::{float, Artifacts, Table};
use birkdist_core::regularity::dyadic_scales;
use birkdist_core::torus::{
    advect as advect_report, besov_profile, birkhoff_fourier, correlation_decay_fit, crossing_table,
    deformation_second_differences, DeformationField, Direction, TrigPolynomial,
};
use serde_json::json;

/// Schema: `blocks.csv` (level, sup, frequencies, rank, grid_points,
/// exhaustive); `blocks.json` {provenance, terms, profile}.
pub fn anosov_blocks(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let sys = cfg.system.fourier_system()?;
    let r = cfg.trig_observable()?;
    let b = &cfg.blocks;
    let u = birkhoff_fourier(&sys, &r, b.direction, b.j_max)?;
    let p = besov_profile(&u, b.level_max, &b.besov)?;
    let mut t = Table::new(&["level", "sup", "frequencies", "rank", "grid_points", "exhaustive"]);
    for k in &p.blocks {
        t.row(vec![
            k.level.to_string(),
            float(k.sup),
            k.frequencies.to_string(),
            k.rank.to_string(),
            k.grid_points.to_string(),
            k.exhaustive.to_string(),
        ]);
    }
    let top = p.blocks.iter().map(|k| k.sup).fold(0.0, f64::max);
    let mut a = Artifacts::default();
    a.csv("blocks.csv", &t)?;
    a.json("blocks.json", &json!({"provenance": u.provenance, "terms": u.terms.len(), "profile": p}))?;
    a.verdict("class", p.class);
    a.verdict("growth_exponent", p.growth_exponent);
    a.verdict("max_sup", top);
    Ok(a)
}

/// Schema: `crossings.csv` (p, level, count) with `p` space separated;
/// `crossings.json`, the full table.
pub fn prop_l(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let m = cfg.system.matrix()?;
    let p = &cfg.prop_l;
    let table = crossing_table(&m, &p.ps, p.level_max, (p.j_min, p.j_max))?;
    let mut t = Table::new(&["p", "level", "count"]);
    for e in &table.entries {
        let key: Vec<String> = e.p.iter().map(|v| v.to_string()).collect();
        t.row(vec![key.join(" "), e.level.to_string(), e.count.to_string()]);
    }
    let mut a = Artifacts::default();
    a.csv("crossings.csv", &t)?;
    a.json("crossings.json", &table)?;
    a.verdict("max", table.max);
    Ok(a)
}

/// Schema: `advect.csv` (j, q_re, q_im, charge_re, charge_im);
/// `advect.json` {stabilized_from, limit}.
pub fn advect(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let m = cfg.system.matrix()?;
    let r = cfg.trig_observable()?;
    let p = &cfg.advect;
    let rho0 = trig_polynomial(m.dim(), &p.rho0)?;
    let phi = trig_polynomial(m.dim(), &p.phi)?;
    let rep = advect_report(&m, &r, &rho0, &phi, p.j_max)?;
    let mut t = Table::new(&["j", "q_re", "q_im", "charge_re", "charge_im"]);
    for s in &rep.steps {
        t.row(vec![s.j.to_string(), float(s.q.re), float(s.q.im), float(s.charge.re), float(s.charge.im)]);
    }
    let drift = rep.steps.iter().map(|s| (s.charge - rep.steps[0].charge).norm()).fold(0.0, f64::max);
    let mut a = Artifacts::default();
    a.csv("advect.csv", &t)?;
    a.json("advect.json", &json!({"stabilized_from": rep.stabilized_from, "limit": rep.limit}))?;
    a.verdict("limit", rep.limit);
    a.verdict("charge_drift", drift);
    Ok(a)
}

/// Schema: `deformation.csv` (x, y, alpha_1, alpha_2, tail_bound) on a
/// square grid; `second_differences.csv` (h, max_ratio); `deform.json`
/// {bounded, levels}.
pub fn deform(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let m = cfg.system.matrix()?;
    let p = &cfg.deform;
    let w = [trig_polynomial(2, &p.w1)?, trig_polynomial(2, &p.w2)?];
    let field = DeformationField::new(&m, &w, p.tol)?;
    let n = p.grid.max(1);
    let mut grid = Table::new(&["x", "y", "alpha_1", "alpha_2", "tail_bound"]);
    for i in 0..n {
        for j in 0..n {
            let x = [i as f64 / n as f64, j as f64 / n as f64];
            let d = field.eval(x)?;
            grid.row(vec![float(x[0]), float(x[1]), float(d.alpha[0]), float(d.alpha[1]), float(d.tail_bound)]);
        }
    }
    let scan = deformation_second_differences(&m, &w, &dyadic_scales(p.k_min, p.k_max), p.tol)?;
    let mut sd = Table::new(&["h", "max_ratio"]);
    for l in &scan.levels {
        sd.row(vec![float(l.h), float(l.max_ratio)]);
    }
    let mut a = Artifacts::default();
    a.csv("deformation.csv", &grid)?;
    a.csv("second_differences.csv", &sd)?;
    a.json("deform.json", &scan)?;
    a.verdict("bounded", scan.bounded);
    a.verdict("max_ratio", scan.levels.iter().map(|l| l.max_ratio).fold(0.0, f64::max));
    Ok(a)
}

/// Schema: `correlations.csv` (j, re, im, abs); `decay.json`, the fit.
pub fn decay_fit(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    let sys = cfg.system.fourier_system()?;
    let r = cfg.trig_observable()?;
    let p = &cfg.decay;
    let phi: TrigPolynomial = if p.phi.is_empty() { r.clone() } else { trig_polynomial(sys.dim(), &p.phi)? };
    let profile = if p.level_max > 0 {
        let u = birkhoff_fourier(&sys, &r, Direction::Alpha, cfg.blocks.j_max)?;
        Some(besov_profile(&u, p.level_max, &cfg.blocks.besov)?)
    } else {
        None
    };
    let fit = correlation_decay_fit(&sys, &r, &phi, p.j_max, profile.as_ref())?;
    let mut t = Table::new(&["j", "re", "im", "abs"]);
    for (j, c) in fit.correlations.iter().enumerate() {
        t.row(vec![j.to_string(), float(c.re), float(c.im), float(c.norm())]);
    }
    let mut a = Artifacts::default();
    a.csv("correlations.csv", &t)?;
    a.json("decay.json", &fit)?;
    a.verdict("verdict", fit.verdict);
    a.verdict("c2", fit.c2);
    a.verdict("c3", fit.c3);
    a.verdict("block_check", fit.block_check);
    Ok(a)
}
