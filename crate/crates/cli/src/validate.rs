//! Whole-config checks that report every violation at once.

use crate::config::{trig_polynomial, ExperimentConfig, ObservableSpec, TrigTerm};
use crate::error::CliError;
use birkdist_core::system::IntervalSystem;
use birkdist_core::torus::{FourierSystem, MEAN_TOL};

fn terms_have_dim(errors: &mut Vec<String>, what: &str, dim: usize, terms: &[TrigTerm]) {
    if let Err(e) = trig_polynomial(dim, terms) {
        errors.push(format!("{what}: {e}"));
    }
}

fn check_interval(cfg: &ExperimentConfig, errors: &mut Vec<String>) {
    let map = match cfg.system.interval_map() {
        Ok(m) => m,
        Err(e) => {
            errors.push(format!("system: {e}"));
            return;
        }
    };
    let phi = match cfg.observable() {
        ObservableSpec::Trig { .. } => {
            errors.push("observable: interval systems take a piecewise observable, not a trig one".into());
            None
        }
        ObservableSpec::Piecewise { .. } => match cfg.interval_observable() {
            Ok(p) => Some(p),
            Err(e) => {
                errors.push(format!("observable: {e}"));
                None
            }
        },
    };
    if let Some(phi) = phi {
        if phi.pieces().first().map(|p| p.lo) != Some(map.interval().0)
            || phi.pieces().last().map(|p| p.hi) != Some(map.interval().1)
        {
            errors.push(format!("observable: pieces must cover the map interval {:?}", map.interval()));
        }
        match IntervalSystem::build(map, &cfg.spectral) {
            Ok(sys) => {
                let tol = cfg.variance.options.orthogonality_tol;
                for (l, m) in sys.component_means(phi.function()).iter().enumerate() {
                    if m.norm() > tol {
                        errors.push(format!(
                            "observable: ∫φρ_{} dm = {:.3e} is not zero; the observable must have zero mean \
                             against every invariant density",
                            l + 1,
                            m.re
                        ));
                    }
                }
            }
            Err(e) => errors.push(format!("spectral: {e}")),
        }
    }
    if cfg.primitive.level > 24 {
        errors.push(format!("primitive.level = {} exceeds 24", cfg.primitive.level));
    }
    if cfg.zygmund.k_min > cfg.zygmund.k_max {
        errors.push("zygmund: k_min exceeds k_max".into());
    }
    if cfg.clt.scale_exponents.is_empty() {
        errors.push("clt.scale_exponents is empty".into());
    }
}

fn check_torus(cfg: &ExperimentConfig, errors: &mut Vec<String>) {
    let sys = match cfg.system.fourier_system() {
        Ok(s) => s,
        Err(e) => {
            errors.push(format!("system: {e}"));
            return;
        }
    };
    let dim = sys.dim();
    match cfg.observable() {
        ObservableSpec::Piecewise { .. } => {
            errors.push("observable: torus and circle systems take a trig observable, not a piecewise one".into())
        }
        ObservableSpec::Trig { terms } => match trig_polynomial(dim, &terms) {
            Ok(r) if r.mean().norm() > MEAN_TOL => errors.push(format!(
                "observable: ∫R dm = {:.3e} is not zero; the observable must have zero mean",
                r.mean().re
            )),
            Ok(_) => {}
            Err(e) => errors.push(format!("observable: {e}")),
        },
    }
    terms_have_dim(errors, "decay.phi", dim, &cfg.decay.phi);
    if let FourierSystem::Toral { matrix } = &sys {
        if cfg.prop_l.ps.iter().any(|p| p.len() != dim) {
            errors.push(format!("prop_l.ps: every frequency needs {dim} components"));
        }
        if cfg.prop_l.j_min > cfg.prop_l.j_max {
            errors.push("prop_l: j_min exceeds j_max".into());
        }
        terms_have_dim(errors, "advect.rho0", dim, &cfg.advect.rho0);
        terms_have_dim(errors, "advect.phi", dim, &cfg.advect.phi);
        if matrix.planar().is_some() {
            terms_have_dim(errors, "deform.w1", 2, &cfg.deform.w1);
            terms_have_dim(errors, "deform.w2", 2, &cfg.deform.w2);
            if cfg.deform.k_min > cfg.deform.k_max {
                errors.push("deform: k_min exceeds k_max".into());
            }
        }
    }
}

/// The normalized config, or every violation found.
pub fn validate(cfg: ExperimentConfig) -> Result<ExperimentConfig, CliError> {
    let cfg = cfg.normalized();
    let mut errors = Vec::new();
    if cfg.seed > i64::MAX as u64 {
        errors.push(format!("seed {} does not fit a TOML integer (at most {})", cfg.seed, i64::MAX));
    }
    if cfg.system.is_interval() {
        check_interval(&cfg, &mut errors);
    } else {
        check_torus(&cfg, &mut errors);
    }
    if errors.is_empty() {
        Ok(cfg)
    } else {
        Err(CliError::Violations(errors))
    }
}
