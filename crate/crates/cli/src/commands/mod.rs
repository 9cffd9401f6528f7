//! Experiment commands behind one trait, looked up by name.

mod interval;
mod torus;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::Artifacts;

pub trait Command: Send + Sync {
    fn name(&self) -> &'static str;
    fn about(&self) -> &'static str;
    /// Runs the pipeline and returns everything it would write.
    fn run(&self, cfg: &ExperimentConfig) -> Result<Artifacts, CliError>;
}

type RunFn = fn(&ExperimentConfig) -> Result<Artifacts, CliError>;

struct FnCommand {
    name: &'static str,
    about: &'static str,
    run: RunFn,
}

impl Command for FnCommand {
    fn name(&self) -> &'static str {
        self.name
    }

    fn about(&self) -> &'static str {
        self.about
    }

    fn run(&self, cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
        (self.run)(cfg)
    }
}

pub struct CommandRegistry {
    commands: Vec<Box<dyn Command>>,
}

impl Default for CommandRegistry {
    fn default() -> Self {
        let builtin: [(&'static str, &'static str, RunFn); 13] = [
            ("spectrum", "Peripheral spectrum, ergodic components and invariant densities", interval::spectrum),
            ("primitive", "Primitive ψ of the Birkhoff sum on a dyadic grid", interval::primitive),
            ("variance", "Green–Kubo asymptotic variance, optionally with Monte Carlo", interval::variance),
            ("coboundary", "Coboundary decision and recovery of the transfer function", interval::coboundary),
            ("obstructions", "Birkhoff sums over periodic cycles", interval::obstructions),
            ("clt-modulus", "Normal approximation of the modulus of continuity of ψ", interval::clt_modulus),
            ("zygmund", "Second differences of ψ at a probe point", interval::zygmund),
            ("bv-test", "Variation of ψ on nested dyadic grids", interval::bv_test),
            ("anosov-blocks", "Dyadic block sups of the Birkhoff sum on the torus or circle", torus::anosov_blocks),
            ("prop-l", "Annulus crossing counts of dual frequency orbits", torus::prop_l),
            ("advect", "Charge advection Q_j under the transfer operator", torus::advect),
            ("deform", "Infinitesimal deformation α solving α∘M − Mα = W", torus::deform),
            ("decay-fit", "Correlation decay and the block bound it implies", torus::decay_fit),
        ];
        let mut r = CommandRegistry { commands: Vec::new() };
        for (name, about, run) in builtin {
            r.register(Box::new(FnCommand { name, about, run }));
        }
        r
    }
}

impl CommandRegistry {
    pub fn empty() -> Self {
        CommandRegistry { commands: Vec::new() }
    }

    /// Replaces any command of the same name.
    pub fn register(&mut self, command: Box<dyn Command>) {
        self.commands.retain(|c| c.name() != command.name());
        self.commands.push(command);
    }

    pub fn get(&self, name: &str) -> Result<&dyn Command, CliError> {
        self.commands.iter().find(|c| c.name() == name).map(|c| c.as_ref()).ok_or_else(|| {
            CliError::Config(format!("unknown command `{name}`; known: {}", self.names().join(", ")))
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.commands.iter().map(|c| c.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Command> {
        self.commands.iter().map(|c| c.as_ref())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Echo;

    impl Command for Echo {
        fn name(&self) -> &'static str {
            "spectrum"
        }

        fn about(&self) -> &'static str {
            "echo"
        }

        fn run(&self, cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
            let mut a = Artifacts::default();
            a.verdict("seed", cfg.seed);
            Ok(a)
        }
    }

    #[test]
    fn registry_lists_and_replaces() {
        let mut r = CommandRegistry::default();
        assert_eq!(r.names().len(), 13);
        assert!(r.get("nope").is_err());
        r.register(Box::new(Echo));
        assert_eq!(r.names().len(), 13);
        let a = r.get("spectrum").unwrap().run(&ExperimentConfig::default()).unwrap();
        assert_eq!(a.verdicts["seed"], serde_json::json!(0x5eed));
    }
}
