//! The TOML experiment description and the builders that turn it into core
//! objects.

use crate::error::CliError;
use birkdist_core::dynamics::{Branch, ObservablePiece, ObservableTerm, PiecewiseMap, PiecewiseObservable};
use birkdist_core::regularity::CltOptions;
use birkdist_core::torus::{BesovOptions, Direction, FourierSystem, HyperbolicMatrix, TrigPolynomial};
use birkdist_core::transfer::SpectralOptions;
use birkdist_core::variance::{CoboundaryOptions, VarianceOptions};
use birkdist_core::C64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const DEFAULT_SEED: u64 = 0x5eed;
pub const DEFAULT_OUT: &str = "birkdist-out";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SystemSpec {
    Doubling,
    Swap4,
    TwoComponent,
    PerturbedDoubling { eps: f64 },
    Multiply { k: u32 },
    Map { name: String, branches: Vec<Branch> },
    Cat,
    Matrix { rows: Vec<Vec<i64>> },
    Circle { multiplier: u32 },
}

/// `cos·cos(2πk·x) + sin·sin(2πk·x)`; at `k = 0` only `cos` counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub k: Vec<i64>,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

impl TrigTerm {
    fn cos(k: Vec<i64>) -> Self {
        TrigTerm { k, cos: 1.0, sin: 0.0 }
    }

    fn sin(k: Vec<i64>) -> Self {
        TrigTerm { k, cos: 0.0, sin: 1.0 }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ObservableSpec {
    Piecewise {
        #[serde(default = "one")]
        holder_exponent: f64,
        pieces: Vec<ObservablePiece>,
    },
    Trig { terms: Vec<TrigTerm> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PrimitiveParams {
    pub route: String,
    /// The grid has `2^level + 1` points.
    pub level: u32,
    pub tol: f64,
}

impl Default for PrimitiveParams {
    fn default() -> Self {
        PrimitiveParams { route: "auto".into(), level: 8, tol: 1e-8 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MonteCarloParams {
    pub enabled: bool,
    pub samples: usize,
    pub horizon: usize,
}

impl Default for MonteCarloParams {
    fn default() -> Self {
        MonteCarloParams { enabled: false, samples: 100_000, horizon: 1000 }
    }
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct VarianceParams {
    pub options: VarianceOptions,
    pub monte_carlo: MonteCarloParams,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ObstructionParams {
    pub period_max: usize,
}

impl Default for ObstructionParams {
    fn default() -> Self {
        ObstructionParams { period_max: 6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CltParams {
    pub component: usize,
    /// Scales `h = 2^{−k}`.
    pub scale_exponents: Vec<i32>,
    pub samples: usize,
    pub rel_tol: f64,
    pub sigma2_floor: f64,
    pub route: String,
    pub variance: VarianceOptions,
}

impl Default for CltParams {
    fn default() -> Self {
        let o = CltOptions::default();
        CltParams {
            component: 0,
            scale_exponents: vec![15, 20, 25],
            samples: o.samples,
            rel_tol: o.rel_tol,
            sigma2_floor: o.sigma2_floor,
            route: o.route,
            variance: o.variance,
        }
    }
}

impl CltParams {
    pub fn options(&self, seed: u64) -> CltOptions {
        CltOptions {
            samples: self.samples,
            seed,
            rel_tol: self.rel_tol,
            sigma2_floor: self.sigma2_floor,
            route: self.route.clone(),
            variance: self.variance.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ZygmundParams {
    pub route: String,
    pub probe: f64,
    /// Scales `2^{−k_min}, …, 2^{−k_max}`.
    pub k_min: i32,
    pub k_max: i32,
}

impl Default for ZygmundParams {
    fn default() -> Self {
        ZygmundParams { route: "auto".into(), probe: 0.5, k_min: 8, k_max: 24 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BvParams {
    pub route: String,
    pub level: u32,
}

impl Default for BvParams {
    fn default() -> Self {
        BvParams { route: "auto".into(), level: 12 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BlockParams {
    pub direction: Direction,
    pub j_max: usize,
    pub level_max: u32,
    pub besov: BesovOptions,
}

impl Default for BlockParams {
    fn default() -> Self {
        BlockParams { direction: Direction::Alpha, j_max: 45, level_max: 40, besov: BesovOptions::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PropLParams {
    pub ps: Vec<Vec<i64>>,
    pub level_max: i32,
    pub j_min: i64,
    pub j_max: i64,
}

impl Default for PropLParams {
    fn default() -> Self {
        PropLParams { ps: vec![vec![1, 0], vec![1, 1], vec![2, 3], vec![5, -7]], level_max: 40, j_min: -30, j_max: 30 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdvectParams {
    pub rho0: Vec<TrigTerm>,
    pub phi: Vec<TrigTerm>,
    pub j_max: usize,
}

impl Default for AdvectParams {
    fn default() -> Self {
        AdvectParams { rho0: Vec::new(), phi: vec![TrigTerm::cos(vec![0, 1])], j_max: 50 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DeformParams {
    pub w1: Vec<TrigTerm>,
    pub w2: Vec<TrigTerm>,
    /// Points per axis of the sampled field.
    pub grid: usize,
    pub k_min: i32,
    pub k_max: i32,
    pub tol: f64,
}

impl Default for DeformParams {
    fn default() -> Self {
        DeformParams { w1: vec![TrigTerm::sin(vec![0, 1])], w2: Vec::new(), grid: 16, k_min: 4, k_max: 24, tol: 1e-14 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DecayParams {
    /// Test function; the observable itself when empty.
    pub phi: Vec<TrigTerm>,
    pub j_max: usize,
    /// Block profile compared against the implied bound; `0` skips it.
    pub level_max: u32,
}

impl Default for DecayParams {
    fn default() -> Self {
        DecayParams { phi: Vec::new(), j_max: 40, level_max: 30 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Worker threads; `0` uses every core.
    pub threads: usize,
    pub out: String,
    pub system: SystemSpec,
    /// A default matching the system is filled in on normalization.
    pub observable: Option<ObservableSpec>,
    pub spectral: SpectralOptions,
    pub primitive: PrimitiveParams,
    pub variance: VarianceParams,
    pub coboundary: CoboundaryOptions,
    pub obstructions: ObstructionParams,
    pub clt: CltParams,
    pub zygmund: ZygmundParams,
    pub bv: BvParams,
    pub blocks: BlockParams,
    pub prop_l: PropLParams,
    pub advect: AdvectParams,
    pub deform: DeformParams,
    pub decay: DecayParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: DEFAULT_SEED,
            threads: 0,
            out: DEFAULT_OUT.into(),
            system: SystemSpec::Doubling,
            observable: None,
            spectral: SpectralOptions::default(),
            primitive: PrimitiveParams::default(),
            variance: VarianceParams::default(),
            coboundary: CoboundaryOptions::default(),
            obstructions: ObstructionParams::default(),
            clt: CltParams::default(),
            zygmund: ZygmundParams::default(),
            bv: BvParams::default(),
            blocks: BlockParams::default(),
            prop_l: PropLParams::default(),
            advect: AdvectParams::default(),
            deform: DeformParams::default(),
            decay: DecayParams::default(),
        }
    }
}

impl SystemSpec {
    pub fn is_interval(&self) -> bool {
        !matches!(self, SystemSpec::Cat | SystemSpec::Matrix { .. } | SystemSpec::Circle { .. })
    }

    pub fn dim(&self) -> usize {
        match self {
            SystemSpec::Cat => 2,
            SystemSpec::Matrix { rows } => rows.len(),
            _ => 1,
        }
    }

    pub fn interval_map(&self) -> Result<PiecewiseMap, CliError> {
        Ok(match self {
            SystemSpec::Doubling => PiecewiseMap::doubling(),
            SystemSpec::Swap4 => PiecewiseMap::swap4(),
            SystemSpec::TwoComponent => PiecewiseMap::two_component(),
            SystemSpec::PerturbedDoubling { eps } => PiecewiseMap::perturbed_doubling(*eps)?,
            SystemSpec::Multiply { k } => PiecewiseMap::multiply(*k)?,
            SystemSpec::Map { name, branches } => PiecewiseMap::new(name.clone(), branches.clone())?,
            _ => return Err(CliError::Config(format!("{} is not an interval map", self.label()))),
        })
    }

    pub fn fourier_system(&self) -> Result<FourierSystem, CliError> {
        Ok(match self {
            SystemSpec::Cat => FourierSystem::cat(),
            SystemSpec::Matrix { rows } => FourierSystem::Toral { matrix: HyperbolicMatrix::new(rows)? },
            SystemSpec::Circle { multiplier } => FourierSystem::circle(*multiplier)?,
            _ => return Err(CliError::Config(format!("{} is not a torus or circle system", self.label()))),
        })
    }

    pub fn matrix(&self) -> Result<HyperbolicMatrix, CliError> {
        match self.fourier_system()? {
            FourierSystem::Toral { matrix } => Ok(matrix),
            FourierSystem::Circle { .. } => Err(CliError::Config("the circle map has no toral matrix".into())),
        }
    }

    pub fn label(&self) -> String {
        match self {
            SystemSpec::Doubling => "doubling".into(),
            SystemSpec::Swap4 => "swap4".into(),
            SystemSpec::TwoComponent => "two-component".into(),
            SystemSpec::PerturbedDoubling { eps } => format!("perturbed-doubling(eps = {eps})"),
            SystemSpec::Multiply { k } => format!("multiply({k})"),
            SystemSpec::Map { name, .. } => format!("map `{name}`"),
            SystemSpec::Cat => "cat".into(),
            SystemSpec::Matrix { rows } => format!("matrix {rows:?}"),
            SystemSpec::Circle { multiplier } => format!("circle(×{multiplier})"),
        }
    }

    fn default_observable(&self) -> ObservableSpec {
        if self.is_interval() {
            let (lo, hi) = self.interval_map().map(|m| m.interval()).unwrap_or((0.0, 1.0));
            ObservableSpec::Piecewise {
                holder_exponent: 1.0,
                pieces: vec![ObservablePiece {
                    lo,
                    hi,
                    terms: vec![ObservableTerm::Cos { coef: 1.0, freq: 1.0, phase: 0.0 }],
                }],
            }
        } else {
            ObservableSpec::Trig { terms: vec![TrigTerm::cos(vec![1; self.dim()])] }
        }
    }
}

pub fn trig_polynomial(dim: usize, terms: &[TrigTerm]) -> Result<TrigPolynomial, CliError> {
    let mut p = TrigPolynomial::zero(dim);
    for t in terms {
        if t.k.len() != dim {
            return Err(CliError::Config(format!("frequency {:?} does not have {dim} components", t.k)));
        }
        let k: Vec<i128> = t.k.iter().map(|&v| v as i128).collect();
        let part = if k.iter().all(|&v| v == 0) {
            TrigPolynomial::constant(dim, t.cos)
        } else {
            TrigPolynomial::cos(&k, t.cos).plus(&TrigPolynomial::sin(&k, t.sin))?
        };
        p = p.plus(&part)?;
    }
    let zero = C64::new(0.0, 0.0);
    let kept: Vec<_> = p.terms().filter(|(_, c)| **c != zero).map(|(k, c)| (k.clone(), *c)).collect();
    Ok(TrigPolynomial::from_terms(dim, kept)?)
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Fills the observable default so that the serialized form is complete.
    pub fn normalized(mut self) -> Self {
        if self.observable.is_none() {
            self.observable = Some(self.system.default_observable());
        }
        self
    }

    /// Normalized TOML with the output directory and thread count reset,
    /// since neither changes results.
    pub fn canonical_toml(&self) -> Result<String, CliError> {
        let mut c = self.clone().normalized();
        c.out = DEFAULT_OUT.into();
        c.threads = 0;
        c.to_toml()
    }

    /// SHA-256 of [`canonical_toml`](Self::canonical_toml).
    pub fn hash(&self) -> Result<String, CliError> {
        Ok(hex::encode(Sha256::digest(self.canonical_toml()?.as_bytes())))
    }

    pub fn observable(&self) -> ObservableSpec {
        self.observable.clone().unwrap_or_else(|| self.system.default_observable())
    }

    pub fn interval_observable(&self) -> Result<PiecewiseObservable, CliError> {
        match self.observable() {
            ObservableSpec::Piecewise { holder_exponent, pieces } => Ok(PiecewiseObservable::new(pieces, holder_exponent)?),
            ObservableSpec::Trig { .. } => {
                Err(CliError::Config("interval systems take a piecewise observable, not a trig one".into()))
            }
        }
    }

    pub fn trig_observable(&self) -> Result<TrigPolynomial, CliError> {
        match self.observable() {
            ObservableSpec::Trig { terms } => trig_polynomial(self.system.dim(), &terms),
            ObservableSpec::Piecewise { .. } => {
                Err(CliError::Config("torus and circle systems take a trig observable, not a piecewise one".into()))
            }
        }
    }
}
