use pbq::blocks::{add_encodings, build_be_one_body, build_be_two_body, schedules_for, AngleMode, BlockEncoding, BuildOptions, Combiner};
use pbq::circuit::{count_resources, CostModel, FredkinRule, ResourceReport, ToffoliRule};
use pbq::encoding::Ordering;
use pbq::factorize::{decompose_blocks, double_factorize_tensor, FactorMode, OneBodyFactors, TwoBodyFactors};
use pbq::pbham::{assemble, build_dense_normal_ordered, load_integrals, DenseOperator, IntegralSet, PBHamiltonian};
use pbq::simulate::{verify_block_encoding, VerificationReport};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};

/// Pipeline stage an error came from; the discriminant is the exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Verify = 1,
    Usage = 2,
    Parse = 3,
    Validate = 4,
    Factorize = 5,
    Encode = 6,
    Resource = 7,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Verify => "verify",
            Stage::Usage => "usage",
            Stage::Parse => "parse",
            Stage::Validate => "validate",
            Stage::Factorize => "factorize",
            Stage::Encode => "encode",
            Stage::Resource => "resource",
        }
    }
}

#[derive(Debug)]
pub struct StageError {
    pub stage: Stage,
    pub message: String,
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.stage.name(), self.message)
    }
}

impl std::error::Error for StageError {}

pub type StageResult<T> = std::result::Result<T, StageError>;

/// Tags a library error with `stage`; resource limits always map to [`Stage::Resource`]
/// and validation failures to [`Stage::Validate`].
pub fn tag(stage: Stage) -> impl Fn(pbq::Error) -> StageError {
    move |e| {
        let stage = match &e {
            pbq::Error::ResourceLimit(_) => Stage::Resource,
            pbq::Error::Format { .. } | pbq::Error::Io(_) => Stage::Parse,
            pbq::Error::Validation(_) if stage == Stage::Parse => Stage::Validate,
            _ => stage,
        };
        StageError { stage, message: e.to_string() }
    }
}

pub fn usage(msg: impl Into<String>) -> StageError {
    StageError { stage: Stage::Usage, message: msg.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum LayoutArg {
    Om,
    Sm,
}

impl From<LayoutArg> for Ordering {
    fn from(l: LayoutArg) -> Self {
        match l {
            LayoutArg::Om => Ordering::Om,
            LayoutArg::Sm => Ordering::Sm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Exact,
    Discrete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ToffoliArg {
    #[value(name = "7t")]
    #[serde(rename = "7t")]
    Exact7T,
    #[value(name = "4t-ancilla")]
    #[serde(rename = "4t-ancilla")]
    Ancilla4T,
    #[value(name = "4t-conditional")]
    #[serde(rename = "4t-conditional")]
    Conditional4T,
}

/// Everything a pipeline run depends on, echoed into `config.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub input: PathBuf,
    /// One-body rank and per-leaf rank; `None` keeps full rank.
    pub l: Option<usize>,
    /// Leaf budget; `None` allows as many leaves as the tensor has.
    pub m: Option<usize>,
    pub tol: f64,
    pub bits: u32,
    pub mode: ModeArg,
    pub layout: LayoutArg,
    pub toffoli: ToffoliArg,
    pub verify_tol: f64,
    pub output_dir: Option<PathBuf>,
}

impl PipelineConfig {
    /// Rejects inconsistent settings before any work starts.
    pub fn validate(&self) -> StageResult<()> {
        if !(1..=52).contains(&self.bits) {
            return Err(usage(format!("--bits must be in 1..=52, got {}", self.bits)));
        }
        if self.l == Some(0) || self.m == Some(0) {
            return Err(usage("--l and --m must be positive"));
        }
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            return Err(usage("--tol must be a nonnegative number"));
        }
        if !(self.verify_tol > 0.0 && self.verify_tol.is_finite()) {
            return Err(usage("--verify-tol must be positive"));
        }
        Ok(())
    }

    pub fn build_options(&self) -> BuildOptions {
        BuildOptions {
            bits: self.bits,
            mode: match self.mode {
                ModeArg::Exact => AngleMode::Exact,
                ModeArg::Discrete => AngleMode::Discrete,
            },
            layout: self.layout.into(),
            ..Default::default()
        }
    }

    pub fn cost_model(&self) -> CostModel {
        CostModel {
            toffoli_rule: match self.toffoli {
                ToffoliArg::Exact7T => ToffoliRule::Exact7T,
                ToffoliArg::Ancilla4T => ToffoliRule::Ancilla4T,
                ToffoliArg::Conditional4T => ToffoliRule::Conditional4T,
            },
            fredkin_rule: FredkinRule::CxToffoliCx,
            bits: self.bits,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Factors {
    pub one_body: OneBodyFactors,
    pub two_body: Option<TwoBodyFactors>,
}

pub struct Loaded {
    pub set: IntegralSet,
    pub h: PBHamiltonian,
}

pub fn load(path: &Path) -> StageResult<Loaded> {
    let set = load_integrals(path).map_err(tag(Stage::Parse))?;
    let h = assemble(&set).map_err(tag(Stage::Validate))?;
    log::info!("loaded {} orbitals from {}", set.n_orbitals, path.display());
    Ok(Loaded { set, h })
}

pub fn factorize(loaded: &Loaded, cfg: &PipelineConfig) -> StageResult<Factors> {
    let n = loaded.set.n_orbitals;
    let l = cfg.l.unwrap_or(n);
    let one_body = decompose_blocks(&loaded.h.one_body_total, FactorMode::PerComponent, l).map_err(tag(Stage::Factorize))?;
    let two_body = if loaded.h.two_body.max_abs() > 0.0 {
        let m = cfg.m.unwrap_or(4 * n * n);
        let f = double_factorize_tensor(&loaded.h.two_body, m, l, cfg.tol).map_err(tag(Stage::Factorize))?;
        log::info!("double factorization: {} leaves, epsilon {:e}", f.leaves.len(), f.epsilon);
        Some(f)
    } else {
        None
    };
    Ok(Factors { one_body, two_body })
}

pub fn encode(factors: &Factors, cfg: &PipelineConfig) -> StageResult<BlockEncoding> {
    let opts = cfg.build_options();
    let enc = tag(Stage::Encode);
    let one = if factors.one_body.terms.is_empty() && factors.one_body.identity_coefficient() == 0.0 {
        None
    } else {
        let set = schedules_for(&factors.one_body).map_err(&enc)?;
        Some(build_be_one_body(&factors.one_body, &set, &opts).map_err(&enc)?)
    };
    let two = match &factors.two_body {
        Some(f) if !f.leaves.is_empty() => Some(build_be_two_body(f, &opts).map_err(&enc)?),
        _ => None,
    };
    match (one, two) {
        (Some(a), Some(b)) => add_encodings(&a, &b, Combiner::Weighted).map_err(&enc),
        (Some(a), None) => Ok(a),
        (None, Some(b)) => Ok(b),
        (None, None) => Err(StageError { stage: Stage::Validate, message: "the Hamiltonian is zero".into() }),
    }
}

pub fn reference(loaded: &Loaded, cfg: &PipelineConfig) -> StageResult<DenseOperator> {
    build_dense_normal_ordered(&loaded.set, cfg.layout.into()).map_err(tag(Stage::Resource))
}

/// Tolerance used when verifying: the requested one in exact mode, widened
/// by the rotation discretization bound otherwise.
pub fn verify_tolerance(cfg: &PipelineConfig, resources: &ResourceReport) -> f64 {
    match cfg.mode {
        ModeArg::Exact => cfg.verify_tol,
        ModeArg::Discrete => {
            let bound = 2.0 * std::f64::consts::PI * 2f64.powi(-(cfg.bits as i32)) * resources.rotation_count as f64;
            cfg.verify_tol.max(bound)
        }
    }
}

pub fn verify(loaded: &Loaded, be: &BlockEncoding, cfg: &PipelineConfig, resources: &ResourceReport) -> StageResult<VerificationReport> {
    let h = reference(loaded, cfg)?;
    let bits = (cfg.mode == ModeArg::Discrete).then_some(cfg.bits);
    verify_block_encoding(be, &h, verify_tolerance(cfg, resources), bits).map_err(tag(Stage::Verify))
}

pub fn resources(be: &BlockEncoding, cfg: &PipelineConfig) -> StageResult<ResourceReport> {
    count_resources(&be.circuit, &cfg.cost_model()).map_err(tag(Stage::Encode))
}

/// Deterministic pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}
