//! Experiment configurations: the subcommand, its parameters, the master
//! seed and the trial count. The same parameter structs back the command
//! line and JSON configuration files.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use thresholdlab::cover::CoverFamily;
use thresholdlab::graph::{pair_count, GraphSpec};
use thresholdlab::mask::MAX_ENUMERABLE;
use thresholdlab::{Certificate, Direction, FamilySpec};

use crate::artifacts::{sha256_hex, ARTIFACT_VERSION};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn trials_file(self) -> &'static str {
        match self {
            Format::Csv => "trials.csv",
            Format::Json => "trials.json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Exact when the ground set is small enough to enumerate.
    #[default]
    Auto,
    Exact,
    MonteCarlo,
}

/// A family given by built-in name or by a JSON declaration file. Files are
/// read once and inlined, so configurations are self-contained.
#[derive(Args, Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "FamilySpec", into = "FamilySpec")]
pub struct FamilySource {
    /// Built-in family, e.g. `triangle-free`.
    #[arg(long = "family", conflicts_with = "family_file")]
    pub name: Option<String>,
    /// Vertex count of a built-in graph family.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub r: Option<usize>,
    /// JSON family declaration.
    #[arg(long)]
    pub family_file: Option<PathBuf>,
    #[arg(skip)]
    pub spec: Option<FamilySpec>,
}

impl From<FamilySpec> for FamilySource {
    fn from(spec: FamilySpec) -> Self {
        FamilySource {
            spec: Some(spec),
            ..Default::default()
        }
    }
}

impl From<FamilySource> for FamilySpec {
    fn from(src: FamilySource) -> Self {
        src.spec.unwrap_or_else(|| FamilySpec::Builtin {
            name: src.name.unwrap_or_default(),
            n: src.n.unwrap_or_default(),
            r: src.r,
        })
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn invalid_json(field: &str, path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::ConfigInvalid(format!("params.{field}: {}: {e}", path.display()))
}

impl FamilySource {
    fn resolve(&mut self) -> Result<()> {
        if self.spec.is_some() {
            return Ok(());
        }
        if let Some(path) = &self.family_file {
            let text = read_file(path)?;
            self.spec = Some(FamilySpec::parse(&text).map_err(|e| invalid_json("family", path, e))?);
        } else if let Some(name) = &self.name {
            let n = self
                .n
                .ok_or_else(|| CliError::ConfigInvalid("params.family.n: required for built-in families".into()))?;
            self.spec = Some(FamilySpec::Builtin {
                name: name.clone(),
                n,
                r: self.r,
            });
        } else {
            return Err(CliError::ConfigInvalid(
                "params.family: give --family with --n, or --family-file".into(),
            ));
        }
        Ok(())
    }

    pub fn spec(&self) -> FamilySpec {
        FamilySpec::from(self.clone())
    }

    /// Ground-set size without building the family.
    pub fn ground_size(&self) -> usize {
        match self.spec() {
            FamilySpec::Builtin { n, .. } => pair_count(n),
            FamilySpec::Explicit { ground_size, .. } | FamilySpec::Closure { ground_size, .. } => ground_size,
        }
    }
}

/// An integral certificate read from a JSON file.
#[derive(Args, Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "Certificate", into = "Certificate")]
pub struct CertSource {
    /// JSON certificate `{ground_size, members}`.
    #[arg(long, required = true)]
    pub cert_file: Option<PathBuf>,
    #[arg(skip)]
    pub cert: Option<Certificate>,
}

impl From<Certificate> for CertSource {
    fn from(cert: Certificate) -> Self {
        CertSource {
            cert_file: None,
            cert: Some(cert),
        }
    }
}

impl From<CertSource> for Certificate {
    fn from(src: CertSource) -> Self {
        src.cert.expect("certificate resolved before serialisation")
    }
}

impl CertSource {
    fn resolve(&mut self) -> Result<()> {
        if self.cert.is_none() {
            let path = self
                .cert_file
                .as_ref()
                .ok_or_else(|| CliError::ConfigInvalid("params.cert: --cert-file is required".into()))?;
            let text = read_file(path)?;
            self.cert = Some(Certificate::from_json(&text).map_err(|e| invalid_json("cert", path, e))?);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CoverInput {
    /// `{K_n − E(K_n[B]) : |B| = k}`.
    RamseyClique { n: usize, k: usize },
    Explicit { cover: CoverFamily },
}

/// A cover given by the clique construction or by a JSON file.
#[derive(Args, Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "CoverInput", into = "CoverInput")]
pub struct CoverSource {
    /// Vertex count of the clique construction.
    #[arg(long, requires = "k", conflicts_with = "cover_file")]
    pub n: Option<usize>,
    /// Clique size of the clique construction.
    #[arg(long, requires = "n")]
    pub k: Option<usize>,
    /// JSON cover `{n, m, mode, members}`.
    #[arg(long)]
    pub cover_file: Option<PathBuf>,
    #[arg(skip)]
    pub input: Option<CoverInput>,
}

impl From<CoverInput> for CoverSource {
    fn from(input: CoverInput) -> Self {
        CoverSource {
            input: Some(input),
            ..Default::default()
        }
    }
}

impl From<CoverSource> for CoverInput {
    fn from(src: CoverSource) -> Self {
        src.input.unwrap_or(CoverInput::RamseyClique {
            n: src.n.unwrap_or_default(),
            k: src.k.unwrap_or_default(),
        })
    }
}

impl CoverSource {
    fn resolve(&mut self) -> Result<()> {
        if self.input.is_some() {
            return Ok(());
        }
        self.input = Some(match (&self.cover_file, self.n, self.k) {
            (Some(path), _, _) => {
                let text = read_file(path)?;
                CoverInput::Explicit {
                    cover: CoverFamily::from_json(&text).map_err(|e| invalid_json("cover", path, e))?,
                }
            }
            (None, Some(n), Some(k)) => CoverInput::RamseyClique { n, k },
            _ => {
                return Err(CliError::ConfigInvalid(
                    "params.cover: give --n and --k, or --cover-file".into(),
                ))
            }
        });
        Ok(())
    }

    pub fn input(&self) -> CoverInput {
        CoverInput::from(self.clone())
    }
}

fn parse_direction(s: &str) -> std::result::Result<Direction, String> {
    match s {
        "up" => Ok(Direction::Up),
        "down" => Ok(Direction::Down),
        _ => Err(format!("expected `up` or `down`, got {s:?}")),
    }
}

fn default_exact_tol() -> f64 {
    1e-6
}
fn default_deviation_n() -> usize {
    64
}
fn default_deviation_p() -> f64 {
    1.0 / 160.0
}
fn default_hitting_check_n() -> usize {
    7
}
fn default_p_gamma() -> f64 {
    0.5
}
fn default_p_h() -> f64 {
    0.3
}
fn default_coupling_n() -> usize {
    16
}
fn default_coupling_p() -> f64 {
    0.1
}
fn default_capture_trials() -> u64 {
    2000
}
fn default_hitting_n() -> usize {
    32
}
fn default_hitting_p() -> f64 {
    0.1
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MuParams {
    #[command(flatten)]
    pub family: FamilySource,
    #[arg(long)]
    pub p: f64,
    #[arg(long, value_enum, default_value_t)]
    #[serde(default)]
    pub method: Method,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdParams {
    #[command(flatten)]
    pub family: FamilySource,
    /// Bracket width; defaults to 1e-6 (exact) or 1e-2 (Monte Carlo).
    #[arg(long)]
    #[serde(default)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value_t)]
    #[serde(default)]
    pub method: Method,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QParams {
    #[command(flatten)]
    pub family: FamilySource,
    #[arg(long, default_value_t = default_exact_tol())]
    #[serde(default = "default_exact_tol")]
    pub tol: f64,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SandwichParams {
    #[command(flatten)]
    pub family: FamilySource,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SandwichAllParams {
    /// 1 to 4.
    #[arg(long)]
    pub ground_size: usize,
    /// Only up-sets or only down-sets; both by default.
    #[arg(long, value_parser = parse_direction)]
    #[serde(default)]
    pub direction: Option<Direction>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertCheckParams {
    #[command(flatten)]
    pub family: FamilySource,
    #[command(flatten)]
    pub cert: CertSource,
    #[arg(long)]
    pub p: f64,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HittingCheckParams {
    #[arg(long, default_value_t = default_hitting_check_n())]
    #[serde(default = "default_hitting_check_n")]
    pub n: usize,
    /// Edge probability of `Γ`.
    #[arg(long, default_value_t = default_p_gamma())]
    #[serde(default = "default_p_gamma")]
    pub p_gamma: f64,
    /// Edge probability of `H`.
    #[arg(long, default_value_t = default_p_h())]
    #[serde(default = "default_p_h")]
    pub p_h: f64,
    /// Sample this many greedy maximal subgraphs instead of enumerating all.
    #[arg(long)]
    #[serde(default)]
    pub sampled_orders: Option<u64>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingParams {
    #[arg(long, default_value_t = default_coupling_n())]
    #[serde(default = "default_coupling_n")]
    pub n: usize,
    #[arg(long, default_value_t = default_coupling_p())]
    #[serde(default = "default_coupling_p")]
    pub p: f64,
    /// Samples for the conditional capture check.
    #[arg(long, default_value_t = default_capture_trials())]
    #[serde(default = "default_capture_trials")]
    pub capture_trials: u64,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviationParams {
    /// Graph `H`, e.g. `cycle:4`, `star:10`, `matching:16`, `random-bipartite:50:1`.
    #[arg(long)]
    pub h: GraphSpec,
    #[arg(long, default_value_t = default_deviation_n())]
    #[serde(default = "default_deviation_n")]
    pub n: usize,
    #[arg(long, default_value_t = default_deviation_p())]
    #[serde(default = "default_deviation_p")]
    pub p: f64,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailUndirectedParams {
    #[arg(long)]
    pub h: GraphSpec,
    #[arg(long, default_value_t = default_deviation_n())]
    #[serde(default = "default_deviation_n")]
    pub n: usize,
    #[arg(long, default_value_t = default_deviation_p())]
    #[serde(default = "default_deviation_p")]
    pub p: f64,
    /// Count the event without the maximum-degree condition.
    #[arg(long)]
    #[serde(default)]
    pub no_degree_filter: bool,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HittingParams {
    /// Family members; repeat the flag.
    #[arg(long = "h", required = true)]
    pub h: Vec<GraphSpec>,
    #[arg(long, default_value_t = default_hitting_n())]
    #[serde(default = "default_hitting_n")]
    pub n: usize,
    #[arg(long, default_value_t = default_hitting_p())]
    #[serde(default = "default_hitting_p")]
    pub p: f64,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FracHittingParams {
    #[arg(long = "h", required = true)]
    pub h: Vec<GraphSpec>,
    #[arg(long, default_value_t = default_hitting_n())]
    #[serde(default = "default_hitting_n")]
    pub n: usize,
    #[arg(long, default_value_t = default_hitting_p())]
    #[serde(default = "default_hitting_p")]
    pub p: f64,
    /// Defaults to the undirected budget `min(ε/4, γ)/5`.
    #[arg(long)]
    #[serde(default)]
    pub delta: Option<f64>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionParams {
    #[arg(long)]
    pub n: u64,
    /// Clique size; or give `--ramsey-c` for `⌈C √n ln n⌉`.
    #[arg(long, conflicts_with = "ramsey_c")]
    #[serde(default)]
    pub k: Option<u64>,
    #[arg(long)]
    #[serde(default)]
    pub ramsey_c: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    pub delta: Option<f64>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverGenParams {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverCheckParams {
    #[command(flatten)]
    pub cover: CoverSource,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaCheckParams {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// Search random maximal triangle-free graphs instead of all graphs.
    #[arg(long)]
    #[serde(default)]
    pub sampled: bool,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QBoundParams {
    /// Missing edges per cover member.
    #[arg(long)]
    pub m: u64,
    #[arg(long)]
    pub n: u64,
    /// Cover size `s`.
    #[arg(long, conflicts_with = "ln_size")]
    #[serde(default)]
    pub size: Option<f64>,
    /// `ln s`, for covers too large for a float.
    #[arg(long)]
    #[serde(default)]
    pub ln_size: Option<f64>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BipartiteParams {
    /// Host graph `H`, e.g. `co-matching:4`.
    #[arg(long)]
    pub h: GraphSpec,
    #[arg(long)]
    pub n: usize,
}

fn parse_params<T: DeserializeOwned>(params: &Map<String, Value>) -> Result<T> {
    serde_path_to_error::deserialize(Value::Object(params.clone())).map_err(|e| {
        let path = e.path().to_string();
        let at = if path == "." { "params".to_string() } else { format!("params.{path}") };
        CliError::ConfigInvalid(format!("{at}: {}", e.inner()))
    })
}

fn to_params<T: Serialize>(p: &T) -> Map<String, Value> {
    match serde_json::to_value(p).expect("parameters serialise") {
        Value::Object(m) => m,
        _ => unreachable!("parameter structs serialise to objects"),
    }
}

macro_rules! commands {
    ($($(#[doc = $doc:literal])* $variant:ident($params:ty) = $name:literal,)*) => {
        #[derive(Subcommand, Debug, Clone, PartialEq)]
        pub enum Command {
            $($(#[doc = $doc])* #[command(name = $name)] $variant($params),)*
        }

        impl Command {
            pub const NAMES: &'static [&'static str] = &[$($name),*];

            pub fn name(&self) -> &'static str {
                match self {
                    $(Command::$variant(_) => $name,)*
                }
            }

            pub fn params(&self) -> Map<String, Value> {
                match self {
                    $(Command::$variant(p) => to_params(p),)*
                }
            }

            pub fn from_parts(name: &str, params: &Map<String, Value>) -> Result<Self> {
                match name {
                    $($name => Ok(Command::$variant(parse_params(params)?)),)*
                    other => Err(CliError::ConfigInvalid(format!(
                        "subcommand: unknown {other:?}, expected one of {}",
                        Self::NAMES.join(", ")
                    ))),
                }
            }
        }
    };
}

commands! {
    /// μ_p of a monotone family.
    Mu(MuParams) = "mu",
    /// The threshold p_c where μ_p = 1/2.
    Threshold(ThresholdParams) = "threshold",
    /// Expectation-threshold q with a witness certificate (N ≤ 4).
    Q(QParams) = "q",
    /// Fractional expectation-threshold q_f with a witness (N ≤ 4).
    Qf(QParams) = "qf",
    /// p_c, q_f and q of one family and their ordering (N ≤ 4).
    Sandwich(SandwichParams) = "sandwich",
    /// The ordering check on every nontrivial monotone family on N ≤ 4 points.
    SandwichAll(SandwichAllParams) = "sandwich-all",
    /// Cost and coverage of an integral certificate at p.
    CertCheck(CertCheckParams) = "cert-check",
    /// Random (Γ, H) pairs: does an H-good edge force every maximal
    /// triangle-free subgraph of Γ to meet H?
    HittingCheck(HittingCheckParams) = "hitting-check",
    /// Marginals, degree domination and square capture of the G(n,p) / digraph coupling.
    Coupling(CouplingParams) = "coupling",
    /// Exponential moment of e(H[U]) for a random vertex subset U.
    Moment(DeviationParams) = "moment",
    /// Tail of e(H ∩ D̂) for a random digraph D.
    TailDirected(DeviationParams) = "tail-directed",
    /// Tail of e(H ∩ Γ²) for Γ ~ G(n, p).
    TailUndirected(TailUndirectedParams) = "tail-undirected",
    /// How often a random maximal triangle-free subgraph meets each H.
    Hitting(HittingParams) = "hitting",
    /// Missed weight of a weighted family under the hitting experiment.
    FracHitting(FracHittingParams) = "frac-hitting",
    /// The weighted-sum condition for the family of k-cliques.
    Condition(ConditionParams) = "condition",
    /// Generates the clique cover {K_n − K_n[B] : |B| = k}.
    CoverGen(CoverGenParams) = "cover-gen",
    /// Checks a cover against every triangle-free graph (n ≤ 7).
    CoverCheck(CoverCheckParams) = "cover-check",
    /// Does every triangle-free graph on n vertices have an independent k-set?
    AlphaCheck(AlphaCheckParams) = "alpha-check",
    /// The bound ln(2s)/m on q(T_n) from a cover of size s.
    QBound(QBoundParams) = "q-bound",
    /// P(random complete bipartite graph ⊆ H) against 2^{-e(T)}.
    BipartiteLb(BipartiteParams) = "bipartite-lb",
}

impl Command {
    /// Reads referenced files and inlines their contents.
    pub fn resolve_inputs(&mut self) -> Result<()> {
        match self {
            Command::Mu(p) => p.family.resolve(),
            Command::Threshold(p) => p.family.resolve(),
            Command::Q(p) | Command::Qf(p) => p.family.resolve(),
            Command::Sandwich(p) => p.family.resolve(),
            Command::CertCheck(p) => {
                p.family.resolve()?;
                p.cert.resolve()
            }
            Command::CoverCheck(p) => p.cover.resolve(),
            _ => Ok(()),
        }
    }

    fn uses_sampling(method: Method, ground_size: usize) -> bool {
        match method {
            Method::Exact => false,
            Method::MonteCarlo => true,
            Method::Auto => ground_size > MAX_ENUMERABLE,
        }
    }

    /// Default trial count for randomized runs; `None` for deterministic ones.
    pub fn default_trials(&self) -> Option<u64> {
        match self {
            Command::Mu(p) => Self::uses_sampling(p.method, p.family.ground_size()).then_some(10_000),
            Command::Threshold(p) => Self::uses_sampling(p.method, p.family.ground_size()).then_some(2_000),
            Command::CertCheck(p) => (p.family.ground_size() > MAX_ENUMERABLE).then_some(100_000),
            Command::HittingCheck(_) => Some(1_000),
            Command::Coupling(_) => Some(100_000),
            Command::Moment(_) | Command::TailDirected(_) | Command::TailUndirected(_) => Some(100_000),
            Command::Hitting(_) | Command::FracHitting(_) => Some(1_000),
            Command::AlphaCheck(p) => p.sampled.then_some(10_000),
            Command::BipartiteLb(_) => Some(100_000),
            Command::Q(_)
            | Command::Qf(_)
            | Command::Sandwich(_)
            | Command::SandwichAll(_)
            | Command::Condition(_)
            | Command::CoverGen(_)
            | Command::CoverCheck(_)
            | Command::QBound(_) => None,
        }
    }

    pub fn is_randomized(&self) -> bool {
        self.default_trials().is_some()
    }
}

/// One experiment, as written to `config.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub subcommand: String,
    #[serde(default)]
    pub params: Map<String, Value>,
    /// Required for randomized subcommands; never taken from the clock.
    #[serde(default)]
    pub master_seed: Option<u64>,
    #[serde(default)]
    pub trials: Option<u64>,
    #[serde(default)]
    pub format: Format,
    /// Where artifacts go; not part of the configuration hash.
    #[serde(default)]
    pub output_path: String,
}

/// The hashed part of a configuration.
#[derive(Serialize)]
struct Canonical<'a> {
    artifact_version: u32,
    subcommand: &'a str,
    params: &'a Map<String, Value>,
    master_seed: Option<u64>,
    trials: Option<u64>,
    format: Format,
}

/// A validated configuration ready to execute.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub command: Command,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
}

impl Plan {
    pub fn seed(&self) -> u64 {
        self.seed.expect("validated: randomized plans carry a seed")
    }

    pub fn trials(&self) -> u64 {
        self.trials.expect("validated: randomized plans carry a trial count")
    }
}

impl ExperimentConfig {
    /// Builds a configuration from a parsed command line, inlining input files.
    pub fn from_command(
        mut command: Command,
        seed: Option<u64>,
        trials: Option<u64>,
        format: Format,
        output_path: &Path,
    ) -> Result<Self> {
        command.resolve_inputs()?;
        let trials = trials.or(command.default_trials());
        let config = ExperimentConfig {
            subcommand: command.name().to_string(),
            params: command.params(),
            master_seed: seed,
            trials,
            format,
            output_path: output_path.to_string_lossy().into_owned(),
        };
        config.plan()?;
        Ok(config)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::ConfigInvalid(format!("{path}: {}", e.inner()))
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serialises");
        s.push('\n');
        s
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string(&Canonical {
            artifact_version: ARTIFACT_VERSION,
            subcommand: &self.subcommand,
            params: &self.params,
            master_seed: self.master_seed,
            trials: self.trials,
            format: self.format,
        })
        .expect("config serialises")
    }

    pub fn hash(&self) -> String {
        sha256_hex(self.canonical_json().as_bytes())
    }

    /// Validates the parameters against the subcommand's schema.
    pub fn plan(&self) -> Result<Plan> {
        let command = Command::from_parts(&self.subcommand, &self.params)?;
        let mut trials = self.trials;
        if command.is_randomized() {
            if self.master_seed.is_none() {
                return Err(CliError::ConfigInvalid(format!(
                    "master_seed: required for the randomized subcommand {:?}",
                    self.subcommand
                )));
            }
            trials = trials.or(command.default_trials());
            if trials == Some(0) {
                return Err(CliError::ConfigInvalid("trials: must be at least 1".into()));
            }
        }
        Ok(Plan {
            command,
            seed: self.master_seed,
            trials,
        })
    }
}
