//! Experiment configuration (TOML, schema version 1).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    #[serde(default)]
    pub name: Option<String>,
    pub group: GroupSpec,
    #[serde(default)]
    pub generating_sets: Vec<GeneratingSet>,
    #[serde(default)]
    pub measure: MeasureSpec,
    #[serde(default)]
    pub radii: Option<Radii>,
    #[serde(default)]
    pub estimator: EstimatorSpec,
    #[serde(default)]
    pub homomorphisms: BTreeMap<String, HomSpec>,
    #[serde(default)]
    pub coset_density: Option<CosetDensitySpec>,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
    #[serde(default)]
    pub growth: GrowthSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthSpec {
    #[serde(default = "default_exponential_ratio")]
    pub exponential_ratio: f64,
    #[serde(default = "default_polynomial_ratio")]
    pub polynomial_ratio: f64,
}

fn default_exponential_ratio() -> f64 {
    1.05
}

fn default_polynomial_ratio() -> f64 {
    1.02
}

impl Default for GrowthSpec {
    fn default() -> Self {
        GrowthSpec { exponential_ratio: default_exponential_ratio(), polynomial_ratio: default_polynomial_ratio() }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GroupSpec {
    Integers,
    Free { rank: usize },
    FreeAbelian { rank: usize },
    Heisenberg,
    InfiniteDihedral,
    FreeProduct { orders: Vec<u32> },
    Cyclic { n: i64 },
    ElementaryAbelian { rank: usize, modulus: i64 },
    Symmetric { n: usize },
    Alternating { n: usize },
    Dihedral { n: usize },
    Quaternion,
    /// Generators in 1-based cycle notation, e.g. `{ name = "a", word = "(1 2 3)" }`.
    Permutation { degree: usize, generators: Vec<NamedWord> },
    /// Z^dim ⋊ F with F generated by the given row-major integer matrices.
    Semidirect { dim: usize, matrices: Vec<Vec<i64>> },
    Quotient { base: Box<GroupSpec>, modulus: i64 },
    /// Path relative to the config file, or an inline system.
    Rewriting {
        #[serde(default)]
        file: Option<String>,
        #[serde(default)]
        system: Option<String>,
    },
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct NamedWord {
    pub name: String,
    pub word: String,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratingSet {
    pub name: String,
    /// Words in the standard generators.
    pub generators: Vec<NamedWord>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    #[serde(default)]
    pub family: Family,
    #[serde(default)]
    pub laziness: f64,
    /// Padding element, as a word in the generators.
    #[serde(default)]
    pub element: Option<String>,
    #[serde(default)]
    pub padding: Option<Padding>,
    #[serde(default)]
    pub fball: Option<FBallConfig>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    #[default]
    UniformBall,
    RandomWalk,
    Padded,
    FBall,
    FullGroup,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum Padding {
    Constant(u64),
    Linear { slope: u64, offset: u64 },
    Exponential { base: u64 },
    Explicit(Vec<u64>),
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum FBallConfig {
    /// Built-in subgroup predicate, currently `translations`.
    Subgroup(String),
    /// Kernel of a named homomorphism.
    Kernel(String),
    /// Ball in a named generating set.
    GeneratingSet(String),
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Radii {
    pub from: usize,
    pub to: usize,
    #[serde(default = "one")]
    pub step: usize,
}

fn one() -> usize {
    1
}

impl Radii {
    pub fn values(&self) -> Vec<usize> {
        (self.from..=self.to).step_by(self.step.max(1)).collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeSpec {
    #[default]
    Auto,
    Exact,
    Sampled,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSpec {
    #[serde(default)]
    pub mode: ModeSpec,
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default = "default_samples")]
    pub samples: u64,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub cap: Option<usize>,
}

fn default_budget() -> u64 {
    1_000_000_000
}

fn default_samples() -> u64 {
    100_000
}

impl Default for EstimatorSpec {
    fn default() -> Self {
        EstimatorSpec { mode: ModeSpec::Auto, budget: default_budget(), samples: default_samples(), seed: None, cap: None }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum HomSpec {
    /// Reduction of coordinates mod m.
    Modulus(i64),
    /// Every generator to the generator of Z2.
    Parity(bool),
    /// Quotient of a finite group by its center.
    Center(bool),
    /// Generator images given as words in a finite target.
    Images { target: GroupSpec, images: Vec<String> },
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CosetDensitySpec {
    pub homomorphism: String,
    #[serde(default = "identity_word")]
    pub element: String,
}

fn identity_word() -> String {
    "1".into()
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CheckSpec {
    Gustafson {
        #[serde(default)]
        corpus: bool,
    },
    Gallagher { homomorphism: String },
    QuotientBound {
        homomorphism: String,
        window: [usize; 2],
        #[serde(default)]
        tolerance: Option<f64>,
    },
    IndexBound {
        subgroup: FBallConfig,
        #[serde(default)]
        index: Option<u64>,
        window: [usize; 2],
        #[serde(default)]
        tolerance: Option<f64>,
    },
    DecreasingTrend { window: [usize; 2] },
    /// Over the declared radii.
    Negligibility {
        #[serde(default = "default_g_samples")]
        samples: usize,
        seed: u64,
        #[serde(default)]
        window: Option<[usize; 2]>,
    },
    TranslationLength { element: String, m_max: u64 },
    CentralizerBound { samples: usize, n: usize, p: u64, seed: u64 },
}

fn default_g_samples() -> usize {
    50
}

impl CheckSpec {
    pub fn label(&self) -> &'static str {
        match self {
            CheckSpec::Gustafson { .. } => "gustafson",
            CheckSpec::Gallagher { .. } => "gallagher",
            CheckSpec::QuotientBound { .. } => "quotient-bound",
            CheckSpec::IndexBound { .. } => "index-bound",
            CheckSpec::DecreasingTrend { .. } => "decreasing-trend",
            CheckSpec::Negligibility { .. } => "negligibility",
            CheckSpec::TranslationLength { .. } => "translation-length",
            CheckSpec::CentralizerBound { .. } => "centralizer-bound",
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub dir: Option<String>,
    #[serde(default)]
    pub cache_dir: Option<String>,
}

/// Parses TOML, reporting the line and column of syntax and schema errors.
pub fn parse(text: &str) -> Result<ExperimentConfig, String> {
    toml::from_str(text).map_err(|e| {
        let at = e.span().map(|s| line_col(text, s.start));
        match at {
            Some((line, col)) => format!("line {line}, column {col}: {}", e.message()),
            None => e.message().to_string(),
        }
    })
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, col)
}
