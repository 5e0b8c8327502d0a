//! Schema and cross-field validation.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use dcx_core::cayley::{BallOptions, FBallSpec, SubgroupPredicate, DEFAULT_ELEMENT_CAP};
use dcx_core::estimator::{EstimatorMode, EstimatorSettings, MeasureFamily, PaddingSchedule, MIN_SAMPLES};
use dcx_core::group::{GroupModel, Homomorphism, ModelKind, OrderResult};
use dcx_core::measures::ORDER_PROOF_CAP;
use serde::Serialize;

use crate::config::{CheckSpec, ExperimentConfig, FBallConfig, Family, ModeSpec, Padding, SCHEMA_VERSION};
use crate::models;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Error,
    Warning,
    Info,
}

#[derive(Clone, Debug, Serialize)]
pub struct Diagnostic {
    pub level: Level,
    pub field: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.level {
            Level::Error => "error",
            Level::Warning => "warning",
            Level::Info => "info",
        };
        write!(f, "{level}[{}]: {}", self.field, self.message)
    }
}

pub enum Plan {
    Series(MeasureFamily),
    FullGroup,
}

/// A validated config with everything it refers to constructed.
pub struct Experiment {
    pub config: ExperimentConfig,
    pub model: GroupModel,
    pub set_name: String,
    pub comparison: Option<(String, GroupModel)>,
    pub homs: BTreeMap<String, Homomorphism>,
    pub plan: Plan,
    pub radii: Vec<usize>,
    pub settings: EstimatorSettings,
}

#[derive(Default)]
struct Diagnostics(Vec<Diagnostic>);

impl Diagnostics {
    fn push(&mut self, level: Level, field: impl Into<String>, message: impl Into<String>) {
        self.0.push(Diagnostic { level, field: field.into(), message: message.into() });
    }

    fn error(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.push(Level::Error, field, message);
    }

    fn has_errors(&self) -> bool {
        self.0.iter().any(|d| d.level == Level::Error)
    }
}

fn is_semidirect(kind: &ModelKind) -> bool {
    matches!(kind, ModelKind::Semidirect { .. } | ModelKind::InfiniteDihedral)
}

/// Diagnostics in config order, plus the experiment when there are no errors.
pub fn validate(config: &ExperimentConfig, base_dir: &Path) -> (Vec<Diagnostic>, Option<Experiment>) {
    let mut d = Diagnostics::default();
    if config.schema != SCHEMA_VERSION {
        d.error("schema", format!("unsupported schema version {} (this build reads {SCHEMA_VERSION})", config.schema));
    }

    let standard = match models::group(&config.group, base_dir) {
        Ok(m) => m,
        Err(e) => {
            d.error("group", e);
            return (d.0, None);
        }
    };

    let mut sets = Vec::new();
    for (i, set) in config.generating_sets.iter().enumerate() {
        let words: Vec<(&str, &str)> = set.generators.iter().map(|g| (g.name.as_str(), g.word.as_str())).collect();
        match standard.with_generator_words(&words) {
            Ok(m) => sets.push((set.name.clone(), m)),
            Err(e) => d.error(format!("generating_sets[{i}]"), e.to_string()),
        }
    }
    if config.generating_sets.len() > 2 {
        d.error("generating_sets", "at most two generating sets may be declared");
    }
    if config.generating_sets.len() == 2 && config.generating_sets[0].name == config.generating_sets[1].name {
        d.error("generating_sets", "generating set names must differ");
    }
    if config.generating_sets.len() == 2 {
        d.push(
            Level::Info,
            "generating_sets",
            format!(
                "comparison mode enabled: series for '{}' and '{}' are written side by side",
                config.generating_sets[0].name, config.generating_sets[1].name
            ),
        );
    }
    let mut sets = sets.into_iter();
    let (set_name, model) = sets.next().unwrap_or_else(|| ("standard".into(), standard.clone()));
    let comparison = sets.next();

    let radii = match (&config.radii, config.measure.family) {
        (Some(r), _) => {
            if r.from > r.to {
                d.error("radii", format!("radii must be ascending (from = {} > to = {})", r.from, r.to));
            }
            if r.step == 0 {
                d.error("radii.step", "step must be positive");
            }
            r.values()
        }
        (None, Family::FullGroup) => match model.elements() {
            Ok(b) => vec![b.radius().saturating_sub(b.is_complete() as usize)],
            Err(_) => Vec::new(),
        },
        (None, _) => {
            d.error("radii", "radii are required for this measure family");
            Vec::new()
        }
    };

    let est = &config.estimator;
    if est.mode == ModeSpec::Sampled {
        if est.seed.is_none() {
            d.error("estimator.seed", "sampled mode requires a seed");
        }
        if est.samples < MIN_SAMPLES {
            d.error("estimator.samples", format!("sampled mode needs at least {MIN_SAMPLES} samples, got {}", est.samples));
        }
    }
    if est.mode == ModeSpec::Auto && est.seed.is_none() && config.measure.family != Family::FullGroup {
        d.push(Level::Info, "estimator.seed", "no seed: radii over the exact budget fail instead of falling back to sampling");
    }
    let settings = EstimatorSettings {
        mode: match est.mode {
            ModeSpec::Auto => EstimatorMode::Auto,
            ModeSpec::Exact => EstimatorMode::Exact,
            ModeSpec::Sampled => EstimatorMode::Sampled,
        },
        budget: est.budget as u128,
        samples: est.samples,
        seed: est.seed,
        ball: BallOptions { cap: est.cap.unwrap_or(DEFAULT_ELEMENT_CAP) },
    };

    let mut homs = BTreeMap::new();
    for (name, spec) in &config.homomorphisms {
        let field = format!("homomorphisms.{name}");
        match models::homomorphism(&model, spec, base_dir) {
            Ok(h) => {
                if !h.is_verified() {
                    d.push(
                        Level::Warning,
                        field,
                        format!("unverified: no defining relations are known for {} models, so the map is assumed to be a homomorphism", model.kind()),
                    );
                }
                homs.insert(name.clone(), h);
            }
            Err(e) => d.error(field, e),
        }
    }

    let fball = |cfg: &FBallConfig, field: &str, d: &mut Diagnostics| -> Option<FBallSpec> {
        match cfg {
            FBallConfig::Subgroup(name) if name == "translations" => {
                if !is_semidirect(&model.kind()) {
                    d.error(field, format!("the translations subgroup needs a semidirect model, not {}", model.kind()));
                    return None;
                }
                Some(FBallSpec::subgroup(SubgroupPredicate::translations()))
            }
            FBallConfig::Subgroup(name) => {
                d.error(field, format!("unknown subgroup '{name}' (known: translations)"));
                None
            }
            FBallConfig::Kernel(h) => match homs.get(h) {
                Some(hom) => Some(FBallSpec::subgroup(SubgroupPredicate::Kernel(hom.clone()))),
                None => {
                    d.error(field, format!("no homomorphism named '{h}'"));
                    None
                }
            },
            FBallConfig::GeneratingSet(s) => match comparison.iter().chain([(set_name.clone(), model.clone())].iter()).find(|c| &c.0 == s) {
                Some((_, m)) => Some(FBallSpec::generators(m.clone())),
                None => {
                    d.error(field, format!("no generating set named '{s}'"));
                    None
                }
            },
        }
    };

    let m = &config.measure;
    let plan = match m.family {
        Family::UniformBall => Some(Plan::Series(MeasureFamily::UniformBall)),
        Family::RandomWalk => {
            if !(0.0..1.0).contains(&m.laziness) {
                d.error("measure.laziness", format!("laziness must lie in [0, 1), got {}", m.laziness));
            } else if m.laziness == 0.0 {
                if let Ok(parity) = Homomorphism::length_parity(model.clone()) {
                    if parity.is_verified() {
                        d.push(
                            Level::Warning,
                            "measure.laziness",
                            "laziness 0 on a bipartite Cayley graph: mu_n vanishes on elements of B(n) whose length has the wrong parity",
                        );
                    }
                }
            }
            Some(Plan::Series(MeasureFamily::RandomWalk { laziness: m.laziness }))
        }
        Family::Padded => {
            let g = match &m.element {
                None => {
                    d.error("measure.element", "padded measure needs an element");
                    None
                }
                Some(w) => match model.parse_element(w) {
                    Err(e) => {
                        d.error("measure.element", e.to_string());
                        None
                    }
                    Ok(g) => match model.order_of(&g, ORDER_PROOF_CAP) {
                        OrderResult::Infinite => Some(g),
                        OrderResult::Finite(k) => {
                            d.error(
                                "measure.element",
                                format!("'{w}' is torsion: order_of proves it has order {k}, padded measures need infinite order"),
                            );
                            None
                        }
                        OrderResult::ExceedsCap => {
                            d.error(
                                "measure.element",
                                format!("order_of found no certificate of infinite order for '{w}' within {ORDER_PROOF_CAP} steps"),
                            );
                            None
                        }
                    },
                },
            };
            let schedule = match &m.padding {
                None => {
                    d.error("measure.padding", "padded measure needs a padding schedule");
                    None
                }
                Some(Padding::Constant(c)) => Some(PaddingSchedule::Constant(*c)),
                Some(Padding::Linear { slope, offset }) => Some(PaddingSchedule::Linear { slope: *slope, offset: *offset }),
                Some(Padding::Exponential { base }) => Some(PaddingSchedule::Exponential { base: *base }),
                Some(Padding::Explicit(v)) => Some(PaddingSchedule::Explicit(v.clone())),
            };
            match (g, schedule) {
                (Some(g), Some(schedule)) => Some(Plan::Series(MeasureFamily::Padded { g, schedule })),
                _ => None,
            }
        }
        Family::FBall => match &m.fball {
            None => {
                d.error("measure.fball", "f-ball measure needs an `fball` entry");
                None
            }
            Some(cfg) => fball(cfg, "measure.fball", &mut d).map(|s| Plan::Series(MeasureFamily::FBall(s))),
        },
        Family::FullGroup => {
            if model.is_finite() {
                Some(Plan::FullGroup)
            } else {
                d.error("measure.family", format!("full-group measure needs a finite group, {} is infinite", model.kind()));
                None
            }
        }
    };

    if let Some(cd) = &config.coset_density {
        if !homs.contains_key(&cd.homomorphism) {
            d.error("coset_density.homomorphism", format!("no homomorphism named '{}'", cd.homomorphism));
        }
        if let Err(e) = model.parse_element(&cd.element) {
            d.error("coset_density.element", e.to_string());
        }
    }

    for (i, check) in config.checks.iter().enumerate() {
        let field = format!("checks[{i}]");
        let hom = |name: &str, d: &mut Diagnostics| {
            if !homs.contains_key(name) {
                d.error(format!("{field}.homomorphism"), format!("no homomorphism named '{name}'"));
            }
        };
        let window = |w: &[usize; 2], d: &mut Diagnostics| {
            if w[0] > w[1] {
                d.error(format!("{field}.window"), format!("window {}..={} is empty", w[0], w[1]));
            } else if !radii.iter().any(|n| (w[0]..=w[1]).contains(n)) {
                d.error(format!("{field}.window"), "window contains none of the declared radii");
            }
        };
        match check {
            CheckSpec::Gustafson { corpus } => {
                if !corpus && !model.is_finite() {
                    d.error(field, "gustafson needs a finite group (or corpus = true)");
                }
            }
            CheckSpec::Gallagher { homomorphism } => {
                hom(homomorphism, &mut d);
                if !model.is_finite() {
                    d.error(field, "gallagher needs a finite group");
                } else if homs.get(homomorphism).is_some_and(|h| !h.is_verified()) {
                    d.error(field, format!("gallagher needs a verified homomorphism, '{homomorphism}' is unverified"));
                }
            }
            CheckSpec::QuotientBound { homomorphism, window: w, .. } => {
                hom(homomorphism, &mut d);
                window(w, &mut d);
            }
            CheckSpec::IndexBound { subgroup, index, window: w, .. } => {
                window(w, &mut d);
                if matches!(subgroup, FBallConfig::GeneratingSet(_)) {
                    d.error(format!("{field}.subgroup"), "index-bound needs a subgroup or kernel, not a generating set");
                } else if fball(subgroup, &format!("{field}.subgroup"), &mut d).is_some()
                    && index.is_none()
                    && !matches!(subgroup, FBallConfig::Kernel(_))
                {
                    d.error(format!("{field}.index"), "index is required unless the subgroup is a kernel");
                }
            }
            CheckSpec::DecreasingTrend { window: w } => window(w, &mut d),
            CheckSpec::Negligibility { window: w, .. } => {
                if let Some(w) = w {
                    window(w, &mut d);
                }
            }
            CheckSpec::TranslationLength { element, m_max } => {
                if *m_max == 0 {
                    d.error(format!("{field}.m_max"), "m_max must be positive");
                }
                if let Err(e) = model.parse_element(element) {
                    d.error(format!("{field}.element"), e.to_string());
                }
            }
            CheckSpec::CentralizerBound { samples, .. } => {
                if *samples == 0 {
                    d.error(format!("{field}.samples"), "samples must be positive");
                }
            }
        }
    }
    if d.has_errors() {
        return (d.0, None);
    }
    let experiment = Experiment {
        config: config.clone(),
        model,
        set_name,
        comparison,
        homs,
        plan: plan.expect("no errors"),
        radii,
        settings,
    };
    (d.0, Some(experiment))
}
