//! Executes a validated experiment and writes its artifacts.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use dcx_core::cayley::{
    ball_cache_path, coset_density_series, growth_fit, load_ball, save_ball, Ball, BallGrower, CosetDensitySeries, FBallSpec,
    GrowthThresholds, SubgroupPredicate,
};
use dcx_core::estimator::{dc_finite, dc_series, dc_series_on_ball, DcSeries, EstimateReport, EstimatorSettings, MeasureFamily, SeriesEntry};
use dcx_core::group::{GroupModel, ModelKind};
use dcx_core::theory::{
    centralizer_linear_bound_check, decreasing_trend_check, gallagher_check, gustafson_check, gustafson_corpus, index_bound_check,
    negligibility_report, quotient_bound_check, translation_length, CheckResult, CheckStatus, DistanceOracle, NegligibilityReport,
    Quantity, TranslationLengthReport, DEFAULT_SAMPLED_TOLERANCE,
};
use serde::Serialize;

use crate::config::{CheckSpec, ExperimentConfig, FBallConfig};
use crate::validate::{Experiment, Plan};

const SEARCH_CAP: usize = 2_000_000;

pub struct RunOptions {
    pub output_dir: PathBuf,
    pub cache_dir: Option<PathBuf>,
    pub threads: usize,
}

pub struct RunSummary {
    pub checks: usize,
    pub failed: usize,
}

#[derive(Serialize)]
struct Stage {
    stage: String,
    seconds: f64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    name: Option<&'a str>,
    version: &'static str,
    schema: u32,
    config: &'a ExperimentConfig,
    generating_set: &'a str,
    radii: &'a [usize],
    threads: usize,
    cache_dir: Option<String>,
    cache_hits: Vec<String>,
    notices: Vec<String>,
    wall_times: Vec<Stage>,
}

#[derive(Serialize)]
struct GrowthEntry {
    thresholds: GrowthThresholds,
    #[serde(flatten)]
    result: GrowthOutcome,
}

#[derive(Serialize)]
#[serde(untagged)]
enum GrowthOutcome {
    Fit(dcx_core::cayley::GrowthFit),
    Error { error: String },
}

#[derive(Serialize)]
struct TranslationEntry {
    element: String,
    report: TranslationLengthReport,
}

#[derive(Serialize)]
struct ChecksFile {
    checks: Vec<CheckResult>,
    growth: GrowthEntry,
    #[serde(skip_serializing_if = "Option::is_none")]
    negligibility: Option<NegligibilityReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    translation_length: Vec<TranslationEntry>,
}

struct Clock {
    stages: Vec<Stage>,
    last: Instant,
}

impl Clock {
    fn new() -> Self {
        Clock { stages: Vec::new(), last: Instant::now() }
    }

    fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        self.stages.push(Stage { stage: stage.into(), seconds: (now - self.last).as_secs_f64() });
        self.last = now;
    }
}

fn write<F>(dir: &Path, name: &str, body: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<()>,
{
    let path = dir.join(name);
    let mut w = BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?);
    body(&mut w)?;
    w.flush().with_context(|| format!("writing {}", path.display()))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    write(dir, name, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)?;
        Ok(())
    })
}

/// B_X(n), from the cache when a matching entry exists.
fn ball(model: &GroupModel, n: usize, settings: &EstimatorSettings, cache: Option<&Path>, hits: &mut Vec<String>) -> Result<Ball> {
    let fingerprint = model.fingerprint();
    let path = cache.map(|dir| ball_cache_path(dir, &fingerprint, n));
    if let Some(path) = &path {
        if let Some(b) = load_ball(path, &fingerprint, n)? {
            hits.push(path.file_name().unwrap_or_default().to_string_lossy().into_owned());
            return Ok(b);
        }
    }
    let mut grower = BallGrower::new(model, &settings.ball)?;
    grower.grow_to(n)?;
    let b = grower.into_ball();
    if let Some(path) = &path {
        fs::create_dir_all(path.parent().expect("cache file has a directory"))?;
        save_ball(&b, path)?;
    }
    Ok(b)
}

fn full_group_series(model: &GroupModel, radii: &[usize]) -> Result<DcSeries> {
    let order = model.group_order()?;
    let dc = dc_finite(model)?;
    let report = EstimateReport::exact_ratio(dc);
    Ok(DcSeries {
        family: "full-group".into(),
        entries: radii.iter().map(|&n| SeriesEntry { n, ball_size: order, report: report.clone() }).collect(),
        running_max: vec![report.value; radii.len()],
        no_limit_claimed: true,
        notices: Vec::new(),
    })
}

fn series(exp: &Experiment, model: &GroupModel, ball: &Ball) -> Result<DcSeries> {
    Ok(match &exp.plan {
        Plan::FullGroup => full_group_series(model, &exp.radii)?,
        Plan::Series(MeasureFamily::UniformBall) => dc_series_on_ball(model, ball, &exp.radii, &exp.settings)?,
        Plan::Series(family) => dc_series(model, &exp.radii, family, &exp.settings)?,
    })
}

/// `n,ball_size,ratio,local_degree` with ratio |B(n)|/|B(n-1)| and the local
/// degree log(ratio)/log(n/(n-1)).
fn write_growth_csv<W: Write>(ball: &Ball, radii: &[usize], mut out: W) -> Result<()> {
    writeln!(out, "n,ball_size,ratio,local_degree")?;
    for &n in radii {
        let size = ball.size_at(n);
        let (ratio, degree) = if n == 0 {
            (String::new(), String::new())
        } else {
            let r = size as f64 / ball.size_at(n - 1) as f64;
            let deg = if n >= 2 { (r.ln() / (n as f64 / (n - 1) as f64).ln()).to_string() } else { String::new() };
            (r.to_string(), deg)
        };
        writeln!(out, "{n},{size},{ratio},{degree}")?;
    }
    Ok(())
}

fn write_coset_csv<W: Write>(cd: &CosetDensitySeries, radii: &[usize], mut out: W) -> Result<()> {
    writeln!(out, "n,ball_size,count,value,exact_num,exact_den,max_deviation")?;
    for row in cd.rows.iter().filter(|r| radii.contains(&r.n)) {
        let v = *row.value.numer() as f64 / *row.value.denom() as f64;
        writeln!(out, "{},{},{},{v},{},{},{}", row.n, row.ball_size, row.count, row.value.numer(), row.value.denom(), row.max_deviation)?;
    }
    Ok(())
}

fn write_negligibility_csv<W: Write>(r: &NegligibilityReport, radii: &[usize], mut out: W) -> Result<()> {
    writeln!(out, "n,ball_size,torsion_count,torsion_density,max_centralizer_density,sample_size")?;
    let opt = |v: Option<String>| v.unwrap_or_default();
    for (i, &n) in r.radii.iter().enumerate().filter(|(_, n)| radii.contains(n)) {
        let count = opt(r.torsion_counts.as_ref().map(|c| c[i].to_string()));
        let density = opt(r.torsion_density.as_ref().map(|c| c[i].to_string()));
        let cent = opt(r.max_centralizer_density[i].map(|v| v.to_string()));
        writeln!(out, "{n},{},{count},{density},{cent},{}", r.ball_sizes[i], r.sample_size[i])?;
    }
    Ok(())
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

/// Both torsion and centralizer densities strictly decrease across the window.
fn negligibility_check(r: &NegligibilityReport, window: [usize; 2]) -> CheckResult {
    let idx: Vec<usize> = (0..r.radii.len()).filter(|&i| (window[0]..=window[1]).contains(&r.radii[i])).collect();
    let cent: Option<Vec<f64>> = idx.iter().map(|&i| r.max_centralizer_density[i]).collect();
    let tors: Option<Vec<f64>> = r.torsion_density.as_ref().map(|t| idx.iter().map(|&i| t[i]).collect());
    let ends = |v: &[f64]| (v.first().copied().unwrap_or(f64::NAN), v.last().copied().unwrap_or(f64::NAN));
    let (status, lhs, rhs, detail) = match (&tors, &cent) {
        (Some(t), Some(c)) => {
            let ok = strictly_decreasing(t) && strictly_decreasing(c);
            let (t0, t1) = ends(t);
            let detail = format!(
                "torsion density strictly decreasing: {}, max centralizer density strictly decreasing: {}",
                strictly_decreasing(t),
                strictly_decreasing(c)
            );
            (if ok { CheckStatus::Pass } else { CheckStatus::Fail }, t1, t0, detail)
        }
        (None, _) => (CheckStatus::Inconclusive, f64::NAN, f64::NAN, "some element has no order certificate".to_string()),
        (_, None) => (CheckStatus::Inconclusive, f64::NAN, f64::NAN, "no infinite-order element sampled at some radius".to_string()),
    };
    CheckResult {
        name: format!("negligibility[{}..={}]", window[0], window[1]),
        status,
        lhs: Quantity::Approx(lhs),
        rhs: Quantity::Approx(rhs),
        tolerance: 0.0,
        detail,
    }
}

fn subgroup_spec(exp: &Experiment, cfg: &FBallConfig) -> Result<(FBallSpec, Option<u64>)> {
    Ok(match cfg {
        FBallConfig::Kernel(name) => {
            let hom = &exp.homs[name];
            (FBallSpec::subgroup(SubgroupPredicate::Kernel(hom.clone())), Some(hom.kernel_index()? as u64))
        }
        FBallConfig::Subgroup(_) => (FBallSpec::subgroup(SubgroupPredicate::translations()), None),
        FBallConfig::GeneratingSet(_) => anyhow::bail!("index-bound needs a subgroup"),
    })
}

fn distance_oracle<'a>(model: &GroupModel, ball: &'a Ball, reach: u64) -> DistanceOracle<'a> {
    if matches!(model.kind(), ModelKind::Free { .. }) && model.has_standard_generators() {
        DistanceOracle::FreeReduced
    } else if (ball.radius() as u64) >= reach {
        DistanceOracle::Ball(ball)
    } else {
        DistanceOracle::Search { cap: SEARCH_CAP }
    }
}

pub fn run(exp: &Experiment, opts: &RunOptions) -> Result<RunSummary> {
    let out = &opts.output_dir;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let cache = opts.cache_dir.as_deref();
    let mut clock = Clock::new();
    let mut hits = Vec::new();
    let model = &exp.model;
    let n_max = *exp.radii.last().expect("validated radii");

    let b = ball(model, n_max, &exp.settings, cache, &mut hits)?;
    clock.lap("ball");

    write(out, "growth.csv", |w| write_growth_csv(&b, &exp.radii, w))?;
    let thresholds = GrowthThresholds {
        exponential_ratio: exp.config.growth.exponential_ratio,
        polynomial_ratio: exp.config.growth.polynomial_ratio,
    };
    let sizes: Vec<(usize, u64)> = (exp.radii[0].max(1)..=n_max).map(|n| (n, b.size_at(n) as u64)).collect();
    let growth = GrowthEntry {
        result: match growth_fit(&sizes, &thresholds) {
            Ok(fit) => GrowthOutcome::Fit(fit),
            Err(e) => GrowthOutcome::Error { error: e.to_string() },
        },
        thresholds,
    };
    clock.lap("growth");

    let main = series(exp, model, &b)?;
    write(out, "series.csv", |w| Ok(main.write_csv(w)?))?;
    let mut notices = main.notices.clone();
    if let Some((name, other)) = &exp.comparison {
        let ob = ball(other, n_max, &exp.settings, cache, &mut hits)?;
        let s = series(exp, other, &ob)?;
        write(out, &format!("series_{}.csv", exp.set_name), |w| Ok(main.write_csv(w)?))?;
        write(out, &format!("series_{name}.csv"), |w| Ok(s.write_csv(w)?))?;
        notices.extend(s.notices.iter().map(|m| format!("{name}: {m}")));
    }
    clock.lap("series");

    if let Some(cd) = &exp.config.coset_density {
        let hom = &exp.homs[&cd.homomorphism];
        let g = model.parse_element(&cd.element)?;
        let series = coset_density_series(model, hom, &g, n_max, &exp.settings.ball)?;
        write(out, "coset_density.csv", |w| write_coset_csv(&series, &exp.radii, w))?;
        clock.lap("coset-density");
    }

    let mut checks = Vec::new();
    let mut negligibility = None;
    let mut translations = Vec::new();
    for check in &exp.config.checks {
        match check {
            CheckSpec::Gustafson { corpus } => {
                let groups = if *corpus {
                    gustafson_corpus()?
                } else {
                    vec![(exp.config.name.clone().unwrap_or_else(|| model.kind().to_string()), model.clone())]
                };
                checks.extend(gustafson_check(&groups)?);
            }
            CheckSpec::Gallagher { homomorphism } => checks.push(gallagher_check(&exp.homs[homomorphism])?),
            CheckSpec::QuotientBound { homomorphism, window, tolerance } => checks.push(quotient_bound_check(
                &exp.homs[homomorphism],
                &main,
                (window[0], window[1]),
                tolerance.unwrap_or(DEFAULT_SAMPLED_TOLERANCE),
            )?),
            CheckSpec::IndexBound { subgroup, index, window, tolerance } => {
                let (spec, kernel_index) = subgroup_spec(exp, subgroup)?;
                let index = index.or(kernel_index).expect("validated index");
                let sub = dc_series(model, &exp.radii, &MeasureFamily::FBall(spec), &exp.settings)?;
                notices.extend(sub.notices.iter().map(|m| format!("index-bound subgroup: {m}")));
                checks.push(index_bound_check(&main, &sub, index, (window[0], window[1]), tolerance.unwrap_or(DEFAULT_SAMPLED_TOLERANCE))?);
            }
            CheckSpec::DecreasingTrend { window } => checks.push(decreasing_trend_check(&main, (window[0], window[1]))?),
            CheckSpec::Negligibility { samples, seed, window } => {
                let report = negligibility_report(model, n_max, *samples, *seed, &exp.settings.ball)?;
                write(out, "negligibility.csv", |w| write_negligibility_csv(&report, &exp.radii, w))?;
                if let Some(w) = window {
                    checks.push(negligibility_check(&report, *w));
                }
                negligibility = Some(report);
            }
            CheckSpec::TranslationLength { element, m_max } => {
                let g = model.parse_element(element)?;
                let reach = m_max.saturating_mul(b.distance(&g).unwrap_or(usize::MAX) as u64);
                let report = translation_length(model, &g, *m_max, distance_oracle(model, &b, reach))?;
                translations.push(TranslationEntry { element: element.clone(), report });
            }
            CheckSpec::CentralizerBound { samples, n, p, seed } => {
                checks.push(centralizer_linear_bound_check(model, *samples, *n, *p, *seed)?)
            }
        }
        clock.lap(check.label());
    }

    let failed = checks.iter().filter(|c| c.status == CheckStatus::Fail).count();
    let summary = RunSummary { checks: checks.len(), failed };
    let file = ChecksFile { checks, growth, negligibility, translation_length: translations };
    write_json(out, "checks.json", &file)?;

    let manifest = Manifest {
        name: exp.config.name.as_deref(),
        version: env!("CARGO_PKG_VERSION"),
        schema: exp.config.schema,
        config: &exp.config,
        generating_set: &exp.set_name,
        radii: &exp.radii,
        threads: opts.threads,
        cache_dir: opts.cache_dir.as_ref().map(|p| p.display().to_string()),
        cache_hits: hits,
        notices,
        wall_times: clock.stages,
    };
    write_json(out, "manifest.json", &manifest)?;
    Ok(summary)
}
