//! Exact and sampled dc/ds values, and per-radius series.

use std::io::Write;

use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cayley::{enumerate_ball, f_ball, Ball, BallGrower, BallOptions, FBallSpec};
use crate::equations::EquationSystem;
use crate::error::{Error, Result};
use crate::group::{Element, GroupModel};
use crate::measures::{padded_measure, Measure, RandomWalk};

/// Default exact-work budget, in element multiplications.
pub const DEFAULT_BUDGET: u128 = 1_000_000_000;
pub const MIN_SAMPLES: u64 = 100;
/// Sampling is split into this many independent RNG streams, so results do
/// not depend on the number of worker threads.
pub const SAMPLING_STREAMS: u64 = 64;
const Z95: f64 = 1.959963984540054;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Sampled,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Sampled => "sampled",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateReport {
    pub value: f64,
    /// Present for exact values over uniform measures; the denominator is |Supp|^k.
    pub exact: Option<Ratio<u128>>,
    pub mode: Mode,
    pub samples: u64,
    pub ci95: Option<(f64, f64)>,
    pub seed: Option<u64>,
}

impl EstimateReport {
    pub fn exact_ratio(r: Ratio<u128>) -> Self {
        EstimateReport { value: ratio_f64(&r), exact: Some(r), mode: Mode::Exact, samples: 0, ci95: None, seed: None }
    }

    fn exact_real(value: f64) -> Self {
        EstimateReport { value: value.clamp(0.0, 1.0), exact: None, mode: Mode::Exact, samples: 0, ci95: None, seed: None }
    }

    /// Upper end of the admissible range: the value itself, or the CI upper bound.
    pub fn upper(&self) -> f64 {
        self.ci95.map_or(self.value, |c| c.1)
    }

    pub fn lower(&self) -> f64 {
        self.ci95.map_or(self.value, |c| c.0)
    }
}

pub(crate) fn ratio_f64(r: &Ratio<u128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// 95% Wilson score interval for `hits` successes in `n` trials.
pub fn wilson_interval(hits: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = hits as f64 / nf;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = Z95 * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    let lo = if hits == 0 { 0.0 } else { (center - half).clamp(0.0, p) };
    let hi = if hits == n { 1.0 } else { (center + half).clamp(p, 1.0) };
    (lo, hi)
}

fn check_budget(work: Option<u128>, budget: u128) -> Result<()> {
    match work {
        Some(w) if w <= budget => Ok(()),
        Some(w) => Err(Error::BudgetExceeded { work: w, budget }),
        None => Err(Error::BudgetExceeded { work: u128::MAX, budget }),
    }
}

/// Multiplications spent by an unordered pair scan over `len` elements.
pub fn pair_scan_work(len: usize) -> u128 {
    let n = len as u128;
    n * (n + 1)
}

/// Counts ordered commuting pairs among `len` elements as
/// `len + 2·#{i < j : commute}`.
fn ordered_commuting_pairs<'a, F>(model: &GroupModel, len: usize, get: F) -> u128
where
    F: Fn(usize) -> &'a Element + Sync,
{
    let unordered: u64 = (0..len)
        .into_par_iter()
        .with_min_len(16)
        .map(|i| {
            let u = get(i);
            (i + 1..len).filter(|&j| model.commutes(u, get(j))).count() as u64
        })
        .sum();
    len as u128 + 2 * unordered as u128
}

fn weighted_commuting_mass(model: &GroupModel, mu: &Measure) -> f64 {
    let support = mu.support();
    let probs = mu.probs();
    let len = mu.len();
    let off_diagonal: f64 = (0..len)
        .into_par_iter()
        .with_min_len(16)
        .map(|i| {
            let u = &support[i];
            let s: f64 = (i + 1..len).filter(|&j| model.commutes(u, &support[j])).map(|j| probs[j]).sum();
            probs[i] * s
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .sum();
    let diagonal: f64 = probs.iter().map(|p| p * p).sum();
    diagonal + 2.0 * off_diagonal
}

/// Exact |{(u,v) ∈ B² : uv = vu}| / |B|², unreduced.
pub fn dc_exact_on_ball(model: &GroupModel, ball: &Ball, budget: u128) -> Result<Ratio<u128>> {
    dc_exact_on_prefix(model, ball, ball.len(), budget)
}

fn dc_exact_on_prefix(model: &GroupModel, ball: &Ball, len: usize, budget: u128) -> Result<Ratio<u128>> {
    check_budget(Some(pair_scan_work(len)), budget)?;
    let count = ordered_commuting_pairs(model, len, |i| ball.element(i));
    Ok(Ratio::new_raw(count, (len as u128) * (len as u128)))
}

/// Exact dc of a list of elements (e.g. a subgroup), unreduced.
pub fn dc_exact_on_elements(model: &GroupModel, elements: &[Element], budget: u128) -> Result<Ratio<u128>> {
    if elements.is_empty() {
        return Err(Error::InvalidArgument("empty element list".into()));
    }
    check_budget(Some(pair_scan_work(elements.len())), budget)?;
    let count = ordered_commuting_pairs(model, elements.len(), |i| &elements[i]);
    let n = elements.len() as u128;
    Ok(Ratio::new_raw(count, n * n))
}

/// Exact dc over the whole finite group.
pub fn dc_finite(model: &GroupModel) -> Result<Ratio<u128>> {
    if !model.is_finite() {
        return Err(Error::InfiniteModel);
    }
    let all = model.elements()?;
    dc_exact_on_ball(model, &all, DEFAULT_BUDGET)
}

/// Exact commuting-pair mass under `mu × mu`.
pub fn dc_exact_on_measure(model: &GroupModel, mu: &Measure, budget: u128) -> Result<EstimateReport> {
    check_budget(Some(pair_scan_work(mu.len())), budget)?;
    if mu.is_uniform() {
        let len = mu.len();
        let support = mu.support();
        let count = ordered_commuting_pairs(model, len, |i| &support[i]);
        let n = len as u128;
        Ok(EstimateReport::exact_ratio(Ratio::new_raw(count, n * n)))
    } else {
        Ok(EstimateReport::exact_real(weighted_commuting_mass(model, mu)))
    }
}

/// Exact |{u ∈ B : ug = gu}|.
pub fn centralizer_in_ball(model: &GroupModel, g: &Element, ball: &Ball) -> u64 {
    (0..ball.len())
        .into_par_iter()
        .with_min_len(256)
        .filter(|&i| model.commutes(ball.element(i), g))
        .count() as u64
}

fn tuple_work(support: usize, e: &EquationSystem) -> Option<u128> {
    (support as u128)
        .checked_pow(e.arity() as u32)?
        .checked_mul(e.total_length().max(1) as u128)
}

/// Σ over Supp(mu)^k of Π μ(gᵢ) · [tuple solves E].
pub fn ds_exact(model: &GroupModel, e: &EquationSystem, mu: &Measure, budget: u128) -> Result<EstimateReport> {
    let k = e.arity();
    let len = mu.len();
    check_budget(tuple_work(len, e), budget)?;
    let total = (len as u128).pow(k as u32);
    let support = mu.support();
    let probs = mu.probs();
    let first_len = if k == 0 { 1 } else { len };
    let per_first: Vec<(u128, f64)> = (0..first_len)
        .into_par_iter()
        .map(|first| -> Result<(u128, f64)> {
            let mut idx = vec![0usize; k];
            if k > 0 {
                idx[0] = first;
            }
            let mut tuple: Vec<Element> = idx.iter().map(|&i| support[i].clone()).collect();
            let mut count = 0u128;
            let mut mass = 0.0;
            loop {
                if e.is_solution(model, &tuple)? {
                    count += 1;
                    if !mu.is_uniform() {
                        mass += idx.iter().map(|&i| probs[i]).product::<f64>();
                    }
                }
                // odometer over coordinates 1..k
                let mut pos = k;
                loop {
                    if pos <= 1 {
                        return Ok((count, mass));
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < len {
                        tuple[pos] = support[idx[pos]].clone();
                        break;
                    }
                    idx[pos] = 0;
                    tuple[pos] = support[0].clone();
                }
            }
        })
        .collect::<Result<_>>()?;
    if mu.is_uniform() {
        let count: u128 = per_first.iter().map(|p| p.0).sum();
        Ok(EstimateReport::exact_ratio(Ratio::new_raw(count, total)))
    } else {
        Ok(EstimateReport::exact_real(per_first.iter().map(|p| p.1).sum()))
    }
}

/// Counts hits of `trial` over `samples` draws split across fixed RNG streams.
fn sample_hits<F>(samples: u64, seed: u64, trial: F) -> Result<u64>
where
    F: Fn(&mut ChaCha8Rng) -> Result<bool> + Sync,
{
    let hits: Vec<u64> = (0..SAMPLING_STREAMS)
        .into_par_iter()
        .map(|stream| -> Result<u64> {
            let quota = samples / SAMPLING_STREAMS + u64::from(stream < samples % SAMPLING_STREAMS);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            let mut hits = 0;
            for _ in 0..quota {
                hits += u64::from(trial(&mut rng)?);
            }
            Ok(hits)
        })
        .collect::<Result<_>>()?;
    Ok(hits.iter().sum())
}

fn sampled_report(hits: u64, samples: u64, seed: u64) -> EstimateReport {
    let value = hits as f64 / samples as f64;
    EstimateReport { value, exact: None, mode: Mode::Sampled, samples, ci95: Some(wilson_interval(hits, samples)), seed: Some(seed) }
}

fn check_samples(samples: u64) -> Result<()> {
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!("at least {MIN_SAMPLES} samples are required, got {samples}")));
    }
    Ok(())
}

/// Monte-Carlo ds with i.i.d. tuples from mu^×k and a Wilson interval.
pub fn ds_sampled(model: &GroupModel, e: &EquationSystem, mu: &Measure, samples: u64, seed: u64) -> Result<EstimateReport> {
    check_samples(samples)?;
    let sampler = mu.sampler();
    let support = mu.support();
    let hits = sample_hits(samples, seed, |rng| {
        let tuple: Vec<Element> = (0..e.arity()).map(|_| support[sampler.sample(rng)].clone()).collect();
        e.is_solution(model, &tuple)
    })?;
    Ok(sampled_report(hits, samples, seed))
}

/// Monte-Carlo dc: commuting pairs drawn from mu × mu.
pub fn dc_sampled(model: &GroupModel, mu: &Measure, samples: u64, seed: u64) -> Result<EstimateReport> {
    check_samples(samples)?;
    let sampler = mu.sampler();
    let support = mu.support();
    let hits = sample_hits(samples, seed, |rng| {
        let u = &support[sampler.sample(rng)];
        let v = &support[sampler.sample(rng)];
        Ok(model.commutes(u, v))
    })?;
    Ok(sampled_report(hits, samples, seed))
}

fn dc_sampled_on_prefix(model: &GroupModel, ball: &Ball, len: usize, samples: u64, seed: u64) -> Result<EstimateReport> {
    use rand::Rng;
    check_samples(samples)?;
    let hits = sample_hits(samples, seed, |rng| {
        let u = ball.element(rng.gen_range(0..len));
        let v = ball.element(rng.gen_range(0..len));
        Ok(model.commutes(u, v))
    })?;
    Ok(sampled_report(hits, samples, seed))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorMode {
    #[default]
    Auto,
    Exact,
    Sampled,
}

#[derive(Clone, Debug)]
pub struct EstimatorSettings {
    pub mode: EstimatorMode,
    pub budget: u128,
    pub samples: u64,
    pub seed: Option<u64>,
    pub ball: BallOptions,
}

impl Default for EstimatorSettings {
    fn default() -> Self {
        EstimatorSettings { mode: EstimatorMode::Auto, budget: DEFAULT_BUDGET, samples: 100_000, seed: None, ball: BallOptions::default() }
    }
}

impl EstimatorSettings {
    pub fn exact() -> Self {
        EstimatorSettings { mode: EstimatorMode::Exact, ..Default::default() }
    }

    pub fn sampled(samples: u64, seed: u64) -> Self {
        EstimatorSettings { mode: EstimatorMode::Sampled, samples, seed: Some(seed), ..Default::default() }
    }

    /// Per-radius seed, so each entry is reproducible on its own.
    fn seed_for(&self, n: usize) -> Result<u64> {
        let seed = self.seed.ok_or_else(|| Error::InvalidArgument("sampled mode requires a seed".into()))?;
        Ok(seed.wrapping_add((n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
    }

    fn use_exact(&self, work: u128, n: usize, notices: &mut Vec<String>) -> Result<bool> {
        match self.mode {
            EstimatorMode::Exact => {
                check_budget(Some(work), self.budget)?;
                Ok(true)
            }
            EstimatorMode::Sampled => Ok(false),
            EstimatorMode::Auto if work <= self.budget => Ok(true),
            EstimatorMode::Auto => {
                if self.seed.is_none() {
                    return Err(Error::BudgetExceeded { work, budget: self.budget });
                }
                notices.push(format!("n={n}: exact work {work} exceeds budget {}, sampling", self.budget));
                Ok(false)
            }
        }
    }
}

/// M_n for the padded family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PaddingSchedule {
    Constant(u64),
    /// M_n = slope·n + offset
    Linear { slope: u64, offset: u64 },
    /// M_n = base^n, saturating
    Exponential { base: u64 },
    Explicit(Vec<u64>),
}

impl PaddingSchedule {
    pub fn at(&self, n: usize) -> u64 {
        match self {
            PaddingSchedule::Constant(m) => *m,
            PaddingSchedule::Linear { slope, offset } => slope.saturating_mul(n as u64).saturating_add(*offset),
            PaddingSchedule::Exponential { base } => base.saturating_pow(n as u32),
            PaddingSchedule::Explicit(v) => v.get(n).or(v.last()).copied().unwrap_or(0),
        }
    }
}

#[derive(Clone, Debug)]
pub enum MeasureFamily {
    UniformBall,
    RandomWalk { laziness: f64 },
    Padded { g: Element, schedule: PaddingSchedule },
    FBall(FBallSpec),
}

impl MeasureFamily {
    pub fn label(&self) -> String {
        match self {
            MeasureFamily::UniformBall => "uniform-ball".into(),
            MeasureFamily::RandomWalk { laziness } => format!("random-walk(laziness={laziness})"),
            MeasureFamily::Padded { schedule, .. } => format!("padded({schedule:?})"),
            MeasureFamily::FBall(spec) => format!("f-ball({})", spec.description),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesEntry {
    pub n: usize,
    /// Size of the support of μ_n (|B_X(n)| for uniform balls).
    pub ball_size: usize,
    pub report: EstimateReport,
}

/// Finite-n values and their prefix maxima. No limit is computed or implied.
#[derive(Clone, Debug, Serialize)]
pub struct DcSeries {
    pub family: String,
    pub entries: Vec<SeriesEntry>,
    pub running_max: Vec<f64>,
    pub no_limit_claimed: bool,
    pub notices: Vec<String>,
}

impl DcSeries {
    fn new(family: String) -> Self {
        DcSeries { family, entries: Vec::new(), running_max: Vec::new(), no_limit_claimed: true, notices: Vec::new() }
    }

    fn push(&mut self, n: usize, ball_size: usize, report: EstimateReport) {
        let prev = self.running_max.last().copied().unwrap_or(f64::NEG_INFINITY);
        self.running_max.push(prev.max(report.value));
        self.entries.push(SeriesEntry { n, ball_size, report });
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.report.value).collect()
    }

    pub fn entry(&self, n: usize) -> Option<&SeriesEntry> {
        self.entries.iter().find(|e| e.n == n)
    }

    pub fn window(&self, lo: usize, hi: usize) -> impl Iterator<Item = &SeriesEntry> {
        self.entries.iter().filter(move |e| e.n >= lo && e.n <= hi)
    }

    /// `n,ball_size,mode,value,exact_num,exact_den,ci_lo,ci_hi,seed`
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "n,ball_size,mode,value,exact_num,exact_den,ci_lo,ci_hi,seed")?;
        for e in &self.entries {
            let r = &e.report;
            let (num, den) = r.exact.map_or((String::new(), String::new()), |q| (q.numer().to_string(), q.denom().to_string()));
            let (lo, hi) = r.ci95.map_or((String::new(), String::new()), |c| (c.0.to_string(), c.1.to_string()));
            let seed = r.seed.map_or(String::new(), |s| s.to_string());
            writeln!(out, "{},{},{},{},{num},{den},{lo},{hi},{seed}", e.n, e.ball_size, r.mode.as_str(), r.value)?;
        }
        Ok(())
    }
}

/// Per-radius dc values for the given measure family over ascending radii.
pub fn dc_series(model: &GroupModel, radii: &[usize], family: &MeasureFamily, settings: &EstimatorSettings) -> Result<DcSeries> {
    if radii.is_empty() || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("radii must be nonempty and strictly ascending".into()));
    }
    if settings.mode == EstimatorMode::Sampled {
        check_samples(settings.samples)?;
        settings.seed_for(0)?;
    }
    let n_max = *radii.last().expect("nonempty");
    let mut series = DcSeries::new(family.label());
    match family {
        MeasureFamily::UniformBall => {
            let mut grower = BallGrower::new(model, &settings.ball)?;
            grower.grow_to(n_max)?;
            return dc_series_on_ball(model, &grower.into_ball(), radii, settings);
        }
        MeasureFamily::FBall(spec) => {
            let ball = f_ball(model, spec, n_max, &settings.ball)?;
            for &n in radii {
                let len = ball.size_at(n);
                let report = prefix_estimate(model, &ball, len, n, settings, &mut series.notices)?;
                series.push(n, len, report);
            }
        }
        MeasureFamily::RandomWalk { laziness } => {
            let mut walk = RandomWalk::new(model, *laziness)?.with_cap(settings.ball.cap);
            for &n in radii {
                while walk.steps() < n {
                    walk.step()?;
                }
                let mu = walk.measure()?;
                let report = measure_estimate(model, &mu, n, settings, &mut series.notices)?;
                series.push(n, mu.len(), report);
            }
        }
        MeasureFamily::Padded { g, schedule } => {
            let mut grower = BallGrower::new(model, &settings.ball)?;
            for &n in radii {
                let ball = grower.grow_to(n)?.truncated(n);
                let mu = padded_measure(model, &ball, g, schedule.at(n))?;
                let report = measure_estimate(model, &mu, n, settings, &mut series.notices)?;
                series.push(n, mu.len(), report);
            }
        }
    }
    Ok(series)
}

/// Uniform-ball series over an already enumerated ball of radius ≥ max(radii).
pub fn dc_series_on_ball(model: &GroupModel, ball: &Ball, radii: &[usize], settings: &EstimatorSettings) -> Result<DcSeries> {
    if radii.is_empty() || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("radii must be nonempty and strictly ascending".into()));
    }
    let n_max = *radii.last().expect("nonempty");
    if ball.radius() < n_max && !ball.is_complete() {
        return Err(Error::InvalidArgument(format!("ball has radius {} < {n_max}", ball.radius())));
    }
    let mut series = DcSeries::new(MeasureFamily::UniformBall.label());
    for &n in radii {
        let len = ball.size_at(n);
        let report = prefix_estimate(model, ball, len, n, settings, &mut series.notices)?;
        series.push(n, len, report);
    }
    Ok(series)
}

fn prefix_estimate(model: &GroupModel, ball: &Ball, len: usize, n: usize, settings: &EstimatorSettings, notices: &mut Vec<String>) -> Result<EstimateReport> {
    if len == 0 {
        return Err(Error::InvalidArgument(format!("empty ball at radius {n}")));
    }
    if settings.use_exact(pair_scan_work(len), n, notices)? {
        Ok(EstimateReport::exact_ratio(dc_exact_on_prefix(model, ball, len, settings.budget)?))
    } else {
        dc_sampled_on_prefix(model, ball, len, settings.samples, settings.seed_for(n)?)
    }
}

fn measure_estimate(model: &GroupModel, mu: &Measure, n: usize, settings: &EstimatorSettings, notices: &mut Vec<String>) -> Result<EstimateReport> {
    if settings.use_exact(pair_scan_work(mu.len()), n, notices)? {
        dc_exact_on_measure(model, mu, settings.budget)
    } else {
        dc_sampled(model, mu, settings.samples, settings.seed_for(n)?)
    }
}

/// Exact dc on B_X(n) for each n in `radii`, sharing one enumeration.
pub fn dc_exact_series(model: &GroupModel, radii: &[usize]) -> Result<DcSeries> {
    dc_series(model, radii, &MeasureFamily::UniformBall, &EstimatorSettings::exact())
}

/// Uniform measure on B_X(n).
pub fn uniform_ball_measure(model: &GroupModel, n: usize, options: &BallOptions) -> Result<Measure> {
    Measure::uniform(enumerate_ball(model, n, options)?.iter().cloned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::presets;
    use crate::measures::uniform_on_ball;

    fn ball(model: &GroupModel, n: usize) -> Ball {
        enumerate_ball(model, n, &Default::default()).unwrap()
    }

    #[test]
    fn quaternion_is_five_eighths() {
        assert_eq!(dc_finite(&presets::quaternion()).unwrap(), Ratio::new(5, 8));
    }

    #[test]
    fn finite_values() {
        assert_eq!(dc_finite(&presets::cyclic(4).unwrap()).unwrap(), Ratio::from_integer(1));
        let s3 = dc_finite(&presets::symmetric(3).unwrap()).unwrap();
        assert_eq!((*s3.numer(), *s3.denom()), (18, 36));
        assert!(matches!(dc_finite(&presets::free(2)), Err(Error::InfiniteModel)));
    }

    #[test]
    fn free_group_radius_one() {
        let f2 = presets::free(2);
        assert_eq!(dc_exact_on_ball(&f2, &ball(&f2, 1), DEFAULT_BUDGET).unwrap(), Ratio::new(17, 25));
    }

    #[test]
    fn abelian_balls_are_one() {
        let z3 = presets::free_abelian(3);
        assert_eq!(dc_exact_on_ball(&z3, &ball(&z3, 3), DEFAULT_BUDGET).unwrap(), Ratio::from_integer(1));
    }

    #[test]
    fn budget_is_enforced() {
        let f2 = presets::free(2);
        assert!(matches!(dc_exact_on_ball(&f2, &ball(&f2, 3), 100), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn symmetric_count_matches_double_loop() {
        let h = presets::heisenberg();
        let b = ball(&h, 3);
        let mut count = 0u128;
        for u in b.iter() {
            for v in b.iter() {
                count += u128::from(h.mul(u, v) == h.mul(v, u));
            }
        }
        let n = b.len() as u128;
        assert_eq!(dc_exact_on_ball(&h, &b, DEFAULT_BUDGET).unwrap(), Ratio::new_raw(count, n * n));
    }

    #[test]
    fn ds_examples() {
        let z = presets::integers();
        let mu = uniform_on_ball(&ball(&z, 1)).unwrap();
        let sq = EquationSystem::parse(&["x1^2"]).unwrap();
        assert_eq!(ds_exact(&z, &sq, &mu, DEFAULT_BUDGET).unwrap().exact, Some(Ratio::new(1, 3)));

        let s3 = presets::symmetric(3).unwrap();
        let all = uniform_on_ball(&s3.elements().unwrap()).unwrap();
        let meta = EquationSystem::parse(&["[[x1,x2],[x3,x4]]"]).unwrap();
        let r = ds_exact(&s3, &meta, &all, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.exact, Some(Ratio::from_integer(1)));
        assert_eq!(*r.exact.unwrap().denom(), 6u128.pow(4));
    }

    #[test]
    fn ds_of_commutator_is_dc() {
        let f2 = presets::free(2);
        let b = ball(&f2, 2);
        let mu = uniform_on_ball(&b).unwrap();
        let ds = ds_exact(&f2, &EquationSystem::commutation(), &mu, DEFAULT_BUDGET).unwrap();
        assert_eq!(ds.exact.unwrap(), dc_exact_on_ball(&f2, &b, DEFAULT_BUDGET).unwrap());
    }

    #[test]
    fn weighted_pair_mass_agrees_with_tuple_mass() {
        let h = presets::heisenberg();
        let mu = crate::measures::random_walk_measure(&h, 3, 0.2).unwrap();
        let a = dc_exact_on_measure(&h, &mu, DEFAULT_BUDGET).unwrap().value;
        let b = ds_exact(&h, &EquationSystem::commutation(), &mu, DEFAULT_BUDGET).unwrap().value;
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn sampling_is_deterministic_and_covers() {
        let q8 = presets::quaternion();
        let mu = uniform_on_ball(&q8.elements().unwrap()).unwrap();
        let e = EquationSystem::commutation();
        let a = ds_sampled(&q8, &e, &mu, 20_000, 11).unwrap();
        let b = ds_sampled(&q8, &e, &mu, 20_000, 11).unwrap();
        assert_eq!(a, b);
        let (lo, hi) = a.ci95.unwrap();
        assert!(lo <= a.value && a.value <= hi);
        assert!((a.value - 0.625).abs() < 0.02);
        assert!(ds_sampled(&q8, &e, &mu, 99, 1).is_err());
    }

    #[test]
    fn sampled_abelian_is_one() {
        let z2 = presets::free_abelian(2);
        let mu = uniform_on_ball(&ball(&z2, 3)).unwrap();
        let r = ds_sampled(&z2, &EquationSystem::commutation(), &mu, 1000, 3).unwrap();
        assert_eq!(r.value, 1.0);
        let (lo, hi) = r.ci95.unwrap();
        assert_eq!(hi, 1.0);
        assert!(lo > 0.99 && lo < 1.0);
    }

    #[test]
    fn wilson_bounds() {
        assert_eq!(wilson_interval(0, 100).0, 0.0);
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
    }

    #[test]
    fn centralizers() {
        let f2 = presets::free(2);
        let b = ball(&f2, 3);
        assert_eq!(centralizer_in_ball(&f2, &f2.identity(), &b), b.len() as u64);
        assert_eq!(centralizer_in_ball(&f2, &f2.parse_element("a").unwrap(), &b), 7);
        let h = presets::heisenberg();
        let hb = ball(&h, 4);
        let c = h.parse_element("a b A B").unwrap();
        assert_eq!(centralizer_in_ball(&h, &c, &hb), hb.len() as u64);
    }

    #[test]
    fn series_shapes() {
        let z2 = presets::free_abelian(2);
        let radii: Vec<usize> = (1..=10).collect();
        let s = dc_exact_series(&z2, &radii).unwrap();
        assert!(s.values().iter().all(|&v| v == 1.0));
        assert!(s.no_limit_claimed);

        let f2 = presets::free(2);
        let s = dc_exact_series(&f2, &[1, 2, 3, 4, 5]).unwrap();
        assert_eq!(s.entries[0].report.exact, Some(Ratio::new(17, 25)));
        assert_eq!(s.entries[4].ball_size, 485);
        assert!(s.values().windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn running_max_is_prefix_maximum() {
        let f2 = presets::free(2);
        let s = dc_series(&f2, &[0, 1, 2, 3], &MeasureFamily::RandomWalk { laziness: 0.0 }, &EstimatorSettings::exact()).unwrap();
        let mut m = f64::NEG_INFINITY;
        for (v, r) in s.values().iter().zip(&s.running_max) {
            m = m.max(*v);
            assert_eq!(*r, m);
        }
    }

    #[test]
    fn padded_series_exceeds_uniform() {
        let f2 = presets::free(2);
        let a = f2.parse_element("a").unwrap();
        let padded = dc_series(&f2, &[2], &MeasureFamily::Padded { g: a, schedule: PaddingSchedule::Constant(10) }, &EstimatorSettings::exact()).unwrap();
        let plain = dc_exact_series(&f2, &[2]).unwrap();
        assert!(padded.values()[0] > plain.values()[0]);
        assert_eq!(padded.entries[0].ball_size, 17 + 16);
    }

    #[test]
    fn auto_mode_falls_back_to_sampling() {
        let f2 = presets::free(2);
        let settings = EstimatorSettings { budget: 1000, samples: 500, seed: Some(5), ..Default::default() };
        let s = dc_series(&f2, &[1, 3], &MeasureFamily::UniformBall, &settings).unwrap();
        assert_eq!(s.entries[0].report.mode, Mode::Exact);
        assert_eq!(s.entries[1].report.mode, Mode::Sampled);
        assert_eq!(s.notices.len(), 1);
        let no_seed = EstimatorSettings { budget: 1000, ..Default::default() };
        assert!(dc_series(&f2, &[3], &MeasureFamily::UniformBall, &no_seed).is_err());
    }

    #[test]
    fn csv_layout() {
        let s = dc_exact_series(&presets::free(2), &[1]).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "n,ball_size,mode,value,exact_num,exact_den,ci_lo,ci_hi,seed\n1,5,exact,0.68,17,25,,,\n"
        );
    }
}
