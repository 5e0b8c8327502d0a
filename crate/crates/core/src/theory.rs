//! Executable checks of the inequalities relating dc values, plus
//! negligibility and translation-length diagnostics.

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::cayley::{enumerate_ball, search_word, Ball, BallGrower, BallOptions};
use crate::error::{Error, Result};
use crate::estimator::{centralizer_in_ball, dc_exact_on_elements, dc_finite, ratio_f64, DcSeries, Mode, DEFAULT_BUDGET};
use crate::group::{presets, Element, GroupModel, Homomorphism, ModelKind, OrderResult};

/// Power-iteration cap for torsion certificates.
pub const TORSION_PROOF_CAP: u64 = 1 << 16;
pub const DEFAULT_SAMPLED_TOLERANCE: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Inconclusive,
}

/// A reported side of a check: exact rationals render as `p/q`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Quantity {
    Exact(Ratio<u128>),
    Approx(f64),
}

impl Quantity {
    pub fn value(&self) -> f64 {
        match self {
            Quantity::Exact(r) => ratio_f64(r),
            Quantity::Approx(v) => *v,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Quantity::Exact(_))
    }
}

impl Serialize for Quantity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Quantity::Exact(r) => {
                let r = r.reduced();
                if *r.denom() == 1 {
                    s.serialize_str(&r.numer().to_string())
                } else {
                    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
                }
            }
            Quantity::Approx(v) => s.serialize_f64(*v),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    pub lhs: Quantity,
    pub rhs: Quantity,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}

/// Named finite groups for the commuting-probability gap check.
pub fn gustafson_corpus() -> Result<Vec<(String, GroupModel)>> {
    let mut out = Vec::new();
    for n in 2..=12 {
        out.push((format!("Z{n}"), presets::cyclic(n)?));
    }
    out.push(("Z2xZ2".into(), presets::elementary_abelian(2, 2)?));
    out.push(("S3".into(), presets::symmetric(3)?));
    out.push(("D4".into(), presets::dihedral(4)?));
    out.push(("Q8".into(), presets::quaternion()));
    out.push(("A4".into(), presets::alternating(4)?));
    out.push(("S4".into(), presets::symmetric(4)?));
    Ok(out)
}

pub fn generators_commute(model: &GroupModel) -> bool {
    let gens = model.generators();
    gens.iter().all(|a| gens.iter().all(|b| model.commutes(&a.element, &b.element)))
}

/// dc(G) > 5/8 forces G abelian.
pub fn gustafson_check(corpus: &[(String, GroupModel)]) -> Result<Vec<CheckResult>> {
    let bound = Ratio::new(5u128, 8);
    corpus
        .iter()
        .map(|(label, g)| {
            let dc = dc_finite(g)?;
            let abelian = generators_commute(g);
            let above = dc > bound;
            let status = if !above || abelian { CheckStatus::Pass } else { CheckStatus::Fail };
            Ok(CheckResult {
                name: format!("gustafson:{label}"),
                status,
                lhs: Quantity::Exact(dc),
                rhs: Quantity::Exact(bound),
                tolerance: 0.0,
                detail: format!("|G|={}, abelian={abelian}, dc>5/8={above}", g.group_order()?),
            })
        })
        .collect()
}

/// dc(G) ≤ dc(N)·dc(G/N) for N = ker(hom), G finite.
pub fn gallagher_check(hom: &Homomorphism) -> Result<CheckResult> {
    let g = hom.source();
    if !hom.is_verified() {
        return Err(Error::InvalidArgument("gallagher check needs a verified homomorphism".into()));
    }
    let dc_g = dc_finite(g)?;
    let kernel = hom.kernel_elements()?;
    let image = hom.image_elements()?;
    let dc_n = dc_exact_on_elements(g, &kernel, DEFAULT_BUDGET)?;
    let dc_q = dc_exact_on_elements(hom.target(), &image, DEFAULT_BUDGET)?;
    let rhs = dc_n.reduced() * dc_q.reduced();
    let status = if dc_g <= rhs { CheckStatus::Pass } else { CheckStatus::Fail };
    Ok(CheckResult {
        name: "gallagher".into(),
        status,
        lhs: Quantity::Exact(dc_g),
        rhs: Quantity::Exact(rhs),
        tolerance: 0.0,
        detail: format!(
            "|G|={}, |N|={}, |G/N|={}, dc(N)={}, dc(G/N)={}",
            g.group_order()?,
            kernel.len(),
            image.len(),
            dc_n.reduced(),
            dc_q.reduced()
        ),
    })
}

fn window_entries(series: &DcSeries, window: (usize, usize)) -> Result<Vec<&crate::estimator::SeriesEntry>> {
    let entries: Vec<_> = series.window(window.0, window.1).collect();
    if entries.is_empty() {
        return Err(Error::InvalidArgument(format!("no series entries in window {}..={}", window.0, window.1)));
    }
    Ok(entries)
}

fn all_exact(entries: &[&crate::estimator::SeriesEntry]) -> bool {
    entries.iter().all(|e| e.report.mode == Mode::Exact)
}

/// Largest value in the window, kept exact when every entry is.
fn window_max(entries: &[&crate::estimator::SeriesEntry]) -> Quantity {
    let exact: Option<Vec<Ratio<u128>>> = entries.iter().map(|e| e.report.exact).collect();
    match exact {
        Some(v) => Quantity::Exact(v.into_iter().max().expect("nonempty window")),
        None => Quantity::Approx(entries.iter().map(|e| e.report.value).fold(f64::NEG_INFINITY, f64::max)),
    }
}

/// dc_X(G) ≤ dc(G/N): the series over the window stays below the dc of the image.
pub fn quotient_bound_check(hom: &Homomorphism, series: &DcSeries, window: (usize, usize), sampled_tolerance: f64) -> Result<CheckResult> {
    let image = hom.image_elements()?;
    let rhs = dc_exact_on_elements(hom.target(), &image, DEFAULT_BUDGET)?;
    let entries = window_entries(series, window)?;
    let lhs = window_max(&entries);
    let tolerance = if all_exact(&entries) { 0.0 } else { sampled_tolerance };
    let status = if !hom.is_verified() {
        CheckStatus::Inconclusive
    } else {
        let ok = match lhs {
            Quantity::Exact(l) => l <= rhs,
            Quantity::Approx(v) => v <= ratio_f64(&rhs) + tolerance,
        };
        if ok {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        }
    };
    Ok(CheckResult {
        name: "quotient-bound".into(),
        status,
        lhs,
        rhs: Quantity::Exact(rhs),
        tolerance,
        detail: format!(
            "window {}..={}, |G/N|={}, homomorphism {:?}",
            window.0,
            window.1,
            image.len(),
            hom.verification()
        ),
    })
}

/// dc_X(G) ≥ dc_X(H)/[G:H]², compared through window maxima.
pub fn index_bound_check(series_g: &DcSeries, series_h: &DcSeries, index: u64, window: (usize, usize), sampled_tolerance: f64) -> Result<CheckResult> {
    if index == 0 {
        return Err(Error::InvalidArgument("index must be positive".into()));
    }
    let eg = window_entries(series_g, window)?;
    let eh = window_entries(series_h, window)?;
    let lhs = window_max(&eg);
    let d2 = u128::from(index) * u128::from(index);
    let rhs = match window_max(&eh) {
        Quantity::Exact(r) => Quantity::Exact(r.reduced() / d2),
        Quantity::Approx(v) => Quantity::Approx(v / d2 as f64),
    };
    let exact = all_exact(&eg) && all_exact(&eh);
    let tolerance = if exact { 0.0 } else { sampled_tolerance };
    let ok = match (lhs, rhs) {
        (Quantity::Exact(l), Quantity::Exact(r)) => l >= r,
        (l, r) => l.value() >= r.value() - tolerance,
    };
    let status = if ok {
        CheckStatus::Pass
    } else if exact {
        CheckStatus::Fail
    } else {
        // sampled values only fail when even the CI ends cannot meet
        let best_g = eg.iter().map(|e| e.report.upper()).fold(f64::NEG_INFINITY, f64::max);
        let best_h = eh.iter().map(|e| e.report.lower()).fold(f64::NEG_INFINITY, f64::max) / d2 as f64;
        if best_g >= best_h - tolerance {
            CheckStatus::Inconclusive
        } else {
            CheckStatus::Fail
        }
    };
    Ok(CheckResult {
        name: "index-bound".into(),
        status,
        lhs,
        rhs,
        tolerance,
        detail: format!("window {}..={}, [G:H]={index}", window.0, window.1),
    })
}

/// Strict decrease over the window is reported as a pass; anything else is
/// inconclusive, since finite radii never decide a limit.
pub fn decreasing_trend_check(series: &DcSeries, window: (usize, usize)) -> Result<CheckResult> {
    let entries = window_entries(series, window)?;
    let exact = all_exact(&entries);
    let decreasing = entries.windows(2).all(|w| {
        match (w[0].report.exact, w[1].report.exact) {
            (Some(a), Some(b)) => b < a,
            _ => w[1].report.upper() < w[0].report.lower(),
        }
    });
    let first = entries[0].report.value;
    let last = entries[entries.len() - 1].report.value;
    Ok(CheckResult {
        name: "decreasing-trend".into(),
        status: if decreasing { CheckStatus::Pass } else { CheckStatus::Inconclusive },
        lhs: Quantity::Approx(first),
        rhs: Quantity::Approx(last),
        tolerance: 0.0,
        detail: format!("window {}..={}, exact={exact}, strictly decreasing={decreasing}", window.0, window.1),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct NegligibilityReport {
    pub radii: Vec<usize>,
    pub ball_sizes: Vec<usize>,
    /// |N ∩ B(n)| with N the torsion elements; `None` when some element of
    /// the ball has no order certificate.
    pub torsion_counts: Option<Vec<u64>>,
    pub torsion_density: Option<Vec<f64>>,
    /// max over sampled certified non-torsion g of |C(g) ∩ B(n)| / |B(n)|.
    pub max_centralizer_density: Vec<Option<f64>>,
    /// Number of non-torsion g actually tested per radius.
    pub sample_size: Vec<usize>,
    pub seed: u64,
}

/// Torsion density (exact) and sampled centralizer densities for n = 0..=n_max.
pub fn negligibility_report(model: &GroupModel, n_max: usize, g_samples: usize, seed: u64, options: &BallOptions) -> Result<NegligibilityReport> {
    let mut grower = BallGrower::new(model, options)?;
    grower.grow_to(n_max)?;
    let ball = grower.into_ball();

    let orders: Vec<OrderResult> = ball.iter().map(|g| model.order_of(g, TORSION_PROOF_CAP)).collect();
    let decidable = orders.iter().all(|o| o.is_torsion().is_some());

    let mut report = NegligibilityReport {
        radii: (0..=n_max).collect(),
        ball_sizes: Vec::new(),
        torsion_counts: decidable.then(Vec::new),
        torsion_density: decidable.then(Vec::new),
        max_centralizer_density: Vec::new(),
        sample_size: Vec::new(),
        seed,
    };
    let mut torsion = 0u64;
    for n in 0..=n_max {
        let size = ball.size_at(n);
        report.ball_sizes.push(size);
        if decidable {
            torsion += ball.sphere_range(n).filter(|&i| orders[i] != OrderResult::Infinite).count() as u64;
            report.torsion_counts.as_mut().expect("decidable").push(torsion);
            report.torsion_density.as_mut().expect("decidable").push(torsion as f64 / size as f64);
        }

        let prefix = ball.truncated(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(n as u64);
        let certified: Vec<usize> = (0..size).filter(|&i| orders[i] == OrderResult::Infinite).collect();
        let mut best: Option<f64> = None;
        let mut tested = 0;
        if !certified.is_empty() {
            for _ in 0..g_samples {
                let g = ball.element(certified[rng.gen_range(0..certified.len())]);
                let density = centralizer_in_ball(model, g, &prefix) as f64 / size as f64;
                best = Some(best.map_or(density, |b| b.max(density)));
                tested += 1;
            }
        }
        report.max_centralizer_density.push(best);
        report.sample_size.push(tested);
    }
    Ok(report)
}

/// Distances for translation-length estimates.
#[derive(Clone, Copy, Debug)]
pub enum DistanceOracle<'a> {
    Ball(&'a Ball),
    /// Breadth-first search per query, giving up after `cap` elements.
    Search { cap: usize },
    /// Length of the reduced word; geodesic for free groups on their standard basis.
    FreeReduced,
}

#[derive(Clone, Debug, Serialize)]
pub struct TranslationLengthReport {
    /// (m, |gᵐ|_X / m)
    pub ratios: Vec<(u64, f64)>,
    pub running_inf: Vec<f64>,
    pub estimate: f64,
    /// True when some power left the reach of the distance oracle.
    pub truncated: bool,
}

fn free_word_length(model: &GroupModel, g: &Element) -> Result<usize> {
    if !matches!(model.kind(), ModelKind::Free { .. }) || !model.has_standard_generators() {
        return Err(Error::Unsupported { op: "free-reduced distance", kind: model.kind().to_string() });
    }
    Ok(model.word_for(g, 0)?.len())
}

/// |gᵐ|_X / m for m = 1..=m_max and their prefix infima.
pub fn translation_length(model: &GroupModel, g: &Element, m_max: u64, oracle: DistanceOracle<'_>) -> Result<TranslationLengthReport> {
    if m_max == 0 {
        return Err(Error::InvalidArgument("m_max must be positive".into()));
    }
    let mut report = TranslationLengthReport { ratios: Vec::new(), running_inf: Vec::new(), estimate: f64::INFINITY, truncated: false };
    let mut power = model.identity();
    for m in 1..=m_max {
        power = model.mul(&power, g);
        let dist = match oracle {
            DistanceOracle::Ball(b) => b.distance(&power),
            DistanceOracle::Search { cap } => search_word(model, &power, cap).ok().map(|w| w.len()),
            DistanceOracle::FreeReduced => Some(free_word_length(model, &power)?),
        };
        let Some(d) = dist else {
            report.truncated = true;
            break;
        };
        let ratio = d as f64 / m as f64;
        report.estimate = report.estimate.min(ratio);
        report.ratios.push((m, ratio));
        report.running_inf.push(report.estimate);
    }
    if report.ratios.is_empty() {
        return Err(Error::InvalidArgument(format!("{} lies outside the distance oracle", model.render(g))));
    }
    Ok(report)
}

/// |C(g) ∩ B(n)| ≤ 2pn + 1 for sampled infinite-order g, with C(g) the
/// cyclic group generated by the conjugated root of g.
pub fn centralizer_linear_bound_check(model: &GroupModel, samples: usize, n: usize, p: u64, seed: u64) -> Result<CheckResult> {
    let ball = enumerate_ball(model, n, &BallOptions::default())?;
    let bound = 2 * p * n as u64 + 1;
    let candidates: Vec<usize> = (0..ball.len())
        .filter(|&i| model.order_of(ball.element(i), TORSION_PROOF_CAP) == OrderResult::Infinite)
        .collect();
    let name = "centralizer-linear-bound".to_string();
    let inconclusive = |detail: String| CheckResult {
        name: name.clone(),
        status: CheckStatus::Inconclusive,
        lhs: Quantity::Approx(f64::NAN),
        rhs: Quantity::Approx(bound as f64),
        tolerance: 0.0,
        detail,
    };
    if candidates.is_empty() {
        return Ok(inconclusive("no certified infinite-order elements in the ball".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0u64;
    let mut worst_g = String::new();
    let mut mismatches = 0;
    for _ in 0..samples {
        let g = ball.element(candidates[rng.gen_range(0..candidates.len())]);
        let Some(rd) = model.root_decomposition(g) else {
            return Ok(inconclusive(format!("no root extraction for {}", model.kind())));
        };
        let h = model.mul(&model.mul(&rd.conjugator, &rd.root), &model.inv(&rd.conjugator));
        let hi = model.inv(&h);
        // |hʳ|_X ≥ |r| for these models, so r = ±1..±n covers the ball
        let mut count = 1u64;
        let (mut pos, mut neg) = (model.identity(), model.identity());
        for _ in 0..n {
            pos = model.mul(&pos, &h);
            neg = model.mul(&neg, &hi);
            count += u64::from(ball.contains(&pos)) + u64::from(ball.contains(&neg));
        }
        if centralizer_in_ball(model, g, &ball) != count {
            mismatches += 1;
        }
        if count > worst {
            worst = count;
            worst_g = model.render(g);
        }
    }
    let status = if worst <= bound && mismatches == 0 { CheckStatus::Pass } else { CheckStatus::Fail };
    Ok(CheckResult {
        name,
        status,
        lhs: Quantity::Approx(worst as f64),
        rhs: Quantity::Approx(bound as f64),
        tolerance: 0.0,
        detail: format!(
            "n={n}, p={p}, {samples} samples, largest |<root> ∩ B(n)| at {worst_g}, direct centralizer mismatches={mismatches}"
        ),
    })
}
