use serde::Serialize;

use super::Ball;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthClass {
    PolynomialLike,
    ExponentialLike,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthThresholds {
    /// Tail ratio at or above which growth may be called exponential.
    pub exponential_ratio: f64,
    /// Tail ratio at or below which growth may be called polynomial.
    pub polynomial_ratio: f64,
}

impl Default for GrowthThresholds {
    fn default() -> Self {
        Self { exponential_ratio: 1.05, polynomial_ratio: 1.02 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthFit {
    /// |B(n+1)| / |B(n)| for consecutive input points.
    pub ratios: Vec<f64>,
    /// Least-squares slope of log|B(n)| against log n over the top half of radii.
    pub poly_degree_estimate: f64,
    /// Mean of the second half of `ratios`.
    pub exp_rate_estimate: f64,
    pub classification: GrowthClass,
}

pub const MIN_GROWTH_POINTS: usize = 6;

/// Fits ball sizes given as `(radius, |B(radius)|)` with consecutive radii.
pub fn growth_fit(sizes: &[(usize, u64)], thresholds: &GrowthThresholds) -> Result<GrowthFit> {
    if sizes.len() < MIN_GROWTH_POINTS {
        return Err(Error::TooFewPoints { got: sizes.len(), need: MIN_GROWTH_POINTS });
    }
    if sizes.windows(2).any(|w| w[1].0 != w[0].0 + 1) || sizes.iter().any(|s| s.1 == 0) {
        return Err(Error::InvalidArgument("sizes must have consecutive radii and positive counts".into()));
    }
    let ratios: Vec<f64> = sizes.windows(2).map(|w| w[1].1 as f64 / w[0].1 as f64).collect();

    let positive: Vec<(f64, f64)> = sizes
        .iter()
        .filter(|(r, _)| *r > 0)
        .map(|&(r, s)| ((r as f64).ln(), (s as f64).ln()))
        .collect();
    let top = &positive[positive.len() / 2..];
    let poly_degree_estimate = least_squares_slope(top);

    let tail = &ratios[ratios.len() / 2..];
    let exp_rate_estimate = tail.iter().sum::<f64>() / tail.len() as f64;

    // Polynomial growth has ratio - 1 ~ d/n, so the excess shrinks at least
    // as fast as 1/n across the tail; exponential growth keeps it.
    let first_r = sizes[sizes.len() - tail.len() - 1].0.max(1) as f64;
    let last_r = sizes[sizes.len() - 2].0.max(1) as f64;
    let first_excess = tail[0] - 1.0;
    let last_excess = tail[tail.len() - 1] - 1.0;
    let declining = last_excess <= first_excess;
    let decays_like_inverse = first_excess > 0.0 && last_excess / first_excess <= 1.2 * first_r / last_r;

    let classification = if exp_rate_estimate >= thresholds.exponential_ratio && !decays_like_inverse {
        GrowthClass::ExponentialLike
    } else if exp_rate_estimate <= thresholds.polynomial_ratio && declining {
        GrowthClass::PolynomialLike
    } else {
        GrowthClass::Inconclusive
    };
    Ok(GrowthFit { ratios, poly_degree_estimate, exp_rate_estimate, classification })
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Empirical comparison of two word metrics on the same group: the range of
/// |u|_X / |u|_Y over non-identity elements present in both balls.
#[derive(Clone, Debug, Serialize)]
pub struct MetricDistortion {
    pub compared: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

pub fn metric_distortion(ball_x: &Ball, ball_y: &Ball) -> MetricDistortion {
    let mut out = MetricDistortion { compared: 0, min_ratio: f64::INFINITY, max_ratio: 0.0 };
    for (i, g) in ball_x.iter().enumerate().skip(1) {
        if let Some(dy) = ball_y.distance(g) {
            if dy == 0 {
                continue;
            }
            let ratio = ball_x.distance_of_index(i) as f64 / dy as f64;
            out.compared += 1;
            out.min_ratio = out.min_ratio.min(ratio);
            out.max_ratio = out.max_ratio.max(ratio);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::enumerate_ball;
    use crate::group::presets;

    fn series(f: impl Fn(u64) -> u64, radii: std::ops::RangeInclusive<usize>) -> Vec<(usize, u64)> {
        radii.map(|r| (r, f(r as u64))).collect()
    }

    #[test]
    fn integers_have_degree_one() {
        let fit = growth_fit(&series(|n| 2 * n + 1, 1..=200), &Default::default()).unwrap();
        assert!((fit.poly_degree_estimate - 1.0).abs() < 0.1);
        assert_eq!(fit.classification, GrowthClass::PolynomialLike);
    }

    #[test]
    fn free_group_rate_three() {
        let fit = growth_fit(&series(|n| 2 * 3u64.pow(n as u32) - 1, 0..=12), &Default::default()).unwrap();
        assert!((fit.exp_rate_estimate - 3.0).abs() < 0.05);
        assert_eq!(fit.classification, GrowthClass::ExponentialLike);
    }

    #[test]
    fn heisenberg_at_moderate_radius_is_not_called_exponential() {
        let b = enumerate_ball(&presets::heisenberg(), 15, &Default::default()).unwrap();
        let sizes: Vec<_> = b.cumulative_sizes().into_iter().filter(|(r, _)| *r >= 8).collect();
        let fit = growth_fit(&sizes, &Default::default()).unwrap();
        assert!((fit.poly_degree_estimate - 4.0).abs() < 0.5, "{}", fit.poly_degree_estimate);
        assert_ne!(fit.classification, GrowthClass::ExponentialLike);
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(
            growth_fit(&series(|n| n + 1, 1..=5), &Default::default()),
            Err(Error::TooFewPoints { got: 5, need: 6 })
        ));
    }

    #[test]
    fn dihedral_metrics_are_comparable() {
        let d = presets::infinite_dihedral();
        let y = d.with_generator_words(&[("s", "s"), ("u", "st")]).unwrap();
        let bx = enumerate_ball(&d, 10, &Default::default()).unwrap();
        let by = enumerate_ball(&y, 10, &Default::default()).unwrap();
        let m = metric_distortion(&bx, &by);
        assert!(m.compared > 0);
        assert!(m.min_ratio >= 0.5 && m.max_ratio <= 2.0 + 1e-12);
    }
}
