use num_rational::Ratio;
use rustc_hash::FxHashMap;
use serde::Serialize;

use super::{BallGrower, BallOptions};
use crate::error::{Error, Result};
use crate::group::{Element, GroupModel, Homomorphism};

#[derive(Clone, Debug, Serialize)]
pub struct CosetDensityRow {
    pub n: usize,
    pub ball_size: u64,
    /// |{u ∈ B_X(n) : image(u) = image(g)}|
    pub count: u64,
    /// `count / ball_size`, unreduced.
    pub value: Ratio<u128>,
    /// max over all cosets c of | |c ∩ B_X(n)| / |B_X(n)| − 1/index |
    pub max_deviation: f64,
    /// Per-coset counts, in the order of `CosetDensitySeries::cosets`.
    pub coset_counts: Vec<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CosetDensitySeries {
    /// [G : ker], the size of the image.
    pub index: usize,
    pub cosets: Vec<String>,
    pub target_coset: usize,
    pub rows: Vec<CosetDensityRow>,
}

impl CosetDensitySeries {
    pub fn values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| ratio_to_f64(&r.value)).collect()
    }
}

pub(crate) fn ratio_to_f64(r: &Ratio<u128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Exact densities of the coset g·ker(hom) in B_X(n) for n = 0..=n_max.
pub fn coset_density_series(
    model: &GroupModel,
    hom: &Homomorphism,
    g: &Element,
    n_max: usize,
    options: &BallOptions,
) -> Result<CosetDensitySeries> {
    if hom.source().fingerprint() != model.fingerprint() {
        return Err(Error::InvalidArgument("homomorphism source differs from the model".into()));
    }
    let image = hom.image_elements()?;
    let index = image.len();
    let coset_of: FxHashMap<&Element, usize> = image.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let target_img = hom.apply(g)?;
    let target_coset = *coset_of
        .get(&target_img)
        .ok_or_else(|| Error::InvalidArgument("g maps outside the image".into()))?;

    let mut grower = BallGrower::new(model, options)?;
    grower.grow_to(n_max)?;
    let ball = grower.into_ball();
    let images = hom.images_on_ball(&ball)?;

    let mut counts = vec![0u64; index];
    let mut rows = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        for i in ball.sphere_range(n) {
            counts[coset_of[&images[i]]] += 1;
        }
        let size = ball.size_at(n) as u64;
        let expected = 1.0 / index as f64;
        let max_deviation = counts
            .iter()
            .map(|&c| (c as f64 / size as f64 - expected).abs())
            .fold(0.0, f64::max);
        rows.push(CosetDensityRow {
            n,
            ball_size: size,
            count: counts[target_coset],
            value: Ratio::new_raw(counts[target_coset] as u128, size as u128),
            max_deviation,
            coset_counts: counts.clone(),
        });
    }
    Ok(CosetDensitySeries {
        index,
        cosets: image.iter().map(|e| hom.target().render(e)).collect(),
        target_coset,
        rows,
    })
}
