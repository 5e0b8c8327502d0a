//! Finite-support probability measures on a group.

use std::io::Write;

use indexmap::{IndexMap, IndexSet};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rustc_hash::FxBuildHasher;

use crate::cayley::{Ball, DEFAULT_ELEMENT_CAP};
use crate::error::{Error, Result};
use crate::group::{Element, GroupModel, OrderResult};

pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;
pub const MAX_EXACT_WALK_STEPS: usize = 20;
/// Power-iteration cap used when certifying that a padding element has infinite order.
pub const ORDER_PROOF_CAP: u64 = 1 << 16;

#[derive(Clone, Debug)]
pub struct Measure {
    support: IndexSet<Element, FxBuildHasher>,
    prob: Vec<f64>,
    uniform: bool,
}

impl Measure {
    /// Uniform measure on `elements` (duplicates merged).
    pub fn uniform<I: IntoIterator<Item = Element>>(elements: I) -> Result<Measure> {
        let support: IndexSet<Element, FxBuildHasher> = elements.into_iter().collect();
        if support.is_empty() {
            return Err(Error::InvalidArgument("uniform measure on an empty set".into()));
        }
        let p = 1.0 / support.len() as f64;
        let prob = vec![p; support.len()];
        Ok(Measure { support, prob, uniform: true })
    }

    /// Measure from explicit atoms. Zero-mass atoms are dropped; repeated
    /// elements are merged.
    pub fn from_atoms<I: IntoIterator<Item = (Element, f64)>>(atoms: I) -> Result<Measure> {
        let mut map: IndexMap<Element, f64, FxBuildHasher> = IndexMap::default();
        for (g, p) in atoms {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidArgument(format!("invalid probability {p}")));
            }
            *map.entry(g).or_insert(0.0) += p;
        }
        map.retain(|_, p| *p > 0.0);
        let (support, prob): (IndexSet<_, _>, Vec<_>) = map.into_iter().unzip();
        let m = Measure { support, prob, uniform: false };
        m.check_normalized()?;
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    pub fn support(&self) -> &indexmap::set::Slice<Element> {
        self.support.as_slice()
    }

    pub fn probs(&self) -> &[f64] {
        &self.prob
    }

    pub fn atom(&self, i: usize) -> (&Element, f64) {
        (&self.support[i], self.prob[i])
    }

    pub fn index_of(&self, g: &Element) -> Option<usize> {
        self.support.get_index_of(g)
    }

    pub fn prob_of(&self, g: &Element) -> f64 {
        self.index_of(g).map_or(0.0, |i| self.prob[i])
    }

    pub fn total(&self) -> f64 {
        self.prob.iter().sum()
    }

    pub fn check_normalized(&self) -> Result<()> {
        let total = self.total();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidArgument(format!("measure has total mass {total}")));
        }
        Ok(())
    }

    pub fn sampler(&self) -> AtomSampler {
        if self.uniform {
            return AtomSampler { len: self.len(), cumulative: None };
        }
        let mut acc = 0.0;
        let cumulative = self
            .prob
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        AtomSampler { len: self.len(), cumulative: Some(cumulative) }
    }

    /// `element,prob` with the model's rendering, one line per atom.
    pub fn write_csv<W: Write>(&self, model: &GroupModel, mut out: W) -> Result<()> {
        writeln!(out, "element,prob")?;
        for (g, p) in self.support.iter().zip(&self.prob) {
            writeln!(out, "\"{}\",{p}", model.render(g).replace('"', "\"\""))?;
        }
        Ok(())
    }
}

/// Draws atom indices by inverse-CDF lookup.
#[derive(Clone, Debug)]
pub struct AtomSampler {
    len: usize,
    cumulative: Option<Vec<f64>>,
}

impl AtomSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match &self.cumulative {
            None => rng.gen_range(0..self.len),
            Some(c) => {
                let u = rng.gen::<f64>() * c[c.len() - 1];
                c.partition_point(|&x| x <= u).min(self.len - 1)
            }
        }
    }
}

pub fn uniform_on_ball(ball: &Ball) -> Result<Measure> {
    Measure::uniform(ball.iter().cloned())
}

fn check_laziness(laziness: f64) -> Result<()> {
    if !(0.0..1.0).contains(&laziness) {
        return Err(Error::InvalidArgument(format!("laziness {laziness} outside [0,1)")));
    }
    Ok(())
}

/// Distribution of a simple random walk over the symmetrized alphabet, with
/// holding probability `laziness` per step. Advance it with [`RandomWalk::step`].
#[derive(Clone, Debug)]
pub struct RandomWalk {
    model: GroupModel,
    laziness: f64,
    steps: usize,
    dist: IndexMap<Element, f64, FxBuildHasher>,
    cap: usize,
}

impl RandomWalk {
    pub fn new(model: &GroupModel, laziness: f64) -> Result<Self> {
        check_laziness(laziness)?;
        let mut dist = IndexMap::default();
        dist.insert(model.identity(), 1.0);
        Ok(RandomWalk { model: model.clone(), laziness, steps: 0, dist, cap: DEFAULT_ELEMENT_CAP })
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn step(&mut self) -> Result<()> {
        let alphabet = self.model.alphabet();
        let move_p = (1.0 - self.laziness) / alphabet.len() as f64;
        let mut next: IndexMap<Element, f64, FxBuildHasher> = IndexMap::default();
        for (g, &p) in &self.dist {
            if self.laziness > 0.0 {
                *next.entry(g.clone()).or_insert(0.0) += p * self.laziness;
            }
            for l in alphabet {
                *next.entry(self.model.mul(g, &l.element)).or_insert(0.0) += p * move_p;
            }
            if next.len() > self.cap {
                return Err(Error::ResourceCap { radius: self.steps + 1, cap: self.cap });
            }
        }
        self.dist = next;
        self.steps += 1;
        Ok(())
    }

    pub fn measure(&self) -> Result<Measure> {
        Measure::from_atoms(self.dist.iter().map(|(g, &p)| (g.clone(), p)))
    }
}

pub fn random_walk_measure(model: &GroupModel, n: usize, laziness: f64) -> Result<Measure> {
    let mut walk = RandomWalk::new(model, laziness)?;
    for _ in 0..n {
        walk.step()?;
    }
    walk.measure()
}

/// Exact rational random-walk distribution for `n ≤ 20` steps, in the same
/// atom order as [`random_walk_measure`].
pub fn random_walk_exact(model: &GroupModel, n: usize, laziness: &BigRational) -> Result<Vec<(Element, BigRational)>> {
    if n > MAX_EXACT_WALK_STEPS {
        return Err(Error::InvalidArgument(format!("exact walks are limited to {MAX_EXACT_WALK_STEPS} steps")));
    }
    if *laziness < BigRational::zero() || *laziness >= BigRational::one() {
        return Err(Error::InvalidArgument(format!("laziness {laziness} outside [0,1)")));
    }
    let alphabet = model.alphabet();
    let move_p = (BigRational::one() - laziness) / BigRational::from_integer(BigInt::from(alphabet.len()));
    let mut dist: IndexMap<Element, BigRational, FxBuildHasher> = IndexMap::default();
    dist.insert(model.identity(), BigRational::one());
    for _ in 0..n {
        let mut next: IndexMap<Element, BigRational, FxBuildHasher> = IndexMap::default();
        for (g, p) in &dist {
            if !laziness.is_zero() {
                *next.entry(g.clone()).or_insert_with(BigRational::zero) += p * laziness;
            }
            for l in alphabet {
                *next.entry(model.mul(g, &l.element)).or_insert_with(BigRational::zero) += p * &move_p;
            }
        }
        dist = next;
    }
    Ok(dist.into_iter().filter(|(_, p)| !p.is_zero()).collect())
}

/// Uniform measure on B ∪ {gʳ : |r| ≤ M}. `g` must be certified to have
/// infinite order.
pub fn padded_measure(model: &GroupModel, ball: &Ball, g: &Element, m: u64) -> Result<Measure> {
    if !model.is_canonical(g) {
        return Err(Error::PayloadMismatch(format!("{g:?} is not canonical for {}", model.kind())));
    }
    match model.order_of(g, ORDER_PROOF_CAP) {
        OrderResult::Infinite => {}
        OrderResult::Finite(k) => {
            return Err(Error::NotInfiniteOrder(format!("{} has order {k}", model.render(g))));
        }
        OrderResult::ExceedsCap => {
            return Err(Error::NotInfiniteOrder(format!("{} has no infinite-order proof", model.render(g))));
        }
    }
    let gi = model.inv(g);
    let mut extra = Vec::with_capacity(2 * m as usize);
    let (mut pos, mut neg) = (model.identity(), model.identity());
    for _ in 0..m {
        pos = model.mul(&pos, g);
        neg = model.mul(&neg, &gi);
        extra.push(pos.clone());
        extra.push(neg.clone());
    }
    Measure::uniform(ball.iter().cloned().chain(extra))
}
