//! Cayley balls B_X(n) by breadth-first search over the symmetrized
//! generating set, plus f-balls, coset densities and growth fits built on them.

mod cache;
mod density;
mod fball;
mod growth;

use indexmap::IndexSet;
use rayon::prelude::*;
use rustc_hash::FxBuildHasher;

use crate::error::{Error, Result};
use crate::group::{Element, GenLetter, GenWord, GroupModel};

pub use cache::{ball_cache_path, load_ball, save_ball, write_sphere_csv, CACHE_VERSION};
pub use density::{coset_density_series, CosetDensityRow, CosetDensitySeries};
pub use fball::{f_ball, FBallMode, FBallSpec, SubgroupPredicate};
pub use growth::{growth_fit, metric_distortion, GrowthClass, GrowthFit, GrowthThresholds, MetricDistortion};

pub const DEFAULT_ELEMENT_CAP: usize = 20_000_000;

#[derive(Clone, Debug)]
pub struct BallOptions {
    /// Maximum number of elements a ball may hold.
    pub cap: usize,
}

impl Default for BallOptions {
    fn default() -> Self {
        Self { cap: DEFAULT_ELEMENT_CAP }
    }
}

/// Elements of B_X(n) in BFS discovery order. Sphere `r` occupies
/// `sphere_starts[r]..sphere_starts[r + 1]`; element 0 is the identity.
#[derive(Clone, Debug)]
pub struct Ball {
    elements: IndexSet<Element, FxBuildHasher>,
    sphere_starts: Vec<usize>,
    /// BFS tree: `(parent index, alphabet position)` for each element; absent
    /// for filtered balls.
    parents: Option<Vec<(u32, u16)>>,
    fingerprint: String,
    complete: bool,
}

impl Ball {
    fn singleton(model: &GroupModel) -> Self {
        let mut elements = IndexSet::with_hasher(FxBuildHasher);
        elements.insert(model.identity());
        Ball {
            elements,
            sphere_starts: vec![0, 1],
            parents: Some(vec![(0, 0)]),
            fingerprint: model.fingerprint(),
            complete: false,
        }
    }

    pub fn radius(&self) -> usize {
        self.sphere_starts.len() - 2
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// True when the last sphere was empty, i.e. the ball is the whole (finite) group.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn element(&self, i: usize) -> &Element {
        &self.elements[i]
    }

    pub fn iter(&self) -> indexmap::set::Iter<'_, Element> {
        self.elements.iter()
    }

    pub fn as_slice(&self) -> &indexmap::set::Slice<Element> {
        self.elements.as_slice()
    }

    pub fn index_of(&self, g: &Element) -> Option<usize> {
        self.elements.get_index_of(g)
    }

    pub fn contains(&self, g: &Element) -> bool {
        self.elements.contains(g)
    }

    /// Distance class of the element at position `i`.
    pub fn distance_of_index(&self, i: usize) -> usize {
        self.sphere_starts.partition_point(|&s| s <= i) - 1
    }

    /// |g|_X if `g` lies in the ball.
    pub fn distance(&self, g: &Element) -> Option<usize> {
        self.index_of(g).map(|i| self.distance_of_index(i))
    }

    /// |B_X(r)| for r ≤ radius.
    pub fn size_at(&self, r: usize) -> usize {
        self.sphere_starts[r.min(self.radius()) + 1]
    }

    pub fn sphere_range(&self, r: usize) -> std::ops::Range<usize> {
        self.sphere_starts[r]..self.sphere_starts[r + 1]
    }

    pub fn sphere_sizes(&self) -> Vec<usize> {
        self.sphere_starts.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// `(r, |B_X(r)|)` for r = 0..=radius.
    pub fn cumulative_sizes(&self) -> Vec<(usize, u64)> {
        (0..=self.radius()).map(|r| (r, self.size_at(r) as u64)).collect()
    }

    pub fn parents(&self) -> Option<&[(u32, u16)]> {
        self.parents.as_deref()
    }

    /// The sub-ball of radius `r`.
    pub fn truncated(&self, r: usize) -> Ball {
        if r >= self.radius() {
            return self.clone();
        }
        let end = self.size_at(r);
        Ball {
            elements: self.elements.as_slice()[..end].iter().cloned().collect(),
            sphere_starts: self.sphere_starts[..r + 2].to_vec(),
            parents: self.parents.as_ref().map(|p| p[..end].to_vec()),
            fingerprint: self.fingerprint.clone(),
            complete: false,
        }
    }

    /// Geodesic word for the element at position `i`, read off the BFS tree.
    pub fn word_of(&self, model: &GroupModel, i: usize) -> Option<GenWord> {
        let parents = self.parents.as_ref()?;
        let alphabet = model.alphabet();
        let mut word: Vec<GenLetter> = Vec::new();
        let mut j = i;
        while j != 0 {
            let (p, l) = parents[j];
            word.push(alphabet[l as usize].letter);
            j = p as usize;
        }
        word.reverse();
        Some(word)
    }

    /// Subset of the ball (same distances), keeping BFS order.
    pub(crate) fn filtered(&self, keep: &[bool], tag: &str) -> Ball {
        let mut elements = IndexSet::with_hasher(FxBuildHasher);
        let mut sphere_starts = vec![0];
        for r in 0..=self.radius() {
            for i in self.sphere_range(r) {
                if keep[i] {
                    elements.insert(self.elements[i].clone());
                }
            }
            sphere_starts.push(elements.len());
        }
        Ball {
            elements,
            sphere_starts,
            parents: None,
            fingerprint: format!("{}|{}", self.fingerprint, tag),
            complete: false,
        }
    }

    pub(crate) fn from_parts(
        elements: Vec<Element>,
        sphere_starts: Vec<usize>,
        parents: Option<Vec<(u32, u16)>>,
        fingerprint: String,
        complete: bool,
    ) -> Result<Ball> {
        let n = elements.len();
        let set: IndexSet<Element, FxBuildHasher> = elements.into_iter().collect();
        let valid = set.len() == n
            && sphere_starts.first() == Some(&0)
            && sphere_starts.last() == Some(&n)
            && sphere_starts.len() >= 2
            && sphere_starts.windows(2).all(|w| w[0] <= w[1])
            && parents.as_ref().is_none_or(|p| p.len() == n);
        if !valid {
            return Err(Error::Cache("inconsistent ball data".into()));
        }
        Ok(Ball { elements: set, sphere_starts, parents, fingerprint, complete })
    }
}

/// Incremental BFS; each call to `grow` adds one sphere.
pub struct BallGrower<'a> {
    model: &'a GroupModel,
    ball: Ball,
    options: BallOptions,
}

const PAR_MIN_LEN: usize = 512;

impl<'a> BallGrower<'a> {
    pub fn new(model: &'a GroupModel, options: &BallOptions) -> Result<Self> {
        model.ops().enumeration_guard()?;
        Ok(Self { model, ball: Ball::singleton(model), options: options.clone() })
    }

    pub fn ball(&self) -> &Ball {
        &self.ball
    }

    pub fn into_ball(self) -> Ball {
        self.ball
    }

    /// Adds sphere `radius + 1`. Returns its size.
    pub fn grow(&mut self) -> Result<usize> {
        let r = self.ball.radius();
        let range = self.ball.sphere_range(r);
        let alphabet = self.model.alphabet();
        let model = self.model;
        let set = &self.ball.elements;
        let frontier = &set.as_slice()[range.clone()];
        let candidates: Vec<Vec<(Element, u32, u16)>> = frontier
            .par_iter()
            .with_min_len(PAR_MIN_LEN)
            .enumerate()
            .map(|(off, g)| {
                alphabet
                    .iter()
                    .enumerate()
                    .filter_map(|(li, l)| {
                        let p = model.mul(g, &l.element);
                        (!set.contains(&p)).then_some((p, (range.start + off) as u32, li as u16))
                    })
                    .collect()
            })
            .collect();
        let parents = self.ball.parents.as_mut().expect("grower balls keep parents");
        let before = self.ball.elements.len();
        for (p, parent, letter) in candidates.into_iter().flatten() {
            if self.ball.elements.insert(p) {
                parents.push((parent, letter));
                if self.ball.elements.len() > self.options.cap {
                    return Err(Error::ResourceCap { radius: r + 1, cap: self.options.cap });
                }
            }
        }
        let added = self.ball.elements.len() - before;
        self.ball.sphere_starts.push(self.ball.elements.len());
        if added == 0 {
            self.ball.complete = true;
        }
        Ok(added)
    }

    pub fn grow_to(&mut self, n: usize) -> Result<&Ball> {
        while self.ball.radius() < n {
            self.grow()?;
        }
        Ok(&self.ball)
    }
}

/// B_X(n), deterministic given the generator order.
pub fn enumerate_ball(model: &GroupModel, n: usize, options: &BallOptions) -> Result<Ball> {
    let mut grower = BallGrower::new(model, options)?;
    grower.grow_to(n)?;
    Ok(grower.into_ball())
}

/// BFS until a sphere comes out empty. Only terminates for finite groups.
pub fn enumerate_closure(model: &GroupModel, options: &BallOptions) -> Result<Ball> {
    let mut grower = BallGrower::new(model, options)?;
    while grower.grow()? > 0 {}
    Ok(grower.into_ball())
}

/// |g|_X, or `None` when `g` lies outside the enumerated ball.
pub fn ball_distance(ball: &Ball, g: &Element) -> Option<usize> {
    ball.distance(g)
}

/// Shortest word for `g` found by BFS, giving up after `cap` elements.
pub(crate) fn search_word(model: &GroupModel, g: &Element, cap: usize) -> Result<GenWord> {
    let mut grower = BallGrower::new(model, &BallOptions { cap })?;
    loop {
        if let Some(i) = grower.ball().index_of(g) {
            return Ok(grower.ball().word_of(model, i).expect("grower keeps parents"));
        }
        let radius = grower.ball().radius();
        if grower.grow()? == 0 {
            return Err(Error::InvalidArgument(format!(
                "{} is not generated within radius {radius}",
                model.render(g)
            )));
        }
    }
}
