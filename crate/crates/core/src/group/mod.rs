//! Group models: canonical elements, the `GroupOps` trait every model
//! implements, and the `GroupModel` handle that pairs a model with an ordered
//! generating set.

mod coords;
mod finite;
mod free;
mod free_product;
mod hom;
mod quotient;
pub mod rewriting;

use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::cayley::{self, Ball, BallOptions};
use crate::error::{Error, Result};

pub use coords::{FreeAbelian, Heisenberg, Semidirect};
pub use finite::{FiniteTable, PermutationGroup};
pub use free::FreeGroup;
pub use free_product::FreeProductCyclic;
pub use hom::{Homomorphism, Verification};
pub use quotient::{center, quotient, quotient_by_normal, CongruenceQuotient};
pub use rewriting::{check_confluence, ConfluenceReport, CriticalPair, RewritingModel, RewritingSystemSpec};

pub type Coords = SmallVec<[i64; 3]>;
pub type Letters = SmallVec<[u16; 12]>;

/// Canonical payload of a group element. Two elements of the same model are
/// equal as group elements iff their payloads are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Element {
    /// Integer coordinate vector (free abelian, Heisenberg, congruence quotients).
    Coords(Coords),
    /// Translation part plus an index into a finite point group.
    Tagged { coords: Coords, tag: u32 },
    /// Reduced word: free groups, free products, rewriting-system normal forms.
    Word(Letters),
    /// Permutation image list, 0-based.
    Perm(SmallVec<[u8; 8]>),
    /// Row index into a multiplication table.
    Index(u32),
}

impl Element {
    pub fn payload_kind(&self) -> &'static str {
        match self {
            Element::Coords(_) => "coords",
            Element::Tagged { .. } => "tagged-coords",
            Element::Word(_) => "word",
            Element::Perm(_) => "permutation",
            Element::Index(_) => "table-index",
        }
    }
}

/// One letter of a word over the generators: generator `gen`, possibly inverted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenLetter {
    pub gen: usize,
    pub inverse: bool,
}

impl GenLetter {
    pub fn new(gen: usize, inverse: bool) -> Self {
        Self { gen, inverse }
    }

    pub fn inverted(self) -> Self {
        Self { gen: self.gen, inverse: !self.inverse }
    }
}

pub type GenWord = Vec<GenLetter>;

pub fn invert_gen_word(w: &[GenLetter]) -> GenWord {
    w.iter().rev().map(|l| l.inverted()).collect()
}

/// Entry of the symmetrized BFS alphabet X ∪ X⁻¹.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Letter {
    pub letter: GenLetter,
    pub element: Element,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub element: Element,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderResult {
    Finite(u64),
    Infinite,
    ExceedsCap,
}

impl OrderResult {
    pub fn is_torsion(self) -> Option<bool> {
        match self {
            OrderResult::Finite(_) => Some(true),
            OrderResult::Infinite => Some(false),
            OrderResult::ExceedsCap => None,
        }
    }
}

/// Defining relations known for a model, stated over its standard generators.
#[derive(Clone, Debug)]
pub enum Relations {
    /// A presentation: every listed relator must map to the identity.
    Presentation(Vec<GenWord>),
    /// Finite model: homomorphisms are verified by walking the whole Cayley graph.
    Exhaustive,
    Unknown,
}

/// `g = conjugator · root^exponent · conjugator⁻¹`, with `root` cyclically
/// reduced and not a proper power.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootDecomposition {
    pub conjugator: Element,
    pub root: Element,
    pub exponent: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    FiniteTable,
    FinitePermutation,
    Free { rank: usize },
    FreeAbelian { rank: usize },
    Heisenberg,
    InfiniteDihedral,
    Semidirect { dim: usize },
    FreeProductCyclic { orders: Vec<u32> },
    CongruenceQuotient { base: Box<ModelKind>, modulus: i64 },
    RewritingSystem,
}

impl ModelKind {
    pub fn has_integer_coords(&self) -> bool {
        matches!(
            self,
            ModelKind::FreeAbelian { .. }
                | ModelKind::Heisenberg
                | ModelKind::InfiniteDihedral
                | ModelKind::Semidirect { .. }
        )
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::FiniteTable => write!(f, "finite-table"),
            ModelKind::FinitePermutation => write!(f, "finite-permutation"),
            ModelKind::Free { rank } => write!(f, "free({rank})"),
            ModelKind::FreeAbelian { rank } => write!(f, "free-abelian({rank})"),
            ModelKind::Heisenberg => write!(f, "heisenberg"),
            ModelKind::InfiniteDihedral => write!(f, "infinite-dihedral"),
            ModelKind::Semidirect { dim } => write!(f, "semidirect({dim})"),
            ModelKind::FreeProductCyclic { orders } => {
                let parts: Vec<String> = orders.iter().map(|o| format!("Z{o}")).collect();
                write!(f, "free-product({})", parts.join("*"))
            }
            ModelKind::CongruenceQuotient { base, modulus } => {
                write!(f, "congruence-quotient({base}, {modulus})")
            }
            ModelKind::RewritingSystem => write!(f, "rewriting-system"),
        }
    }
}

/// Operations a group model provides. All methods assume canonical inputs;
/// `GroupModel::try_mul` and friends check payloads first.
pub trait GroupOps: Send + Sync + fmt::Debug {
    fn kind(&self) -> ModelKind;

    /// Stable string identifying the model (not the generating set).
    fn descriptor(&self) -> String;

    fn identity(&self) -> Element;
    fn mul(&self, g: &Element, h: &Element) -> Element;
    fn inv(&self, g: &Element) -> Element;

    /// Whether `g` is a canonical payload of this model.
    fn is_canonical(&self, g: &Element) -> bool;

    fn standard_generators(&self) -> Vec<Generator>;

    fn render(&self, g: &Element) -> String;

    fn is_finite(&self) -> bool {
        false
    }

    fn commutes(&self, g: &Element, h: &Element) -> bool {
        self.mul(g, h) == self.mul(h, g)
    }

    fn relations(&self) -> Relations {
        Relations::Unknown
    }

    /// Order of `g`. The default walks powers up to `cap`; models that can
    /// prove infinite order override it.
    fn order_of(&self, g: &Element, cap: u64) -> OrderResult {
        power_order(self, g, cap)
    }

    /// A word over the standard generators representing `g`, when the model
    /// can produce one without search.
    fn word_for(&self, _g: &Element) -> Option<GenWord> {
        None
    }

    fn root_decomposition(&self, _g: &Element) -> Option<RootDecomposition> {
        None
    }

    /// Called before ball enumeration; models whose normal forms cannot be
    /// trusted refuse here.
    fn enumeration_guard(&self) -> Result<()> {
        Ok(())
    }
}

fn power_order<O: GroupOps + ?Sized>(ops: &O, g: &Element, cap: u64) -> OrderResult {
    let id = ops.identity();
    let mut acc = g.clone();
    for k in 1..=cap {
        if acc == id {
            return OrderResult::Finite(k);
        }
        acc = ops.mul(&acc, g);
    }
    OrderResult::ExceedsCap
}

struct ModelInner {
    ops: Arc<dyn GroupOps>,
    generators: Vec<Generator>,
    standard_generators: bool,
    alphabet: Vec<Letter>,
    full: OnceLock<Arc<Ball>>,
}

/// A group model together with an ordered generating set. Cheap to clone.
#[derive(Clone)]
pub struct GroupModel {
    inner: Arc<ModelInner>,
}

impl fmt::Debug for GroupModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupModel")
            .field("kind", &self.kind())
            .field("generators", &self.generator_names())
            .finish()
    }
}

impl GroupModel {
    pub fn new<O: GroupOps + 'static>(ops: O) -> Self {
        Self::from_arc(Arc::new(ops))
    }

    pub fn from_arc(ops: Arc<dyn GroupOps>) -> Self {
        let generators = ops.standard_generators();
        Self::assemble(ops, generators, true)
    }

    fn assemble(ops: Arc<dyn GroupOps>, generators: Vec<Generator>, standard: bool) -> Self {
        let alphabet = symmetrize(ops.as_ref(), &generators);
        GroupModel {
            inner: Arc::new(ModelInner {
                ops,
                generators,
                standard_generators: standard,
                alphabet,
                full: OnceLock::new(),
            }),
        }
    }

    /// Same group, different generating set. Generation is asserted by the
    /// caller, not checked.
    pub fn with_generators(&self, generators: Vec<Generator>) -> Result<GroupModel> {
        if generators.is_empty() {
            return Err(Error::MalformedSpec("empty generating set".into()));
        }
        for g in &generators {
            if !self.inner.ops.is_canonical(&g.element) {
                return Err(Error::PayloadMismatch(format!(
                    "generator {} is not a canonical {} element",
                    g.name,
                    self.kind()
                )));
            }
        }
        Ok(Self::assemble(self.inner.ops.clone(), generators, false))
    }

    /// Generating set given by words in the current generators, e.g. `["s", "st"]`.
    pub fn with_generator_words(&self, words: &[(&str, &str)]) -> Result<GroupModel> {
        let gens = words
            .iter()
            .map(|(name, word)| {
                Ok(Generator { name: name.to_string(), element: self.parse_element(word)? })
            })
            .collect::<Result<Vec<_>>>()?;
        self.with_generators(gens)
    }

    pub fn ops(&self) -> &dyn GroupOps {
        self.inner.ops.as_ref()
    }

    pub fn kind(&self) -> ModelKind {
        self.inner.ops.kind()
    }

    pub fn is_finite(&self) -> bool {
        self.inner.ops.is_finite()
    }

    pub fn has_standard_generators(&self) -> bool {
        self.inner.standard_generators
    }

    pub fn generators(&self) -> &[Generator] {
        &self.inner.generators
    }

    pub fn generator_names(&self) -> Vec<&str> {
        self.inner.generators.iter().map(|g| g.name.as_str()).collect()
    }

    /// Symmetrized generating set in BFS order: g₁, g₁⁻¹, g₂, g₂⁻¹, … with
    /// duplicates and the identity dropped.
    pub fn alphabet(&self) -> &[Letter] {
        &self.inner.alphabet
    }

    /// Identifies the model and its generating set; used to key ball caches.
    pub fn fingerprint(&self) -> String {
        let gens: Vec<String> = self
            .inner
            .generators
            .iter()
            .map(|g| format!("{}={}", g.name, self.render(&g.element)))
            .collect();
        format!("{}|{}", self.inner.ops.descriptor(), gens.join(","))
    }

    pub fn identity(&self) -> Element {
        self.inner.ops.identity()
    }

    pub fn mul(&self, g: &Element, h: &Element) -> Element {
        self.inner.ops.mul(g, h)
    }

    pub fn inv(&self, g: &Element) -> Element {
        self.inner.ops.inv(g)
    }

    pub fn commutes(&self, g: &Element, h: &Element) -> bool {
        self.inner.ops.commutes(g, h)
    }

    pub fn is_canonical(&self, g: &Element) -> bool {
        self.inner.ops.is_canonical(g)
    }

    fn check(&self, g: &Element) -> Result<()> {
        if self.is_canonical(g) {
            Ok(())
        } else {
            Err(Error::PayloadMismatch(format!(
                "{} payload {:?} is not a canonical {} element",
                g.payload_kind(),
                g,
                self.kind()
            )))
        }
    }

    pub fn try_mul(&self, g: &Element, h: &Element) -> Result<Element> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.mul(g, h))
    }

    pub fn try_inv(&self, g: &Element) -> Result<Element> {
        self.check(g)?;
        Ok(self.inv(g))
    }

    pub fn pow(&self, g: &Element, k: i64) -> Element {
        let base = if k < 0 { self.inv(g) } else { g.clone() };
        let mut acc = self.identity();
        let mut sq = base;
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            e >>= 1;
            if e > 0 {
                sq = self.mul(&sq, &sq);
            }
        }
        acc
    }

    pub fn commutator(&self, g: &Element, h: &Element) -> Element {
        let gi = self.inv(g);
        let hi = self.inv(h);
        self.mul(&self.mul(&gi, &hi), &self.mul(g, h))
    }

    pub fn order_of(&self, g: &Element, cap: u64) -> OrderResult {
        self.inner.ops.order_of(g, cap.max(1))
    }

    pub fn render(&self, g: &Element) -> String {
        self.inner.ops.render(g)
    }

    /// Defining relations over the current generators, when known.
    pub fn relations(&self) -> Relations {
        match self.inner.ops.relations() {
            Relations::Exhaustive => Relations::Exhaustive,
            r if self.inner.standard_generators => r,
            _ => Relations::Unknown,
        }
    }

    pub fn letter_element(&self, l: GenLetter) -> Element {
        let g = &self.inner.generators[l.gen].element;
        if l.inverse {
            self.inv(g)
        } else {
            g.clone()
        }
    }

    pub fn eval_gen_word(&self, w: &[GenLetter]) -> Element {
        w.iter()
            .fold(self.identity(), |acc, &l| self.mul(&acc, &self.letter_element(l)))
    }

    /// A word over the current generators for `g`. Uses the model's normal
    /// form when the generators are standard, otherwise searches the Cayley
    /// graph up to `search_cap` elements.
    pub fn word_for(&self, g: &Element, search_cap: usize) -> Result<GenWord> {
        self.check(g)?;
        if self.inner.standard_generators {
            if let Some(w) = self.inner.ops.word_for(g) {
                return Ok(w);
            }
        }
        cayley::search_word(self, g, search_cap)
    }

    /// Full element set of a finite model, in BFS order. Materialized once.
    pub fn elements(&self) -> Result<Arc<Ball>> {
        if !self.is_finite() {
            return Err(Error::InfiniteModel);
        }
        if let Some(b) = self.inner.full.get() {
            return Ok(b.clone());
        }
        let ball = Arc::new(cayley::enumerate_closure(self, &BallOptions::default())?);
        Ok(self.inner.full.get_or_init(|| ball).clone())
    }

    pub fn group_order(&self) -> Result<usize> {
        Ok(self.elements()?.len())
    }

    pub fn root_decomposition(&self, g: &Element) -> Option<RootDecomposition> {
        self.inner.ops.root_decomposition(g)
    }

    /// Parses a word in the generator names: `a b^-1 a^2`, `aB` (an uppercase
    /// single letter inverts its lowercase generator), `1` for the identity.
    pub fn parse_element(&self, text: &str) -> Result<Element> {
        let word = self.parse_gen_word(text)?;
        Ok(self.eval_gen_word(&word))
    }

    pub fn parse_gen_word(&self, text: &str) -> Result<GenWord> {
        let trimmed = text.trim();
        if trimmed.is_empty() || trimmed == "1" || trimmed == "id" || trimmed == "ε" {
            return Ok(Vec::new());
        }
        let names = self.generator_names();
        let chars: Vec<(usize, char)> = trimmed.char_indices().collect();
        let mut word = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let (pos, c) = chars[i];
            if c.is_whitespace() || c == '*' || c == '.' {
                i += 1;
                continue;
            }
            let rest = &trimmed[pos..];
            let best = names
                .iter()
                .enumerate()
                .filter(|(_, n)| rest.starts_with(*n))
                .max_by_key(|(_, n)| n.len());
            let (gen, mut inverse, len) = match best {
                Some((gi, n)) => (gi, false, n.chars().count()),
                None => {
                    let lower: String = c.to_lowercase().collect();
                    match names.iter().position(|n| c.is_uppercase() && *n == lower) {
                        Some(gi) => (gi, true, 1),
                        None => {
                            return Err(Error::Syntax {
                                position: pos,
                                message: format!("unknown generator at '{rest}'"),
                            })
                        }
                    }
                }
            };
            i += len;
            let mut exponent: i64 = 1;
            if i < chars.len() && chars[i].1 == '^' {
                i += 1;
                let start = i;
                if i < chars.len() && (chars[i].1 == '-' || chars[i].1 == '+') {
                    i += 1;
                }
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let lit: String = chars[start..i].iter().map(|(_, c)| *c).collect();
                exponent = lit.parse().map_err(|_| Error::Syntax {
                    position: chars.get(start).map_or(trimmed.len(), |x| x.0),
                    message: "expected an integer exponent".into(),
                })?;
            }
            if exponent < 0 {
                inverse = !inverse;
            }
            for _ in 0..exponent.unsigned_abs() {
                word.push(GenLetter::new(gen, inverse));
            }
        }
        Ok(word)
    }
}

fn symmetrize(ops: &dyn GroupOps, generators: &[Generator]) -> Vec<Letter> {
    let id = ops.identity();
    let mut out: Vec<Letter> = Vec::with_capacity(2 * generators.len());
    for (gi, g) in generators.iter().enumerate() {
        for inverse in [false, true] {
            let element = if inverse { ops.inv(&g.element) } else { g.element.clone() };
            if element != id && !out.iter().any(|l| l.element == element) {
                out.push(Letter { letter: GenLetter::new(gi, inverse), element });
            }
        }
    }
    out
}

/// Built-in models.
pub mod presets {
    use super::*;

    pub fn free(rank: usize) -> GroupModel {
        GroupModel::new(FreeGroup::new(rank))
    }

    pub fn free_abelian(rank: usize) -> GroupModel {
        GroupModel::new(FreeAbelian::new(rank))
    }

    pub fn integers() -> GroupModel {
        free_abelian(1)
    }

    pub fn heisenberg() -> GroupModel {
        GroupModel::new(Heisenberg)
    }

    pub fn infinite_dihedral() -> GroupModel {
        GroupModel::new(Semidirect::infinite_dihedral())
    }

    pub fn free_product(orders: &[u32]) -> Result<GroupModel> {
        Ok(GroupModel::new(FreeProductCyclic::new(orders.to_vec())?))
    }

    /// Z_n as Z reduced mod n.
    pub fn cyclic(n: i64) -> Result<GroupModel> {
        Ok(quotient(&integers(), n)?.0)
    }

    /// (Z_m)^d as Z^d reduced mod m.
    pub fn elementary_abelian(d: usize, m: i64) -> Result<GroupModel> {
        Ok(quotient(&free_abelian(d), m)?.0)
    }

    pub fn symmetric(n: usize) -> Result<GroupModel> {
        Ok(GroupModel::new(PermutationGroup::symmetric(n)?))
    }

    pub fn alternating(n: usize) -> Result<GroupModel> {
        Ok(GroupModel::new(PermutationGroup::alternating(n)?))
    }

    /// Dihedral group of order 2n acting on the vertices of an n-gon.
    pub fn dihedral(n: usize) -> Result<GroupModel> {
        Ok(GroupModel::new(PermutationGroup::dihedral(n)?))
    }

    pub fn quaternion() -> GroupModel {
        GroupModel::new(FiniteTable::quaternion())
    }
}
