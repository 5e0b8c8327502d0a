use rustc_hash::FxHashMap;

use super::{Coords, Element, GenLetter, GenWord, Generator, GroupOps, ModelKind, OrderResult, Relations};
use crate::error::{Error, Result};

pub(crate) fn coords(g: &Element) -> &Coords {
    match g {
        Element::Coords(c) => c,
        other => panic!("expected a coordinate payload, got {}", other.payload_kind()),
    }
}

fn power_word(gen: usize, k: i64) -> impl Iterator<Item = GenLetter> {
    std::iter::repeat_n(GenLetter::new(gen, k < 0), k.unsigned_abs() as usize)
}

/// Z^d with the standard basis.
#[derive(Debug, Clone)]
pub struct FreeAbelian {
    rank: usize,
}

impl FreeAbelian {
    pub fn new(rank: usize) -> Self {
        assert!(rank >= 1, "free abelian rank must be positive");
        Self { rank }
    }
}

impl GroupOps for FreeAbelian {
    fn kind(&self) -> ModelKind {
        ModelKind::FreeAbelian { rank: self.rank }
    }

    fn descriptor(&self) -> String {
        format!("free-abelian({})", self.rank)
    }

    fn identity(&self) -> Element {
        Element::Coords(Coords::from_elem(0, self.rank))
    }

    fn mul(&self, g: &Element, h: &Element) -> Element {
        Element::Coords(coords(g).iter().zip(coords(h)).map(|(a, b)| a + b).collect())
    }

    fn inv(&self, g: &Element) -> Element {
        Element::Coords(coords(g).iter().map(|a| -a).collect())
    }

    fn is_canonical(&self, g: &Element) -> bool {
        matches!(g, Element::Coords(c) if c.len() == self.rank)
    }

    fn standard_generators(&self) -> Vec<Generator> {
        (0..self.rank)
            .map(|i| {
                let mut c = Coords::from_elem(0, self.rank);
                c[i] = 1;
                Generator { name: format!("e{}", i + 1), element: Element::Coords(c) }
            })
            .collect()
    }

    fn render(&self, g: &Element) -> String {
        render_tuple(coords(g))
    }

    fn commutes(&self, _g: &Element, _h: &Element) -> bool {
        true
    }

    fn relations(&self) -> Relations {
        let mut rels = Vec::new();
        for i in 0..self.rank {
            for j in i + 1..self.rank {
                rels.push(commutator_word(&[GenLetter::new(i, false)], &[GenLetter::new(j, false)]));
            }
        }
        Relations::Presentation(rels)
    }

    fn order_of(&self, g: &Element, _cap: u64) -> OrderResult {
        if coords(g).iter().all(|&x| x == 0) {
            OrderResult::Finite(1)
        } else {
            OrderResult::Infinite
        }
    }

    fn word_for(&self, g: &Element) -> Option<GenWord> {
        Some(coords(g).iter().enumerate().flat_map(|(i, &x)| power_word(i, x)).collect())
    }
}

pub(crate) fn render_tuple(c: &[i64]) -> String {
    let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

/// `u⁻¹ v⁻¹ u v`
pub(crate) fn commutator_word(u: &[GenLetter], v: &[GenLetter]) -> GenWord {
    let mut w = super::invert_gen_word(u);
    w.extend(super::invert_gen_word(v));
    w.extend_from_slice(u);
    w.extend_from_slice(v);
    w
}

/// Discrete Heisenberg group in Mal'cev coordinates: `(x, y, z)` is the
/// unitriangular matrix with `x, y` on the superdiagonal and `z` in the corner.
/// Product: `(x₁+x₂, y₁+y₂, z₁+z₂+x₁y₂)`.
#[derive(Debug, Clone, Copy)]
pub struct Heisenberg;

impl GroupOps for Heisenberg {
    fn kind(&self) -> ModelKind {
        ModelKind::Heisenberg
    }

    fn descriptor(&self) -> String {
        "heisenberg".into()
    }

    fn identity(&self) -> Element {
        Element::Coords(Coords::from_slice(&[0, 0, 0]))
    }

    fn mul(&self, g: &Element, h: &Element) -> Element {
        let (a, b) = (coords(g), coords(h));
        Element::Coords(Coords::from_slice(&[a[0] + b[0], a[1] + b[1], a[2] + b[2] + a[0] * b[1]]))
    }

    fn inv(&self, g: &Element) -> Element {
        let a = coords(g);
        Element::Coords(Coords::from_slice(&[-a[0], -a[1], -a[2] + a[0] * a[1]]))
    }

    fn is_canonical(&self, g: &Element) -> bool {
        matches!(g, Element::Coords(c) if c.len() == 3)
    }

    fn standard_generators(&self) -> Vec<Generator> {
        vec![
            Generator { name: "a".into(), element: Element::Coords(Coords::from_slice(&[1, 0, 0])) },
            Generator { name: "b".into(), element: Element::Coords(Coords::from_slice(&[0, 1, 0])) },
        ]
    }

    fn render(&self, g: &Element) -> String {
        render_tuple(coords(g))
    }

    fn commutes(&self, g: &Element, h: &Element) -> bool {
        let (a, b) = (coords(g), coords(h));
        a[0] * b[1] == b[0] * a[1]
    }

    fn relations(&self) -> Relations {
        let a = [GenLetter::new(0, false)];
        let b = [GenLetter::new(1, false)];
        let c = commutator_word(&a, &b);
        Relations::Presentation(vec![commutator_word(&c, &a), commutator_word(&c, &b)])
    }

    fn order_of(&self, g: &Element, _cap: u64) -> OrderResult {
        // torsion-free
        if coords(g).iter().all(|&x| x == 0) {
            OrderResult::Finite(1)
        } else {
            OrderResult::Infinite
        }
    }

    fn word_for(&self, g: &Element) -> Option<GenWord> {
        // (x, y, z) = a^x b^y c^(z - xy) with c = a b a⁻¹ b⁻¹ = (0, 0, 1)
        let c = coords(g);
        let (x, y, z) = (c[0], c[1], c[2]);
        let central = [
            GenLetter::new(0, false),
            GenLetter::new(1, false),
            GenLetter::new(0, true),
            GenLetter::new(1, true),
        ];
        let k = z - x * y;
        let mut w: GenWord = power_word(0, x).chain(power_word(1, y)).collect();
        for _ in 0..k.unsigned_abs() {
            if k > 0 {
                w.extend_from_slice(&central);
            } else {
                w.extend(super::invert_gen_word(&central));
            }
        }
        Some(w)
    }
}

type Matrix = Vec<i64>;

fn mat_mul(d: usize, a: &Matrix, b: &Matrix) -> Matrix {
    let mut out = vec![0; d * d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i * d + k];
            if aik != 0 {
                for j in 0..d {
                    out[i * d + j] += aik * b[k * d + j];
                }
            }
        }
    }
    out
}

fn mat_identity(d: usize) -> Matrix {
    let mut m = vec![0; d * d];
    for i in 0..d {
        m[i * d + i] = 1;
    }
    m
}

/// Z^d ⋊ F for a finite group F of integer d×d matrices. `(v, A)(w, B) = (v + Aw, AB)`.
/// Payload: `Tagged { coords: v, tag: index of A }`.
#[derive(Debug, Clone)]
pub struct Semidirect {
    dim: usize,
    matrices: Vec<Matrix>,
    table: Vec<u32>,
    inverse: Vec<u32>,
    generators: Vec<(String, Coords, u32)>,
    dihedral: bool,
}

const POINT_GROUP_CAP: usize = 10_000;

impl Semidirect {
    /// `matrix_generators` are row-major d×d integer matrices generating a finite
    /// group. Default generating set: translations `t1..td` and `m1..` for the
    /// matrix generators with zero translation.
    pub fn new(dim: usize, matrix_generators: Vec<Vec<i64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::MalformedSpec("semidirect product needs dim >= 1".into()));
        }
        if let Some(m) = matrix_generators.iter().find(|m| m.len() != dim * dim) {
            return Err(Error::MalformedSpec(format!("matrix {m:?} is not {dim}x{dim}")));
        }
        let mut matrices = vec![mat_identity(dim)];
        let mut index: FxHashMap<Matrix, u32> = FxHashMap::default();
        index.insert(matrices[0].clone(), 0);
        let mut gen_tags = Vec::new();
        for m in &matrix_generators {
            let t = *index.entry(m.clone()).or_insert_with(|| {
                matrices.push(m.clone());
                (matrices.len() - 1) as u32
            });
            gen_tags.push(t);
        }
        let mut i = 0;
        while i < matrices.len() {
            for m in &matrix_generators {
                let p = mat_mul(dim, &matrices[i], m);
                if !index.contains_key(&p) {
                    if matrices.len() >= POINT_GROUP_CAP {
                        return Err(Error::MalformedSpec("matrix group is not finite (or too large)".into()));
                    }
                    index.insert(p.clone(), matrices.len() as u32);
                    matrices.push(p);
                }
            }
            i += 1;
        }
        let n = matrices.len();
        let mut table = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                table[a * n + b] = index[&mat_mul(dim, &matrices[a], &matrices[b])];
            }
        }
        let inverse = (0..n)
            .map(|a| (0..n).find(|&b| table[a * n + b] == 0).map(|b| b as u32))
            .collect::<Option<Vec<u32>>>()
            .ok_or_else(|| Error::MalformedSpec("matrix generators are not invertible".into()))?;
        let mut generators = Vec::new();
        for i in 0..dim {
            let mut c = Coords::from_elem(0, dim);
            c[i] = 1;
            generators.push((format!("t{}", i + 1), c, 0));
        }
        for (k, &t) in gen_tags.iter().enumerate() {
            generators.push((format!("m{}", k + 1), Coords::from_elem(0, dim), t));
        }
        Ok(Self { dim, matrices, table, inverse, generators, dihedral: false })
    }

    /// D∞ = Z ⋊ Z₂ generated by the reflections `s: x ↦ -x` and `t: x ↦ 1 - x`.
    pub fn infinite_dihedral() -> Self {
        let mut g = Self::new(1, vec![vec![-1]]).expect("point group {±1}");
        g.generators = vec![
            ("s".into(), Coords::from_slice(&[0]), 1),
            ("t".into(), Coords::from_slice(&[1]), 1),
        ];
        g.dihedral = true;
        g
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point_group_order(&self) -> usize {
        self.matrices.len()
    }

    fn parts<'a>(&self, g: &'a Element) -> (&'a Coords, u32) {
        match g {
            Element::Tagged { coords, tag } => (coords, *tag),
            other => panic!("expected a tagged payload, got {}", other.payload_kind()),
        }
    }

    fn apply(&self, tag: u32, v: &Coords) -> Coords {
        let m = &self.matrices[tag as usize];
        let d = self.dim;
        (0..d).map(|i| (0..d).map(|k| m[i * d + k] * v[k]).sum()).collect()
    }

    /// Whether `g` lies in the translation subgroup Z^d.
    pub fn is_translation(g: &Element) -> bool {
        matches!(g, Element::Tagged { tag: 0, .. })
    }
}

impl GroupOps for Semidirect {
    fn kind(&self) -> ModelKind {
        if self.dihedral {
            ModelKind::InfiniteDihedral
        } else {
            ModelKind::Semidirect { dim: self.dim }
        }
    }

    fn descriptor(&self) -> String {
        if self.dihedral {
            "infinite-dihedral".into()
        } else {
            format!("semidirect({}, {:?})", self.dim, self.matrices)
        }
    }

    fn identity(&self) -> Element {
        Element::Tagged { coords: Coords::from_elem(0, self.dim), tag: 0 }
    }

    fn mul(&self, g: &Element, h: &Element) -> Element {
        let (v, a) = self.parts(g);
        let (w, b) = self.parts(h);
        let aw = self.apply(a, w);
        let n = self.matrices.len();
        Element::Tagged {
            coords: v.iter().zip(&aw).map(|(x, y)| x + y).collect(),
            tag: self.table[a as usize * n + b as usize],
        }
    }

    fn inv(&self, g: &Element) -> Element {
        let (v, a) = self.parts(g);
        let ai = self.inverse[a as usize];
        Element::Tagged { coords: self.apply(ai, v).iter().map(|x| -x).collect(), tag: ai }
    }

    fn is_canonical(&self, g: &Element) -> bool {
        matches!(g, Element::Tagged { coords, tag } if coords.len() == self.dim && (*tag as usize) < self.matrices.len())
    }

    fn standard_generators(&self) -> Vec<Generator> {
        self.generators
            .iter()
            .map(|(name, c, t)| Generator { name: name.clone(), element: Element::Tagged { coords: c.clone(), tag: *t } })
            .collect()
    }

    fn render(&self, g: &Element) -> String {
        let (v, a) = self.parts(g);
        if self.dihedral {
            let kind = if a == 0 { "T" } else { "R" };
            format!("{kind}{}", v[0])
        } else {
            format!("{}#{a}", render_tuple(v))
        }
    }

    fn relations(&self) -> Relations {
        if self.dihedral {
            Relations::Presentation(vec![
                vec![GenLetter::new(0, false); 2],
                vec![GenLetter::new(1, false); 2],
            ])
        } else {
            Relations::Unknown
        }
    }

    fn order_of(&self, g: &Element, _cap: u64) -> OrderResult {
        let (_, a) = self.parts(g);
        let n = self.matrices.len();
        let mut k = 1u64;
        let mut t = a;
        while t != 0 {
            t = self.table[t as usize * n + a as usize];
            k += 1;
        }
        let mut acc = g.clone();
        for _ in 1..k {
            acc = self.mul(&acc, g);
        }
        if acc == self.identity() {
            OrderResult::Finite(k)
        } else {
            OrderResult::Infinite
        }
    }

    fn word_for(&self, g: &Element) -> Option<GenWord> {
        if !self.dihedral {
            return None;
        }
        // (k, I) = (ts)^k and (k, R) = (ts)^k s
        let (v, a) = self.parts(g);
        let k = v[0];
        let ts = if k >= 0 {
            [GenLetter::new(1, false), GenLetter::new(0, false)]
        } else {
            [GenLetter::new(0, false), GenLetter::new(1, false)]
        };
        let mut w: GenWord = Vec::new();
        for _ in 0..k.unsigned_abs() {
            w.extend_from_slice(&ts);
        }
        if a != 0 {
            w.push(GenLetter::new(0, false));
        }
        Some(w)
    }
}
