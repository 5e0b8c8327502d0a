use smallvec::SmallVec;

use super::{Element, Generator, GroupModel, GroupOps, ModelKind, Relations};
use crate::error::{Error, Result};

type Perm = SmallVec<[u8; 8]>;

fn perm(g: &Element) -> &Perm {
    match g {
        Element::Perm(p) => p,
        other => panic!("expected a permutation payload, got {}", other.payload_kind()),
    }
}

/// Permutation group on `{0, …, degree-1}`. Products act left to right:
/// `(gh)(x) = h(g(x))`.
#[derive(Debug, Clone)]
pub struct PermutationGroup {
    degree: usize,
    label: String,
    generators: Vec<(String, Perm)>,
}

impl PermutationGroup {
    /// Generators given as image lists.
    pub fn new(label: &str, degree: usize, generators: Vec<(String, Vec<u8>)>) -> Result<Self> {
        if degree == 0 || degree > 255 {
            return Err(Error::MalformedSpec(format!("permutation degree {degree} outside 1..=255")));
        }
        let mut gens = Vec::new();
        for (name, images) in generators {
            let mut seen = vec![false; degree];
            if images.len() != degree || images.iter().any(|&x| (x as usize) >= degree || std::mem::replace(&mut seen[x as usize], true)) {
                return Err(Error::MalformedSpec(format!("{name} = {images:?} is not a permutation of degree {degree}")));
            }
            gens.push((name, Perm::from_vec(images)));
        }
        if gens.is_empty() {
            return Err(Error::MalformedSpec("permutation group needs generators".into()));
        }
        Ok(Self { degree, label: label.to_string(), generators: gens })
    }

    /// Generators written in 1-based cycle notation, e.g. `(1 2)(3 4)`.
    pub fn from_cycles(label: &str, degree: usize, generators: &[(&str, &str)]) -> Result<Self> {
        let gens = generators
            .iter()
            .map(|(name, cycles)| Ok((name.to_string(), parse_cycles(degree, cycles)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(label, degree, gens)
    }

    pub fn symmetric(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::MalformedSpec("S_n needs n >= 2".into()));
        }
        let long: String = format!("({})", (1..=n).map(|i| i.to_string()).collect::<Vec<_>>().join(" "));
        Self::from_cycles(&format!("S{n}"), n, &[("x", "(1 2)"), ("y", &long)])
    }

    pub fn alternating(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::MalformedSpec("A_n needs n >= 3".into()));
        }
        let cycles: Vec<(String, String)> = (3..=n).map(|k| (format!("c{}", k - 2), format!("(1 2 {k})"))).collect();
        let refs: Vec<(&str, &str)> = cycles.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        Self::from_cycles(&format!("A{n}"), n, &refs)
    }

    pub fn dihedral(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::MalformedSpec("dihedral group needs n >= 3".into()));
        }
        let rot: Vec<u8> = (0..n).map(|i| ((i + 1) % n) as u8).collect();
        let refl: Vec<u8> = (0..n).map(|i| ((n - i) % n) as u8).collect();
        Self::new(&format!("D{n}"), n, vec![("r".into(), rot), ("f".into(), refl)])
    }
}

fn parse_cycles(degree: usize, text: &str) -> Result<Vec<u8>> {
    let mut images: Vec<u8> = (0..degree as u8).collect();
    for cycle in text.split(')') {
        let body = cycle.trim().trim_start_matches('(');
        if body.trim().is_empty() {
            continue;
        }
        let pts = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| match s.parse::<usize>() {
                Ok(p) if (1..=degree).contains(&p) => Ok((p - 1) as u8),
                _ => Err(Error::MalformedSpec(format!("bad cycle point '{s}' in {text}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        for (i, &p) in pts.iter().enumerate() {
            images[p as usize] = pts[(i + 1) % pts.len()];
        }
    }
    Ok(images)
}

impl GroupOps for PermutationGroup {
    fn kind(&self) -> ModelKind {
        ModelKind::FinitePermutation
    }

    fn descriptor(&self) -> String {
        let gens: Vec<String> = self.generators.iter().map(|(n, p)| format!("{n}={p:?}")).collect();
        format!("perm-{}({};{})", self.label, self.degree, gens.join(","))
    }

    fn identity(&self) -> Element {
        Element::Perm((0..self.degree as u8).collect())
    }

    fn mul(&self, g: &Element, h: &Element) -> Element {
        let (g, h) = (perm(g), perm(h));
        Element::Perm(g.iter().map(|&x| h[x as usize]).collect())
    }

    fn inv(&self, g: &Element) -> Element {
        let g = perm(g);
        let mut out = Perm::from_elem(0, g.len());
        for (i, &x) in g.iter().enumerate() {
            out[x as usize] = i as u8;
        }
        Element::Perm(out)
    }

    fn is_canonical(&self, g: &Element) -> bool {
        match g {
            Element::Perm(p) => {
                let mut seen = vec![false; self.degree];
                p.len() == self.degree
                    && p.iter().all(|&x| (x as usize) < self.degree && !std::mem::replace(&mut seen[x as usize], true))
            }
            _ => false,
        }
    }

    fn standard_generators(&self) -> Vec<Generator> {
        self.generators
            .iter()
            .map(|(name, p)| Generator { name: name.clone(), element: Element::Perm(p.clone()) })
            .collect()
    }

    fn render(&self, g: &Element) -> String {
        let p = perm(g);
        let mut seen = vec![false; p.len()];
        let mut out = String::new();
        for start in 0..p.len() {
            if seen[start] || p[start] as usize == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push((x + 1).to_string());
                x = p[x] as usize;
            }
            out.push_str(&format!("({})", cycle.join(" ")));
        }
        if out.is_empty() {
            "()".into()
        } else {
            out
        }
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn relations(&self) -> Relations {
        Relations::Exhaustive
    }
}

/// Finite group given by its multiplication table; element 0 is the identity.
#[derive(Debug, Clone)]
pub struct FiniteTable {
    label: String,
    names: Vec<String>,
    table: Vec<u32>,
    inverse: Vec<u32>,
    generators: Vec<(String, u32)>,
}

impl FiniteTable {
    /// Builds from a full table (`table[a * n + b] = a·b`). Checks the group
    /// axioms, including associativity.
    pub fn new(label: &str, names: Vec<String>, table: Vec<u32>, generators: Vec<(String, u32)>) -> Result<Self> {
        let n = names.len();
        if n == 0 || table.len() != n * n || table.iter().any(|&x| x as usize >= n) {
            return Err(Error::MalformedSpec("table dimensions do not match the element list".into()));
        }
        for a in 0..n {
            if table[a] as usize != a || table[a * n] as usize != a {
                return Err(Error::MalformedSpec("element 0 is not a two-sided identity".into()));
            }
        }
        let inverse = (0..n)
            .map(|a| (0..n).find(|&b| table[a * n + b] == 0 && table[b * n + a] == 0).map(|b| b as u32))
            .collect::<Option<Vec<u32>>>()
            .ok_or_else(|| Error::MalformedSpec("some element has no inverse".into()))?;
        for a in 0..n {
            for b in 0..n {
                let ab = table[a * n + b] as usize;
                for c in 0..n {
                    let bc = table[b * n + c] as usize;
                    if table[ab * n + c] != table[a * n + bc] {
                        return Err(Error::MalformedSpec(format!("table is not associative at ({a},{b},{c})")));
                    }
                }
            }
        }
        if generators.iter().any(|(_, g)| *g as usize >= n) {
            return Err(Error::MalformedSpec("generator index out of range".into()));
        }
        Ok(Self { label: label.into(), names, table, inverse, generators })
    }

    /// Materializes a finite model as a table. Element order is BFS order in
    /// the model's Cayley graph.
    pub fn from_model(label: &str, model: &GroupModel) -> Result<Self> {
        let ball = model.elements()?;
        let n = ball.len();
        let mut table = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                let p = model.mul(ball.element(a), ball.element(b));
                table[a * n + b] = ball.index_of(&p).expect("closed under multiplication") as u32;
            }
        }
        let names = ball.iter().map(|g| model.render(g)).collect();
        let generators = model
            .generators()
            .iter()
            .map(|g| (g.name.clone(), ball.index_of(&g.element).unwrap() as u32))
            .collect();
        Self::new(label, names, table, generators)
    }

    /// Q8 = {±1, ±i, ±j, ±k} generated by i and j.
    pub fn quaternion() -> Self {
        // unit index 0..4 = 1, i, j, k; element index = 2 * unit + (negative as usize)
        fn unit_mul(a: usize, b: usize) -> (usize, bool) {
            match (a, b) {
                (0, x) | (x, 0) => (x, false),
                (x, y) if x == y => (0, true),
                (1, 2) => (3, false),
                (2, 3) => (1, false),
                (3, 1) => (2, false),
                (2, 1) => (3, true),
                (3, 2) => (1, true),
                (1, 3) => (2, true),
                _ => unreachable!(),
            }
        }
        let units = ["1", "i", "j", "k"];
        let mut names = Vec::new();
        for u in units {
            names.push(u.to_string());
            names.push(format!("-{u}"));
        }
        let mut table = vec![0u32; 64];
        for a in 0..8 {
            for b in 0..8 {
                let (u, neg) = unit_mul(a / 2, b / 2);
                let neg = neg ^ (a % 2 == 1) ^ (b % 2 == 1);
                table[a * 8 + b] = (2 * u + neg as usize) as u32;
            }
        }
        Self::new("Q8", names, table, vec![("i".into(), 2), ("j".into(), 4)]).expect("valid Q8 table")
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn element_named(&self, name: &str) -> Option<Element> {
        self.names.iter().position(|n| n == name).map(|i| Element::Index(i as u32))
    }

    fn idx(g: &Element) -> usize {
        match g {
            Element::Index(i) => *i as usize,
            other => panic!("expected a table index, got {}", other.payload_kind()),
        }
    }
}

impl GroupOps for FiniteTable {
    fn kind(&self) -> ModelKind {
        ModelKind::FiniteTable
    }

    fn descriptor(&self) -> String {
        format!("table-{}({})", self.label, self.names.len())
    }

    fn identity(&self) -> Element {
        Element::Index(0)
    }

    fn mul(&self, g: &Element, h: &Element) -> Element {
        let n = self.names.len();
        Element::Index(self.table[Self::idx(g) * n + Self::idx(h)])
    }

    fn inv(&self, g: &Element) -> Element {
        Element::Index(self.inverse[Self::idx(g)])
    }

    fn is_canonical(&self, g: &Element) -> bool {
        matches!(g, Element::Index(i) if (*i as usize) < self.names.len())
    }

    fn standard_generators(&self) -> Vec<Generator> {
        self.generators
            .iter()
            .map(|(name, i)| Generator { name: name.clone(), element: Element::Index(*i) })
            .collect()
    }

    fn render(&self, g: &Element) -> String {
        self.names[Self::idx(g)].clone()
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn relations(&self) -> Relations {
        Relations::Exhaustive
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::presets;

    #[test]
    fn quaternion_inverse_of_i() {
        let q = FiniteTable::quaternion();
        let i = q.element_named("i").unwrap();
        let minus_i = q.element_named("-i").unwrap();
        assert_eq!(q.inv(&i), minus_i);
        assert_eq!(q.mul(&i, &minus_i), q.identity());
        let j = q.element_named("j").unwrap();
        assert_eq!(q.render(&q.mul(&i, &j)), "k");
        assert_eq!(q.render(&q.mul(&j, &i)), "-k");
    }

    #[test]
    fn table_and_permutation_s3_agree() {
        let perm = presets::symmetric(3).unwrap();
        let table = GroupModel::new(FiniteTable::from_model("S3", &perm).unwrap());
        let elems = perm.elements().unwrap();
        // table index i corresponds to elems[i]
        for a in 0..6 {
            for b in 0..6 {
                let p = perm.mul(elems.element(a), elems.element(b));
                let t = table.mul(&Element::Index(a as u32), &Element::Index(b as u32));
                assert_eq!(Element::Index(elems.index_of(&p).unwrap() as u32), t);
            }
        }
    }

    #[test]
    fn group_orders() {
        assert_eq!(presets::symmetric(4).unwrap().group_order().unwrap(), 24);
        assert_eq!(presets::alternating(4).unwrap().group_order().unwrap(), 12);
        assert_eq!(presets::dihedral(4).unwrap().group_order().unwrap(), 8);
        assert_eq!(presets::quaternion().group_order().unwrap(), 8);
    }

    #[test]
    fn rejects_non_associative_table() {
        // Z3 with a corrupted entry
        let names: Vec<String> = (0..3).map(|i| i.to_string()).collect();
        let table = vec![0, 1, 2, 1, 2, 0, 2, 1, 1];
        assert!(FiniteTable::new("bad", names, table, vec![]).is_err());
    }

    #[test]
    fn cycle_notation_round_trip() {
        let s4 = presets::symmetric(4).unwrap();
        let g = s4.parse_element("x y").unwrap();
        let r = s4.render(&g);
        assert!(r.starts_with('('));
        assert_eq!(s4.order_of(&g, 10), crate::group::OrderResult::Finite(3));
    }
}
