use std::sync::Arc;

use rustc_hash::FxHashMap;

use super::{Coords, Element, FiniteTable, Generator, GroupModel, GroupOps, Homomorphism, ModelKind, Relations};
use crate::error::{Error, Result};

/// Coordinates of an integer-coordinate model reduced mod `m`. Reduction is a
/// homomorphism for every supported base because the product formulas are
/// polynomial with integer coefficients.
#[derive(Debug)]
pub struct CongruenceQuotient {
    base: Arc<dyn GroupOps>,
    modulus: i64,
}

impl CongruenceQuotient {
    pub fn new(base: Arc<dyn GroupOps>, modulus: i64) -> Result<Self> {
        if !base.kind().has_integer_coords() {
            return Err(Error::Unsupported { op: "quotient", kind: base.kind().to_string() });
        }
        if modulus < 1 {
            return Err(Error::MalformedSpec(format!("modulus {modulus} must be positive")));
        }
        Ok(Self { base, modulus })
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    pub fn reduce(&self, g: &Element) -> Element {
        let m = self.modulus;
        match g {
            Element::Coords(c) => Element::Coords(c.iter().map(|x| x.rem_euclid(m)).collect()),
            Element::Tagged { coords, tag } => Element::Tagged {
                coords: coords.iter().map(|x| x.rem_euclid(m)).collect::<Coords>(),
                tag: *tag,
            },
            other => panic!("cannot reduce a {} payload", other.payload_kind()),
        }
    }
}

impl GroupOps for CongruenceQuotient {
    fn kind(&self) -> ModelKind {
        ModelKind::CongruenceQuotient { base: Box::new(self.base.kind()), modulus: self.modulus }
    }

    fn descriptor(&self) -> String {
        format!("{} mod {}", self.base.descriptor(), self.modulus)
    }

    fn identity(&self) -> Element {
        self.base.identity()
    }

    fn mul(&self, g: &Element, h: &Element) -> Element {
        self.reduce(&self.base.mul(g, h))
    }

    fn inv(&self, g: &Element) -> Element {
        self.reduce(&self.base.inv(g))
    }

    fn is_canonical(&self, g: &Element) -> bool {
        let in_range = |c: &Coords| c.iter().all(|&x| (0..self.modulus).contains(&x));
        self.base.is_canonical(g)
            && match g {
                Element::Coords(c) => in_range(c),
                Element::Tagged { coords, .. } => in_range(coords),
                _ => false,
            }
    }

    fn standard_generators(&self) -> Vec<Generator> {
        self.base
            .standard_generators()
            .into_iter()
            .map(|g| Generator { name: g.name, element: self.reduce(&g.element) })
            .collect()
    }

    fn render(&self, g: &Element) -> String {
        self.base.render(g)
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn commutes(&self, g: &Element, h: &Element) -> bool {
        self.mul(g, h) == self.mul(h, g)
    }

    fn relations(&self) -> Relations {
        Relations::Exhaustive
    }
}

/// Reduction of an integer-coordinate model mod `m`, with the reduction map.
pub fn quotient(g: &GroupModel, m: i64) -> Result<(GroupModel, Homomorphism)> {
    let q = Arc::new(CongruenceQuotient::new(g.inner.ops.clone(), m)?);
    let target = GroupModel::from_arc(q.clone());
    let reducer = q.clone();
    let hom = Homomorphism::from_map(g.clone(), target.clone(), move |x| reducer.reduce(x))?;
    Ok((target, hom))
}

/// Center of a finite model, in BFS order.
pub fn center(g: &GroupModel) -> Result<Vec<Element>> {
    let ball = g.elements()?;
    Ok(ball
        .iter()
        .filter(|z| g.generators().iter().all(|x| g.commutes(z, &x.element)))
        .cloned()
        .collect())
}

/// G/N for a finite model and a normal subgroup N given by its elements.
/// The quotient is a table group whose element `i` is the coset of the i-th
/// coset representative in BFS order.
pub fn quotient_by_normal(g: &GroupModel, normal: &[Element]) -> Result<(GroupModel, Homomorphism)> {
    let ball = g.elements()?;
    let id = g.identity();
    if !normal.contains(&id) {
        return Err(Error::InvalidArgument("subgroup must contain the identity".into()));
    }
    let members: rustc_hash::FxHashSet<&Element> = normal.iter().collect();
    for a in normal {
        for b in normal {
            if !members.contains(&g.mul(a, &g.inv(b))) {
                return Err(Error::InvalidArgument("given elements do not form a subgroup".into()));
            }
        }
    }
    for x in ball.iter() {
        let xi = g.inv(x);
        if normal.iter().any(|n| !members.contains(&g.mul(&g.mul(x, n), &xi))) {
            return Err(Error::InvalidArgument("subgroup is not normal".into()));
        }
    }
    let mut coset_of: FxHashMap<Element, u32> = FxHashMap::default();
    let mut reps: Vec<Element> = Vec::new();
    for x in ball.iter() {
        if coset_of.contains_key(x) {
            continue;
        }
        let c = reps.len() as u32;
        for n in normal {
            coset_of.insert(g.mul(x, n), c);
        }
        reps.push(x.clone());
    }
    let k = reps.len();
    let mut table = vec![0u32; k * k];
    for a in 0..k {
        for b in 0..k {
            table[a * k + b] = coset_of[&g.mul(&reps[a], &reps[b])];
        }
    }
    let names = reps.iter().map(|r| format!("{}N", g.render(r))).collect();
    let gens = g
        .generators()
        .iter()
        .map(|x| (x.name.clone(), coset_of[&x.element]))
        .collect();
    let target = GroupModel::new(FiniteTable::new("quotient", names, table, gens)?);
    let hom = Homomorphism::from_map(g.clone(), target.clone(), move |x| Element::Index(coset_of[x]))?;
    Ok((target, hom))
}
