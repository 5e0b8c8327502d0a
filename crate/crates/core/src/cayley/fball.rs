use std::fmt;
use std::sync::Arc;

use super::{enumerate_ball, Ball, BallOptions};
use crate::error::{Error, Result};
use crate::group::{Element, GroupModel, Homomorphism, Semidirect};

/// Membership test for a subgroup H ≤ G.
#[derive(Clone)]
pub enum SubgroupPredicate {
    /// H = ker(hom).
    Kernel(Homomorphism),
    Builtin { name: String, test: Arc<dyn Fn(&Element) -> bool + Send + Sync> },
}

impl fmt::Debug for SubgroupPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubgroupPredicate::Kernel(h) => f.debug_tuple("Kernel").field(h).finish(),
            SubgroupPredicate::Builtin { name, .. } => f.debug_tuple("Builtin").field(name).finish(),
        }
    }
}

impl SubgroupPredicate {
    pub fn builtin<F: Fn(&Element) -> bool + Send + Sync + 'static>(name: &str, test: F) -> Self {
        SubgroupPredicate::Builtin { name: name.into(), test: Arc::new(test) }
    }

    /// Translation subgroup Z^d of a semidirect product (index = |point group|).
    pub fn translations() -> Self {
        Self::builtin("translations", Semidirect::is_translation)
    }

    pub fn label(&self) -> String {
        match self {
            SubgroupPredicate::Kernel(h) => format!("kernel->{}", h.target().kind()),
            SubgroupPredicate::Builtin { name, .. } => name.clone(),
        }
    }

    pub fn contains(&self, g: &Element) -> Result<bool> {
        match self {
            SubgroupPredicate::Kernel(h) => Ok(h.apply(g)? == h.target().identity()),
            SubgroupPredicate::Builtin { test, .. } => Ok(test(g)),
        }
    }

    /// Membership flags for every ball element.
    pub fn flags_on_ball(&self, ball: &Ball) -> Result<Vec<bool>> {
        match self {
            SubgroupPredicate::Kernel(h) => {
                let id = h.target().identity();
                Ok(h.images_on_ball(ball)?.into_iter().map(|img| img == id).collect())
            }
            SubgroupPredicate::Builtin { test, .. } => Ok(ball.iter().map(|g| test(g)).collect()),
        }
    }

    /// Checks closure under products and inverses on the given members.
    pub fn check_closure(&self, model: &GroupModel, members: &[Element]) -> Result<bool> {
        for g in members {
            if !self.contains(&model.inv(g))? {
                return Ok(false);
            }
            for h in members {
                if !self.contains(&model.mul(g, h))? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

#[derive(Clone, Debug)]
pub enum FBallMode {
    /// {h ∈ B_X(n) : h ∈ H}, with X-distances.
    Subgroup(SubgroupPredicate),
    /// B_Y(n) for another generating set Y of the same group.
    Generators(GroupModel),
}

#[derive(Clone, Debug)]
pub struct FBallSpec {
    pub mode: FBallMode,
    pub description: String,
}

impl FBallSpec {
    pub fn subgroup(pred: SubgroupPredicate) -> Self {
        let description = pred.label();
        Self { mode: FBallMode::Subgroup(pred), description }
    }

    pub fn generators(model: GroupModel) -> Self {
        let description = format!("generators[{}]", model.generator_names().join(","));
        Self { mode: FBallMode::Generators(model), description }
    }
}

pub fn f_ball(model: &GroupModel, spec: &FBallSpec, n: usize, options: &BallOptions) -> Result<Ball> {
    match &spec.mode {
        FBallMode::Subgroup(pred) => {
            let ball = enumerate_ball(model, n, options)?;
            let keep = pred.flags_on_ball(&ball)?;
            Ok(ball.filtered(&keep, &spec.description))
        }
        FBallMode::Generators(other) => {
            if other.ops().descriptor() != model.ops().descriptor() {
                return Err(Error::InvalidArgument("alternative generating set belongs to a different model".into()));
            }
            enumerate_ball(other, n, options)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::presets;

    #[test]
    fn z2_kernel_of_x_parity() {
        let z2 = presets::free_abelian(2);
        let c2 = presets::cyclic(2).unwrap();
        let hom = Homomorphism::from_target_words(z2.clone(), c2, &["e1", "1"]).unwrap();
        let fb = f_ball(&z2, &FBallSpec::subgroup(SubgroupPredicate::Kernel(hom)), 1, &Default::default()).unwrap();
        assert_eq!(fb.len(), 3);
        let rendered: Vec<String> = fb.iter().map(|g| z2.render(g)).collect();
        assert_eq!(rendered, ["(0,0)", "(0,1)", "(0,-1)"]);
    }

    #[test]
    fn even_length_kernel_in_free_group() {
        let f2 = presets::free(2);
        let hom = Homomorphism::length_parity(f2.clone()).unwrap();
        let fb = f_ball(&f2, &FBallSpec::subgroup(SubgroupPredicate::Kernel(hom)), 2, &Default::default()).unwrap();
        assert_eq!(fb.len(), 13);
        assert_eq!(fb.sphere_sizes(), vec![1, 0, 12]);
    }

    #[test]
    fn dihedral_alternative_generators_grow_linearly() {
        let d = presets::infinite_dihedral();
        let y = d.with_generator_words(&[("s", "s"), ("u", "st")]).unwrap();
        let spec = FBallSpec::generators(y);
        let mut prev = 0;
        for n in 1..=8 {
            let by = f_ball(&d, &spec, n, &Default::default()).unwrap();
            assert!(by.contains(&d.identity()));
            assert!(by.len() > prev && by.len() <= 4 * n + 1);
            prev = by.len();
        }
        let bx = enumerate_ball(&d, 8, &Default::default()).unwrap();
        assert_eq!(bx.len(), 17);
    }

    #[test]
    fn subgroup_ball_equals_filtered_ball() {
        let d = presets::infinite_dihedral();
        let pred = SubgroupPredicate::translations();
        let fb = f_ball(&d, &FBallSpec::subgroup(pred.clone()), 10, &Default::default()).unwrap();
        let full = enumerate_ball(&d, 10, &Default::default()).unwrap();
        let oracle: Vec<&Element> = full.iter().filter(|g| matches!(g, Element::Tagged { tag: 0, .. })).collect();
        assert_eq!(fb.iter().collect::<Vec<_>>(), oracle);
        let members: Vec<Element> = fb.iter().cloned().collect();
        assert!(pred.check_closure(&d, &members).unwrap());
    }
}
