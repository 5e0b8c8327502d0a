use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Element, GenLetter, GroupModel, Relations};
use crate::cayley::Ball;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verification {
    /// Defining relations (or the whole Cayley graph) were checked, or the map
    /// is a homomorphism by construction.
    Verified,
    /// No relations were available to check against.
    Unverified,
}

type DirectMap = Arc<dyn Fn(&Element) -> Element + Send + Sync>;

/// Homomorphism from a model onto (a subgroup of) a finite model, determined
/// by the images of the source generators.
#[derive(Clone)]
pub struct Homomorphism {
    source: GroupModel,
    target: GroupModel,
    images: Vec<Element>,
    direct: Option<DirectMap>,
    verification: Verification,
}

impl fmt::Debug for Homomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let images: Vec<String> = self.images.iter().map(|g| self.target.render(g)).collect();
        f.debug_struct("Homomorphism")
            .field("source", &self.source.kind())
            .field("target", &self.target.kind())
            .field("images", &images)
            .field("verification", &self.verification)
            .finish()
    }
}

impl Homomorphism {
    /// Checks the source's defining relations against the images. Fails if a
    /// relation is violated; records `Unverified` if none are known.
    pub fn new(source: GroupModel, target: GroupModel, images: Vec<Element>) -> Result<Self> {
        if !target.is_finite() {
            return Err(Error::InvalidArgument("homomorphism target must be finite".into()));
        }
        if images.len() != source.generators().len() {
            return Err(Error::InvalidArgument(format!(
                "{} images for {} generators",
                images.len(),
                source.generators().len()
            )));
        }
        for img in &images {
            if !target.is_canonical(img) {
                return Err(Error::PayloadMismatch(format!("image {img:?} is not a target element")));
            }
        }
        let mut hom = Self { source, target, images, direct: None, verification: Verification::Unverified };
        hom.verification = hom.verify()?;
        Ok(hom)
    }

    /// Images given as words in the target's generator names.
    pub fn from_target_words(source: GroupModel, target: GroupModel, words: &[&str]) -> Result<Self> {
        let images = words.iter().map(|w| target.parse_element(w)).collect::<Result<Vec<_>>>()?;
        Self::new(source, target, images)
    }

    /// A map known to be a homomorphism (reduction mod m, projection onto
    /// cosets). Applied directly to payloads.
    pub fn from_map<F>(source: GroupModel, target: GroupModel, map: F) -> Result<Self>
    where
        F: Fn(&Element) -> Element + Send + Sync + 'static,
    {
        if !target.is_finite() {
            return Err(Error::InvalidArgument("homomorphism target must be finite".into()));
        }
        let images = source.generators().iter().map(|g| map(&g.element)).collect();
        Ok(Self { source, target, images, direct: Some(Arc::new(map)), verification: Verification::Verified })
    }

    /// Word-length parity: every generator maps to the generator of Z₂.
    pub fn length_parity(source: GroupModel) -> Result<Self> {
        let z2 = super::presets::cyclic(2)?;
        let one = z2.generators()[0].element.clone();
        let n = source.generators().len();
        Self::new(source, z2, vec![one; n])
    }

    pub fn source(&self) -> &GroupModel {
        &self.source
    }

    pub fn target(&self) -> &GroupModel {
        &self.target
    }

    pub fn images(&self) -> &[Element] {
        &self.images
    }

    pub fn verification(&self) -> Verification {
        self.verification
    }

    pub fn is_verified(&self) -> bool {
        self.verification == Verification::Verified
    }

    fn letter_image(&self, l: GenLetter) -> Element {
        let img = &self.images[l.gen];
        if l.inverse {
            self.target.inv(img)
        } else {
            img.clone()
        }
    }

    pub fn image_of_word(&self, w: &[GenLetter]) -> Element {
        w.iter()
            .fold(self.target.identity(), |acc, &l| self.target.mul(&acc, &self.letter_image(l)))
    }

    pub fn apply(&self, g: &Element) -> Result<Element> {
        if let Some(map) = &self.direct {
            if !self.source.is_canonical(g) {
                return Err(Error::PayloadMismatch(format!("{g:?} is not a source element")));
            }
            return Ok(map(g));
        }
        let w = self.source.word_for(g, 1_000_000)?;
        Ok(self.image_of_word(&w))
    }

    /// Images of every ball element, propagated along BFS parent edges.
    pub fn images_on_ball(&self, ball: &Ball) -> Result<Vec<Element>> {
        if let Some(map) = &self.direct {
            return Ok(ball.iter().map(|g| map(g)).collect());
        }
        if ball.fingerprint() != self.source.fingerprint() {
            return Err(Error::InvalidArgument("ball was not enumerated over the homomorphism's source".into()));
        }
        let parents = ball
            .parents()
            .ok_or_else(|| Error::InvalidArgument("ball has no BFS parent data".into()))?;
        let alphabet = self.source.alphabet();
        let mut out: Vec<Element> = Vec::with_capacity(ball.len());
        out.push(self.target.identity());
        for &(parent, letter) in &parents[1..] {
            let img = self.target.mul(&out[parent as usize], &self.letter_image(alphabet[letter as usize].letter));
            out.push(img);
        }
        Ok(out)
    }

    fn verify(&self) -> Result<Verification> {
        match self.source.relations() {
            Relations::Presentation(rels) => {
                let id = self.target.identity();
                for r in rels {
                    let img = self.image_of_word(&r);
                    if img != id {
                        return Err(Error::RelationCheck(format!(
                            "relator of length {} maps to {}",
                            r.len(),
                            self.target.render(&img)
                        )));
                    }
                }
                Ok(Verification::Verified)
            }
            Relations::Exhaustive => {
                let ball = self.source.elements()?;
                let images = self.images_on_ball(&ball)?;
                let alphabet = self.source.alphabet();
                for (i, g) in ball.iter().enumerate() {
                    for l in alphabet {
                        let j = ball.index_of(&self.source.mul(g, &l.element)).expect("closed");
                        if images[j] != self.target.mul(&images[i], &self.letter_image(l.letter)) {
                            return Err(Error::RelationCheck(format!(
                                "map is not well defined at {}",
                                self.source.render(g)
                            )));
                        }
                    }
                }
                Ok(Verification::Verified)
            }
            Relations::Unknown => Ok(Verification::Unverified),
        }
    }

    /// Image subgroup in the target, generated by the generator images.
    pub fn image_elements(&self) -> Result<Vec<Element>> {
        let sub = self.target.with_generators(
            self.images
                .iter()
                .enumerate()
                .map(|(i, e)| super::Generator { name: format!("h{i}"), element: e.clone() })
                .collect(),
        )?;
        let ball = crate::cayley::enumerate_closure(&sub, &Default::default())?;
        Ok(ball.iter().cloned().collect())
    }

    /// `[G : ker]`, the size of the image.
    pub fn kernel_index(&self) -> Result<usize> {
        Ok(self.image_elements()?.len())
    }

    /// Kernel of a homomorphism with finite source, in BFS order.
    pub fn kernel_elements(&self) -> Result<Vec<Element>> {
        let ball = self.source.elements()?;
        let images = self.images_on_ball(&ball)?;
        let id = self.target.identity();
        Ok(ball
            .iter()
            .zip(&images)
            .filter(|(_, img)| **img == id)
            .map(|(g, _)| g.clone())
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::presets;

    #[test]
    fn parity_hom_on_free_group_is_verified() {
        let hom = Homomorphism::length_parity(presets::free(2)).unwrap();
        assert!(hom.is_verified());
        let g = hom.source().parse_element("abA").unwrap();
        assert_eq!(hom.target().render(&hom.apply(&g).unwrap()), "(1)");
    }

    #[test]
    fn bad_images_fail_relation_check() {
        // Z^2 -> S3 sending generators to non-commuting transpositions
        let s3 = presets::symmetric(3).unwrap();
        let res = Homomorphism::from_target_words(presets::free_abelian(2), s3, &["x", "y"]);
        assert!(matches!(res, Err(Error::RelationCheck(_))));
    }

    #[test]
    fn parity_fails_for_odd_relators() {
        let g = presets::free_product(&[2, 3]).unwrap();
        assert!(Homomorphism::length_parity(g).is_err());
    }

    #[test]
    fn finite_source_checked_exhaustively() {
        // sign map S3 -> Z2
        let s3 = presets::symmetric(3).unwrap();
        let z2 = presets::cyclic(2).unwrap();
        let hom = Homomorphism::from_target_words(s3.clone(), z2.clone(), &["e1", "1"]).unwrap();
        assert!(hom.is_verified());
        assert_eq!(hom.kernel_elements().unwrap().len(), 3);
        // x -> 1, y -> 1 is not a homomorphism (y has order 3)
        assert!(Homomorphism::from_target_words(s3, z2, &["e1", "e1"]).is_err());
    }

    #[test]
    fn homomorphism_property_on_sampled_pairs() {
        let (_, hom) = crate::group::quotient(&presets::heisenberg(), 3).unwrap();
        let h = hom.source().clone();
        let ball = crate::cayley::enumerate_ball(&h, 4, &Default::default()).unwrap();
        let t = hom.target();
        for (i, g) in ball.iter().enumerate().step_by(3) {
            for k in ball.iter().skip(i % 7).step_by(11) {
                let lhs = hom.apply(&h.mul(g, k)).unwrap();
                let rhs = t.mul(&hom.apply(g).unwrap(), &hom.apply(k).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }
}
