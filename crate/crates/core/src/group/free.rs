use super::{Element, GenLetter, GenWord, Generator, GroupOps, Letters, ModelKind, OrderResult, Relations, RootDecomposition};

/// Free group on `rank` generators. Letter `2i` is generator `i`, `2i + 1`
/// its inverse; payloads are freely reduced.
#[derive(Debug, Clone)]
pub struct FreeGroup {
    rank: usize,
}

impl FreeGroup {
    pub fn new(rank: usize) -> Self {
        assert!(rank >= 1 && rank < u16::MAX as usize / 2, "free group rank out of range");
        Self { rank }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    fn letter_name(&self, x: u16) -> String {
        let gen = (x / 2) as usize;
        let inverse = x & 1 == 1;
        if self.rank <= 26 {
            let c = (b'a' + gen as u8) as char;
            if inverse {
                c.to_ascii_uppercase().to_string()
            } else {
                c.to_string()
            }
        } else if inverse {
            format!("x{}^-1", gen + 1)
        } else {
            format!("x{}", gen + 1)
        }
    }
}

fn push_reduced(buf: &mut Letters, x: u16) {
    if buf.last() == Some(&(x ^ 1)) {
        buf.pop();
    } else {
        buf.push(x);
    }
}

pub(crate) fn word_letters(g: &Element) -> &Letters {
    match g {
        Element::Word(w) => w,
        other => panic!("expected a word payload, got {}", other.payload_kind()),
    }
}

/// Splits a reduced word as `conj · core · conj⁻¹` with `core` cyclically reduced.
fn cyclic_reduction(w: &[u16]) -> (&[u16], &[u16]) {
    let (mut i, mut j) = (0, w.len());
    while j - i >= 2 && w[i] == w[j - 1] ^ 1 {
        i += 1;
        j -= 1;
    }
    (&w[..i], &w[i..j])
}

/// Smallest period `d` of `w` with `d | len`.
pub(crate) fn primitive_period<T: PartialEq>(w: &[T]) -> usize {
    let n = w.len();
    (1..=n)
        .filter(|d| n.is_multiple_of(*d))
        .find(|&d| (d..n).all(|i| w[i] == w[i - d]))
        .unwrap_or(n)
}

impl GroupOps for FreeGroup {
    fn kind(&self) -> ModelKind {
        ModelKind::Free { rank: self.rank }
    }

    fn descriptor(&self) -> String {
        format!("free({})", self.rank)
    }

    fn identity(&self) -> Element {
        Element::Word(Letters::new())
    }

    fn mul(&self, g: &Element, h: &Element) -> Element {
        let mut out = word_letters(g).clone();
        for &x in word_letters(h) {
            push_reduced(&mut out, x);
        }
        Element::Word(out)
    }

    fn inv(&self, g: &Element) -> Element {
        Element::Word(word_letters(g).iter().rev().map(|x| x ^ 1).collect())
    }

    fn is_canonical(&self, g: &Element) -> bool {
        match g {
            Element::Word(w) => {
                w.iter().all(|&x| (x as usize) < 2 * self.rank)
                    && w.windows(2).all(|p| p[0] != p[1] ^ 1)
            }
            _ => false,
        }
    }

    fn standard_generators(&self) -> Vec<Generator> {
        (0..self.rank)
            .map(|i| {
                let x = 2 * i as u16;
                Generator { name: self.letter_name(x), element: Element::Word(Letters::from_slice(&[x])) }
            })
            .collect()
    }

    fn render(&self, g: &Element) -> String {
        let w = word_letters(g);
        if w.is_empty() {
            return "1".into();
        }
        let parts: Vec<String> = w.iter().map(|&x| self.letter_name(x)).collect();
        if self.rank <= 26 {
            parts.concat()
        } else {
            parts.join(" ")
        }
    }

    fn relations(&self) -> Relations {
        Relations::Presentation(Vec::new())
    }

    fn order_of(&self, g: &Element, _cap: u64) -> OrderResult {
        if word_letters(g).is_empty() {
            OrderResult::Finite(1)
        } else {
            OrderResult::Infinite
        }
    }

    fn word_for(&self, g: &Element) -> Option<GenWord> {
        Some(
            word_letters(g)
                .iter()
                .map(|&x| GenLetter::new((x / 2) as usize, x & 1 == 1))
                .collect(),
        )
    }

    fn root_decomposition(&self, g: &Element) -> Option<RootDecomposition> {
        let w = word_letters(g);
        if w.is_empty() {
            return None;
        }
        let (conj, core) = cyclic_reduction(w);
        let d = primitive_period(core);
        Some(RootDecomposition {
            conjugator: Element::Word(Letters::from_slice(conj)),
            root: Element::Word(Letters::from_slice(&core[..d])),
            exponent: (core.len() / d) as u64,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupModel;

    fn f2() -> GroupModel {
        GroupModel::new(FreeGroup::new(2))
    }

    #[test]
    fn free_reduction_in_products() {
        let g = f2();
        let x = g.parse_element("aB").unwrap();
        let y = g.parse_element("ba").unwrap();
        assert_eq!(g.render(&g.mul(&x, &y)), "aa");
    }

    #[test]
    fn inverse_reverses_and_flips() {
        let g = f2();
        let ab = g.parse_element("ab").unwrap();
        assert_eq!(g.render(&g.inv(&ab)), "BA");
        assert_eq!(g.mul(&ab, &g.inv(&ab)), g.identity());
    }

    #[test]
    fn order_is_infinite_for_nonempty_words() {
        let g = f2();
        assert_eq!(g.order_of(&g.parse_element("ab").unwrap(), 10), OrderResult::Infinite);
        assert_eq!(g.order_of(&g.identity(), 10), OrderResult::Finite(1));
    }

    #[test]
    fn roots_of_conjugated_powers() {
        let g = f2();
        // b (aB)^3 B
        let w = g.parse_element("b aBaBaB B").unwrap();
        let r = g.root_decomposition(&w).unwrap();
        assert_eq!(r.exponent, 3);
        assert_eq!(g.render(&r.root), "aB");
        assert_eq!(g.render(&r.conjugator), "b");
        let rebuilt = g.mul(&g.mul(&r.conjugator, &g.pow(&r.root, 3)), &g.inv(&r.conjugator));
        assert_eq!(rebuilt, w);
    }

    #[test]
    fn non_reduced_payload_is_rejected() {
        let g = f2();
        let bad = Element::Word(Letters::from_slice(&[0, 1]));
        assert!(g.try_mul(&bad, &g.identity()).is_err());
        assert!(g.try_inv(&Element::Coords(Default::default())).is_err());
    }
}
