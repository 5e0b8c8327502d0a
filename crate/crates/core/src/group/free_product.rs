use std::collections::VecDeque;

use num_integer::Integer;

use super::free::{primitive_period, word_letters};
use super::{Element, GenLetter, GenWord, Generator, GroupOps, Letters, ModelKind, OrderResult, Relations, RootDecomposition};
use crate::error::{Error, Result};

/// Free product Z_{m₁} * … * Z_{m_r}. A payload is a sequence of syllables
/// `(factor << 8) | exponent` with `0 < exponent < m_factor` and no two
/// adjacent syllables from the same factor.
#[derive(Debug, Clone)]
pub struct FreeProductCyclic {
    orders: Vec<u32>,
}

fn syllable(factor: usize, exp: u32) -> u16 {
    ((factor as u16) << 8) | exp as u16
}

fn factor_of(s: u16) -> usize {
    (s >> 8) as usize
}

fn exp_of(s: u16) -> u32 {
    (s & 0xff) as u32
}

impl FreeProductCyclic {
    pub fn new(orders: Vec<u32>) -> Result<Self> {
        if orders.is_empty() || orders.len() > 255 {
            return Err(Error::MalformedSpec("free product needs 1..=255 factors".into()));
        }
        if let Some(o) = orders.iter().find(|&&o| !(2..=255).contains(&o)) {
            return Err(Error::MalformedSpec(format!("factor order {o} outside 2..=255")));
        }
        Ok(Self { orders })
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    fn push_merged(&self, buf: &mut Letters, s: u16) {
        let f = factor_of(s);
        match buf.last() {
            Some(&last) if factor_of(last) == f => {
                buf.pop();
                let e = (exp_of(last) + exp_of(s)) % self.orders[f];
                if e != 0 {
                    buf.push(syllable(f, e));
                }
            }
            _ => buf.push(s),
        }
    }

    /// `w = conj · core · conj⁻¹` with `core` cyclically reduced.
    fn cyclic_reduction(&self, w: &[u16]) -> (Letters, Vec<u16>) {
        let mut core: VecDeque<u16> = w.iter().copied().collect();
        let mut conj = Letters::new();
        while core.len() >= 2 && factor_of(core[0]) == factor_of(core[core.len() - 1]) {
            let first = core.pop_front().unwrap();
            let last = core.pop_back().unwrap();
            conj.push(first);
            let f = factor_of(first);
            let e = (exp_of(first) + exp_of(last)) % self.orders[f];
            if e != 0 {
                core.push_back(syllable(f, e));
            }
        }
        (conj, core.into_iter().collect())
    }
}

impl GroupOps for FreeProductCyclic {
    fn kind(&self) -> ModelKind {
        ModelKind::FreeProductCyclic { orders: self.orders.clone() }
    }

    fn descriptor(&self) -> String {
        format!("free-product({:?})", self.orders)
    }

    fn identity(&self) -> Element {
        Element::Word(Letters::new())
    }

    fn mul(&self, g: &Element, h: &Element) -> Element {
        let mut out = word_letters(g).clone();
        for &s in word_letters(h) {
            self.push_merged(&mut out, s);
        }
        Element::Word(out)
    }

    fn inv(&self, g: &Element) -> Element {
        Element::Word(
            word_letters(g)
                .iter()
                .rev()
                .map(|&s| {
                    let f = factor_of(s);
                    syllable(f, self.orders[f] - exp_of(s))
                })
                .collect(),
        )
    }

    fn is_canonical(&self, g: &Element) -> bool {
        match g {
            Element::Word(w) => {
                w.iter().all(|&s| {
                    let f = factor_of(s);
                    f < self.orders.len() && exp_of(s) > 0 && exp_of(s) < self.orders[f]
                }) && w.windows(2).all(|p| factor_of(p[0]) != factor_of(p[1]))
            }
            _ => false,
        }
    }

    fn standard_generators(&self) -> Vec<Generator> {
        (0..self.orders.len())
            .map(|f| Generator {
                name: format!("s{}", f + 1),
                element: Element::Word(Letters::from_slice(&[syllable(f, 1)])),
            })
            .collect()
    }

    fn render(&self, g: &Element) -> String {
        let w = word_letters(g);
        if w.is_empty() {
            return "1".into();
        }
        let parts: Vec<String> = w
            .iter()
            .map(|&s| match exp_of(s) {
                1 => format!("s{}", factor_of(s) + 1),
                e => format!("s{}^{}", factor_of(s) + 1, e),
            })
            .collect();
        parts.join(" ")
    }

    fn relations(&self) -> Relations {
        Relations::Presentation(
            self.orders
                .iter()
                .enumerate()
                .map(|(f, &m)| vec![GenLetter::new(f, false); m as usize])
                .collect(),
        )
    }

    fn order_of(&self, g: &Element, _cap: u64) -> OrderResult {
        let (_, core) = self.cyclic_reduction(word_letters(g));
        match core.len() {
            0 => OrderResult::Finite(1),
            1 => {
                let m = self.orders[factor_of(core[0])] as u64;
                OrderResult::Finite(m / m.gcd(&(exp_of(core[0]) as u64)))
            }
            _ => OrderResult::Infinite,
        }
    }

    fn word_for(&self, g: &Element) -> Option<GenWord> {
        let mut out = Vec::new();
        for &s in word_letters(g) {
            for _ in 0..exp_of(s) {
                out.push(GenLetter::new(factor_of(s), false));
            }
        }
        Some(out)
    }

    fn root_decomposition(&self, g: &Element) -> Option<RootDecomposition> {
        let (conj, core) = self.cyclic_reduction(word_letters(g));
        if core.len() < 2 {
            return None;
        }
        let d = primitive_period(&core);
        Some(RootDecomposition {
            conjugator: Element::Word(conj),
            root: Element::Word(Letters::from_slice(&core[..d])),
            exponent: (core.len() / d) as u64,
        })
    }
}
