//! Words over variables x1…xk and finite systems of equations.

use std::fmt;

use crate::error::{Error, Result};
use crate::group::{Element, GroupModel};

/// One letter: variable index (1-based) and exponent ±1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VarLetter {
    pub var: usize,
    pub inverse: bool,
}

impl VarLetter {
    fn inverted(self) -> Self {
        VarLetter { var: self.var, inverse: !self.inverse }
    }
}

/// Freely reduced, nonempty word in the free group on x1…xk.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<VarLetter>,
}

impl Word {
    /// Freely reduces `letters`; the empty result is rejected as vacuous.
    pub fn from_letters(letters: &[VarLetter]) -> Result<Word> {
        if letters.iter().any(|l| l.var == 0) {
            return Err(Error::InvalidArgument("variables are numbered from 1".into()));
        }
        let reduced = free_reduce(letters);
        if reduced.is_empty() {
            return Err(Error::VacuousEquation);
        }
        Ok(Word { letters: reduced })
    }

    pub fn letters(&self) -> &[VarLetter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Largest variable index used.
    pub fn arity(&self) -> usize {
        self.letters.iter().map(|l| l.var).max().unwrap_or(0)
    }

    /// `u⁻¹ v⁻¹ u v`
    pub fn commutator(u: &Word, v: &Word) -> Result<Word> {
        let mut letters = inverse(&u.letters);
        letters.extend(inverse(&v.letters));
        letters.extend_from_slice(&u.letters);
        letters.extend_from_slice(&v.letters);
        Word::from_letters(&letters)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|l| if l.inverse { format!("x{}^-1", l.var) } else { format!("x{}", l.var) })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

fn inverse(letters: &[VarLetter]) -> Vec<VarLetter> {
    letters.iter().rev().map(|l| l.inverted()).collect()
}

fn free_reduce(letters: &[VarLetter]) -> Vec<VarLetter> {
    let mut out: Vec<VarLetter> = Vec::with_capacity(letters.len());
    for &l in letters {
        if out.last() == Some(&l.inverted()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Parses `x1 x2^-1`, `X2` (inverse), `(…)^n`, and `[u,v]` = u⁻¹v⁻¹uv.
/// Letters may be separated by spaces, `*` or `.`.
pub fn parse_word(text: &str) -> Result<Word> {
    let mut p = Parser { chars: text.char_indices().collect(), pos: 0, len: text.len() };
    let letters = p.product()?;
    p.skip_separators();
    if let Some(&(at, c)) = p.chars.get(p.pos) {
        return Err(Error::Syntax { position: at, message: format!("unexpected '{c}'") });
    }
    Word::from_letters(&letters)
}

struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.len, |c| c.0)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|c| c.1)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { position: self.offset(), message: message.into() })
    }

    fn skip_separators(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace() || c == '*' || c == '.') {
            self.pos += 1;
        }
    }

    fn product(&mut self) -> Result<Vec<VarLetter>> {
        let mut out = Vec::new();
        loop {
            self.skip_separators();
            match self.peek() {
                Some('x' | 'X' | '[' | '(' | '1') => out.extend(self.factor()?),
                _ => return Ok(out),
            }
        }
    }

    fn factor(&mut self) -> Result<Vec<VarLetter>> {
        let base = match self.peek() {
            Some(c @ ('x' | 'X')) => {
                self.pos += 1;
                let var = self.number()?;
                if var == 0 {
                    return self.err("variables are numbered from 1");
                }
                vec![VarLetter { var: var as usize, inverse: c == 'X' }]
            }
            Some('1') => {
                self.pos += 1;
                Vec::new()
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.product()?;
                self.expect(')')?;
                inner
            }
            Some('[') => {
                self.pos += 1;
                let u = self.product()?;
                self.expect(',')?;
                let v = self.product()?;
                self.expect(']')?;
                let mut w = inverse(&u);
                w.extend(inverse(&v));
                w.extend(u);
                w.extend(v);
                w
            }
            _ => return self.err("expected a variable, '(' or '['"),
        };
        self.skip_whitespace();
        if self.peek() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_whitespace();
        let negative = self.peek() == Some('-');
        if negative {
            self.pos += 1;
        }
        let e = self.number()?;
        let unit = if negative { inverse(&base) } else { base };
        Ok(unit.iter().copied().cycle().take(unit.len() * e as usize).collect())
    }

    fn skip_whitespace(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, want: char) -> Result<()> {
        self.skip_separators();
        if self.peek() == Some(want) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{want}'"))
        }
    }

    fn number(&mut self) -> Result<u32> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        let digits: String = self.chars[start..self.pos].iter().map(|c| c.1).collect();
        digits.parse().or_else(|_| {
            self.pos = start;
            self.err("number out of range")
        })
    }
}

/// Substitutes `tuple[i-1]` for `xi` in a raw letter sequence.
pub fn evaluate_letters(model: &GroupModel, letters: &[VarLetter], tuple: &[Element]) -> Result<Element> {
    let need = letters.iter().map(|l| l.var).max().unwrap_or(0);
    if tuple.len() < need {
        return Err(Error::Arity { got: tuple.len(), need });
    }
    let inverses: Vec<Option<Element>> = (0..need)
        .map(|i| letters.iter().any(|l| l.var == i + 1 && l.inverse).then(|| model.inv(&tuple[i])))
        .collect();
    let mut acc = model.identity();
    for l in letters {
        let g = if l.inverse { inverses[l.var - 1].as_ref().expect("inverse precomputed") } else { &tuple[l.var - 1] };
        acc = model.mul(&acc, g);
    }
    Ok(acc)
}

pub fn evaluate(model: &GroupModel, w: &Word, tuple: &[Element]) -> Result<Element> {
    evaluate_letters(model, &w.letters, tuple)
}

/// Finite, nonempty set of equations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationSystem {
    words: Vec<Word>,
    arity: usize,
}

impl EquationSystem {
    pub fn new(words: Vec<Word>) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::VacuousEquation);
        }
        let arity = words.iter().map(Word::arity).max().unwrap_or(0);
        Ok(EquationSystem { words, arity })
    }

    pub fn parse<S: AsRef<str>>(texts: &[S]) -> Result<Self> {
        Self::new(texts.iter().map(|t| parse_word(t.as_ref())).collect::<Result<_>>()?)
    }

    /// {[x1, x2]}
    pub fn commutation() -> Self {
        Self::parse(&["[x1,x2]"]).expect("commutator parses")
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Total letter count, i.e. multiplications per tuple evaluation.
    pub fn total_length(&self) -> usize {
        self.words.iter().map(Word::len).sum()
    }

    pub fn is_solution(&self, model: &GroupModel, tuple: &[Element]) -> Result<bool> {
        if tuple.len() < self.arity {
            return Err(Error::Arity { got: tuple.len(), need: self.arity });
        }
        let id = model.identity();
        for w in &self.words {
            if evaluate(model, w, tuple)? != id {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for EquationSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.words.iter().map(|w| w.to_string()).collect();
        write!(f, "{{{}}}", parts.join("; "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::presets;

    fn x(var: usize) -> VarLetter {
        VarLetter { var, inverse: false }
    }
    fn xi(var: usize) -> VarLetter {
        VarLetter { var, inverse: true }
    }

    #[test]
    fn commutator_sugar() {
        let w = parse_word("[x1,x2]").unwrap();
        assert_eq!(w.letters(), [xi(1), xi(2), x(1), x(2)]);
        assert_eq!(w.arity(), 2);
        assert_eq!(w.to_string(), "x1^-1 x2^-1 x1 x2");
    }

    #[test]
    fn metabelian_law_has_length_sixteen() {
        let w = parse_word("[[x1,x2],[x3,x4]]").unwrap();
        assert_eq!(w.len(), 16);
        assert_eq!(w.arity(), 4);
    }

    #[test]
    fn inverse_spellings_agree() {
        assert_eq!(parse_word("x1^-1 x2").unwrap(), parse_word("X1*x2").unwrap());
        assert_eq!(parse_word("(x1 x2)^-2").unwrap(), parse_word("X2 X1 X2 X1").unwrap());
        assert_eq!(parse_word("x1^3").unwrap().len(), 3);
    }

    #[test]
    fn vacuous_and_malformed() {
        assert!(matches!(parse_word("x1 x1^-1"), Err(Error::VacuousEquation)));
        assert!(matches!(parse_word("[x1 x2]"), Err(Error::Syntax { position: 6, .. })));
        assert!(matches!(parse_word("x1 y2"), Err(Error::Syntax { position: 3, .. })));
        assert!(matches!(parse_word("x0"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_word("x1^"), Err(Error::Syntax { position: 3, .. })));
    }

    #[test]
    fn evaluation_in_free_group() {
        let f2 = presets::free(2);
        let w = parse_word("[x1,x2]").unwrap();
        let a = f2.parse_element("a").unwrap();
        let b = f2.parse_element("b").unwrap();
        let aa = f2.parse_element("a^2").unwrap();
        assert_eq!(evaluate(&f2, &w, &[a.clone(), aa]).unwrap(), f2.identity());
        assert_eq!(evaluate(&f2, &w, &[a.clone(), b.clone()]).unwrap(), f2.parse_element("ABab").unwrap());
        assert!(matches!(evaluate(&f2, &w, &[a]), Err(Error::Arity { got: 1, need: 2 })));
    }

    #[test]
    fn metabelian_law_holds_in_s3() {
        let s3 = presets::symmetric(3).unwrap();
        let elems: Vec<Element> = s3.elements().unwrap().iter().cloned().collect();
        let w = parse_word("[[x1,x2],[x3,x4]]").unwrap();
        for a in &elems {
            for b in &elems {
                for c in &elems {
                    for d in &elems {
                        let t = [a.clone(), b.clone(), c.clone(), d.clone()];
                        assert_eq!(evaluate(&s3, &w, &t).unwrap(), s3.identity());
                    }
                }
            }
        }
    }

    #[test]
    fn solutions() {
        let z = presets::integers();
        let sq = EquationSystem::parse(&["x1^2"]).unwrap();
        assert!(sq.is_solution(&z, &[z.identity()]).unwrap());
        assert!(!sq.is_solution(&z, &[z.parse_element("e1").unwrap()]).unwrap());

        let s3 = presets::symmetric(3).unwrap();
        let r = s3.parse_element("y").unwrap();
        let sys = EquationSystem::parse(&["[x1,x2]", "x1^3"]).unwrap();
        assert_eq!(sys.arity(), 2);
        assert!(sys.is_solution(&s3, &[r.clone(), s3.mul(&r, &r)]).unwrap());
        let x = s3.parse_element("x").unwrap();
        assert!(!sys.is_solution(&s3, &[x, r]).unwrap());
    }
}
