//! Groups given by a finite string rewriting system over an alphabet with
//! formal inverses, plus the critical-pair confluence check that guards their
//! normal forms.
//!
//! Spec file format, one declaration per line (`#` starts a comment):
//!
//! ```text
//! letters: a A b B
//! inverses: a A, b B
//! rule: aA -> ε
//! rule: ba -> ab
//! ```

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use super::{Element, GenLetter, GenWord, Generator, GroupOps, Letters, ModelKind, Relations};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub lhs: Vec<u16>,
    pub rhs: Vec<u16>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewritingSystemSpec {
    letters: Vec<String>,
    inverse: Vec<Option<u16>>,
    rules: Vec<Rule>,
}

/// Shortlex order: shorter words first, then lexicographic by letter index.
pub fn shortlex_cmp(a: &[u16], b: &[u16]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

impl RewritingSystemSpec {
    /// `inverses` pairs letter names; a letter paired with itself is an involution.
    pub fn new(letters: &[&str], inverses: &[(&str, &str)], rules: &[(&str, &str)]) -> Result<Self> {
        let mut spec = Self {
            letters: letters.iter().map(|s| s.to_string()).collect(),
            inverse: vec![None; letters.len()],
            rules: Vec::new(),
        };
        spec.check_letters(0)?;
        for (a, b) in inverses {
            spec.pair_inverses(a, b, 0)?;
        }
        for (i, (l, r)) in rules.iter().enumerate() {
            let lhs = spec.parse_word(l, 0)?;
            let rhs = spec.parse_word(r, 0)?;
            spec.push_rule(i, lhs, rhs)?;
        }
        Ok(spec)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut spec = Self { letters: Vec::new(), inverse: Vec::new(), rules: Vec::new() };
        for (ln, raw) in text.lines().enumerate() {
            let line_no = ln + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once(':').ok_or_else(|| Error::RewritingParse {
                line: line_no,
                message: format!("expected 'key: value', got '{line}'"),
            })?;
            match key.trim() {
                "letters" => {
                    if !spec.letters.is_empty() {
                        return Err(Error::RewritingParse { line: line_no, message: "letters declared twice".into() });
                    }
                    spec.letters = value.split_whitespace().map(String::from).collect();
                    spec.inverse = vec![None; spec.letters.len()];
                    spec.check_letters(line_no)?;
                }
                "inverses" => {
                    for pair in value.split(',').filter(|p| !p.trim().is_empty()) {
                        let toks: Vec<&str> = pair.split_whitespace().collect();
                        if toks.len() != 2 {
                            return Err(Error::RewritingParse {
                                line: line_no,
                                message: format!("inverse pair '{}' must name two letters", pair.trim()),
                            });
                        }
                        spec.pair_inverses(toks[0], toks[1], line_no)?;
                    }
                }
                "rule" => {
                    let (l, r) = value
                        .split_once("->")
                        .or_else(|| value.split_once('→'))
                        .ok_or_else(|| Error::RewritingParse { line: line_no, message: "rule needs '->'".into() })?;
                    let lhs = spec.parse_word(l, line_no)?;
                    let rhs = spec.parse_word(r, line_no)?;
                    spec.push_rule(spec.rules.len(), lhs, rhs)?;
                }
                other => {
                    return Err(Error::RewritingParse { line: line_no, message: format!("unknown key '{other}'") })
                }
            }
        }
        if spec.letters.is_empty() {
            return Err(Error::RewritingParse { line: 0, message: "no letters declared".into() });
        }
        Ok(spec)
    }

    fn check_letters(&self, line: usize) -> Result<()> {
        if self.letters.is_empty() || self.letters.len() > u16::MAX as usize {
            return Err(Error::RewritingParse { line, message: "letter count out of range".into() });
        }
        for (i, l) in self.letters.iter().enumerate() {
            if self.letters[..i].contains(l) || l == "ε" || l == "1" || l.contains("->") {
                return Err(Error::RewritingParse { line, message: format!("invalid or duplicate letter '{l}'") });
            }
        }
        Ok(())
    }

    fn letter_index(&self, name: &str, line: usize) -> Result<u16> {
        self.letters
            .iter()
            .position(|l| l == name)
            .map(|i| i as u16)
            .ok_or_else(|| Error::RewritingParse { line, message: format!("unknown letter '{name}'") })
    }

    fn pair_inverses(&mut self, a: &str, b: &str, line: usize) -> Result<()> {
        let (i, j) = (self.letter_index(a, line)?, self.letter_index(b, line)?);
        for (x, y) in [(i, j), (j, i)] {
            match self.inverse[x as usize] {
                Some(prev) if prev != y => {
                    return Err(Error::RewritingParse { line, message: format!("letter '{}' has two inverses", self.letters[x as usize]) })
                }
                _ => self.inverse[x as usize] = Some(y),
            }
        }
        Ok(())
    }

    /// Space-separated tokens, or greedy longest match when there are no spaces.
    fn parse_word(&self, text: &str, line: usize) -> Result<Vec<u16>> {
        let t = text.trim();
        if t.is_empty() || t == "ε" || t == "1" {
            return Ok(Vec::new());
        }
        if t.contains(char::is_whitespace) {
            return t.split_whitespace().map(|tok| self.letter_index(tok, line)).collect();
        }
        let mut out = Vec::new();
        let mut rest = t;
        while !rest.is_empty() {
            let (i, l) = self
                .letters
                .iter()
                .enumerate()
                .filter(|(_, l)| rest.starts_with(l.as_str()))
                .max_by_key(|(_, l)| l.len())
                .ok_or_else(|| Error::RewritingParse { line, message: format!("cannot tokenize '{rest}'") })?;
            out.push(i as u16);
            rest = &rest[l.len()..];
        }
        Ok(out)
    }

    fn push_rule(&mut self, index: usize, lhs: Vec<u16>, rhs: Vec<u16>) -> Result<()> {
        if shortlex_cmp(&lhs, &rhs) != Ordering::Greater {
            return Err(Error::NotShortlexOriented {
                index,
                rule: format!("{} -> {}", self.render(&lhs), self.render(&rhs)),
            });
        }
        self.rules.push(Rule { lhs, rhs });
        Ok(())
    }

    pub fn letters(&self) -> &[String] {
        &self.letters
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn inverse_of(&self, letter: u16) -> Option<u16> {
        self.inverse[letter as usize]
    }

    pub fn render(&self, w: &[u16]) -> String {
        if w.is_empty() {
            return "ε".into();
        }
        let sep = if self.letters.iter().all(|l| l.chars().count() == 1) { "" } else { " " };
        w.iter().map(|&x| self.letters[x as usize].as_str()).collect::<Vec<_>>().join(sep)
    }

    /// Rewrites `input` to an irreducible word, leftmost-innermost. The
    /// result is unique for confluent systems.
    pub fn normal_form(&self, input: &[u16]) -> Vec<u16> {
        self.reduce_onto(Vec::with_capacity(input.len()), input)
    }

    /// Appends `tail` to the irreducible word `out` and reduces.
    fn reduce_onto(&self, mut out: Vec<u16>, tail: &[u16]) -> Vec<u16> {
        let mut pending: Vec<u16> = tail.iter().rev().copied().collect();
        while let Some(x) = pending.pop() {
            out.push(x);
            if let Some(rule) = self.rules.iter().find(|r| out.ends_with(&r.lhs)) {
                out.truncate(out.len() - rule.lhs.len());
                pending.extend(rule.rhs.iter().rev());
            }
        }
        out
    }

    pub fn is_irreducible(&self, w: &[u16]) -> bool {
        self.rules
            .iter()
            .all(|r| r.lhs.len() > w.len() || !w.windows(r.lhs.len()).any(|s| s == r.lhs.as_slice()))
    }
}

impl fmt::Display for RewritingSystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "letters: {}", self.letters.join(" "))?;
        let mut pairs = Vec::new();
        for (i, inv) in self.inverse.iter().enumerate() {
            if let Some(j) = inv {
                if i <= *j as usize {
                    pairs.push(format!("{} {}", self.letters[i], self.letters[*j as usize]));
                }
            }
        }
        if !pairs.is_empty() {
            writeln!(f, "inverses: {}", pairs.join(", "))?;
        }
        for r in &self.rules {
            writeln!(f, "rule: {} -> {}", self.render(&r.lhs), self.render(&r.rhs))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalPair {
    pub rules: (usize, usize),
    pub overlap: String,
    pub left: String,
    pub right: String,
    pub left_normal_form: String,
    pub right_normal_form: String,
    pub joinable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConfluenceReport {
    pub pairs: Vec<CriticalPair>,
    pub confluent: bool,
}

impl ConfluenceReport {
    pub fn unjoinable(&self) -> impl Iterator<Item = &CriticalPair> {
        self.pairs.iter().filter(|p| !p.joinable)
    }
}

/// Enumerates all critical pairs (proper overlaps and inclusions of left-hand
/// sides) and checks that each joins. Termination is guaranteed by shortlex
/// orientation, so local confluence implies confluence.
pub fn check_confluence(spec: &RewritingSystemSpec) -> ConfluenceReport {
    let mut pairs = Vec::new();
    let mut record = |i: usize, j: usize, overlap: Vec<u16>, left: Vec<u16>, right: Vec<u16>| {
        let lnf = spec.normal_form(&left);
        let rnf = spec.normal_form(&right);
        pairs.push(CriticalPair {
            rules: (i, j),
            overlap: spec.render(&overlap),
            left: spec.render(&left),
            right: spec.render(&right),
            left_normal_form: spec.render(&lnf),
            right_normal_form: spec.render(&rnf),
            joinable: lnf == rnf,
        });
    };
    let rules = spec.rules();
    for (i, ri) in rules.iter().enumerate() {
        for (j, rj) in rules.iter().enumerate() {
            let (li, lj) = (&ri.lhs, &rj.lhs);
            // suffix of li equals prefix of lj
            for k in 1..li.len().min(lj.len()) {
                if li[li.len() - k..] == lj[..k] {
                    let mut overlap = li.clone();
                    overlap.extend_from_slice(&lj[k..]);
                    let mut left = ri.rhs.clone();
                    left.extend_from_slice(&lj[k..]);
                    let mut right = li[..li.len() - k].to_vec();
                    right.extend_from_slice(&rj.rhs);
                    record(i, j, overlap, left, right);
                }
            }
            // lj occurs inside li
            if i != j && !lj.is_empty() && lj.len() <= li.len() {
                for p in 0..=li.len() - lj.len() {
                    if li[p..p + lj.len()] == lj[..] {
                        let mut right = li[..p].to_vec();
                        right.extend_from_slice(&rj.rhs);
                        right.extend_from_slice(&li[p + lj.len()..]);
                        record(i, j, li.clone(), ri.rhs.clone(), right);
                    }
                }
            }
        }
    }
    let confluent = pairs.iter().all(|p| p.joinable);
    ConfluenceReport { pairs, confluent }
}

/// Group model whose elements are irreducible words of a rewriting system.
/// Generators are the first letter of each inverse pair. Ball enumeration
/// refuses systems that fail the confluence check.
#[derive(Debug, Clone)]
pub struct RewritingModel {
    spec: RewritingSystemSpec,
    report: ConfluenceReport,
    gen_of_letter: Vec<GenLetter>,
    generator_letters: Vec<u16>,
}

impl RewritingModel {
    pub fn new(spec: RewritingSystemSpec) -> Result<Self> {
        let mut generator_letters = Vec::new();
        let mut gen_of_letter = vec![GenLetter::new(0, false); spec.letters.len()];
        for (i, inv) in spec.inverse.iter().enumerate() {
            let j = inv.ok_or_else(|| {
                Error::MalformedSpec(format!("letter '{}' has no declared inverse", spec.letters[i]))
            })? as usize;
            if i <= j {
                gen_of_letter[i] = GenLetter::new(generator_letters.len(), false);
                generator_letters.push(i as u16);
            }
        }
        for (i, inv) in spec.inverse.iter().enumerate() {
            let j = inv.unwrap() as usize;
            if j < i {
                gen_of_letter[i] = gen_of_letter[j].inverted();
            }
        }
        let report = check_confluence(&spec);
        Ok(Self { spec, report, gen_of_letter, generator_letters })
    }

    pub fn spec(&self) -> &RewritingSystemSpec {
        &self.spec
    }

    pub fn confluence(&self) -> &ConfluenceReport {
        &self.report
    }

    fn letters<'a>(&self, g: &'a Element) -> &'a Letters {
        super::free::word_letters(g)
    }
}

impl GroupOps for RewritingModel {
    fn kind(&self) -> ModelKind {
        ModelKind::RewritingSystem
    }

    fn descriptor(&self) -> String {
        format!("rewriting[{}]", self.spec.to_string().trim_end().replace('\n', "; "))
    }

    fn identity(&self) -> Element {
        Element::Word(Letters::new())
    }

    fn mul(&self, g: &Element, h: &Element) -> Element {
        let out = self.spec.reduce_onto(self.letters(g).to_vec(), self.letters(h));
        Element::Word(Letters::from_vec(out))
    }

    fn inv(&self, g: &Element) -> Element {
        let w: Vec<u16> = self
            .letters(g)
            .iter()
            .rev()
            .map(|&x| self.spec.inverse[x as usize].expect("checked at construction"))
            .collect();
        Element::Word(Letters::from_vec(self.spec.normal_form(&w)))
    }

    fn is_canonical(&self, g: &Element) -> bool {
        match g {
            Element::Word(w) => {
                w.iter().all(|&x| (x as usize) < self.spec.letters.len()) && self.spec.is_irreducible(w)
            }
            _ => false,
        }
    }

    fn standard_generators(&self) -> Vec<Generator> {
        self.generator_letters
            .iter()
            .map(|&x| Generator {
                name: self.spec.letters[x as usize].clone(),
                element: Element::Word(Letters::from_vec(self.spec.normal_form(&[x]))),
            })
            .collect()
    }

    fn render(&self, g: &Element) -> String {
        let w = self.letters(g);
        if w.is_empty() {
            "1".into()
        } else {
            self.spec.render(w)
        }
    }

    fn relations(&self) -> Relations {
        Relations::Presentation(
            self.spec
                .rules
                .iter()
                .map(|r| {
                    let mut w: GenWord = r.lhs.iter().map(|&x| self.gen_of_letter[x as usize]).collect();
                    w.extend(r.rhs.iter().rev().map(|&x| self.gen_of_letter[x as usize].inverted()));
                    w
                })
                .collect(),
        )
    }

    fn word_for(&self, g: &Element) -> Option<GenWord> {
        Some(self.letters(g).iter().map(|&x| self.gen_of_letter[x as usize]).collect())
    }

    fn enumeration_guard(&self) -> Result<()> {
        if self.report.confluent {
            Ok(())
        } else {
            Err(Error::NonConfluent(self.report.unjoinable().count()))
        }
    }
}
