//! Substitution rules as endomorphisms of a free group: reduced words,
//! composition, inverse verification and a Nielsen-reduction search for
//! inverses.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::staircase::{Label, Shape};
use crate::substitution::SubstitutionRule;
use crate::{Error, Result};

/// A reduced word; generator `i` is stored as `i + 1`, its inverse as `−(i + 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<i32>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn generator(i: usize) -> Self {
        Word(vec![i as i32 + 1])
    }

    pub fn from_letters(letters: impl IntoIterator<Item = i32>) -> Self {
        let mut w = Word::identity();
        for x in letters {
            w.push(x);
        }
        w
    }

    fn push(&mut self, x: i32) {
        if self.0.last() == Some(&-x) {
            self.0.pop();
        } else {
            self.0.push(x);
        }
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|x| -x).collect())
    }

    pub fn concat(&self, o: &Word) -> Word {
        let mut w = self.clone();
        for &x in &o.0 {
            w.push(x);
        }
        w
    }
}

/// An endomorphism given by the images of its generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeMorphism {
    pub generators: Vec<Label>,
    pub images: Vec<Word>,
}

impl FreeMorphism {
    pub fn identity(generators: Vec<Label>) -> Self {
        let images = (0..generators.len()).map(Word::generator).collect();
        FreeMorphism { generators, images }
    }

    /// The endomorphism extending a substitution rule.
    pub fn from_rule(rule: &SubstitutionRule) -> Self {
        let generators = rule.labels();
        let mut m = FreeMorphism::identity(generators.clone());
        for (i, g) in generators.iter().enumerate() {
            m.images[i] = Word::from_letters(rule.words[g].iter().map(|x| m.index(x).unwrap() as i32 + 1));
        }
        m
    }

    /// Builds a morphism from `label → word` strings such as `"b2a^-1b1"`.
    pub fn parse(entries: &[(&str, &str)]) -> Result<Self> {
        let mut generators: Vec<Label> =
            entries.iter().map(|(k, _)| Label::parse_ascii(k)).collect::<Result<_>>()?;
        generators.sort();
        let mut m = FreeMorphism::identity(generators);
        for (k, w) in entries {
            let i = m.index(&Label::parse_ascii(k)?).unwrap();
            m.images[i] = m.parse_word(w)?;
        }
        Ok(m)
    }

    pub fn index(&self, l: &Label) -> Option<usize> {
        self.generators.iter().position(|g| g == l)
    }

    /// Parses letters `a`, `b2`, `c^-1`, … (whitespace ignored).
    pub fn parse_word(&self, s: &str) -> Result<Word> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut i = 0;
        let mut out = Word::identity();
        while i < chars.len() {
            let shape = Shape::from_letter(chars[i]).ok_or_else(|| Error::Parse(format!("bad word {s:?}")))?;
            i += 1;
            let mut digits = String::new();
            while i < chars.len() && chars[i].is_ascii_digit() {
                digits.push(chars[i]);
                i += 1;
            }
            let mut sign = 1;
            if chars[i..].starts_with(&['^', '-', '1']) {
                sign = -1;
                i += 3;
            }
            let label = if digits.is_empty() {
                Label::plain(shape)
            } else {
                Label::indexed(shape, digits.parse().map_err(|_| Error::Parse(s.to_string()))?)
            };
            let g = self.index(&label).ok_or_else(|| Error::UnknownLabel(label.ascii()))?;
            out.push(sign * (g as i32 + 1));
        }
        Ok(out)
    }

    /// Image of a word.
    pub fn apply(&self, w: &Word) -> Word {
        let mut out = Word::identity();
        for &x in w.letters() {
            let img = &self.images[(x.unsigned_abs() - 1) as usize];
            out = if x > 0 { out.concat(img) } else { out.concat(&img.inverse()) };
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &FreeMorphism) -> FreeMorphism {
        FreeMorphism {
            generators: self.generators.clone(),
            images: other.images.iter().map(|w| self.apply(w)).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, w)| *w == Word::generator(i))
    }

    pub fn format_word(&self, w: &Word) -> String {
        w.letters()
            .iter()
            .map(|&x| {
                let l = self.generators[(x.unsigned_abs() - 1) as usize];
                if x > 0 {
                    l.to_string()
                } else {
                    format!("{l}⁻¹")
                }
            })
            .collect()
    }

    /// Abelianization: entry `(i, j)` is the exponent sum of generator `j`
    /// in the image of generator `i`.
    pub fn abelianization(&self) -> Vec<Vec<i64>> {
        self.images
            .iter()
            .map(|w| {
                let mut row = vec![0i64; self.generators.len()];
                for &x in w.letters() {
                    row[(x.unsigned_abs() - 1) as usize] += x.signum() as i64;
                }
                row
            })
            .collect()
    }

    pub fn to_map(&self) -> BTreeMap<String, String> {
        self.generators
            .iter()
            .zip(&self.images)
            .map(|(g, w)| (g.ascii(), self.format_ascii(w)))
            .collect()
    }

    /// ASCII form accepted by [`FreeMorphism::parse_word`].
    pub fn format_ascii(&self, w: &Word) -> String {
        w.letters()
            .iter()
            .map(|&x| {
                let l = self.generators[(x.unsigned_abs() - 1) as usize].ascii();
                if x > 0 {
                    l
                } else {
                    format!("{l}^-1")
                }
            })
            .collect()
    }
}

impl fmt::Display for FreeMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .generators
            .iter()
            .zip(&self.images)
            .map(|(g, w)| format!("{g}→{}", self.format_word(w)))
            .collect();
        f.write_str(&parts.join(", "))
    }
}

/// Whether `candidate` is a two-sided inverse of `rule`.
pub fn verify_inverse(rule: &FreeMorphism, candidate: &FreeMorphism) -> bool {
    rule.generators == candidate.generators
        && rule.compose(candidate).is_identity()
        && candidate.compose(rule).is_identity()
}

/// Exact determinant by fraction-free elimination.
pub fn integer_det(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    if n == 0 {
        1
    } else {
        sign * a[n - 1][n - 1]
    }
}

/// Why [`find_inverse`] gave up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NotFound {
    /// The abelianization is not invertible over `Z`, so neither is the morphism.
    NotUnimodular(i128),
    /// The search budget ran out; this proves nothing.
    BudgetExhausted,
}

/// Searches for an inverse by Nielsen reduction of the image tuple.
///
/// The tuple `T = (σ(u₁), …, σ(uₙ))` starts with `uᵢ = xᵢ`; every Nielsen
/// move is applied to `T` and `U` alike. Once `T` is a signed permutation
/// of the generators, `σ⁻¹(x_{π(i)}) = uᵢ^{εᵢ}`. Moves that shorten `T`
/// are taken greedily; when none exists a bounded breadth-first search
/// over length-preserving moves looks for one.
pub fn find_inverse(rule: &FreeMorphism, budget: usize) -> std::result::Result<FreeMorphism, NotFound> {
    let det = integer_det(&rule.abelianization());
    if det != 1 && det != -1 {
        return Err(NotFound::NotUnimodular(det));
    }
    let n = rule.generators.len();
    let mut t: Vec<Word> = rule.images.clone();
    let mut u: Vec<Word> = (0..n).map(Word::generator).collect();
    let mut moves = 0;
    while !is_signed_permutation(&t) {
        if moves >= budget {
            return Err(NotFound::BudgetExhausted);
        }
        let total: usize = t.iter().map(Word::len).sum();
        match best_move(&t, total) {
            Some(m) => {
                apply_move(&mut t, &mut u, m);
                moves += 1;
            }
            None => {
                let path = plateau_search(&t, total, budget.saturating_sub(moves))
                    .ok_or(NotFound::BudgetExhausted)?;
                for m in path {
                    apply_move(&mut t, &mut u, m);
                    moves += 1;
                }
            }
        }
    }
    let mut inv = FreeMorphism::identity(rule.generators.clone());
    for (ti, ui) in t.iter().zip(&u) {
        let x = ti.letters()[0];
        let g = (x.unsigned_abs() - 1) as usize;
        inv.images[g] = if x > 0 { ui.clone() } else { ui.inverse() };
    }
    debug_assert!(verify_inverse(rule, &inv));
    Ok(inv)
}

/// Replace `T[i]` by one of `T[i]T[j]`, `T[i]T[j]⁻¹`, `T[j]T[i]`, `T[j]⁻¹T[i]`.
#[derive(Clone, Copy, Debug)]
struct Move {
    i: usize,
    j: usize,
    kind: u8,
}

fn moved(t: &[Word], m: Move) -> Word {
    let (a, b) = (&t[m.i], &t[m.j]);
    match m.kind {
        0 => a.concat(b),
        1 => a.concat(&b.inverse()),
        2 => b.concat(a),
        _ => b.inverse().concat(a),
    }
}

fn all_moves(n: usize) -> impl Iterator<Item = Move> {
    (0..n).flat_map(move |i| (0..n).filter(move |&j| j != i).flat_map(move |j| (0..4).map(move |kind| Move { i, j, kind })))
}

fn apply_move(t: &mut [Word], u: &mut [Word], m: Move) {
    t[m.i] = moved(t, m);
    u[m.i] = moved(u, m);
}

fn best_move(t: &[Word], total: usize) -> Option<Move> {
    let mut best: Option<(usize, Move)> = None;
    for m in all_moves(t.len()) {
        let new_total = total - t[m.i].len() + moved(t, m).len();
        if new_total < total && best.is_none_or(|(b, _)| new_total < b) {
            best = Some((new_total, m));
        }
    }
    best.map(|(_, m)| m)
}

/// Breadth-first search over moves that keep the total length, until a
/// shortening move becomes available.
fn plateau_search(start: &[Word], total: usize, budget: usize) -> Option<Vec<Move>> {
    let mut seen: HashSet<Vec<Word>> = HashSet::new();
    seen.insert(start.to_vec());
    let mut frontier: Vec<(Vec<Word>, Vec<Move>)> = vec![(start.to_vec(), Vec::new())];
    let mut explored = 0;
    while !frontier.is_empty() && explored < budget.max(1) * 64 {
        let mut next = Vec::new();
        for (t, path) in frontier {
            for m in all_moves(t.len()) {
                explored += 1;
                let w = moved(&t, m);
                let new_total = total - t[m.i].len() + w.len();
                if new_total > total {
                    continue;
                }
                let mut path2 = path.clone();
                path2.push(m);
                if new_total < total {
                    return Some(path2);
                }
                let mut t2 = t.clone();
                t2[m.i] = w;
                if seen.insert(t2.clone()) {
                    next.push((t2, path2));
                }
            }
        }
        frontier = next;
    }
    None
}

fn is_signed_permutation(t: &[Word]) -> bool {
    let mut seen = HashSet::new();
    t.iter().all(|w| w.len() == 1 && seen.insert(w.letters()[0].unsigned_abs()))
}
