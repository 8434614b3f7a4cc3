//! Substitution rules from subwindows.
//!
//! A translation vector `s` places the subwindow `Ω̄ = Π_Y(s) + λ̃·Ω₀`
//! inside the window. Vertices projecting into `Ω̄` are the vertices of an
//! inflated copy of the tiling; the backward map `g` sends such a vertex to
//! its predecessor. The `g`-orbits of the two tile-type boundary points cut
//! the window into labelling cells, and iterating `Φ` on the image of each
//! cell in `Ω̄` reads off its replacement word.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::lattice::{lcm_denominators, Closure, Interval, Projection, UniMatrix, Vec2, WindowSpec};
use crate::quadfield::{QfNum, QfRepr, QuadField};
use crate::staircase::{Label, LabelStyle, Patch, Shape, StripPoint, Tile, Tiling};
use crate::{Error, Result};

/// Environment variable overriding the orbit safety bound.
pub const MAX_ORBIT_ENV: &str = "TILINGFORGE_MAX_ORBIT";

/// A validated subwindow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subwindow {
    pub s: Vec2,
    /// `Ω̄` in window coordinates of the tiling it was validated against.
    pub interval: Interval,
    /// `bottom(Ω̄) − bottom(Ω)`.
    pub d_minus: QfNum,
    /// `top(Ω) − top(Ω̄)`.
    pub d_plus: QfNum,
}

impl Subwindow {
    /// Relative position of `Ω̄` in `Ω`, in the `Π_Y(t) = 0` frame.
    pub fn base(&self, tiling: &Tiling) -> QfNum {
        &tiling.projection().y(&self.s) + &(&tiling.projection().y(&tiling.window().t) - &tiling.window_interval().lo)
    }
}

/// Checks `Π_Y(s + t) + λ̃·[0, |Ω|) ⊆ Ω` (as closed intervals).
pub fn validate_subwindow(tiling: &Tiling, s: &Vec2) -> Result<Subwindow> {
    let proj = tiling.projection();
    let window = tiling.window_interval();
    let f = proj.field();
    let unit = Interval::new(f.zero(), tiling.window_length(), window.closure);
    let shift = proj.y(&(s + &tiling.window().t));
    let interval = unit.affine(&proj.lambda_tilde(), &shift);
    if !window.contains_closure_of(&interval) {
        return Err(Error::Containment(format!("Ω̄ = {interval} ⊄ Ω = {window}")));
    }
    let d_minus = &interval.lo - &window.lo;
    let d_plus = &window.hi - &interval.hi;
    Ok(Subwindow { s: s.clone(), interval, d_minus, d_plus })
}

/// Labelling cells of the window, relative to the window bottom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelPartition {
    pub cells: Vec<(Label, Interval)>,
}

impl LabelPartition {
    /// Cuts `[0, len)` at the sorted points `cuts` and names each cell after
    /// its shape. A shape with several cells gets indices in the order in
    /// which the cells' images appear in the subwindow: increasing `Y` when
    /// `det M = 1`, decreasing when `det M = −1`.
    fn build(tiling: &Tiling, cuts: &[QfNum]) -> LabelPartition {
        let base = &tiling.window_interval().lo;
        let closure = tiling.closure();
        let mut shapes = Vec::new();
        for w in cuts.windows(2) {
            let cell = Interval::new(&w[0] + base, &w[1] + base, closure);
            let probe = match closure {
                Closure::Left => cell.lo.clone(),
                Closure::Right => cell.hi.clone(),
            };
            shapes.push(tiling.shape_at(&probe).expect("cell inside the window"));
        }
        let mut totals: HashMap<Shape, u32> = HashMap::new();
        for s in &shapes {
            *totals.entry(*s).or_default() += 1;
        }
        let mut order: Vec<usize> = (0..shapes.len()).collect();
        if tiling.projection().det() < 0 {
            order.reverse();
        }
        let mut seen: HashMap<Shape, u32> = HashMap::new();
        let mut labels = vec![Label::plain(Shape::A); shapes.len()];
        for i in order {
            let s = shapes[i];
            let n = seen.entry(s).or_default();
            *n += 1;
            labels[i] = if totals[&s] > 1 { Label::indexed(s, *n) } else { Label::plain(s) };
        }
        let cells = cuts
            .windows(2)
            .zip(labels)
            .map(|(w, label)| (label, Interval::new(w[0].clone(), w[1].clone(), closure)))
            .collect();
        LabelPartition { cells }
    }

    pub fn label_at(&self, rel: &QfNum) -> Option<Label> {
        self.cells.iter().find(|(_, c)| c.contains(rel)).map(|(l, _)| *l)
    }

    /// As [`LabelPartition::label_at`], reading every cell with `closure`.
    pub fn label_at_with(&self, rel: &QfNum, closure: Closure) -> Option<Label> {
        self.cells
            .iter()
            .find(|(_, c)| Interval::new(c.lo.clone(), c.hi.clone(), closure).contains(rel))
            .map(|(l, _)| *l)
    }

    /// The cell of `label` if it is a single interval.
    pub fn cell(&self, label: &Label) -> Option<&Interval> {
        let mut it = self.cells.iter().filter(|(l, _)| l == label);
        let first = it.next().map(|(_, c)| c);
        if it.next().is_some() {
            None
        } else {
            first
        }
    }

    pub fn labels(&self) -> Vec<Label> {
        let mut v: Vec<Label> = self.cells.iter().map(|(l, _)| *l).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Cell endpoints including both ends of the window.
    pub fn boundaries(&self) -> Vec<QfNum> {
        let mut out: Vec<QfNum> = self.cells.iter().map(|(_, c)| c.lo.clone()).collect();
        if let Some((_, last)) = self.cells.last() {
            out.push(last.hi.clone());
        }
        out
    }

    fn find_closure(&self, j: &Interval, base: &QfNum) -> Option<Label> {
        self.cells
            .iter()
            .find(|(_, c)| c.translate(base).contains_closure_of(j))
            .map(|(l, _)| *l)
    }
}

/// A substitution rule together with the data it was derived from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstitutionRule {
    pub matrix: UniMatrix,
    pub l: Vec2,
    pub s: Vec2,
    pub lambda: QfNum,
    /// Labels in canonical order with their lengths.
    pub protoset: Vec<(Label, QfNum)>,
    pub words: BTreeMap<Label, Vec<Label>>,
    pub partition: LabelPartition,
}

impl SubstitutionRule {
    pub fn labels(&self) -> Vec<Label> {
        self.protoset.iter().map(|(l, _)| *l).collect()
    }

    pub fn length(&self, label: &Label) -> Option<&QfNum> {
        self.protoset.iter().find(|(l, _)| l == label).map(|(_, x)| x)
    }

    pub fn word(&self, label: &Label) -> Option<&[Label]> {
        self.words.get(label).map(|w| w.as_slice())
    }

    /// `a₁→(a+b)a₁, …` in canonical label order.
    pub fn format(&self, style: LabelStyle) -> String {
        self.words
            .iter()
            .map(|(k, w)| {
                let rhs: String = w.iter().map(|l| l.display(style, true)).collect();
                format!("{}→{}", k.display(style, false), rhs)
            })
            .collect::<Vec<_>>()
            .join(", ")
    }

    /// Incidence matrix: entry `(i, j)` counts label `j` in the word of `i`.
    pub fn incidence(&self) -> Vec<Vec<i64>> {
        let labels = self.labels();
        let pos: HashMap<Label, usize> = labels.iter().enumerate().map(|(i, l)| (*l, i)).collect();
        labels
            .iter()
            .map(|l| {
                let mut row = vec![0i64; labels.len()];
                for x in &self.words[l] {
                    row[pos[x]] += 1;
                }
                row
            })
            .collect()
    }

    /// Whether every replacement word covers exactly the inflated tile.
    pub fn is_vertex_hierarchic(&self) -> bool {
        self.protoset.iter().all(|(l, len)| {
            let mut sum = len.field().zero();
            for x in &self.words[l] {
                match self.length(x) {
                    Some(v) => sum = &sum + v,
                    None => return false,
                }
            }
            sum == &self.lambda * len
        })
    }

    pub fn to_json(&self) -> Value {
        let m = self.matrix.m;
        let protoset: Vec<Value> = self
            .protoset
            .iter()
            .map(|(l, len)| json!({"label": l.ascii(), "length": len.to_repr()}))
            .collect();
        let mut words = serde_json::Map::new();
        for (k, w) in &self.words {
            words.insert(k.ascii(), Value::from(w.iter().map(|l| l.ascii()).collect::<Vec<_>>()));
        }
        let partition: Vec<QfRepr> = self.partition.boundaries().iter().map(|b| b.to_repr()).collect();
        let cells: Vec<String> = self.partition.cells.iter().map(|(l, _)| l.ascii()).collect();
        json!({
            "matrix": [[m[0][0], m[0][1]], [m[1][0], m[1][1]]],
            "l": self.l.to_strings(),
            "s": self.s.to_strings(),
            "lambda": self.lambda.to_repr(),
            "protoset": protoset,
            "words": words,
            "partition": partition,
            "cells": cells,
        })
    }

    pub fn from_json(v: &Value) -> Result<SubstitutionRule> {
        let bad = |what: &str| Error::Parse(format!("rule JSON: bad or missing {what}"));
        let m = v["matrix"].as_array().ok_or_else(|| bad("matrix"))?;
        let mut e = [0i64; 4];
        for (i, row) in m.iter().enumerate().take(2) {
            for j in 0..2 {
                e[2 * i + j] = row[j].as_i64().ok_or_else(|| bad("matrix"))?;
            }
        }
        let matrix = UniMatrix::new(e[0], e[1], e[2], e[3]);
        let field = QuadField::new(matrix.trace(), matrix.det())?;
        let vec2 = |key: &str| -> Result<Vec2> {
            let a = v[key].as_array().ok_or_else(|| bad(key))?;
            let s: Vec<&str> = a.iter().filter_map(|x| x.as_str()).collect();
            if s.len() != 2 {
                return Err(bad(key));
            }
            Vec2::parse(&format!("{},{}", s[0], s[1]))
        };
        let qf = |x: &Value| -> Result<QfNum> {
            let r: QfRepr = serde_json::from_value(x.clone()).map_err(|_| bad("field element"))?;
            QfNum::from_repr(&r, field)
        };
        let mut protoset = Vec::new();
        for p in v["protoset"].as_array().ok_or_else(|| bad("protoset"))? {
            let label = Label::parse_ascii(p["label"].as_str().ok_or_else(|| bad("label"))?)?;
            protoset.push((label, qf(&p["length"])?));
        }
        let mut words = BTreeMap::new();
        for (k, w) in v["words"].as_object().ok_or_else(|| bad("words"))? {
            let word = w
                .as_array()
                .ok_or_else(|| bad("word"))?
                .iter()
                .map(|x| Label::parse_ascii(x.as_str().unwrap_or("")))
                .collect::<Result<Vec<_>>>()?;
            words.insert(Label::parse_ascii(k)?, word);
        }
        let bounds = v["partition"]
            .as_array()
            .ok_or_else(|| bad("partition"))?
            .iter()
            .map(qf)
            .collect::<Result<Vec<_>>>()?;
        let cell_labels = v["cells"].as_array().ok_or_else(|| bad("cells"))?;
        if bounds.len() != cell_labels.len() + 1 {
            return Err(bad("partition"));
        }
        let cells = cell_labels
            .iter()
            .zip(bounds.windows(2))
            .map(|(l, w)| {
                Ok((
                    Label::parse_ascii(l.as_str().unwrap_or(""))?,
                    Interval::new(w[0].clone(), w[1].clone(), Closure::Left),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SubstitutionRule {
            matrix,
            l: vec2("l")?,
            s: vec2("s")?,
            lambda: qf(&v["lambda"])?,
            protoset,
            words,
            partition: LabelPartition { cells },
        })
    }
}

impl fmt::Display for SubstitutionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format(LabelStyle::Letters))
    }
}

/// All state needed to derive the rule of `(M, l, s)`, with window base `0`.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub tiling: Tiling,
    pub sub: Subwindow,
    m_inv: UniMatrix,
    /// Most backward steps any vertex needs to reach `Ω̄`.
    n_max: usize,
    /// Bound on `|Π_V|` along `g`-orbits of the boundary points.
    v_bound: QfNum,
    max_orbit: usize,
}

impl Derivation {
    pub fn new(matrix: UniMatrix, l: &Vec2, s: &Vec2) -> Result<Self> {
        let tiling = Tiling::new(matrix, WindowSpec::new(l.clone()))?;
        Derivation::for_tiling(tiling, s)
    }

    /// Uses the given tiling's base and closure.
    pub fn for_tiling(tiling: Tiling, s: &Vec2) -> Result<Self> {
        let sub = validate_subwindow(&tiling, s)?;
        let proj = tiling.projection().clone();
        let lengths: Vec<f64> = tiling.shapes().iter().map(|&sh| tiling.length(sh).to_f64()).collect();
        let max_v = lengths.iter().cloned().fold(0.0, f64::max);
        let min_v = lengths.iter().cloned().fold(f64::INFINITY, f64::min);
        let lam = proj.lambda();
        let n_max = (lam.to_f64() * max_v / min_v).ceil() as usize + 1;

        let f = proj.field();
        let max_len = tiling
            .shapes()
            .iter()
            .map(|&sh| tiling.length(sh))
            .max()
            .expect("at least two shapes");
        let t = &tiling.window().t;
        let rel_s = proj.v(s);
        let steady = (&max_len.scale(&crate::quadfield::rat_int(n_max as i64)) + &rel_s.abs())
            .checked_div(&(&lam - &f.one()))?;
        let mut v_bound = steady;
        for p in boundary_points(&tiling) {
            let v = proj.v(&(&p - t)).abs();
            if v > v_bound {
                v_bound = v;
            }
        }

        let m = lcm_denominators([&tiling.window().l, s, t]).to_f64().unwrap_or(f64::INFINITY);
        let k = (&proj.y_generators().1 + &proj.v_generators().1).abs().to_f64();
        let area = (tiling.window_length().to_f64() + 2.0) * (2.0 * v_bound.to_f64() + 2.0);
        let estimate = 4.0 * m * m * area / k + 1000.0;
        let max_orbit = match std::env::var(MAX_ORBIT_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
            Some(n) => n,
            None if estimate.is_finite() && estimate < 5e7 => estimate as usize,
            None => 50_000_000,
        };
        let m_inv = matrix_inverse(&proj)?;
        Ok(Derivation { tiling, sub, m_inv, n_max, v_bound, max_orbit })
    }

    pub fn projection(&self) -> &Projection {
        self.tiling.projection()
    }

    pub fn v_bound(&self) -> &QfNum {
        &self.v_bound
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `g(z) = M⁻¹(Φ⁻ⁿ(z) − s − t) + t` with the least `n ≥ 0` that lands in `Ω̄`.
    pub fn g(&self, p: &StripPoint) -> Result<StripPoint> {
        let mut q = p.clone();
        let mut n = 0;
        while !self.sub.interval.contains(&q.y) {
            if n >= self.n_max {
                return Err(Error::BoundExceeded(format!(
                    "no predecessor vertex within {} steps of {}",
                    self.n_max, p.z
                )));
            }
            q = self.tiling.phi_inv(&q);
            n += 1;
        }
        let t = &self.tiling.window().t;
        let z = &self.m_inv.apply(&(&(&q.z - &self.sub.s) - t)) + t;
        let y = self.projection().y(&z);
        debug_assert!(self.tiling.in_window(&y));
        Ok(StripPoint { z, y })
    }

    /// The `g`-orbit of `p` up to its first repetition.
    pub fn orbit(&self, p: &StripPoint) -> Result<Vec<StripPoint>> {
        let t = &self.tiling.window().t;
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut q = p.clone();
        while seen.insert(q.z.clone()) {
            if self.projection().v(&(&q.z - t)).abs() > self.v_bound {
                return Err(Error::Invariant(format!("g-orbit left the bounded region at {}", q.z)));
            }
            if out.len() >= self.max_orbit {
                return Err(Error::BoundExceeded(format!("g-orbit longer than {}", self.max_orbit)));
            }
            out.push(q.clone());
            q = self.g(&q)?;
        }
        Ok(out)
    }

    /// The set `G`: `Π_Y` of both boundary orbits, sorted, relative to the
    /// window bottom.
    pub fn g_set(&self) -> Result<Vec<QfNum>> {
        let base = &self.tiling.window_interval().lo;
        let mut pts = Vec::new();
        for z in boundary_points(&self.tiling) {
            let p = self.tiling.point(z)?;
            for q in self.orbit(&p)? {
                pts.push(&q.y - base);
            }
        }
        pts.sort();
        pts.dedup();
        Ok(pts)
    }

    pub fn label_partition(&self) -> Result<LabelPartition> {
        let f = self.projection().field();
        let mut cuts = self.g_set()?;
        cuts.push(f.zero());
        cuts.push(self.tiling.window_length());
        cuts.sort();
        cuts.dedup();
        Ok(LabelPartition::build(&self.tiling, &cuts))
    }

    /// Replacement words read off by iterating `Φ` on each cell's image in `Ω̄`.
    pub fn words(&self, part: &LabelPartition) -> Result<BTreeMap<Label, Vec<Label>>> {
        let base = self.tiling.window_interval().lo.clone();
        let lt = self.projection().lambda_tilde();
        let sub = &self.sub.interval;
        let sub_base = self.sub.base(&self.tiling);
        let mut words = BTreeMap::new();
        for (label, cell) in &part.cells {
            let mut j = cell.affine(&lt, &(&sub_base + &base));
            let mut word = Vec::new();
            loop {
                let x = part.find_closure(&j, &base).ok_or_else(|| {
                    Error::Invariant(format!("iterate {j} of cell {label} straddles a cell boundary"))
                })?;
                word.push(x);
                j = j.translate(&self.tiling.y_step(x.shape));
                if sub.contains_closure_of(&j) {
                    break;
                }
                if j.hi > sub.lo && j.lo < sub.hi {
                    return Err(Error::Invariant(format!("iterate {j} straddles the subwindow")));
                }
                if word.len() > self.n_max + 1 {
                    return Err(Error::BoundExceeded(format!("word of {label} does not close")));
                }
            }
            if let Some(prev) = words.insert(*label, word.clone()) {
                if prev != word {
                    return Err(Error::Invariant(format!("label {label} has two replacement words")));
                }
            }
        }
        Ok(words)
    }

    pub fn rule(&self) -> Result<SubstitutionRule> {
        let part = self.label_partition()?;
        let words = self.words(&part)?;
        let protoset = part.labels().into_iter().map(|l| (l, self.tiling.length(l.shape))).collect();
        let rule = SubstitutionRule {
            matrix: self.tiling.matrix(),
            l: self.tiling.window().l.clone(),
            s: self.sub.s.clone(),
            lambda: self.projection().lambda(),
            protoset,
            words,
            partition: part,
        };
        if !rule.is_vertex_hierarchic() {
            return Err(Error::Invariant("derived words do not cover the inflated tiles".into()));
        }
        Ok(rule)
    }
}

fn matrix_inverse(proj: &Projection) -> Result<UniMatrix> {
    proj.matrix().inverse()
}

/// `t + l − b` and `t − a`: lattice points on the tile-type boundaries.
pub fn boundary_points(tiling: &Tiling) -> [Vec2; 2] {
    let w = tiling.window();
    let steps = tiling.steps();
    [&(&w.t + &w.l) - steps.b(), &w.t - steps.a()]
}

/// Derives the rule of `(M, l, s)` with base `t = 0`.
pub fn derive_rule(matrix: UniMatrix, l: &Vec2, s: &Vec2) -> Result<SubstitutionRule> {
    Derivation::new(matrix, l, s)?.rule()
}

/// Inflates by `λ` about the origin and replaces every tile by its word.
pub fn apply_rule(rule: &SubstitutionRule, patch: &Patch) -> Result<Patch> {
    let mut tiles = Vec::new();
    for t in &patch.tiles {
        let w = rule.words.get(&t.label).ok_or_else(|| Error::UnknownLabel(t.label.ascii()))?;
        for x in w {
            let length = rule.length(x).ok_or_else(|| Error::UnknownLabel(x.ascii()))?.clone();
            tiles.push(Tile { label: *x, length });
        }
    }
    Ok(Patch { anchor: &rule.lambda * &patch.anchor, tiles })
}

/// `σ(𝒯_{l,t}) = 𝒯_{l,Mt−s}`.
pub fn substituted_window(matrix: &UniMatrix, t: &Vec2, s: &Vec2) -> Vec2 {
    &matrix.apply(t) - s
}

/// Shape sequences of `σⁿ(x)` for `n = 1..=depth`.
fn unlabelled_images(rule: &SubstitutionRule, x: Label, depth: usize) -> Vec<Vec<Shape>> {
    let mut cur = vec![x];
    let mut out = Vec::with_capacity(depth);
    for _ in 0..depth {
        cur = cur.iter().flat_map(|l| rule.words[l].iter().copied()).collect();
        out.push(cur.iter().map(|l| l.shape).collect());
    }
    out
}

/// Depth-bounded patch equivalence: every prototile of either rule has a
/// prototile of the other with the same shape and the same unlabelled
/// images up to `depth`.
pub fn patch_equivalent(r1: &SubstitutionRule, r2: &SubstitutionRule, depth: usize) -> bool {
    if r1.lambda.field() != r2.lambda.field() || r1.lambda != r2.lambda {
        return false;
    }
    let profile = |r: &SubstitutionRule| -> HashSet<(Shape, Vec<Vec<Shape>>)> {
        r.labels().into_iter().map(|l| (l.shape, unlabelled_images(r, l, depth))).collect()
    };
    let shapes = |r: &SubstitutionRule| -> BTreeMap<Shape, QfNum> {
        r.protoset.iter().map(|(l, len)| (l.shape, len.clone())).collect()
    };
    shapes(r1) == shapes(r2) && profile(r1) == profile(r2)
}

/// Coarsest label merging compatible with the words: classes start as
/// shapes and split until equal-class labels have equal class words.
pub fn patch_minimize(rule: &SubstitutionRule) -> SubstitutionRule {
    let labels = rule.labels();
    let mut class: HashMap<Label, usize> = labels.iter().map(|l| (*l, l.shape as usize)).collect();
    loop {
        let mut keys: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let mut next = HashMap::new();
        for l in &labels {
            let key = (class[l], rule.words[l].iter().map(|x| class[x]).collect::<Vec<_>>());
            let n = keys.len();
            let id = *keys.entry(key).or_insert(n);
            next.insert(*l, id);
        }
        let before = class.values().collect::<HashSet<_>>().len();
        let after = keys.len();
        class = next;
        if after == before {
            break;
        }
    }
    // Name classes per shape in canonical order of their first member.
    let mut reps: Vec<(usize, Label)> = Vec::new();
    for l in &labels {
        if !reps.iter().any(|(c, _)| *c == class[l]) {
            reps.push((class[l], *l));
        }
    }
    let mut per_shape: HashMap<Shape, u32> = HashMap::new();
    for (_, l) in &reps {
        *per_shape.entry(l.shape).or_default() += 1;
    }
    let mut counter: HashMap<Shape, u32> = HashMap::new();
    let mut name: HashMap<usize, Label> = HashMap::new();
    for (c, l) in &reps {
        let n = counter.entry(l.shape).or_default();
        *n += 1;
        let lab = if per_shape[&l.shape] > 1 { Label::indexed(l.shape, *n) } else { Label::plain(l.shape) };
        name.insert(*c, lab);
    }
    let rename = |l: &Label| name[&class[l]];
    let mut words = BTreeMap::new();
    for (k, w) in &rule.words {
        words.insert(rename(k), w.iter().map(rename).collect());
    }
    let mut protoset: Vec<(Label, QfNum)> = reps.iter().map(|(c, l)| (name[c], rule.length(l).unwrap().clone())).collect();
    protoset.sort_by_key(|a| a.0);
    let cells = rule
        .partition
        .cells
        .iter()
        .map(|(l, c)| (class.get(l).map_or(*l, |k| name[k]), c.clone()))
        .collect();
    SubstitutionRule {
        matrix: rule.matrix,
        l: rule.l.clone(),
        s: rule.s.clone(),
        lambda: rule.lambda.clone(),
        protoset,
        words,
        partition: LabelPartition { cells },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::rat;

    fn worked() -> Derivation {
        Derivation::new(UniMatrix::new(2, 1, 1, 1), &Vec2::int(-2, 2), &Vec2::int(-1, 0)).unwrap()
    }

    #[test]
    fn worked_example_subwindow() {
        let d = worked();
        let f = d.projection().field();
        assert_eq!(d.sub.interval, Interval::new(f.int(1), f.int(3), Closure::Left));
    }

    #[test]
    fn worked_example_g() {
        let d = worked();
        let t = &d.tiling;
        let minus_a = t.point(Vec2::int(-1, 1)).unwrap();
        let g1 = d.g(&minus_a).unwrap();
        assert_eq!(g1.z, Vec2::int(-1, 2));
        // The backward walk from g(−a) reaches −a after two steps, and the
        // orbit closes there: g(g(−a)) = g(−a).
        let back = t.phi_inv(&t.phi_inv(&g1));
        assert_eq!(back.z, Vec2::int(-1, 1));
        assert_eq!(d.g(&g1).unwrap(), g1);
        let lb = t.point(Vec2::int(-1, 0)).unwrap();
        assert_eq!(d.g(&lb).unwrap().z, Vec2::zero());
    }

    #[test]
    fn worked_example_g_set() {
        let d = worked();
        let f = d.projection().field();
        let tau = f.element(rat(-1, 1), rat(1, 1));
        let g = d.g_set().unwrap();
        assert_eq!(g, vec![f.zero(), f.int(1), &f.int(1) + &tau, &f.int(1) + &tau.scale(&rat(2, 1))]);
    }

    #[test]
    fn worked_example_rule() {
        let r = worked().rule().unwrap();
        assert_eq!(r.format(LabelStyle::Steps), "a₁→(a+b)a₁, a₂→a₁ba₂, b→(a+b), a+b→(a+b)a₁ba₂");
        assert_eq!(r.partition.cells.len(), 4);
    }

    #[test]
    fn fibonacci_rule() {
        let r = derive_rule(UniMatrix::new(1, 1, 1, 0), &Vec2::int(-1, 1), &Vec2::int(-1, 1)).unwrap();
        assert_eq!(r.to_string(), "a→ab, b→a");
    }

    #[test]
    fn containment_failure() {
        let e = derive_rule(UniMatrix::new(1, 1, 1, 0), &Vec2::int(-1, 1), &Vec2::int(0, 0));
        assert!(matches!(e, Err(Error::Containment(_))));
        let e = derive_rule(UniMatrix::new(2, 1, 1, 1), &Vec2::int(-2, 2), &Vec2::int(-4, 0));
        assert!(matches!(e, Err(Error::Containment(_))));
    }

    #[test]
    fn apply_rule_twice() {
        let r = derive_rule(UniMatrix::new(1, 1, 1, 0), &Vec2::int(-1, 1), &Vec2::int(-1, 1)).unwrap();
        let f = r.lambda.field();
        let a = Label::plain(Shape::A);
        let p = Patch { anchor: f.zero(), tiles: vec![Tile { label: a, length: r.length(&a).unwrap().clone() }] };
        let p2 = apply_rule(&r, &apply_rule(&r, &p).unwrap()).unwrap();
        assert_eq!(p2.word(LabelStyle::Letters), "aba");
        assert_eq!(p2.total_length(), &(&r.lambda * &r.lambda) * r.length(&a).unwrap());
        assert!(apply_rule(&r, &Patch::empty(f.zero())).unwrap().is_empty());
    }

    #[test]
    fn substituted_windows() {
        let m = UniMatrix::new(1, 1, 1, 0);
        assert_eq!(substituted_window(&m, &Vec2::zero(), &Vec2::zero()), Vec2::zero());
        assert_eq!(substituted_window(&m, &Vec2::int(1, 1), &Vec2::zero()), Vec2::int(2, 1));
        let m = UniMatrix::new(2, 1, 1, 1);
        assert_eq!(substituted_window(&m, &Vec2::zero(), &Vec2::int(-1, 0)), Vec2::int(1, 0));
    }

    #[test]
    fn minimize_merges_duplicates() {
        let mut r = derive_rule(UniMatrix::new(1, 1, 1, 0), &Vec2::int(-1, 1), &Vec2::int(-1, 1)).unwrap();
        assert_eq!(patch_minimize(&r), r);
        // Split b into two labels with identical words.
        let (a, b) = (Label::plain(Shape::A), Label::plain(Shape::B));
        let (b1, b2) = (Label::indexed(Shape::B, 1), Label::indexed(Shape::B, 2));
        let len_b = r.length(&b).unwrap().clone();
        r.protoset = vec![(a, r.length(&a).unwrap().clone()), (b1, len_b.clone()), (b2, len_b)];
        r.words = BTreeMap::from([(a, vec![a, b1]), (b1, vec![a]), (b2, vec![a])]);
        let m = patch_minimize(&r);
        assert_eq!(m.to_string(), "a→ab, b→a");
        assert!(patch_equivalent(&r, &m, 4));
    }

    #[test]
    fn json_round_trip() {
        let r = worked().rule().unwrap();
        let text = serde_json::to_string_pretty(&r.to_json()).unwrap();
        let back = SubstitutionRule::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(serde_json::to_string_pretty(&back.to_json()).unwrap(), text);
        assert_eq!(back.words, r.words);
    }
}
