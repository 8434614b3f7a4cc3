//! The staircase map `Φ` of a window, its tile partition and finite patches.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::lattice::{compute_steps, Closure, Interval, Projection, StepSet, UniMatrix, Vec2, WindowSpec};
use crate::quadfield::{QfNum, QfRepr};
use crate::substitution::LabelPartition;
use crate::{Error, Result};

/// Geometric tile type: the staircase step a vertex is followed by.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Shape {
    /// The step with negative `Π_Y` (horizontal-like).
    A,
    /// The step with positive `Π_Y` (vertical-like).
    B,
    /// Their sum.
    C,
}

impl Shape {
    pub fn letter(self) -> char {
        match self {
            Shape::A => 'a',
            Shape::B => 'b',
            Shape::C => 'c',
        }
    }

    pub fn from_letter(c: char) -> Option<Shape> {
        match c {
            'a' => Some(Shape::A),
            'b' => Some(Shape::B),
            'c' => Some(Shape::C),
            _ => None,
        }
    }
}

/// How the composite shape is spelled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum LabelStyle {
    /// `a`, `b`, `c`.
    #[default]
    Letters,
    /// `a`, `b`, `a+b` (parenthesised inside words).
    Steps,
}

/// A tile label: a shape plus an index when the shape carries several labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    pub shape: Shape,
    /// `0` for an unindexed label.
    pub index: u32,
}

const SUBSCRIPTS: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];

impl Label {
    pub fn plain(shape: Shape) -> Self {
        Label { shape, index: 0 }
    }

    pub fn indexed(shape: Shape, index: u32) -> Self {
        Label { shape, index }
    }

    /// ASCII name used in JSON: `a`, `a2`, `c`.
    pub fn ascii(&self) -> String {
        if self.index == 0 {
            self.shape.letter().to_string()
        } else {
            format!("{}{}", self.shape.letter(), self.index)
        }
    }

    pub fn parse_ascii(s: &str) -> Result<Label> {
        let mut chars = s.chars();
        let shape = chars
            .next()
            .and_then(Shape::from_letter)
            .ok_or_else(|| Error::UnknownLabel(s.to_string()))?;
        let rest: String = chars.collect();
        if rest.is_empty() {
            return Ok(Label::plain(shape));
        }
        let index = rest.parse::<u32>().map_err(|_| Error::UnknownLabel(s.to_string()))?;
        Ok(Label::indexed(shape, index))
    }

    /// Display name with subscript index; `in_word` parenthesises `a+b`.
    pub fn display(&self, style: LabelStyle, in_word: bool) -> String {
        let mut base = match (self.shape, style) {
            (Shape::C, LabelStyle::Steps) => "a+b".to_string(),
            (s, _) => s.letter().to_string(),
        };
        let composite = base.len() > 1;
        if composite && (in_word || self.index != 0) {
            base = format!("({base})");
        }
        if self.index != 0 {
            for d in self.index.to_string().chars() {
                base.push(SUBSCRIPTS[d.to_digit(10).unwrap() as usize]);
            }
        }
        base
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display(LabelStyle::Letters, false))
    }
}

/// A vertex of the staircase: a lattice point inside the strip.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StripPoint {
    pub z: Vec2,
    /// Cached `Π_Y(z)`.
    pub y: QfNum,
}

/// The partition of the window by the step that follows a vertex.
#[derive(Clone, Debug)]
pub struct TilePartition {
    /// Interior boundary points, increasing.
    pub boundaries: Vec<QfNum>,
    /// Cells in increasing `Y` order.
    pub cells: Vec<(Shape, Interval)>,
}

/// One tile of a patch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tile {
    pub label: Label,
    pub length: QfNum,
}

/// A finite run of consecutive tiles starting at `anchor` (a `Π_V` value).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Patch {
    pub anchor: QfNum,
    pub tiles: Vec<Tile>,
}

#[derive(Serialize)]
struct TileJson {
    label: String,
    length: QfRepr,
}

impl Patch {
    pub fn empty(anchor: QfNum) -> Self {
        Patch { anchor, tiles: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.tiles.iter().map(|t| t.label).collect()
    }

    pub fn shapes(&self) -> Vec<Shape> {
        self.tiles.iter().map(|t| t.label.shape).collect()
    }

    pub fn total_length(&self) -> QfNum {
        let mut acc = self.anchor.field().zero();
        for t in &self.tiles {
            acc = &acc + &t.length;
        }
        acc
    }

    /// All vertex positions, `anchor` first.
    pub fn vertices(&self) -> Vec<QfNum> {
        let mut out = Vec::with_capacity(self.tiles.len() + 1);
        let mut x = self.anchor.clone();
        out.push(x.clone());
        for t in &self.tiles {
            x = &x + &t.length;
            out.push(x.clone());
        }
        out
    }

    /// Letters of the patch, e.g. `"abaab"`.
    pub fn word(&self, style: LabelStyle) -> String {
        self.tiles.iter().map(|t| t.label.display(style, true)).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let tiles: Vec<TileJson> = self
            .tiles
            .iter()
            .map(|t| TileJson { label: t.label.ascii(), length: t.length.to_repr() })
            .collect();
        serde_json::to_value(tiles).expect("patch serializes")
    }
}

/// A projection tiling `𝒯_{l,t}`: vertices `Π_V(z)` for `z ∈ Z²` with
/// `Π_Y(z)` in the window.
#[derive(Clone, Debug)]
pub struct Tiling {
    proj: Projection,
    window: WindowSpec,
    steps: StepSet,
    bounds: Interval,
    /// Bottom of the `a+b` cell, `Π_Y(t + l − b)`.
    cut_low: QfNum,
    /// Bottom of the `a` cell, `Π_Y(t − a)`.
    cut_high: QfNum,
    y_a: QfNum,
    y_b: QfNum,
}

impl Tiling {
    pub fn new(matrix: UniMatrix, window: WindowSpec) -> Result<Self> {
        Tiling::from_projection(Projection::new(matrix)?, window)
    }

    pub fn from_projection(proj: Projection, window: WindowSpec) -> Result<Self> {
        let steps = compute_steps(&proj, &window.l)?;
        let lo = proj.y(&window.t);
        let len = proj.y(&window.l);
        let hi = &lo + &len;
        let y_a = proj.y(steps.a());
        let y_b = proj.y(steps.b());
        let cut_low = &hi - &y_b;
        let cut_high = &lo - &y_a;
        let bounds = Interval::new(lo, hi, window.closure);
        Ok(Tiling { proj, window, steps, bounds, cut_low, cut_high, y_a, y_b })
    }

    /// Same matrix and `l`, another base and closure.
    pub fn rebase(&self, t: Vec2, closure: Closure) -> Tiling {
        let lo = self.proj.y(&t);
        let shift = &lo - &self.bounds.lo;
        Tiling {
            proj: self.proj.clone(),
            window: WindowSpec { l: self.window.l.clone(), t, closure },
            steps: self.steps.clone(),
            bounds: Interval::new(lo, &self.bounds.hi + &shift, closure),
            cut_low: &self.cut_low + &shift,
            cut_high: &self.cut_high + &shift,
            y_a: self.y_a.clone(),
            y_b: self.y_b.clone(),
        }
    }

    pub fn projection(&self) -> &Projection {
        &self.proj
    }

    pub fn matrix(&self) -> UniMatrix {
        self.proj.matrix()
    }

    pub fn window(&self) -> &WindowSpec {
        &self.window
    }

    pub fn steps(&self) -> &StepSet {
        &self.steps
    }

    /// The window as an interval of `Y`.
    pub fn window_interval(&self) -> &Interval {
        &self.bounds
    }

    pub fn window_length(&self) -> QfNum {
        self.bounds.len()
    }

    pub fn closure(&self) -> Closure {
        self.window.closure
    }

    pub fn shapes(&self) -> Vec<Shape> {
        if self.steps.has_middle {
            vec![Shape::A, Shape::B, Shape::C]
        } else {
            vec![Shape::A, Shape::B]
        }
    }

    pub fn step(&self, shape: Shape) -> Vec2 {
        match shape {
            Shape::A => self.steps.a().clone(),
            Shape::B => self.steps.b().clone(),
            Shape::C => self.steps.c(),
        }
    }

    /// `Π_Y` of the step of `shape`.
    pub fn y_step(&self, shape: Shape) -> QfNum {
        match shape {
            Shape::A => self.y_a.clone(),
            Shape::B => self.y_b.clone(),
            Shape::C => &self.y_a + &self.y_b,
        }
    }

    /// Tile length `Π_V` of `shape`.
    pub fn length(&self, shape: Shape) -> QfNum {
        self.proj.v(&self.step(shape))
    }

    pub fn partition(&self) -> TilePartition {
        let (lo, hi, cl) = (&self.bounds.lo, &self.bounds.hi, self.bounds.closure);
        let mut cells = vec![(Shape::B, Interval::new(lo.clone(), self.cut_low.clone(), cl))];
        let mut boundaries = vec![self.cut_low.clone()];
        if self.steps.has_middle {
            cells.push((Shape::C, Interval::new(self.cut_low.clone(), self.cut_high.clone(), cl)));
            boundaries.push(self.cut_high.clone());
        }
        cells.push((Shape::A, Interval::new(self.cut_high.clone(), hi.clone(), cl)));
        TilePartition { boundaries, cells }
    }

    pub fn cell(&self, shape: Shape) -> Interval {
        let (lo, hi, cl) = (&self.bounds.lo, &self.bounds.hi, self.bounds.closure);
        match shape {
            Shape::B => Interval::new(lo.clone(), self.cut_low.clone(), cl),
            Shape::C => Interval::new(self.cut_low.clone(), self.cut_high.clone(), cl),
            Shape::A => Interval::new(self.cut_high.clone(), hi.clone(), cl),
        }
    }

    pub fn in_window(&self, y: &QfNum) -> bool {
        self.bounds.contains(y)
    }

    /// Shape of the tile starting at a vertex with projection `y`.
    pub fn shape_at(&self, y: &QfNum) -> Option<Shape> {
        if !self.bounds.contains(y) {
            return None;
        }
        let below = |cut: &QfNum| match self.bounds.closure {
            Closure::Left => y < cut,
            Closure::Right => y <= cut,
        };
        Some(if below(&self.cut_low) {
            Shape::B
        } else if below(&self.cut_high) {
            Shape::C
        } else {
            Shape::A
        })
    }

    pub fn point(&self, z: Vec2) -> Result<StripPoint> {
        let y = self.proj.y(&z);
        if self.in_window(&y) {
            Ok(StripPoint { z, y })
        } else {
            Err(Error::Precondition(format!("{z} is not in the strip")))
        }
    }

    pub fn shape_of(&self, p: &StripPoint) -> Shape {
        self.shape_at(&p.y).expect("strip point lies in the window")
    }

    fn advance(&self, p: &StripPoint, shape: Shape, sign: i64) -> StripPoint {
        let step = self.step(shape);
        let dy = self.y_step(shape);
        if sign > 0 {
            StripPoint { z: &p.z + &step, y: &p.y + &dy }
        } else {
            StripPoint { z: &p.z - &step, y: &p.y - &dy }
        }
    }

    /// The next vertex to the right.
    pub fn phi(&self, p: &StripPoint) -> StripPoint {
        self.advance(p, self.shape_of(p), 1)
    }

    /// The next vertex to the left.
    pub fn phi_inv(&self, p: &StripPoint) -> StripPoint {
        for shape in self.shapes() {
            let q = self.advance(p, shape, -1);
            if self.shape_at(&q.y) == Some(shape) {
                return q;
            }
        }
        unreachable!("Φ is a bijection of the strip")
    }

    /// A lattice point in the strip, preferring small coordinates.
    pub fn find_strip_point(&self) -> Result<StripPoint> {
        let (y2, lo, hi) = (self.proj.y_generators().1, &self.bounds.lo, &self.bounds.hi);
        let f = self.proj.field();
        for i in 0..2_000_000i64 {
            let zy = if i % 2 == 1 { (i + 1) / 2 } else { -(i / 2) };
            let zyq = BigRational::from_integer(BigInt::from(zy));
            let base = y2.scale(&zyq);
            // Π_Y = base − z.x must lie in the window.
            let (a, b) = (&base - hi, &base - lo);
            let pick = if a.is_negative() && b.is_positive() {
                BigInt::from(0)
            } else if !a.is_negative() {
                a.floor() + 1
            } else {
                b.floor()
            };
            for zx in [pick.clone(), pick.clone() - 1, pick + 1] {
                let z = Vec2::new(BigRational::from_integer(zx), zyq.clone());
                let y = &base - &f.rational(z.x.clone());
                if self.in_window(&y) {
                    return Ok(StripPoint { z, y });
                }
            }
        }
        Err(Error::BoundExceeded("no lattice point found in the strip".into()))
    }

    /// Label of the vertex at `p` under a partition derived for base `0`.
    pub fn label_of(&self, p: &StripPoint, labels: Option<&LabelPartition>) -> Label {
        match labels {
            None => Label::plain(self.shape_of(p)),
            Some(part) => {
                let rel = &p.y - &self.bounds.lo;
                part.label_at_with(&rel, self.bounds.closure).expect("vertex lies in the window")
            }
        }
    }

    /// `n_left` tiles before `seed` and `n_right` tiles from `seed` on.
    pub fn generate_patch(
        &self,
        seed: &StripPoint,
        n_left: usize,
        n_right: usize,
        labels: Option<&LabelPartition>,
    ) -> Patch {
        let mut start = seed.clone();
        for _ in 0..n_left {
            start = self.phi_inv(&start);
        }
        let mut tiles = Vec::with_capacity(n_left + n_right);
        let mut p = start.clone();
        for _ in 0..n_left + n_right {
            let shape = self.shape_of(&p);
            tiles.push(Tile { label: self.label_of(&p, labels), length: self.length(shape) });
            p = self.advance(&p, shape, 1);
        }
        Patch { anchor: self.proj.v(&start.z), tiles }
    }

    /// The vertices `p` such that the tiles from `p` on read `shapes`.
    pub fn patch_window(&self, shapes: &[Shape]) -> Result<Interval> {
        let cells: Vec<(Interval, QfNum)> =
            shapes.iter().map(|&s| (self.cell(s), self.y_step(s))).collect();
        intersect_cells(self.bounds.clone(), &cells)
    }

    /// As [`Tiling::patch_window`] for a labelled word.
    pub fn patch_window_labelled(&self, labels: &[Label], part: &LabelPartition) -> Result<Interval> {
        let base = &self.bounds.lo;
        let mut cells = Vec::with_capacity(labels.len());
        for l in labels {
            let cell = part.cell(l).ok_or_else(|| Error::UnknownLabel(l.ascii()))?;
            let cell = Interval::new(&cell.lo + base, &cell.hi + base, self.bounds.closure);
            cells.push((cell, self.y_step(l.shape)));
        }
        intersect_cells(self.bounds.clone(), &cells)
    }
}

/// Intersects `cell_k − (offset of tile k)` over a word.
fn intersect_cells(mut acc: Interval, cells: &[(Interval, QfNum)]) -> Result<Interval> {
    let mut offset = acc.lo.field().zero();
    for (cell, dy) in cells {
        acc = acc.intersect(&cell.translate(&-&offset));
        if acc.is_empty() {
            return Err(Error::Unrealizable);
        }
        offset = &offset + dy;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::rat;

    fn worked() -> Tiling {
        Tiling::new(UniMatrix::new(2, 1, 1, 1), WindowSpec::new(Vec2::int(-2, 2))).unwrap()
    }

    fn fibonacci() -> Tiling {
        Tiling::new(UniMatrix::new(1, 1, 1, 0), WindowSpec::new(Vec2::int(-1, 1))).unwrap()
    }

    #[test]
    fn worked_example_backward_orbit() {
        let t = worked();
        let p = t.point(Vec2::int(-1, 2)).unwrap();
        let p1 = t.phi_inv(&p);
        assert_eq!(p1.z, Vec2::int(0, 0));
        assert_eq!(t.phi_inv(&p1).z, Vec2::int(-1, 1));
    }

    #[test]
    fn worked_example_partition() {
        let t = worked();
        let f = t.projection().field();
        let part = t.partition();
        let tau = f.element(rat(-1, 1), rat(1, 1));
        assert_eq!(part.boundaries, vec![f.int(1), &f.int(1) + &tau]);
        assert_eq!(part.cells.iter().map(|c| c.0).collect::<Vec<_>>(), vec![Shape::B, Shape::C, Shape::A]);
    }

    #[test]
    fn fibonacci_partition_has_two_cells() {
        let t = fibonacci();
        let part = t.partition();
        assert_eq!(part.cells.len(), 2);
        assert_eq!(part.boundaries, vec![t.projection().field().int(1)]);
        let p0 = t.point(Vec2::zero()).unwrap();
        assert_eq!(t.phi(&p0).z, Vec2::int(0, 1));
    }

    #[test]
    fn rebase_translates_boundaries() {
        let t = worked();
        let shifted = t.rebase(Vec2::new(rat(1, 3), rat(0, 1)), Closure::Left);
        let d = t.projection().y(&Vec2::new(rat(1, 3), rat(0, 1)));
        let (a, b) = (t.partition(), shifted.partition());
        for (x, y) in a.boundaries.iter().zip(&b.boundaries) {
            assert_eq!(&(x + &d), y);
        }
    }

    #[test]
    fn worked_example_patch_from_middle_cell() {
        let t = worked();
        let seed = t.point(Vec2::int(-1, 0)).unwrap();
        assert_eq!(t.shape_of(&seed), Shape::C);
        let patch = t.generate_patch(&seed, 0, 4, None);
        assert_eq!(patch.shapes(), vec![Shape::C, Shape::A, Shape::B, Shape::A]);
    }

    #[test]
    fn strip_points() {
        let t = fibonacci();
        assert_eq!(t.find_strip_point().unwrap().z, Vec2::zero());
        let tiny = Tiling::new(UniMatrix::new(1, 1, 1, 0), WindowSpec::new(Vec2::new(rat(-1, 100), rat(0, 1))))
            .unwrap()
            .rebase(Vec2::new(rat(1, 3), rat(0, 1)), Closure::Left);
        let p = tiny.find_strip_point().unwrap();
        assert!(tiny.in_window(&p.y));
    }

    #[test]
    fn patch_windows() {
        let t = fibonacci();
        assert_eq!(t.patch_window(&[Shape::A]).unwrap(), t.cell(Shape::A));
        let ab = t.patch_window(&[Shape::A, Shape::B]).unwrap();
        assert!(t.cell(Shape::A).contains_interval(&ab));
        assert_ne!(ab, t.cell(Shape::A));
        assert!(matches!(t.patch_window(&[Shape::B, Shape::B]), Err(Error::Unrealizable)));
    }

    #[test]
    fn labels_render() {
        let c = Label::plain(Shape::C);
        assert_eq!(c.display(LabelStyle::Steps, true), "(a+b)");
        assert_eq!(c.display(LabelStyle::Steps, false), "a+b");
        assert_eq!(Label::indexed(Shape::A, 2).to_string(), "a₂");
        assert_eq!(Label::parse_ascii("b12").unwrap(), Label::indexed(Shape::B, 12));
    }
}
