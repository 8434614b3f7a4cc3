//! Integer matrices, exact eigen-projections of `Q²` into `Q[λ]`, windows
//! and the staircase steps of a window.
//!
//! Coordinates are normalized so that `Π_Y(e₁) = −1` and `Π_V(e₁) = 1`.
//! With `y₂ = m₁₂/(λ − m₁₁)` and `c = −m₁₂/(λ̃ − m₁₁)` this gives
//! `Π_Y(x, y) = −x + y·y₂` and `Π_V(x, y) = x + y·c`; `Π_Y` is a left
//! eigenvector for the contracting eigenvalue `λ̃ = T − λ` and `Π_V` one
//! for `λ`.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::quadfield::{format_rational, parse_rational, rat_int, QfNum, QuadField, Rational};
use crate::{Error, Result};

/// A point or vector of `Q²`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vec2 {
    pub x: Rational,
    pub y: Rational,
}

impl Vec2 {
    pub fn new(x: Rational, y: Rational) -> Self {
        Vec2 { x, y }
    }

    pub fn int(x: i64, y: i64) -> Self {
        Vec2 { x: rat_int(x), y: rat_int(y) }
    }

    pub fn zero() -> Self {
        Vec2::int(0, 0)
    }

    pub fn is_integral(&self) -> bool {
        self.x.is_integer() && self.y.is_integer()
    }

    /// Least common multiple of both denominators.
    pub fn denominator(&self) -> BigInt {
        self.x.denom().lcm(self.y.denom())
    }

    pub fn scale(&self, r: &Rational) -> Vec2 {
        Vec2::new(&self.x * r, &self.y * r)
    }

    /// Componentwise reduction into `[0, 1)²`.
    pub fn fract(&self) -> Vec2 {
        Vec2::new(&self.x - self.x.floor(), &self.y - self.y.floor())
    }

    /// Parses `"x,y"` with rational components.
    pub fn parse(s: &str) -> Result<Vec2> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 2 {
            return Err(Error::Parse(format!("expected two comma-separated components, got {s:?}")));
        }
        Ok(Vec2::new(parse_rational(parts[0])?, parse_rational(parts[1])?))
    }

    pub fn to_strings(&self) -> [String; 2] {
        [format_rational(&self.x), format_rational(&self.y)]
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for &Vec2 {
    type Output = Vec2;
    fn add(self, o: &Vec2) -> Vec2 {
        Vec2::new(&self.x + &o.x, &self.y + &o.y)
    }
}

impl Sub for &Vec2 {
    type Output = Vec2;
    fn sub(self, o: &Vec2) -> Vec2 {
        Vec2::new(&self.x - &o.x, &self.y - &o.y)
    }
}

impl Neg for &Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x.clone(), -self.y.clone())
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        &self + &o
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        &self - &o
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        -&self
    }
}

/// A 2×2 integer matrix, row major.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UniMatrix {
    pub m: [[i64; 2]; 2],
}

impl UniMatrix {
    pub fn new(m11: i64, m12: i64, m21: i64, m22: i64) -> Self {
        UniMatrix { m: [[m11, m12], [m21, m22]] }
    }

    pub fn identity() -> Self {
        UniMatrix::new(1, 0, 0, 1)
    }

    /// Parses `"a,b,c,d"` (row major).
    pub fn parse(s: &str) -> Result<Self> {
        let v: Vec<i64> = s
            .split(',')
            .map(|p| p.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse(format!("matrix entries must be integers: {s:?}")))?;
        if v.len() != 4 {
            return Err(Error::Parse(format!("matrix needs four entries, got {}", v.len())));
        }
        Ok(UniMatrix::new(v[0], v[1], v[2], v[3]))
    }

    pub fn det(&self) -> i64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> i64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1]]
    }

    pub fn mul(&self, o: &UniMatrix) -> UniMatrix {
        let a = &self.m;
        let b = &o.m;
        UniMatrix::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }

    pub fn sub_identity(&self) -> UniMatrix {
        UniMatrix::new(self.m[0][0] - 1, self.m[0][1], self.m[1][0], self.m[1][1] - 1)
    }

    /// Inverse of a unimodular matrix.
    pub fn inverse(&self) -> Result<UniMatrix> {
        let d = self.det();
        if d != 1 && d != -1 {
            return Err(Error::NotUnimodular(d));
        }
        Ok(UniMatrix::new(d * self.m[1][1], -d * self.m[0][1], -d * self.m[1][0], d * self.m[0][0]))
    }

    pub fn apply(&self, v: &Vec2) -> Vec2 {
        let r = |i: i64| rat_int(i);
        Vec2::new(
            r(self.m[0][0]) * &v.x + r(self.m[0][1]) * &v.y,
            r(self.m[1][0]) * &v.x + r(self.m[1][1]) * &v.y,
        )
    }

    /// Solves `self · x = v` over `Q`.
    pub fn solve(&self, v: &Vec2) -> Result<Vec2> {
        let d = self.det();
        if d == 0 {
            return Err(Error::Degenerate("singular matrix".into()));
        }
        let d = rat_int(d);
        let r = |i: i64| rat_int(i);
        Ok(Vec2::new(
            (r(self.m[1][1]) * &v.x - r(self.m[0][1]) * &v.y) / &d,
            (r(self.m[0][0]) * &v.y - r(self.m[1][0]) * &v.x) / &d,
        ))
    }

    /// True iff some power `Mⁿ`, `n ≤ 8`, is entrywise strictly positive or
    /// strictly negative.
    pub fn is_primitive(&self) -> bool {
        let mut p = *self;
        for _ in 0..8 {
            let e = p.entries();
            if e.iter().all(|&x| x > 0) || e.iter().all(|&x| x < 0) {
                return true;
            }
            if e.iter().any(|x| x.abs() > 1 << 28) {
                return false;
            }
            p = p.mul(self);
        }
        false
    }
}

impl fmt::Display for UniMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1])
    }
}

/// Eigen-data of a matrix: the two projections in `Q[λ]`.
#[derive(Clone, Debug)]
pub struct Projection {
    matrix: UniMatrix,
    field: QuadField,
    y2: QfNum,
    c: QfNum,
}

impl Projection {
    pub fn new(matrix: UniMatrix) -> Result<Self> {
        let det = matrix.det();
        if det != 1 && det != -1 {
            return Err(Error::NotUnimodular(det));
        }
        let field = QuadField::new(matrix.trace(), det)
            .map_err(|e| Error::Degenerate(format!("{matrix}: {e}")))?;
        if matrix.trace() <= 0 {
            return Err(Error::Precondition(format!(
                "{matrix} has a negative expanding eigenvalue; use −M instead"
            )));
        }
        if !matrix.is_primitive() {
            return Err(Error::NotPrimitive);
        }
        let [m11, m12, m21, _] = matrix.entries();
        if m12 == 0 || m21 == 0 {
            return Err(Error::Degenerate("eigendirection parallel to a coordinate axis".into()));
        }
        let lam = field.lambda();
        let lt = field.contracting();
        let y2 = field.int(m12).checked_div(&(&lam - &field.int(m11)))?;
        let c = field.int(-m12).checked_div(&(&lt - &field.int(m11)))?;
        Ok(Projection { matrix, field, y2, c })
    }

    pub fn matrix(&self) -> UniMatrix {
        self.matrix
    }

    pub fn field(&self) -> QuadField {
        self.field
    }

    pub fn det(&self) -> i64 {
        self.field.det()
    }

    pub fn lambda(&self) -> QfNum {
        self.field.lambda()
    }

    /// The contracting eigenvalue `λ̃ = det/λ`.
    pub fn lambda_tilde(&self) -> QfNum {
        self.field.contracting()
    }

    /// `(Π_Y(e₁), Π_Y(e₂))`.
    pub fn y_generators(&self) -> (QfNum, QfNum) {
        (self.field.int(-1), self.y2.clone())
    }

    /// `(Π_V(e₁), Π_V(e₂))`.
    pub fn v_generators(&self) -> (QfNum, QfNum) {
        (self.field.one(), self.c.clone())
    }

    pub fn y(&self, z: &Vec2) -> QfNum {
        self.y2.scale(&z.y).add_rational(&-z.x.clone())
    }

    pub fn v(&self, z: &Vec2) -> QfNum {
        self.c.scale(&z.y).add_rational(&z.x)
    }

    /// The unique `z ∈ Q²` with `Π_Y(z) = x`.
    pub fn y_preimage(&self, x: &QfNum) -> Vec2 {
        let zy = x.q() / self.y2.q();
        let zx = &zy * self.y2.p() - x.p();
        Vec2::new(zx, zy)
    }

    /// The unique `z ∈ Q²` with `Π_V(z) = x`.
    pub fn v_preimage(&self, x: &QfNum) -> Vec2 {
        let zy = x.q() / self.c.q();
        let zx = x.p() - &zy * self.c.p();
        Vec2::new(zx, zy)
    }

    /// Membership of `x` in the module `Π_Y(Z²)`.
    pub fn in_y_module(&self, x: &QfNum) -> bool {
        self.y_preimage(x).is_integral()
    }

    /// `Π_Y(z) + Π_V(z)` depends only on `z.y`; this is its coefficient.
    fn sheer(&self) -> QfNum {
        &self.y2 + &self.c
    }
}

/// Which end of a half-open interval is included.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Closure {
    #[default]
    Left,
    Right,
}

impl Closure {
    pub fn flip(self) -> Closure {
        match self {
            Closure::Left => Closure::Right,
            Closure::Right => Closure::Left,
        }
    }

    pub fn parse(s: &str) -> Result<Closure> {
        match s {
            "left" => Ok(Closure::Left),
            "right" => Ok(Closure::Right),
            _ => Err(Error::Parse(format!("closure must be left or right, got {s:?}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Closure::Left => "left",
            Closure::Right => "right",
        }
    }
}

/// A half-open interval `[lo, hi)` or `(lo, hi]` of `Q[λ]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: QfNum,
    pub hi: QfNum,
    pub closure: Closure,
}

impl Interval {
    pub fn new(lo: QfNum, hi: QfNum, closure: Closure) -> Self {
        Interval { lo, hi, closure }
    }

    pub fn len(&self) -> QfNum {
        &self.hi - &self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }

    pub fn contains(&self, y: &QfNum) -> bool {
        match self.closure {
            Closure::Left => self.lo <= *y && *y < self.hi,
            Closure::Right => self.lo < *y && *y <= self.hi,
        }
    }

    pub fn translate(&self, d: &QfNum) -> Interval {
        Interval::new(&self.lo + d, &self.hi + d, self.closure)
    }

    /// `{x·k + d : x ∈ self}`; a negative factor reverses the closure.
    pub fn affine(&self, k: &QfNum, d: &QfNum) -> Interval {
        let a = &(&self.lo * k) + d;
        let b = &(&self.hi * k) + d;
        if k.is_negative() {
            Interval::new(b, a, self.closure.flip())
        } else {
            Interval::new(a, b, self.closure)
        }
    }

    /// Set containment honouring both closures.
    pub fn contains_interval(&self, o: &Interval) -> bool {
        if o.is_empty() {
            return true;
        }
        let left_ok = if o.closure == Closure::Left && self.closure == Closure::Right {
            o.lo > self.lo
        } else {
            o.lo >= self.lo
        };
        let right_ok = if o.closure == Closure::Right && self.closure == Closure::Left {
            o.hi < self.hi
        } else {
            o.hi <= self.hi
        };
        left_ok && right_ok
    }

    /// Containment of closures, ignoring which endpoints are included.
    pub fn contains_closure_of(&self, o: &Interval) -> bool {
        o.lo >= self.lo && o.hi <= self.hi
    }

    /// Intersection of two intervals with the same closure.
    pub fn intersect(&self, o: &Interval) -> Interval {
        debug_assert_eq!(self.closure, o.closure);
        let lo = if self.lo >= o.lo { self.lo.clone() } else { o.lo.clone() };
        let hi = if self.hi <= o.hi { self.hi.clone() } else { o.hi.clone() };
        Interval::new(lo, hi, self.closure)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.closure {
            Closure::Left => write!(f, "[{}, {})", self.lo, self.hi),
            Closure::Right => write!(f, "({}, {}]", self.lo, self.hi),
        }
    }
}

/// Window vector `l`, base `t` and closure of a window `Π_Y(t) + [0, Π_Y(l))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WindowSpec {
    pub l: Vec2,
    pub t: Vec2,
    pub closure: Closure,
}

impl WindowSpec {
    pub fn new(l: Vec2) -> Self {
        WindowSpec { l, t: Vec2::zero(), closure: Closure::Left }
    }

    pub fn with_base(mut self, t: Vec2) -> Self {
        self.t = t;
        self
    }

    pub fn with_closure(mut self, closure: Closure) -> Self {
        self.closure = closure;
        self
    }
}

/// The staircase steps of a window.
///
/// `up` is the step with positive `Π_Y`, `down` the one with negative `Π_Y`.
/// Since `Π_Y(e₁) = −1`, `down` plays the role of the horizontal step `a`
/// and `up` the vertical step `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepSet {
    pub up: Vec2,
    pub down: Vec2,
    pub has_middle: bool,
}

impl StepSet {
    pub fn a(&self) -> &Vec2 {
        &self.down
    }

    pub fn b(&self) -> &Vec2 {
        &self.up
    }

    pub fn c(&self) -> Vec2 {
        &self.up + &self.down
    }
}

/// The minimal-`Π_V` steps on each side, by an exact scan over the second
/// coordinate.
///
/// `Π_V(z) = z.y·k − Π_Y(z)` with `k = y₂ + c`, so a candidate with
/// `|Π_Y(z)| < L` has `Π_V(z) > z.y·k − L`; the scan moves away from zero
/// until that lower bound exceeds both incumbents.
pub fn compute_steps(proj: &Projection, l: &Vec2) -> Result<StepSet> {
    let f = proj.field();
    let len = proj.y(l);
    if !len.is_positive() {
        return Err(Error::DegenerateWindow(format!("Π_Y(l) = {len} is not positive")));
    }
    let k = proj.sheer();
    let dir: i64 = if k.is_positive() { 1 } else { -1 };
    let kk = k.abs();
    // Smallest |z.y| (in direction dir) with z.y·k + L > 0.
    let start = {
        let b: BigInt = (-&len).checked_div(&kk)?.floor() + 1;
        b * BigInt::from(dir)
    };
    let (y2, c) = (proj.y2.clone(), proj.c.clone());
    let mut best_up: Option<(QfNum, Vec2)> = None;
    let mut best_down: Option<(QfNum, Vec2)> = None;
    let mut zy = start;
    loop {
        let zyr = BigRational::from_integer(zy.clone());
        let lower = &kk.scale(&(&zyr * rat_int(dir))) - &len;
        let done = |b: &Option<(QfNum, Vec2)>| b.as_ref().is_some_and(|(v, _)| lower >= *v);
        if done(&best_up) && done(&best_down) {
            break;
        }
        let yy = y2.scale(&zyr);
        let neg_vc = -c.scale(&zyr);
        // up: Π_Y ∈ (0, L)  ⟺  z.x ∈ (z.y·y₂ − L, z.y·y₂)
        // down: Π_Y ∈ (−L, 0) ⟺  z.x ∈ (z.y·y₂, z.y·y₂ + L)
        for (lo, hi, best) in [
            (&yy - &len, yy.clone(), &mut best_up),
            (yy.clone(), &yy + &len, &mut best_down),
        ] {
            let from = if lo >= neg_vc { lo } else { neg_vc.clone() };
            let zx: BigInt = from.floor() + 1;
            let zxq = f.rational(BigRational::from_integer(zx.clone()));
            if zxq >= hi {
                continue;
            }
            let z = Vec2::new(BigRational::from_integer(zx), zyr.clone());
            let v = proj.v(&z);
            debug_assert!(v.is_positive());
            if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
                *best = Some((v, z));
            }
        }
        zy += dir;
    }
    let (_, up) = best_up.ok_or_else(|| Error::Invariant("no up step".into()))?;
    let (_, down) = best_down.ok_or_else(|| Error::Invariant("no down step".into()))?;
    let span = &proj.y(&up) - &proj.y(&down);
    let has_middle = match span.cmp(&len) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Equal => false,
        std::cmp::Ordering::Less => {
            return Err(Error::Invariant(format!("steps span {span} shorter than window {len}")));
        }
    };
    Ok(StepSet { up, down, has_middle })
}

/// `Π_Y(l)` must be positive; returns it.
pub fn window_length(proj: &Projection, l: &Vec2) -> Result<QfNum> {
    let len = proj.y(l);
    if len.is_positive() {
        Ok(len)
    } else {
        Err(Error::DegenerateWindow(format!("Π_Y(l) = {len} is not positive")))
    }
}

/// Least common multiple of the denominators of all given vectors.
pub fn lcm_denominators<'a>(vs: impl IntoIterator<Item = &'a Vec2>) -> BigInt {
    vs.into_iter().fold(BigInt::one(), |acc, v| acc.lcm(&v.denominator()))
}
