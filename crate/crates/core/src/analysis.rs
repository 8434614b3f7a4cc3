//! Locality of substitution rules and substitution-fixed tilings.

use std::collections::BTreeSet;
use std::fmt;

use serde_json::{json, Value};

use crate::lattice::{Closure, UniMatrix, Vec2};
use crate::quadfield::QfNum;
use crate::staircase::{Patch, StripPoint, Tiling};
use crate::substitution::{apply_rule, Derivation, SubstitutionRule};
use crate::{Error, Result};

/// The lattice conditions under which a rule is local.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LocalityCase {
    /// `l ∈ Z²` and `s ∈ Z²`.
    Window,
    /// `l − Ml ∈ Z²` and `s ∈ Z²`.
    Difference,
    /// `l + Ml ∈ Z²` and `s ∈ Z² + l`.
    Sum,
}

impl LocalityCase {
    pub fn name(self) -> &'static str {
        match self {
            LocalityCase::Window => "l∈Z², s∈Z²",
            LocalityCase::Difference => "l−Ml∈Z², s∈Z²",
            LocalityCase::Sum => "l+Ml∈Z², s∈Z²+l",
        }
    }
}

impl fmt::Display for LocalityCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalityReport {
    pub local: bool,
    /// Every lattice condition that holds, in declaration order.
    pub cases: Vec<LocalityCase>,
    pub d_plus: QfNum,
    pub d_minus: QfNum,
    /// Verdict of the gap conditions on `d₊`, `d₋` and `|Ω|`.
    pub gap_local: bool,
    /// Whether every boundary orbit point lies in `Z² ∪ (Z² + l)`.
    pub orbit_local: bool,
}

impl LocalityReport {
    pub fn case(&self) -> Option<LocalityCase> {
        self.cases.first().copied()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "verdict": if self.local { "local" } else { "nonlocal" },
            "case": self.case().map(LocalityCase::name),
            "cases": self.cases.iter().map(|c| c.name()).collect::<Vec<_>>(),
            "d_plus": self.d_plus.to_repr(),
            "d_minus": self.d_minus.to_repr(),
        })
    }
}

fn lattice_cases(matrix: &UniMatrix, l: &Vec2, s: &Vec2) -> Vec<LocalityCase> {
    let ml = matrix.apply(l);
    let mut out = Vec::new();
    if l.is_integral() && s.is_integral() {
        out.push(LocalityCase::Window);
    }
    if (l - &ml).is_integral() && s.is_integral() {
        out.push(LocalityCase::Difference);
    }
    if (l + &ml).is_integral() && (s - l).is_integral() {
        out.push(LocalityCase::Sum);
    }
    out
}

/// Decides locality three ways and fails if they disagree.
///
/// With `𝕄 = Π_Y(Z²)` the gap test for `det M = 1` asks for
/// `(1 − λ̃)|Ω|, d₊, d₋ ∈ 𝕄` or `(1 + λ̃)|Ω|, d₊ − |Ω|, d₋ − |Ω| ∈ 𝕄`;
/// for `det M = −1` the shifted and unshifted gaps trade places.
pub fn locality_classify(matrix: UniMatrix, l: &Vec2, s: &Vec2) -> Result<LocalityReport> {
    let der = Derivation::new(matrix, l, s)?;
    classify_derivation(&der)
}

pub fn classify_derivation(der: &Derivation) -> Result<LocalityReport> {
    let tiling = &der.tiling;
    let proj = tiling.projection();
    let w = tiling.window();
    let cases = lattice_cases(&proj.matrix(), &w.l, &der.sub.s);

    let len = tiling.window_length();
    let lt = proj.lambda_tilde();
    let one = proj.field().one();
    let m = |x: &QfNum| proj.in_y_module(x);
    let (dp, dm) = (&der.sub.d_plus, &der.sub.d_minus);
    let shrink = m(&(&(&one - &lt) * &len));
    let grow = m(&(&(&one + &lt) * &len));
    let plain = m(dp) && m(dm);
    let shifted = m(&(dp - &len)) && m(&(dm - &len));
    let gap_local = if proj.det() > 0 {
        (shrink && plain) || (grow && shifted)
    } else {
        (shrink && shifted) || (grow && plain)
    };

    let orbit_local = der.g_set()?.iter().all(|y| m(y) || m(&(y - &len)));

    let lattice_local = !cases.is_empty();
    if lattice_local != gap_local || lattice_local != orbit_local {
        return Err(Error::Invariant(format!(
            "locality tests disagree: lattice {lattice_local}, gaps {gap_local}, orbits {orbit_local}"
        )));
    }
    Ok(LocalityReport {
        local: lattice_local,
        cases,
        d_plus: dp.clone(),
        d_minus: dm.clone(),
        gap_local,
        orbit_local,
    })
}

/// A window base whose tiling is fixed, up to translation, by the rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedBase {
    /// Representative in `[0, 1)²`.
    pub t: Vec2,
    /// Whether a lattice point sits on the window boundary.
    pub singular: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedTilingReport {
    /// `None` when the configuration cannot occur.
    pub count: Option<usize>,
    /// `|det(M − I)|`.
    pub det_m_minus_i: i64,
    pub fixed_bases: Vec<FixedBase>,
    /// The invariant window interval (half-line analysis only).
    pub iwi: Option<(QfNum, QfNum)>,
}

impl FixedTilingReport {
    pub fn to_json(&self) -> Value {
        json!({
            "count": self.count,
            "det_m_minus_i": self.det_m_minus_i,
            "fixed_bases": self.fixed_bases.iter().map(|b| json!({
                "t": b.t.to_strings(),
                "singular": b.singular,
            })).collect::<Vec<_>>(),
            "iwi": self.iwi.as_ref().map(|(lo, hi)| json!({"lo": lo.to_repr(), "hi": hi.to_repr()})),
        })
    }
}

fn is_singular(t: &Vec2, l: &Vec2) -> bool {
    t.is_integral() || (t + l).is_integral()
}

/// The classes `t mod Z²` with `(M − I)t ≡ s`.
pub fn fixed_base_classes(matrix: &UniMatrix, s: &Vec2) -> Result<Vec<Vec2>> {
    let a = matrix.sub_identity();
    let d = a.det().abs();
    if d == 0 {
        return Err(Error::Degenerate("1 is an eigenvalue".into()));
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    'outer: for i in 0..d {
        for j in 0..d {
            let t = a.solve(&(s + &Vec2::int(i, j)))?.fract();
            if seen.insert(t.to_strings()) {
                out.push(t);
                if out.len() as i64 == d {
                    break 'outer;
                }
            }
        }
    }
    Ok(out)
}

/// Counts tilings of the line fixed by the rule of `(M, l, s)`.
///
/// Each class `t` with `(M − I)t ≡ s` gives one tiling, or two if the
/// window is singular and `det M = 1`, or none if singular and
/// `det M = −1` (the substitution swaps the two closures).
pub fn count_fixed_line(matrix: UniMatrix, l: &Vec2, s: &Vec2) -> Result<FixedTilingReport> {
    let d = matrix.sub_identity().det().abs();
    let bases: Vec<FixedBase> = fixed_base_classes(&matrix, s)?
        .into_iter()
        .map(|t| FixedBase { singular: is_singular(&t, l), t })
        .collect();
    let det = matrix.det();
    let count = bases
        .iter()
        .map(|b| match (b.singular, det > 0) {
            (false, _) => 1,
            (true, true) => 2,
            (true, false) => 0,
        })
        .sum();
    Ok(FixedTilingReport { count: Some(count), det_m_minus_i: d, fixed_bases: bases, iwi: None })
}

/// The closed-form line count: `|det(M − I)|`, adjusted by `det M` when
/// `s ∈ Z² ∪ (Z² − (M − I)l)`.
pub fn table_count_line(matrix: &UniMatrix, l: &Vec2, s: &Vec2) -> usize {
    let d = matrix.sub_identity().det().unsigned_abs() as usize;
    let shifted = s + &matrix.sub_identity().apply(l);
    if s.is_integral() || shifted.is_integral() {
        if matrix.det() > 0 {
            d + 1
        } else {
            d - 1
        }
    } else {
        d
    }
}

/// Counts tilings of `[0, ∞)` with a vertex at `0` fixed by the rule.
///
/// The window base is pinned to `t = (M − I)⁻¹s`, whose window is the
/// invariant window interval. A lattice point on its boundary only
/// separates the two closures if it projects into the half-line.
pub fn count_fixed_halfline(matrix: UniMatrix, l: &Vec2, s: &Vec2) -> Result<FixedTilingReport> {
    let der = Derivation::new(matrix, l, s)?;
    let proj = der.projection();
    let d = matrix.sub_identity().det().abs();
    let t = matrix.sub_identity().solve(s)?;
    let lo = proj.y(&t);
    let hi = &lo + &der.tiling.window_length();
    let tl = &t + l;
    let singular = is_singular(&t, l);
    let det = matrix.det();
    let count = if t == Vec2::zero() || tl == Vec2::zero() {
        (det > 0).then_some(1)
    } else if singular {
        let visible = [&t, &tl].into_iter().any(|z| z.is_integral() && proj.v(z).is_positive());
        Some(match (visible, det > 0) {
            (false, _) => 1,
            (true, true) => 2,
            (true, false) => 0,
        })
    } else {
        Some(1)
    };
    Ok(FixedTilingReport {
        count,
        det_m_minus_i: d,
        fixed_bases: vec![FixedBase { t, singular }],
        iwi: Some((lo, hi)),
    })
}

/// Whether the vertices of `patch`, shifted by `−delta`, are consecutive
/// vertices of `tiling`.
pub fn patch_occurs_at(tiling: &Tiling, patch: &Patch, delta: &QfNum) -> bool {
    let proj = tiling.projection();
    let mut prev: Option<StripPoint> = None;
    for x in patch.vertices() {
        let z = proj.v_preimage(&(&x - delta));
        if !z.is_integral() {
            return false;
        }
        let Ok(p) = tiling.point(z) else { return false };
        if let Some(q) = &prev {
            if tiling.phi(q).z != p.z {
                return false;
            }
        }
        prev = Some(p);
    }
    true
}

/// The substituted image of a patch of `𝒯_{l,t}` (with the given closure)
/// around the origin, `radius` tiles to each side.
pub fn substituted_patch(der: &Derivation, rule: &SubstitutionRule, t: &Vec2, closure: Closure, radius: usize) -> Result<(Tiling, Patch)> {
    let tiling = der.tiling.rebase(t.clone(), closure);
    let seed = tiling.find_strip_point()?;
    let patch = tiling.generate_patch(&seed, radius, radius, Some(&rule.partition));
    Ok((tiling, apply_rule(rule, &patch)?))
}

/// Checks a fixed base: `σ` maps a patch of `𝒯_{l,t}` onto `𝒯_{l,t}`
/// translated by `Π_V((M − I)t − s)`.
pub fn verify_fixed_base(der: &Derivation, rule: &SubstitutionRule, t: &Vec2, closure: Closure, radius: usize) -> Result<bool> {
    let m = der.projection().matrix();
    let n = &m.sub_identity().apply(t) - &der.sub.s;
    if !n.is_integral() {
        return Ok(false);
    }
    let (tiling, img) = substituted_patch(der, rule, t, closure, radius)?;
    Ok(patch_occurs_at(&tiling, &img, &der.projection().v(&n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::rat;

    fn v(x: (i64, i64), y: (i64, i64)) -> Vec2 {
        Vec2::new(rat(x.0, x.1), rat(y.0, y.1))
    }

    #[test]
    fn worked_example_is_local() {
        let r = locality_classify(UniMatrix::new(2, 1, 1, 1), &Vec2::int(-2, 2), &Vec2::int(-1, 0)).unwrap();
        assert!(r.local);
        assert!(r.cases.contains(&LocalityCase::Difference));
    }

    #[test]
    fn fibonacci_centered_is_nonlocal() {
        let r = locality_classify(UniMatrix::new(1, 1, 1, 0), &Vec2::int(-1, 1), &v((-1, 2), (1, 1))).unwrap();
        assert!(!r.local);
        assert_eq!(r.d_plus, r.d_minus);
        assert_eq!(r.d_plus, r.d_plus.field().rational(rat(1, 2)));
    }

    #[test]
    fn fibonacci_standard_is_local() {
        let r = locality_classify(UniMatrix::new(1, 1, 1, 0), &Vec2::int(-1, 1), &Vec2::int(-1, 1)).unwrap();
        assert!(r.local);
        assert_eq!(r.case(), Some(LocalityCase::Window));
    }

    #[test]
    fn fixed_line_counts() {
        let m = UniMatrix::new(2, 1, 1, 1);
        let r = count_fixed_line(m, &Vec2::int(-2, 2), &Vec2::int(-1, 0)).unwrap();
        assert_eq!(r.count, Some(2));
        assert_eq!(table_count_line(&m, &Vec2::int(-2, 2), &Vec2::int(-1, 0)), 2);
        let f = UniMatrix::new(1, 1, 1, 0);
        let r = count_fixed_line(f, &Vec2::int(-1, 1), &Vec2::int(-1, 1)).unwrap();
        assert_eq!(r.count, Some(0));
        let r = count_fixed_line(f, &Vec2::int(-1, 1), &v((-1, 2), (1, 1))).unwrap();
        assert_eq!(r.count, Some(1));
    }

    #[test]
    fn fixed_bases_satisfy_congruence() {
        let m = UniMatrix::new(1, 1, 2, 1);
        let s = v((-1, 2), (1, 1));
        for t in fixed_base_classes(&m, &s).unwrap() {
            assert!((&m.sub_identity().apply(&t) - &s).is_integral());
        }
        assert_eq!(fixed_base_classes(&m, &s).unwrap().len(), 2);
    }

    #[test]
    fn fixed_bases_verify_by_patches() {
        let m = UniMatrix::new(2, 1, 1, 1);
        let der = Derivation::new(m, &Vec2::int(-2, 2), &Vec2::int(-1, 0)).unwrap();
        let rule = der.rule().unwrap();
        for b in count_fixed_line(m, &Vec2::int(-2, 2), &Vec2::int(-1, 0)).unwrap().fixed_bases {
            for c in [Closure::Left, Closure::Right] {
                assert!(verify_fixed_base(&der, &rule, &b.t, c, 6).unwrap());
            }
        }
    }

    #[test]
    fn halfline_iwi_contains_origin() {
        let m = UniMatrix::new(2, 1, 1, 1);
        let r = count_fixed_halfline(m, &Vec2::int(-2, 2), &v((-1, 2), (0, 1))).unwrap();
        let (lo, hi) = r.iwi.unwrap();
        assert!(!lo.is_positive() && !hi.is_negative());
    }
}
