#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use tilingforge::analysis::{patch_occurs_at, substituted_patch};
use tilingforge::cli::all_admissible;
use tilingforge::lattice::{Closure, UniMatrix, Vec2, WindowSpec};
use tilingforge::quadfield::rat;
use tilingforge::staircase::Tiling;
use tilingforge::substitution::Derivation;
use tilingforge::SubstitutionRule;

/// Primitive unimodular matrices with positive trace and no zero
/// off-diagonal entry.
pub const MATRICES: [[i64; 4]; 8] = [
    [1, 1, 1, 0],
    [2, 1, 1, 1],
    [1, 1, 2, 1],
    [2, 3, 1, 1],
    [1, 2, 1, 1],
    [1, 1, 1, 2],
    [2, 1, 1, 0],
    [3, 1, 2, 1],
];

pub const WINDOWS: [(i64, i64, i64, i64); 6] = [(-1, 1, 1, 1), (-2, 1, 2, 1), (-1, 2, 1, 1), (-1, 1, 1, 2), (0, 1, 1, 1), (-1, 1, 0, 1)];

pub fn matrix(e: [i64; 4]) -> UniMatrix {
    UniMatrix::new(e[0], e[1], e[2], e[3])
}

pub fn window((a, b, c, d): (i64, i64, i64, i64)) -> Vec2 {
    Vec2::new(rat(a, b), rat(c, d))
}

/// Every admissible `(M, l, s)` over the lists above, `s` with
/// denominators at most 2 and coordinates in `[−2, 2]`.
pub fn admissible_pool() -> Vec<SubstitutionRule> {
    let mut out = Vec::new();
    for m in MATRICES {
        for w in WINDOWS {
            let Ok(tiling) = Tiling::new(matrix(m), WindowSpec::new(window(w))) else { continue };
            if let Ok(rules) = all_admissible(&tiling, 2, 2) {
                out.extend(rules);
            }
        }
    }
    out
}

/// Counts tilings of the line fixed by the rule of `der`, by brute force.
///
/// Candidate window bases are the points of a grid fine enough to hold
/// every solution of `(M − I)t ≡ s (mod Z²)`. Each candidate, with
/// either closure, is kept if the substituted patch of radius `radius`
/// sits inside the same tiling at one of a box of translations. Kept
/// tilings are then merged when a long patch of one occurs in the other.
pub fn fixed_tiling_oracle(der: &Derivation, rule: &SubstitutionRule, radius: usize) -> usize {
    let proj = der.projection();
    let m = proj.matrix();
    let s = &der.sub.s;
    let d = m.sub_identity().det().abs();
    let n = (s.denominator() * BigInt::from(d)).to_i64().expect("small grid");
    let mut fixed: Vec<Tiling> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let t = Vec2::new(rat(i, n), rat(j, n));
            if !(&m.sub_identity().apply(&t) - s).is_integral() {
                continue;
            }
            for c in [Closure::Left, Closure::Right] {
                let (tiling, img) = substituted_patch(der, rule, &t, c, radius).expect("patch");
                let hit = (-6..=6).any(|a| (-6..=6).any(|b| patch_occurs_at(&tiling, &img, &proj.v(&Vec2::int(a, b)))));
                if hit {
                    fixed.push(tiling);
                }
            }
        }
    }
    let mut classes: Vec<Tiling> = Vec::new();
    for tiling in fixed {
        let seed = tiling.find_strip_point().expect("strip point");
        let p = tiling.generate_patch(&seed, 150, 150, None);
        let dup = classes
            .iter()
            .any(|other| (-4..=4).any(|a| (-4..=4).any(|b| patch_occurs_at(other, &p, &proj.v(&Vec2::int(a, b))))));
        if !dup {
            classes.push(tiling);
        }
    }
    classes.len()
}
