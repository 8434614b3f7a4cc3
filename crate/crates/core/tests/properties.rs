mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use tilingforge::lattice::{Closure, Vec2, WindowSpec};
use tilingforge::quadfield::{rat, QuadField};
use tilingforge::{LabelStyle, SubstitutionRule, Tiling};

use common::{admissible_pool, matrix, window, MATRICES, WINDOWS};

fn field() -> impl Strategy<Value = QuadField> {
    prop::sample::select(MATRICES.to_vec()).prop_map(|m| QuadField::new(m[0] + m[3], m[0] * m[3] - m[1] * m[2]).unwrap())
}

fn element(f: QuadField) -> impl Strategy<Value = tilingforge::QfNum> {
    (-40i64..=40, 1i64..=9, -40i64..=40, 1i64..=9).prop_map(move |(a, b, c, d)| f.element(rat(a, b), rat(c, d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    /// Away from zero a double evaluation cannot get the sign wrong.
    #[test]
    fn sign_agrees_with_float(x in field().prop_flat_map(element)) {
        let v = x.to_f64();
        if v.abs() > 1e-9 {
            prop_assert_eq!(x.signum(), if v > 0.0 { 1 } else { -1 });
        }
        prop_assert_eq!(x.signum() == 0, x.is_zero());
        prop_assert_eq!((&x - &x).signum(), 0);
    }

    #[test]
    fn field_axioms((x, y) in field().prop_flat_map(|f| (element(f), element(f)))) {
        prop_assert_eq!(&(&x + &y) - &y, x.clone());
        if !y.is_zero() {
            prop_assert_eq!(&(&x * &y) / &y, x.clone());
        }
        prop_assert_eq!(x.cmp(&y), (&x - &y).signum().cmp(&0));
        let (fx, fy) = (x.to_f64(), y.to_f64());
        prop_assert!(((&x * &y).to_f64() - fx * fy).abs() <= 1e-9 * (1.0 + (fx * fy).abs()));
    }

    /// `Φ` moves to the strip point with the next larger `Π_V`; checked
    /// against every lattice point in a box.
    #[test]
    fn step_is_minimal(m in 0..MATRICES.len(), w in 0..WINDOWS.len(), tx in -5i64..5, ty in -5i64..5, k in 0usize..20) {
        let Ok(tiling) = Tiling::new(
            matrix(MATRICES[m]),
            WindowSpec::new(window(WINDOWS[w])).with_base(Vec2::new(rat(tx, 3), rat(ty, 4))),
        ) else { return Ok(()) };
        let mut p = tiling.find_strip_point().unwrap();
        for _ in 0..k {
            p = tiling.phi(&p);
        }
        let proj = tiling.projection();
        let v0 = proj.v(&p.z);
        let r = 12;
        let mut best: Option<Vec2> = None;
        for i in -r..=r {
            for j in -r..=r {
                let z = &p.z + &Vec2::int(i, j);
                if !tiling.in_window(&proj.y(&z)) || proj.v(&z) <= v0 {
                    continue;
                }
                if best.as_ref().is_none_or(|b| proj.v(&z) < proj.v(b)) {
                    best = Some(z);
                }
            }
        }
        prop_assert_eq!(best, Some(tiling.phi(&p).z));
    }

    #[test]
    fn rule_json_round_trip(i in 0usize..10_000) {
        let pool = pool();
        let r = &pool[i % pool.len()];
        let text = serde_json::to_string_pretty(&r.to_json()).unwrap();
        let back = SubstitutionRule::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(serde_json::to_string_pretty(&back.to_json()).unwrap(), text);
        prop_assert_eq!(&back.words, &r.words);
    }
}

fn pool() -> &'static [SubstitutionRule] {
    static POOL: std::sync::OnceLock<Vec<SubstitutionRule>> = std::sync::OnceLock::new();
    POOL.get_or_init(admissible_pool)
}

fn factors(word: &[u8], n: usize) -> BTreeSet<Vec<u8>> {
    word.windows(n).map(<[u8]>::to_vec).collect()
}

/// The canonical Fibonacci tiling read as a word has exactly the factors
/// of the fixed point of `a → ab, b → a`, `n + 1` of each length `n`.
#[test]
fn fibonacci_tiling_is_the_fibonacci_word() {
    let mut fixed = b"a".to_vec();
    while fixed.len() < 20_000 {
        fixed = fixed.iter().flat_map(|&c| if c == b'a' { b"ab".to_vec() } else { b"a".to_vec() }).collect();
    }
    for closure in [Closure::Left, Closure::Right] {
        let tiling = Tiling::new(matrix([1, 1, 1, 0]), WindowSpec::new(Vec2::int(-1, 1)).with_closure(closure)).unwrap();
        let seed = tiling.find_strip_point().unwrap();
        let word: Vec<u8> = tiling.generate_patch(&seed, 1000, 1000, None).word(LabelStyle::Letters).into_bytes();
        for n in 1..=12 {
            let f = factors(&word, n);
            assert_eq!(f.len(), n + 1, "length {n}");
            assert_eq!(f, factors(&fixed, n), "length {n}");
        }
    }
}

/// The long Fibonacci tile has frequency `1/τ`.
#[test]
fn fibonacci_frequencies() {
    let tiling = Tiling::new(matrix([1, 1, 1, 0]), WindowSpec::new(Vec2::int(-1, 1))).unwrap();
    let seed = tiling.find_strip_point().unwrap();
    let patch = tiling.generate_patch(&seed, 0, 10_000, None);
    let shapes = patch.shapes();
    let long_shape = tiling.shapes().into_iter().max_by_key(|&s| tiling.length(s)).unwrap();
    let long = shapes.iter().filter(|&&s| s == long_shape).count();
    let tau = (1.0 + 5f64.sqrt()) / 2.0;
    assert!((long as f64 / shapes.len() as f64 - 1.0 / tau).abs() < 1e-3);
}
