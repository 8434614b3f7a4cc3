// Tilings fixed by a rule: the per-class count, the closed form, and a
// patch check of every fixed base.

use tilingforge::analysis::{count_fixed_halfline, count_fixed_line, table_count_line, verify_fixed_base};
use tilingforge::lattice::{Closure, UniMatrix, Vec2};
use tilingforge::substitution::Derivation;

pub fn run() -> tilingforge::Result<()> {
    let m = UniMatrix::new(2, 1, 1, 1);
    let (l, s) = (Vec2::int(-2, 2), Vec2::int(-1, 0));
    let der = Derivation::new(m, &l, &s)?;
    let rule = der.rule()?;

    let line = count_fixed_line(m, &l, &s)?;
    println!("|det(M − I)| = {}", line.det_m_minus_i);
    println!("line: {:?} (closed form {})", line.count, table_count_line(&m, &l, &s));
    for b in &line.fixed_bases {
        let ok = [Closure::Left, Closure::Right]
            .into_iter()
            .map(|c| verify_fixed_base(&der, &rule, &b.t, c, 8))
            .collect::<tilingforge::Result<Vec<_>>>()?;
        println!("  t = {}, singular {}, patch check {ok:?}", b.t, b.singular);
    }

    let half = count_fixed_halfline(m, &l, &s)?;
    let (lo, hi) = half.iwi.clone().expect("half-line report has a window");
    let shown = half.count.map_or("-".to_string(), |c| c.to_string());
    println!("half-line: {shown}, invariant window [{lo}, {hi})");
    Ok(())
}

#[allow(dead_code)]
fn main() -> tilingforge::Result<()> {
    run()
}
