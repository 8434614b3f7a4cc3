// Renormalizing interval exchanges: the golden rotation, and the exchange
// read off a tiling, whose renormalization reproduces the tiling's rule.

use tilingforge::iet::{check_renorm_conditions, iet_f_ab, iet_from_tiling, renormalize_with_suspension};
use tilingforge::lattice::{UniMatrix, Vec2, WindowSpec};
use tilingforge::quadfield::{rat, QuadField};
use tilingforge::{derive_rule, LabelStyle, Tiling};

pub fn run() -> tilingforge::Result<()> {
    let f = QuadField::golden();
    let a = f.element(rat(-1, 1), rat(1, 1));
    let lam = f.element(rat(1, 1), rat(-1, 1));
    let rotation = iet_f_ab(&a, &a)?;
    println!("f_ab with a = b = τ − 1: {}", rotation.to_json());
    println!("conditions hold: {}", check_renorm_conditions(&a, &a, &lam));
    let r = renormalize_with_suspension(&rotation, &f.element(rat(0, 1), rat(1, 2)), &lam)?;
    println!("{} (verified {}, {} rounds)", r.format(), r.verified, r.rounds);

    let m = UniMatrix::new(2, 1, 1, 1);
    let (l, s) = (Vec2::int(-2, 2), Vec2::int(-1, 0));
    let tiling = Tiling::new(m, WindowSpec::new(l.clone()))?;
    let proj = tiling.projection();
    let iet = iet_from_tiling(&tiling)?;
    let r = renormalize_with_suspension(&iet, &proj.y(&s), &proj.lambda_tilde())?;
    println!("from the tiling: {}", r.format());
    println!("derived rule:    {}", derive_rule(m, &l, &s)?.format(LabelStyle::Letters));
    Ok(())
}

#[allow(dead_code)]
fn main() -> tilingforge::Result<()> {
    run()
}
