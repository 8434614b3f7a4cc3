// Inverting a rule as an automorphism of the free group on its labels.

use tilingforge::freegroup::{find_inverse, verify_inverse, FreeMorphism, NotFound};
use tilingforge::lattice::{UniMatrix, Vec2};
use tilingforge::quadfield::rat;
use tilingforge::derive_rule;

pub fn run() -> tilingforge::Result<()> {
    let m = UniMatrix::new(1, 1, 2, 1);
    let rule = derive_rule(m, &Vec2::int(-1, 1), &Vec2::new(rat(-1, 2), rat(1, 1)))?;
    let sigma = FreeMorphism::from_rule(&rule);
    println!("σ   = {sigma}");

    match find_inverse(&sigma, 10_000) {
        Ok(inv) => {
            println!("σ⁻¹ = {inv}");
            println!("σ∘σ⁻¹ = id: {}", sigma.compose(&inv).is_identity());
        }
        Err(NotFound::NotUnimodular(d)) => println!("abelianization has determinant {d}"),
        Err(NotFound::BudgetExhausted) => println!("no inverse found within the budget"),
    }

    let printed = FreeMorphism::parse(&[("a", "b2a^-1b1"), ("b1", "ab2^-1"), ("b2", "b1^-1a")])?;
    println!("printed inverse checks: {}", verify_inverse(&sigma, &printed));
    Ok(())
}

#[allow(dead_code)]
fn main() -> tilingforge::Result<()> {
    run()
}
