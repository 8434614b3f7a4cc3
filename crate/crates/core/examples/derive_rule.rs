// Derives the substitution rule of a subwindow and shows the labelled
// window partition it comes from.
//
// cargo run --example derive_rule

use tilingforge::lattice::{UniMatrix, Vec2};
use tilingforge::substitution::Derivation;
use tilingforge::LabelStyle;

pub fn run() -> tilingforge::Result<()> {
    let m = UniMatrix::new(2, 1, 1, 1);
    let der = Derivation::new(m, &Vec2::int(-2, 2), &Vec2::int(-1, 0))?;
    let rule = der.rule()?;

    println!("M = {m}, λ ≈ {:.6}", rule.lambda.to_f64());
    println!("window {}, subwindow {}", der.tiling.window_interval(), der.sub.interval);
    for (label, cell) in &rule.partition.cells {
        println!("  {:>5}  {cell}", label.display(LabelStyle::Steps, false));
    }
    println!("{}", rule.format(LabelStyle::Steps));
    println!("vertex hierarchic: {}", rule.is_vertex_hierarchic());
    Ok(())
}

#[allow(dead_code)]
fn main() -> tilingforge::Result<()> {
    run()
}
