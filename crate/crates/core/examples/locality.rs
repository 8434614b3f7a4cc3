// Local and nonlocal rules: the lattice test, the gap test and the orbit
// test side by side.

use tilingforge::analysis::locality_classify;
use tilingforge::cli::all_admissible;
use tilingforge::lattice::{UniMatrix, Vec2, WindowSpec};
use tilingforge::quadfield::rat;
use tilingforge::{derive_rule, Tiling};

pub fn run() -> tilingforge::Result<()> {
    let fib = UniMatrix::new(1, 1, 1, 0);
    // Any subwindow of a window of length 1/3 gives a nonlocal rule.
    let short = Vec2::new(rat(-1, 3), rat(0, 1));
    let first_fit = all_admissible(&Tiling::new(fib, WindowSpec::new(short.clone()))?, 3, 3)
        .map_err(|f| tilingforge::Error::Invariant(f.message))?
        .remove(0)
        .s;
    let cases = [
        ("worked example", UniMatrix::new(2, 1, 1, 1), Vec2::int(-2, 2), Vec2::int(-1, 0)),
        ("Fibonacci", fib, Vec2::int(-1, 1), Vec2::int(-1, 1)),
        ("Fibonacci, centered", fib, Vec2::int(-1, 1), Vec2::new(rat(-1, 2), rat(1, 1))),
        ("short window", fib, short, first_fit),
    ];
    for (name, m, l, s) in cases {
        let Ok(rule) = derive_rule(m, &l, &s) else {
            println!("{name}: subwindow does not fit");
            continue;
        };
        let r = locality_classify(m, &l, &s)?;
        let verdict = match r.case() {
            Some(c) => format!("local ({})", c.name()),
            None => "nonlocal".into(),
        };
        println!("{name}: {rule}");
        println!("    {verdict}; d₊ = {}, d₋ = {}", r.d_plus, r.d_minus);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> tilingforge::Result<()> {
    run()
}
