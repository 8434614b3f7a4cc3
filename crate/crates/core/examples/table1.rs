// Reproduces the table of example rules and checks the printed inverses.

use tilingforge::cli::{run_row, TABLE1};

pub fn run() -> tilingforge::Result<()> {
    for (i, row) in TABLE1.iter().enumerate() {
        let r = run_row(row, row.rule, row.inverse).map_err(|f| tilingforge::Error::Invariant(f.message))?;
        println!("{}. M = {:?}, l = ({})", i + 1, row.matrix, row.l);
        println!("   {}", r.derived);
        println!("   words match: {}, inverse verified: {}", r.words_match, r.inverse_verified);
        if !r.identity_holds {
            println!("   note: the printed s₂ differs from s₁ − Ml");
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> tilingforge::Result<()> {
    run()
}
