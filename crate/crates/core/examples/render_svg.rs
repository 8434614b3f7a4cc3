// Writes the staircase, the labelled window and a patch of the Fibonacci
// tiling as SVG files into a directory (default: the system temp dir).
//
// cargo run --example render_svg -- out/

use std::path::PathBuf;

use tilingforge::lattice::{UniMatrix, Vec2, WindowSpec};
use tilingforge::quadfield::rat;
use tilingforge::render::{render_partition, render_patch, render_staircase};
use tilingforge::{derive_rule, LabelStyle, Tiling};

pub fn run_in(dir: PathBuf) -> tilingforge::Result<Vec<PathBuf>> {
    let m = UniMatrix::new(1, 1, 1, 0);
    let l = Vec2::int(-1, 1);
    let tiling = Tiling::new(m, WindowSpec::new(l.clone()))?;
    let rule = derive_rule(m, &l, &Vec2::new(rat(-1, 2), rat(1, 1)))?;
    let seed = tiling.find_strip_point()?;
    let patch = tiling.generate_patch(&seed, 0, 21, Some(&rule.partition));

    let files = [
        ("staircase.svg", render_staircase(&tiling, 21)?),
        ("partition.svg", render_partition(&tiling, Some(&rule.partition), LabelStyle::Letters)),
        ("patch.svg", render_patch(&patch, LabelStyle::Letters)),
    ];
    std::fs::create_dir_all(&dir).map_err(|e| tilingforge::Error::Parse(e.to_string()))?;
    let mut written = Vec::new();
    for (name, svg) in files {
        let path = dir.join(name);
        std::fs::write(&path, svg).map_err(|e| tilingforge::Error::Parse(e.to_string()))?;
        println!("wrote {}", path.display());
        written.push(path);
    }
    Ok(written)
}

pub fn run() -> tilingforge::Result<()> {
    run_in(std::env::temp_dir().join("tilingforge-svg")).map(|_| ())
}

#[allow(dead_code)]
fn main() -> tilingforge::Result<()> {
    match std::env::args().nth(1) {
        Some(d) => run_in(d.into()).map(|_| ()),
        None => run(),
    }
}
