//! Writes a small corpus of random ensembles to a directory.
//!
//! cargo run --example generate_corpus -- /tmp/corpus 10

use std::path::PathBuf;

use treesens::gen::{generate, GenParams};
use treesens::model::to_json;

fn main() -> treesens::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "corpus".into()));
    let n: u64 = args.next().map_or(10, |s| s.parse().expect("instance count"));
    std::fs::create_dir_all(&dir)?;
    for seed in 0..n {
        let p = GenParams {
            trees: 4 + seed as usize % 8,
            depth: 3,
            features: 5,
            guards_per_feature: 2 + seed as usize % 3,
            seed,
            ..GenParams::default()
        };
        let path = dir.join(format!("t{}_g{}_s{seed}.json", p.trees, p.guards_per_feature));
        std::fs::write(&path, to_json(&generate(&p)?))?;
        println!("{}", path.display());
    }
    Ok(())
}
