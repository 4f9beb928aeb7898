//! Exact sensitive-region count of a generated ensemble with the monolithic
//! diagram and with the exact mask-pair merge.
//!
//! cargo run --release --example exact_count -- [trees] [guards-per-feature]

use std::time::Instant;

use treesens::dd::Limits;
use treesens::exact::{exact_count_with, ExactQuery};
use treesens::gen::{generate, GenParams};
use treesens::xcount::exact_merge;

fn main() -> treesens::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("numeric argument"));
    let p = GenParams {
        trees: args.next().unwrap_or(20),
        depth: 4,
        features: 6,
        guards_per_feature: args.next().unwrap_or(3),
        seed: 7,
        ..GenParams::default()
    };
    let e = generate(&p)?.quantize_leaves(3)?;
    let gap = 500; // 0.5 at three decimals

    let t = Instant::now();
    let r = exact_count_with(&e, &ExactQuery::new([0, 1], 1, gap), Limits::default())?;
    println!("exact-add:          {} ({} nodes, {:?})", r.count, r.num_nodes, t.elapsed());

    let t = Instant::now();
    let m = exact_merge(&e, &[0, 1], 1, gap)?;
    println!("xcount-exact-merge: {m} ({:?})", t.elapsed());
    Ok(())
}
