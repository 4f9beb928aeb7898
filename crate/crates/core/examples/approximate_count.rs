//! Streaming (ε, δ) estimate next to the exact count, over a handful of
//! seeds.

use treesens::dd::Limits;
use treesens::gen::{generate, GenParams};
use treesens::xcount::{exact_merge, xcount, XcountQuery};

fn main() -> treesens::Result<()> {
    let p = GenParams {
        trees: 10,
        depth: 4,
        features: 6,
        guards_per_feature: 4,
        decimals: 2,
        seed: 0,
        ..GenParams::default()
    };
    let e = generate(&p)?.quantize_leaves(2)?;
    let (s, d, gap) = ([0usize], 1, 20);
    let exact = exact_merge(&e, &s, d, gap)?;
    println!("exact count {exact}");
    for seed in 0..8 {
        let q = XcountQuery::new(s, d, gap).accuracy(0.1, 0.1).seed(seed);
        let r = xcount(&e, &q, Limits::default())?;
        println!(
            "seed {seed}: estimate {:>8.0}  p = {:<10}  ({} of {} mask pairs satisfiable, thresh {:.1})",
            r.estimate,
            r.final_p,
            r.sat_subproblems,
            r.num_subproblems,
            r.thresh.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
