//! Exhaustive region table as CSV on stdout.
//!
//! cargo run --example oracle_table -- model.json 0 80

use treesens::oracle::{oracle_count, write_region_table, DEFAULT_REGION_CAP};
use treesens::parse_ensemble;

fn main() -> treesens::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/two_trees.json").into());
    let feature: usize = args.next().map_or(0, |s| s.parse().expect("feature index"));
    let gap: i64 = args.next().map_or(80, |s| s.parse().expect("integer gap"));

    let e = parse_ensemble(&std::fs::read(&path)?)?.quantize_leaves(0)?;
    let r = oracle_count(&e, &[feature], 1, gap, DEFAULT_REGION_CAP)?;
    write_region_table(&r, std::io::stdout().lock())?;
    eprintln!("{} of {} regions sensitive", r.count, r.total_regions());
    Ok(())
}
