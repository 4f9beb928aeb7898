//! Walks the two-tree toy model through every stage: guard table, region
//! values, mask pairs, per-pair solutions, and the final counts.

use treesens::dd::{Limits, VarId};
use treesens::oracle::{oracle_count, DEFAULT_REGION_CAP};
use treesens::xcount::{enumerate_subproblems, global_mask_set, xcount, MergeMode, SensitiveSet, SubproblemEngine, XcountQuery};
use treesens::{parse_ensemble, GuardTable};

const MODEL: &str = include_str!("../tests/fixtures/two_trees.json");

fn main() -> treesens::Result<()> {
    let e = parse_ensemble(MODEL.as_bytes())?.quantize_leaves(0)?;
    let gt = GuardTable::build(&e);
    for f in 0..gt.num_features() {
        println!("feature {f}: thresholds {:?}", gt.thresholds(f));
    }

    let (sensitive, d, gap) = (vec![0], 1, 80);
    let truth = oracle_count(&e, &sensitive, d, gap, DEFAULT_REGION_CAP)?;
    println!("\n{} valid regions:", truth.total_regions());
    for (b, v) in &truth.region_values {
        let mark = if truth.sensitive_regions.contains(b) { "  sensitive" } else { "" };
        println!("  {} -> {v:>4}{mark}", b.to_bit_string());
    }

    let masks = global_mask_set(&gt, &sensitive);
    let set = SensitiveSet::new(&gt, &sensitive);
    let mut engine = SubproblemEngine::new(&e, &gt, &set, gap, Limits::default());
    println!("\nmask pairs at distance 1..={d}:");
    for sp in enumerate_subproblems(&masks, d) {
        let phi = engine.process(&sp)?;
        let rest: Vec<VarId> = set.rest_vars().iter().map(|&v| VarId::from(v)).collect();
        let n = engine.manager().count_models(phi, &rest)?;
        println!("  ({}, {}): {n} completions", sp.mask1.to_bit_string(), sp.mask2.to_bit_string());
    }

    let merged = xcount(&e, &XcountQuery::new(sensitive, d, gap).merge(MergeMode::Exact), Limits::default())?;
    println!("\noracle {} / exact merge {}", truth.count, merged.count.unwrap());
    Ok(())
}
