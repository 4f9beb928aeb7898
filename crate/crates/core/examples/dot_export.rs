//! Graphviz rendering of the summed ADD of the two-tree model.
//!
//! cargo run --example dot_export | dot -Tsvg > sum.svg

use treesens::compile::{ensemble_to_add, VarLayout};
use treesens::dd::DdManager;
use treesens::{parse_ensemble, GuardTable};

const MODEL: &str = include_str!("../tests/fixtures/two_trees.json");

fn main() -> treesens::Result<()> {
    let e = parse_ensemble(MODEL.as_bytes())?.quantize_leaves(0)?;
    let gt = GuardTable::build(&e);
    let layout = VarLayout::identity(&gt);
    let mut mgr = DdManager::new(layout.num_dd_vars());
    let sum = ensemble_to_add(&mut mgr, e.trees(), &gt, &layout)?;
    let label = |v: u32| {
        let (f, i) = gt.var_position(v as usize);
        format!("x{f} < {}", gt.thresholds(f)[i])
    };
    print!("{}", mgr.to_dot(sum, label));
    eprintln!("{} nodes, terminals {:?}", mgr.size(sum), mgr.terminal_values(sum));
    Ok(())
}
