//! Ensemble representation, ingestion, quantization and region encoding.

mod guards;
mod json;
mod tree;

pub use guards::{evaluate_region, GuardTable, RegionAssignment};
pub use json::{parse_ensemble, to_json};
pub use tree::{quantize_value, scale_gap, Ensemble, Guard, TreeNode, MAX_PRECISION};

pub fn build_guard_table(e: &Ensemble) -> GuardTable {
    GuardTable::build(e)
}
