//! Compiling trees and guard constraints into decision diagrams.

use crate::dd::{Add, Bdd, DdManager, VarId};
use crate::error::{Error, Result};
use crate::model::{GuardTable, TreeNode};

/// Placement of guard variables (and optional primed copies) in the
/// diagram order.
#[derive(Debug, Clone)]
pub struct VarLayout {
    unprimed: Vec<VarId>,
    primed: Vec<Option<VarId>>,
    num_dd_vars: usize,
}

impl VarLayout {
    /// Guard variable `i` becomes diagram variable `i`.
    pub fn identity(gt: &GuardTable) -> Self {
        let m = gt.num_vars();
        VarLayout {
            unprimed: (0..m).map(VarId::from).collect(),
            primed: vec![None; m],
            num_dd_vars: m,
        }
    }

    /// Every guard variable of a feature in `primed_features` gets a primed
    /// twin placed directly after it.
    pub fn interleaved(gt: &GuardTable, primed_features: &[usize]) -> Self {
        let m = gt.num_vars();
        let mut unprimed = Vec::with_capacity(m);
        let mut primed = Vec::with_capacity(m);
        let mut next = 0usize;
        for var in 0..m {
            unprimed.push(VarId::from(next));
            next += 1;
            if primed_features.contains(&gt.feature_of(var)) {
                primed.push(Some(VarId::from(next)));
                next += 1;
            } else {
                primed.push(None);
            }
        }
        VarLayout {
            unprimed,
            primed,
            num_dd_vars: next,
        }
    }

    pub fn num_dd_vars(&self) -> usize {
        self.num_dd_vars
    }

    pub fn var(&self, guard_var: usize) -> VarId {
        self.unprimed[guard_var]
    }

    pub fn primed(&self, guard_var: usize) -> Option<VarId> {
        self.primed[guard_var]
    }

    pub fn unprimed_vars(&self) -> &[VarId] {
        &self.unprimed
    }

    pub fn primed_vars(&self) -> Vec<VarId> {
        self.primed.iter().flatten().copied().collect()
    }

    /// Diagram variables of the guard variables in `guard_vars`.
    pub fn map(&self, guard_vars: impl IntoIterator<Item = usize>) -> Vec<VarId> {
        guard_vars.into_iter().map(|g| self.unprimed[g]).collect()
    }
}

/// The tree as an ADD: guard `(f, θ_i)` becomes a node on the layout's
/// variable for `(f, i)` with the yes-branch on its high edge.
pub fn tree_to_add(
    mgr: &mut DdManager,
    root: &TreeNode,
    gt: &GuardTable,
    layout: &VarLayout,
) -> Result<Add> {
    match root {
        TreeNode::Leaf { value } => Ok(mgr.constant(TreeNode::scaled_leaf(*value))?),
        TreeNode::Internal { guard, yes, no } => {
            let var = gt.lookup(guard).ok_or(Error::GuardNotInTable {
                feature: guard.feature,
                threshold: guard.threshold,
            })?;
            let hi = tree_to_add(mgr, yes, gt, layout)?;
            let lo = tree_to_add(mgr, no, gt, layout)?;
            Ok(mgr.add_node(layout.var(var), lo, hi)?)
        }
    }
}

/// Suffix-ones constraint `b_1 ⇒ b_2 ⇒ … ⇒ b_m` over the given variables.
pub fn monotone_chain(mgr: &mut DdManager, block: &[VarId]) -> Result<Bdd> {
    let mut acc = Bdd::TRUE;
    for pair in block.windows(2).rev() {
        let a = mgr.bdd_var(pair[0])?;
        let b = mgr.bdd_var(pair[1])?;
        let not_a = mgr.not(a)?;
        let implication = mgr.or(not_a, b)?;
        acc = mgr.and(implication, acc)?;
    }
    Ok(acc)
}

/// Monotonicity of one feature's block under `layout`.
pub fn monotone_constraint(
    mgr: &mut DdManager,
    gt: &GuardTable,
    feature: usize,
    layout: &VarLayout,
) -> Result<Bdd> {
    let block = layout.map(gt.block(feature));
    monotone_chain(mgr, &block)
}

/// Monotonicity of the primed copy of a feature's block.
pub fn monotone_constraint_primed(
    mgr: &mut DdManager,
    gt: &GuardTable,
    feature: usize,
    layout: &VarLayout,
) -> Result<Bdd> {
    let block: Vec<VarId> = gt
        .block(feature)
        .map(|g| layout.primed(g).expect("feature has no primed copy"))
        .collect();
    monotone_chain(mgr, &block)
}

/// Conjunction of the monotonicity constraints of `features`.
pub fn monotone_features(
    mgr: &mut DdManager,
    gt: &GuardTable,
    features: impl IntoIterator<Item = usize>,
    layout: &VarLayout,
) -> Result<Bdd> {
    let mut acc = Bdd::TRUE;
    for f in features {
        let c = monotone_constraint(mgr, gt, f, layout)?;
        acc = mgr.and(acc, c)?;
    }
    Ok(acc)
}

/// Sum of all tree ADDs.
pub fn ensemble_to_add(
    mgr: &mut DdManager,
    trees: &[TreeNode],
    gt: &GuardTable,
    layout: &VarLayout,
) -> Result<Add> {
    let mut acc = mgr.constant(0)?;
    for tree in trees {
        let a = tree_to_add(mgr, tree, gt, layout)?;
        acc = mgr.add_plus(acc, a)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use num_bigint::BigUint;

    use super::*;
    use crate::model::{build_guard_table, evaluate_region, parse_ensemble, RegionAssignment};

    const TWO_TREES: &str = r#"{"num_features": 2, "trees": [
        {"feature": 0, "threshold": 4, "yes": {"feature": 1, "threshold": 3,
            "yes": {"value": 30}, "no": {"value": -30}}, "no": {"value": 35}},
        {"feature": 0, "threshold": 3, "yes": {"feature": 1, "threshold": 2,
            "yes": {"value": 40}, "no": {"value": -40}}, "no": {"value": -45}}]}"#;

    #[test]
    fn tree1_terminals() {
        let e = parse_ensemble(TWO_TREES.as_bytes()).unwrap();
        let gt = build_guard_table(&e);
        let layout = VarLayout::identity(&gt);
        let mut mgr = DdManager::new(gt.num_vars());
        let a = tree_to_add(&mut mgr, &e.trees()[0], &gt, &layout).unwrap();
        assert_eq!(mgr.terminal_values(a), vec![-30, 30, 35]);
        let leaf = tree_to_add(&mut mgr, &TreeNode::leaf(7.0), &gt, &layout).unwrap();
        assert_eq!(mgr.constant_value(leaf), Some(7));
        assert_eq!(mgr.size(leaf), 0);
    }

    #[test]
    fn missing_guard_is_an_error() {
        let e = parse_ensemble(TWO_TREES.as_bytes()).unwrap();
        let gt = build_guard_table(&e);
        let mut mgr = DdManager::new(gt.num_vars());
        let stray = TreeNode::split(0, 99.0, TreeNode::leaf(1.0), TreeNode::leaf(2.0));
        let err = tree_to_add(&mut mgr, &stray, &gt, &VarLayout::identity(&gt)).unwrap_err();
        assert!(matches!(err, Error::GuardNotInTable { feature: 0, .. }));
    }

    #[test]
    fn sum_add_matches_valuation_on_monotone_regions() {
        let e = parse_ensemble(TWO_TREES.as_bytes()).unwrap();
        let gt = build_guard_table(&e);
        let layout = VarLayout::identity(&gt);
        let mut mgr = DdManager::new(gt.num_vars());
        let sum = ensemble_to_add(&mut mgr, e.trees(), &gt, &layout).unwrap();
        assert_eq!(mgr.eval_add(sum, &[true; 4]), 70);
        for m in 0..16u32 {
            let b = RegionAssignment::new((0..4).map(|i| m >> i & 1 == 1).collect());
            if b.is_monotone(&gt) {
                assert_eq!(mgr.eval_add(sum, &b.bits), evaluate_region(&e, &gt, &b));
            }
        }
    }

    #[test]
    fn monotone_blocks() {
        let mut mgr = DdManager::new(3);
        let v: Vec<VarId> = (0..3).map(VarId::from).collect();
        let two = monotone_chain(&mut mgr, &v[..2]).unwrap();
        let models: Vec<(bool, bool)> = [(false, false), (false, true), (true, false), (true, true)]
            .into_iter()
            .filter(|&(a, b)| mgr.eval_bdd(two, &[a, b, false]))
            .collect();
        assert_eq!(models, vec![(false, false), (false, true), (true, true)]);
        assert!(monotone_chain(&mut mgr, &[]).unwrap().is_true());
        let three = monotone_chain(&mut mgr, &v).unwrap();
        assert_eq!(mgr.count_models(three, &v).unwrap(), BigUint::from(4u32));
    }

    #[test]
    fn two_trees_constraints_admit_nine_regions() {
        let e = parse_ensemble(TWO_TREES.as_bytes()).unwrap();
        let gt = build_guard_table(&e);
        let layout = VarLayout::identity(&gt);
        let mut mgr = DdManager::new(gt.num_vars());
        let f0 = monotone_constraint(&mut mgr, &gt, 0, &layout).unwrap();
        let block: Vec<VarId> = layout.map(gt.block(0));
        assert_eq!(mgr.count_models(f0, &block).unwrap(), BigUint::from(3u32));
        let both = monotone_features(&mut mgr, &gt, 0..2, &layout).unwrap();
        assert_eq!(
            mgr.count_models(both, layout.unprimed_vars()).unwrap(),
            BigUint::from(9u32)
        );
    }

    #[test]
    fn interleaved_layout_places_twins_adjacent() {
        let e = parse_ensemble(TWO_TREES.as_bytes()).unwrap();
        let gt = build_guard_table(&e);
        let layout = VarLayout::interleaved(&gt, &[0]);
        assert_eq!(layout.num_dd_vars(), 6);
        assert_eq!(layout.var(0), VarId(0));
        assert_eq!(layout.primed(0), Some(VarId(1)));
        assert_eq!(layout.var(1), VarId(2));
        assert_eq!(layout.primed(1), Some(VarId(3)));
        assert_eq!(layout.var(2), VarId(4));
        assert_eq!(layout.primed(2), None);
    }
}
