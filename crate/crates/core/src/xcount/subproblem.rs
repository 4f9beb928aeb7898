use num_bigint::BigUint;
use rustc_hash::FxHashMap;

use super::masks::{SensitiveMask, SensitiveSet};
use crate::compile::{monotone_chain, tree_to_add, VarLayout};
use crate::dd::{Add, Bdd, DdManager, Limits, ThresholdMode, VarId};
use crate::error::Result;
use crate::model::{Ensemble, GuardTable, TreeNode};

/// An ordered pair of masks within the distance bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subproblem {
    /// Positions of the masks in the global mask set.
    pub index1: usize,
    pub index2: usize,
    pub mask1: SensitiveMask,
    pub mask2: SensitiveMask,
}

/// All ordered pairs `(m1, m2)` with `1 <= hamming(m1, m2) <= d`, in
/// lexicographic order of mask positions.
pub fn enumerate_subproblems(masks: &[SensitiveMask], d: usize) -> Vec<Subproblem> {
    let mut out = Vec::new();
    for (i, m1) in masks.iter().enumerate() {
        for (j, m2) in masks.iter().enumerate() {
            let dist = m1.hamming(m2);
            if dist >= 1 && dist <= d {
                out.push(Subproblem {
                    index1: i,
                    index2: j,
                    mask1: m1.clone(),
                    mask2: m2.clone(),
                });
            }
        }
    }
    out
}

/// Resolves every sensitive guard according to `mask`: a node testing
/// sensitive bit `(f, i)` is replaced by its yes-subtree when the mask bit is
/// set and by its no-subtree otherwise.
pub fn prune_tree(
    root: &TreeNode,
    mask: &SensitiveMask,
    gt: &GuardTable,
    set: &SensitiveSet,
) -> TreeNode {
    match root {
        TreeNode::Leaf { .. } => root.clone(),
        TreeNode::Internal { guard, yes, no } => {
            let var = gt.lookup(guard).expect("guard missing from guard table");
            match set.mask_position(var) {
                Some(pos) => {
                    let keep = if mask.bits[pos] { yes } else { no };
                    prune_tree(keep, mask, gt, set)
                }
                None => TreeNode::Internal {
                    guard: *guard,
                    yes: Box::new(prune_tree(yes, mask, gt, set)),
                    no: Box::new(prune_tree(no, mask, gt, set)),
                },
            }
        }
    }
}

/// Builds subproblem formulas in one manager, reusing pruned-tree ADDs
/// across subproblems that share a mask.
pub struct SubproblemEngine<'a> {
    e: &'a Ensemble,
    gt: &'a GuardTable,
    set: &'a SensitiveSet,
    gap: i64,
    mgr: DdManager,
    layout: VarLayout,
    valid_rest: Option<Bdd>,
    pruned: FxHashMap<(usize, usize), Add>,
}

impl<'a> SubproblemEngine<'a> {
    pub fn new(e: &'a Ensemble, gt: &'a GuardTable, set: &'a SensitiveSet, gap: i64, limits: Limits) -> Self {
        SubproblemEngine {
            e,
            gt,
            set,
            gap,
            mgr: DdManager::with_limits(gt.num_vars(), limits),
            layout: VarLayout::identity(gt),
            valid_rest: None,
            pruned: FxHashMap::default(),
        }
    }

    pub fn manager(&self) -> &DdManager {
        &self.mgr
    }

    pub fn manager_mut(&mut self) -> &mut DdManager {
        &mut self.mgr
    }

    pub fn into_manager(self) -> DdManager {
        self.mgr
    }

    fn pruned_add(&mut self, tree: usize, mask_index: usize, mask: &SensitiveMask) -> Result<Add> {
        if let Some(&a) = self.pruned.get(&(tree, mask_index)) {
            return Ok(a);
        }
        let pruned = prune_tree(&self.e.trees()[tree], mask, self.gt, self.set);
        let a = tree_to_add(&mut self.mgr, &pruned, self.gt, &self.layout)?;
        // φ is conjoined with monotonicity anyway; zeroing the tree outside
        // it keeps the running sums from encoding unreachable assignments.
        let valid = self.valid_rest()?;
        let a = self.mgr.add_restrict(a, valid, 0)?;
        self.pruned.insert((tree, mask_index), a);
        Ok(a)
    }

    /// Monotonicity of every non-sensitive block.
    pub fn valid_rest(&mut self) -> Result<Bdd> {
        if let Some(b) = self.valid_rest {
            return Ok(b);
        }
        let mut acc = Bdd::TRUE;
        for f in 0..self.gt.num_features() {
            if self.set.features().contains(&f) {
                continue;
            }
            let block: Vec<VarId> = self.layout.map(self.gt.block(f));
            let c = monotone_chain(&mut self.mgr, &block)?;
            acc = self.mgr.and(acc, c)?;
        }
        self.valid_rest = Some(acc);
        Ok(acc)
    }

    /// `Σ_i ADD(prune(T_i, mask1)) − ADD(prune(T_i, mask2))`.
    pub fn diff_sum(&mut self, sp: &Subproblem) -> Result<Add> {
        let mut acc = self.mgr.constant(0)?;
        for tree in 0..self.e.trees().len() {
            let a = self.pruned_add(tree, sp.index1, &sp.mask1)?;
            let b = self.pruned_add(tree, sp.index2, &sp.mask2)?;
            if a == b {
                continue;
            }
            let d = self.mgr.add_minus(a, b)?;
            acc = self.mgr.add_plus(acc, d)?;
        }
        Ok(acc)
    }

    /// φ: non-sensitive assignments where the output under `mask1` exceeds
    /// the output under `mask2` by more than the gap.
    pub fn process(&mut self, sp: &Subproblem) -> Result<Bdd> {
        let diff = self.diff_sum(sp)?;
        let phi = self.mgr.threshold_to_bdd(diff, self.gap, ThresholdMode::Greater)?;
        if phi.is_false() {
            return Ok(phi);
        }
        let valid = self.valid_rest()?;
        Ok(self.mgr.and(phi, valid)?)
    }

    /// `(t, |U|)`: models of φ over the non-sensitive variables, and the
    /// number of regions they stand for (two per model, one per mask).
    pub fn solution_universe_size(&self, phi: Bdd) -> Result<(BigUint, BigUint)> {
        solution_universe_size(&self.mgr, phi, self.set)
    }
}

pub fn solution_universe_size(mgr: &DdManager, phi: Bdd, set: &SensitiveSet) -> Result<(BigUint, BigUint)> {
    let rest: Vec<VarId> = set.rest_vars().iter().map(|&v| VarId::from(v)).collect();
    let t = mgr.count_models(phi, &rest)?;
    let u = &t << 1u32;
    Ok((t, u))
}

/// One-shot φ construction in a caller-provided manager over the guard
/// table's identity layout.
pub fn process_subproblem(
    mgr: &mut DdManager,
    e: &Ensemble,
    gt: &GuardTable,
    set: &SensitiveSet,
    sp: &Subproblem,
    gap: i64,
) -> Result<Bdd> {
    let layout = VarLayout::identity(gt);
    let mut diff = mgr.constant(0)?;
    for tree in e.trees() {
        let a = tree_to_add(mgr, &prune_tree(tree, &sp.mask1, gt, set), gt, &layout)?;
        let b = tree_to_add(mgr, &prune_tree(tree, &sp.mask2, gt, set), gt, &layout)?;
        let d = mgr.add_minus(a, b)?;
        diff = mgr.add_plus(diff, d)?;
    }
    let phi = mgr.threshold_to_bdd(diff, gap, ThresholdMode::Greater)?;
    let mut valid = Bdd::TRUE;
    for f in (0..gt.num_features()).filter(|f| !set.features().contains(f)) {
        let c = monotone_chain(mgr, &layout.map(gt.block(f)))?;
        valid = mgr.and(valid, c)?;
    }
    Ok(mgr.and(phi, valid)?)
}
