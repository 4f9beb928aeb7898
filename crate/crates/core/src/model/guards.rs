use std::ops::Range;

use super::tree::{Ensemble, Guard, TreeNode};

/// Per-feature sorted thresholds and the Boolean variable layout.
///
/// Variable ids are assigned feature-major, ascending threshold within a
/// feature, so feature `f` owns the contiguous block `block(f)`.
/// Bit `(f, i)` stands for `x[f] < thresholds(f)[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GuardTable {
    thresholds: Vec<Vec<f64>>,
    offsets: Vec<usize>,
    owner: Vec<usize>,
}

impl GuardTable {
    pub fn build(e: &Ensemble) -> Self {
        let mut thresholds = vec![Vec::new(); e.num_features()];
        for tree in e.trees() {
            tree.for_each_guard(&mut |g| thresholds[g.feature].push(g.threshold));
        }
        Self::from_thresholds(thresholds)
    }

    /// Builds a table from raw per-feature thresholds (sorted and deduplicated here).
    pub fn from_thresholds(mut thresholds: Vec<Vec<f64>>) -> Self {
        for list in &mut thresholds {
            list.sort_by(f64::total_cmp);
            list.dedup();
        }
        let mut offsets = Vec::with_capacity(thresholds.len() + 1);
        let mut owner = Vec::new();
        let mut total = 0;
        for (f, list) in thresholds.iter().enumerate() {
            offsets.push(total);
            total += list.len();
            owner.extend(std::iter::repeat_n(f, list.len()));
        }
        offsets.push(total);
        GuardTable {
            thresholds,
            offsets,
            owner,
        }
    }

    pub fn num_features(&self) -> usize {
        self.thresholds.len()
    }

    /// Total number of Boolean variables (M).
    pub fn num_vars(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn thresholds(&self, feature: usize) -> &[f64] {
        &self.thresholds[feature]
    }

    /// Number of distinct thresholds (m_f) of a feature.
    pub fn count(&self, feature: usize) -> usize {
        self.thresholds[feature].len()
    }

    pub fn block(&self, feature: usize) -> Range<usize> {
        self.offsets[feature]..self.offsets[feature + 1]
    }

    pub fn var_index(&self, feature: usize, position: usize) -> usize {
        debug_assert!(position < self.count(feature));
        self.offsets[feature] + position
    }

    /// Inverse of `var_index`.
    pub fn var_position(&self, var: usize) -> (usize, usize) {
        let f = self.owner[var];
        (f, var - self.offsets[f])
    }

    pub fn feature_of(&self, var: usize) -> usize {
        self.owner[var]
    }

    pub fn lookup(&self, guard: &Guard) -> Option<usize> {
        let list = self.thresholds.get(guard.feature)?;
        list.binary_search_by(|t| t.total_cmp(&guard.threshold))
            .ok()
            .map(|i| self.offsets[guard.feature] + i)
    }

    /// Number of monotone assignments: the product of `m_f + 1`.
    pub fn num_regions(&self) -> u128 {
        self.thresholds
            .iter()
            .try_fold(1u128, |acc, l| acc.checked_mul(l.len() as u128 + 1))
            .unwrap_or(u128::MAX)
    }

    /// Variable ids of all blocks belonging to `features`, ascending.
    pub fn vars_of(&self, features: &[usize]) -> Vec<usize> {
        let mut fs = features.to_vec();
        fs.sort_unstable();
        fs.dedup();
        fs.into_iter().flat_map(|f| self.block(f)).collect()
    }

    /// φ: the region containing `x`.
    pub fn encode_input(&self, x: &[f64]) -> RegionAssignment {
        assert_eq!(x.len(), self.num_features(), "input length must equal num_features");
        let mut bits = Vec::with_capacity(self.num_vars());
        for (f, list) in self.thresholds.iter().enumerate() {
            bits.extend(list.iter().map(|&t| x[f] < t));
        }
        RegionAssignment { bits }
    }
}

/// A Boolean assignment to the `M` guard variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RegionAssignment {
    pub bits: Vec<bool>,
}

impl RegionAssignment {
    pub fn new(bits: Vec<bool>) -> Self {
        RegionAssignment { bits }
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        RegionAssignment {
            bits: bits.iter().map(|&b| b != 0).collect(),
        }
    }

    /// Suffix-ones form inside every feature block.
    pub fn is_monotone(&self, gt: &GuardTable) -> bool {
        (0..gt.num_features()).all(|f| {
            let block = &self.bits[gt.block(f)];
            block.windows(2).all(|w| !w[0] || w[1])
        })
    }

    pub fn to_bit_string(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

/// V: sum of the reached leaves when every guard `(f, θ_i)` takes its
/// yes-branch iff bit `(f, i)` is set. Leaves must be integral.
pub fn evaluate_region(e: &Ensemble, gt: &GuardTable, b: &RegionAssignment) -> i64 {
    e.trees().iter().map(|t| evaluate_tree(t, gt, &b.bits)).sum()
}

fn evaluate_tree(tree: &TreeNode, gt: &GuardTable, bits: &[bool]) -> i64 {
    let mut node = tree;
    loop {
        match node {
            TreeNode::Leaf { value } => return TreeNode::scaled_leaf(*value),
            TreeNode::Internal { guard, yes, no } => {
                let var = gt.lookup(guard).expect("guard missing from guard table");
                node = if bits[var] { yes } else { no };
            }
        }
    }
}
