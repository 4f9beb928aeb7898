//! Random ensembles for corpora and benchmarks.

use rand::rngs::StdRng;
use rand::seq::index::sample;
use rand::{RngExt, SeedableRng};

use crate::error::{Error, Result};
use crate::model::{Ensemble, TreeNode};

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub trees: usize,
    pub depth: usize,
    pub features: usize,
    pub guards_per_feature: usize,
    /// Leaves are uniform in `[lo, hi]`, rounded to `decimals` places.
    pub leaf_range: (f64, f64),
    pub decimals: u32,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            trees: 5,
            depth: 3,
            features: 4,
            guards_per_feature: 2,
            leaf_range: (-1.0, 1.0),
            decimals: 3,
            seed: 0,
        }
    }
}

impl GenParams {
    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.leaf_range;
        if self.trees == 0 || self.features == 0 {
            return Err(Error::Config("trees and features must be at least 1".into()));
        }
        if self.depth > 0 && self.guards_per_feature == 0 {
            return Err(Error::Config("trees of depth >= 1 need at least one guard per feature".into()));
        }
        if self.depth > 24 {
            return Err(Error::Config(format!("depth {} is too large", self.depth)));
        }
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::Config(format!("invalid leaf range [{lo}, {hi}]")));
        }
        if self.decimals > crate::model::MAX_PRECISION {
            return Err(Error::Config(format!("at most {} leaf decimals", crate::model::MAX_PRECISION)));
        }
        Ok(())
    }
}

/// Full binary trees of the given depth. Every feature gets its own sorted,
/// distinct threshold pool (half-integers), and every node draws a feature
/// and one threshold from its pool.
pub fn generate(p: &GenParams) -> Result<Ensemble> {
    p.validate()?;
    let mut rng = StdRng::seed_from_u64(p.seed);
    let pools: Vec<Vec<f64>> = (0..p.features)
        .map(|_| {
            let range = 10 * p.guards_per_feature.max(1);
            let mut picks: Vec<usize> = sample(&mut rng, range, p.guards_per_feature).into_vec();
            picks.sort_unstable();
            picks.into_iter().map(|k| k as f64 + 0.5).collect()
        })
        .collect();
    let scale = 10f64.powi(p.decimals as i32);
    let trees = (0..p.trees)
        .map(|_| grow(&mut rng, p, &pools, scale, p.depth))
        .collect();
    Ok(Ensemble::new(trees, p.features)?)
}

fn grow(rng: &mut StdRng, p: &GenParams, pools: &[Vec<f64>], scale: f64, depth: usize) -> TreeNode {
    if depth == 0 {
        let (lo, hi) = p.leaf_range;
        let v = if lo == hi { lo } else { rng.random_range(lo..=hi) };
        return TreeNode::leaf((v * scale).round() / scale);
    }
    let f = rng.random_range(0..p.features);
    let threshold = pools[f][rng.random_range(0..pools[f].len())];
    let yes = grow(rng, p, pools, scale, depth - 1);
    let no = grow(rng, p, pools, scale, depth - 1);
    TreeNode::split(f, threshold, yes, no)
}
