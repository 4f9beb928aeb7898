use crate::error::ModelError;

/// Largest supported leaf precision (decimal places).
pub const MAX_PRECISION: u32 = 9;

/// A split predicate `x[feature] < threshold`. The yes-branch is taken when
/// the predicate holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Guard {
    pub feature: usize,
    pub threshold: f64,
}

impl Guard {
    pub fn holds(&self, x: &[f64]) -> bool {
        x[self.feature] < self.threshold
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Internal {
        guard: Guard,
        yes: Box<TreeNode>,
        no: Box<TreeNode>,
    },
    Leaf {
        value: f64,
    },
}

impl TreeNode {
    pub fn leaf(value: f64) -> Self {
        TreeNode::Leaf { value }
    }

    pub fn split(feature: usize, threshold: f64, yes: TreeNode, no: TreeNode) -> Self {
        TreeNode::Internal {
            guard: Guard { feature, threshold },
            yes: Box::new(yes),
            no: Box::new(no),
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, TreeNode::Leaf { .. })
    }

    /// Numeric prediction of this tree at `x`.
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { value } => return *value,
                TreeNode::Internal { guard, yes, no } => {
                    node = if guard.holds(x) { yes } else { no };
                }
            }
        }
    }

    pub fn num_leaves(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Internal { yes, no, .. } => yes.num_leaves() + no.num_leaves(),
        }
    }

    pub fn num_internal(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Internal { yes, no, .. } => 1 + yes.num_internal() + no.num_internal(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Internal { yes, no, .. } => 1 + yes.depth().max(no.depth()),
        }
    }

    /// Visits every guard in pre-order.
    pub fn for_each_guard(&self, f: &mut impl FnMut(&Guard)) {
        if let TreeNode::Internal { guard, yes, no } = self {
            f(guard);
            yes.for_each_guard(f);
            no.for_each_guard(f);
        }
    }

    fn for_each_leaf_mut(&mut self, f: &mut impl FnMut(&mut f64)) {
        match self {
            TreeNode::Leaf { value } => f(value),
            TreeNode::Internal { yes, no, .. } => {
                yes.for_each_leaf_mut(f);
                no.for_each_leaf_mut(f);
            }
        }
    }

    fn all_leaves(&self, pred: &impl Fn(f64) -> bool) -> bool {
        match self {
            TreeNode::Leaf { value } => pred(*value),
            TreeNode::Internal { yes, no, .. } => yes.all_leaves(pred) && no.all_leaves(pred),
        }
    }

    /// Leaf value as a scaled integer. Only meaningful on quantized trees.
    pub(crate) fn scaled_leaf(value: f64) -> i64 {
        debug_assert!(value.fract() == 0.0);
        value as i64
    }
}

/// An additive ensemble: the prediction is the sum of the tree outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    trees: Vec<TreeNode>,
    num_features: usize,
    leaf_scale: u64,
    integral: bool,
}

impl Ensemble {
    pub fn new(trees: Vec<TreeNode>, num_features: usize) -> Result<Self, ModelError> {
        if trees.is_empty() {
            return Err(ModelError::NoTrees);
        }
        for (i, tree) in trees.iter().enumerate() {
            let mut bad = None;
            tree.for_each_guard(&mut |g| {
                if bad.is_none() && g.feature >= num_features {
                    bad = Some(g.feature);
                }
            });
            if let Some(feature) = bad {
                return Err(ModelError::FeatureOutOfRange {
                    feature,
                    num_features,
                    path: format!("trees[{i}]"),
                });
            }
            let mut finite = true;
            tree.for_each_guard(&mut |g| finite &= g.threshold.is_finite());
            finite &= tree.all_leaves(&|v| v.is_finite());
            if !finite {
                return Err(ModelError::NonFinite {
                    what: "value",
                    path: format!("trees[{i}]"),
                });
            }
        }
        let integral = trees
            .iter()
            .all(|t| t.all_leaves(&|v| v.fract() == 0.0 && v.abs() < 9.0e15));
        Ok(Ensemble {
            trees,
            num_features,
            leaf_scale: 1,
            integral,
        })
    }

    pub fn trees(&self) -> &[TreeNode] {
        &self.trees
    }

    pub fn num_features(&self) -> usize {
        self.num_features
    }

    /// Divisor that maps scaled leaf integers back to model units.
    pub fn leaf_scale(&self) -> u64 {
        self.leaf_scale
    }

    /// True when every leaf holds an exact integer, i.e. the ensemble can be
    /// compiled into integer-terminal diagrams.
    pub fn is_quantized(&self) -> bool {
        self.integral
    }

    pub(crate) fn require_quantized(&self) -> Result<(), ModelError> {
        if self.integral {
            Ok(())
        } else {
            Err(ModelError::NotQuantized)
        }
    }

    pub fn num_leaves(&self) -> usize {
        self.trees.iter().map(TreeNode::num_leaves).sum()
    }

    /// Numeric prediction in model units (or scaled units after quantization).
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict(x)).sum()
    }

    /// Replaces every leaf by `round(value * 10^precision)`, rounding half
    /// away from zero.
    pub fn quantize_leaves(&self, precision: u32) -> Result<Ensemble, ModelError> {
        if precision > MAX_PRECISION {
            return Err(ModelError::PrecisionTooLarge(precision));
        }
        let factor = 10u64.pow(precision);
        let mut trees = self.trees.clone();
        let mut overflow = None;
        for tree in &mut trees {
            tree.for_each_leaf_mut(&mut |v| {
                match quantize_value(*v, precision) {
                    Some(q) => *v = q as f64,
                    None => overflow = overflow.or(Some(*v)),
                }
            });
        }
        if let Some(value) = overflow {
            return Err(ModelError::LeafOverflow { value, precision });
        }
        Ok(Ensemble {
            trees,
            num_features: self.num_features,
            leaf_scale: self.leaf_scale * factor,
            integral: true,
        })
    }
}

/// `round(value * 10^precision)` with ties away from zero; `None` when the
/// result is not exactly representable as an integer in both `i64` and `f64`.
pub fn quantize_value(value: f64, precision: u32) -> Option<i64> {
    // Scale through the decimal string so that 0.1234 * 1000 does not land
    // on 123.39999 before rounding.
    let scaled: f64 = format!("{value}e{precision}").parse().ok()?;
    let rounded = scaled.round();
    if !rounded.is_finite() || rounded.abs() > 9.0e15 {
        return None;
    }
    Some(rounded as i64)
}

/// Scales a gap given in model units to the ensemble's leaf scale.
pub fn scale_gap(gap: f64, precision: u32) -> Option<i64> {
    quantize_value(gap, precision)
}
