use crate::model::GuardTable;

/// One monotone assignment to all sensitive guard variables, in ascending
/// variable order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SensitiveMask {
    pub bits: Vec<bool>,
}

impl SensitiveMask {
    pub fn hamming(&self, other: &SensitiveMask) -> usize {
        self.bits.iter().zip(&other.bits).filter(|(a, b)| a != b).count()
    }

    pub fn to_bit_string(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

/// The `m + 1` suffix-ones vectors of length `m`, from all-zeros to all-ones.
pub fn bitmask_gen(m: usize) -> Vec<Vec<bool>> {
    (0..=m).map(|ones| (0..m).map(|i| i >= m - ones).collect()).collect()
}

/// Sensitive features and the split of guard variables into the sensitive
/// part (masked) and the rest.
#[derive(Debug, Clone)]
pub struct SensitiveSet {
    features: Vec<usize>,
    mask_vars: Vec<usize>,
    rest_vars: Vec<usize>,
    mask_pos: Vec<Option<usize>>,
    rest_pos: Vec<Option<usize>>,
}

impl SensitiveSet {
    pub fn new(gt: &GuardTable, sensitive: &[usize]) -> Self {
        let mut features = sensitive.to_vec();
        features.sort_unstable();
        features.dedup();
        let m = gt.num_vars();
        let mut mask_vars = Vec::new();
        let mut rest_vars = Vec::new();
        let mut mask_pos = vec![None; m];
        let mut rest_pos = vec![None; m];
        for var in 0..m {
            if features.contains(&gt.feature_of(var)) {
                mask_pos[var] = Some(mask_vars.len());
                mask_vars.push(var);
            } else {
                rest_pos[var] = Some(rest_vars.len());
                rest_vars.push(var);
            }
        }
        SensitiveSet {
            features,
            mask_vars,
            rest_vars,
            mask_pos,
            rest_pos,
        }
    }

    pub fn features(&self) -> &[usize] {
        &self.features
    }

    /// Guard variables covered by a mask, ascending.
    pub fn mask_vars(&self) -> &[usize] {
        &self.mask_vars
    }

    /// Non-sensitive guard variables, ascending.
    pub fn rest_vars(&self) -> &[usize] {
        &self.rest_vars
    }

    pub fn mask_position(&self, var: usize) -> Option<usize> {
        self.mask_pos[var]
    }

    pub fn rest_position(&self, var: usize) -> Option<usize> {
        self.rest_pos[var]
    }
}

/// Cartesian product of the per-feature masks; the first sensitive feature
/// varies slowest.
pub fn global_mask_set(gt: &GuardTable, sensitive: &[usize]) -> Vec<SensitiveMask> {
    let set = SensitiveSet::new(gt, sensitive);
    let mut out = vec![Vec::new()];
    for &f in set.features() {
        let blocks = bitmask_gen(gt.count(f));
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<bool>| {
                blocks.iter().map(move |b| {
                    let mut p = prefix.clone();
                    p.extend_from_slice(b);
                    p
                })
            })
            .collect();
    }
    out.into_iter().map(|bits| SensitiveMask { bits }).collect()
}
