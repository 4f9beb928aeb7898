//! Ground truth by exhaustive enumeration of regions.
//!
//! Never touches the decision-diagram engine, so it can falsify it.

use std::collections::BTreeMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::model::{evaluate_region, Ensemble, GuardTable, RegionAssignment};

pub const DEFAULT_REGION_CAP: u128 = 1_000_000;

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub count: u64,
    /// Sensitive regions in ascending bit order.
    pub sensitive_regions: Vec<RegionAssignment>,
    /// V(b) for every valid region.
    pub region_values: BTreeMap<RegionAssignment, i64>,
}

impl OracleResult {
    pub fn total_regions(&self) -> usize {
        self.region_values.len()
    }
}

/// Bits of a block holding `level` trailing ones.
fn push_level(bits: &mut Vec<bool>, m: usize, level: usize) {
    bits.extend((0..m).map(|i| i >= m - level));
}

/// Mixed-radix enumeration of per-feature levels.
fn level_combos(radices: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(radices.len())];
    for &r in radices {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..r).map(move |l| {
                    let mut p = prefix.clone();
                    p.push(l);
                    p
                })
            })
            .collect();
    }
    out
}

/// Counts regions `b` having a partner `b'` with equal non-sensitive bits,
/// sensitive Hamming distance in `[1, d]`, and `|V(b) - V(b')| > gap`.
pub fn oracle_count(
    e: &Ensemble,
    sensitive: &[usize],
    d: usize,
    gap: i64,
    cap: u128,
) -> Result<OracleResult> {
    e.require_quantized()?;
    let gt = GuardTable::build(e);
    let regions = gt.num_regions();
    if regions > cap {
        return Err(Error::OracleCapExceeded { regions, cap });
    }
    let nf = gt.num_features();
    let is_sensitive: Vec<bool> = (0..nf).map(|f| sensitive.contains(&f)).collect();
    let s_feats: Vec<usize> = (0..nf).filter(|&f| is_sensitive[f]).collect();
    let n_feats: Vec<usize> = (0..nf).filter(|&f| !is_sensitive[f]).collect();
    let s_combos = level_combos(&s_feats.iter().map(|&f| gt.count(f) + 1).collect::<Vec<_>>());
    let n_combos = level_combos(&n_feats.iter().map(|&f| gt.count(f) + 1).collect::<Vec<_>>());

    let mut region_values = BTreeMap::new();
    let mut sensitive_regions = Vec::new();
    let mut levels = vec![0usize; nf];
    for rest in &n_combos {
        for (f, &l) in n_feats.iter().zip(rest) {
            levels[*f] = l;
        }
        let group: Vec<(RegionAssignment, i64)> = s_combos
            .iter()
            .map(|sl| {
                for (f, &l) in s_feats.iter().zip(sl) {
                    levels[*f] = l;
                }
                let mut bits = Vec::with_capacity(gt.num_vars());
                for (f, &l) in levels.iter().enumerate() {
                    push_level(&mut bits, gt.count(f), l);
                }
                let b = RegionAssignment::new(bits);
                let v = evaluate_region(e, &gt, &b);
                (b, v)
            })
            .collect();
        let mut flagged = vec![false; group.len()];
        for i in 0..group.len() {
            for j in i + 1..group.len() {
                let dist: usize = s_combos[i]
                    .iter()
                    .zip(&s_combos[j])
                    .map(|(a, b)| a.abs_diff(*b))
                    .sum();
                if dist >= 1 && dist <= d && (group[i].1 - group[j].1).unsigned_abs() as i128 > gap as i128 {
                    flagged[i] = true;
                    flagged[j] = true;
                }
            }
        }
        for ((b, v), flag) in group.into_iter().zip(flagged) {
            if flag {
                sensitive_regions.push(b.clone());
            }
            region_values.insert(b, v);
        }
    }
    sensitive_regions.sort();
    Ok(OracleResult {
        count: sensitive_regions.len() as u64,
        sensitive_regions,
        region_values,
    })
}

/// Writes `bits,value,sensitive` rows for every region.
pub fn write_region_table(result: &OracleResult, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["bits", "value", "sensitive"])
        .map_err(std::io::Error::other)?;
    for (b, v) in &result.region_values {
        let sensitive = result.sensitive_regions.binary_search(b).is_ok();
        w.write_record([b.to_bit_string(), v.to_string(), sensitive.to_string()])
            .map_err(std::io::Error::other)?;
    }
    w.flush()?;
    Ok(())
}
