#![allow(dead_code)]

use std::path::PathBuf;

use treesens::gen::{generate, GenParams};
use treesens::model::scale_gap;
use treesens::{parse_ensemble, Ensemble};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Parses a fixture and scales its leaves by `10^precision`.
pub fn load(name: &str, precision: u32) -> Ensemble {
    let bytes = std::fs::read(fixture(name)).unwrap();
    parse_ensemble(&bytes).unwrap().quantize_leaves(precision).unwrap()
}

pub fn two_trees() -> Ensemble {
    load("two_trees.json", 0)
}

/// Three trees over nine features, feature 2 guarded at three thresholds,
/// leaves at precision 3.
pub fn three_trees() -> Ensemble {
    load("three_trees_f2.json", 3)
}

pub fn three_trees_gap() -> i64 {
    scale_gap(0.1, 3).unwrap()
}

/// Pairwise region scan written without the guard table or region
/// evaluator: regions are enumerated as raw bit vectors, filtered for
/// suffix-ones blocks, and valued by predicting on a representative input.
pub fn pair_scan(e: &Ensemble, sensitive: &[usize], d: usize, gap: i64) -> u64 {
    let nf = e.num_features();
    let mut thresholds = vec![Vec::<f64>::new(); nf];
    for t in e.trees() {
        t.for_each_guard(&mut |g| thresholds[g.feature].push(g.threshold));
    }
    for th in &mut thresholds {
        th.sort_by(|a, b| a.partial_cmp(b).unwrap());
        th.dedup();
    }
    let widths: Vec<usize> = thresholds.iter().map(Vec::len).collect();
    let m: usize = widths.iter().sum();
    assert!(m <= 20, "pair_scan is exponential in the number of guards");

    // (bits, value) for every valid region.
    let mut regions = Vec::new();
    for word in 0u32..1 << m {
        let mut x = vec![0.0; nf];
        let mut ok = true;
        let mut offset = 0;
        for f in 0..nf {
            let w = widths[f];
            let block: Vec<bool> = (0..w).map(|i| word >> (offset + i) & 1 == 1).collect();
            offset += w;
            // Suffix-ones: once a bit is set, all later bits are set.
            if block.windows(2).any(|p| p[0] && !p[1]) {
                ok = false;
                break;
            }
            let ones = block.iter().filter(|&&b| b).count();
            let th = &thresholds[f];
            // bit i set iff x < th[i]; the lowest set bit is w - ones.
            x[f] = if ones == w {
                th.first().map_or(0.0, |t| t - 1.0)
            } else {
                th[w - ones - 1]
            };
        }
        if ok {
            regions.push((word, e.predict(&x) as i64));
        }
    }

    let mut sens_mask = 0u32;
    let mut offset = 0;
    for f in 0..nf {
        if sensitive.contains(&f) {
            sens_mask |= ((1u32 << widths[f]) - 1) << offset;
        }
        offset += widths[f];
    }
    regions
        .iter()
        .filter(|&&(b, v)| {
            regions.iter().any(|&(b2, v2)| {
                let dist = ((b ^ b2) & sens_mask).count_ones() as usize;
                (b & !sens_mask) == (b2 & !sens_mask) && dist >= 1 && dist <= d && (v - v2).unsigned_abs() as i128 > gap as i128
            })
        })
        .count() as u64
}

/// One instance of the equivalence corpus: at most 4 features, 5 trees,
/// depth 3 and 2 guards per feature.
#[derive(Debug, Clone)]
pub struct CorpusCase {
    pub ensemble: Ensemble,
    pub sensitive: Vec<usize>,
    pub distance: usize,
    pub gap: i64,
    pub label: String,
}

pub fn corpus(count: usize) -> Vec<CorpusCase> {
    const GAPS: [i64; 5] = [0, 5, 20, 60, 150];
    (0..count as u64)
        .map(|i| {
            let features = 1 + (i % 4) as usize;
            let p = GenParams {
                trees: 1 + (i / 4 % 5) as usize,
                depth: 1 + (i / 20 % 3) as usize,
                features,
                guards_per_feature: 1 + (i / 60 % 2) as usize,
                leaf_range: (-1.0, 1.0),
                decimals: 2,
                seed: 1000 + i,
            };
            let e = generate(&p).unwrap().quantize_leaves(2).unwrap();
            // Non-empty sensitive subset from the seed bits.
            let bits = (i.wrapping_mul(0x9E37_79B9) >> 7) as usize % ((1 << features) - 1) + 1;
            let sensitive: Vec<usize> = (0..features).filter(|f| bits >> f & 1 == 1).collect();
            let distance = (i % 3) as usize;
            let gap = GAPS[(i / 3 % 5) as usize];
            CorpusCase {
                label: format!("case {i} {p:?} S={sensitive:?} d={distance} G={gap}"),
                ensemble: e,
                sensitive,
                distance,
                gap,
            }
        })
        .collect()
}
