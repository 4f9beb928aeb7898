//! Decomposed counting: split the sensitive space into pairs of masks,
//! build one small formula per pair, and merge the per-pair solution sets
//! either exactly or with a streaming sketch.

mod masks;
mod sketch;
mod subproblem;

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};
use rayon::prelude::*;

pub use masks::{bitmask_gen, global_mask_set, SensitiveMask, SensitiveSet};
pub use sketch::{compute_thresh, PepinSketch};
pub use subproblem::{
    enumerate_subproblems, process_subproblem, prune_tree, solution_universe_size, Subproblem,
    SubproblemEngine,
};

use crate::dd::{Bdd, DdError, DdManager, Limits, VarId};
use crate::error::Result;
use crate::exact::{ExactQuery, NO_SENSITIVE_GUARDS};
use crate::model::{Ensemble, GuardTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MergeMode {
    /// Streaming (ε, δ) estimate.
    Pepin,
    /// Disjunction of all subproblem sets, counted exactly.
    Exact,
}

#[derive(Debug, Clone)]
pub struct XcountQuery {
    pub sensitive: Vec<usize>,
    pub distance: usize,
    /// Gap in scaled leaf units.
    pub gap: i64,
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
    pub merge: MergeMode,
    /// Worker threads for building subproblem formulas; 1 runs inline.
    pub jobs: usize,
}

impl XcountQuery {
    pub fn new(sensitive: impl Into<Vec<usize>>, distance: usize, gap: i64) -> Self {
        let q = ExactQuery::new(sensitive, distance, gap);
        XcountQuery {
            sensitive: q.sensitive,
            distance,
            gap,
            epsilon: 0.1,
            delta: 0.1,
            seed: 0,
            merge: MergeMode::Pepin,
            jobs: 1,
        }
    }

    pub fn merge(mut self, merge: MergeMode) -> Self {
        self.merge = merge;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn accuracy(mut self, epsilon: f64, delta: f64) -> Self {
        self.epsilon = epsilon;
        self.delta = delta;
        self
    }

    pub fn jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs.max(1);
        self
    }
}

#[derive(Debug, Clone)]
pub struct CountReport {
    pub estimate: f64,
    /// Present when the result is exact.
    pub count: Option<BigUint>,
    pub num_subproblems: usize,
    pub sat_subproblems: usize,
    pub final_p: f64,
    pub thresh: Option<f64>,
    pub seed: u64,
    pub elapsed: Duration,
    pub warning: Option<String>,
    pub peak_bytes: usize,
}

impl CountReport {
    pub fn is_exact(&self) -> bool {
        self.count.is_some()
    }

    fn trivial(q: &XcountQuery, num_subproblems: usize, start: Instant, warning: Option<String>) -> Self {
        CountReport {
            estimate: 0.0,
            count: Some(BigUint::ZERO),
            num_subproblems,
            sat_subproblems: 0,
            final_p: 1.0,
            thresh: None,
            seed: q.seed,
            elapsed: start.elapsed(),
            warning,
            peak_bytes: 0,
        }
    }
}

enum Merger {
    Pepin { sketch: PepinSketch, root: StdRng },
    Exact { union: Bdd, mask_vars: Vec<VarId> },
}

impl Merger {
    fn consume(&mut self, mgr: &mut DdManager, set: &SensitiveSet, sp: &Subproblem, phi: Bdd) -> Result<bool> {
        match self {
            Merger::Pepin { sketch, root } => {
                // One stream per subproblem, drawn whether or not it is used.
                let mut rng = StdRng::seed_from_u64(root.random());
                let (t, u) = solution_universe_size(mgr, phi, set)?;
                sketch.absorb(mgr, phi, &u, [sp.index1, sp.index2], &mut rng)?;
                Ok(t.bits() > 0)
            }
            Merger::Exact { union, mask_vars } => {
                if phi.is_false() {
                    return Ok(false);
                }
                let lits = |m: &SensitiveMask| -> Vec<(VarId, bool)> {
                    mask_vars.iter().copied().zip(m.bits.iter().copied()).collect()
                };
                let c1 = mgr.cube(&lits(&sp.mask1))?;
                let c2 = mgr.cube(&lits(&sp.mask2))?;
                let either = mgr.or(c1, c2)?;
                let psi = mgr.and(phi, either)?;
                *union = mgr.or(*union, psi)?;
                Ok(true)
            }
        }
    }
}

fn check_deadline(limits: &Limits) -> Result<()> {
    match limits.deadline {
        Some(d) if Instant::now() >= d => Err(DdError::Timeout.into()),
        _ => Ok(()),
    }
}

/// Counts sensitive regions by decomposition over sensitive masks.
pub fn xcount(e: &Ensemble, q: &XcountQuery, limits: Limits) -> Result<CountReport> {
    let start = Instant::now();
    e.require_quantized()?;
    let gt = GuardTable::build(e);
    ExactQuery::new(q.sensitive.clone(), q.distance, q.gap).validate(&gt)?;
    if q.merge == MergeMode::Pepin {
        // Reject bad accuracy parameters before any work.
        compute_thresh(q.epsilon, q.delta, 1)?;
    }
    let set = SensitiveSet::new(&gt, &q.sensitive);
    if set.mask_vars().is_empty() {
        return Ok(CountReport::trivial(q, 0, start, Some(NO_SENSITIVE_GUARDS.into())));
    }
    let masks = global_mask_set(&gt, &q.sensitive);
    let sps = enumerate_subproblems(&masks, q.distance);
    if sps.is_empty() {
        return Ok(CountReport::trivial(q, 0, start, None));
    }

    let mask_vars: Vec<VarId> = set.mask_vars().iter().map(|&v| VarId::from(v)).collect();
    let rest_vars: Vec<VarId> = set.rest_vars().iter().map(|&v| VarId::from(v)).collect();
    let thresh = match q.merge {
        MergeMode::Pepin => Some(compute_thresh(q.epsilon, q.delta, sps.len())?),
        MergeMode::Exact => None,
    };
    let mut merger = match thresh {
        Some(t) => Merger::Pepin {
            sketch: PepinSketch::new(t, rest_vars),
            root: StdRng::seed_from_u64(q.seed),
        },
        None => Merger::Exact {
            union: Bdd::FALSE,
            mask_vars: mask_vars.clone(),
        },
    };

    let mut sat = 0;
    let mut peak = 0;
    let mut engine = SubproblemEngine::new(e, &gt, &set, q.gap, limits);
    if q.jobs <= 1 {
        for sp in &sps {
            check_deadline(&limits)?;
            let phi = engine.process(sp)?;
            sat += merger.consume(engine.manager_mut(), &set, sp, phi)? as usize;
        }
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(q.jobs)
            .build()
            .map_err(|err| crate::Error::Config(format!("cannot start workers: {err}")))?;
        for chunk in sps.chunks(4 * q.jobs) {
            check_deadline(&limits)?;
            let built: Vec<Result<(DdManager, Bdd)>> = pool.install(|| {
                chunk
                    .par_iter()
                    .map(|sp| {
                        let mut worker = SubproblemEngine::new(e, &gt, &set, q.gap, limits);
                        let phi = worker.process(sp)?;
                        Ok((worker.into_manager(), phi))
                    })
                    .collect()
            });
            for (sp, r) in chunk.iter().zip(built) {
                let (worker, phi) = r?;
                peak = peak.max(worker.peak_bytes());
                let phi = engine.manager_mut().import(&worker, phi.as_add())?.as_bdd();
                sat += merger.consume(engine.manager_mut(), &set, sp, phi)? as usize;
            }
        }
    }

    let mgr = engine.manager();
    let (estimate, count, final_p) = match &merger {
        Merger::Pepin { sketch, .. } => (sketch.estimate(), None, sketch.p()),
        Merger::Exact { union, mask_vars } => {
            let mut all: Vec<VarId> = mask_vars.clone();
            all.extend(set.rest_vars().iter().map(|&v| VarId::from(v)));
            all.sort_unstable();
            let c = mgr.count_models(*union, &all)?;
            (c.to_f64().unwrap_or(f64::INFINITY), Some(c), 1.0)
        }
    };
    Ok(CountReport {
        estimate,
        count,
        num_subproblems: sps.len(),
        sat_subproblems: sat,
        final_p,
        thresh,
        seed: q.seed,
        elapsed: start.elapsed(),
        warning: None,
        peak_bytes: peak.max(mgr.peak_bytes()),
    })
}

/// Exact count through the decomposition.
pub fn exact_merge(e: &Ensemble, sensitive: &[usize], distance: usize, gap: i64) -> Result<BigUint> {
    let q = XcountQuery::new(sensitive, distance, gap).merge(MergeMode::Exact);
    Ok(xcount(e, &q, Limits::default())?.count.expect("exact merge yields a count"))
}
