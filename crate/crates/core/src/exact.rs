//! Monolithic exact count: one ADD for the whole ensemble, a primed copy of
//! the sensitive bits, and a projected model count.

use num_bigint::BigUint;

use crate::compile::{monotone_constraint_primed, monotone_features, tree_to_add, VarLayout};
use crate::dd::{Bdd, DdManager, Limits, ThresholdMode, VarId};
use crate::error::{Error, Result};
use crate::model::{Ensemble, GuardTable};

#[derive(Debug, Clone, PartialEq)]
pub struct ExactQuery {
    pub sensitive: Vec<usize>,
    pub distance: usize,
    /// Gap in scaled leaf units.
    pub gap: i64,
}

impl ExactQuery {
    pub fn new(sensitive: impl Into<Vec<usize>>, distance: usize, gap: i64) -> Self {
        let mut sensitive = sensitive.into();
        sensitive.sort_unstable();
        sensitive.dedup();
        ExactQuery {
            sensitive,
            distance,
            gap,
        }
    }

    pub(crate) fn validate(&self, gt: &GuardTable) -> Result<()> {
        if self.sensitive.is_empty() {
            return Err(Error::Config("the sensitive feature set is empty".into()));
        }
        if let Some(&f) = self.sensitive.iter().find(|&&f| f >= gt.num_features()) {
            return Err(Error::Config(format!(
                "sensitive feature {f} is out of range ({} features)",
                gt.num_features()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ExactReport {
    pub count: BigUint,
    pub warning: Option<String>,
    pub peak_bytes: usize,
    pub num_nodes: usize,
}

pub(crate) const NO_SENSITIVE_GUARDS: &str =
    "no sensitive feature has a guard; the output cannot depend on it";

pub fn exact_count(e: &Ensemble, q: &ExactQuery) -> Result<BigUint> {
    exact_count_with(e, q, Limits::default()).map(|r| r.count)
}

pub fn exact_count_with(e: &Ensemble, q: &ExactQuery, limits: Limits) -> Result<ExactReport> {
    e.require_quantized()?;
    let gt = GuardTable::build(e);
    q.validate(&gt)?;
    let sensitive_vars = gt.vars_of(&q.sensitive);
    if sensitive_vars.is_empty() {
        return Ok(ExactReport {
            count: BigUint::ZERO,
            warning: Some(NO_SENSITIVE_GUARDS.into()),
            peak_bytes: 0,
            num_nodes: 0,
        });
    }

    let layout = VarLayout::interleaved(&gt, &q.sensitive);
    let mut mgr = DdManager::with_limits(layout.num_dd_vars(), limits);
    let valid = monotone_features(&mut mgr, &gt, 0..gt.num_features(), &layout)?;
    let mut a1 = mgr.constant(0)?;
    for tree in e.trees() {
        // Zero outside the valid domain; the final conjunction with `valid`
        // discards those assignments anyway.
        let t = tree_to_add(&mut mgr, tree, &gt, &layout)?;
        let t = mgr.add_restrict(t, valid, 0)?;
        a1 = mgr.add_plus(a1, t)?;
    }
    let unprimed_s: Vec<VarId> = layout.map(sensitive_vars.iter().copied());
    let primed_s: Vec<VarId> = sensitive_vars
        .iter()
        .map(|&g| layout.primed(g).expect("sensitive variable without a twin"))
        .collect();
    let renames: Vec<(VarId, VarId)> = unprimed_s.iter().copied().zip(primed_s.iter().copied()).collect();
    let a2 = mgr.substitute_vars(a1, &renames)?;
    let delta = mgr.add_minus(a2, a1)?;

    let mut b = mgr.threshold_to_bdd(delta, q.gap, ThresholdMode::AbsGreater)?;
    let near = mgr.at_most_distance(&unprimed_s, &primed_s, q.distance)?;
    b = mgr.and(b, near)?;
    if q.gap < 0 {
        // With a negative gap b' = b would witness itself; partners must differ.
        let same = mgr.at_most_distance(&unprimed_s, &primed_s, 0)?;
        let differ = mgr.not(same)?;
        b = mgr.and(b, differ)?;
    }
    b = mgr.and(b, valid)?;
    for &f in &q.sensitive {
        let c = monotone_constraint_primed(&mut mgr, &gt, f, &layout)?;
        b = mgr.and(b, c)?;
    }
    let projected: Bdd = mgr.exists_project(b, &primed_s)?;
    let count = mgr.count_models(projected, layout.unprimed_vars())?;
    Ok(ExactReport {
        count,
        warning: None,
        peak_bytes: mgr.peak_bytes(),
        num_nodes: mgr.num_nodes(),
    })
}
