use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, RngExt};
use rustc_hash::{FxHashMap, FxHashSet};

use super::manager::DdManager;
use super::{Add, Bdd, DdError, DdResult, NodeId, VarId};

impl DdManager {
    pub(crate) fn reachable(&self, root: NodeId) -> Vec<NodeId> {
        let mut seen = FxHashSet::default();
        let mut stack = vec![root];
        let mut out = Vec::new();
        while let Some(id) = stack.pop() {
            if !seen.insert(id) {
                continue;
            }
            out.push(id);
            let n = self.node(id);
            if !n.is_terminal() {
                stack.push(n.lo);
                stack.push(n.hi);
            }
        }
        out
    }

    /// Variables the function depends on, ascending.
    pub fn support(&self, a: Add) -> Vec<VarId> {
        let mut vars: Vec<VarId> = self
            .reachable(a.0)
            .into_iter()
            .map(|id| self.node(id))
            .filter(|n| !n.is_terminal())
            .map(|n| VarId(n.var))
            .collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    /// Number of internal (non-terminal) nodes reachable from `a`.
    pub fn size(&self, a: Add) -> usize {
        self.reachable(a.0)
            .into_iter()
            .filter(|&id| !self.node(id).is_terminal())
            .count()
    }

    /// Distinct terminal values reachable from `a`, ascending.
    pub fn terminal_values(&self, a: Add) -> Vec<i64> {
        let mut vals: Vec<i64> = self
            .reachable(a.0)
            .into_iter()
            .map(|id| self.node(id))
            .filter(|n| n.is_terminal())
            .map(|n| n.value())
            .collect();
        vals.sort_unstable();
        vals
    }

    /// ∃vars. b
    pub fn exists_project(&mut self, b: Bdd, vars: &[VarId]) -> DdResult<Bdd> {
        if vars.is_empty() {
            return Ok(b);
        }
        let mut quantified = vec![false; self.num_vars()];
        for v in vars {
            quantified[v.index()] = true;
        }
        let last = vars.iter().map(|v| v.0).max().unwrap();
        let mut memo = FxHashMap::default();
        self.exists_rec(b.0, &quantified, last, &mut memo).map(Bdd)
    }

    fn exists_rec(
        &mut self,
        id: NodeId,
        quantified: &[bool],
        last: u32,
        memo: &mut FxHashMap<NodeId, NodeId>,
    ) -> DdResult<NodeId> {
        let n = self.node(id);
        if n.is_terminal() || n.var > last {
            return Ok(id);
        }
        if let Some(&r) = memo.get(&id) {
            return Ok(r);
        }
        let lo = self.exists_rec(n.lo, quantified, last, memo)?;
        let hi = self.exists_rec(n.hi, quantified, last, memo)?;
        let r = if quantified[n.var as usize] {
            self.or(Bdd(lo), Bdd(hi))?.0
        } else {
            self.mk(n.var, lo, hi)?
        };
        memo.insert(id, r);
        Ok(r)
    }

    /// Renames variables: the result at assignment `α` equals `a` at the
    /// assignment that reads `mapping(v)` wherever `a` reads `v`.
    pub fn substitute_vars(&mut self, a: Add, mapping: &[(VarId, VarId)]) -> DdResult<Add> {
        let renames: FxHashMap<u32, u32> = mapping
            .iter()
            .filter(|(from, to)| from != to)
            .map(|(from, to)| (from.0, to.0))
            .collect();
        if renames.is_empty() {
            return Ok(a);
        }
        let support = self.support(a);
        for v in renames.values() {
            if support.contains(&VarId(*v)) && !renames.contains_key(v) {
                return Err(DdError::ImageVarInSupport(*v));
            }
        }
        let mut memo = FxHashMap::default();
        self.substitute_rec(a.0, &renames, &mut memo).map(Add)
    }

    fn substitute_rec(
        &mut self,
        id: NodeId,
        renames: &FxHashMap<u32, u32>,
        memo: &mut FxHashMap<NodeId, NodeId>,
    ) -> DdResult<NodeId> {
        let n = self.node(id);
        if n.is_terminal() {
            return Ok(id);
        }
        if let Some(&r) = memo.get(&id) {
            return Ok(r);
        }
        let lo = self.substitute_rec(n.lo, renames, memo)?;
        let hi = self.substitute_rec(n.hi, renames, memo)?;
        let var = renames.get(&n.var).copied().unwrap_or(n.var);
        let r = if var < self.level(lo) && var < self.level(hi) {
            self.mk(var, lo, hi)?
        } else {
            let c = self.bdd_var(VarId(var))?;
            self.ite(c.0, hi, lo)?
        };
        memo.insert(id, r);
        Ok(r)
    }

    /// Copies a diagram owned by `src` into this manager.
    pub fn import(&mut self, src: &DdManager, a: Add) -> DdResult<Add> {
        let mut memo = FxHashMap::default();
        self.import_rec(src, a.0, &mut memo).map(Add)
    }

    fn import_rec(
        &mut self,
        src: &DdManager,
        id: NodeId,
        memo: &mut FxHashMap<NodeId, NodeId>,
    ) -> DdResult<NodeId> {
        if let Some(&r) = memo.get(&id) {
            return Ok(r);
        }
        let n = src.node(id);
        let r = if n.is_terminal() {
            self.terminal(n.value())?
        } else {
            let lo = self.import_rec(src, n.lo, memo)?;
            let hi = self.import_rec(src, n.hi, memo)?;
            self.mk(n.var, lo, hi)?
        };
        memo.insert(id, r);
        Ok(r)
    }

    /// True iff at most `d` of the pairs `(a_i, b_i)` differ.
    pub fn at_most_distance(&mut self, vars_a: &[VarId], vars_b: &[VarId], d: usize) -> DdResult<Bdd> {
        if vars_a.len() != vars_b.len() {
            return Err(DdError::LengthMismatch(vars_a.len(), vars_b.len()));
        }
        let n = vars_a.len();
        if d >= n {
            return Ok(Bdd::TRUE);
        }
        // row[k]: at most k differences among the pairs processed so far (suffix).
        let mut row = vec![Bdd::TRUE; d + 1];
        for i in (0..n).rev() {
            let a = self.bdd_var(vars_a[i])?;
            let b = self.bdd_var(vars_b[i])?;
            let differs = self.xor(a, b)?;
            let mut next = Vec::with_capacity(d + 1);
            for k in 0..=d {
                let spend = if k == 0 { Bdd::FALSE } else { row[k - 1] };
                next.push(self.bdd_ite(differs, spend, row[k])?);
            }
            row = next;
        }
        Ok(row[d])
    }

    /// Exact number of assignments to `universe` that satisfy `b`.
    pub fn count_models(&self, b: Bdd, universe: &[VarId]) -> DdResult<BigUint> {
        let table = CountTable::build(self, b, universe)?;
        Ok(table.total())
    }

    /// Draws `n` independent assignments (indexed like `universe`) uniformly
    /// from the models of `b`.
    pub fn sample_solutions<R: Rng + ?Sized>(
        &self,
        b: Bdd,
        n: usize,
        universe: &[VarId],
        rng: &mut R,
    ) -> DdResult<Vec<Vec<bool>>> {
        if b.is_false() {
            return Err(DdError::Unsatisfiable);
        }
        let sampler = Sampler::new(self, b, universe)?;
        Ok((0..n).map(|_| sampler.sample(self, rng)).collect())
    }
}

/// Model counts per node, relative to the node's position in the universe.
struct CountTable {
    positions: FxHashMap<u32, usize>,
    len: usize,
    root: NodeId,
    root_pos: usize,
    counts: FxHashMap<NodeId, BigUint>,
}

impl CountTable {
    fn build(mgr: &DdManager, b: Bdd, universe: &[VarId]) -> DdResult<Self> {
        let mut sorted = universe.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let positions: FxHashMap<u32, usize> =
            sorted.iter().enumerate().map(|(i, v)| (v.0, i)).collect();
        for v in mgr.support(b.as_add()) {
            if !positions.contains_key(&v.0) {
                return Err(DdError::SupportNotInUniverse(v.0));
            }
        }
        let mut table = CountTable {
            positions,
            len: sorted.len(),
            root: b.0,
            root_pos: 0,
            counts: FxHashMap::default(),
        };
        table.root_pos = table.pos(mgr, b.0);
        // Children are always created before parents, so ascending ids are a
        // valid bottom-up order.
        let mut ids = mgr.reachable(b.0);
        ids.sort_unstable();
        for id in ids {
            let n = mgr.node(id);
            let c = if n.is_terminal() {
                if n.value() != 0 {
                    BigUint::one()
                } else {
                    BigUint::zero()
                }
            } else {
                let here = table.pos(mgr, id);
                let lo = table.weighted(mgr, n.lo, here);
                let hi = table.weighted(mgr, n.hi, here);
                lo + hi
            };
            table.counts.insert(id, c);
        }
        Ok(table)
    }

    fn pos(&self, mgr: &DdManager, id: NodeId) -> usize {
        let n = mgr.node(id);
        if n.is_terminal() {
            self.len
        } else {
            self.positions[&n.var]
        }
    }

    /// Count of `child` scaled by the free variables skipped between `parent_pos` and it.
    fn weighted(&self, mgr: &DdManager, child: NodeId, parent_pos: usize) -> BigUint {
        let gap = self.pos(mgr, child) - parent_pos - 1;
        &self.counts[&child] << gap
    }

    fn total(&self) -> BigUint {
        &self.counts[&self.root] << self.root_pos
    }
}

/// Top-down sampler: at every node the then-edge is taken with probability
/// proportional to the number of models below it.
struct Sampler {
    table: CountTable,
    p_hi: FxHashMap<NodeId, f64>,
}

fn ratio(part: &BigUint, total: &BigUint) -> f64 {
    let shift = total.bits().saturating_sub(62);
    let p = (part >> shift).to_f64().unwrap_or(0.0);
    let t = (total >> shift).to_f64().unwrap_or(1.0);
    p / t
}

impl Sampler {
    fn new(mgr: &DdManager, b: Bdd, universe: &[VarId]) -> DdResult<Self> {
        let table = CountTable::build(mgr, b, universe)?;
        let mut p_hi = FxHashMap::default();
        for (&id, count) in &table.counts {
            let n = mgr.node(id);
            if n.is_terminal() {
                continue;
            }
            let here = table.pos(mgr, id);
            let hi = table.weighted(mgr, n.hi, here);
            p_hi.insert(id, ratio(&hi, count));
        }
        Ok(Sampler { table, p_hi })
    }

    fn sample<R: Rng + ?Sized>(&self, mgr: &DdManager, rng: &mut R) -> Vec<bool> {
        let len = self.table.len;
        let mut out = vec![false; len];
        let mut filled = 0;
        let mut id = self.table.root;
        loop {
            let pos = self.table.pos(mgr, id);
            for slot in &mut out[filled..pos] {
                *slot = rng.random_bool(0.5);
            }
            if pos == len {
                debug_assert!(mgr.node(id).value() != 0);
                break;
            }
            let n = mgr.node(id);
            let take_hi = rng.random::<f64>() < self.p_hi[&id];
            out[pos] = take_hi;
            filled = pos + 1;
            id = if take_hi { n.hi } else { n.lo };
        }
        out
    }
}
