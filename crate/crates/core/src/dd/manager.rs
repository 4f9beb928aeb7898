use std::time::Instant;

use rustc_hash::FxHashMap;

use super::{Add, Bdd, DdError, DdResult, NodeId, VarId};

const TERMINAL: u32 = u32::MAX;
const FALSE: NodeId = 0;
const TRUE: NodeId = 1;
/// Arena slot.
const NODE_BYTES: usize = 12;
/// Hash table slot (16-byte entry plus control byte) at the 7/8 load
/// factor hashbrown allocates for.
const TABLE_SLOT_BYTES: usize = 17 * 8 / 7 + 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) struct Node {
    pub(crate) var: u32,
    pub(crate) lo: NodeId,
    pub(crate) hi: NodeId,
}

impl Node {
    fn terminal(value: i64) -> Self {
        Node {
            var: TERMINAL,
            lo: value as u64 as u32,
            hi: ((value as u64) >> 32) as u32,
        }
    }

    pub(crate) fn is_terminal(&self) -> bool {
        self.var == TERMINAL
    }

    pub(crate) fn value(&self) -> i64 {
        debug_assert!(self.is_terminal());
        ((self.hi as u64) << 32 | self.lo as u64) as i64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThresholdMode {
    /// `v > g`
    Greater,
    /// `|v| > g`
    AbsGreater,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Op {
    Plus,
    Minus,
    And,
    Or,
    Xor,
}

/// Resource budget checked cooperatively whenever a node is created.
#[derive(Debug, Clone, Copy, Default)]
pub struct Limits {
    pub deadline: Option<Instant>,
    pub max_nodes: Option<usize>,
    /// Compared against [`DdManager::approx_bytes`].
    pub max_bytes: Option<usize>,
}

pub struct DdManager {
    num_vars: u32,
    pub(crate) nodes: Vec<Node>,
    unique: FxHashMap<Node, NodeId>,
    apply_cache: FxHashMap<(Op, NodeId, NodeId), NodeId>,
    ite_cache: FxHashMap<(NodeId, NodeId, NodeId), NodeId>,
    limits: Limits,
    ticks: u32,
    peak_bytes: usize,
}

impl std::fmt::Debug for DdManager {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DdManager")
            .field("num_vars", &self.num_vars)
            .field("nodes", &self.nodes.len())
            .finish()
    }
}

impl DdManager {
    pub fn new(num_vars: usize) -> Self {
        let mut mgr = DdManager {
            num_vars: u32::try_from(num_vars).expect("too many variables"),
            nodes: Vec::new(),
            unique: FxHashMap::default(),
            apply_cache: FxHashMap::default(),
            ite_cache: FxHashMap::default(),
            limits: Limits::default(),
            ticks: 0,
            peak_bytes: 0,
        };
        for v in [0, 1] {
            let n = Node::terminal(v);
            mgr.unique.insert(n, mgr.nodes.len() as NodeId);
            mgr.nodes.push(n);
        }
        mgr
    }

    pub fn with_limits(num_vars: usize, limits: Limits) -> Self {
        let mut mgr = Self::new(num_vars);
        mgr.limits = limits;
        mgr
    }

    pub fn set_limits(&mut self, limits: Limits) {
        self.limits = limits;
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars as usize
    }

    /// Nodes allocated so far, including both terminals.
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Allocated size of the arena, unique table and caches.
    pub fn approx_bytes(&self) -> usize {
        self.nodes.capacity() * NODE_BYTES
            + (self.unique.capacity() + self.apply_cache.capacity() + self.ite_cache.capacity())
                * TABLE_SLOT_BYTES
    }

    pub fn peak_bytes(&self) -> usize {
        self.peak_bytes.max(self.approx_bytes())
    }

    /// Drops all memoized operation results. Handles stay valid.
    pub fn clear_caches(&mut self) {
        self.peak_bytes = self.peak_bytes();
        self.apply_cache = FxHashMap::default();
        self.ite_cache = FxHashMap::default();
    }

    pub(crate) fn node(&self, id: NodeId) -> Node {
        self.nodes[id as usize]
    }

    /// Level of a node in the order; terminals sit below every variable.
    pub(crate) fn level(&self, id: NodeId) -> u32 {
        self.nodes[id as usize].var
    }

    fn check_budget(&mut self) -> DdResult<()> {
        if let Some(limit) = self.limits.max_nodes {
            if self.nodes.len() >= limit {
                return Err(DdError::NodeLimit { limit });
            }
        }
        if let Some(limit) = self.limits.max_bytes {
            let used = self.approx_bytes();
            if used > limit {
                self.peak_bytes = self.peak_bytes.max(used);
                return Err(DdError::MemoryLimit { limit });
            }
        }
        self.ticks = self.ticks.wrapping_add(1);
        if self.ticks % 1024 == 0 {
            if let Some(deadline) = self.limits.deadline {
                if Instant::now() >= deadline {
                    return Err(DdError::Timeout);
                }
            }
            let cache_entries = self.apply_cache.len() + self.ite_cache.len();
            if cache_entries > 4 * self.nodes.len() + (1 << 20) {
                // Cache growth is bounded by evicting everything; results are unaffected.
                self.clear_caches();
            }
        }
        Ok(())
    }

    pub(crate) fn terminal(&mut self, value: i64) -> DdResult<NodeId> {
        let n = Node::terminal(value);
        if let Some(&id) = self.unique.get(&n) {
            return Ok(id);
        }
        self.check_budget()?;
        let id = self.nodes.len() as NodeId;
        self.nodes.push(n);
        self.unique.insert(n, id);
        Ok(id)
    }

    pub(crate) fn mk(&mut self, var: u32, lo: NodeId, hi: NodeId) -> DdResult<NodeId> {
        if lo == hi {
            return Ok(lo);
        }
        debug_assert!(var < self.level(lo) && var < self.level(hi), "ordering violated");
        let n = Node { var, lo, hi };
        if let Some(&id) = self.unique.get(&n) {
            return Ok(id);
        }
        self.check_budget()?;
        let id = self.nodes.len() as NodeId;
        self.nodes.push(n);
        self.unique.insert(n, id);
        Ok(id)
    }

    pub fn constant(&mut self, value: i64) -> DdResult<Add> {
        self.terminal(value).map(Add)
    }

    /// Terminal value if `a` is a constant.
    pub fn constant_value(&self, a: Add) -> Option<i64> {
        let n = self.node(a.0);
        n.is_terminal().then(|| n.value())
    }

    pub fn bdd_var(&mut self, v: VarId) -> DdResult<Bdd> {
        debug_assert!(v.0 < self.num_vars, "variable outside the universe");
        self.mk(v.0, FALSE, TRUE).map(Bdd)
    }

    /// ADD node `v ? hi : lo` (requires both children below `v` in the order).
    pub fn add_node(&mut self, v: VarId, lo: Add, hi: Add) -> DdResult<Add> {
        debug_assert!(v.0 < self.num_vars, "variable outside the universe");
        if v.0 < self.level(lo.0) && v.0 < self.level(hi.0) {
            self.mk(v.0, lo.0, hi.0).map(Add)
        } else {
            let c = self.bdd_var(v)?;
            self.add_ite(c, hi, lo)
        }
    }

    pub fn add_apply(&mut self, op: ArithOp, a: Add, b: Add) -> DdResult<Add> {
        let op = match op {
            ArithOp::Plus => Op::Plus,
            ArithOp::Minus => Op::Minus,
        };
        self.apply(op, a.0, b.0).map(Add)
    }

    pub fn add_plus(&mut self, a: Add, b: Add) -> DdResult<Add> {
        self.add_apply(ArithOp::Plus, a, b)
    }

    pub fn add_minus(&mut self, a: Add, b: Add) -> DdResult<Add> {
        self.add_apply(ArithOp::Minus, a, b)
    }

    pub fn and(&mut self, a: Bdd, b: Bdd) -> DdResult<Bdd> {
        self.apply(Op::And, a.0, b.0).map(Bdd)
    }

    pub fn or(&mut self, a: Bdd, b: Bdd) -> DdResult<Bdd> {
        self.apply(Op::Or, a.0, b.0).map(Bdd)
    }

    pub fn xor(&mut self, a: Bdd, b: Bdd) -> DdResult<Bdd> {
        self.apply(Op::Xor, a.0, b.0).map(Bdd)
    }

    pub fn not(&mut self, a: Bdd) -> DdResult<Bdd> {
        self.apply(Op::Xor, a.0, TRUE).map(Bdd)
    }

    pub fn and_all(&mut self, items: impl IntoIterator<Item = Bdd>) -> DdResult<Bdd> {
        let mut acc = Bdd::TRUE;
        for b in items {
            acc = self.and(acc, b)?;
            if acc.is_false() {
                break;
            }
        }
        Ok(acc)
    }

    pub fn or_all(&mut self, items: impl IntoIterator<Item = Bdd>) -> DdResult<Bdd> {
        let mut acc = Bdd::FALSE;
        for b in items {
            acc = self.or(acc, b)?;
        }
        Ok(acc)
    }

    /// Conjunction of literals.
    pub fn cube(&mut self, literals: &[(VarId, bool)]) -> DdResult<Bdd> {
        let mut lits = literals.to_vec();
        lits.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        let mut acc = TRUE;
        for (v, positive) in lits {
            acc = if positive {
                self.mk(v.0, FALSE, acc)?
            } else {
                self.mk(v.0, acc, FALSE)?
            };
        }
        Ok(Bdd(acc))
    }

    fn terminal_case(&mut self, op: Op, a: NodeId, b: NodeId) -> DdResult<Option<NodeId>> {
        let (na, nb) = (self.node(a), self.node(b));
        let r = match op {
            Op::Plus => {
                if a == FALSE {
                    Some(b)
                } else if b == FALSE {
                    Some(a)
                } else if na.is_terminal() && nb.is_terminal() {
                    let v = na.value().checked_add(nb.value()).ok_or(DdError::Overflow)?;
                    Some(self.terminal(v)?)
                } else {
                    None
                }
            }
            Op::Minus => {
                if a == b {
                    Some(FALSE)
                } else if b == FALSE {
                    Some(a)
                } else if na.is_terminal() && nb.is_terminal() {
                    let v = na.value().checked_sub(nb.value()).ok_or(DdError::Overflow)?;
                    Some(self.terminal(v)?)
                } else {
                    None
                }
            }
            Op::And => match (a, b) {
                (FALSE, _) | (_, FALSE) => Some(FALSE),
                (TRUE, x) | (x, TRUE) => Some(x),
                _ if a == b => Some(a),
                _ => None,
            },
            Op::Or => match (a, b) {
                (TRUE, _) | (_, TRUE) => Some(TRUE),
                (FALSE, x) | (x, FALSE) => Some(x),
                _ if a == b => Some(a),
                _ => None,
            },
            Op::Xor => match (a, b) {
                (FALSE, x) | (x, FALSE) => Some(x),
                _ if a == b => Some(FALSE),
                (TRUE, TRUE) => Some(FALSE),
                _ => None,
            },
        };
        Ok(r)
    }

    fn apply(&mut self, op: Op, a: NodeId, b: NodeId) -> DdResult<NodeId> {
        if let Some(r) = self.terminal_case(op, a, b)? {
            return Ok(r);
        }
        let key = match op {
            Op::Minus => (op, a, b),
            _ => (op, a.min(b), a.max(b)),
        };
        if let Some(&r) = self.apply_cache.get(&key) {
            return Ok(r);
        }
        let (na, nb) = (self.node(a), self.node(b));
        let top = na.var.min(nb.var);
        let (a0, a1) = if na.var == top { (na.lo, na.hi) } else { (a, a) };
        let (b0, b1) = if nb.var == top { (nb.lo, nb.hi) } else { (b, b) };
        let lo = self.apply(op, a0, b0)?;
        let hi = self.apply(op, a1, b1)?;
        let r = self.mk(top, lo, hi)?;
        self.apply_cache.insert(key, r);
        Ok(r)
    }

    /// `cond ? then : otherwise`, for ADD-valued branches.
    pub fn add_ite(&mut self, cond: Bdd, then: Add, otherwise: Add) -> DdResult<Add> {
        self.ite(cond.0, then.0, otherwise.0).map(Add)
    }

    pub fn bdd_ite(&mut self, cond: Bdd, then: Bdd, otherwise: Bdd) -> DdResult<Bdd> {
        self.ite(cond.0, then.0, otherwise.0).map(Bdd)
    }

    /// Restricts `a` to the care set, mapping everything outside it to `outside`.
    pub fn add_restrict(&mut self, a: Add, care: Bdd, outside: i64) -> DdResult<Add> {
        let background = self.constant(outside)?;
        self.add_ite(care, a, background)
    }

    pub(crate) fn ite(&mut self, f: NodeId, g: NodeId, h: NodeId) -> DdResult<NodeId> {
        if f == TRUE || g == h {
            return Ok(g);
        }
        if f == FALSE {
            return Ok(h);
        }
        if g == TRUE && h == FALSE {
            return Ok(f);
        }
        let key = (f, g, h);
        if let Some(&r) = self.ite_cache.get(&key) {
            return Ok(r);
        }
        let (nf, ng, nh) = (self.node(f), self.node(g), self.node(h));
        let top = nf.var.min(ng.var).min(nh.var);
        let split = |n: Node, id: NodeId| if n.var == top { (n.lo, n.hi) } else { (id, id) };
        let (f0, f1) = split(nf, f);
        let (g0, g1) = split(ng, g);
        let (h0, h1) = split(nh, h);
        let lo = self.ite(f0, g0, h0)?;
        let hi = self.ite(f1, g1, h1)?;
        let r = self.mk(top, lo, hi)?;
        self.ite_cache.insert(key, r);
        Ok(r)
    }

    /// Maps each terminal to 1 iff it passes the threshold test.
    pub fn threshold_to_bdd(&mut self, a: Add, g: i64, mode: ThresholdMode) -> DdResult<Bdd> {
        let mut memo = FxHashMap::default();
        self.threshold_rec(a.0, g, mode, &mut memo).map(Bdd)
    }

    fn threshold_rec(
        &mut self,
        id: NodeId,
        g: i64,
        mode: ThresholdMode,
        memo: &mut FxHashMap<NodeId, NodeId>,
    ) -> DdResult<NodeId> {
        if let Some(&r) = memo.get(&id) {
            return Ok(r);
        }
        let n = self.node(id);
        let r = if n.is_terminal() {
            let v = n.value();
            let pass = match mode {
                ThresholdMode::Greater => v > g,
                ThresholdMode::AbsGreater => v.unsigned_abs() as i128 > g as i128,
            };
            if pass {
                TRUE
            } else {
                FALSE
            }
        } else {
            let lo = self.threshold_rec(n.lo, g, mode, memo)?;
            let hi = self.threshold_rec(n.hi, g, mode, memo)?;
            self.mk(n.var, lo, hi)?
        };
        memo.insert(id, r);
        Ok(r)
    }

    /// Evaluates an ADD under `assignment[var]`.
    pub fn eval_add(&self, a: Add, assignment: &[bool]) -> i64 {
        let mut id = a.0;
        loop {
            let n = self.node(id);
            if n.is_terminal() {
                return n.value();
            }
            id = if assignment[n.var as usize] { n.hi } else { n.lo };
        }
    }

    pub fn eval_bdd(&self, b: Bdd, assignment: &[bool]) -> bool {
        self.eval_add(b.as_add(), assignment) != 0
    }

    /// Like `eval_bdd`, with the assignment supplied as a lookup.
    pub fn eval_bdd_with(&self, b: Bdd, value_of: impl Fn(VarId) -> bool) -> bool {
        let mut id = b.0;
        loop {
            let n = self.node(id);
            if n.is_terminal() {
                return n.value() != 0;
            }
            id = if value_of(VarId(n.var)) { n.hi } else { n.lo };
        }
    }
}
