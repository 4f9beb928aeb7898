//! Streaming estimation of the size of a union of sets, each given as the
//! models of a BDD paired with two masks.
//!
//! The sketch holds a multiset `X` of sampled regions and a sampling rate
//! `p = 2^-j`. For each incoming set `U_k`:
//!
//! 1. every element of `X` that lies in `U_k` is dropped;
//! 2. `N ~ Poisson(|U_k| p)` fresh samples are drawn;
//! 3. while `N + |X| >= Thresh`, `p` halves, each element of `X` survives
//!    with probability 1/2 and `N ~ Binomial(N, 1/2)`;
//! 4. `N` uniform elements of `U_k` are added.
//!
//! Afterwards every element of the union carries an independent
//! `Poisson(p)` multiplicity, so `|X| / p` estimates the union size.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::rngs::StdRng;
use rand::{Rng, RngExt};
use rand_distr::{Binomial, Distribution, Poisson};

use crate::dd::{Bdd, DdManager, DdResult, VarId};
use crate::error::{Error, Result};

/// Sketch capacity `max(12 ln(24/δ)/ε², 6 (ln(6/δ) + ln n))` for `n`
/// subproblems.
pub fn compute_thresh(epsilon: f64, delta: f64, num_subproblems: usize) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Config(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Config(format!("delta must lie in (0, 1), got {delta}")));
    }
    if num_subproblems == 0 {
        return Err(Error::Config("no subproblems to merge".into()));
    }
    let accuracy = 12.0 * (24.0 / delta).ln() / (epsilon * epsilon);
    let overflow = 6.0 * ((6.0 / delta).ln() + (num_subproblems as f64).ln());
    Ok(accuracy.max(overflow))
}

/// Non-sensitive assignment packed into words.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Packed(Vec<u64>);

impl Packed {
    fn from_bits(bits: &[bool]) -> Self {
        let mut words = vec![0u64; bits.len().div_ceil(64)];
        for (i, &b) in bits.iter().enumerate() {
            if b {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        Packed(words)
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
}

/// Rates above this are pre-thinned before the Poisson draw; a sketch whose
/// capacity is far below it would halve through them anyway.
const MAX_LOG2_RATE: u64 = 55;

fn binomial_half<R: Rng + ?Sized>(n: u64, rng: &mut R) -> u64 {
    if n == 0 {
        return 0;
    }
    Binomial::new(n, 0.5).expect("valid binomial").sample(rng)
}

#[derive(Debug, Clone)]
pub struct PepinSketch {
    thresh: f64,
    /// `p = 2^-halvings`.
    halvings: u32,
    /// Multiplicities keyed by mask position, then by the packed rest.
    elements: BTreeMap<usize, BTreeMap<Packed, u64>>,
    size: u64,
    rest_vars: Vec<VarId>,
    rest_pos: Vec<Option<usize>>,
}

impl PepinSketch {
    /// `rest_vars` are the (ascending) non-sensitive variables the subproblem
    /// formulas range over.
    pub fn new(thresh: f64, rest_vars: Vec<VarId>) -> Self {
        let span = rest_vars.iter().map(|v| v.index() + 1).max().unwrap_or(0);
        let mut rest_pos = vec![None; span];
        for (i, v) in rest_vars.iter().enumerate() {
            rest_pos[v.index()] = Some(i);
        }
        PepinSketch {
            thresh,
            halvings: 0,
            elements: BTreeMap::new(),
            size: 0,
            rest_vars,
            rest_pos,
        }
    }

    pub fn thresh(&self) -> f64 {
        self.thresh
    }

    /// Multiset cardinality `|X|`.
    pub fn len(&self) -> u64 {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn p(&self) -> f64 {
        (-(self.halvings as f64)).exp2()
    }

    pub fn halvings(&self) -> u32 {
        self.halvings
    }

    /// `|X| / p`.
    pub fn estimate(&self) -> f64 {
        self.size as f64 * (self.halvings as f64).exp2()
    }

    fn halve<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        self.halvings += 1;
        let mut size = 0;
        for bucket in self.elements.values_mut() {
            bucket.retain(|_, count| {
                *count = binomial_half(*count, rng);
                size += *count;
                *count > 0
            });
        }
        self.elements.retain(|_, bucket| !bucket.is_empty());
        self.size = size;
    }

    /// Removes every copy of the elements `(rest, mask)` with `rest ⊨ phi`
    /// and `mask ∈ masks`.
    fn remove_covered(&mut self, mgr: &DdManager, phi: Bdd, masks: [usize; 2]) {
        if phi.is_false() {
            return;
        }
        let rest_pos = &self.rest_pos;
        let mut removed = 0;
        for mask in masks {
            if let Some(bucket) = self.elements.get_mut(&mask) {
                bucket.retain(|rest, count| {
                    let covered = mgr.eval_bdd_with(phi, |v| {
                        let pos = rest_pos[v.index()].expect("formula reads a sensitive variable");
                        rest.get(pos)
                    });
                    if covered {
                        removed += *count;
                    }
                    !covered
                });
            }
        }
        self.size -= removed;
    }

    /// Poisson(|U| p) draw; rates beyond 2^55 are first thinned by halving,
    /// which keeps the draw inside the sampler's range.
    fn draw_count<R: Rng + ?Sized>(&mut self, universe: &BigUint, rng: &mut R) -> u64 {
        if universe.bits() == 0 {
            return 0;
        }
        while universe.bits() > self.halvings as u64 + MAX_LOG2_RATE {
            self.halve(rng);
        }
        let shift = universe.bits().saturating_sub(64);
        let lambda = (universe >> shift).to_f64().unwrap() * (shift as f64 - self.halvings as f64).exp2();
        if lambda <= 0.0 {
            return 0;
        }
        Poisson::new(lambda).expect("valid poisson rate").sample(rng) as u64
    }

    /// Folds the set `{(r, m) : r ⊨ phi, m ∈ {mask1, mask2}}` into the sketch.
    /// `universe` is its size `2·|Sol(phi)|`.
    pub fn absorb(
        &mut self,
        mgr: &DdManager,
        phi: Bdd,
        universe: &BigUint,
        masks: [usize; 2],
        rng: &mut StdRng,
    ) -> DdResult<()> {
        self.remove_covered(mgr, phi, masks);
        let mut n = self.draw_count(universe, rng);
        while (n + self.size) as f64 >= self.thresh {
            self.halve(rng);
            n = binomial_half(n, rng);
        }
        if n > 0 {
            let samples = mgr.sample_solutions(phi, n as usize, &self.rest_vars, rng)?;
            for rest in samples {
                let mask = if rng.random_bool(0.5) { masks[0] } else { masks[1] };
                *self
                    .elements
                    .entry(mask)
                    .or_default()
                    .entry(Packed::from_bits(&rest))
                    .or_insert(0) += 1;
            }
            self.size += n;
        }
        assert!((self.size as f64) < self.thresh, "sketch exceeded its capacity");
        Ok(())
    }
}
