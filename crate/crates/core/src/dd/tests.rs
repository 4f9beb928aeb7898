use num_bigint::BigUint;
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use rand::rngs::StdRng;
use rand::SeedableRng;

use super::*;

fn v(i: usize) -> VarId {
    VarId::from(i)
}

fn vars(n: usize) -> Vec<VarId> {
    (0..n).map(v).collect()
}

fn assignment(bits: u32, n: usize) -> Vec<bool> {
    (0..n).map(|i| bits >> i & 1 == 1).collect()
}

fn truth_table(mgr: &DdManager, b: Bdd, n: usize) -> Vec<bool> {
    (0..1u32 << n).map(|m| mgr.eval_bdd(b, &assignment(m, n))).collect()
}

fn brute_count(mgr: &DdManager, b: Bdd, n: usize) -> u64 {
    truth_table(mgr, b, n).into_iter().filter(|&x| x).count() as u64
}

/// Builds a BDD from a truth table by Shannon expansion (bottom-up mk).
fn from_table(mgr: &mut DdManager, table: &[bool], n: usize) -> Bdd {
    fn rec(mgr: &mut DdManager, table: &[bool], var: usize, n: usize, fixed: u32) -> Bdd {
        if var == n {
            return if table[fixed as usize] { Bdd::TRUE } else { Bdd::FALSE };
        }
        let lo = rec(mgr, table, var + 1, n, fixed);
        let hi = rec(mgr, table, var + 1, n, fixed | 1 << var);
        let x = mgr.bdd_var(v(var)).unwrap();
        mgr.bdd_ite(x, hi, lo).unwrap()
    }
    rec(mgr, table, 0, n, 0)
}

/// Builds the same function as a disjunction of minterms, last minterm first.
fn from_minterms(mgr: &mut DdManager, table: &[bool], n: usize) -> Bdd {
    let mut acc = Bdd::FALSE;
    for m in (0..table.len()).rev().filter(|&m| table[m]) {
        let lits: Vec<(VarId, bool)> = (0..n).map(|i| (v(i), m >> i & 1 == 1)).collect();
        let c = mgr.cube(&lits).unwrap();
        acc = mgr.or(c, acc).unwrap();
    }
    acc
}

#[test]
fn constants_and_apply() {
    let mut mgr = DdManager::new(4);
    let three = mgr.constant(3).unwrap();
    let four = mgr.constant(4).unwrap();
    let seven = mgr.add_plus(three, four).unwrap();
    assert_eq!(mgr.constant_value(seven), Some(7));
    let x = mgr.bdd_var(v(0)).unwrap();
    let a = mgr.add_ite(x, three, four).unwrap();
    let zero = mgr.add_minus(a, a).unwrap();
    assert_eq!(mgr.constant_value(zero), Some(0));
}

#[test]
fn overflow_is_reported() {
    let mut mgr = DdManager::new(1);
    let big = mgr.constant(i64::MAX).unwrap();
    let one = mgr.constant(1).unwrap();
    assert_eq!(mgr.add_plus(big, one), Err(DdError::Overflow));
}

#[test]
fn threshold_examples() {
    let mut mgr = DdManager::new(2);
    let x = mgr.bdd_var(v(0)).unwrap();
    let lo = mgr.constant(-15).unwrap();
    let hi = mgr.constant(70).unwrap();
    let a = mgr.add_ite(x, hi, lo).unwrap();
    assert!(mgr.threshold_to_bdd(a, 80, ThresholdMode::Greater).unwrap().is_false());
    let b = mgr.threshold_to_bdd(a, 60, ThresholdMode::AbsGreater).unwrap();
    assert_eq!(b, x);
    let c = mgr.constant(0).unwrap();
    assert!(mgr.threshold_to_bdd(c, 0, ThresholdMode::Greater).unwrap().is_false());
    assert!(mgr.threshold_to_bdd(c, 5, ThresholdMode::AbsGreater).unwrap().is_false());
    let neg = mgr.add_ite(x, lo, c).unwrap();
    let abs = mgr.threshold_to_bdd(neg, 10, ThresholdMode::AbsGreater).unwrap();
    assert_eq!(abs, x);
}

#[test]
fn distance_constraint_counts() {
    let mut mgr = DdManager::new(4);
    let a = [v(0), v(2)];
    let b = [v(1), v(3)];
    let all = vars(4);
    let expected = [4u32, 12, 16];
    for (d, want) in expected.iter().enumerate() {
        let c = mgr.at_most_distance(&a, &b, d).unwrap();
        assert_eq!(mgr.count_models(c, &all).unwrap(), BigUint::from(*want));
        // Brute force: count pairs with at most d differences.
        let brute = (0..16u32)
            .filter(|m| {
                let bits = assignment(*m, 4);
                let diff = (bits[0] != bits[1]) as usize + (bits[2] != bits[3]) as usize;
                diff <= d
            })
            .count() as u32;
        assert_eq!(brute, *want);
    }
    assert!(mgr.at_most_distance(&a, &b, 2).unwrap().is_true());
    assert_eq!(
        mgr.at_most_distance(&a, &b[..1], 1),
        Err(DdError::LengthMismatch(2, 1))
    );
}

#[test]
fn substitution_examples() {
    let mut mgr = DdManager::new(4);
    let x = mgr.bdd_var(v(0)).unwrap();
    let y = mgr.bdd_var(v(2)).unwrap();
    let ten = mgr.constant(10).unwrap();
    let five = mgr.constant(5).unwrap();
    let t = mgr.add_ite(x, ten, five).unwrap();
    let a = mgr.add_ite(y, t, five).unwrap();
    assert_eq!(mgr.substitute_vars(a, &[(v(0), v(0))]).unwrap(), a);
    assert_eq!(mgr.substitute_vars(ten, &[(v(0), v(1))]).unwrap(), ten);
    let renamed = mgr.substitute_vars(a, &[(v(0), v(1))]).unwrap();
    assert_eq!(mgr.support(renamed), vec![v(1), v(2)]);
    for m in 0..16 {
        let bits = assignment(m, 4);
        let mut moved = bits.clone();
        moved[0] = bits[1];
        assert_eq!(mgr.eval_add(renamed, &bits), mgr.eval_add(a, &moved));
    }
    assert_eq!(
        mgr.substitute_vars(a, &[(v(0), v(2))]),
        Err(DdError::ImageVarInSupport(2))
    );
    // Renaming into a variable that precedes the rest of the diagram.
    let up = mgr.substitute_vars(a, &[(v(2), v(3))]).unwrap();
    for m in 0..16 {
        let bits = assignment(m, 4);
        let mut moved = bits.clone();
        moved[2] = bits[3];
        assert_eq!(mgr.eval_add(up, &bits), mgr.eval_add(a, &moved));
    }
}

#[test]
fn projection_examples() {
    let mut mgr = DdManager::new(2);
    let a = mgr.bdd_var(v(0)).unwrap();
    let b = mgr.bdd_var(v(1)).unwrap();
    let differ = mgr.xor(a, b).unwrap();
    assert!(mgr.exists_project(differ, &[v(1)]).unwrap().is_true());
    assert_eq!(mgr.exists_project(differ, &[]).unwrap(), differ);
    let both = mgr.and(a, b).unwrap();
    assert!(mgr.exists_project(both, &vars(2)).unwrap().is_true());
    assert_eq!(mgr.exists_project(both, &[v(0)]).unwrap(), b);
}

#[test]
fn counting_examples() {
    let mut mgr = DdManager::new(4);
    assert_eq!(mgr.count_models(Bdd::TRUE, &vars(4)).unwrap(), BigUint::from(16u32));
    assert_eq!(mgr.count_models(Bdd::FALSE, &vars(4)).unwrap(), BigUint::from(0u32));
    let x = mgr.bdd_var(v(2)).unwrap();
    assert_eq!(
        mgr.count_models(x, &[v(0), v(1)]),
        Err(DdError::SupportNotInUniverse(2))
    );
    let many = DdManager::new(100);
    let all: Vec<VarId> = (0..100).map(v).collect();
    assert_eq!(many.count_models(Bdd::TRUE, &all).unwrap(), BigUint::from(1u8) << 100);
}

#[test]
fn sampling_single_solution() {
    let mut mgr = DdManager::new(1);
    let x = mgr.bdd_var(v(0)).unwrap();
    let mut rng = StdRng::seed_from_u64(3);
    let samples = mgr.sample_solutions(x, 50, &[v(0)], &mut rng).unwrap();
    assert!(samples.iter().all(|s| s == &vec![true]));
    assert_eq!(
        mgr.sample_solutions(Bdd::FALSE, 1, &[v(0)], &mut rng),
        Err(DdError::Unsatisfiable)
    );
}

/// Pearson statistic against a uniform distribution over `cells` outcomes.
fn chi_square(counts: &[u64], total: u64) -> f64 {
    let expected = total as f64 / counts.len() as f64;
    counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum()
}

#[test]
fn sampling_full_cube_is_uniform() {
    let mgr = DdManager::new(3);
    let mut rng = StdRng::seed_from_u64(11);
    let samples = mgr.sample_solutions(Bdd::TRUE, 30_000, &vars(3), &mut rng).unwrap();
    let mut counts = [0u64; 8];
    for s in &samples {
        let idx = s.iter().enumerate().map(|(i, &b)| (b as usize) << i).sum::<usize>();
        counts[idx] += 1;
    }
    // 7 degrees of freedom, critical value at p = 0.001.
    assert!(chi_square(&counts, 30_000) < 24.322, "{counts:?}");
}

#[test]
fn dot_export_lists_nodes() {
    let mut mgr = DdManager::new(2);
    let x = mgr.bdd_var(v(0)).unwrap();
    let a = mgr.constant(30).unwrap();
    let b = mgr.constant(-30).unwrap();
    let f = mgr.add_ite(x, a, b).unwrap();
    let dot = mgr.to_dot(f, |var| format!("b{var}"));
    assert!(dot.contains("label=\"b0\""));
    assert!(dot.contains("label=\"30\""));
    assert!(dot.contains("label=\"-30\""));
    assert!(dot.contains("style=dashed"));
}

#[test]
fn node_limit_is_enforced() {
    let mut mgr = DdManager::with_limits(
        20,
        Limits {
            deadline: None,
            max_nodes: Some(10),
            max_bytes: None,
        },
    );
    let a = vars(10);
    let b: Vec<VarId> = (10..20).map(v).collect();
    assert!(matches!(
        mgr.at_most_distance(&a, &b, 3),
        Err(DdError::NodeLimit { limit: 10 })
    ));
}

#[test]
fn byte_limit_is_enforced() {
    let limits = Limits {
        max_bytes: Some(64 << 10),
        ..Limits::default()
    };
    let mut mgr = DdManager::with_limits(40, limits);
    let a: Vec<VarId> = (0..20).map(v).collect();
    let b: Vec<VarId> = (20..40).map(v).collect();
    assert!(matches!(
        mgr.at_most_distance(&a, &b, 10),
        Err(DdError::MemoryLimit { .. })
    ));
    assert!(mgr.peak_bytes() > 64 << 10);
}

#[derive(Debug, Clone)]
enum Expr {
    Var(usize),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Xor(Box<Expr>, Box<Expr>),
}

fn expr_strategy(n: usize) -> impl Strategy<Value = Expr> {
    let leaf = (0..n).prop_map(Expr::Var);
    leaf.prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Not(Box::new(e))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::And(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Or(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Expr::Xor(Box::new(a), Box::new(b))),
        ]
    })
}

fn build(mgr: &mut DdManager, e: &Expr) -> Bdd {
    match e {
        Expr::Var(i) => mgr.bdd_var(v(*i)).unwrap(),
        Expr::Not(a) => {
            let a = build(mgr, a);
            mgr.not(a).unwrap()
        }
        Expr::And(a, b) => {
            let (a, b) = (build(mgr, a), build(mgr, b));
            mgr.and(a, b).unwrap()
        }
        Expr::Or(a, b) => {
            let (a, b) = (build(mgr, a), build(mgr, b));
            mgr.or(a, b).unwrap()
        }
        Expr::Xor(a, b) => {
            let (a, b) = (build(mgr, a), build(mgr, b));
            mgr.xor(a, b).unwrap()
        }
    }
}

fn add_strategy(n: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-50i64..50, 1 << n)
}

/// ADD built from a value table (index bit i = variable i).
fn add_from_table(mgr: &mut DdManager, table: &[i64], n: usize) -> Add {
    fn rec(mgr: &mut DdManager, table: &[i64], var: usize, n: usize, fixed: usize) -> Add {
        if var == n {
            return mgr.constant(table[fixed]).unwrap();
        }
        let lo = rec(mgr, table, var + 1, n, fixed);
        let hi = rec(mgr, table, var + 1, n, fixed | 1 << var);
        mgr.add_node(v(var), lo, hi).unwrap()
    }
    rec(mgr, table, 0, n, 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn canonicity_equal_tables_iff_equal_handles(e1 in expr_strategy(6), e2 in expr_strategy(6)) {
        let n = 6;
        let mut mgr = DdManager::new(n);
        let a = build(&mut mgr, &e1);
        let b = build(&mut mgr, &e2);
        let (ta, tb) = (truth_table(&mgr, a, n), truth_table(&mgr, b, n));
        prop_assert_eq!(ta == tb, a == b);
        // Two further construction routes for the same function.
        let c = from_table(&mut mgr, &ta, n);
        let d = from_minterms(&mut mgr, &ta, n);
        prop_assert_eq!(a, c);
        prop_assert_eq!(a, d);
    }

    #[test]
    fn canonicity_from_random_tables(table in prop::collection::vec(any::<bool>(), 1 << 10)) {
        let n = 10;
        let mut mgr = DdManager::new(n);
        let a = from_table(&mut mgr, &table, n);
        let b = from_minterms(&mut mgr, &table, n);
        prop_assert_eq!(a, b);
        prop_assert_eq!(truth_table(&mgr, a, n), table);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn apply_is_pointwise(ta in add_strategy(8), tb in add_strategy(8)) {
        let n = 8;
        let mut mgr = DdManager::new(n);
        let a = add_from_table(&mut mgr, &ta, n);
        let b = add_from_table(&mut mgr, &tb, n);
        let sum = mgr.add_apply(ArithOp::Plus, a, b).unwrap();
        let diff = mgr.add_apply(ArithOp::Minus, a, b).unwrap();
        for m in 0..1usize << n {
            let bits = assignment(m as u32, n);
            prop_assert_eq!(mgr.eval_add(sum, &bits), ta[m] + tb[m]);
            prop_assert_eq!(mgr.eval_add(diff, &bits), ta[m] - tb[m]);
        }
        // Cache clearing does not change results.
        mgr.clear_caches();
        prop_assert_eq!(mgr.add_apply(ArithOp::Plus, a, b).unwrap(), sum);
        prop_assert_eq!(mgr.add_apply(ArithOp::Minus, a, b).unwrap(), diff);
    }

    #[test]
    fn threshold_matches_pointwise(ta in add_strategy(6), g in -60i64..60) {
        let n = 6;
        let mut mgr = DdManager::new(n);
        let a = add_from_table(&mut mgr, &ta, n);
        let gt = mgr.threshold_to_bdd(a, g, ThresholdMode::Greater).unwrap();
        let abs = mgr.threshold_to_bdd(a, g, ThresholdMode::AbsGreater).unwrap();
        for m in 0..1usize << n {
            let bits = assignment(m as u32, n);
            prop_assert_eq!(mgr.eval_bdd(gt, &bits), ta[m] > g);
            prop_assert_eq!(mgr.eval_bdd(abs, &bits), ta[m].abs() > g);
        }
    }

    #[test]
    fn count_matches_enumeration(e in expr_strategy(12)) {
        let n = 12;
        let mut mgr = DdManager::new(n);
        let b = build(&mut mgr, &e);
        let count = mgr.count_models(b, &vars(n)).unwrap();
        prop_assert_eq!(count, BigUint::from(brute_count(&mgr, b, n)));
    }

    #[test]
    fn projection_is_or_over_completions(e in expr_strategy(10), mask in 0u32..1 << 10) {
        let n = 10;
        let mut mgr = DdManager::new(n);
        let b = build(&mut mgr, &e);
        let q: Vec<VarId> = (0..n).filter(|i| mask >> i & 1 == 1).map(v).collect();
        let p = mgr.exists_project(b, &q).unwrap();
        for m in 0..1u32 << n {
            let free = m & !mask;
            let mut any = false;
            // Enumerate every completion of the quantified variables.
            let mut sub = mask;
            loop {
                any |= mgr.eval_bdd(b, &assignment(free | sub, n));
                if sub == 0 { break; }
                sub = (sub - 1) & mask;
            }
            prop_assert_eq!(mgr.eval_bdd(p, &assignment(m, n)), any);
        }
    }

    #[test]
    fn samples_are_models(e in expr_strategy(8), seed in any::<u64>()) {
        let n = 8;
        let mut mgr = DdManager::new(n);
        let b = build(&mut mgr, &e);
        prop_assume!(!b.is_false());
        let mut rng = StdRng::seed_from_u64(seed);
        // Universe larger than the support exercises free-variable filling.
        let universe = vars(n);
        for s in mgr.sample_solutions(b, 64, &universe, &mut rng).unwrap() {
            prop_assert!(mgr.eval_bdd(b, &s));
        }
    }
}

#[test]
fn sampling_uniform_on_small_solution_sets() {
    // Fixtures with at most 64 solutions; 10^4 samples each; chi-square at p = 0.001.
    let n = 8;
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let mut checked = 0;
    while checked < 12 {
        let e = expr_strategy(n).new_tree(&mut runner).unwrap().current();
        let mut mgr = DdManager::new(n);
        let b = build(&mut mgr, &e);
        let models: Vec<u32> = (0..1u32 << n)
            .filter(|&m| mgr.eval_bdd(b, &assignment(m, n)))
            .collect();
        if models.len() < 2 || models.len() > 64 {
            continue;
        }
        checked += 1;
        let mut rng = StdRng::seed_from_u64(checked);
        let total = 10_000u64;
        let mut counts = vec![0u64; models.len()];
        for s in mgr.sample_solutions(b, total as usize, &vars(n), &mut rng).unwrap() {
            let m = s.iter().enumerate().map(|(i, &x)| (x as u32) << i).sum::<u32>();
            counts[models.binary_search(&m).unwrap()] += 1;
        }
        let stat = chi_square(&counts, total);
        let crit = chi_square_critical_001(models.len() - 1);
        assert!(stat < crit, "{} models: chi2 {stat} >= {crit}", models.len());
    }
}

/// Upper 0.001 quantile of chi-square, Wilson-Hilferty approximation.
pub(crate) fn chi_square_critical_001(dof: usize) -> f64 {
    let k = dof as f64;
    let z = 3.090_232_306;
    let t = 1.0 - 2.0 / (9.0 * k) + z * (2.0 / (9.0 * k)).sqrt();
    k * t.powi(3)
}
