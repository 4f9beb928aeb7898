//! Uniform sampling of satisfying assignments, checked against a histogram.

use rand::rngs::StdRng;
use rand::SeedableRng;
use treesens::dd::{DdManager, VarId};

fn main() {
    let vars: Vec<VarId> = (0..4usize).map(VarId::from).collect();
    let mut mgr = DdManager::new(vars.len());
    // (x0 ∧ x1) ∨ (¬x2 ∧ x3)
    let a = mgr.cube(&[(vars[0], true), (vars[1], true)]).unwrap();
    let b = mgr.cube(&[(vars[2], false), (vars[3], true)]).unwrap();
    let f = mgr.or(a, b).unwrap();
    let models = mgr.count_models(f, &vars).unwrap();
    println!("{models} models over {} variables", vars.len());

    let mut rng = StdRng::seed_from_u64(1);
    let mut hist = std::collections::BTreeMap::new();
    for s in mgr.sample_solutions(f, 7000, &vars, &mut rng).unwrap() {
        let word: String = s.iter().map(|&b| if b { '1' } else { '0' }).collect();
        *hist.entry(word).or_insert(0) += 1;
    }
    for (w, n) in hist {
        println!("  {w}  {n}");
    }
}
