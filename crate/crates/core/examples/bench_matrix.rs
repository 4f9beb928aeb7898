//! Tiny benchmark: three generated instances against every mode, CSV rows
//! on stdout and PAR-2 scores on stderr.

use treesens::bench::{par2, run_matrix, write_csv, write_par2, BenchMatrix};
use treesens::gen::{generate, GenParams};
use treesens::model::to_json;
use treesens::run::Mode;

fn main() -> treesens::Result<()> {
    let dir = std::env::temp_dir().join("treesens-bench-example");
    std::fs::create_dir_all(&dir)?;
    let mut instances = Vec::new();
    for (i, trees) in [4, 8, 12].into_iter().enumerate() {
        let p = GenParams { trees, depth: 3, features: 4, guards_per_feature: 3, seed: i as u64, ..GenParams::default() };
        let path = dir.join(format!("bench{i}.json"));
        std::fs::write(&path, to_json(&generate(&p)?))?;
        instances.push(path);
    }
    let matrix = BenchMatrix {
        modes: Mode::ALL.to_vec(),
        instances,
        sensitive: vec![0],
        gap: 0.5,
        distance: 1,
        epsilon: 0.1,
        delta: 0.1,
        precision: 3,
        seed: 0,
        timeout_secs: 10.0,
        memory_cap_mb: Some(512),
    };
    let rows = run_matrix(&matrix);
    write_csv(&rows, std::io::stdout().lock())?;
    write_par2(&par2(&rows, matrix.timeout_secs), std::io::stderr().lock())?;
    Ok(())
}
