//! Runs the bundled honest scenario over 200 seeds in parallel, the same way
//! the `sweep` command does, and summarizes how often each outcome occurs.

use std::collections::BTreeMap;
use std::path::Path;

use blind_proxy::agents::{run_scenario, ScenarioConfig};
use rayon::prelude::*;

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/proxy-no-show.toml");
    let config = ScenarioConfig::load(&path).expect("bundled scenario loads");
    let outcomes: BTreeMap<String, usize> = (0..200u64)
        .into_par_iter()
        .map(|seed| {
            let trace = run_scenario(&ScenarioConfig { seed, ..config.clone() }).expect("scenario is valid");
            trace
                .ground_truth
                .values()
                .map(|t| t.outcome.to_string())
                .collect::<Vec<_>>()
        })
        .flatten()
        .fold(BTreeMap::new, |mut acc, o| {
            *acc.entry(o).or_insert(0) += 1;
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    println!("{} over 200 seeds", path.file_name().unwrap().to_string_lossy());
    for (outcome, n) in outcomes {
        println!("  {outcome:<40} {n}");
    }
}
