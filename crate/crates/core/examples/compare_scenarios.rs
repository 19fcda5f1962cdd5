//! Compare an empty scenario with a packaging cut on the toy baseline.

use std::path::Path;
use std::sync::Arc;

use policy_lab::engine::{compare_scenarios, run_scenario, EngineConfig, ScenarioDocument};
use policy_lab::projection::{load_baseline, Vocabulary};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy");
    let vocab = Arc::new(Vocabulary::from_json(&std::fs::read_to_string(dir.join("vocabulary.json"))?)?);
    let baseline = load_baseline(&std::fs::read_to_string(dir.join("baseline.csv"))?, vocab.clone())?;

    let run = |name: &str| -> Result<_, Box<dyn std::error::Error>> {
        let doc = ScenarioDocument::from_json(&std::fs::read_to_string(dir.join(name))?)?;
        Ok(run_scenario(&baseline, &doc.compile(&vocab)?, &EngineConfig::default())?)
    };
    let a = run("empty.json")?;
    let b = run("packaging_cut.json")?;
    let cmp = compare_scenarios(&a, &b)?;

    println!("cumulative mismanaged delta: {}", cmp.cumulative_mismanaged_delta());
    for (region, fates) in cmp.end_year_fate_deltas() {
        println!("{region}: {fates:?}");
    }
    for (region, year, attr, delta) in cmp.deltas.nonzero().take(5) {
        println!("{year} {region} {attr} {delta:+}");
    }
    Ok(())
}
