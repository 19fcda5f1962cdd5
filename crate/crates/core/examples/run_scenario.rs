//! Run the five-lever desk scenario end to end and print headline numbers.

use std::path::Path;
use std::sync::Arc;

use policy_lab::engine::{headlines, run_scenario, EngineConfig, ScenarioDocument};
use policy_lab::projection::{load_baseline, Vocabulary};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/desk");
    let vocab = Arc::new(Vocabulary::from_json(&std::fs::read_to_string(dir.join("vocabulary.json"))?)?);
    let baseline = load_baseline(&std::fs::read_to_string(dir.join("baseline.csv"))?, vocab.clone())?;

    let doc = ScenarioDocument::from_json(&std::fs::read_to_string(dir.join("scenario.json"))?)?.inline_scripts(&dir)?;
    let scenario = doc.compile(&vocab)?;
    let result = run_scenario(&baseline, &scenario, &EngineConfig::default())?;

    let h = headlines(&result);
    println!("run years {}", result.run_years);
    println!("cumulative global mismanaged: {:.3} MT", h.cumulative_global_mismanaged);
    for (region, fates) in &h.end_year_fates {
        println!("{region:>6} {}: {fates:?}", h.end_year);
    }
    let clamps: usize = result
        .diagnostics
        .iter()
        .flat_map(|y| &y.levers)
        .map(|l| l.diagnostics.clamps_applied.len())
        .sum();
    println!("clamps applied across the run: {clamps}");
    Ok(())
}
