//! The edit loop: each "save" of a lever script is checked and the whole
//! desk scenario re-simulated. Prints the time per iteration.

use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use policy_lab::engine::{run_scenario, EngineConfig, ScenarioDocument, ScriptSource};
use policy_lab::projection::{load_baseline, Vocabulary};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/desk");
    let vocab = Arc::new(Vocabulary::from_json(&std::fs::read_to_string(dir.join("vocabulary.json"))?)?);
    let baseline = load_baseline(&std::fs::read_to_string(dir.join("baseline.csv"))?, vocab.clone())?;
    let doc = ScenarioDocument::from_json(&std::fs::read_to_string(dir.join("scenario.json"))?)?.inline_scripts(&dir)?;

    // Successive edits to the recycling lever, including one with a typo.
    let edits = [
        "var moved = in.share * out.china.eolMismanagedMT;\nout.china.eolMismanagedMT = out.china.eolMismanagedMT - moved;\nout.china.eolRecyclingMT = out.china.eolRecyclingMT + moved;\n",
        "var moved = in.share * out.china.eolMismangedMT;\n",
        "var moved = in.share * 1.5 * out.china.eolMismanagedMT;\nout.china.eolMismanagedMT = out.china.eolMismanagedMT - moved;\nout.china.eolRecyclingMT = out.china.eolRecyclingMT + moved;\n",
    ];
    for (i, edit) in edits.iter().enumerate() {
        let started = Instant::now();
        let mut doc = doc.clone();
        doc.levers[1].script = ScriptSource::Inline(edit.to_string());
        let outcome = doc
            .compile(&vocab)
            .and_then(|scenario| run_scenario(&baseline, &scenario, &EngineConfig::default()));
        let ms = started.elapsed().as_secs_f64() * 1000.0;
        match outcome {
            Ok(result) => {
                let global = result.series.aggregate_global(2050, "eolMismanagedMT")?;
                println!("edit {i}: ok in {ms:.2} ms, global 2050 mismanaged {global:.3}");
            }
            Err(e) => println!("edit {i}: rejected in {ms:.2} ms: {e}"),
        }
    }
    Ok(())
}
