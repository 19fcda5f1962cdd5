//! Run one lever script against a single year's frame and inspect the
//! result and diagnostics.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::Arc;

use policy_lab::dsl::compile;
use policy_lab::projection::{load_baseline, Vocabulary};
use policy_lab::runtime::{run_program, RuntimeState, YearFrame};

const SCRIPT: &str = "\
var moved = in.share * out.china.eolMismanagedMT;
out.china.eolMismanagedMT = out.china.eolMismanagedMT - moved;
distribute moved across [out.china.eolRecyclingMT, out.china.eolIncinerationMT] proportionally;
change out.china.consumptionPackagingMT by -10 over 2026 to 2034;
limit out.china.eolLandfillMT to [0, 5];
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy");
    let vocab = Arc::new(Vocabulary::from_json(&std::fs::read_to_string(dir.join("vocabulary.json"))?)?);
    let baseline = load_baseline(&std::fs::read_to_string(dir.join("baseline.csv"))?, vocab.clone())?;

    let inputs: BTreeSet<String> = ["share".to_string()].into();
    let program = compile(SCRIPT, "lever.pol", &vocab, Some(&inputs)).map_err(|d| format!("{d:?}"))?;

    let year = 2030;
    let mut state = RuntimeState::new(YearFrame::from_series(&baseline, year), year).with_input("share", 0.3);
    let diagnostics = run_program(&program, &mut state)?;

    for attr in ["consumptionPackagingMT", "eolRecyclingMT", "eolIncinerationMT", "eolLandfillMT", "eolMismanagedMT"] {
        let before = baseline.get_value("china", year, attr)?;
        let after = state.frame.get("china", attr).unwrap_or(f64::NAN);
        println!("{attr:<24} {before:>10} -> {after}");
    }
    for clamp in &diagnostics.clamps_applied {
        println!("clamped {} at {}: {} -> {}", clamp.address, clamp.span, clamp.before, clamp.after);
    }
    Ok(())
}
