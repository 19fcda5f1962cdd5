//! Load the toy baseline, read and update cells, and compute the global aggregate.

use std::path::Path;
use std::sync::Arc;

use policy_lab::projection::{load_baseline, serialize, Vocabulary};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy");
    let vocab = Arc::new(Vocabulary::from_json(&std::fs::read_to_string(dir.join("vocabulary.json"))?)?);
    let series = load_baseline(&std::fs::read_to_string(dir.join("baseline.csv"))?, vocab)?;

    println!("years {}, {} cells", series.years(), series.cell_count());
    let before = series.get_value("china", 2030, "eolRecyclingMT")?;
    let updated = series.set_value("china", 2030, "eolRecyclingMT", 12.5)?;
    println!("china 2030 recycling: {before} -> {}", updated.get_value("china", 2030, "eolRecyclingMT")?);
    println!("global 2030 mismanaged: {}", series.aggregate_global(2030, "eolMismanagedMT")?);

    // Serialization is canonical, so a round trip reproduces the file byte for byte.
    let text = serialize(&series);
    assert_eq!(text, std::fs::read_to_string(dir.join("baseline.csv"))?);

    // Validation errors carry the offending line.
    let bad = text.replacen("18.5", "-1", 1);
    if let Err(e) = load_baseline(&bad, series.vocabulary().clone()) {
        println!("rejected: {e}");
    }
    Ok(())
}
