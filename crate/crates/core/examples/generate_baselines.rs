//! Regenerates `data/toy/baseline.csv` and `data/desk/baseline.csv` from the
//! vocabularies next to them.
//!
//! ```bash
//! cargo run -p policy-lab --example generate_baselines
//! ```

use std::path::Path;
use std::sync::Arc;

use policy_lab::projection::{serialize, Vocabulary, YearRange};
use policy_lab::synthetic::{self_consistent_baseline, DESK, TOY};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    for (name, (first, last, variant)) in [("toy", TOY), ("desk", DESK)] {
        let dir = data.join(name);
        let vocab = Arc::new(Vocabulary::from_json(&std::fs::read_to_string(dir.join("vocabulary.json"))?)?);
        let years = YearRange::new(first, last).ok_or("bad year range")?;
        let series = self_consistent_baseline(vocab, years, variant);
        std::fs::write(dir.join("baseline.csv"), serialize(&series))?;
        println!("{name}: {} cells over {years}", series.cell_count());
    }
    Ok(())
}
