//! Statically check scripts against the desk vocabulary. The checker reports
//! every violation, not just the first.

use std::collections::BTreeSet;
use std::path::Path;

use policy_lab::dsl::compile;
use policy_lab::projection::Vocabulary;

const SCRIPT: &str = "\
out.china.bogusMT = 1;
out.eu30.eolRecyclingMT = later;
var later = 2;
out.global.eolLandfillMT = 0;
var life = lifecycle([out.china.eolRecyclingMT]);
out.india.eolLandfillMT = in.missing;
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/desk/vocabulary.json");
    let vocab = Vocabulary::from_json(&std::fs::read_to_string(path)?)?;
    let inputs: BTreeSet<String> = ["share".to_string()].into();

    match compile(SCRIPT, "demo.pol", &vocab, Some(&inputs)) {
        Ok(_) => println!("clean"),
        Err(diagnostics) => {
            for d in diagnostics {
                println!("demo.pol:{}: {}: {}", d.span, d.kind, d.message);
            }
        }
    }
    Ok(())
}
