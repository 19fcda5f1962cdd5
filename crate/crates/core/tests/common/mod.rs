//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

pub mod expr_oracle;
pub mod log_capture;
pub mod reference;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use policy_lab::engine::ScenarioDocument;
use policy_lab::projection::{load_baseline, ProjectionSeries, Vocabulary};

pub fn data_dir(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn read(path: impl AsRef<Path>) -> String {
    let path = path.as_ref();
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn vocabulary(name: &str) -> Arc<Vocabulary> {
    Arc::new(Vocabulary::from_json(&read(data_dir(name).join("vocabulary.json"))).expect("shipped vocabulary is valid"))
}

pub fn baseline(name: &str) -> ProjectionSeries {
    load_baseline(&read(data_dir(name).join("baseline.csv")), vocabulary(name)).expect("shipped baseline is valid")
}

pub fn toy() -> ProjectionSeries {
    baseline("toy")
}

pub fn desk() -> ProjectionSeries {
    baseline("desk")
}

/// A scenario file from `data/<name>/` with every `script_path` inlined.
pub fn scenario_doc(name: &str, file: &str) -> ScenarioDocument {
    let dir = data_dir(name);
    ScenarioDocument::from_json(&read(dir.join(file)))
        .expect("scenario parses")
        .inline_scripts(&dir)
        .expect("scripts readable")
}

/// Every `.pol` file in the conformance corpus, sorted by name.
pub fn corpus() -> Vec<(String, String)> {
    let mut files: Vec<_> = std::fs::read_dir(corpus_dir())
        .expect("corpus dir")
        .map(|e| e.expect("dir entry").path())
        .filter(|p| p.extension().is_some_and(|x| x == "pol"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), read(&p)))
        .collect()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// The toy vocabulary over forty years, for full-length runs.
pub fn toy40() -> ProjectionSeries {
    policy_lab::synthetic::self_consistent_baseline(
        vocabulary("toy"),
        policy_lab::projection::YearRange::new(2011, 2050).unwrap(),
        0,
    )
}

/// A lever with `(name, default, min, max)` inputs.
pub fn lever(id: &str, inputs: &[(&str, f64, f64, f64)], script: &str, vocab: &Vocabulary) -> policy_lab::engine::Lever {
    let inputs = inputs
        .iter()
        .map(|&(n, default, min, max)| (n.to_string(), policy_lab::engine::InputSpec { default, min, max }))
        .collect();
    policy_lab::engine::Lever::new(id, id, inputs, script, "", vocab).unwrap_or_else(|e| panic!("{id}: {e}"))
}

/// Largest relative gap between Σ fates and the brute-force waste over
/// every region-year of `years`.
pub fn worst_conservation_gap(series: &ProjectionSeries, years: policy_lab::projection::YearRange) -> f64 {
    let grid = reference::Grid::from_series(series);
    let fates = series.vocabulary().fate_indices();
    let mut worst: f64 = 0.0;
    for r in 0..grid.regions.len() {
        for year in years.iter() {
            let waste = grid.waste(r, year);
            let sum: f64 = fates.iter().map(|&i| series.at(r, year, i)).sum();
            if sum != waste {
                worst = worst.max((sum - waste).abs() / waste.abs().max(sum.abs()));
            }
        }
    }
    worst
}
