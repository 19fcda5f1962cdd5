use std::path::Path;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use policy_lab::engine::{run_scenario, EngineConfig, ScenarioDocument};
use policy_lab::projection::{load_baseline, Vocabulary};

fn desk_check_and_simulate(c: &mut Criterion) {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/desk");
    let read = |name: &str| std::fs::read_to_string(dir.join(name)).unwrap();
    let vocab = Arc::new(Vocabulary::from_json(&read("vocabulary.json")).unwrap());
    let baseline = load_baseline(&read("baseline.csv"), vocab.clone()).unwrap();
    let doc = ScenarioDocument::from_json(&read("scenario.json")).unwrap().inline_scripts(&dir).unwrap();

    c.bench_function("desk check + simulate", |b| {
        b.iter(|| {
            let scenario = doc.compile(&vocab).unwrap();
            run_scenario(&baseline, &scenario, &EngineConfig::default()).unwrap()
        })
    });
}

criterion_group!(benches, desk_check_and_simulate);
criterion_main!(benches);
