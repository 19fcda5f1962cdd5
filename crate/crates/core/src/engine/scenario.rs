use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::EngineError;
use crate::dsl::{compile, CheckedProgram, Diagnostic};
use crate::projection::{Vocabulary, YearRange};

/// Bounds and default for one lever input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InputSpec {
    pub default: f64,
    pub min: f64,
    pub max: f64,
}

/// Where a lever's script text comes from in a scenario document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ScriptSource {
    #[serde(rename = "inline_script")]
    Inline(String),
    #[serde(rename = "script_path")]
    Path(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeverDocument {
    pub id: String,
    #[serde(default)]
    pub display_name: String,
    #[serde(default)]
    pub inputs: BTreeMap<String, InputSpec>,
    #[serde(flatten)]
    pub script: ScriptSource,
    #[serde(default)]
    pub description: String,
}

/// The scenario file format:
/// `{levers: [...], values: {lever: {param: n}}, years: [start, end]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioDocument {
    #[serde(default)]
    pub levers: Vec<LeverDocument>,
    #[serde(default)]
    pub values: BTreeMap<String, BTreeMap<String, f64>>,
    pub years: YearRange,
}

impl ScenarioDocument {
    pub fn from_json(text: &str) -> Result<Self, EngineError> {
        serde_json::from_str(text).map_err(|e| EngineError::InvalidScenario(e.to_string()))
    }

    /// Replaces every `script_path` with the file's contents, relative to `base_dir`.
    pub fn inline_scripts(mut self, base_dir: &Path) -> Result<Self, std::io::Error> {
        for lever in &mut self.levers {
            if let ScriptSource::Path(p) = &lever.script {
                let text = std::fs::read_to_string(base_dir.join(p))?;
                lever.script = ScriptSource::Inline(text);
            }
        }
        Ok(self)
    }

    /// Validates the document and compiles each lever's script.
    pub fn compile(&self, vocabulary: &Vocabulary) -> Result<Scenario, EngineError> {
        let mut levers = Vec::with_capacity(self.levers.len());
        let mut seen = BTreeSet::new();
        for doc in &self.levers {
            if !seen.insert(doc.id.as_str()) {
                return Err(EngineError::InvalidScenario(format!("duplicate lever id `{}`", doc.id)));
            }
            let script = match &doc.script {
                ScriptSource::Inline(s) => s.clone(),
                ScriptSource::Path(p) => {
                    return Err(EngineError::InvalidScenario(format!(
                        "lever `{}`: script_path `{p}` was not resolved",
                        doc.id
                    )))
                }
            };
            levers.push(Lever::new(
                &doc.id,
                &doc.display_name,
                doc.inputs.clone(),
                &script,
                &doc.description,
                vocabulary,
            )?);
        }
        for lever_id in self.values.keys() {
            if !seen.contains(lever_id.as_str()) {
                return Err(EngineError::InvalidScenario(format!("values given for unknown lever `{lever_id}`")));
            }
        }
        let mut scenario = Scenario { levers, values: BTreeMap::new(), years: self.years };
        for (lever_id, params) in &self.values {
            for (param, value) in params {
                scenario.set_value(lever_id, param, *value)?;
            }
        }
        Ok(scenario)
    }
}

/// A policy lever: named inputs plus a checked script.
#[derive(Debug, Clone, PartialEq)]
pub struct Lever {
    pub id: String,
    pub display_name: String,
    pub inputs: BTreeMap<String, InputSpec>,
    pub source: String,
    pub program: CheckedProgram,
    pub description: String,
}

impl Lever {
    pub fn new(
        id: &str,
        display_name: &str,
        inputs: BTreeMap<String, InputSpec>,
        script: &str,
        description: &str,
        vocabulary: &Vocabulary,
    ) -> Result<Self, EngineError> {
        for (name, spec) in &inputs {
            let ok = spec.min.is_finite()
                && spec.max.is_finite()
                && spec.min <= spec.default
                && spec.default <= spec.max;
            if !ok {
                return Err(EngineError::InvalidScenario(format!(
                    "lever `{id}` input `{name}`: default {} outside [{}, {}]",
                    spec.default, spec.min, spec.max
                )));
            }
        }
        let names: BTreeSet<String> = inputs.keys().cloned().collect();
        let program = compile(script, id, vocabulary, Some(&names))
            .map_err(|diagnostics| EngineError::Script { lever: id.to_string(), diagnostics })?;
        Ok(Lever {
            id: id.to_string(),
            display_name: display_name.to_string(),
            inputs,
            source: script.to_string(),
            program,
            description: description.to_string(),
        })
    }
}

/// Ordered levers with chosen input values over a run range. Levers run in
/// declaration order against one shared frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub levers: Vec<Lever>,
    values: BTreeMap<(String, String), f64>,
    pub years: YearRange,
}

impl Scenario {
    pub fn empty(years: YearRange) -> Self {
        Scenario { levers: Vec::new(), values: BTreeMap::new(), years }
    }

    pub fn with_lever(mut self, lever: Lever) -> Self {
        self.levers.push(lever);
        self
    }

    pub fn set_value(&mut self, lever_id: &str, param: &str, value: f64) -> Result<(), EngineError> {
        let lever = self
            .levers
            .iter()
            .find(|l| l.id == lever_id)
            .ok_or_else(|| EngineError::InvalidScenario(format!("unknown lever `{lever_id}`")))?;
        let spec = lever.inputs.get(param).ok_or_else(|| {
            EngineError::InvalidScenario(format!("lever `{lever_id}` has no input `{param}`"))
        })?;
        if !(spec.min..=spec.max).contains(&value) {
            return Err(EngineError::InvalidScenario(format!(
                "lever `{lever_id}` input `{param}` = {value} outside [{}, {}]",
                spec.min, spec.max
            )));
        }
        self.values.insert((lever_id.to_string(), param.to_string()), value);
        Ok(())
    }

    /// Bound input values for a lever: explicit values over defaults.
    pub fn inputs_for(&self, lever: &Lever) -> BTreeMap<String, f64> {
        lever
            .inputs
            .iter()
            .map(|(name, spec)| {
                let v = self
                    .values
                    .get(&(lever.id.clone(), name.clone()))
                    .copied()
                    .unwrap_or(spec.default);
                (name.clone(), v)
            })
            .collect()
    }
}

/// Reported when a lever script fails the frontend.
pub fn describe_script_errors(lever: &str, diagnostics: &[Diagnostic]) -> String {
    diagnostics
        .iter()
        .map(|d| format!("lever `{lever}`: {}:{}: {}: {}", d.span.line, d.span.column, d.kind, d.message))
        .collect::<Vec<_>>()
        .join("\n")
}
