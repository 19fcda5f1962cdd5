//! Year-by-year scenario propagation over a baseline.
//!
//! For each simulated year the engine seeds a frame from the baseline, runs
//! every lever script in order against that shared frame, recomputes
//! end-of-life waste from (possibly edited) consumption through a lifetime
//! convolution, rescales the four fates to that waste, and commits the year.

mod scenario;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

pub use self::scenario::{
    describe_script_errors, InputSpec, Lever, LeverDocument, Scenario, ScenarioDocument, ScriptSource,
};

use crate::dsl::Diagnostic;
use crate::projection::{
    diff_series, DataError, DeltaTable, ProjectionSeries, Vocabulary, Year, YearRange, EOL_FATES,
    MISMANAGED_FATE,
};
use crate::runtime::{run_program, ExecDiagnostics, RuntimeError, RuntimeState, YearFrame};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("{}", describe_script_errors(.lever, .diagnostics))]
    Script { lever: String, diagnostics: Vec<Diagnostic> },
    #[error("lever `{lever}` failed in {year} at {}: {}", .error.error.span, .error.error.kind)]
    ScriptRuntime { lever: String, year: Year, error: RuntimeError },
    #[error("scenario years {requested} are not within baseline years {available}")]
    YearRange { requested: YearRange, available: YearRange },
    #[error("conservation violated for {region} in {year}: fates sum to {fates}, waste is {waste}")]
    ConservationViolated { region: String, year: Year, fates: f64, waste: f64 },
    #[error(transparent)]
    Data(#[from] DataError),
}

/// How consumption before the first baseline year is filled in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Backfill {
    /// Every earlier year consumes what the first year does.
    #[default]
    SteadyState,
    /// No consumption before the first year.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EngineConfig {
    pub eol_normalization: bool,
    /// Relative tolerance for the fates-equal-waste check.
    pub conservation_epsilon: f64,
    pub backfill: Backfill,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { eol_normalization: true, conservation_epsilon: 1e-6, backfill: Backfill::SteadyState }
    }
}

/// Consumption of sector `attribute` in `year`, with backfill before the range.
fn consumption(series: &ProjectionSeries, region: usize, attribute: usize, year: Year, backfill: Backfill) -> f64 {
    let first = series.years().first();
    if year >= first {
        series.at(region, year, attribute)
    } else {
        match backfill {
            Backfill::SteadyState => series.at(region, first, attribute),
            Backfill::Zero => 0.0,
        }
    }
}

/// Waste generated in `year` by `region`: every consumption sector's past
/// consumption delayed by its mean lifetime `L`. A fractional `L` splits the
/// mass between `floor(L)` (weight `ceil(L) - L`) and `ceil(L)` (weight
/// `L - floor(L)`), which keeps the mean delay exactly `L`.
///
/// Only years up to and including `year` are read.
pub fn waste_from_consumption(
    series: &ProjectionSeries,
    region: usize,
    year: Year,
    backfill: Backfill,
) -> f64 {
    let vocab = series.vocabulary();
    let mut total = 0.0;
    for &sector in vocab.consumption_sectors() {
        let lifetime = vocab.lifetime_at(sector).expect("vocabulary guarantees lifetimes");
        let lo = lifetime.floor();
        let hi = lifetime.ceil();
        if lo == hi {
            total += consumption(series, region, sector, year - lo as Year, backfill);
        } else {
            total += consumption(series, region, sector, year - lo as Year, backfill) * (hi - lifetime)
                + consumption(series, region, sector, year - hi as Year, backfill) * (lifetime - lo);
        }
    }
    total
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionNormalization {
    pub region: String,
    pub waste: f64,
    pub fates_before: f64,
    pub scale: f64,
    /// All fates were zero, so the whole waste was assigned to mismanaged.
    pub defaulted_to_mismanaged: bool,
}

/// Rescales `fates` (in [`EOL_FATES`] order) so they sum to `waste`.
/// Returns `(scale, defaulted_to_mismanaged)`.
fn normalize_fates(fates: &mut [f64; 4], waste: f64) -> (f64, bool) {
    let before: f64 = fates.iter().sum();
    if before == waste {
        return (1.0, false);
    }
    if before == 0.0 {
        fates[MISMANAGED_FATE] = waste;
        return (1.0, true);
    }
    let scale = waste / before;
    for f in fates.iter_mut() {
        *f *= scale;
    }
    // Push rounding residue onto the largest fate so the sum lands on waste.
    let residue = waste - fates.iter().sum::<f64>();
    if residue != 0.0 {
        let (largest, _) = fates
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |best, (i, &v)| if v > best.1 { (i, v) } else { best });
        fates[largest] = (fates[largest] + residue).max(0.0);
    }
    (scale, false)
}

fn within(fates: f64, waste: f64, epsilon: f64) -> bool {
    (fates - waste).abs() <= epsilon * waste.abs()
}

/// Reconciles `region`'s end-of-life fates in `frame` with `total_waste`:
/// proportional rescale, or everything to mismanaged if all fates are zero.
pub fn normalize_eol(
    frame: &mut YearFrame,
    region: &str,
    total_waste: f64,
    epsilon: f64,
) -> Result<RegionNormalization, EngineError> {
    let vocab = frame.vocabulary().clone();
    let r = vocab
        .region_index(region)
        .ok_or_else(|| DataError::OutOfRange(crate::projection::Axis::Region(region.to_string())))?;
    let idx = vocab.fate_indices();
    let row = frame.region_row_mut(r);
    let record = normalize_row(row, idx, region, total_waste);
    let sum: f64 = idx.iter().map(|&i| row[i]).sum();
    if !within(sum, total_waste, epsilon) {
        return Err(EngineError::ConservationViolated { region: region.to_string(), year: 0, fates: sum, waste: total_waste });
    }
    Ok(record)
}

fn normalize_row(row: &mut [f64], idx: [usize; 4], region: &str, waste: f64) -> RegionNormalization {
    let mut fates = idx.map(|i| row[i]);
    let fates_before = fates.iter().sum();
    let (scale, defaulted) = normalize_fates(&mut fates, waste);
    for (slot, &i) in idx.iter().enumerate() {
        row[i] = if fates[slot] == 0.0 { 0.0 } else { fates[slot] };
    }
    RegionNormalization {
        region: region.to_string(),
        waste,
        fates_before,
        scale,
        defaulted_to_mismanaged: defaulted,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeverDiagnostics {
    pub lever: String,
    #[serde(flatten)]
    pub diagnostics: ExecDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YearDiagnostics {
    pub year: Year,
    pub levers: Vec<LeverDiagnostics>,
    pub normalization: Vec<RegionNormalization>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    pub series: ProjectionSeries,
    pub run_years: YearRange,
    pub diagnostics: Vec<YearDiagnostics>,
}

impl ScenarioResult {
    /// The JSON diagnostics sidecar written next to result CSVs.
    pub fn diagnostics_json(&self) -> String {
        #[derive(Serialize)]
        struct Sidecar<'a> {
            engine_version: &'a str,
            run_years: YearRange,
            years: &'a [YearDiagnostics],
        }
        serde_json::to_string_pretty(&Sidecar {
            engine_version: crate::ENGINE_VERSION,
            run_years: self.run_years,
            years: &self.diagnostics,
        })
        .expect("diagnostics serialize")
    }
}

/// Applies `scenario` to `baseline`. Years outside the run range keep their
/// baseline values. Any script failure aborts the whole run.
pub fn run_scenario(
    baseline: &ProjectionSeries,
    scenario: &Scenario,
    config: &EngineConfig,
) -> Result<ScenarioResult, EngineError> {
    if !baseline.years().contains_range(&scenario.years) {
        return Err(EngineError::YearRange { requested: scenario.years, available: baseline.years() });
    }
    if config.conservation_epsilon.is_nan() || config.conservation_epsilon <= 0.0 {
        return Err(EngineError::InvalidScenario("conservation_epsilon must be > 0".into()));
    }
    let vocab = baseline.vocabulary().clone();
    let fate_idx = vocab.fate_indices();
    let bindings: Vec<_> = scenario.levers.iter().map(|l| scenario.inputs_for(l)).collect();

    let mut work = baseline.clone();
    let mut diagnostics = Vec::with_capacity(scenario.years.len());
    for year in scenario.years.iter() {
        let mut state = RuntimeState::new(YearFrame::from_series(&work, year), year);
        let mut lever_diags = Vec::with_capacity(scenario.levers.len());
        for (lever, inputs) in scenario.levers.iter().zip(&bindings) {
            state.inputs.clone_from(inputs);
            let d = run_program(&lever.program, &mut state).map_err(|error| EngineError::ScriptRuntime {
                lever: lever.id.clone(),
                year,
                error,
            })?;
            lever_diags.push(LeverDiagnostics { lever: lever.id.clone(), diagnostics: d });
        }

        for r in 0..vocab.regions().len() {
            work.row_mut(r, year).copy_from_slice(state.frame.region_row(r));
        }
        let mut normalization = Vec::with_capacity(vocab.regions().len());
        for (r, region) in vocab.regions().iter().enumerate() {
            let waste = waste_from_consumption(&work, r, year, config.backfill);
            if config.eol_normalization {
                let record = normalize_row(work.row_mut(r, year), fate_idx, &region.id, waste);
                let row = work.row(r, year);
                let sum: f64 = fate_idx.iter().map(|&i| row[i]).sum();
                if !within(sum, waste, config.conservation_epsilon) {
                    return Err(EngineError::ConservationViolated { region: region.id.clone(), year, fates: sum, waste });
                }
                normalization.push(record);
            }
        }
        diagnostics.push(YearDiagnostics { year, levers: lever_diags, normalization });
    }

    Ok(ScenarioResult { series: work, run_years: scenario.years, diagnostics })
}

/// Session-level summary numbers for one result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Headlines {
    /// Sum of `eolMismanagedMT` over every region and run year.
    pub cumulative_global_mismanaged: f64,
    pub end_year: Year,
    /// Region → fate → value in the final run year.
    pub end_year_fates: BTreeMap<String, BTreeMap<String, f64>>,
}

pub fn headlines(result: &ScenarioResult) -> Headlines {
    let series = &result.series;
    let vocab: &Vocabulary = series.vocabulary();
    let fate_idx = vocab.fate_indices();
    let mut cumulative = 0.0;
    for year in result.run_years.iter() {
        for r in 0..vocab.regions().len() {
            cumulative += series.at(r, year, fate_idx[MISMANAGED_FATE]);
        }
    }
    let end_year = result.run_years.last();
    let end_year_fates = vocab
        .regions()
        .iter()
        .enumerate()
        .map(|(r, region)| {
            let fates = EOL_FATES
                .iter()
                .zip(fate_idx)
                .map(|(name, i)| (name.to_string(), series.at(r, end_year, i)))
                .collect();
            (region.id.clone(), fates)
        })
        .collect();
    Headlines { cumulative_global_mismanaged: cumulative, end_year, end_year_fates }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub deltas: DeltaTable,
    pub a: Headlines,
    pub b: Headlines,
}

impl Comparison {
    pub fn cumulative_mismanaged_delta(&self) -> f64 {
        self.b.cumulative_global_mismanaged - self.a.cumulative_global_mismanaged
    }

    /// Region → fate → `b - a` in the final run year.
    pub fn end_year_fate_deltas(&self) -> BTreeMap<String, BTreeMap<String, f64>> {
        self.b
            .end_year_fates
            .iter()
            .map(|(region, fates)| {
                let base = &self.a.end_year_fates[region];
                (region.clone(), fates.iter().map(|(f, v)| (f.clone(), v - base[f])).collect())
            })
            .collect()
    }
}

pub fn compare_scenarios(a: &ScenarioResult, b: &ScenarioResult) -> Result<Comparison, EngineError> {
    if a.run_years != b.run_years {
        return Err(DataError::ShapeMismatch(format!("run years {} vs {}", a.run_years, b.run_years)).into());
    }
    let deltas = diff_series(&a.series, &b.series)?;
    Ok(Comparison { deltas, a: headlines(a), b: headlines(b) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fates_scaled_to_waste() {
        let mut f = [50.0, 30.0, 30.0, 10.0];
        let (scale, defaulted) = normalize_fates(&mut f, 100.0);
        assert_eq!(scale, 100.0 / 120.0);
        assert!(!defaulted);
        let want = [250.0 / 6.0, 25.0, 25.0, 50.0 / 6.0];
        for (got, want) in f.iter().zip(want) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        assert!((f.iter().sum::<f64>() - 100.0).abs() <= 1e-12 * 100.0);
    }

    #[test]
    fn fates_already_consistent() {
        let mut f = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(normalize_fates(&mut f, 10.0), (1.0, false));
        assert_eq!(f, [1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn zero_fates_go_to_mismanaged() {
        let mut f = [0.0; 4];
        assert_eq!(normalize_fates(&mut f, 7.0), (1.0, true));
        assert_eq!(f, [0.0, 0.0, 0.0, 7.0]);
    }

    #[test]
    fn zero_waste_zeroes_fates() {
        let mut f = [1.0, 0.0, 2.0, 0.0];
        normalize_fates(&mut f, 0.0);
        assert_eq!(f.iter().sum::<f64>(), 0.0);
    }
}
