//! Deterministic, self-consistent baselines for demos, tests and benchmarks.
//!
//! "Self-consistent" means every region-year's four end-of-life fates already
//! sum to the waste the engine derives from consumption, so an empty
//! scenario reproduces the baseline exactly. Values are small dyadic
//! rationals; with mean lifetimes on a half-year grid every sum the engine
//! forms is exact in `f64`.

use std::sync::Arc;

use crate::engine::{waste_from_consumption, Backfill};
use crate::projection::{AttributeKind, ProjectionSeries, Vocabulary, Year, YearRange, MISMANAGED_FATE};

/// Years and variant of the shipped toy baseline (`data/toy`).
pub const TOY: (Year, Year, u32) = (2026, 2035, 0);
/// Years and variant of the shipped desk-scale baseline (`data/desk`).
pub const DESK: (Year, Year, u32) = (2011, 2050, 1);

/// Fate shares in sixteenths for (recycling, incineration, landfill); the
/// remainder is mismanaged.
fn fate_sixteenths(region: usize, year_offset: usize) -> [f64; 3] {
    let rec = 1 + (region + year_offset / 8) % 4;
    let inc = 2 + region % 2;
    let land = 3 + (region * 2 + 1) % 5;
    [rec as f64, inc as f64, land as f64]
}

/// Builds a baseline over `years` for `vocabulary`. `variant` perturbs the
/// synthetic growth paths so several distinct baselines can be produced.
pub fn self_consistent_baseline(vocabulary: Arc<Vocabulary>, years: YearRange, variant: u32) -> ProjectionSeries {
    let n_attr = vocabulary.attributes().len();
    let n_years = years.len();
    let n_regions = vocabulary.regions().len();
    let v = variant as usize;

    let mut values = vec![0.0; n_regions * n_years * n_attr];
    for r in 0..n_regions {
        for (t, _) in years.iter().enumerate() {
            for (a, attr) in vocabulary.attributes().iter().enumerate() {
                let base = (20 + 7 * ((r * 3 + a * 5 + v) % 11)) as f64;
                let value = match attr.kind {
                    AttributeKind::ConsumptionSector => {
                        let growth = 0.25 * ((r + 2 * a + v) % 5) as f64;
                        // A dip every seventh year keeps paths from being purely linear.
                        let wobble = if (t + a + r) % 7 == 0 { -1.5 } else { 0.0 };
                        base + growth * t as f64 + wobble
                    }
                    AttributeKind::Production => base * 2.0 + 0.5 * t as f64,
                    AttributeKind::Trade => (base / 4.0).floor() + 0.25 * ((t + a) % 3) as f64,
                    AttributeKind::EolFate => 0.0,
                };
                values[(r * n_years + t) * n_attr + a] = value;
            }
        }
    }
    let mut series = ProjectionSeries::from_values(vocabulary.clone(), years, values)
        .expect("synthetic values are finite and non-negative");

    let fates = vocabulary.fate_indices();
    for r in 0..n_regions {
        for (t, year) in years.iter().enumerate() {
            let waste = waste_from_consumption(&series, r, year, Backfill::SteadyState);
            let shares = fate_sixteenths(r, t);
            let row = series.row_mut(r, year);
            let mut assigned = 0.0;
            for (slot, share) in shares.iter().enumerate() {
                let v = waste * share / 16.0;
                row[fates[slot]] = v;
                assigned += v;
            }
            row[fates[MISMANAGED_FATE]] = waste - assigned;
            debug_assert_eq!(fates.iter().map(|&i| row[i]).sum::<f64>(), waste);
        }
    }
    series
}
