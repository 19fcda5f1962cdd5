//! Baseline projection series: the yearly per-region mass-flow tensor that
//! scenarios modify.
//!
//! A [`ProjectionSeries`] holds one non-negative value (million metric
//! tonnes) for every `(region, year, attribute)` triple declared by a
//! [`Vocabulary`]. Series are immutable; [`ProjectionSeries::set_value`]
//! returns a copy-on-write update.

mod csv;
mod series;
mod vocabulary;

use thiserror::Error;

pub use self::csv::{load_baseline, serialize, BASELINE_HEADER};
pub use self::series::{diff_series, DeltaTable, ProjectionSeries, YearRange};
pub use self::vocabulary::{
    Attribute, AttributeKind, LifetimeConfig, Region, Vocabulary, EOL_FATES, GLOBAL_REGION,
    MISMANAGED_FATE,
};

pub type Year = i32;

/// Which coordinate of a cell lookup was outside the series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Axis {
    Region(String),
    Year(Year),
    Attribute(String),
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axis::Region(r) => write!(f, "region `{r}`"),
            Axis::Year(y) => write!(f, "year {y}"),
            Axis::Attribute(a) => write!(f, "attribute `{a}`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DataError {
    #[error("missing cell ({region}, {year}, {attribute})")]
    MissingCell {
        region: String,
        year: Year,
        attribute: String,
    },
    #[error("line {line}: duplicate cell ({region}, {year}, {attribute}), first seen on line {first_line}")]
    DuplicateCell {
        line: usize,
        first_line: usize,
        region: String,
        year: Year,
        attribute: String,
    },
    #[error("years are not contiguous: {missing} has no rows")]
    NonContiguousYears { missing: Year },
    #[error("{}negative value {value}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    NegativeValue { line: Option<usize>, value: f64 },
    #[error("non-finite value {value}")]
    NonFiniteValue { value: f64 },
    #[error("line {line}: unknown attribute `{name}`")]
    UnknownAttribute { line: usize, name: String },
    #[error("line {line}: unknown region `{name}`")]
    UnknownRegion { line: usize, name: String },
    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("baseline has no data rows")]
    EmptySeries,
    #[error("{0} is out of range")]
    OutOfRange(Axis),
    #[error("series shapes differ: {0}")]
    ShapeMismatch(String),
    #[error("invalid vocabulary: {0}")]
    InvalidVocabulary(String),
}
