use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Axis, DataError, Vocabulary, Year};

/// Inclusive, contiguous year range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "[Year; 2]", try_from = "[Year; 2]")]
pub struct YearRange {
    first: Year,
    last: Year,
}

impl From<YearRange> for [Year; 2] {
    fn from(r: YearRange) -> Self {
        [r.first, r.last]
    }
}

impl TryFrom<[Year; 2]> for YearRange {
    type Error = String;

    fn try_from([first, last]: [Year; 2]) -> Result<Self, String> {
        YearRange::new(first, last).ok_or_else(|| format!("year range [{first}, {last}] is inverted"))
    }
}

impl YearRange {
    pub fn new(first: Year, last: Year) -> Option<Self> {
        (first <= last).then_some(YearRange { first, last })
    }

    pub fn first(&self) -> Year {
        self.first
    }

    pub fn last(&self) -> Year {
        self.last
    }

    pub fn len(&self) -> usize {
        (self.last - self.first) as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, year: Year) -> bool {
        (self.first..=self.last).contains(&year)
    }

    pub fn contains_range(&self, other: &YearRange) -> bool {
        self.contains(other.first) && self.contains(other.last)
    }

    pub fn iter(&self) -> impl Iterator<Item = Year> {
        self.first..=self.last
    }
}

impl std::fmt::Display for YearRange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}..{}", self.first, self.last)
    }
}

/// Values per `(region, year, attribute)`, laid out region-major, then
/// year, then attribute (the canonical serialization order).
#[derive(Debug, Clone)]
pub struct ProjectionSeries {
    vocabulary: Arc<Vocabulary>,
    years: YearRange,
    values: Arc<Vec<f64>>,
}

impl PartialEq for ProjectionSeries {
    fn eq(&self, other: &Self) -> bool {
        self.years == other.years
            && self.vocabulary.has_same_shape(&other.vocabulary)
            && self.values == other.values
    }
}

fn normalize_zero(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

pub(crate) fn check_cell_value(value: f64) -> Result<f64, DataError> {
    if !value.is_finite() {
        return Err(DataError::NonFiniteValue { value });
    }
    if value < 0.0 {
        return Err(DataError::NegativeValue { line: None, value });
    }
    Ok(normalize_zero(value))
}

impl ProjectionSeries {
    /// Builds a series from values in canonical order.
    pub fn from_values(
        vocabulary: Arc<Vocabulary>,
        years: YearRange,
        values: Vec<f64>,
    ) -> Result<Self, DataError> {
        let expected = vocabulary.regions().len() * years.len() * vocabulary.attributes().len();
        if values.len() != expected {
            return Err(DataError::ShapeMismatch(format!(
                "expected {expected} values, got {}",
                values.len()
            )));
        }
        let values = values
            .into_iter()
            .map(check_cell_value)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ProjectionSeries { vocabulary, years, values: Arc::new(values) })
    }

    pub fn vocabulary(&self) -> &Arc<Vocabulary> {
        &self.vocabulary
    }

    pub fn years(&self) -> YearRange {
        self.years
    }

    pub fn cell_count(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub(crate) fn offset(&self, region: usize, year: Year, attribute: usize) -> usize {
        let n_attr = self.vocabulary.attributes().len();
        (region * self.years.len() + (year - self.years.first()) as usize) * n_attr + attribute
    }

    /// Value at indices; `year` must be in range.
    #[inline]
    pub fn at(&self, region: usize, year: Year, attribute: usize) -> f64 {
        self.values[self.offset(region, year, attribute)]
    }

    /// All attribute values of one region-year, in declaration order.
    pub fn row(&self, region: usize, year: Year) -> &[f64] {
        let start = self.offset(region, year, 0);
        &self.values[start..start + self.vocabulary.attributes().len()]
    }

    /// Mutable access for in-crate builders. Copies on first write if shared.
    pub(crate) fn row_mut(&mut self, region: usize, year: Year) -> &mut [f64] {
        let start = self.offset(region, year, 0);
        let n = self.vocabulary.attributes().len();
        &mut Arc::make_mut(&mut self.values)[start..start + n]
    }

    fn resolve(&self, region: &str, year: Year, attribute: &str) -> Result<usize, DataError> {
        let r = self
            .vocabulary
            .region_index(region)
            .ok_or_else(|| DataError::OutOfRange(Axis::Region(region.to_string())))?;
        if !self.years.contains(year) {
            return Err(DataError::OutOfRange(Axis::Year(year)));
        }
        let a = self
            .vocabulary
            .attribute_index(attribute)
            .ok_or_else(|| DataError::OutOfRange(Axis::Attribute(attribute.to_string())))?;
        Ok(self.offset(r, year, a))
    }

    pub fn get_value(&self, region: &str, year: Year, attribute: &str) -> Result<f64, DataError> {
        self.resolve(region, year, attribute).map(|i| self.values[i])
    }

    /// Returns an updated copy; `self` is left untouched.
    pub fn set_value(
        &self,
        region: &str,
        year: Year,
        attribute: &str,
        value: f64,
    ) -> Result<ProjectionSeries, DataError> {
        let i = self.resolve(region, year, attribute)?;
        let value = check_cell_value(value)?;
        let mut next = self.clone();
        Arc::make_mut(&mut next.values)[i] = value;
        Ok(next)
    }

    /// Sum over all stored regions. There is no stored `global` row.
    pub fn aggregate_global(&self, year: Year, attribute: &str) -> Result<f64, DataError> {
        if !self.years.contains(year) {
            return Err(DataError::OutOfRange(Axis::Year(year)));
        }
        let a = self
            .vocabulary
            .attribute_index(attribute)
            .ok_or_else(|| DataError::OutOfRange(Axis::Attribute(attribute.to_string())))?;
        Ok((0..self.vocabulary.regions().len()).map(|r| self.at(r, year, a)).sum())
    }

    /// Iterates `(region, year, attribute, value)` in canonical order.
    pub fn cells(&self) -> impl Iterator<Item = (&str, Year, &str, f64)> + '_ {
        let vocab = &self.vocabulary;
        vocab.regions().iter().enumerate().flat_map(move |(r, region)| {
            self.years.iter().flat_map(move |year| {
                vocab.attributes().iter().enumerate().map(move |(a, attr)| {
                    (region.id.as_str(), year, attr.id.as_str(), self.at(r, year, a))
                })
            })
        })
    }

    pub fn same_shape(&self, other: &ProjectionSeries) -> Result<(), DataError> {
        if self.years != other.years {
            return Err(DataError::ShapeMismatch(format!(
                "years {} vs {}",
                self.years, other.years
            )));
        }
        if !self.vocabulary.has_same_shape(&other.vocabulary) {
            return Err(DataError::ShapeMismatch("regions or attributes differ".into()));
        }
        Ok(())
    }
}

/// Cell-wise `b - a` for two series of the same shape.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaTable {
    vocabulary: Arc<Vocabulary>,
    years: YearRange,
    deltas: Vec<f64>,
}

pub fn diff_series(a: &ProjectionSeries, b: &ProjectionSeries) -> Result<DeltaTable, DataError> {
    a.same_shape(b)?;
    let deltas = a.values.iter().zip(b.values.iter()).map(|(x, y)| y - x).collect();
    Ok(DeltaTable { vocabulary: a.vocabulary.clone(), years: a.years, deltas })
}

impl DeltaTable {
    pub fn years(&self) -> YearRange {
        self.years
    }

    pub fn get(&self, region: &str, year: Year, attribute: &str) -> Option<f64> {
        let r = self.vocabulary.region_index(region)?;
        let a = self.vocabulary.attribute_index(attribute)?;
        if !self.years.contains(year) {
            return None;
        }
        let n_attr = self.vocabulary.attributes().len();
        Some(self.deltas[(r * self.years.len() + (year - self.years.first()) as usize) * n_attr + a])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Year, &str, f64)> + '_ {
        let vocab = &self.vocabulary;
        let n_years = self.years.len();
        let n_attr = vocab.attributes().len();
        self.deltas.iter().enumerate().map(move |(i, &d)| {
            let a = i % n_attr;
            let y = (i / n_attr) % n_years;
            let r = i / (n_attr * n_years);
            (
                vocab.regions()[r].id.as_str(),
                self.years.first() + y as Year,
                vocab.attributes()[a].id.as_str(),
                d,
            )
        })
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (&str, Year, &str, f64)> + '_ {
        self.iter().filter(|c| c.3 != 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.deltas.iter().all(|d| *d == 0.0)
    }

    /// Long-form CSV with header `year,region,variable,delta`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("year,region,variable,delta\n");
        for (region, year, attr, d) in self.iter() {
            out.push_str(&format!("{year},{region},{attr},{}\n", normalize_zero(d)));
        }
        out
    }
}
