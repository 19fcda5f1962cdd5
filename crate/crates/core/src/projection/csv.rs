use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use super::series::check_cell_value;
use super::{DataError, ProjectionSeries, Vocabulary, Year, YearRange};

pub const BASELINE_HEADER: &str = "year,region,variable,value";

struct Row {
    line: usize,
    region: usize,
    year: Year,
    attribute: usize,
    value: f64,
}

fn parse_row(vocab: &Vocabulary, line_no: usize, line: &str) -> Result<Row, DataError> {
    let malformed = |reason: String| DataError::MalformedRow { line: line_no, reason };

    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 4 {
        return Err(malformed(format!("expected 4 fields, found {}", fields.len())));
    }
    let year: Year = fields[0]
        .parse()
        .map_err(|_| malformed(format!("year `{}` is not an integer", fields[0])))?;
    let region = vocab.region_index(fields[1]).ok_or_else(|| DataError::UnknownRegion {
        line: line_no,
        name: fields[1].to_string(),
    })?;
    let attribute = vocab.attribute_index(fields[2]).ok_or_else(|| DataError::UnknownAttribute {
        line: line_no,
        name: fields[2].to_string(),
    })?;
    let raw = fields[3];
    // f64::from_str also accepts "inf"/"NaN"; only plain decimals are allowed here.
    if raw.is_empty()
        || !raw
            .chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'))
    {
        return Err(malformed(format!("value `{raw}` is not a decimal number")));
    }
    let value: f64 = raw
        .parse()
        .map_err(|_| malformed(format!("value `{raw}` is not a decimal number")))?;
    let value = check_cell_value(value).map_err(|e| match e {
        DataError::NegativeValue { value, .. } => DataError::NegativeValue { line: Some(line_no), value },
        _ => malformed(format!("value `{raw}` is not finite")),
    })?;
    Ok(Row { line: line_no, region, year, attribute, value })
}

/// Parses a long-form baseline CSV against `vocabulary`.
///
/// Every declared `(region, year, attribute)` combination must appear exactly
/// once across a contiguous year range. Row order does not matter.
pub fn load_baseline(csv_text: &str, vocabulary: Arc<Vocabulary>) -> Result<ProjectionSeries, DataError> {
    let mut lines = csv_text.split('\n').enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, BASELINE_HEADER)) => {}
        Some((_, other)) => {
            return Err(DataError::MalformedRow {
                line: 1,
                reason: format!("header must be `{BASELINE_HEADER}`, found `{other}`"),
            })
        }
        None => return Err(DataError::EmptySeries),
    }

    let mut rows = Vec::new();
    let mut pending_blank: Option<usize> = None;
    for (line_no, line) in lines {
        if let Some(blank) = pending_blank {
            return Err(DataError::MalformedRow { line: blank, reason: "empty line".into() });
        }
        if line.is_empty() {
            // Only the terminating newline may produce an empty trailing line.
            pending_blank = Some(line_no);
            continue;
        }
        if line.contains('\r') {
            return Err(DataError::MalformedRow {
                line: line_no,
                reason: "carriage return; line endings must be LF".into(),
            });
        }
        rows.push(parse_row(&vocabulary, line_no, line)?);
    }
    if rows.is_empty() {
        return Err(DataError::EmptySeries);
    }

    let years_seen: BTreeSet<Year> = rows.iter().map(|r| r.year).collect();
    let first = *years_seen.first().unwrap();
    let last = *years_seen.last().unwrap();
    if let Some(missing) = (first..=last).find(|y| !years_seen.contains(y)) {
        return Err(DataError::NonContiguousYears { missing });
    }
    let years = YearRange::new(first, last).expect("first <= last");

    let n_regions = vocabulary.regions().len();
    let n_attr = vocabulary.attributes().len();
    let total = n_regions * years.len() * n_attr;
    let mut values = vec![0.0; total];
    let mut seen_on: HashMap<usize, usize> = HashMap::with_capacity(total);
    for row in rows {
        let idx = (row.region * years.len() + (row.year - first) as usize) * n_attr + row.attribute;
        if let Some(&first_line) = seen_on.get(&idx) {
            return Err(DataError::DuplicateCell {
                line: row.line,
                first_line,
                region: vocabulary.regions()[row.region].id.clone(),
                year: row.year,
                attribute: vocabulary.attributes()[row.attribute].id.clone(),
            });
        }
        seen_on.insert(idx, row.line);
        values[idx] = row.value;
    }
    if seen_on.len() != total {
        let missing = (0..total).find(|i| !seen_on.contains_key(i)).unwrap();
        let a = missing % n_attr;
        let y = (missing / n_attr) % years.len();
        let r = missing / (n_attr * years.len());
        return Err(DataError::MissingCell {
            region: vocabulary.regions()[r].id.clone(),
            year: first + y as Year,
            attribute: vocabulary.attributes()[a].id.clone(),
        });
    }

    ProjectionSeries::from_values(vocabulary, years, values)
}

/// Canonical long-form CSV: region, then year, then attribute, in declared
/// order. Values use the shortest representation that parses back exactly.
pub fn serialize(series: &ProjectionSeries) -> String {
    let mut out = String::with_capacity(series.cell_count() * 40);
    out.push_str(BASELINE_HEADER);
    out.push('\n');
    for (region, year, attr, value) in series.cells() {
        let _ = writeln!(out, "{year},{region},{attr},{value}");
    }
    out
}
