use serde::{Deserialize, Serialize};

use super::{ColumnSpec, DatasetError, Observation, RankedDataset};

/// Result of reading a CSV file: the dataset plus the data rows that were
/// skipped because an x or y cell was missing or not a finite number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvImport {
    pub dataset: RankedDataset,
    /// 0-based data-row indices (header excluded) of dropped rows.
    pub dropped_rows: Vec<usize>,
}

impl CsvImport {
    pub fn dropped(&self) -> usize {
        self.dropped_rows.len()
    }
}

/// Parses a numeric cell. Point decimals only; surrounding whitespace is
/// ignored and non-finite spellings (`NaN`, `inf`) are rejected.
pub(crate) fn parse_number(cell: &str) -> Option<f64> {
    let cell = cell.trim();
    if cell.is_empty() {
        return None;
    }
    cell.parse::<f64>().ok().filter(|v| v.is_finite())
}

pub fn parse_csv(raw: &[u8], spec: &ColumnSpec) -> Result<CsvImport, DatasetError> {
    let mut reader = ::csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(raw);

    let header: Vec<String> = reader
        .headers()
        .map_err(|e| DatasetError::MalformedHeader(e.to_string()))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(DatasetError::MalformedHeader("empty header row".into()));
    }

    let x_col = spec.x_column.resolve(&header)?;
    let y_col = spec.y_column.resolve(&header)?;
    if x_col == y_col {
        return Err(DatasetError::SameColumn(header[x_col].clone()));
    }
    let label_col = spec
        .label_column
        .as_ref()
        .map(|s| s.resolve(&header))
        .transpose()?;

    let mut observations = Vec::new();
    let mut dropped_rows = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| DatasetError::MalformedCsv(e.to_string()))?;
        let x = record.get(x_col).and_then(parse_number);
        let y = record.get(y_col).and_then(parse_number);
        match (x, y) {
            (Some(x), Some(y)) => {
                let label = match label_col {
                    Some(c) => record.get(c).unwrap_or("").to_string(),
                    None => row.to_string(),
                };
                observations.push(Observation::new(label, x, y));
            }
            _ => dropped_rows.push(row),
        }
    }

    if observations.len() < 2 {
        return Err(DatasetError::TooFewRows {
            found: observations.len(),
        });
    }
    Ok(CsvImport {
        dataset: RankedDataset::new(
            observations,
            header[x_col].clone(),
            header[y_col].clone(),
        ),
        dropped_rows,
    })
}

/// Serializes as `label,<x_name>,<y_name>`. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_csv(dataset: &RankedDataset) -> String {
    let mut writer = ::csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["label", dataset.x_name.as_str(), dataset.y_name.as_str()])
        .expect("in-memory write");
    for o in &dataset.observations {
        writer
            .write_record([o.label.clone(), o.x.to_string(), o.y.to_string()])
            .expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::ColumnSelector;
    use proptest::prelude::*;

    #[test]
    fn parses_named_columns() {
        let spec = ColumnSpec::new("a", "b").with_label("name");
        let out = parse_csv(b"name,a,b\nP,1,2\nQ,2,1\n", &spec).unwrap();
        assert_eq!(
            out.dataset.observations,
            vec![Observation::new("P", 1., 2.), Observation::new("Q", 2., 1.)]
        );
        assert_eq!(out.dataset.x_name, "a");
        assert_eq!(out.dropped(), 0);
    }

    #[test]
    fn one_row_is_too_few() {
        let spec = ColumnSpec::new("a", "b");
        assert_eq!(
            parse_csv(b"name,a,b\nP,1,2\n", &spec),
            Err(DatasetError::TooFewRows { found: 1 })
        );
    }

    #[test]
    fn unparseable_rows_are_dropped_and_counted() {
        let raw = b"name,a,b\nA,1,1\nB,2,3\nR,abc,3\nC,3,2\nD,4,5\nE,5,4\n";
        let out = parse_csv(raw, &ColumnSpec::new("a", "b").with_label("name")).unwrap();
        assert_eq!(out.dataset.len(), 5);
        assert_eq!(out.dropped_rows, vec![2]);
    }

    #[test]
    fn missing_cells_and_locale_commas_drop() {
        let raw = b"a,b\n1,2\n\"1,5\",3\n4\n,7\n5,6\n";
        let out = parse_csv(raw, &ColumnSpec::new("a", "b")).unwrap();
        assert_eq!(out.dataset.len(), 2);
        assert_eq!(out.dropped_rows, vec![1, 2, 3]);
        // default labels are data-row indices
        assert_eq!(out.dataset.observations[1].label, "4");
    }

    #[test]
    fn quoted_fields() {
        let raw = b"name,a,b\n\"Korea, Rep.\",1,2\n\"say \"\"hi\"\"\",3,4\n";
        let out = parse_csv(raw, &ColumnSpec::new(1usize, 2usize).with_label(0usize)).unwrap();
        assert_eq!(out.dataset.observations[0].label, "Korea, Rep.");
        assert_eq!(out.dataset.observations[1].label, "say \"hi\"");
    }

    #[test]
    fn selector_errors() {
        let raw = b"a,b\n1,2\n3,4\n";
        assert_eq!(
            parse_csv(raw, &ColumnSpec::new("a", "zz")),
            Err(DatasetError::ColumnNotFound("zz".into()))
        );
        assert_eq!(
            parse_csv(raw, &ColumnSpec::new("a", ColumnSelector::Index(0))),
            Err(DatasetError::SameColumn("a".into()))
        );
        assert!(matches!(
            parse_csv(b"", &ColumnSpec::new("a", "b")),
            Err(DatasetError::MalformedHeader(_))
        ));
    }

    #[test]
    fn non_finite_spellings_rejected() {
        assert_eq!(parse_number(" 2.5 "), Some(2.5));
        assert_eq!(parse_number("NaN"), None);
        assert_eq!(parse_number("inf"), None);
        assert_eq!(parse_number("1,5"), None);
    }

    proptest! {
        #[test]
        fn csv_round_trip(values in proptest::collection::vec((-1e12f64..1e12, -1e12f64..1e12), 2..40)) {
            let (x, y): (Vec<f64>, Vec<f64>) = values.into_iter().unzip();
            let d = RankedDataset::from_columns(&x, &y);
            let text = write_csv(&d);
            let back = parse_csv(text.as_bytes(), &ColumnSpec::new("x", "y").with_label("label")).unwrap();
            prop_assert_eq!(back.dataset, d);
        }
    }
}
