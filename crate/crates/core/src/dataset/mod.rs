//! Two-column ranked data: ingestion, validation and rank normalization.
//!
//! A [`RankedDataset`] is an ordered list of labeled `(x, y)` observations.
//! The order is significant: pair indices `(i, j)` used throughout the crate
//! refer to positions in [`RankedDataset::observations`].

mod csv;
mod ranks;
mod worldbank;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use self::csv::{parse_csv, write_csv, CsvImport};
pub use self::ranks::{midranks, to_midranks};
pub use self::worldbank::parse_worldbank_pair;

#[derive(Debug, Error, PartialEq)]
pub enum DatasetError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("malformed CSV: {0}")]
    MalformedCsv(String),
    #[error("column {0} not found in header")]
    ColumnNotFound(String),
    #[error("x and y columns must differ (both select {0})")]
    SameColumn(String),
    #[error("need at least 2 valid rows, found {found}")]
    TooFewRows { found: usize },
    #[error("year column {0} not present in World Bank export")]
    YearNotFound(i32),
    #[error("observation {index} has a non-finite value")]
    NonFinite { index: usize },
}

/// One ranked item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub label: String,
    pub x: f64,
    pub y: f64,
}

impl Observation {
    pub fn new(label: impl Into<String>, x: f64, y: f64) -> Self {
        Self {
            label: label.into(),
            x,
            y,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedDataset {
    pub observations: Vec<Observation>,
    pub x_name: String,
    pub y_name: String,
}

impl RankedDataset {
    pub fn new(
        observations: Vec<Observation>,
        x_name: impl Into<String>,
        y_name: impl Into<String>,
    ) -> Self {
        Self {
            observations,
            x_name: x_name.into(),
            y_name: y_name.into(),
        }
    }

    /// Builds a dataset from parallel columns, labeling rows by index.
    ///
    /// # Panics
    ///
    /// Panics if the columns differ in length.
    pub fn from_columns(x: &[f64], y: &[f64]) -> Self {
        assert_eq!(x.len(), y.len(), "column lengths differ");
        let observations = x
            .iter()
            .zip(y)
            .enumerate()
            .map(|(i, (&x, &y))| Observation::new(i.to_string(), x, y))
            .collect();
        Self::new(observations, "x", "y")
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn xs(&self) -> Vec<f64> {
        self.observations.iter().map(|o| o.x).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        self.observations.iter().map(|o| o.y).collect()
    }

    /// Number of unordered pairs, `m(m-1)/2`.
    pub fn pair_count(&self) -> u64 {
        let m = self.len() as u64;
        m * m.saturating_sub(1) / 2
    }

    /// Checks the preconditions shared by every correlation and geometry
    /// operation: at least two observations, all finite.
    pub fn ensure_usable(&self) -> Result<(), DatasetError> {
        if self.len() < 2 {
            return Err(DatasetError::TooFewRows { found: self.len() });
        }
        match self.observations.iter().position(|o| !o.is_finite()) {
            Some(index) => Err(DatasetError::NonFinite { index }),
            None => Ok(()),
        }
    }

    /// Swaps the roles of the two ranking variables.
    pub fn swapped(&self) -> Self {
        Self {
            observations: self
                .observations
                .iter()
                .map(|o| Observation::new(o.label.clone(), o.y, o.x))
                .collect(),
            x_name: self.y_name.clone(),
            y_name: self.x_name.clone(),
        }
    }
}

/// Selects a CSV column by header name or by 0-based position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ColumnSelector {
    Name(String),
    Index(usize),
}

impl ColumnSelector {
    /// Resolves against a header. A name match wins over an index reading,
    /// so a header literally named `"2"` is selectable by name.
    pub fn resolve(&self, header: &[String]) -> Result<usize, DatasetError> {
        match self {
            ColumnSelector::Name(name) => header
                .iter()
                .position(|h| h == name)
                .or_else(|| {
                    name.parse::<usize>()
                        .ok()
                        .filter(|&i| i < header.len())
                })
                .ok_or_else(|| DatasetError::ColumnNotFound(name.clone())),
            ColumnSelector::Index(i) if *i < header.len() => Ok(*i),
            ColumnSelector::Index(i) => Err(DatasetError::ColumnNotFound(format!("#{i}"))),
        }
    }
}

impl std::fmt::Display for ColumnSelector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ColumnSelector::Name(n) => f.write_str(n),
            ColumnSelector::Index(i) => write!(f, "#{i}"),
        }
    }
}

impl From<&str> for ColumnSelector {
    fn from(s: &str) -> Self {
        ColumnSelector::Name(s.to_string())
    }
}

impl From<usize> for ColumnSelector {
    fn from(i: usize) -> Self {
        ColumnSelector::Index(i)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub label_column: Option<ColumnSelector>,
    pub x_column: ColumnSelector,
    pub y_column: ColumnSelector,
}

impl ColumnSpec {
    pub fn new(x: impl Into<ColumnSelector>, y: impl Into<ColumnSelector>) -> Self {
        Self {
            label_column: None,
            x_column: x.into(),
            y_column: y.into(),
        }
    }

    pub fn with_label(mut self, label: impl Into<ColumnSelector>) -> Self {
        self.label_column = Some(label.into());
        self
    }
}

/// Summary of one ranking column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSummary {
    pub min: Option<f64>,
    pub max: Option<f64>,
    /// Sizes of each group of equal values with more than one member, in
    /// ascending value order.
    pub tie_groups: Vec<usize>,
    pub non_finite: Vec<usize>,
}

impl ColumnSummary {
    fn of(values: impl Iterator<Item = f64>) -> Self {
        let mut finite = Vec::new();
        let mut non_finite = Vec::new();
        for (i, v) in values.enumerate() {
            if v.is_finite() {
                finite.push(v);
            } else {
                non_finite.push(i);
            }
        }
        finite.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        let mut tie_groups = Vec::new();
        let mut run = 1;
        for w in finite.windows(2) {
            if w[0] == w[1] {
                run += 1;
            } else {
                if run > 1 {
                    tie_groups.push(run);
                }
                run = 1;
            }
        }
        if run > 1 {
            tie_groups.push(run);
        }
        Self {
            min: finite.first().copied(),
            max: finite.last().copied(),
            tie_groups,
            non_finite,
        }
    }

    pub fn tie_group_count(&self) -> usize {
        self.tie_groups.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub count: usize,
    pub x: ColumnSummary,
    pub y: ColumnSummary,
}

impl ValidationReport {
    /// True when every value is finite and there are at least two rows.
    pub fn is_valid(&self) -> bool {
        self.count >= 2 && self.x.non_finite.is_empty() && self.y.non_finite.is_empty()
    }
}

pub fn validate_dataset(dataset: &RankedDataset) -> ValidationReport {
    ValidationReport {
        count: dataset.len(),
        x: ColumnSummary::of(dataset.observations.iter().map(|o| o.x)),
        y: ColumnSummary::of(dataset.observations.iter().map(|o| o.y)),
    }
}
