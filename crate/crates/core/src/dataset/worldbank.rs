//! World Bank indicator exports (`API_<code>_DS2_en_csv_v2_*.csv`).
//!
//! These files open with a few metadata lines ("Data Source", "Last Updated
//! Date") before the real header, which starts with `Country Name,Country
//! Code,Indicator Name,Indicator Code` followed by one column per year.

use std::collections::HashMap;

use super::csv::parse_number;
use super::{DatasetError, Observation, RankedDataset};

struct IndicatorTable {
    indicator_name: Option<String>,
    /// (country name, country code, value for the selected year)
    rows: Vec<(String, String, Option<f64>)>,
}

fn clean(cell: &str) -> &str {
    cell.trim_start_matches('\u{feff}').trim()
}

fn read_indicator(raw: &[u8], year: i32) -> Result<IndicatorTable, DatasetError> {
    let mut reader = ::csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(raw);

    let mut records = reader.records();
    let header = loop {
        match records.next() {
            Some(Ok(rec)) => {
                if rec.len() >= 2
                    && clean(&rec[0]) == "Country Name"
                    && clean(&rec[1]) == "Country Code"
                {
                    break rec;
                }
            }
            Some(Err(e)) => return Err(DatasetError::MalformedCsv(e.to_string())),
            None => {
                return Err(DatasetError::MalformedHeader(
                    "no \"Country Name\",\"Country Code\" header line".into(),
                ))
            }
        }
    };

    let year_key = year.to_string();
    let year_col = header
        .iter()
        .position(|h| clean(h) == year_key)
        .ok_or(DatasetError::YearNotFound(year))?;
    let indicator_col = header.iter().position(|h| clean(h) == "Indicator Name");

    let mut table = IndicatorTable {
        indicator_name: None,
        rows: Vec::new(),
    };
    for rec in records {
        let rec = rec.map_err(|e| DatasetError::MalformedCsv(e.to_string()))?;
        if rec.len() < 2 {
            continue;
        }
        if table.indicator_name.is_none() {
            table.indicator_name = indicator_col
                .and_then(|c| rec.get(c))
                .map(|s| clean(s).to_string())
                .filter(|s| !s.is_empty());
        }
        table.rows.push((
            clean(&rec[0]).to_string(),
            clean(&rec[1]).to_string(),
            rec.get(year_col).and_then(parse_number),
        ));
    }
    Ok(table)
}

/// Joins two indicator exports on country code for one year.
///
/// Countries missing either value are dropped. Output order follows the
/// first file; labels are its country names.
pub fn parse_worldbank_pair(
    indicator_x: &[u8],
    indicator_y: &[u8],
    year: i32,
) -> Result<RankedDataset, DatasetError> {
    let tx = read_indicator(indicator_x, year)?;
    let ty = read_indicator(indicator_y, year)?;

    let y_by_code: HashMap<&str, f64> = ty
        .rows
        .iter()
        .filter_map(|(_, code, v)| v.map(|v| (code.as_str(), v)))
        .collect();

    let observations: Vec<Observation> = tx
        .rows
        .iter()
        .filter_map(|(name, code, x)| {
            let x = (*x)?;
            let y = *y_by_code.get(code.as_str())?;
            Some(Observation::new(name.clone(), x, y))
        })
        .collect();

    if observations.len() < 2 {
        return Err(DatasetError::TooFewRows {
            found: observations.len(),
        });
    }
    Ok(RankedDataset::new(
        observations,
        tx.indicator_name.unwrap_or_else(|| "x".into()),
        ty.indicator_name.unwrap_or_else(|| "y".into()),
    ))
}
