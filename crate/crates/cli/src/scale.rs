//! Nominal one-hot scaling: turns a categorical CSV table into a binary
//! context. Every distinct value of every column becomes one attribute
//! named `column=value`; a cell is 1 exactly in its own value's attribute.
//! Values are ordered lexicographically within each column for
//! deterministic output. Real-valued binarization is out of scope.

use std::collections::BTreeSet;

use pfca_core::FormalContext;

use crate::CliError;

pub fn one_hot_from_csv(text: &str, path: &str) -> Result<FormalContext, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if headers.is_empty() {
        return Err(CliError::Parse {
            path: path.to_string(),
            line: 1,
            msg: "empty header row".into(),
        });
    }
    let mut records: Vec<Vec<String>> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != headers.len() {
            return Err(CliError::Parse {
                path: path.to_string(),
                line: idx + 2,
                msg: format!(
                    "row has {} fields, expected {}",
                    record.len(),
                    headers.len()
                ),
            });
        }
        records.push(record.iter().map(|f| f.trim().to_string()).collect());
    }

    let mut attribute_labels = Vec::new();
    let mut column_offsets = Vec::new();
    let mut column_values: Vec<Vec<String>> = Vec::new();
    for (c, header) in headers.iter().enumerate() {
        let values: BTreeSet<String> = records.iter().map(|r| r[c].clone()).collect();
        column_offsets.push(attribute_labels.len());
        for value in &values {
            attribute_labels.push(format!("{header}={value}"));
        }
        column_values.push(values.into_iter().collect());
    }

    let n = attribute_labels.len();
    let rows: Vec<Vec<u8>> = records
        .iter()
        .map(|record| {
            let mut row = vec![0u8; n];
            for (c, value) in record.iter().enumerate() {
                let slot = column_values[c].iter().position(|v| v == value).unwrap();
                row[column_offsets[c] + slot] = 1;
            }
            row
        })
        .collect();

    let object_labels = (1..=rows.len()).map(|i| format!("o{i}")).collect();
    Ok(FormalContext::from_rows(&rows)?.with_labels(object_labels, attribute_labels)?)
}
