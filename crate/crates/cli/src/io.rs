//! Matrix input: CSV (one row per line, no header) or JSON
//! (`{"cells": [[...]], "labels": [...]}` or a bare array of rows).

use std::fs;
use std::path::Path;

use funcorr_core::ConfusionMatrix;
use serde::Deserialize;

use crate::fixtures;

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("CSV line {line}, field {field}: {value:?} is not a number")]
    Number { line: u64, field: usize, value: String },
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{labels} labels given for {classes} classes")]
    Labels { labels: usize, classes: usize },
    #[error("no fixture named {0:?}")]
    UnknownFixture(String),
    #[error(transparent)]
    Matrix(#[from] funcorr_core::Error),
}

/// A parsed matrix with its display name.
#[derive(Debug, Clone)]
pub struct NamedMatrix {
    pub name: String,
    pub matrix: ConfusionMatrix,
    pub labels: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonMatrix {
    Object {
        cells: Vec<Vec<f64>>,
        #[serde(default)]
        labels: Option<Vec<String>>,
    },
    Rows(Vec<Vec<f64>>),
}

/// Parses CSV or JSON text; JSON is recognized by a leading `{` or `[`.
pub fn parse_matrix(text: &str) -> Result<(ConfusionMatrix, Option<Vec<String>>), InputError> {
    let trimmed = text.trim_start();
    let (rows, labels) = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        match serde_json::from_str::<JsonMatrix>(trimmed)? {
            JsonMatrix::Object { cells, labels } => (cells, labels),
            JsonMatrix::Rows(cells) => (cells, None),
        }
    } else {
        (parse_csv(text)?, None)
    };
    let m = ConfusionMatrix::from_rows(&rows)?;
    if let Some(l) = &labels {
        if l.len() != m.dim() {
            return Err(InputError::Labels { labels: l.len(), classes: m.dim() });
        }
    }
    Ok((m, labels))
}

fn parse_csv(text: &str) -> Result<Vec<Vec<f64>>, InputError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let row = record
            .iter()
            .enumerate()
            .map(|(field, value)| {
                value.parse::<f64>().map_err(|_| InputError::Number { line, field: field + 1, value: value.to_string() })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn read_file(path: &Path) -> Result<NamedMatrix, InputError> {
    let text = fs::read_to_string(path).map_err(|source| InputError::Read { path: path.display().to_string(), source })?;
    let (matrix, labels) = parse_matrix(&text)?;
    Ok(NamedMatrix { name: path.display().to_string(), matrix, labels })
}

pub fn load_fixture(name: &str) -> Result<NamedMatrix, InputError> {
    let f = fixtures::find(name).ok_or_else(|| InputError::UnknownFixture(name.to_string()))?;
    Ok(NamedMatrix { name: f.name.to_string(), matrix: f.matrix(), labels: None })
}
