//! On-disk formats: bicluster JSON, synthetic datasets, matrix CSV and msnbc
//! sequence files (plain or gzip).

use std::io::Read;
use std::path::Path;

use anyhow::{bail, Context, Result};
use flate2::read::GzDecoder;
use serde::{Deserialize, Serialize};
use webbic_core::ingest::{self, SessionLog};
use webbic_core::metrics::acv;
use webbic_core::{AccessMatrix, Bicluster};

/// `{"rows":[ints],"cols":[ints],"acv":float,"volume":int}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiclusterRecord {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub acv: f64,
    pub volume: usize,
}

impl BiclusterRecord {
    /// Scores `b` against `matrix`; ACV is 0 where it is undefined.
    pub fn scored(matrix: &AccessMatrix, b: &Bicluster) -> Self {
        Self {
            rows: b.rows().to_vec(),
            cols: b.cols().to_vec(),
            acv: acv(matrix, b).unwrap_or(0.0),
            volume: b.volume(),
        }
    }

    pub fn bicluster(&self) -> Bicluster {
        Bicluster::new(self.rows.clone(), self.cols.clone())
    }
}

pub fn records(matrix: &AccessMatrix, biclusters: &[Bicluster]) -> Vec<BiclusterRecord> {
    biclusters
        .iter()
        .map(|b| BiclusterRecord::scored(matrix, b))
        .collect()
}

/// Synthetic matrix with its implanted ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticFile {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
    pub truth: Vec<BiclusterRecord>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub overwritten_cells: usize,
}

impl SyntheticFile {
    pub fn new(
        matrix: &AccessMatrix,
        truth: &[Bicluster],
        seed: u64,
        overwritten_cells: usize,
    ) -> Self {
        Self {
            row_labels: matrix.row_labels().to_vec(),
            col_labels: matrix.col_labels().to_vec(),
            values: (0..matrix.rows()).map(|i| matrix.row(i).to_vec()).collect(),
            truth: records(matrix, truth),
            seed: Some(seed),
            overwritten_cells,
        }
    }

    pub fn matrix(&self) -> Result<AccessMatrix> {
        let m = AccessMatrix::from_rows(&self.values)?;
        let m = if self.row_labels.is_empty() && self.col_labels.is_empty() {
            m
        } else {
            m.with_labels(self.row_labels.clone(), self.col_labels.clone())?
        };
        for t in &self.truth {
            t.bicluster().check_bounds(m.rows(), m.cols())?;
        }
        Ok(m)
    }
}

/// Reads a file, transparently inflating gzip content.
pub fn read_maybe_gzip(path: &Path) -> Result<Vec<u8>> {
    let raw = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    if raw.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        GzDecoder::new(raw.as_slice())
            .read_to_end(&mut out)
            .with_context(|| format!("decompressing {}", path.display()))?;
        Ok(out)
    } else {
        Ok(raw)
    }
}

pub fn read_msnbc(path: &Path) -> Result<SessionLog> {
    let bytes = read_maybe_gzip(path)?;
    ingest::parse_sessions(&bytes).with_context(|| format!("parsing {}", path.display()))
}

/// Parses a numeric CSV whose header holds page labels (after a leading
/// corner cell) and whose first column holds user labels.
pub fn parse_matrix_csv(text: &[u8]) -> Result<AccessMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text);
    let headers = reader.headers()?.clone();
    if headers.len() < 2 {
        bail!("matrix CSV needs a label column and at least one page column");
    }
    let col_labels: Vec<String> = headers.iter().skip(1).map(String::from).collect();
    let mut row_labels = Vec::new();
    let mut rows = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record?;
        let line = idx + 2;
        if record.len() != headers.len() {
            bail!(
                "line {line}: {} fields, expected {}",
                record.len(),
                headers.len()
            );
        }
        row_labels.push(record[0].to_string());
        let row = record
            .iter()
            .skip(1)
            .map(|v| {
                v.parse::<f64>()
                    .with_context(|| format!("line {line}: bad number {v:?}"))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        bail!("matrix CSV has no data rows");
    }
    Ok(AccessMatrix::from_rows(&rows)?.with_labels(row_labels, col_labels)?)
}

pub fn write_matrix_csv(matrix: &AccessMatrix) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["user".to_string()];
    header.extend(matrix.col_labels().iter().cloned());
    w.write_record(&header)?;
    for i in 0..matrix.rows() {
        let mut rec = vec![matrix.row_labels()[i].clone()];
        rec.extend(matrix.row(i).iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    Ok(w.into_inner()?)
}
