//! Clickstream sequences and the user × page access matrix built from them.
//!
//! Input follows the msnbc sequence layout: `%` lines are comments, the first
//! remaining non-blank line names the page categories, and every later
//! non-blank line is one session of 1-based category indices.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// One user's ordered visits, as 1-based page-category indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Session(Vec<usize>);

impl Session {
    /// Builds a session, checking every index lies in `1..=page_count`.
    pub fn new(pages: Vec<usize>, page_count: usize) -> Result<Self> {
        if pages.is_empty() {
            return Err(Error::Parse {
                line: 0,
                message: "empty session".to_string(),
            });
        }
        if let Some(&bad) = pages.iter().find(|&&p| p == 0 || p > page_count) {
            return Err(Error::PageOutOfRange {
                session: 0,
                index: bad,
                page_count,
            });
        }
        Ok(Self(pages))
    }

    pub fn pages(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Parsed sequence file: sessions in file order plus the category names
/// from the header line.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionLog {
    pub sessions: Vec<Session>,
    pub page_names: Vec<String>,
}

impl SessionLog {
    pub fn page_count(&self) -> usize {
        self.page_names.len()
    }
}

/// Parses an msnbc-format sequence file.
///
/// Errors name the 1-based file line that failed. A file with no header or
/// no session lines fails with [`Error::NoData`].
pub fn parse_sessions(input: &[u8]) -> Result<SessionLog> {
    let mut page_names: Option<Vec<String>> = None;
    let mut sessions = Vec::new();

    for (idx, raw) in input.split(|&b| b == b'\n').enumerate() {
        let line_no = idx + 1;
        let line = core::str::from_utf8(raw).map_err(|e| Error::Parse {
            line: line_no,
            message: format!("invalid UTF-8: {e}"),
        })?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let Some(names) = &page_names else {
            page_names = Some(line.split_whitespace().map(String::from).collect());
            continue;
        };
        let page_count = names.len();
        let mut pages = Vec::new();
        for token in line.split_whitespace() {
            let index: usize = token.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("malformed page index {token:?}"),
            })?;
            if index == 0 || index > page_count {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("page index {index} outside 1..={page_count}"),
                });
            }
            pages.push(index);
        }
        sessions.push(Session(pages));
    }

    match page_names {
        Some(page_names) if !sessions.is_empty() => Ok(SessionLog {
            sessions,
            page_names,
        }),
        _ => Err(Error::NoData),
    }
}

/// Keeps sessions whose length lies in `min_len..=max_len`, preserving order.
pub fn filter_sessions(sessions: &[Session], min_len: usize, max_len: usize) -> Vec<Session> {
    sessions
        .iter()
        .filter(|s| (min_len..=max_len).contains(&s.len()))
        .cloned()
        .collect()
}

/// Mean session length, or 0 for an empty list.
pub fn mean_length(sessions: &[Session]) -> f64 {
    if sessions.is_empty() {
        return 0.0;
    }
    let total: usize = sessions.iter().map(Session::len).sum();
    total as f64 / sessions.len() as f64
}

/// Dense n × m matrix of nonnegative values with row (user) and column
/// (page) labels. Stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct AccessMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
}

impl AccessMatrix {
    /// Builds a matrix from row-major values with default labels
    /// `u1..un` and `p1..pm`.
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!("{rows}x{cols} matrix is empty")));
        }
        if values.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} values for a {rows}x{cols} matrix",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| **v < 0.0 || !v.is_finite()) {
            return Err(Error::Dimension(format!(
                "entry {v} is not a nonnegative number"
            )));
        }
        Ok(Self {
            rows,
            cols,
            values,
            row_labels: (1..=rows).map(|i| format!("u{i}")).collect(),
            col_labels: (1..=cols).map(|j| format!("p{j}")).collect(),
        })
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::Dimension(format!(
                "ragged rows: {} vs {cols} columns",
                r.len()
            )));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn with_labels(mut self, row_labels: Vec<String>, col_labels: Vec<String>) -> Result<Self> {
        if row_labels.len() != self.rows || col_labels.len() != self.cols {
            return Err(Error::Dimension(format!(
                "{} row labels and {} column labels for a {}x{} matrix",
                row_labels.len(),
                col_labels.len(),
                self.rows,
                self.cols
            )));
        }
        self.row_labels = row_labels;
        self.col_labels = col_labels;
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Counts page visits per session: entry (i, j) is how often session i
/// visited page j + 1.
pub fn build_access_matrix(sessions: &[Session], page_count: usize) -> Result<AccessMatrix> {
    if sessions.is_empty() {
        return Err(Error::NoSessions);
    }
    let mut values = vec![0.0; sessions.len() * page_count];
    for (i, session) in sessions.iter().enumerate() {
        for &page in session.pages() {
            if page == 0 || page > page_count {
                return Err(Error::PageOutOfRange {
                    session: i,
                    index: page,
                    page_count,
                });
            }
            values[i * page_count + page - 1] += 1.0;
        }
    }
    AccessMatrix::new(sessions.len(), page_count, values)
}
