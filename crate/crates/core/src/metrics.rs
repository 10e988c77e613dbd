//! Scoring functions: Pearson correlation, average correlation value (ACV),
//! volume, GA fitness and the overlap degree of a bicluster collection.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ingest::AccessMatrix;

/// A submatrix given by a set of row indices and a set of column indices.
///
/// Both index lists are kept sorted and free of duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Bicluster {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl Bicluster {
    pub fn new(mut rows: Vec<usize>, mut cols: Vec<usize>) -> Self {
        rows.sort_unstable();
        rows.dedup();
        cols.sort_unstable();
        cols.dedup();
        Self { rows, cols }
    }

    /// The bicluster covering every element of an `n × m` matrix.
    pub fn full(n: usize, m: usize) -> Self {
        Self {
            rows: (0..n).collect(),
            cols: (0..m).collect(),
        }
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    pub fn contains_row(&self, i: usize) -> bool {
        self.rows.binary_search(&i).is_ok()
    }

    pub fn contains_col(&self, j: usize) -> bool {
        self.cols.binary_search(&j).is_ok()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.contains_row(i) && self.contains_col(j)
    }

    /// |I| × |J|.
    pub fn volume(&self) -> usize {
        self.rows.len() * self.cols.len()
    }

    /// At least two rows and two columns, the minimum for which ACV is
    /// meaningful on both axes.
    pub fn is_scorable(&self) -> bool {
        self.rows.len() >= 2 && self.cols.len() >= 2
    }

    pub fn check_bounds(&self, n: usize, m: usize) -> Result<()> {
        if let Some(&i) = self.rows.last().filter(|&&i| i >= n) {
            return Err(Error::IndexOutOfRange { index: i, len: n });
        }
        if let Some(&j) = self.cols.last().filter(|&&j| j >= m) {
            return Err(Error::IndexOutOfRange { index: j, len: m });
        }
        Ok(())
    }

    pub(crate) fn insert_row(&mut self, i: usize) {
        if let Err(pos) = self.rows.binary_search(&i) {
            self.rows.insert(pos, i);
        }
    }

    pub(crate) fn insert_col(&mut self, j: usize) {
        if let Err(pos) = self.cols.binary_search(&j) {
            self.cols.insert(pos, j);
        }
    }

    pub(crate) fn remove_row(&mut self, i: usize) {
        if let Ok(pos) = self.rows.binary_search(&i) {
            self.rows.remove(pos);
        }
    }

    pub(crate) fn remove_col(&mut self, j: usize) {
        if let Ok(pos) = self.cols.binary_search(&j) {
            self.cols.remove(pos);
        }
    }
}

/// Pearson product-moment correlation of two equal-length vectors.
///
/// A vector with zero variance has no defined correlation; it is reported
/// as 0.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::VectorLength {
            left: x.len(),
            right: y.len(),
        });
    }
    let (Some(cx), Some(cy)) = (unit_centered(x), unit_centered(y)) else {
        return Ok(0.0);
    };
    Ok(dot(&cx, &cy).clamp(-1.0, 1.0))
}

/// Centers `v` and scales it to unit length. `None` when the vector is
/// constant (or shorter than two values).
pub(crate) fn unit_centered(v: &[f64]) -> Option<Vec<f64>> {
    if v.len() < 2 {
        return None;
    }
    let first = v[0];
    if v.iter().all(|&x| x == first) {
        return None;
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let mut centered: Vec<f64> = v.iter().map(|&x| x - mean).collect();
    let norm = libm::sqrt(centered.iter().map(|c| c * c).sum::<f64>());
    if norm == 0.0 {
        return None;
    }
    for c in &mut centered {
        *c /= norm;
    }
    Some(centered)
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Mean absolute off-diagonal correlation among `vectors`.
///
/// Equivalent to `(ΣΣ|r_ij| − k) / (k² − k)` with the self-correlations
/// counted as 1. `None` when fewer than two vectors are given.
fn mean_abs_correlation(vectors: &[Option<Vec<f64>>]) -> Option<f64> {
    let k = vectors.len();
    if k < 2 {
        return None;
    }
    let mut sum = 0.0;
    for (a, va) in vectors.iter().enumerate() {
        let Some(va) = va else { continue };
        for vb in vectors[a + 1..].iter().flatten() {
            sum += dot(va, vb).clamp(-1.0, 1.0).abs();
        }
    }
    Some((2.0 * sum) / (k * (k - 1)) as f64)
}

/// Mean absolute pairwise correlation among arbitrary real vectors of equal
/// length, as [`row_term`] computes it for matrix rows.
pub fn correlation_term(vectors: &[Vec<f64>]) -> Option<f64> {
    let units: Vec<Option<Vec<f64>>> = vectors.iter().map(|v| unit_centered(v)).collect();
    mean_abs_correlation(&units)
}

/// Mean absolute correlation between the rows of the submatrix, or `None`
/// when it has fewer than two rows.
pub fn row_term(matrix: &AccessMatrix, rows: &[usize], cols: &[usize]) -> Option<f64> {
    if rows.len() < 2 {
        return None;
    }
    let vectors: Vec<Option<Vec<f64>>> = rows
        .iter()
        .map(|&i| {
            let r = matrix.row(i);
            let v: Vec<f64> = cols.iter().map(|&j| r[j]).collect();
            unit_centered(&v)
        })
        .collect();
    mean_abs_correlation(&vectors)
}

/// Mean absolute correlation between the columns of the submatrix, or
/// `None` when it has fewer than two columns.
pub fn col_term(matrix: &AccessMatrix, rows: &[usize], cols: &[usize]) -> Option<f64> {
    if cols.len() < 2 {
        return None;
    }
    let vectors: Vec<Option<Vec<f64>>> = cols
        .iter()
        .map(|&j| {
            let v: Vec<f64> = rows.iter().map(|&i| matrix.get(i, j)).collect();
            unit_centered(&v)
        })
        .collect();
    mean_abs_correlation(&vectors)
}

/// Average correlation value: the larger of the mean absolute pairwise row
/// correlation and the mean absolute pairwise column correlation.
///
/// A term whose axis has fewer than two members is skipped. Correlations
/// over fewer than two points count as 0, so a single-row bicluster scores
/// 0. Fails when both axes have fewer than two members.
pub fn acv(matrix: &AccessMatrix, b: &Bicluster) -> Result<f64> {
    b.check_bounds(matrix.rows(), matrix.cols())?;
    acv_unchecked(matrix, b.rows(), b.cols())
}

pub(crate) fn acv_unchecked(matrix: &AccessMatrix, rows: &[usize], cols: &[usize]) -> Result<f64> {
    match (row_term(matrix, rows, cols), col_term(matrix, rows, cols)) {
        (None, None) => Err(Error::DegenerateBicluster {
            rows: rows.len(),
            cols: cols.len(),
        }),
        (Some(r), None) => Ok(r),
        (None, Some(c)) => Ok(c),
        (Some(r), Some(c)) => Ok(r.max(c)),
    }
}

/// Number of elements covered by the bicluster.
pub fn volume(b: &Bicluster) -> usize {
    b.volume()
}

/// GA fitness: the volume when the bicluster has at least 2 × 2 elements
/// and ACV ≥ `delta`, otherwise 0.
pub fn fitness(matrix: &AccessMatrix, b: &Bicluster, delta: f64) -> f64 {
    scored_fitness(matrix, b, delta).0
}

/// Fitness together with the ACV it was derived from (0 for degenerate
/// or out-of-range biclusters).
pub fn scored_fitness(matrix: &AccessMatrix, b: &Bicluster, delta: f64) -> (f64, f64) {
    if !b.is_scorable() || b.check_bounds(matrix.rows(), matrix.cols()).is_err() {
        return (0.0, 0.0);
    }
    let score = acv_unchecked(matrix, b.rows(), b.cols()).unwrap_or(0.0);
    if score >= delta {
        (b.volume() as f64, score)
    } else {
        (0.0, score)
    }
}

/// Per-element coverage of a bicluster collection and the overlap degree
/// derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapReport {
    pub rows: usize,
    pub cols: usize,
    /// Row-major count of biclusters containing each element.
    pub coverage: Vec<u32>,
    pub biclusters: usize,
    /// Overlap degree with uncovered elements contributing 0; in `[0, 1]`.
    pub r: f64,
    /// Overlap degree with uncovered elements contributing `-1/(N-1)`.
    pub r_unclamped: f64,
}

impl OverlapReport {
    pub fn coverage_at(&self, i: usize, j: usize) -> u32 {
        self.coverage[i * self.cols + j]
    }
}

/// Overlap degree of `biclusters` over an `n × m` matrix.
///
/// Each element contributes `max(0, coverage − 1) / (N − 1)`; the mean over
/// all elements is `r`. Requires at least two biclusters.
pub fn overlap_degree(biclusters: &[Bicluster], n: usize, m: usize) -> Result<OverlapReport> {
    let count = biclusters.len();
    if count < 2 {
        return Err(Error::TooFewBiclusters(count));
    }
    let mut coverage = vec![0u32; n * m];
    for b in biclusters {
        b.check_bounds(n, m)?;
        for &i in b.rows() {
            for &j in b.cols() {
                coverage[i * m + j] += 1;
            }
        }
    }
    let mut shared: u64 = 0;
    let mut signed: i64 = 0;
    for &c in &coverage {
        shared += u64::from(c.saturating_sub(1));
        signed += i64::from(c) - 1;
    }
    let denom = ((count - 1) * n * m) as f64;
    Ok(OverlapReport {
        rows: n,
        cols: m,
        coverage,
        biclusters: count,
        r: shared as f64 / denom,
        r_unclamped: signed as f64 / denom,
    })
}

/// Percentage of rows and of columns that belong to at least one bicluster.
pub fn coverage_percentages(biclusters: &[Bicluster], n: usize, m: usize) -> (f64, f64) {
    let mut row_hit = vec![false; n];
    let mut col_hit = vec![false; m];
    for b in biclusters {
        for &i in b.rows().iter().filter(|&&i| i < n) {
            row_hit[i] = true;
        }
        for &j in b.cols().iter().filter(|&&j| j < m) {
            col_hit[j] = true;
        }
    }
    let pct = |hits: &[bool]| {
        if hits.is_empty() {
            0.0
        } else {
            100.0 * hits.iter().filter(|&&h| h).count() as f64 / hits.len() as f64
        }
    };
    (pct(&row_hit), pct(&col_hit))
}

/// Mean ACV and mean volume of a collection; degenerate members count as
/// ACV 0. Returns zeros for an empty slice.
pub fn averages(matrix: &AccessMatrix, biclusters: &[Bicluster]) -> (f64, f64) {
    if biclusters.is_empty() {
        return (0.0, 0.0);
    }
    let k = biclusters.len() as f64;
    let acv_sum: f64 = biclusters
        .iter()
        .map(|b| acv(matrix, b).unwrap_or(0.0))
        .sum();
    let vol_sum: usize = biclusters.iter().map(Bicluster::volume).sum();
    (acv_sum / k, vol_sum as f64 / k)
}
