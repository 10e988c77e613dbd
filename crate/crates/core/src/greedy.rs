//! Greedy growth of seeds: single-element insertions and deletions accepted
//! only when they strictly raise ACV (by more than [`MIN_GAIN`]).
//!
//! Growth runs four stages in a fixed order: column insertion, row
//! insertion, column deletion, row deletion. Each stage sweeps candidates in
//! ascending index order, accepts the first improving move it meets, and
//! repeats sweeps until one makes no change. Insertion stages alternate until
//! neither moves, as do deletion stages, and the insertion/deletion rounds
//! repeat until a whole round is quiet, so the result admits no single
//! improving move.
//!
//! Acceptance always compares freshly computed ACVs. Candidates are first
//! screened with an incrementally maintained same-axis term; only candidates
//! whose estimate comes within [`SCREEN_MARGIN`] of the current score are
//! rescored from scratch.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::ingest::AccessMatrix;
use crate::metrics::{self, acv_unchecked, unit_centered, Bicluster};

/// Estimates below `current - SCREEN_MARGIN` are rejected without a full
/// rescore. Far larger than the rounding drift of the incremental sums.
pub const SCREEN_MARGIN: f64 = 1e-9;

/// A move must raise ACV by more than this to be accepted. Smaller
/// differences are rounding noise between equal scores (e.g. two
/// perfectly coherent submatrices evaluating to 1 and 1 - 2^-52).
pub const MIN_GAIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Initial,
    ColumnInsertion,
    RowInsertion,
    ColumnDeletion,
    RowDeletion,
}

impl Stage {
    pub const ALL: [Stage; 5] = [
        Stage::Initial,
        Stage::ColumnInsertion,
        Stage::RowInsertion,
        Stage::ColumnDeletion,
        Stage::RowDeletion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Initial => "initial",
            Stage::ColumnInsertion => "column-insertion",
            Stage::RowInsertion => "row-insertion",
            Stage::ColumnDeletion => "column-deletion",
            Stage::RowDeletion => "row-deletion",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One accepted move.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Move {
    pub stage: Stage,
    /// Row or column index, depending on the stage.
    pub index: usize,
    pub acv_before: f64,
    pub acv_after: f64,
}

/// Result of growing one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct Growth {
    pub bicluster: Bicluster,
    pub acv: f64,
    /// State after each stage, indexed like [`Stage::ALL`]. The middle
    /// entries come from the first round: after the first column-insertion
    /// pass, after the first round's insertions settle, and after the first
    /// column-deletion pass. The last entry is the converged output.
    pub snapshots: [Bicluster; 5],
    pub moves: Vec<Move>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageRecord {
    pub stage: Stage,
    pub avg_acv: f64,
    pub avg_volume: f64,
}

/// Average ACV and volume across all seeds after each stage.
#[derive(Debug, Clone, PartialEq)]
pub struct StageTrace {
    pub records: Vec<StageRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Axis {
    Row,
    Col,
}

/// Unit-centered vectors for the members of one axis, restricted to the
/// other axis, plus the running sum of absolute pairwise correlations.
struct AxisCache {
    vectors: Vec<Option<Vec<f64>>>,
    /// Per member: sum of |r| against every other member.
    contrib: Vec<f64>,
    pair_sum: f64,
}

fn abs_dot(a: &Option<Vec<f64>>, b: &Option<Vec<f64>>) -> f64 {
    match (a, b) {
        (Some(a), Some(b)) => a
            .iter()
            .zip(b)
            .map(|(x, y)| x * y)
            .sum::<f64>()
            .clamp(-1.0, 1.0)
            .abs(),
        _ => 0.0,
    }
}

impl AxisCache {
    fn build(vectors: Vec<Option<Vec<f64>>>) -> Self {
        let k = vectors.len();
        let mut contrib = alloc::vec![0.0; k];
        let mut pair_sum = 0.0;
        for a in 0..k {
            for b in a + 1..k {
                let r = abs_dot(&vectors[a], &vectors[b]);
                contrib[a] += r;
                contrib[b] += r;
                pair_sum += r;
            }
        }
        Self {
            vectors,
            contrib,
            pair_sum,
        }
    }

    fn len(&self) -> usize {
        self.vectors.len()
    }

    fn mean_of(pair_sum: f64, k: usize) -> Option<f64> {
        (k >= 2).then(|| 2.0 * pair_sum / (k * (k - 1)) as f64)
    }

    fn added_sum(&self, v: &Option<Vec<f64>>) -> f64 {
        self.vectors.iter().map(|w| abs_dot(v, w)).sum()
    }

    fn term_with(&self, added: f64) -> Option<f64> {
        Self::mean_of(self.pair_sum + added, self.len() + 1)
    }

    fn term_without(&self, pos: usize) -> Option<f64> {
        Self::mean_of(self.pair_sum - self.contrib[pos], self.len() - 1)
    }

    fn push(&mut self, v: Option<Vec<f64>>) {
        let mut own = 0.0;
        for (w, c) in self.vectors.iter().zip(self.contrib.iter_mut()) {
            let r = abs_dot(&v, w);
            *c += r;
            own += r;
        }
        self.pair_sum += own;
        self.contrib.push(own);
        self.vectors.push(v);
    }

    fn remove(&mut self, pos: usize) {
        let v = self.vectors.remove(pos);
        let own = self.contrib.remove(pos);
        for (w, c) in self.vectors.iter().zip(self.contrib.iter_mut()) {
            *c -= abs_dot(&v, w);
        }
        self.pair_sum -= own;
    }
}

fn combine(row: Option<f64>, col: Option<f64>) -> Option<f64> {
    match (row, col) {
        (Some(r), Some(c)) => Some(r.max(c)),
        (r, c) => r.or(c),
    }
}

struct Grower<'a> {
    matrix: &'a AccessMatrix,
    current: Bicluster,
    score: f64,
    moves: Vec<Move>,
}

impl<'a> Grower<'a> {
    fn new(matrix: &'a AccessMatrix, seed: &Bicluster) -> Result<Self> {
        seed.check_bounds(matrix.rows(), matrix.cols())?;
        if !seed.is_scorable() {
            return Err(Error::DegenerateBicluster {
                rows: seed.rows().len(),
                cols: seed.cols().len(),
            });
        }
        let score = acv_unchecked(matrix, seed.rows(), seed.cols())?;
        Ok(Self {
            matrix,
            current: seed.clone(),
            score,
            moves: Vec::new(),
        })
    }

    fn members(&self, axis: Axis) -> &[usize] {
        match axis {
            Axis::Row => self.current.rows(),
            Axis::Col => self.current.cols(),
        }
    }

    fn extent(&self, axis: Axis) -> usize {
        match axis {
            Axis::Row => self.matrix.rows(),
            Axis::Col => self.matrix.cols(),
        }
    }

    fn vector(&self, axis: Axis, index: usize) -> Option<Vec<f64>> {
        let v: Vec<f64> = match axis {
            Axis::Row => {
                let row = self.matrix.row(index);
                self.current.cols().iter().map(|&j| row[j]).collect()
            }
            Axis::Col => self
                .current
                .rows()
                .iter()
                .map(|&i| self.matrix.get(i, index))
                .collect(),
        };
        unit_centered(&v)
    }

    fn cache(&self, axis: Axis) -> AxisCache {
        let members = self.members(axis).to_vec();
        AxisCache::build(
            members
                .into_iter()
                .map(|idx| self.vector(axis, idx))
                .collect(),
        )
    }

    fn with_member(&self, axis: Axis, index: usize, insert: bool) -> Bicluster {
        let mut b = self.current.clone();
        match (axis, insert) {
            (Axis::Row, true) => b.insert_row(index),
            (Axis::Row, false) => b.remove_row(index),
            (Axis::Col, true) => b.insert_col(index),
            (Axis::Col, false) => b.remove_col(index),
        }
        b
    }

    /// Screens a candidate with the cached same-axis term and a freshly
    /// computed cross-axis term; on a promising estimate rescores from
    /// scratch and accepts on strict improvement.
    fn try_move(&mut self, stage: Stage, axis: Axis, index: usize, same_term: Option<f64>) -> bool {
        let candidate = self.with_member(
            axis,
            index,
            matches!(stage, Stage::ColumnInsertion | Stage::RowInsertion),
        );
        let cross = match axis {
            Axis::Row => metrics::col_term(self.matrix, candidate.rows(), candidate.cols()),
            Axis::Col => metrics::row_term(self.matrix, candidate.rows(), candidate.cols()),
        };
        let estimate = match axis {
            Axis::Row => combine(same_term, cross),
            Axis::Col => combine(cross, same_term),
        };
        let Some(estimate) = estimate else {
            return false;
        };
        if estimate <= self.score - SCREEN_MARGIN {
            return false;
        }
        let Ok(exact) = acv_unchecked(self.matrix, candidate.rows(), candidate.cols()) else {
            return false;
        };
        if exact > self.score + MIN_GAIN {
            self.moves.push(Move {
                stage,
                index,
                acv_before: self.score,
                acv_after: exact,
            });
            self.current = candidate;
            self.score = exact;
            true
        } else {
            false
        }
    }

    fn insertion_stage(&mut self, axis: Axis) -> bool {
        let stage = match axis {
            Axis::Row => Stage::RowInsertion,
            Axis::Col => Stage::ColumnInsertion,
        };
        let mut any = false;
        loop {
            let mut changed = false;
            let mut cache = self.cache(axis);
            for index in 0..self.extent(axis) {
                if self.members(axis).binary_search(&index).is_ok() {
                    continue;
                }
                let v = self.vector(axis, index);
                let same = cache.term_with(cache.added_sum(&v));
                if self.try_move(stage, axis, index, same) {
                    cache.push(v);
                    changed = true;
                }
            }
            if !changed {
                return any;
            }
            any = true;
        }
    }

    fn deletion_stage(&mut self, axis: Axis) -> bool {
        let stage = match axis {
            Axis::Row => Stage::RowDeletion,
            Axis::Col => Stage::ColumnDeletion,
        };
        let mut any = false;
        loop {
            let mut changed = false;
            let mut cache = self.cache(axis);
            // cache order tracks the sorted member list
            let snapshot = self.members(axis).to_vec();
            for index in snapshot {
                if self.members(axis).len() <= 2 {
                    break;
                }
                let Ok(pos) = self.members(axis).binary_search(&index) else {
                    continue;
                };
                let same = cache.term_without(pos);
                if self.try_move(stage, axis, index, same) {
                    cache.remove(pos);
                    changed = true;
                }
            }
            if !changed {
                return any;
            }
            any = true;
        }
    }

    /// Alternates column and row insertion until neither moves. Returns
    /// the state after the first column pass.
    fn enlarge(&mut self) -> (bool, Bicluster) {
        let mut any = self.insertion_stage(Axis::Col);
        let after_first_col = self.current.clone();
        any |= self.insertion_stage(Axis::Row);
        loop {
            let c = self.insertion_stage(Axis::Col);
            if !c {
                break;
            }
            any = true;
            if !self.insertion_stage(Axis::Row) {
                break;
            }
        }
        (any, after_first_col)
    }

    fn refine(&mut self) -> (bool, Bicluster) {
        let mut any = self.deletion_stage(Axis::Col);
        let after_first_col = self.current.clone();
        any |= self.deletion_stage(Axis::Row);
        loop {
            let c = self.deletion_stage(Axis::Col);
            if !c {
                break;
            }
            any = true;
            if !self.deletion_stage(Axis::Row) {
                break;
            }
        }
        (any, after_first_col)
    }

    fn finish(self, snapshots: [Bicluster; 5]) -> Growth {
        Growth {
            bicluster: self.current,
            acv: self.score,
            snapshots,
            moves: self.moves,
        }
    }
}

/// Adds rows and columns while ACV strictly increases: column insertion,
/// then row insertion, alternating until neither admits a move.
pub fn enlarge(matrix: &AccessMatrix, b: &Bicluster) -> Result<Bicluster> {
    let mut g = Grower::new(matrix, b)?;
    g.enlarge();
    Ok(g.current)
}

/// Removes rows and columns while ACV strictly increases, never going below
/// two rows or two columns.
pub fn refine(matrix: &AccessMatrix, b: &Bicluster) -> Result<Bicluster> {
    let mut g = Grower::new(matrix, b)?;
    g.refine();
    Ok(g.current)
}

/// Grows one seed to a single-move local optimum, recording every accepted
/// move and the per-stage snapshots.
pub fn grow(matrix: &AccessMatrix, seed: &Bicluster) -> Result<Growth> {
    let mut g = Grower::new(matrix, seed)?;
    let initial = g.current.clone();
    let (_, after_col_insert) = g.enlarge();
    let after_insert = g.current.clone();
    let (_, after_col_delete) = g.refine();
    loop {
        let (grew, _) = g.enlarge();
        let (shrank, _) = g.refine();
        if !grew && !shrank {
            break;
        }
    }
    let last = g.current.clone();
    Ok(g.finish([
        initial,
        after_col_insert,
        after_insert,
        after_col_delete,
        last,
    ]))
}

/// Grows every seed independently and averages the per-stage snapshots.
/// Output order follows input order.
pub fn grow_all(matrix: &AccessMatrix, seeds: &[Bicluster]) -> Result<(Vec<Growth>, StageTrace)> {
    if seeds.is_empty() {
        return Err(Error::Config(
            "greedy growth needs at least one seed".into(),
        ));
    }
    let growths = seeds
        .iter()
        .map(|s| grow(matrix, s))
        .collect::<Result<Vec<_>>>()?;
    let trace = trace_of(matrix, &growths);
    Ok((growths, trace))
}

fn trace_of(matrix: &AccessMatrix, growths: &[Growth]) -> StageTrace {
    let records = Stage::ALL
        .iter()
        .enumerate()
        .map(|(k, &stage)| {
            let snaps: Vec<Bicluster> = growths.iter().map(|g| g.snapshots[k].clone()).collect();
            let (avg_acv, avg_volume) = metrics::averages(matrix, &snaps);
            StageRecord {
                stage,
                avg_acv,
                avg_volume,
            }
        })
        .collect();
    StageTrace { records }
}
