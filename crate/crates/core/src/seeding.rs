//! Seed formation: K-means on users and on pages, crossed into a grid of
//! small biclusters.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::ingest::AccessMatrix;
use crate::metrics::Bicluster;
use crate::rng::{derive_seed, from_seed, Rng};

#[derive(Debug, Clone, PartialEq)]
pub struct SeedingConfig {
    /// Number of user (row) clusters.
    pub k_users: usize,
    /// Number of page (column) clusters.
    pub k_pages: usize,
    pub max_iter: usize,
    /// Independent k-means++ starts; the lowest-inertia run is kept.
    pub restarts: usize,
    pub seed: u64,
    /// Scale each user row to unit sum before clustering users.
    pub normalize_rows: bool,
}

impl Default for SeedingConfig {
    fn default() -> Self {
        Self {
            k_users: 12,
            k_pages: 10,
            max_iter: 100,
            restarts: 5,
            seed: 0,
            normalize_rows: false,
        }
    }
}

impl SeedingConfig {
    pub fn validate(&self, n: usize, m: usize) -> Result<()> {
        if self.k_users == 0 || self.k_users > n {
            return Err(Error::Config(format!(
                "k_users = {} must lie in 1..={n}",
                self.k_users
            )));
        }
        if self.k_pages == 0 || self.k_pages > m {
            return Err(Error::Config(format!(
                "k_pages = {} must lie in 1..={m}",
                self.k_pages
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be at least 1".into()));
        }
        if self.restarts == 0 {
            return Err(Error::Config("restarts must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    /// Cluster id per point, each in `0..k`.
    pub assignment: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Within-cluster sum of squared Euclidean distances.
    pub inertia: f64,
    pub iterations: usize,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.iter().enumerate() {
        let d = sq_dist(point, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// Within-cluster sum of squares of an arbitrary assignment, with centroids
/// at the cluster means.
pub fn inertia_of(points: &[Vec<f64>], assignment: &[usize], k: usize) -> f64 {
    let centroids = means(points, assignment, k, None);
    points
        .iter()
        .zip(assignment)
        .map(|(p, &c)| sq_dist(p, &centroids[c]))
        .sum()
}

/// Cluster means; an empty cluster keeps its `previous` centroid (or the
/// origin).
fn means(
    points: &[Vec<f64>],
    assignment: &[usize],
    k: usize,
    previous: Option<&[Vec<f64>]>,
) -> Vec<Vec<f64>> {
    let dim = points.first().map_or(0, Vec::len);
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &c) in points.iter().zip(assignment) {
        counts[c] += 1;
        for (s, x) in sums[c].iter_mut().zip(p) {
            *s += x;
        }
    }
    for (c, sum) in sums.iter_mut().enumerate() {
        if counts[c] == 0 {
            if let Some(prev) = previous {
                sum.clone_from(&prev[c]);
            }
            continue;
        }
        for s in sum.iter_mut() {
            *s /= counts[c] as f64;
        }
    }
    sums
}

/// k-means++ seeding: first centre uniform, the rest drawn proportionally to
/// squared distance from the nearest chosen centre.
fn plus_plus(points: &[Vec<f64>], k: usize, rng: &mut Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut chosen = vec![false; n];
    let first = rng.gen_range(0..n);
    chosen[first] = true;
    let mut centroids = vec![points[first].clone()];
    let mut dist: Vec<f64> = points.iter().map(|p| sq_dist(p, &points[first])).collect();

    while centroids.len() < k {
        let total: f64 = dist.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut pick = n - 1;
            for (i, &d) in dist.iter().enumerate() {
                if d > 0.0 && target < d {
                    pick = i;
                    break;
                }
                target -= d;
            }
            // rounding can run past the end; fall back to the last candidate
            if dist[pick] == 0.0 {
                pick = dist.iter().rposition(|&d| d > 0.0).unwrap_or(pick);
            }
            pick
        } else {
            // every point coincides with a centre: take an unused one
            let free: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
            free[rng.gen_range(0..free.len())]
        };
        chosen[pick] = true;
        centroids.push(points[pick].clone());
        for (d, p) in dist.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, &points[pick]));
        }
    }
    centroids
}

fn lloyd(points: &[Vec<f64>], k: usize, max_iter: usize, rng: &mut Rng) -> Clustering {
    let mut centroids = plus_plus(points, k, rng);
    let mut assignment: Vec<usize> = Vec::new();
    let mut iterations = 0;

    for _ in 0..max_iter {
        iterations += 1;
        let mut next: Vec<usize> = points.iter().map(|p| nearest(p, &centroids).0).collect();
        repair_empty(points, &mut next, &centroids, k);
        let converged = next == assignment;
        assignment = next;
        centroids = means(points, &assignment, k, Some(&centroids));
        if converged {
            break;
        }
    }

    let inertia = points
        .iter()
        .zip(&assignment)
        .map(|(p, &c)| sq_dist(p, &centroids[c]))
        .sum();
    Clustering {
        assignment,
        centroids,
        inertia,
        iterations,
    }
}

/// Moves the point farthest from its centroid into each empty cluster,
/// taking only from clusters that keep at least one member.
fn repair_empty(points: &[Vec<f64>], assignment: &mut [usize], centroids: &[Vec<f64>], k: usize) {
    let mut counts = vec![0usize; k];
    for &c in assignment.iter() {
        counts[c] += 1;
    }
    for empty in 0..k {
        if counts[empty] != 0 {
            continue;
        }
        let mut far: Option<(usize, f64)> = None;
        for (i, p) in points.iter().enumerate() {
            let c = assignment[i];
            if counts[c] < 2 {
                continue;
            }
            let d = sq_dist(p, &centroids[c]);
            if far.is_none_or(|(_, best)| d > best) {
                far = Some((i, d));
            }
        }
        if let Some((i, _)) = far {
            counts[assignment[i]] -= 1;
            assignment[i] = empty;
            counts[empty] = 1;
        }
    }
}

/// Lloyd's algorithm with k-means++ starts, keeping the lowest-inertia
/// restart (earliest restart wins ties). Deterministic for a given seed.
pub fn kmeans(
    points: &[Vec<f64>],
    k: usize,
    max_iter: usize,
    restarts: usize,
    seed: u64,
) -> Result<Clustering> {
    if k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    if k > points.len() {
        return Err(Error::TooManyClusters {
            k,
            points: points.len(),
        });
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::Dimension("points have differing lengths".into()));
    }
    let mut best: Option<Clustering> = None;
    for restart in 0..restarts.max(1) {
        let mut rng = from_seed(derive_seed(seed, restart as u64));
        let run = lloyd(points, k, max_iter.max(1), &mut rng);
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// User and page clusterings of a matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoWay {
    pub users: Clustering,
    pub pages: Clustering,
}

/// Clusters rows as m-dimensional vectors and columns as n-dimensional
/// vectors, independently.
pub fn cluster_two_way(matrix: &AccessMatrix, cfg: &SeedingConfig) -> Result<TwoWay> {
    cfg.validate(matrix.rows(), matrix.cols())?;
    let row_points: Vec<Vec<f64>> = (0..matrix.rows())
        .map(|i| {
            let row = matrix.row(i);
            let total: f64 = row.iter().sum();
            if cfg.normalize_rows && total > 0.0 {
                row.iter().map(|x| x / total).collect()
            } else {
                row.to_vec()
            }
        })
        .collect();
    let col_points: Vec<Vec<f64>> = (0..matrix.cols()).map(|j| matrix.column(j)).collect();
    let users = kmeans(
        &row_points,
        cfg.k_users,
        cfg.max_iter,
        cfg.restarts,
        derive_seed(cfg.seed, 1),
    )?;
    let pages = kmeans(
        &col_points,
        cfg.k_pages,
        cfg.max_iter,
        cfg.restarts,
        derive_seed(cfg.seed, 2),
    )?;
    Ok(TwoWay { users, pages })
}

fn groups(assignment: &[usize]) -> Vec<Vec<usize>> {
    let k = assignment.iter().max().map_or(0, |&c| c + 1);
    let mut out = vec![Vec::new(); k];
    for (idx, &c) in assignment.iter().enumerate() {
        out[c].push(idx);
    }
    out
}

/// Every (user cluster × page cluster) block, in user-cluster-major order.
/// Includes degenerate blocks; see [`form_seeds`] for the filtered list.
pub fn candidate_blocks(user_assignment: &[usize], page_assignment: &[usize]) -> Vec<Bicluster> {
    let users = groups(user_assignment);
    let pages = groups(page_assignment);
    let mut out = Vec::with_capacity(users.len() * pages.len());
    for rows in &users {
        for cols in &pages {
            out.push(Bicluster::new(rows.clone(), cols.clone()));
        }
    }
    out
}

/// Crosses user and page clusters into seeds, dropping blocks with fewer
/// than two rows or two columns.
pub fn form_seeds(
    matrix: &AccessMatrix,
    user_assignment: &[usize],
    page_assignment: &[usize],
) -> Result<Vec<Bicluster>> {
    if user_assignment.len() != matrix.rows() || page_assignment.len() != matrix.cols() {
        return Err(Error::Dimension(format!(
            "assignments cover {} rows and {} columns of a {}x{} matrix",
            user_assignment.len(),
            page_assignment.len(),
            matrix.rows(),
            matrix.cols()
        )));
    }
    Ok(candidate_blocks(user_assignment, page_assignment)
        .into_iter()
        .filter(Bicluster::is_scorable)
        .collect())
}

/// Runs both clusterings and returns the seeds.
pub fn seed(matrix: &AccessMatrix, cfg: &SeedingConfig) -> Result<Vec<Bicluster>> {
    let two_way = cluster_two_way(matrix, cfg)?;
    form_seeds(matrix, &two_way.users.assignment, &two_way.pages.assignment)
}
