//! End-to-end run: load → seed → greedy → GA → summaries.

use anyhow::{Context, Result};
use serde::Serialize;
use webbic_core::greedy::{self, StageTrace};
use webbic_core::ingest::{self, SessionLog};
use webbic_core::metrics::{self, averages, coverage_percentages};
use webbic_core::{evolve, seeding, synth, AccessMatrix, Bicluster};

use crate::config::{threshold_label, InputFormat, PipelineConfig};
use crate::formats::{self, records, BiclusterRecord, SyntheticFile};

/// A loaded input matrix, with ground truth when the input carries it.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub matrix: AccessMatrix,
    pub truth: Option<Vec<Bicluster>>,
    pub sessions: Option<SessionStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionStats {
    pub total: usize,
    pub kept: usize,
    pub mean_length_all: f64,
    pub mean_length_kept: f64,
    pub min_len: usize,
    pub max_len: usize,
}

pub fn dataset_from_sessions(log: &SessionLog, min_len: usize, max_len: usize) -> Result<Dataset> {
    let kept = ingest::filter_sessions(&log.sessions, min_len, max_len);
    let matrix = ingest::build_access_matrix(&kept, log.page_count())
        .with_context(|| format!("no sessions with length in {min_len}..={max_len}"))?;
    let matrix = matrix
        .clone()
        .with_labels(matrix.row_labels().to_vec(), log.page_names.clone())?;
    Ok(Dataset {
        matrix,
        truth: None,
        sessions: Some(SessionStats {
            total: log.sessions.len(),
            kept: kept.len(),
            mean_length_all: ingest::mean_length(&log.sessions),
            mean_length_kept: ingest::mean_length(&kept),
            min_len,
            max_len,
        }),
    })
}

pub fn load(cfg: &PipelineConfig) -> Result<Dataset> {
    match cfg.format {
        InputFormat::Msnbc => {
            dataset_from_sessions(&formats::read_msnbc(&cfg.input)?, cfg.min_len, cfg.max_len)
        }
        InputFormat::MatrixCsv => {
            let bytes = formats::read_maybe_gzip(&cfg.input)?;
            let matrix = formats::parse_matrix_csv(&bytes)
                .with_context(|| format!("parsing {}", cfg.input.display()))?;
            Ok(Dataset {
                matrix,
                truth: None,
                sessions: None,
            })
        }
        InputFormat::SyntheticJson => {
            let bytes = formats::read_maybe_gzip(&cfg.input)?;
            let file: SyntheticFile = serde_json::from_slice(&bytes)
                .with_context(|| format!("parsing {}", cfg.input.display()))?;
            Ok(Dataset {
                matrix: file.matrix()?,
                truth: Some(file.truth.iter().map(BiclusterRecord::bicluster).collect()),
                sessions: None,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Overlap {
    pub r: f64,
    pub r_unclamped: f64,
}

/// Overlap degree, or `None` for fewer than two biclusters.
pub fn overlap(biclusters: &[Bicluster], n: usize, m: usize) -> Option<Overlap> {
    metrics::overlap_degree(biclusters, n, m)
        .ok()
        .map(|o| Overlap {
            r: o.r,
            r_unclamped: o.r_unclamped,
        })
}

/// Aggregate figures for one bicluster collection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SetSummary {
    pub count: usize,
    pub avg_acv: f64,
    pub avg_volume: f64,
    pub row_pct: f64,
    pub col_pct: f64,
    pub overlap: Option<Overlap>,
}

impl SetSummary {
    pub fn of(matrix: &AccessMatrix, biclusters: &[Bicluster]) -> Self {
        let (avg_acv, avg_volume) = averages(matrix, biclusters);
        let (row_pct, col_pct) = coverage_percentages(biclusters, matrix.rows(), matrix.cols());
        Self {
            count: biclusters.len(),
            avg_acv,
            avg_volume,
            row_pct,
            col_pct,
            overlap: overlap(biclusters, matrix.rows(), matrix.cols()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageRow {
    pub stage: String,
    pub avg_acv: f64,
    pub avg_volume: f64,
}

fn stage_rows(trace: &StageTrace) -> Vec<StageRow> {
    trace
        .records
        .iter()
        .map(|r| StageRow {
            stage: r.stage.name().to_string(),
            avg_acv: r.avg_acv,
            avg_volume: r.avg_volume,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistoryRow {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub best_acv: f64,
    pub best_volume: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub method: String,
    pub count: usize,
    pub avg_volume: f64,
    pub avg_acv: f64,
    pub overlap: Option<Overlap>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryReport {
    pub per_truth: Vec<f64>,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSettings {
    pub input: String,
    pub format: String,
    pub seed: u64,
    pub seeding_seed: u64,
    pub ga_seed: u64,
    pub k_users: usize,
    pub k_pages: usize,
    pub kmeans_restarts: usize,
    pub greedy: bool,
    pub population: usize,
    pub generations: usize,
    pub crossover_fraction: f64,
    pub mutation_rate: f64,
    pub delta: String,
    pub delta_applied: f64,
    pub elitism: usize,
}

/// Everything a run produces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub settings: RunSettings,
    pub rows: usize,
    pub cols: usize,
    pub sessions: Option<SessionStats>,
    pub seeds: SetSummary,
    pub greedy: Option<SetSummary>,
    pub stage_trace: Option<Vec<StageRow>>,
    /// Distinct nonzero-fitness members of the final GA population.
    pub ga_distinct: SetSummary,
    /// Every member of the final GA population, duplicates included.
    pub ga_population: SetSummary,
    pub ga_best: BiclusterRecord,
    pub ga_history: Vec<HistoryRow>,
    pub comparison: Vec<ComparisonRow>,
    pub recovery: Option<RecoveryReport>,
    pub seed_biclusters: Vec<BiclusterRecord>,
    pub greedy_biclusters: Vec<BiclusterRecord>,
    pub final_biclusters: Vec<BiclusterRecord>,
}

/// Runs every stage on an already loaded dataset.
pub fn run_on(cfg: &PipelineConfig, data: &Dataset) -> Result<RunReport> {
    cfg.validate()?;
    let matrix = &data.matrix;
    let (n, m) = (matrix.rows(), matrix.cols());

    let seeds = seeding::seed(matrix, &cfg.seeding).context("seed formation")?;
    anyhow::ensure!(
        !seeds.is_empty(),
        "seed formation produced no bicluster of at least 2x2"
    );
    let seed_summary = SetSummary::of(matrix, &seeds);

    let (grown, trace) = if cfg.greedy {
        let (growths, trace) = greedy::grow_all(matrix, &seeds)?;
        (
            Some(growths.into_iter().map(|g| g.bicluster).collect::<Vec<_>>()),
            Some(trace),
        )
    } else {
        (None, None)
    };
    let ga_input = grown.as_deref().unwrap_or(&seeds);

    let outcome = evolve::run_ga(matrix, ga_input, &cfg.ga).context("genetic optimization")?;
    let distinct: Vec<Bicluster> = outcome
        .distinct_fit()
        .into_iter()
        .map(|s| s.bicluster)
        .collect();
    let population: Vec<Bicluster> = outcome
        .population
        .iter()
        .map(|s| s.bicluster.clone())
        .collect();
    let ga_distinct = SetSummary::of(matrix, &distinct);

    let greedy_summary = grown.as_ref().map(|g| SetSummary::of(matrix, g));
    let mut comparison = vec![row("two-way-kmeans", &seed_summary)];
    if let Some(g) = &greedy_summary {
        comparison.push(row("greedy-search", g));
    }
    comparison.push(row("genetic-algorithm", &ga_distinct));

    let recovery = data.truth.as_ref().map(|truth| {
        let r = synth::score_recovery(&distinct, truth);
        RecoveryReport {
            per_truth: r.per_truth,
            mean: r.mean,
        }
    });

    Ok(RunReport {
        settings: RunSettings {
            input: cfg.input.display().to_string(),
            format: cfg.format.to_string(),
            seed: cfg.seed,
            seeding_seed: cfg.seeding.seed,
            ga_seed: cfg.ga.seed,
            k_users: cfg.seeding.k_users,
            k_pages: cfg.seeding.k_pages,
            kmeans_restarts: cfg.seeding.restarts,
            greedy: cfg.greedy,
            population: cfg.ga.population,
            generations: cfg.ga.generations,
            crossover_fraction: cfg.ga.crossover_fraction,
            mutation_rate: cfg.ga.mutation_rate,
            delta: threshold_label(cfg.ga.threshold),
            delta_applied: outcome.delta,
            elitism: cfg.ga.elitism,
        },
        rows: n,
        cols: m,
        sessions: data.sessions.clone(),
        seeds: seed_summary,
        greedy: greedy_summary,
        stage_trace: trace.as_ref().map(stage_rows),
        ga_population: SetSummary::of(matrix, &population),
        ga_distinct,
        ga_best: BiclusterRecord {
            rows: outcome.best.bicluster.rows().to_vec(),
            cols: outcome.best.bicluster.cols().to_vec(),
            acv: outcome.best.acv,
            volume: outcome.best.bicluster.volume(),
        },
        ga_history: outcome
            .history
            .records
            .iter()
            .map(|r| HistoryRow {
                generation: r.generation,
                best_fitness: r.best_fitness,
                mean_fitness: r.mean_fitness,
                best_acv: r.best_acv,
                best_volume: r.best_volume,
            })
            .collect(),
        comparison,
        recovery,
        seed_biclusters: records(matrix, &seeds),
        greedy_biclusters: grown
            .as_ref()
            .map(|g| records(matrix, g))
            .unwrap_or_default(),
        final_biclusters: records(matrix, &distinct),
    })
}

fn row(method: &str, s: &SetSummary) -> ComparisonRow {
    ComparisonRow {
        method: method.to_string(),
        count: s.count,
        avg_volume: s.avg_volume,
        avg_acv: s.avg_acv,
        overlap: s.overlap,
    }
}

/// Loads the input, runs every stage and writes the configured reports.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<RunReport> {
    cfg.validate()?;
    crate::report::prepare_out_dir(&cfg.out_dir)?;
    let data = load(cfg)?;
    let report = run_on(cfg, &data)?;
    crate::report::write_all(cfg, &report)?;
    Ok(report)
}

/// The per-method comparison table: K-means seeds, greedy output and the
/// GA's final set.
pub fn compare_methods(cfg: &PipelineConfig) -> Result<Vec<ComparisonRow>> {
    cfg.validate()?;
    let data = load(cfg)?;
    Ok(run_on(cfg, &data)?.comparison)
}
