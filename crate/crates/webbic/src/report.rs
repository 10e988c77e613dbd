//! Report files written into the output directory.
//!
//! | file               | content                                          |
//! |--------------------|--------------------------------------------------|
//! | `seeds.json`       | K-means seeds                                    |
//! | `greedy.json`      | greedy-grown biclusters                          |
//! | `biclusters.json`  | final GA set                                     |
//! | `report.json`      | full [`RunReport`]                               |
//! | `stage_trace.csv`  | stage, avg_acv, avg_volume                       |
//! | `ga_history.csv`   | generation, best/mean fitness, best ACV, volume  |
//! | `comparison.csv`   | one row per method                               |
//! | `summary.csv`      | per-collection averages, coverage and overlap    |
//! | `recovery.csv`     | best Jaccard per implant (synthetic input only)  |
//! | `report.txt`       | human-readable digest                            |

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::{PipelineConfig, ReportFormat};
use crate::formats::BiclusterRecord;
use crate::pipeline::{Overlap, RunReport, SetSummary};

/// Creates the output directory and checks it accepts files.
pub fn prepare_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let probe = dir.join(".webbic-write-check");
    fs::write(&probe, b"").with_context(|| format!("{} is not writable", dir.display()))?;
    fs::remove_file(&probe).ok();
    Ok(())
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn json<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

fn csv_bytes(header: &[&str], rows: Vec<Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    Ok(w.into_inner()?)
}

pub fn stage_trace_csv(report: &RunReport) -> Result<Option<Vec<u8>>> {
    let Some(trace) = &report.stage_trace else {
        return Ok(None);
    };
    let rows = trace
        .iter()
        .map(|r| {
            vec![
                r.stage.clone(),
                r.avg_acv.to_string(),
                r.avg_volume.to_string(),
            ]
        })
        .collect();
    csv_bytes(&["stage", "avg_acv", "avg_volume"], rows).map(Some)
}

pub fn ga_history_csv(report: &RunReport) -> Result<Vec<u8>> {
    let rows = report
        .ga_history
        .iter()
        .map(|h| {
            vec![
                h.generation.to_string(),
                h.best_fitness.to_string(),
                h.mean_fitness.to_string(),
                h.best_acv.to_string(),
                h.best_volume.to_string(),
            ]
        })
        .collect();
    csv_bytes(
        &[
            "generation",
            "best_fitness",
            "mean_fitness",
            "best_acv",
            "best_volume",
        ],
        rows,
    )
}

pub fn comparison_csv(report: &RunReport) -> Result<Vec<u8>> {
    let rows = report
        .comparison
        .iter()
        .map(|c| {
            vec![
                c.method.clone(),
                c.count.to_string(),
                c.avg_volume.to_string(),
                c.avg_acv.to_string(),
                opt(c.overlap.map(|o| o.r)),
                opt(c.overlap.map(|o| o.r_unclamped)),
            ]
        })
        .collect();
    csv_bytes(
        &[
            "method",
            "count",
            "avg_volume",
            "avg_acv",
            "overlap_r",
            "overlap_r_unclamped",
        ],
        rows,
    )
}

fn summary_row(name: &str, s: &SetSummary) -> Vec<String> {
    vec![
        name.to_string(),
        s.count.to_string(),
        s.avg_acv.to_string(),
        s.avg_volume.to_string(),
        s.row_pct.to_string(),
        s.col_pct.to_string(),
        opt(s.overlap.map(|o| o.r)),
        opt(s.overlap.map(|o| o.r_unclamped)),
    ]
}

pub fn summary_csv(report: &RunReport) -> Result<Vec<u8>> {
    let mut rows = vec![summary_row("seeds", &report.seeds)];
    if let Some(g) = &report.greedy {
        rows.push(summary_row("greedy", g));
    }
    rows.push(summary_row("ga-distinct", &report.ga_distinct));
    rows.push(summary_row("ga-population", &report.ga_population));
    csv_bytes(
        &[
            "collection",
            "count",
            "avg_acv",
            "avg_volume",
            "row_pct",
            "col_pct",
            "overlap_r",
            "overlap_r_unclamped",
        ],
        rows,
    )
}

pub fn recovery_csv(report: &RunReport) -> Result<Option<Vec<u8>>> {
    let Some(rec) = &report.recovery else {
        return Ok(None);
    };
    let mut rows: Vec<Vec<String>> = rec
        .per_truth
        .iter()
        .enumerate()
        .map(|(k, j)| vec![k.to_string(), j.to_string()])
        .collect();
    rows.push(vec!["mean".to_string(), rec.mean.to_string()]);
    csv_bytes(&["implant", "best_jaccard"], rows).map(Some)
}

fn overlap_text(o: Option<Overlap>) -> String {
    match o {
        Some(o) => format!("{:.4} (unclamped {:.4})", o.r, o.r_unclamped),
        None => "n/a (fewer than two biclusters)".to_string(),
    }
}

pub fn digest(report: &RunReport) -> String {
    let mut t = String::new();
    let s = &report.settings;
    let _ = writeln!(t, "webbic run");
    let _ = writeln!(
        t,
        "input: {} ({}), {} users x {} pages",
        s.input, s.format, report.rows, report.cols
    );
    if let Some(ss) = &report.sessions {
        let _ = writeln!(
            t,
            "sessions: {} read, {} kept with length in {}..={}; mean length {:.3} before, {:.3} after filtering",
            ss.total, ss.kept, ss.min_len, ss.max_len, ss.mean_length_all, ss.mean_length_kept
        );
    }
    let _ = writeln!(
        t,
        "seeds: top-level {}, seeding {}, ga {}",
        s.seed, s.seeding_seed, s.ga_seed
    );
    let _ = writeln!(
        t,
        "settings: ku={} kp={} restarts={} greedy={} pop={} generations={} cp={} mp={} delta={} (applied {}) elitism={}",
        s.k_users,
        s.k_pages,
        s.kmeans_restarts,
        s.greedy,
        s.population,
        s.generations,
        s.crossover_fraction,
        s.mutation_rate,
        s.delta,
        s.delta_applied,
        s.elitism
    );

    let _ = writeln!(t, "\nseed formation vs greedy growth");
    let _ = writeln!(
        t,
        "  {:<22}{:>10}{:>12}{:>14}",
        "", "count", "avg ACV", "avg volume"
    );
    let _ = writeln!(
        t,
        "  {:<22}{:>10}{:>12.4}{:>14.1}",
        "two-way k-means", report.seeds.count, report.seeds.avg_acv, report.seeds.avg_volume
    );
    if let Some(g) = &report.greedy {
        let _ = writeln!(
            t,
            "  {:<22}{:>10}{:>12.4}{:>14.1}",
            "greedy search", g.count, g.avg_acv, g.avg_volume
        );
    }

    if let Some(trace) = &report.stage_trace {
        let _ = writeln!(t, "\ngreedy stages");
        for r in trace {
            let _ = writeln!(
                t,
                "  {:<22}{:>12.4}{:>14.1}",
                r.stage, r.avg_acv, r.avg_volume
            );
        }
    }

    let d = &report.ga_distinct;
    let _ = writeln!(
        t,
        "\ngenetic algorithm (distinct nonzero-fitness members of the final population)"
    );
    let _ = writeln!(
        t,
        "  count {}  mean volume {:.1}  mean ACV {:.4}",
        d.count, d.avg_volume, d.avg_acv
    );
    let _ = writeln!(
        t,
        "  row coverage {:.2}%  column coverage {:.2}%  [1]",
        d.row_pct, d.col_pct
    );
    let _ = writeln!(t, "  overlap degree {}  [2]", overlap_text(d.overlap));
    let p = &report.ga_population;
    let _ = writeln!(
        t,
        "  whole population: mean volume {:.1}  mean ACV {:.4}  overlap {}",
        p.avg_volume,
        p.avg_acv,
        overlap_text(p.overlap)
    );
    let b: &BiclusterRecord = &report.ga_best;
    let _ = writeln!(
        t,
        "  best: {} x {} (volume {}, ACV {:.4})",
        b.rows.len(),
        b.cols.len(),
        b.volume,
        b.acv
    );

    let _ = writeln!(t, "\nmethod comparison");
    let _ = writeln!(
        t,
        "  {:<22}{:>14}{:>12}{:>12}",
        "", "avg volume", "avg ACV", "overlap"
    );
    for c in &report.comparison {
        let ov = c
            .overlap
            .map_or_else(|| "n/a".to_string(), |o| format!("{:.4}", o.r));
        let _ = writeln!(
            t,
            "  {:<22}{:>14.1}{:>12.4}{:>12}",
            c.method, c.avg_volume, c.avg_acv, ov
        );
    }

    if let Some(rec) = &report.recovery {
        let _ = writeln!(t, "\nrecovery of implanted biclusters (best Jaccard)");
        for (k, j) in rec.per_truth.iter().enumerate() {
            let _ = writeln!(t, "  implant {k}: {j:.4}");
        }
        let _ = writeln!(t, "  mean: {:.4}", rec.mean);
    }

    let _ = writeln!(
        t,
        "\n[1] share of matrix rows (columns) belonging to at least one final bicluster."
    );
    let _ = writeln!(
        t,
        "[2] elements covered by no bicluster contribute 0; the unclamped value lets them contribute -1/(N-1)."
    );
    if s.elitism > 0 {
        let _ = writeln!(
            t,
            "[3] the best {} individual(s) per generation are carried over unchanged (elitism).",
            s.elitism
        );
    }
    t
}

/// Writes every report selected in `cfg.reports`.
pub fn write_all(cfg: &PipelineConfig, report: &RunReport) -> Result<()> {
    let dir = &cfg.out_dir;
    if cfg.wants(ReportFormat::Json) {
        write(dir, "seeds.json", &json(&report.seed_biclusters)?)?;
        write(dir, "greedy.json", &json(&report.greedy_biclusters)?)?;
        write(dir, "biclusters.json", &json(&report.final_biclusters)?)?;
        write(dir, "report.json", &json(report)?)?;
    }
    if cfg.wants(ReportFormat::Csv) {
        if let Some(b) = stage_trace_csv(report)? {
            write(dir, "stage_trace.csv", &b)?;
        }
        write(dir, "ga_history.csv", &ga_history_csv(report)?)?;
        write(dir, "comparison.csv", &comparison_csv(report)?)?;
        write(dir, "summary.csv", &summary_csv(report)?)?;
        if let Some(b) = recovery_csv(report)? {
            write(dir, "recovery.csv", &b)?;
        }
    }
    if cfg.wants(ReportFormat::Text) {
        write(dir, "report.txt", digest(report).as_bytes())?;
    }
    Ok(())
}
