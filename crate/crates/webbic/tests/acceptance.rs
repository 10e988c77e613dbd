//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any failed.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng as _;
use webbic::config::{InputFormat, PipelineConfig};
use webbic::pipeline::{self, Dataset, RunReport};
use webbic_core::evolve::{self, Chromosome, GaConfig};
use webbic_core::greedy::{self, MIN_GAIN};
use webbic_core::metrics::{self, acv, fitness, overlap_degree, row_term};
use webbic_core::rng::from_seed;
use webbic_core::{
    seeding, synth, AccessMatrix, Bicluster, CoherenceModel, ImplantSpec, SeedingConfig,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn random_int_matrix(n: usize, m: usize, hi: u32, seed: u64) -> AccessMatrix {
    let mut rng = from_seed(seed);
    let v = (0..n * m)
        .map(|_| f64::from(rng.gen_range(0..=hi)))
        .collect();
    AccessMatrix::new(n, m, v).unwrap()
}

// Pearson from raw sums; zero variance gives 0.
fn oracle_r(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (sx, sy) = (x.iter().sum::<f64>(), y.iter().sum::<f64>());
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    let syy: f64 = y.iter().map(|b| b * b).sum();
    let den = ((n * sxx - sx * sx) * (n * syy - sy * sy)).sqrt();
    if den == 0.0 || x.len() < 2 {
        0.0
    } else {
        (n * sxy - sx * sy) / den
    }
}

// (sum over all ordered pairs of |r|, diagonal taken as 1, minus k) / (k^2 - k)
fn oracle_term(vectors: &[Vec<f64>]) -> Option<f64> {
    let k = vectors.len();
    if k < 2 {
        return None;
    }
    let mut total = 0.0;
    for a in 0..k {
        for b in 0..k {
            total += if a == b {
                1.0
            } else {
                oracle_r(&vectors[a], &vectors[b]).abs()
            };
        }
    }
    Some((total - k as f64) / (k * k - k) as f64)
}

fn oracle_acv(m: &AccessMatrix, rows: &[usize], cols: &[usize]) -> f64 {
    let rv: Vec<Vec<f64>> = rows
        .iter()
        .map(|&i| cols.iter().map(|&j| m.get(i, j)).collect())
        .collect();
    let cv: Vec<Vec<f64>> = cols
        .iter()
        .map(|&j| rows.iter().map(|&i| m.get(i, j)).collect())
        .collect();
    match (oracle_term(&rv), oracle_term(&cv)) {
        (Some(a), Some(b)) => a.max(b),
        (a, b) => a.or(b).expect("at least one axis has two members"),
    }
}

fn subsets(k: usize) -> Vec<Vec<usize>> {
    (1u32..1 << k)
        .map(|mask| (0..k).filter(|&i| mask & (1 << i) != 0).collect())
        .collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    let mut worst = 0.0f64;
    for seed in 0..20 {
        let m = random_int_matrix(4, 4, 9, 100 + seed);
        for rows in subsets(4) {
            for cols in subsets(4) {
                if rows.len() < 2 && cols.len() < 2 {
                    continue;
                }
                let got = acv(&m, &Bicluster::new(rows.clone(), cols.clone())).unwrap();
                worst = worst.max((got - oracle_acv(&m, &rows, &cols)).abs());
                checked += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-12 && secs < 5.0,
        format!("{checked} submatrices, max |diff| {worst:.2e}, {secs:.2} s"),
    )
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for seed in 0..100 {
        let m = random_int_matrix(5, 5, 20, 1000 + seed);
        let all: Vec<usize> = (0..5).collect();
        let base = row_term(&m, &all, &all).unwrap();
        let target = (seed % 5) as usize;
        for alpha in [-2.0, 0.5, 3.0] {
            for beta in [-7.0, 0.0, 11.0] {
                let mut values = m.values().to_vec();
                for j in 0..5 {
                    values[target * 5 + j] = alpha * values[target * 5 + j] + beta;
                }
                // transformed rows may go negative, which an access matrix rejects
                let rows: Vec<Vec<f64>> = values.chunks(5).map(<[f64]>::to_vec).collect();
                let term = metrics::correlation_term(&rows).unwrap();
                worst = worst.max((term - base).abs());
                cases += 1;
            }
        }
    }
    outcome(
        worst < 1e-12,
        format!("{cases} transformed rows, max |diff| {worst:.2e}"),
    )
}

fn improving_move_exists(m: &AccessMatrix, b: &Bicluster, current: f64) -> Option<String> {
    let better = |c: &Bicluster| c.is_scorable() && acv(m, c).unwrap() > current + MIN_GAIN;
    for i in 0..m.rows() {
        let mut rows = b.rows().to_vec();
        if b.contains_row(i) {
            rows.retain(|&r| r != i);
        } else {
            rows.push(i);
        }
        if better(&Bicluster::new(rows, b.cols().to_vec())) {
            return Some(format!("row {i}"));
        }
    }
    for j in 0..m.cols() {
        let mut cols = b.cols().to_vec();
        if b.contains_col(j) {
            cols.retain(|&c| c != j);
        } else {
            cols.push(j);
        }
        if better(&Bicluster::new(b.rows().to_vec(), cols)) {
            return Some(format!("column {j}"));
        }
    }
    None
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let (mut outputs, mut moves) = (0, 0);
    for seed in 0..50 {
        let m = random_int_matrix(20, 10, 15, 5000 + seed);
        let cfg = SeedingConfig {
            k_users: 4,
            k_pages: 3,
            seed,
            ..SeedingConfig::default()
        };
        let seeds = seeding::seed(&m, &cfg).unwrap();
        for s in &seeds {
            let g = greedy::grow(&m, s).unwrap();
            let mut prev = acv(&m, s).unwrap();
            for mv in &g.moves {
                if mv.acv_after <= mv.acv_before || (mv.acv_before - prev).abs() > 1e-12 {
                    return outcome(false, format!("matrix {seed}: non-increasing move {mv:?}"));
                }
                prev = mv.acv_after;
                moves += 1;
            }
            if (acv(&m, &g.bicluster).unwrap() - g.acv).abs() > 1e-12 {
                return outcome(
                    false,
                    format!("matrix {seed}: reported ACV differs from recomputed"),
                );
            }
            if let Some(what) = improving_move_exists(&m, &g.bicluster, g.acv) {
                return outcome(
                    false,
                    format!("matrix {seed}: toggling {what} improves {:?}", g.bicluster),
                );
            }
            outputs += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        secs < 30.0,
        format!("{outputs} grown seeds, {moves} moves all strictly improving, all locally optimal, {secs:.2} s"),
    )
}

fn synthetic_fixture(seed: u64) -> Dataset {
    let implants = [
        ImplantSpec::new(12, 5, 0, 0, CoherenceModel::Shift),
        ImplantSpec::new(10, 4, 20, 6, CoherenceModel::Scale),
        ImplantSpec::new(8, 4, 40, 11, CoherenceModel::ShiftScale),
    ];
    let d = synth::generate(60, 15, &implants, 5, seed).unwrap();
    Dataset {
        matrix: d.matrix,
        truth: Some(d.truth),
        sessions: None,
    }
}

fn criterion_4() -> Outcome {
    let mut shown = Vec::new();
    for seed in 0..5 {
        let data = synthetic_fixture(seed);
        let cfg = SeedingConfig {
            seed,
            ..SeedingConfig::default()
        };
        let seeds = seeding::seed(&data.matrix, &cfg).unwrap();
        let (_, trace) = greedy::grow_all(&data.matrix, &seeds).unwrap();
        let acvs: Vec<f64> = trace.records.iter().map(|r| r.avg_acv).collect();
        if acvs.len() != 5 || acvs.windows(2).any(|w| w[1] < w[0]) {
            return outcome(false, format!("fixture {seed}: {acvs:?}"));
        }
        if seed == 0 {
            shown = acvs;
        }
    }
    let path: Vec<String> = shown.iter().map(|v| format!("{v:.4}")).collect();
    outcome(
        true,
        format!("5 fixtures nondecreasing; fixture 0: {}", path.join(" -> ")),
    )
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let m = AccessMatrix::from_rows(&[
        vec![1.0, 2.0, 3.0, 5.0],
        vec![2.0, 4.0, 6.0, 10.0],
        vec![4.0, 5.0, 6.0, 8.0],
        vec![7.0, 1.0, 6.0, 2.0],
    ])
    .unwrap();
    let delta = 0.95;
    let mut max_fit = 0.0f64;
    for bits in 0u32..256 {
        let c = Chromosome::from_bits((0..8).map(|k| bits & (1 << k) != 0).collect());
        let b = evolve::decode(&c, 4, 4).unwrap();
        max_fit = max_fit.max(fitness(&m, &b, delta));
    }
    let initial = [
        Bicluster::new(vec![0, 3], vec![0, 1]),
        Bicluster::new(vec![2, 3], vec![2, 3]),
    ];
    let mut hits = 0;
    let mut exceeded = false;
    for seed in 0..100 {
        let cfg = GaConfig {
            population: 20,
            generations: 200,
            seed,
            ..GaConfig::default()
        };
        let out = evolve::run_ga(&m, &initial, &cfg).unwrap();
        if out.best.fitness == max_fit {
            hits += 1;
        }
        exceeded |= out.best.fitness > max_fit;
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        hits >= 95 && !exceeded && secs < 60.0,
        format!("enumerated max fitness {max_fit}; reached in {hits}/100 seeds, exceeded: {exceeded}, {secs:.2} s"),
    )
}

fn criterion_6() -> Outcome {
    let data = synthetic_fixture(11);
    let seeds = seeding::seed(&data.matrix, &SeedingConfig::default()).unwrap();
    for run in 0..20 {
        let cfg = GaConfig {
            seed: 900 + run,
            ..GaConfig::default()
        };
        let out = evolve::run_ga(&data.matrix, &seeds, &cfg).unwrap();
        let initial_best = seeds
            .iter()
            .map(|s| fitness(&data.matrix, s, 0.95))
            .fold(0.0, f64::max);
        let mut best_ever = initial_best;
        for rec in &out.history.records {
            if rec.best_fitness < best_ever {
                return outcome(
                    false,
                    format!(
                        "run {run}: generation {} best {} < {best_ever}",
                        rec.generation, rec.best_fitness
                    ),
                );
            }
            best_ever = rec.best_fitness;
        }
        if out.best.fitness != best_ever {
            return outcome(
                false,
                format!(
                    "run {run}: reported best {} != {best_ever}",
                    out.best.fitness
                ),
            );
        }
    }
    outcome(true, "20 runs, per-generation best fitness never decreased")
}

fn default_config(input: PathBuf, format: InputFormat, out: &Path) -> PipelineConfig {
    PipelineConfig {
        input,
        format,
        out_dir: out.to_path_buf(),
        ..PipelineConfig::default()
    }
}

fn criterion_7(dir: &Path) -> (Outcome, RunReport) {
    let start = Instant::now();
    let implants = [
        ImplantSpec::new(20, 8, 10, 2, CoherenceModel::Shift),
        ImplantSpec::new(15, 6, 70, 12, CoherenceModel::Scale),
        ImplantSpec::new(25, 10, 130, 19, CoherenceModel::Shift),
    ];
    let d = synth::generate(200, 30, &implants, 5, 7).unwrap();
    let file = webbic::formats::SyntheticFile::new(&d.matrix, &d.truth, 7, d.overwritten_cells);
    let input = dir.join("synthetic.json");
    std::fs::write(&input, serde_json::to_vec(&file).unwrap()).unwrap();
    let cfg = default_config(input, InputFormat::SyntheticJson, &dir.join("out7"));
    let report = pipeline::run_pipeline(&cfg).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let rec = report.recovery.clone().unwrap();
    let scores: Vec<String> = rec.per_truth.iter().map(|j| format!("{j:.3}")).collect();
    let pass = rec.per_truth.iter().all(|&j| j >= 0.8) && secs < 120.0;
    // every implant column set over all 200 rows, for comparison with the implants' own fitness
    let widened: Vec<String> = d
        .truth
        .iter()
        .map(|t| {
            let wide = Bicluster::new((0..200).collect(), t.cols().to_vec());
            format!(
                "{}x{} acv {:.3} vs 200x{} acv {:.3}",
                t.rows().len(),
                t.cols().len(),
                acv(&d.matrix, t).unwrap(),
                t.cols().len(),
                acv(&d.matrix, &wide).unwrap()
            )
        })
        .collect();
    (
        outcome(
            pass,
            format!(
                "best Jaccard per implant [{}] (need >= 0.8 each); final set {} biclusters, mean volume {:.1}; implant vs all rows: {}; {secs:.2} s",
                scores.join(", "),
                report.ga_distinct.count,
                report.ga_distinct.avg_volume,
                widened.join("; ")
            ),
        ),
        report,
    )
}

fn reported_overlaps(report: &RunReport) -> Vec<f64> {
    let mut sets = vec![&report.seeds, &report.ga_distinct, &report.ga_population];
    if let Some(g) = &report.greedy {
        sets.push(g);
    }
    let mut out: Vec<f64> = sets.iter().filter_map(|s| s.overlap.map(|o| o.r)).collect();
    out.extend(
        report
            .comparison
            .iter()
            .filter_map(|c| c.overlap.map(|o| o.r)),
    );
    out
}

fn criterion_8(reports: &[&RunReport]) -> Outcome {
    let disjoint = [
        Bicluster::new(vec![0, 1], vec![0, 1]),
        Bicluster::new(vec![2, 3, 4], vec![2, 3]),
        Bicluster::new(vec![5, 6], vec![4, 5, 6]),
    ];
    let r0 = overlap_degree(&disjoint, 8, 8).unwrap().r;
    let mut ones = Vec::new();
    for copies in 2..=5 {
        let list = vec![Bicluster::full(6, 4); copies];
        ones.push(overlap_degree(&list, 6, 4).unwrap().r);
    }
    let mut rng = from_seed(808);
    let mut in_range = true;
    for _ in 0..200 {
        let list: Vec<Bicluster> = (0..rng.gen_range(2..6))
            .map(|_| {
                let rows = (0..10).filter(|_| rng.gen_bool(0.4)).collect();
                let cols = (0..7).filter(|_| rng.gen_bool(0.4)).collect();
                Bicluster::new(rows, cols)
            })
            .collect();
        let r = overlap_degree(&list, 10, 7).unwrap().r;
        in_range &= (0.0..=1.0).contains(&r);
    }
    let reported: Vec<f64> = reports.iter().flat_map(|r| reported_overlaps(r)).collect();
    in_range &= reported.iter().all(|r| (0.0..=1.0).contains(r));
    let pass = r0 == 0.0 && ones.iter().all(|&r| r == 1.0) && in_range;
    outcome(
        pass,
        format!(
            "disjoint R = {r0}; full-matrix copies R = {ones:?}; {} pipeline-reported and 200 random R values in [0,1]: {in_range}",
            reported.len()
        ),
    )
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/msnbc_1000.seq")
}

fn criterion_9(dir: &Path) -> (Outcome, RunReport) {
    let cfg = default_config(fixture(), InputFormat::Msnbc, &dir.join("out9"));
    let rep = pipeline::run_pipeline(&cfg).unwrap();
    let seeds = &rep.seeds;
    let greedy = rep.greedy.as_ref().unwrap();
    let ga = &rep.ga_distinct;
    let ga_overlap = ga.overlap.map_or(0.0, |o| o.r);
    let checks = [
        (
            "volume seeds < greedy",
            greedy.avg_volume > seeds.avg_volume,
        ),
        ("ACV seeds < greedy", greedy.avg_acv > seeds.avg_acv),
        ("ACV greedy <= GA", ga.avg_acv >= greedy.avg_acv),
        ("GA overlap > 0", ga_overlap > 0.0),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    let detail = format!(
        "volume {:.1} -> {:.1} -> {:.1}; ACV {:.4} -> {:.4} -> {:.4}; overlap {:.4} -> {:.4} -> {:.4}{}",
        seeds.avg_volume,
        greedy.avg_volume,
        ga.avg_volume,
        seeds.avg_acv,
        greedy.avg_acv,
        ga.avg_acv,
        seeds.overlap.map_or(0.0, |o| o.r),
        greedy.overlap.map_or(0.0, |o| o.r),
        ga_overlap,
        if failed.is_empty() {
            String::new()
        } else {
            format!("; failed: {}", failed.join(", "))
        }
    );
    (outcome(failed.is_empty(), detail), rep)
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn criterion_10(dir: &Path) -> Outcome {
    let a = default_config(fixture(), InputFormat::Msnbc, &dir.join("run-a"));
    let b = default_config(fixture(), InputFormat::Msnbc, &dir.join("run-b"));
    pipeline::run_pipeline(&a).unwrap();
    pipeline::run_pipeline(&b).unwrap();
    let (fa, fb) = (read_dir_sorted(&a.out_dir), read_dir_sorted(&b.out_dir));
    let names: Vec<&str> = fa.iter().map(|f| f.0.as_str()).collect();
    outcome(
        !fa.is_empty() && fa == fb,
        format!(
            "{} report files compared byte for byte: {}",
            fa.len(),
            names.join(", ")
        ),
    )
}

fn timed(
    results: &mut Vec<(u32, &'static str, Outcome, Duration)>,
    id: u32,
    name: &'static str,
    f: impl FnOnce() -> Outcome,
) {
    let start = Instant::now();
    let o = f();
    results.push((id, name, o, start.elapsed()));
}

fn main() -> ExitCode {
    let tmp = tempfile::tempdir().unwrap();
    let mut results = Vec::new();

    timed(&mut results, 1, "ACV oracle equivalence", criterion_1);
    timed(&mut results, 2, "ACV affine invariance", criterion_2);
    timed(
        &mut results,
        3,
        "greedy monotonicity and local optimality",
        criterion_3,
    );
    timed(&mut results, 4, "stage-trace shape", criterion_4);
    timed(&mut results, 5, "GA exhaustive oracle", criterion_5);
    timed(&mut results, 6, "GA elitism monotonicity", criterion_6);
    let mut reports = Vec::new();
    timed(&mut results, 7, "synthetic recovery", || {
        let (o, r) = criterion_7(tmp.path());
        reports.push(r);
        o
    });
    timed(
        &mut results,
        9,
        "directional ordering on msnbc fixture",
        || {
            let (o, r) = criterion_9(tmp.path());
            reports.push(r);
            o
        },
    );
    let refs: Vec<&RunReport> = reports.iter().collect();
    timed(&mut results, 8, "overlap-R boundary cases", || {
        criterion_8(&refs)
    });
    timed(&mut results, 10, "determinism", || criterion_10(tmp.path()));

    results.sort_by_key(|r| r.0);
    let mut failed = 0;
    println!();
    for (id, name, o, elapsed) in &results {
        let status = if o.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!o.pass);
        println!(
            "criterion {id:>2} {status} {name} ({:.2} s): {}",
            elapsed.as_secs_f64(),
            o.detail
        );
    }
    println!(
        "\n{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
