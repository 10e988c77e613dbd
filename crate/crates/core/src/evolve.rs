//! Genetic optimization of biclusters encoded as membership bit strings.
//!
//! A chromosome for an `n × m` matrix has `n + m` bits: the first `n` mark
//! member rows, the last `m` member columns. Fitness is the bicluster volume
//! when its ACV reaches the threshold, and zero otherwise.
//!
//! Each generation, in this order of random draws: elites are copied
//! unchanged; crossover children of roulette-selected parent pairs fill
//! `round(cp · n_pop)` slots; roulette-selected copies fill the rest; every
//! non-elite slot is then mutated bit by bit.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::ingest::AccessMatrix;
use crate::metrics::{scored_fitness, Bicluster};
use crate::rng::{from_seed, Rng};

/// Membership bit string: rows first, then columns.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chromosome(Vec<bool>);

impl Chromosome {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }
}

pub fn encode(b: &Bicluster, n: usize, m: usize) -> Result<Chromosome> {
    b.check_bounds(n, m)?;
    let mut bits = alloc::vec![false; n + m];
    for &i in b.rows() {
        bits[i] = true;
    }
    for &j in b.cols() {
        bits[n + j] = true;
    }
    Ok(Chromosome(bits))
}

/// Decodes without any validity check on the result: empty or single-row
/// biclusters are returned as is.
pub fn decode(c: &Chromosome, n: usize, m: usize) -> Result<Bicluster> {
    if c.len() != n + m {
        return Err(Error::Dimension(format!(
            "chromosome of length {} for n + m = {}",
            c.len(),
            n + m
        )));
    }
    let rows = (0..n).filter(|&i| c.0[i]).collect();
    let cols = (0..m).filter(|&j| c.0[n + j]).collect();
    Ok(Bicluster::new(rows, cols))
}

/// Roulette-wheel selection: index `i` with probability
/// `fitness[i] / Σ fitness`, or uniformly when every fitness is zero.
pub fn select_rws(fitnesses: &[f64], rng: &mut Rng) -> Result<usize> {
    if fitnesses.is_empty() {
        return Err(Error::Config(
            "roulette wheel over an empty population".into(),
        ));
    }
    if let Some(&neg) = fitnesses.iter().find(|f| f.is_nan() || **f < 0.0) {
        return Err(Error::NegativeFitness(neg));
    }
    let total: f64 = fitnesses.iter().sum();
    if total <= 0.0 {
        return Ok(rng.gen_range(0..fitnesses.len()));
    }
    let mut target = rng.gen::<f64>() * total;
    for (i, &f) in fitnesses.iter().enumerate() {
        if f > 0.0 && target < f {
            return Ok(i);
        }
        target -= f;
    }
    // only reachable through rounding in the running subtraction
    Ok(fitnesses.iter().rposition(|&f| f > 0.0).unwrap_or(0))
}

/// One-point crossover applied separately to the row segment and the column
/// segment, each with its own cut point.
pub fn crossover(
    p1: &Chromosome,
    p2: &Chromosome,
    n: usize,
    m: usize,
    rng: &mut Rng,
) -> Result<(Chromosome, Chromosome)> {
    if p1.len() != n + m || p2.len() != n + m {
        return Err(Error::Dimension(format!(
            "parents of length {} and {} for n + m = {}",
            p1.len(),
            p2.len(),
            n + m
        )));
    }
    if n < 2 || m < 2 {
        return Err(Error::Config(format!(
            "crossover needs n, m >= 2 (got {n}, {m})"
        )));
    }
    let row_cut = rng.gen_range(1..n);
    let col_cut = n + rng.gen_range(1..m);
    let mut a = p1.0.clone();
    let mut b = p2.0.clone();
    a[row_cut..n].swap_with_slice(&mut b[row_cut..n]);
    a[col_cut..].swap_with_slice(&mut b[col_cut..]);
    Ok((Chromosome(a), Chromosome(b)))
}

/// Flips each bit independently with probability `rate`.
pub fn mutate(c: &Chromosome, rate: f64, rng: &mut Rng) -> Chromosome {
    let rate = rate.clamp(0.0, 1.0);
    Chromosome(c.0.iter().map(|&bit| bit ^ rng.gen_bool(rate)).collect())
}

/// How the ACV threshold is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    Fixed(f64),
    /// The highest ACV in the initial population, computed once.
    MaxInitial,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    /// Fraction of each new population produced by crossover.
    pub crossover_fraction: f64,
    /// Per-bit flip probability.
    pub mutation_rate: f64,
    pub threshold: Threshold,
    /// Best individuals carried over unchanged each generation.
    pub elitism: usize,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population: 114,
            generations: 100,
            crossover_fraction: 0.7,
            mutation_rate: 0.01,
            threshold: Threshold::Fixed(0.95),
            elitism: 1,
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} = {v} outside [0, 1]")))
            }
        };
        unit("crossover fraction", self.crossover_fraction)?;
        unit("mutation rate", self.mutation_rate)?;
        if let Threshold::Fixed(d) = self.threshold {
            unit("ACV threshold", d)?;
        }
        if self.population == 0 {
            return Err(Error::Config("population must be at least 1".into()));
        }
        if self.elitism >= self.population {
            return Err(Error::Config(format!(
                "elitism {} must be below the population size {}",
                self.elitism, self.population
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub best_acv: f64,
    pub best_volume: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GaHistory {
    pub records: Vec<GenerationStats>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scored {
    pub bicluster: Bicluster,
    pub fitness: f64,
    pub acv: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaOutcome {
    /// Highest-fitness individual seen in any generation.
    pub best: Scored,
    pub population: Vec<Scored>,
    pub history: GaHistory,
    /// Threshold actually applied.
    pub delta: f64,
}

impl GaOutcome {
    /// Distinct members of the final population with nonzero fitness, in
    /// population order of first appearance.
    pub fn distinct_fit(&self) -> Vec<Scored> {
        let mut seen = BTreeSet::new();
        self.population
            .iter()
            .filter(|s| s.fitness > 0.0 && seen.insert(s.bicluster.clone()))
            .cloned()
            .collect()
    }
}

fn better(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 > b.0 || (a.0 == b.0 && a.1 > b.1)
}

struct Evaluated {
    fitness: Vec<f64>,
    acv: Vec<f64>,
}

fn evaluate(matrix: &AccessMatrix, population: &[Chromosome], delta: f64) -> Evaluated {
    let (n, m) = (matrix.rows(), matrix.cols());
    let (fitness, acv) = population
        .iter()
        .map(|c| {
            let b = decode(c, n, m).expect("population lengths are fixed");
            scored_fitness(matrix, &b, delta)
        })
        .unzip();
    Evaluated { fitness, acv }
}

/// Brings the initial population to exactly `cfg.population` chromosomes:
/// keeps the highest-ACV members when there are too many, pads with mutated
/// copies of random members when there are too few.
fn size_population(
    matrix: &AccessMatrix,
    initial: &[Bicluster],
    cfg: &GaConfig,
    rng: &mut Rng,
) -> Result<Vec<Chromosome>> {
    let (n, m) = (matrix.rows(), matrix.cols());
    let mut encoded = initial
        .iter()
        .map(|b| encode(b, n, m))
        .collect::<Result<Vec<_>>>()?;
    if encoded.len() > cfg.population {
        let acvs: Vec<f64> = initial
            .iter()
            .map(|b| scored_fitness(matrix, b, 0.0).1)
            .collect();
        let mut order: Vec<usize> = (0..encoded.len()).collect();
        order.sort_by(|&a, &b| acvs[b].total_cmp(&acvs[a]).then(a.cmp(&b)));
        order.truncate(cfg.population);
        encoded = order.into_iter().map(|i| encoded[i].clone()).collect();
    }
    let originals = encoded.len();
    while encoded.len() < cfg.population {
        let parent = &encoded[rng.gen_range(0..originals)];
        let child = mutate(parent, cfg.mutation_rate, rng);
        encoded.push(child);
    }
    Ok(encoded)
}

/// Evolves the population for `cfg.generations` generations and returns the
/// best individual ever observed (ties go to the higher ACV, then to the
/// earlier one), the final population and per-generation statistics.
pub fn run_ga(matrix: &AccessMatrix, initial: &[Bicluster], cfg: &GaConfig) -> Result<GaOutcome> {
    cfg.validate()?;
    if initial.is_empty() {
        return Err(Error::Config(
            "GA needs a nonempty initial population".into(),
        ));
    }
    let (n, m) = (matrix.rows(), matrix.cols());
    if n < 2 || m < 2 {
        return Err(Error::Config(format!(
            "GA needs at least a 2x2 matrix, got {n}x{m}"
        )));
    }
    let mut rng = from_seed(cfg.seed);
    let mut population = size_population(matrix, initial, cfg, &mut rng)?;

    let delta = match cfg.threshold {
        Threshold::Fixed(d) => d,
        Threshold::MaxInitial => population
            .iter()
            .map(|c| scored_fitness(matrix, &decode(c, n, m).expect("sized"), 0.0).1)
            .fold(0.0, f64::max),
    };

    let mut scores = evaluate(matrix, &population, delta);
    let mut best_idx = 0;
    for i in 1..population.len() {
        if better(
            (scores.fitness[i], scores.acv[i]),
            (scores.fitness[best_idx], scores.acv[best_idx]),
        ) {
            best_idx = i;
        }
    }
    let mut best = (
        population[best_idx].clone(),
        scores.fitness[best_idx],
        scores.acv[best_idx],
    );
    let mut history = GaHistory::default();

    let slots = cfg.population;
    let crossover_slots =
        (libm::round(cfg.crossover_fraction * slots as f64) as usize).min(slots - cfg.elitism);

    for generation in 1..=cfg.generations {
        let mut order: Vec<usize> = (0..slots).collect();
        order.sort_by(|&a, &b| {
            scores.fitness[b]
                .total_cmp(&scores.fitness[a])
                .then(scores.acv[b].total_cmp(&scores.acv[a]))
                .then(a.cmp(&b))
        });
        let mut next: Vec<Chromosome> = order[..cfg.elitism]
            .iter()
            .map(|&i| population[i].clone())
            .collect();

        let mut produced = 0;
        while produced < crossover_slots {
            let a = select_rws(&scores.fitness, &mut rng)?;
            let b = select_rws(&scores.fitness, &mut rng)?;
            let (c1, c2) = crossover(&population[a], &population[b], n, m, &mut rng)?;
            next.push(c1);
            produced += 1;
            if produced < crossover_slots {
                next.push(c2);
                produced += 1;
            }
        }
        while next.len() < slots {
            let pick = select_rws(&scores.fitness, &mut rng)?;
            next.push(population[pick].clone());
        }
        for c in &mut next[cfg.elitism..] {
            *c = mutate(c, cfg.mutation_rate, &mut rng);
        }

        population = next;
        scores = evaluate(matrix, &population, delta);

        let mut gen_best = 0;
        for i in 1..slots {
            if better(
                (scores.fitness[i], scores.acv[i]),
                (scores.fitness[gen_best], scores.acv[gen_best]),
            ) {
                gen_best = i;
            }
        }
        if better(
            (scores.fitness[gen_best], scores.acv[gen_best]),
            (best.1, best.2),
        ) {
            best = (
                population[gen_best].clone(),
                scores.fitness[gen_best],
                scores.acv[gen_best],
            );
        }
        history.records.push(GenerationStats {
            generation,
            best_fitness: scores.fitness[gen_best],
            mean_fitness: scores.fitness.iter().sum::<f64>() / slots as f64,
            best_acv: scores.acv[gen_best],
            best_volume: decode(&population[gen_best], n, m)?.volume(),
        });
    }

    let final_population = population
        .iter()
        .zip(scores.fitness.iter().zip(&scores.acv))
        .map(|(c, (&fitness, &acv))| {
            Ok(Scored {
                bicluster: decode(c, n, m)?,
                fitness,
                acv,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(GaOutcome {
        best: Scored {
            bicluster: decode(&best.0, n, m)?,
            fitness: best.1,
            acv: best.2,
        },
        population: final_population,
        history,
        delta,
    })
}
