//! Pipeline configuration: defaults, `key = value` config files and
//! command-line overrides.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use webbic_core::evolve::Threshold;
use webbic_core::rng::derive_seed;
use webbic_core::{GaConfig, SeedingConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    /// msnbc sequence file, plain or gzip-compressed.
    Msnbc,
    /// Numeric CSV: header row of page labels, first column of user labels.
    MatrixCsv,
    /// Matrix plus ground truth as written by `webbic synth`.
    SyntheticJson,
}

impl FromStr for InputFormat {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "msnbc" => Ok(Self::Msnbc),
            "matrix-csv" => Ok(Self::MatrixCsv),
            "synthetic-json" => Ok(Self::SyntheticJson),
            other => bail!(
                "unknown input format {other:?} (expected msnbc, matrix-csv or synthetic-json)"
            ),
        }
    }
}

impl fmt::Display for InputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Msnbc => "msnbc",
            Self::MatrixCsv => "matrix-csv",
            Self::SyntheticJson => "synthetic-json",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Text,
}

impl FromStr for ReportFormat {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            "text" | "txt" => Ok(Self::Text),
            other => bail!("unknown report format {other:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub format: InputFormat,
    pub min_len: usize,
    pub max_len: usize,
    pub seeding: SeedingConfig,
    pub greedy: bool,
    pub ga: GaConfig,
    pub out_dir: PathBuf,
    pub reports: Vec<ReportFormat>,
    /// Top-level seed; the seeding and GA seeds are derived from it.
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let mut cfg = Self {
            input: PathBuf::new(),
            format: InputFormat::Msnbc,
            min_len: 5,
            max_len: 15,
            seeding: SeedingConfig::default(),
            greedy: true,
            ga: GaConfig::default(),
            out_dir: PathBuf::from("webbic-out"),
            reports: vec![ReportFormat::Json, ReportFormat::Csv, ReportFormat::Text],
            seed: 1,
        };
        cfg.set_seed(1);
        cfg
    }
}

impl PipelineConfig {
    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
        self.seeding.seed = derive_seed(seed, 1);
        self.ga.seed = derive_seed(seed, 2);
    }

    pub fn wants(&self, format: ReportFormat) -> bool {
        self.reports.contains(&format)
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_len > self.max_len {
            bail!("min_len {} exceeds max_len {}", self.min_len, self.max_len);
        }
        if self.seeding.k_users == 0 || self.seeding.k_pages == 0 {
            bail!("ku and kp must be at least 1");
        }
        self.ga.validate()?;
        Ok(())
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T>
        where
            T::Err: std::error::Error + Send + Sync + 'static,
        {
            value
                .parse()
                .with_context(|| format!("invalid value {value:?} for {key}"))
        }
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        match key.as_str() {
            "input" => self.input = PathBuf::from(value),
            "format" => self.format = value.parse()?,
            "min_len" => self.min_len = num(&key, value)?,
            "max_len" => self.max_len = num(&key, value)?,
            "ku" => self.seeding.k_users = num(&key, value)?,
            "kp" => self.seeding.k_pages = num(&key, value)?,
            "kmeans_restarts" => self.seeding.restarts = num(&key, value)?,
            "kmeans_max_iter" => self.seeding.max_iter = num(&key, value)?,
            "normalize_rows" => self.seeding.normalize_rows = num(&key, value)?,
            "skip_greedy" => self.greedy = !num::<bool>(&key, value)?,
            "pop_size" => self.ga.population = num(&key, value)?,
            "generations" => self.ga.generations = num(&key, value)?,
            "cp" => self.ga.crossover_fraction = num(&key, value)?,
            "mp" => self.ga.mutation_rate = num(&key, value)?,
            "delta" => self.ga.threshold = parse_threshold(value)?,
            "elitism" => self.ga.elitism = num(&key, value)?,
            "seed" => self.set_seed(num(&key, value)?),
            "out_dir" => self.out_dir = PathBuf::from(value),
            "reports" => {
                self.reports = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(str::parse)
                    .collect::<Result<_>>()?
            }
            other => bail!("unknown config key {other:?}"),
        }
        Ok(())
    }

    /// Applies a config file body: one `key = value` per line, `#` starts a
    /// comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (idx, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("config line {}: expected `key = value`", idx + 1);
            };
            self.set(key, value)
                .with_context(|| format!("config line {}", idx + 1))?;
        }
        Ok(())
    }
}

pub fn parse_threshold(value: &str) -> Result<Threshold> {
    match value.trim() {
        "max" | "max-initial" => Ok(Threshold::MaxInitial),
        v => Ok(Threshold::Fixed(
            v.parse().with_context(|| format!("invalid delta {v:?}"))?,
        )),
    }
}

pub fn threshold_label(t: Threshold) -> String {
    match t {
        Threshold::Fixed(d) => d.to_string(),
        Threshold::MaxInitial => "max-initial".to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_reference_settings() {
        let cfg = PipelineConfig::default();
        assert_eq!((cfg.min_len, cfg.max_len), (5, 15));
        assert_eq!((cfg.seeding.k_users, cfg.seeding.k_pages), (12, 10));
        assert_eq!(cfg.ga.population, 114);
        assert_eq!(cfg.ga.generations, 100);
        assert_eq!(cfg.ga.crossover_fraction, 0.7);
        assert_eq!(cfg.ga.mutation_rate, 0.01);
        assert_eq!(cfg.ga.threshold, Threshold::Fixed(0.95));
        assert_eq!(cfg.ga.elitism, 1);
    }

    #[test]
    fn parses_config_text() {
        let mut cfg = PipelineConfig::default();
        cfg.apply_text("# run\ninput = data.seq\nformat = matrix-csv\nku = 4 # users\nkp=3\nskip-greedy = true\ndelta = max\nreports = csv, text\nseed = 9\n")
            .unwrap();
        assert_eq!(cfg.input, PathBuf::from("data.seq"));
        assert_eq!(cfg.format, InputFormat::MatrixCsv);
        assert_eq!((cfg.seeding.k_users, cfg.seeding.k_pages), (4, 3));
        assert!(!cfg.greedy);
        assert_eq!(cfg.ga.threshold, Threshold::MaxInitial);
        assert_eq!(cfg.reports, [ReportFormat::Csv, ReportFormat::Text]);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.ga.seed, derive_seed(9, 2));
    }

    #[test]
    fn rejects_bad_lines() {
        let mut cfg = PipelineConfig::default();
        assert!(cfg.apply_text("ku 4").is_err());
        assert!(cfg.apply_text("colour = red").is_err());
        assert!(cfg.apply_text("cp = lots").is_err());
        cfg.min_len = 20;
        assert!(cfg.validate().is_err());
    }
}
