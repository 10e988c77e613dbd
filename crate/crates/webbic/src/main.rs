use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use webbic::config::{parse_threshold, PipelineConfig};
use webbic::formats::SyntheticFile;
use webbic::pipeline;
use webbic_core::{synth, CoherenceModel, ImplantSpec};

#[derive(Parser)]
#[command(
    name = "webbic",
    version,
    about = "Coherent biclusters of web users and pages"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write reports.
    Run(RunArgs),
    /// Print the per-method comparison table.
    Compare(RunArgs),
    /// Generate a synthetic matrix with implanted biclusters.
    Synth(SynthArgs),
}

#[derive(Args)]
struct RunArgs {
    /// `key = value` config file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    input: Option<PathBuf>,
    /// msnbc, matrix-csv or synthetic-json.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    min_len: Option<usize>,
    #[arg(long)]
    max_len: Option<usize>,
    /// Number of user clusters.
    #[arg(long)]
    ku: Option<usize>,
    /// Number of page clusters.
    #[arg(long)]
    kp: Option<usize>,
    /// Feed the K-means seeds straight into the GA.
    #[arg(long)]
    skip_greedy: bool,
    #[arg(long)]
    pop_size: Option<usize>,
    #[arg(long)]
    generations: Option<usize>,
    /// Crossover fraction.
    #[arg(long)]
    cp: Option<f64>,
    /// Per-bit mutation rate.
    #[arg(long)]
    mp: Option<f64>,
    /// Fitness threshold: a number, or `max` for the highest initial ACV.
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    elitism: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

impl RunArgs {
    fn config(&self) -> Result<PipelineConfig> {
        let mut cfg = PipelineConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            cfg.apply_text(&text)
                .with_context(|| format!("in {}", path.display()))?;
        }
        if let Some(v) = &self.input {
            cfg.input = v.clone();
        }
        if let Some(v) = &self.format {
            cfg.format = v.parse()?;
        }
        if let Some(v) = self.min_len {
            cfg.min_len = v;
        }
        if let Some(v) = self.max_len {
            cfg.max_len = v;
        }
        if let Some(v) = self.ku {
            cfg.seeding.k_users = v;
        }
        if let Some(v) = self.kp {
            cfg.seeding.k_pages = v;
        }
        if self.skip_greedy {
            cfg.greedy = false;
        }
        if let Some(v) = self.pop_size {
            cfg.ga.population = v;
        }
        if let Some(v) = self.generations {
            cfg.ga.generations = v;
        }
        if let Some(v) = self.cp {
            cfg.ga.crossover_fraction = v;
        }
        if let Some(v) = self.mp {
            cfg.ga.mutation_rate = v;
        }
        if let Some(v) = &self.delta {
            cfg.ga.threshold = parse_threshold(v)?;
        }
        if let Some(v) = self.elitism {
            cfg.ga.elitism = v;
        }
        if let Some(v) = self.seed {
            cfg.set_seed(v);
        }
        if let Some(v) = &self.out_dir {
            cfg.out_dir = v.clone();
        }
        if cfg.input.as_os_str().is_empty() {
            bail!("no input given (use --input or `input =` in the config file)");
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 200)]
    rows: usize,
    #[arg(long, default_value_t = 30)]
    cols: usize,
    /// `ROWSxCOLS@ROW,COL:MODEL` with MODEL one of shift, scale, shift-scale;
    /// repeat for several implants.
    #[arg(long = "implant", required = true)]
    implants: Vec<String>,
    /// Background values are drawn uniformly from 0..=NOISE.
    #[arg(long, default_value_t = 5)]
    noise: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn parse_implant(text: &str) -> Result<ImplantSpec> {
    let err = || format!("bad implant {text:?}, expected ROWSxCOLS@ROW,COL:MODEL");
    let (shape, rest) = text.split_once('@').with_context(err)?;
    let (offset, model) = rest.split_once(':').with_context(err)?;
    let (r, c) = shape.split_once('x').with_context(err)?;
    let (ro, co) = offset.split_once(',').with_context(err)?;
    let model = match model {
        "shift" => CoherenceModel::Shift,
        "scale" => CoherenceModel::Scale,
        "shift-scale" => CoherenceModel::ShiftScale,
        other => bail!("unknown coherence model {other:?}"),
    };
    Ok(ImplantSpec::new(
        r.parse().with_context(err)?,
        c.parse().with_context(err)?,
        ro.parse().with_context(err)?,
        co.parse().with_context(err)?,
        model,
    ))
}

fn synth_cmd(args: &SynthArgs) -> Result<()> {
    let implants = args
        .implants
        .iter()
        .map(|s| parse_implant(s))
        .collect::<Result<Vec<_>>>()?;
    let data = synth::generate(args.rows, args.cols, &implants, args.noise, args.seed)?;
    let file = SyntheticFile::new(&data.matrix, &data.truth, args.seed, data.overwritten_cells);
    let mut body = serde_json::to_vec_pretty(&file)?;
    body.push(b'\n');
    std::fs::write(&args.out, body).with_context(|| format!("writing {}", args.out.display()))?;
    if data.overwritten_cells > 0 {
        eprintln!(
            "note: {} cells were covered by more than one implant",
            data.overwritten_cells
        );
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let cfg = args.config()?;
            let report = pipeline::run_pipeline(&cfg)?;
            print!("{}", webbic::report::digest(&report));
            println!("\nreports written to {}", cfg.out_dir.display());
        }
        Command::Compare(args) => {
            let cfg = args.config()?;
            let rows = pipeline::compare_methods(&cfg)?;
            println!(
                "{:<20}{:>8}{:>14}{:>12}{:>12}",
                "method", "count", "avg volume", "avg ACV", "overlap"
            );
            for r in rows {
                let ov = r
                    .overlap
                    .map_or_else(|| "n/a".to_string(), |o| format!("{:.4}", o.r));
                println!(
                    "{:<20}{:>8}{:>14.1}{:>12.4}{:>12}",
                    r.method, r.count, r.avg_volume, r.avg_acv, ov
                );
            }
        }
        Command::Synth(args) => synth_cmd(&args)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
