use std::io::BufReader;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use seqaug_cli::augment::{self, AugmentOptions, ConfigSource};
use seqaug_cli::bench::{self, BenchParams};
use seqaug_cli::{inspect, verify, CliError, Result};
use seqaug_core::io::{modality_from_path, read_plan_log};
use seqaug_core::{Mode, ModalityDataset};

#[derive(Parser)]
#[command(name = "seqaug", version = seqaug_core::VERSION, about = "Temporal resampling augmentation for feature-sequence datasets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Augment per-modality dataset files into an output directory.
    #[command(group(ArgGroup::new("source").required(true).args(["config", "preset"])))]
    Augment {
        /// JSON configuration file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Named configuration (mult-mosei, mmrnn-mosei, mmrnn-unimodal-{t,a,v}).
        #[arg(long)]
        preset: Option<String>,
        /// Input as `modality=path`; `.csv` files are imported. Repeatable.
        #[arg(long = "input", required = true, value_parser = augment::parse_input)]
        inputs: Vec<(String, PathBuf)>,
        /// Output directory; must not exist yet.
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        copies: Option<u32>,
        #[arg(long)]
        mode: Option<Mode>,
        /// Worker threads (0 = one per core). Does not affect output bytes.
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Print summary statistics of an SQAF file.
    Inspect {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Check an augmented SQAF file against its original and the plan log.
    Verify {
        #[arg(long)]
        original: PathBuf,
        #[arg(long)]
        augmented: PathBuf,
        #[arg(long)]
        plans: PathBuf,
        /// Modality to check; defaults to the original file's stem.
        #[arg(long)]
        modality: Option<String>,
        #[arg(long, default_value_t = 10)]
        max_failures: usize,
    },
    /// Time augmentation of synthetic data.
    Bench {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        len: usize,
        #[arg(long)]
        num: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        /// Double --len repeatedly and fit the growth exponent.
        #[arg(long)]
        sweep: bool,
        #[arg(long, default_value_t = 3)]
        sweep_steps: usize,
        #[arg(long)]
        json: bool,
    },
}

fn load(path: &PathBuf) -> Result<ModalityDataset> {
    ModalityDataset::load(path).map_err(|e| CliError::from(e).context(path.display()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Augment {
            config,
            preset,
            inputs,
            output,
            seed,
            copies,
            mode,
            threads,
        } => {
            let config = match (config, preset) {
                (Some(path), _) => ConfigSource::File(path),
                (None, Some(name)) => ConfigSource::Preset(name),
                (None, None) => unreachable!("clap enforces the source group"),
            };
            let summary = augment::run_augment(&AugmentOptions {
                config,
                inputs,
                output,
                seed,
                copies,
                mode,
                threads,
            })?;
            println!(
                "augmented {} sequences x {} replicas, {} plan records",
                summary.sequences, summary.replicas, summary.plan_records
            );
            for f in &summary.files {
                println!("  wrote {}", f.display());
            }
        }
        Command::Inspect { file, json } => {
            let stats = inspect::dataset_stats(&load(&file)?);
            if json {
                println!("{}", inspect::render_json(&stats));
            } else {
                print!("{}", inspect::render_text(&stats));
            }
        }
        Command::Verify {
            original,
            augmented,
            plans,
            modality,
            max_failures,
        } => {
            let orig = load(&original)?;
            let aug = load(&augmented)?;
            let file = std::fs::File::open(&plans).map_err(|e| CliError::io(plans.display(), e))?;
            let records =
                read_plan_log(BufReader::new(file)).map_err(|e| CliError::from(e).context(plans.display()))?;
            let modality = modality.unwrap_or_else(|| modality_from_path(&original));
            let report = verify::verify(&orig, &aug, &records, &modality);
            if !report.passed() {
                for f in report.failures.iter().take(max_failures) {
                    println!("FAIL {f}");
                }
                return Err(CliError::Validation(format!(
                    "verification failed: {} problem(s) across {} checked sequences",
                    report.failures.len(),
                    report.sequences_checked
                )));
            }
            println!("ok: {} sequences of `{modality}` verified", report.sequences_checked);
        }
        Command::Bench {
            dim,
            len,
            num,
            p,
            threads,
            seed,
            repeats,
            sweep,
            sweep_steps,
            json,
        } => {
            let params = BenchParams {
                dim,
                len,
                num,
                p,
                threads,
                seed,
                repeats,
            };
            if sweep {
                let result = bench::sweep(&params, sweep_steps)?;
                if json {
                    println!("{}", serde_json::to_string_pretty(&result).expect("serializable"));
                } else {
                    for r in &result.points {
                        print_bench(r);
                    }
                    println!("fitted exponent of time vs T: {:.3}", result.exponent);
                }
            } else {
                let r = bench::measure(&params)?;
                if json {
                    println!("{}", serde_json::to_string_pretty(&r).expect("serializable"));
                } else {
                    print_bench(&r);
                }
            }
        }
    }
    Ok(())
}

fn print_bench(r: &bench::BenchResult) {
    let per_cell = r
        .ns_per_moved_cell
        .map_or_else(|| "n/a".to_owned(), |ns| format!("{ns:.3}"));
    println!(
        "T={:<7} d={:<5} M={:<5} p={:<5} {:>10.4} s {:>12.1} seq/s {:>10} ns/(t*addr)",
        r.params.len, r.params.dim, r.params.num, r.params.p, r.seconds, r.sequences_per_sec, per_cell
    );
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
