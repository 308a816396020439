mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use toponym_core::pipeline::{self, PipelineConfig};
use toponym_core::Error;

#[derive(Parser, Debug)]
#[command(name = "toponym", version, about = "Cross-script toponym embeddings: data, training, retrieval, evaluation")]
struct Cli {
    /// TOML config file. Without one, the `paper` preset applies.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Override one config value, e.g. `--set train.phase1.epochs=3` or
    /// `--set preset=desk`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the synthetic gazetteer and its held-out testset.
    Toy,
    /// Read the place documents into the toponym store.
    Ingest,
    /// Build the script-partitioned vocabulary.
    BuildVocab,
    /// Generate positive pairs.
    GenPairs,
    /// Generate random- and hard-negative triplets.
    GenTriplets,
    /// Train one phase: 1 teacher, 2 distillation, 3 hard-negative fine-tuning.
    Train {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        phase: u8,
    },
    /// Embed every toponym with the final student.
    Embed,
    /// Build the similarity index over the embeddings.
    Index,
    /// Nearest toponyms to a name.
    Query {
        #[arg(long)]
        name: String,
        #[arg(long)]
        lang: Option<String>,
        #[arg(short, default_value_t = 10)]
        k: usize,
    },
    /// Baselines and model metrics over every testset.
    Evaluate,
    /// Cosine checks on the diagnostic pair suite.
    Diagnostics,
    /// Every stage from `toy` (or `ingest` with --no-toy) through `index`.
    All {
        /// Use the existing corpus instead of generating the toy one.
        #[arg(long)]
        no_toy: bool,
    },
    /// Print the resolved config and its hash.
    Config,
}

enum Failure {
    User(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_user_error() {
            Failure::User(e.to_string())
        } else {
            Failure::Internal(e.to_string())
        }
    }
}

fn run_stage(cfg: &PipelineConfig, command: &Command) -> Result<(), Failure> {
    match command {
        Command::Toy => {
            let s = pipeline::toy(cfg)?;
            println!(
                "wrote {} places, {} toponyms to {}; held-out testset of {} queries in {}",
                s.places,
                s.toponyms,
                cfg.paths.corpus.display(),
                s.heldout,
                cfg.paths.testsets.display()
            );
        }
        Command::Ingest => {
            let (store, report) = pipeline::ingest(cfg)?;
            println!("ingested {} toponyms from {} places", store.len(), store.places().len());
            println!("{report:?}");
        }
        Command::BuildVocab => {
            let v = pipeline::build_vocab(cfg)?;
            println!("vocabulary of {} tokens, hash {}", v.len(), v.hash());
            for (script, n) in v.count_by_script() {
                println!("  {}\t{n}", script.name());
            }
        }
        Command::GenPairs => {
            let r = pipeline::pairs(cfg)?;
            println!("{r:?}");
        }
        Command::GenTriplets => {
            let s = pipeline::triplets(cfg)?;
            println!("random: {:?}", s.random);
            println!("hard: {:?}", s.hard);
            println!(
                "phonetic feature coverage {:.4}, phase-1 triplet survival {:.4}",
                s.feature_coverage, s.phonetic_survival
            );
        }
        Command::Train { phase } => {
            let o = pipeline::train(cfg, *phase)?;
            print!("{}\n{}", toponym_core::training::LOG_HEADER, o.log_tsv());
            println!(
                "best epoch {} val loss {:.6}; {} train / {} val examples",
                o.best.epoch, o.best.val_loss, o.train_size, o.val_size
            );
        }
        Command::Embed => {
            let s = pipeline::embed(cfg)?;
            println!("embedded {} toponyms ({} skipped), model {}", s.embedded, s.skipped, s.model_hash);
        }
        Command::Index => {
            let n = pipeline::index(cfg)?;
            println!("indexed {n} vectors ({:?})", cfg.index.mode);
        }
        Command::Query { name, lang, k } => {
            for (rank, h) in pipeline::query(cfg, name, lang.as_deref(), *k)?.iter().enumerate() {
                println!(
                    "{}\t{}\t{:.4}\t{}\t{}\t{}",
                    rank + 1,
                    h.hit.id,
                    h.hit.score,
                    h.place_id,
                    h.lang.as_deref().unwrap_or("-"),
                    h.name
                );
            }
        }
        Command::Evaluate => {
            for s in pipeline::evaluate(cfg)? {
                println!("# {}", s.system);
                print!("{}", s.report());
            }
        }
        Command::Diagnostics => {
            let r = pipeline::diagnostics(cfg)?;
            print!("category\tpassed\ttotal\n{}", r.summary_tsv());
        }
        Command::All { no_toy } => {
            let mut stages = vec![
                Command::Ingest,
                Command::BuildVocab,
                Command::GenPairs,
                Command::GenTriplets,
                Command::Train { phase: 1 },
                Command::Train { phase: 2 },
                Command::Train { phase: 3 },
                Command::Embed,
                Command::Index,
            ];
            if !no_toy {
                stages.insert(0, Command::Toy);
            }
            for s in &stages {
                eprintln!("== {s:?}");
                run_stage(cfg, s)?;
            }
        }
        Command::Config => {
            println!("# config hash {}", cfg.hash());
            print!("{}", config::render(cfg));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let cfg = match config::resolve(cli.config.as_deref(), &cli.set) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    match run_stage(&cfg, &cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::User(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}
