//! Command-line front end: `negspec stats|cluster|experiment`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use negspec::harness::{
    self, CellParams, GridCell, Vectorizer,
};
use negspec::laplacian::LaplacianKind;
use negspec::similarity::Transform;
use negspec::Error;

#[derive(Parser)]
#[command(
    name = "negspec",
    about = "Spectral clustering of document embeddings with repair transforms for negative similarities",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report how much negativity an input's similarity matrix has
    Stats {
        /// Corpus CSV (id,text[,label]), embedding CSV (id,d0,...) or
        /// headerless similarity CSV
        #[arg(long)]
        input: PathBuf,
        /// Word-vector file (token v0 v1 ...); embeds corpus inputs by
        /// averaged word vectors instead of bag-of-words
        #[arg(long)]
        word_vectors: Option<PathBuf>,
        /// Bag-of-words weighting for corpus inputs: count, tf or tfidf
        #[arg(long, default_value = "tfidf")]
        vectorizer: String,
    },
    /// Cluster one input with one transform/Laplacian choice
    Cluster {
        #[arg(long)]
        input: PathBuf,
        /// Labels CSV (id,label); enables F-score columns
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long)]
        word_vectors: Option<PathBuf>,
        #[arg(long, default_value = "tfidf")]
        vectorizer: String,
        /// Repair transform: zero, add, add_norm, angle_max, angle_div or exp
        #[arg(long)]
        transform: String,
        /// Shift constant for transforms that take one
        #[arg(long, default_value_t = 0.0)]
        c: f64,
        /// Laplacian: combinatorial, normalized, rationormalized, signed or
        /// perturbed
        #[arg(long)]
        laplacian: String,
        /// Number of clusters
        #[arg(long)]
        k: usize,
        /// k-means runs to average over
        #[arg(long, default_value_t = 30)]
        runs: usize,
        /// Base seed for run seeds
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// k-means++ restarts per run
        #[arg(long, default_value_t = 10)]
        restarts: usize,
        /// Result CSV to write (one row)
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a transform x c x laplacian grid from a config file
    Experiment {
        /// Flat key=value config file
        #[arg(long)]
        config: PathBuf,
        /// Result CSV to write (one row per grid cell)
        #[arg(long)]
        out: PathBuf,
        /// Override the config's input path
        #[arg(long)]
        input: Option<PathBuf>,
        /// Override the config's labels path
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Override the config's word-vector path
        #[arg(long)]
        word_vectors: Option<PathBuf>,
        /// Override the config's vectorizer
        #[arg(long)]
        vectorizer: Option<String>,
        /// Override the transform list (comma-separated)
        #[arg(long)]
        transforms: Option<String>,
        /// Override the c list (comma-separated)
        #[arg(long)]
        c_values: Option<String>,
        /// Override the Laplacian list (comma-separated)
        #[arg(long)]
        laplacians: Option<String>,
        /// Override the cluster count
        #[arg(long)]
        k: Option<usize>,
        /// Override the runs per cell
        #[arg(long)]
        runs: Option<usize>,
        /// Override the base seed
        #[arg(long)]
        base_seed: Option<u64>,
        /// Override the k-means++ restarts per run
        #[arg(long)]
        restarts: Option<usize>,
        /// Override the worker thread count
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Stats {
            input,
            word_vectors,
            vectorizer,
        } => {
            let vectorizer: Vectorizer = vectorizer.parse()?;
            let report = harness::cmd_stats(&input, word_vectors.as_deref(), vectorizer)?;
            println!("{report}");
        }
        Command::Cluster {
            input,
            labels,
            word_vectors,
            vectorizer,
            transform,
            c,
            laplacian,
            k,
            runs,
            seed,
            restarts,
            out,
        } => {
            let vectorizer: Vectorizer = vectorizer.parse()?;
            let transform: Transform = transform.parse()?;
            let laplacian: LaplacianKind = laplacian.parse()?;
            let loaded =
                harness::load_input(&input, labels.as_deref(), word_vectors.as_deref(), vectorizer)?;
            let cell = GridCell {
                transform,
                c,
                laplacian,
            };
            let params = CellParams {
                k,
                runs,
                base_seed: seed,
                restarts,
                cell_index: 0,
            };
            let result = harness::run_cell(&loaded, &cell, &params)?;
            println!("status: {}", result.status);
            if let Some(scores) = &result.f_pairwise {
                println!("f_pairwise: {} (sd {})", scores.mean, scores.sd);
            }
            if let Some(scores) = &result.f_matched {
                println!("f_matched: {} (sd {})", scores.mean, scores.sd);
            }
            if let Some((rcut, ncut, nrcut)) = result.criteria {
                println!("rcut: {rcut}\nncut: {ncut}\nnrcut: {nrcut}");
            }
            harness::write_results_csv(&[result], &out)?;
        }
        Command::Experiment {
            config,
            out,
            input,
            labels,
            word_vectors,
            vectorizer,
            transforms,
            c_values,
            laplacians,
            k,
            runs,
            base_seed,
            restarts,
            workers,
        } => {
            let mut overrides: Vec<(String, String)> = Vec::new();
            let mut push = |key: &str, value: Option<String>| {
                if let Some(value) = value {
                    overrides.push((key.to_string(), value));
                }
            };
            push("input", input.map(|p| p.display().to_string()));
            push("labels", labels.map(|p| p.display().to_string()));
            push(
                "word_vectors",
                word_vectors.map(|p| p.display().to_string()),
            );
            push("vectorizer", vectorizer);
            push("transforms", transforms);
            push("c_values", c_values);
            push("laplacians", laplacians);
            push("k", k.map(|v| v.to_string()));
            push("runs", runs.map(|v| v.to_string()));
            push("base_seed", base_seed.map(|v| v.to_string()));
            push("restarts", restarts.map(|v| v.to_string()));
            push("workers", workers.map(|v| v.to_string()));
            let spec = harness::load_config(&config, &overrides)?;
            let results = harness::run_experiment(&spec)?;
            harness::write_results_csv(&results, &out)?;
            let failures = results
                .iter()
                .filter(|r| r.status != harness::CellStatus::Ok)
                .count();
            println!(
                "wrote {} rows to {} ({} failed cells)",
                results.len(),
                out.display(),
                failures
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
