mod stages;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "leginet",
    version,
    about = "Build and analyse legislation networks from OCR'd statute text"
)]
struct Cli {
    #[command(subcommand)]
    command: Stage,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// Raw text to canonical text files.
    Canonicalize,
    /// Canonical text to entity and relation mentions.
    Extract,
    /// Mentions to master-list matches.
    Match,
    /// Matches to nodes/edges CSV.
    Build,
    /// Network and snapshot metrics.
    Metrics,
    /// Node removal and edge deletion experiments.
    Robustness,
    /// Error components, precision and recall against annotations.
    Evaluate,
    /// Every stage in order.
    Pipeline,
}

#[derive(Args, Clone, Debug)]
pub struct Opts {
    /// Directory of raw .txt documents.
    #[arg(long, global = true)]
    pub corpus: Option<PathBuf>,
    /// Optional tab-separated manifest: doc_id, file, year.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    /// Master list of act titles, one per line.
    #[arg(long, global = true)]
    pub master: Option<PathBuf>,
    /// Rules JSON; the bundled rules are used when absent.
    #[arg(long, global = true)]
    pub rules: Option<PathBuf>,
    /// Canonicalization config JSON.
    #[arg(long, global = true)]
    pub canon_config: Option<PathBuf>,
    /// Directory of <doc_id>.json annotation files.
    #[arg(long, global = true)]
    pub annotations: Option<PathBuf>,
    /// Artifact directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, global = true, default_value_t = 5)]
    pub edit_threshold: usize,
    /// Jaccard score that ends the scan early; above 1 disables it.
    #[arg(long, global = true, default_value_t = 0.5)]
    pub jaccard_exit: f64,
    #[arg(long, global = true, default_value_t = 0.0)]
    pub jaccard_floor: f64,
    /// Comma-separated snapshot end years, ascending.
    #[arg(long, global = true, value_delimiter = ',')]
    pub snapshots: Vec<i32>,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Also write network.gexf.
    #[arg(long, global = true)]
    pub gexf: bool,
    /// Keep repeated (src, dst, type) edges.
    #[arg(long, global = true)]
    pub keep_multiedges: bool,
    /// Random graphs per small-world sigma.
    #[arg(long, global = true, default_value_t = leginet::metrics::DEFAULT_SIGMA_RANDOM)]
    pub n_random: usize,
    #[arg(long, global = true, value_delimiter = ',', default_value = "0,0.01,0.03,0.05,0.1")]
    pub removal_fractions: Vec<f64>,
    #[arg(long, global = true, default_value_t = 20)]
    pub removal_reps: usize,
    #[arg(long, global = true, value_delimiter = ',', default_value = "0.01,0.05,0.1,0.2")]
    pub edge_levels: Vec<f64>,
    #[arg(long, global = true, default_value_t = leginet::robustness::DEFAULT_EDGE_REPS)]
    pub edge_reps: usize,
    #[arg(long, global = true, default_value_t = 10)]
    pub clusters: usize,
    #[arg(long, global = true, default_value_t = 30)]
    pub cluster_size: usize,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let integrity = err
        .chain()
        .filter_map(|e| e.downcast_ref::<leginet::Error>())
        .any(leginet::Error::is_data_integrity);
    if integrity {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("LEGINET_LOG", "info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    if let Some(jobs) = cli.opts.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            log::error!("cannot start {jobs} worker threads: {e}");
            return ExitCode::from(1);
        }
    }
    match stages::run(cli.command, &cli.opts) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
