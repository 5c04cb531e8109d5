//! `cwsim` — graded word-similarity-in-context pipeline driver.

mod cache;
mod commands;
mod config;
mod error;
mod pipeline;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::Settings;
use crate::error::CmdError;

/// One optional flag per configuration key. Values are plain strings
/// funneled through [`Settings::apply`], so flag parsing and config-file
/// parsing share one code path (and one set of error messages).
#[derive(Args, Debug, Default)]
struct Overrides {
    /// Lexicon manifest TSV (path, scale_max, source per line).
    #[arg(long, global = true, value_name = "PATH")]
    manifest: Option<String>,
    /// Directory holding the eight WordNet 3.0 database files.
    #[arg(long, global = true, value_name = "DIR")]
    wordnet_dir: Option<String>,
    /// Plain-text corpus for information-content counts.
    #[arg(long, global = true, value_name = "PATH")]
    corpus: Option<String>,
    /// GWSC instance file (word1, word2, context1, context2 per line).
    #[arg(long, global = true, value_name = "PATH")]
    gwsc: Option<String>,
    /// Gold predictions-format TSV for `evaluate`.
    #[arg(long, global = true, value_name = "PATH")]
    gold: Option<String>,
    /// Opening marker around target words in contexts.
    #[arg(long, global = true, value_name = "STR")]
    marker_open: Option<String>,
    /// Closing marker around target words in contexts.
    #[arg(long, global = true, value_name = "STR")]
    marker_close: Option<String>,
    /// Transitive-closure passes over the similarity store.
    #[arg(long, global = true, value_name = "N")]
    passes: Option<String>,
    /// Add-k smoothing for information-content counts.
    #[arg(long, global = true, value_name = "K")]
    smoothing: Option<String>,
    /// Master random seed (64-bit).
    #[arg(long, global = true, value_name = "N")]
    seed: Option<String>,
    /// Cross-validation fold count.
    #[arg(long, global = true, value_name = "N")]
    folds: Option<String>,
    /// Number of top-ranked models averaged into each prediction.
    #[arg(long, global = true, value_name = "N")]
    top_k: Option<String>,
    /// Worker threads for feature extraction (1 = serial).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<String>,
    /// Ridge penalty grid, comma-separated.
    #[arg(long, global = true, value_name = "LIST")]
    ridge_lambdas: Option<String>,
    /// Feature-selection sizes, comma-separated.
    #[arg(long, global = true, value_name = "LIST")]
    fs_k: Option<String>,
    /// PLS component counts, comma-separated.
    #[arg(long, global = true, value_name = "LIST")]
    pls_components: Option<String>,
    /// Tree minimum samples per leaf, comma-separated.
    #[arg(long, global = true, value_name = "LIST")]
    tree_leaf: Option<String>,
    /// Tree minimum samples per split, comma-separated.
    #[arg(long, global = true, value_name = "LIST")]
    tree_split: Option<String>,
    /// Ensemble size for trees and boosting.
    #[arg(long, global = true, value_name = "N")]
    n_estimators: Option<String>,
    /// Cache directory (also settable via CWSIM_CACHE).
    #[arg(long, global = true, value_name = "DIR")]
    cache_dir: Option<String>,
    /// Closed-store TSV path (default: <cache-dir>/store.tsv).
    #[arg(long, global = true, value_name = "PATH")]
    store_out: Option<String>,
    /// Information-content TSV path (default: <cache-dir>/ic.tsv).
    #[arg(long, global = true, value_name = "PATH")]
    ic_out: Option<String>,
    /// Feature-matrix TSV path for `extract-features`.
    #[arg(long, global = true, value_name = "PATH")]
    features_out: Option<String>,
    /// Predictions TSV path.
    #[arg(long, global = true, value_name = "PATH")]
    predictions_out: Option<String>,
    /// Saved-model JSON path (written by `train`/`score`, read by `predict`).
    #[arg(long, global = true, value_name = "PATH")]
    model_out: Option<String>,
    /// Metrics report path for `evaluate` (stdout is always printed).
    #[arg(long, global = true, value_name = "PATH")]
    report_out: Option<String>,
    /// Abort on the first unparseable instance instead of skipping it.
    #[arg(
        long,
        global = true,
        value_name = "BOOL",
        num_args = 0..=1,
        default_missing_value = "true"
    )]
    strict: Option<String>,
}

impl Overrides {
    /// Flag assignments in declaration order, for [`Settings::apply`].
    fn assignments(&self) -> Vec<(&'static str, &str)> {
        let pairs: [(&'static str, &Option<String>); 27] = [
            ("manifest", &self.manifest),
            ("wordnet-dir", &self.wordnet_dir),
            ("corpus", &self.corpus),
            ("gwsc", &self.gwsc),
            ("gold", &self.gold),
            ("marker-open", &self.marker_open),
            ("marker-close", &self.marker_close),
            ("passes", &self.passes),
            ("smoothing", &self.smoothing),
            ("seed", &self.seed),
            ("folds", &self.folds),
            ("top-k", &self.top_k),
            ("jobs", &self.jobs),
            ("ridge-lambdas", &self.ridge_lambdas),
            ("fs-k", &self.fs_k),
            ("pls-components", &self.pls_components),
            ("tree-leaf", &self.tree_leaf),
            ("tree-split", &self.tree_split),
            ("n-estimators", &self.n_estimators),
            ("cache-dir", &self.cache_dir),
            ("store-out", &self.store_out),
            ("ic-out", &self.ic_out),
            ("features-out", &self.features_out),
            ("predictions-out", &self.predictions_out),
            ("model-out", &self.model_out),
            ("report-out", &self.report_out),
            ("strict", &self.strict),
        ];
        pairs
            .iter()
            .filter_map(|(key, value)| value.as_ref().map(|v| (*key, v.as_str())))
            .collect()
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "cwsim",
    version,
    about = "Graded word similarity in context: lexicon store, WordNet \
             similarity, feature extraction, stacked regression, and \
             evaluation.",
    max_term_width = 100,
    args_override_self = true
)]
struct Cli {
    /// Flat key=value config file; flags override its entries.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Merge the manifest lexicons and apply the transitive closure.
    BuildStore,
    /// Parse WordNet and compute the information-content table.
    BuildIc,
    /// Write the feature matrix (two rows per instance) and stop.
    ExtractFeatures,
    /// Extract features, train the stacked model, write predictions.
    Score {
        /// Write the feature TSV instead of training and predicting.
        #[arg(long)]
        features_only: bool,
    },
    /// Train the stacked model and save it to --model-out.
    Train,
    /// Score a GWSC file with a previously saved model.
    Predict,
    /// Compare a predictions file against gold, aligned by id.
    Evaluate {
        /// Predictions TSV (default: the predictions-out path).
        #[arg(long, value_name = "PATH")]
        predictions: Option<PathBuf>,
    },
    /// Agreement utilities over annotator score lists.
    Agree {
        #[command(subcommand)]
        what: AgreeCommand,
    },
}

#[derive(Subcommand, Debug)]
enum AgreeCommand {
    /// IAA and RIAA rank-agreement tau between two score columns.
    Tau {
        /// First score list, one number per line.
        a: PathBuf,
        /// Second score list, one number per line.
        b: PathBuf,
    },
    /// Best-worst-scaling scores from `best TAB worst TAB annotations` lines.
    Bws {
        /// Tally file, one item per line.
        tallies: PathBuf,
    },
}

fn build_settings(cli: &Cli) -> Result<Settings, CmdError> {
    let mut settings = Settings::default();
    if let Some(config) = &cli.config {
        settings.apply_file(config)?;
    }
    settings.apply_env();
    for (key, value) in cli.overrides.assignments() {
        settings.apply(key, value)?;
    }
    Ok(settings)
}

fn execute(cli: Cli) -> Result<(), CmdError> {
    let settings = build_settings(&cli)?;

    // One global pool sized by --jobs; extraction is the only parallel
    // stage and its indexed collect keeps results ordered, so thread
    // count never changes output bytes.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(settings.jobs.max(1))
        .build_global();

    match &cli.command {
        Command::BuildStore => commands::cmd_build_store(&settings),
        Command::BuildIc => commands::cmd_build_ic(&settings),
        Command::ExtractFeatures => commands::cmd_score(&settings, true),
        Command::Score { features_only } => commands::cmd_score(&settings, *features_only),
        Command::Train => commands::cmd_train(&settings),
        Command::Predict => commands::cmd_predict(&settings),
        Command::Evaluate { predictions } => {
            commands::cmd_evaluate(&settings, predictions.as_deref())
        }
        Command::Agree { what } => match what {
            AgreeCommand::Tau { a, b } => commands::cmd_agree_tau(&settings, a, b),
            AgreeCommand::Bws { tallies } => commands::cmd_agree_bws(tallies),
        },
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version print to stdout and exit 0; real parse
            // errors go to stderr with the usage exit code.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match execute(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("cwsim: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
