//! Command line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "tvor",
    version,
    about = "Rank histograms by discrete-total-variation smoothness outliers and run the \
             accompanying bias, data-quality and Monte Carlo diagnostics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Options every subcommand accepts.
#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// JSON config file; absent fields keep their documented defaults
    #[arg(long, value_name = "PATH", global = false)]
    pub config: Option<PathBuf>,
    /// RNG seed (overrides the config file and the TVOR_SEED variable)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the report here instead of stdout
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Report format: json (default) or csv
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Fit the expected-DTV model m = a*N + b*sqrt(N) on a histogram CSV
    Fit(FitArgs),
    /// Score one list against the model fitted on the whole dataset
    Score(ScoreArgs),
    /// Fit, score and rank every list by |d'|
    Rank(RankArgs),
    /// Score-vs-size diagnostics: correlation and regression lines, optional
    /// debias, largest-subset slope and the demonstrative renormalization
    Bias(BiasArgs),
    /// Re-run the ranking once per unique list size, dropping smaller lists
    Sweep(SweepArgs),
    /// Interquartile-range outlier labeling of the |d'| scores
    Iqr(IqrArgs),
    /// Pearson chi-square against the uniform distribution, with count scaling
    Chisq(ChisqArgs),
    /// Whipple's index of birth years over a configurable age window
    Whipple(WhippleArgs),
    /// Last-digit profiles of birth years
    Digits(DigitsArgs),
    /// Replace stated birth years by their closest recorded alternatives
    Substitute(SubstituteArgs),
    /// Partition records by an attribute and compare the two sides
    Split(SplitArgs),
    /// Synthetic data: datasets, convergence curves, expected-DTV estimates
    /// and the near-uniform chi-square fixture
    Simulate(SimulateArgs),
    /// Remove named lists from a dataset
    Exclude(ExcludeArgs),
    /// Render a block of an existing JSON report as an SVG or CSV artifact
    Plot(PlotArgs),
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// Histogram CSV (list_id,year,count)
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,
    /// raw_ols or normalized_ols
    #[arg(long)]
    pub mode: Option<String>,
    /// Drop lists smaller than this at load
    #[arg(long)]
    pub min_size: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct ScoreArgs {
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,
    /// Label of the list to score
    #[arg(long)]
    pub list: String,
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub min_size: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct RankArgs {
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub min_size: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct BiasArgs {
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub min_size: Option<u64>,
    /// Run the iterative additive debias and report its coefficients
    #[arg(long)]
    pub debias: bool,
    /// Also fit |d'| vs N on the K largest lists
    #[arg(long, value_name = "K")]
    pub largest: Option<usize>,
    /// Include the critiqued division renormalization (demonstration only)
    #[arg(long)]
    pub renormalize_demo: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub min_size: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct IqrArgs {
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub min_size: Option<u64>,
    /// Restrict to the K largest lists before the quartile computation
    #[arg(long, value_name = "K")]
    pub top: Option<usize>,
    /// Fence multiplier (default 1.5)
    #[arg(long)]
    pub multiplier: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct ChisqArgs {
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,
    /// Single list to test (default: all lists)
    #[arg(long)]
    pub list: Option<String>,
    /// Comma-separated count multipliers, e.g. 1,2,4,8
    #[arg(long, default_value = "1")]
    pub scale: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct WhippleArgs {
    /// Histogram CSV input
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Record CSV input
    #[arg(long, value_name = "PATH")]
    pub records: Option<PathBuf>,
    /// Single list to analyze (default: all)
    #[arg(long)]
    pub list: Option<String>,
    /// Year at which ages are computed (default 1945)
    #[arg(long)]
    pub reference_year: Option<i64>,
    /// Age window LO:HI, length a multiple of 5 (default 23:62)
    #[arg(long)]
    pub window: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct DigitsArgs {
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub records: Option<PathBuf>,
    #[arg(long)]
    pub list: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct SubstituteArgs {
    #[arg(long, value_name = "PATH")]
    pub records: PathBuf,
    /// Restrict the substitution to one list
    #[arg(long)]
    pub list: Option<String>,
    /// Write the substituted record set to this CSV
    #[arg(long, value_name = "PATH")]
    pub write_records: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct SplitArgs {
    #[arg(long, value_name = "PATH")]
    pub records: PathBuf,
    /// Attribute name (e.g. death_year)
    #[arg(long)]
    pub key: String,
    /// Attribute value selecting the matching side
    #[arg(long)]
    pub value: String,
    /// Histogram CSV to augment with each side separately, reporting the
    /// resulting scores
    #[arg(long, value_name = "PATH")]
    pub augment: Option<PathBuf>,
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub min_size: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(subcommand)]
    pub what: SimulateCmd,
}

#[derive(Subcommand, Debug)]
pub enum SimulateCmd {
    /// Sample a dataset from a JSON generator spec
    Dataset {
        /// Generator spec: {"min_size_filter": .., "histograms": [{label,
        /// size, alpha, beta, bins, origin, heap_fraction}, ..]}
        #[arg(long, value_name = "PATH")]
        spec: PathBuf,
        /// Also write the sampled dataset as a histogram CSV
        #[arg(long, value_name = "PATH")]
        out_data: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Glivenko-Cantelli convergence curve for a discretized beta
    Gc {
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long, default_value_t = 3.0)]
        beta: f64,
        #[arg(long, default_value_t = 50)]
        bins: usize,
        /// Comma-separated ascending sample sizes
        #[arg(long, default_value = "100,1000,10000,100000,1000000")]
        sizes: String,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo estimate of the expected DTV at one sample size
    ExpectedDtv {
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long, default_value_t = 3.0)]
        beta: f64,
        #[arg(long, default_value_t = 50)]
        bins: usize,
        #[arg(long)]
        size: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[command(flatten)]
        common: Common,
    },
    /// The near-uniform fixture for the chi-square scaling demonstration
    NearUniform {
        #[arg(long, default_value_t = 5000)]
        total: u64,
        #[arg(long, default_value_t = 8)]
        bins: usize,
        /// Ripple amplitude as a fraction of the per-bin base
        #[arg(long, default_value_t = 0.01)]
        ripple: f64,
        #[arg(long, value_name = "PATH")]
        out_data: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

impl SimulateCmd {
    pub fn common(&self) -> &Common {
        match self {
            SimulateCmd::Dataset { common, .. }
            | SimulateCmd::Gc { common, .. }
            | SimulateCmd::ExpectedDtv { common, .. }
            | SimulateCmd::NearUniform { common, .. } => common,
        }
    }
}

#[derive(Args, Debug)]
pub struct ExcludeArgs {
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,
    /// Comma-separated labels to remove
    #[arg(long)]
    pub labels: Option<String>,
    /// File with one label per line
    #[arg(long, value_name = "PATH")]
    pub labels_file: Option<PathBuf>,
    /// Refit and rank the remaining lists
    #[arg(long)]
    pub rank: bool,
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub min_size: Option<u64>,
    /// Write the reduced dataset as a histogram CSV
    #[arg(long, value_name = "PATH")]
    pub out_data: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct PlotArgs {
    /// JSON report produced by another subcommand
    #[arg(long, value_name = "PATH")]
    pub report: PathBuf,
    /// dtv-vs-n | digit-profile | sweep-table | gc-curve
    #[arg(long)]
    pub kind: String,
    /// Artifact path; .svg or .csv decides the format
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    /// Label filter for digit-profile plots
    #[arg(long)]
    pub label: Option<String>,
    #[command(flatten)]
    pub common: Common,
}
