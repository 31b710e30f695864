use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use swaysim::choice::{Polarity, PRESET_LABELS};

#[derive(Debug, Parser)]
#[command(
    name = "swaysim",
    version,
    about = "Fit and simulate two-option choices under crowd and friend influence"
)]
pub struct Cli {
    /// Master random seed.
    #[arg(long, global = true, env = "SWAYSIM_SEED", default_value_t = 1)]
    pub seed: u64,

    /// Worker threads for ensembles (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the choice logit to a CSV of observations.
    Fit(FitArgs),
    /// Probability of choosing option 1 for one pair of options.
    Predict(PredictArgs),
    /// Order any number of options by attractiveness.
    Rank(RankArgs),
    /// Write sample paths of the market-share process.
    Simulate(SimulateArgs),
    /// Ensembles over a grid of sigma and theta values.
    Sweep(SweepArgs),
    /// Load a graph and check its structure.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Built-in coefficients.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(PRESET_LABELS), conflicts_with_all = ["alpha_s", "alpha_f"])]
    pub preset: Option<String>,

    /// Stars coefficient; requires --alpha-f.
    #[arg(long, requires = "alpha_f", allow_hyphen_values = true)]
    pub alpha_s: Option<f64>,

    /// Friends coefficient; requires --alpha-s.
    #[arg(long, requires = "alpha_s", allow_hyphen_values = true)]
    pub alpha_f: Option<f64>,
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct GraphArgs {
    /// GML file, or an edge list (any other extension).
    #[arg(long)]
    pub graph: Option<PathBuf>,

    /// Generate a preferential-attachment graph instead: `NODES,EDGES_PER_NODE`.
    #[arg(long, value_parser = parse_power_law)]
    pub power_law: Option<(usize, usize)>,
}

#[derive(Debug, Clone, Args)]
pub struct DynamicsArgs {
    /// Rating standard deviation.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,

    /// Recommendation threshold; a rating strictly above it recommends.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub theta: f64,

    /// Initial stars of option 1.
    #[arg(long, default_value_t = 4.0)]
    pub s1: f64,

    /// Initial stars of option 2.
    #[arg(long, default_value_t = 2.0)]
    pub s2: f64,

    /// Pseudo-ratings the initial stars count as.
    #[arg(long, default_value_t = 1)]
    pub prior_weight: u32,

    /// Keep ratings unclamped instead of clipping to [1, 5].
    #[arg(long)]
    pub no_clamp: bool,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Observations CSV: question_id,delta_stars,delta_friends,chose_1[,gender,age,edu].
    #[arg(long)]
    pub input: PathBuf,

    /// Write the fit JSON here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,

    /// Also run leave-one-question-out cross-validation and write its table here.
    #[arg(long)]
    pub cv: Option<PathBuf>,

    /// Add gender, age and education interactions with both predictors.
    #[arg(long)]
    pub interactions: bool,

    /// Include an intercept column.
    #[arg(long)]
    pub intercept: bool,

    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,

    #[arg(long, default_value_t = 100)]
    pub max_iterations: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PolarityArg {
    Positive,
    Negative,
}

impl From<PolarityArg> for Polarity {
    fn from(p: PolarityArg) -> Self {
        match p {
            PolarityArg::Positive => Polarity::Positive,
            PolarityArg::Negative => Polarity::Negative,
        }
    }
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    #[arg(long)]
    pub s1: f64,
    #[arg(long)]
    pub s2: f64,
    #[arg(long)]
    pub f1: u32,
    #[arg(long)]
    pub f2: u32,

    /// Whether friend counts are recommendations or warnings. Defaults to the
    /// polarity the preset was fitted on, else positive.
    #[arg(long, value_enum)]
    pub polarity: Option<PolarityArg>,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    /// `LABEL=STARS,FRIENDS`; repeat for every option.
    #[arg(long = "option", value_name = "LABEL=STARS,FRIENDS", value_parser = parse_option, required = true)]
    pub options: Vec<(String, f64, u32)>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub graph: GraphArgs,

    #[command(flatten)]
    pub model: ModelArgs,

    #[command(flatten)]
    pub dynamics: DynamicsArgs,

    /// Number of sample paths.
    #[arg(long, default_value_t = 1)]
    pub paths: usize,

    /// Directory for `path_<i>.csv` and `path_<i>.json`.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub graph: GraphArgs,

    #[command(flatten)]
    pub model: ModelArgs,

    #[command(flatten)]
    pub dynamics: DynamicsArgs,

    /// Sigma values to sweep, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub sigmas: Vec<f64>,

    /// Theta values to sweep, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub thetas: Vec<f64>,

    /// Runs per cell.
    #[arg(long, default_value_t = swaysim::montecarlo::DEFAULT_RUNS)]
    pub runs: usize,

    #[arg(long, default_value_t = swaysim::montecarlo::DEFAULT_BINS)]
    pub bins: usize,

    /// Spacing of the grid the dominance test evaluates CDFs on.
    #[arg(long, default_value_t = swaysim::montecarlo::DEFAULT_GRID_STEP)]
    pub grid_step: f64,

    /// CDF slack allowed by the dominance test.
    #[arg(long, default_value_t = swaysim::montecarlo::DEFAULT_TOLERANCE)]
    pub tolerance: f64,

    /// Directory for per-cell CSVs and `summary.json`.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub graph: GraphArgs,

    #[arg(long)]
    pub expect_nodes: Option<usize>,

    #[arg(long)]
    pub expect_edges: Option<usize>,
}

fn parse_power_law(s: &str) -> Result<(usize, usize), String> {
    let (n, m) = s.split_once(',').ok_or("expected NODES,EDGES_PER_NODE")?;
    let n = n.trim().parse().map_err(|e| format!("nodes: {e}"))?;
    let m = m.trim().parse().map_err(|e| format!("edges per node: {e}"))?;
    Ok((n, m))
}

fn parse_option(s: &str) -> Result<(String, f64, u32), String> {
    let (label, rest) = s.split_once('=').ok_or("expected LABEL=STARS,FRIENDS")?;
    let (stars, friends) = rest.split_once(',').ok_or("expected LABEL=STARS,FRIENDS")?;
    let stars = stars.trim().parse().map_err(|e| format!("stars: {e}"))?;
    let friends = friends.trim().parse().map_err(|e| format!("friends: {e}"))?;
    Ok((label.trim().to_string(), stars, friends))
}
