use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use structinfo::conservation::{GapMode, DEFAULT_COVERAGE_THRESHOLD};
use structinfo::io::newick::BranchLengths;
use structinfo::linear::SampleDistribution;

use crate::output::LogBase;

/// Structure-sensitive entropy, coding and conservation scores.
///
/// Results are printed as JSON on standard output. All values are computed
/// in bits; `--log-base` (or STRUCTINFO_LOG_BASE) only changes how
/// information quantities are displayed.
#[derive(Debug, Parser)]
#[command(name = "structinfo", version)]
pub struct Cli {
    /// Base for displayed information quantities.
    #[arg(
        long,
        global = true,
        env = "STRUCTINFO_LOG_BASE",
        value_enum,
        default_value = "2"
    )]
    pub log_base: LogBase,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ultrametric entropy H_U of a distribution on the leaves of a tree.
    Hu(HuArgs),
    /// Structure-sensitive entropy H_S of a distribution under a partition structure.
    Hs(HsArgs),
    /// Joint, conditional and mutual H_S of a joint distribution.
    Notions(NotionsArgs),
    /// The letter distance matrix of a partition structure, as CSV.
    Distance(DistanceArgs),
    /// Optimize a binary code tree for an ultrametric distance.
    Code(CodeArgs),
    /// Seeded random trials of the bound mu_U <= H_U + 1 for optimized codes.
    Trials(TrialsArgs),
    /// Entropy of points on the real line.
    Itr {
        #[command(subcommand)]
        command: ItrCommand,
    },
    /// Typical sets of IID sequences, counted exactly.
    Sequences(SequencesArgs),
    /// Per-column conservation scores of an amino-acid alignment, as CSV.
    Conserve(ConserveArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum LengthsArg {
    /// Branch lengths are half the height difference they span.
    #[default]
    Arc,
    /// Branch lengths are height differences.
    Height,
}

impl From<LengthsArg> for BranchLengths {
    fn from(l: LengthsArg) -> Self {
        match l {
            LengthsArg::Arc => BranchLengths::Arc,
            LengthsArg::Height => BranchLengths::LValue,
        }
    }
}

#[derive(Debug, Args)]
pub struct TreeArgs {
    /// Ultrametric tree in Newick format.
    #[arg(long, required_unless_present = "matrix", conflicts_with = "matrix")]
    pub tree: Option<PathBuf>,
    /// Ultrametric distance matrix as CSV (header row of letters, leading letter column).
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// How Newick branch lengths relate to node heights.
    #[arg(long, value_enum, default_value = "arc")]
    pub lengths: LengthsArg,
}

#[derive(Debug, Args)]
pub struct HuArgs {
    #[command(flatten)]
    pub tree: TreeArgs,
    /// Distribution JSON: {"alphabet": [...], "probs": [...]}.
    #[arg(long)]
    pub probs: PathBuf,
    /// Rescale probabilities that do not sum to one.
    #[arg(long)]
    pub renormalize: bool,
}

#[derive(Debug, Args)]
pub struct HsArgs {
    /// Distribution JSON.
    #[arg(long)]
    pub probs: PathBuf,
    /// Partition structure JSON: {"alphabet": [...], "partitions": [{"measure": m, "components": [[...], ...]}]}.
    #[arg(long)]
    pub structure: PathBuf,
    /// A second distribution; reports the structure-sensitive relative entropy to it.
    #[arg(long)]
    pub against: Option<PathBuf>,
    /// Comma-separated letters of one side of a split; reports its concordance distance.
    #[arg(long)]
    pub split_left: Option<String>,
    /// The other side of the split (default: the remaining letters).
    #[arg(long, requires = "split_left")]
    pub split_right: Option<String>,
    #[arg(long)]
    pub renormalize: bool,
}

#[derive(Debug, Args)]
pub struct NotionsArgs {
    /// Joint distribution JSON: {"rows": [...], "cols": [...], "probs": [[...], ...]}.
    #[arg(long)]
    pub joint: PathBuf,
    /// Structure on the row alphabet (default: the traditional structure).
    #[arg(long)]
    pub structure_a: Option<PathBuf>,
    /// Structure on the column alphabet (default: the traditional structure).
    #[arg(long)]
    pub structure_b: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    /// Partition structure JSON.
    #[arg(long)]
    pub structure: PathBuf,
    /// Write the CSV here and print a JSON summary instead.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CodeArgs {
    #[command(flatten)]
    pub tree: TreeArgs,
    /// Distribution JSON.
    #[arg(long)]
    pub probs: PathBuf,
    /// Also report the exact optimum (at most 16 letters).
    #[arg(long)]
    pub exact: bool,
    /// Partition structure JSON; reports the ESSCL of the optimized code.
    #[arg(long)]
    pub structure: Option<PathBuf>,
    #[arg(long)]
    pub renormalize: bool,
}

#[derive(Debug, Args)]
pub struct TrialsArgs {
    #[arg(long, default_value_t = 10_000)]
    pub count: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Smallest alphabet size.
    #[arg(long, default_value_t = 3)]
    pub n_min: usize,
    /// Largest alphabet size.
    #[arg(long, default_value_t = 50)]
    pub n_max: usize,
    /// Directory receiving one replayable JSON file per violating instance.
    #[arg(long, default_value = "trial-violations")]
    pub violations_dir: PathBuf,
    /// Write one CSV row per instance here.
    #[arg(long)]
    pub instances_csv: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DistArg {
    Uniform,
    Normal,
}

impl From<DistArg> for SampleDistribution {
    fn from(d: DistArg) -> Self {
        match d {
            DistArg::Uniform => SampleDistribution::Uniform,
            DistArg::Normal => SampleDistribution::Normal,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum ItrCommand {
    /// H_R of weighted points: {"points": [...], "probs": [...], "against": [...]}.
    /// Without probs every point weighs the same; repeated points are merged.
    Entropy {
        #[arg(long)]
        input: PathBuf,
    },
    /// Joint, conditional and mutual H_R: {"points_a": [...], "points_b": [...], "probs": [[...], ...]}.
    Joint {
        #[arg(long)]
        input: PathBuf,
    },
    /// Evaluate the expected orderings of H_R at each perturbation size.
    Expectations {
        #[arg(long, num_args = 1.., required = true)]
        epsilon: Vec<f64>,
    },
    /// Correlation between H_R and the standard deviation over random samples.
    Correlation {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 50)]
        points: usize,
        #[arg(long, value_enum, default_value = "uniform")]
        dist: DistArg,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// The limit of H_R for the uniform distribution on [0, 1].
    UniformLimit {
        /// Integration step.
        #[arg(long, default_value_t = 1e-4)]
        step: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Letters,
    Partitions,
    Structured,
    Reduced,
}

#[derive(Debug, Args)]
pub struct SequencesArgs {
    /// Distribution JSON.
    #[arg(long)]
    pub probs: PathBuf,
    /// Partition structure JSON (normalized).
    #[arg(long)]
    pub structure: Option<PathBuf>,
    /// Sequence length N.
    #[arg(long)]
    pub length: usize,
    #[arg(long)]
    pub epsilon: f64,
    /// Symbols of the sequences (default: structured with --structure, letters otherwise).
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    /// Partition used by --kind reduced.
    #[arg(long, default_value_t = 0)]
    pub partition_index: usize,
    /// Also group typical letter sequences into equivalence classes.
    #[arg(long)]
    pub classes: bool,
    /// Estimate by sampling this many sequences instead of enumerating.
    #[arg(long)]
    pub estimate: Option<usize>,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long)]
    pub renormalize: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum GapModeArg {
    #[default]
    Skip,
    ExtraLetter,
}

impl From<GapModeArg> for GapMode {
    fn from(g: GapModeArg) -> Self {
        match g {
            GapModeArg::Skip => GapMode::Skip,
            GapModeArg::ExtraLetter => GapMode::ExtraLetter,
        }
    }
}

#[derive(Debug, Args)]
pub struct ConserveArgs {
    /// Alignment in FASTA or Stockholm format.
    #[arg(long)]
    pub aln: PathBuf,
    /// Ultrametric tree over the 20 amino acids, in Newick format.
    #[arg(long)]
    pub tree: PathBuf,
    #[arg(long, value_enum, default_value = "arc")]
    pub lengths: LengthsArg,
    #[arg(long, value_enum, default_value = "skip")]
    pub gap_mode: GapModeArg,
    /// Columns with a smaller non-gap fraction are flagged.
    #[arg(long, default_value_t = DEFAULT_COVERAGE_THRESHOLD)]
    pub coverage_threshold: f64,
    /// Write the CSV here and print a JSON summary instead.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
