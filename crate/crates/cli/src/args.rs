use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cloudburst::advisor::{NodeSizes, Policy};
use cloudburst::assets::MemoryConfig;
use cloudburst::cost::Billing;
use cloudburst::logstore::LOG_PATH_ENV;
use cloudburst::profile::TimeUnit;

#[derive(Debug, Parser)]
#[command(name = "cloudburst", version, about = "Decide whether HPC jobs run on-premise or in the cloud")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// More detail on stderr (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a power-law profile to timing observations.
    FitProfile(FitProfileArgs),
    /// Fit the hourly-rate slope of a price table.
    FitCost(FitCostArgs),
    /// Recommend where to run a job under a deadline or a budget.
    Advise(AdviseArgs),
    /// Sweep deadlines, budgets, overheads and price ratios.
    Sweep(SweepArgs),
    /// Measure how decisions change when profiles mis-state processor counts.
    Sensitivity(SensitivityArgs),
    /// Append one execution record to the log.
    LogAppend(LogAppendArgs),
    /// Fit a profile to the logged runs of one environment.
    Refit(RefitArgs),
}

#[derive(Debug, Args)]
pub struct FitProfileArgs {
    /// CSV with columns processors,elapsed[,unit].
    #[arg(long)]
    pub observations: PathBuf,
    /// Unit of rows without one, and of the fitted profile.
    #[arg(long)]
    pub unit: Option<TimeUnit>,
    /// Write the profile TOML here as well as to stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
#[allow(clippy::enum_variant_names)]
pub enum Memory {
    #[value(name = "1gb")]
    OneGb,
    #[value(name = "2gb")]
    TwoGb,
    #[value(name = "4gb")]
    FourGb,
}

impl From<Memory> for MemoryConfig {
    fn from(m: Memory) -> Self {
        match m {
            Memory::OneGb => MemoryConfig::OneGb,
            Memory::TwoGb => MemoryConfig::TwoGb,
            Memory::FourGb => MemoryConfig::FourGb,
        }
    }
}

#[derive(Debug, Args)]
pub struct FitCostArgs {
    /// CSV with columns cores,cost_per_hour.
    #[arg(long, conflicts_with = "memory")]
    pub prices: Option<PathBuf>,
    /// Bundled price table to fit.
    #[arg(long, value_enum)]
    pub memory: Option<Memory>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BillingArg {
    Continuous,
    HourCeiling,
}

impl From<BillingArg> for Billing {
    fn from(b: BillingArg) -> Self {
        match b {
            BillingArg::Continuous => Billing::Continuous,
            BillingArg::HourCeiling => Billing::HourCeiling,
        }
    }
}

#[derive(Debug, Args)]
pub struct AdviseArgs {
    /// deadline or budget.
    #[arg(long)]
    pub policy: Policy,
    /// Deadline, in --unit (hours by default).
    #[arg(long)]
    pub deadline: Option<f64>,
    /// Budget in currency.
    #[arg(long)]
    pub budget: Option<f64>,
    /// Expected queue wait on the local cluster, in --unit.
    #[arg(long, default_value_t = 0.0)]
    pub queue_time: f64,
    /// Cloud provisioning time, in --unit.
    #[arg(long, default_value_t = 0.0)]
    pub setup_time: f64,
    /// Local hourly price as a multiple of the cloud price.
    #[arg(long, default_value_t = 1.0)]
    pub price_ratio: f64,
    /// Unit of --deadline, --queue-time and --setup-time.
    #[arg(long, default_value = "hours")]
    pub unit: TimeUnit,
    /// TOML with environment settings (profiles, alpha, node sizes, billing flags).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub local_profile: Option<PathBuf>,
    #[arg(long)]
    pub cloud_profile: Option<PathBuf>,
    /// Cloud price table to fit alpha from.
    #[arg(long, conflicts_with = "memory")]
    pub prices: Option<PathBuf>,
    /// Bundled cloud price table.
    #[arg(long, value_enum)]
    pub memory: Option<Memory>,
    /// Node sizes on the local cluster, e.g. 1-200 or 1,2,4.
    #[arg(long)]
    pub local_nodes: Option<NodeSizes>,
    #[arg(long)]
    pub cloud_nodes: Option<NodeSizes>,
    #[arg(long, value_enum, default_value = "continuous")]
    pub billing: BillingArg,
    /// Write the recommendation TOML here as well as to stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Sweep config TOML; the built-in 28,000-point grid when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Seed of the random baseline (overrides the config).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Accept grids outside the evaluated ranges.
    #[arg(long)]
    pub allow_out_of_range: bool,
}

#[derive(Debug, Args)]
pub struct SensitivityArgs {
    #[command(flatten)]
    pub sweep: SweepArgs,
    /// Injected relative errors, each in [-0.9, 1.0].
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub errors: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct LogArgs {
    /// Execution log file.
    #[arg(long, env = LOG_PATH_ENV)]
    pub log: PathBuf,
}

#[derive(Debug, Args)]
pub struct LogAppendArgs {
    #[command(flatten)]
    pub log: LogArgs,
    #[arg(long)]
    pub environment: String,
    #[arg(long)]
    pub processors: u32,
    #[arg(long)]
    pub elapsed: f64,
    #[arg(long, default_value = "hours")]
    pub unit: TimeUnit,
    /// RFC 3339 time of the run; now when omitted.
    #[arg(long)]
    pub timestamp: Option<String>,
    #[arg(long)]
    pub tag: Option<String>,
}

#[derive(Debug, Args)]
pub struct RefitArgs {
    #[command(flatten)]
    pub log: LogArgs,
    #[arg(long)]
    pub environment: String,
    /// Unit of the fitted profile.
    #[arg(long, default_value = "hours")]
    pub unit: TimeUnit,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}
