//! Command-line arguments.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use copula_gof::copula::{parse_grid, Family};
use copula_gof::gof::{BootstrapRecipe, BootstrapStatistic, LevelPlan, TestConfig, ThresholdMode};
use copula_gof::wavelet::{LevelIndex, LevelSet};

#[derive(Parser)]
#[command(
    name = "copula-gof",
    version,
    about = "Adaptive Haar-wavelet goodness-of-fit tests for bivariate copulas"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Test one data set against one copula family.
    Test(TestCmd),
    /// Monte-Carlo rejection rates over null family, true family and tau.
    Power(PowerCmd),
    /// Fit families by inverting the sample Kendall tau.
    FitTau(FitTauCmd),
    /// Fit families by least squares against a linear Haar density estimate.
    FitAse(FitAseCmd),
    /// Two-sample test: do two data sets share a copula?
    Compare(CompareCmd),
    /// Write a copula sample as CSV.
    Simulate(SimulateCmd),
    /// Write a sample from a sign-randomized Haar perturbation of a copula.
    LbSample(LbSampleCmd),
}

impl Command {
    pub fn output(&self) -> OutputArgs {
        match self {
            Command::Test(a) => a.output.clone(),
            Command::Power(a) => a.output.clone(),
            Command::FitTau(a) => a.output.clone(),
            Command::FitAse(a) => a.output.clone(),
            Command::Compare(a) => a.output.clone(),
            Command::Simulate(a) => OutputArgs {
                out: a.out.clone(),
                format: Format::Json,
                threads: a.threads,
            },
            Command::LbSample(a) => OutputArgs {
                out: a.out.clone(),
                format: Format::Json,
                threads: a.threads,
            },
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ThresholdArg {
    Theoretical,
    Bootstrap,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum RecipeArg {
    SdGauss,
    Quantile,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum StatisticArg {
    RerunInfimum,
    FixedFit,
}

#[derive(Args, Clone)]
pub struct OutputArgs {
    /// Output file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Worker threads (0: all cores).
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Args)]
pub struct TestArgs {
    /// Resolution levels `a,b,c`, or `auto:q` for the theoretical window of regularity q.
    #[arg(long, default_value = "1,2,3")]
    pub levels: String,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value = "bootstrap")]
    pub threshold_mode: ThresholdArg,
    /// Constant of the theoretical threshold.
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    #[arg(long, default_value_t = 20)]
    pub n_boot: usize,
    #[arg(long, value_enum, default_value = "sd-gauss")]
    pub recipe: RecipeArg,
    #[arg(long, value_enum, default_value = "rerun-infimum")]
    pub bootstrap_statistic: StatisticArg,
    /// Test each level at alpha / |J|.
    #[arg(long)]
    pub bonferroni: bool,
    /// Fraction of the sample used for the margins.
    #[arg(long, default_value_t = 0.5)]
    pub pi: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Null parameter grid `lo:step:hi` (default: tau 0.05 to 0.90 in steps of 0.05).
    #[arg(long)]
    pub grid: Option<String>,
}

impl TestArgs {
    pub fn config(&self, family: Family) -> Result<TestConfig> {
        let levels = parse_levels(&self.levels)?;
        let threshold_mode = match self.threshold_mode {
            ThresholdArg::Theoretical => ThresholdMode::Theoretical { mu: self.mu },
            ThresholdArg::Bootstrap => ThresholdMode::Bootstrap {
                n_boot: self.n_boot,
                recipe: match self.recipe {
                    RecipeArg::SdGauss => BootstrapRecipe::SdGauss,
                    RecipeArg::Quantile => BootstrapRecipe::Quantile,
                },
                statistic: match self.bootstrap_statistic {
                    StatisticArg::RerunInfimum => BootstrapStatistic::RerunInfimum,
                    StatisticArg::FixedFit => BootstrapStatistic::FixedFit,
                },
            },
        };
        let grid = self
            .grid
            .as_deref()
            .map(|g| parse_grid(family, g))
            .transpose()?;
        let config = TestConfig {
            levels,
            alpha: self.alpha,
            threshold_mode,
            split_pi: self.pi,
            seed: self.seed,
            grid,
            bonferroni: self.bonferroni,
        };
        config.validate()?;
        Ok(config)
    }
}

fn parse_levels(text: &str) -> Result<LevelPlan> {
    if let Some(q) = text.strip_prefix("auto:") {
        let q = q
            .parse()
            .map_err(|_| anyhow!("invalid regularity order in '{text}'"))?;
        return Ok(LevelPlan::Theoretical { q });
    }
    let levels = text
        .split(',')
        .map(|s| {
            let j: u32 = s
                .trim()
                .parse()
                .map_err(|_| anyhow!("invalid level '{s}'"))?;
            Ok(LevelIndex::new(j)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LevelPlan::Fixed {
        levels: LevelSet::new(levels)?,
    })
}

#[derive(Args)]
pub struct TestCmd {
    /// Two-column CSV file.
    #[arg(long)]
    pub data: PathBuf,
    /// Null copula family.
    #[arg(long)]
    pub family: String,
    #[command(flatten)]
    pub test: TestArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args)]
pub struct PowerCmd {
    /// Null families, comma-separated, or `study` for the five study families.
    #[arg(long, default_value = "study")]
    pub family: String,
    /// Families the data are drawn from.
    #[arg(long, default_value = "study")]
    pub true_family: String,
    /// Kendall tau of the data-generating copulas.
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75")]
    pub tau: Vec<f64>,
    #[arg(long, default_value_t = 1024)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub n_mc: usize,
    /// Use n = 2048 and 500 replications.
    #[arg(long)]
    pub paper_scale: bool,
    /// Reference value shown next to a cell, `h0:true:tau=value` (repeatable).
    #[arg(long)]
    pub reference: Vec<String>,
    #[command(flatten)]
    pub test: TestArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub struct Reference {
    pub h0: Family,
    pub true_family: Family,
    pub tau: f64,
    pub value: f64,
}

pub fn parse_references(items: &[String]) -> Result<Vec<Reference>> {
    items
        .iter()
        .map(|item| {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| anyhow!("reference '{item}' lacks '='"))?;
            let parts: Vec<&str> = key.split(':').collect();
            let [h0, tf, tau] = parts.as_slice() else {
                bail!("reference '{item}' is not of the form h0:true:tau=value");
            };
            Ok(Reference {
                h0: h0.parse()?,
                true_family: tf.parse()?,
                tau: tau.parse()?,
                value: value.parse()?,
            })
        })
        .collect()
}

#[derive(Args)]
pub struct FitTauCmd {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "study")]
    pub family: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args)]
pub struct FitAseCmd {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "study")]
    pub family: String,
    #[arg(long)]
    pub grid: Option<String>,
    /// Level of the linear benchmark estimate.
    #[arg(long, default_value_t = copula_gof::experiments::DEFAULT_ASE_LEVEL)]
    pub level: u32,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args)]
pub struct CompareCmd {
    /// Four-column CSV of paired samples, or the first two-column sample.
    #[arg(long)]
    pub data: PathBuf,
    /// Second two-column sample.
    #[arg(long)]
    pub data2: Option<PathBuf>,
    #[command(flatten)]
    pub test: TestArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args)]
pub struct SpecArgs {
    #[arg(long)]
    pub family: String,
    /// Kendall tau of the copula.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Copula parameter (overrides --tau).
    #[arg(long)]
    pub param: Option<f64>,
}

#[derive(Args)]
pub struct SimulateCmd {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, default_value_t = 1024)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Args)]
pub struct LbSampleCmd {
    /// Base copula.
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Perturbation level j.
    #[arg(long, default_value_t = 2)]
    pub level: u32,
    /// Smoothness s (at least 1/2).
    #[arg(long, default_value_t = 1.0)]
    pub s: f64,
    /// Smoothness ball radius M.
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    /// Amplitude constant C1.
    #[arg(long, default_value_t = 0.1)]
    pub c1: f64,
    #[arg(long, default_value_t = 1024)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV output for the points (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file for amplitude, distance and signs (default: standard error).
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}
