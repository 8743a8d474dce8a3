//! The adaptive test: per-level infimum statistics, their critical values
//! and the reject/accept decision, plus the two-sample comparison test.

use std::time::Duration;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::copula::{
    param_to_tau, sample, scaling_coeffs, tau_to_param, CopulaSpec, Family, ParameterGrid,
};
use crate::empirical::{
    kendall_tau_empirical, pseudo_observations, split_sample, split_sizes, BivariateSample,
    PseudoSample,
};
use crate::error::{Error, Result};
use crate::parallel::map_indexed;
use crate::rng::{label, stream, stream_key};
use crate::special::normal_quantile;
use crate::ustat::{
    infimum_over_tables, two_sample_cells_of, two_sample_value_swapped, CellHistogram,
};
use crate::wavelet::{theoretical_level_set, CoefficientTable, LevelIndex, LevelSet, LevelWindow};

/// Smallest data set accepted by the tests.
pub const MIN_TEST_SIZE: usize = 32;

/// Where the resolution levels come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LevelPlan {
    Fixed {
        levels: LevelSet,
    },
    /// The level window of the sample sizes for scaling-function regularity `q`.
    Theoretical {
        q: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BootstrapRecipe {
    /// `mean + z_{1-α} · sd` of the bootstrap statistics.
    SdGauss,
    /// Empirical `(1 - α)` quantile, the `⌈(1 - α)(B + 1)⌉`-th smallest replicate.
    Quantile,
}

/// Which statistic each bootstrap replicate computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BootstrapStatistic {
    /// Full pipeline including the infimum over the grid.
    RerunInfimum,
    /// `T̃_j(λ̂)` at the fitted parameter only.
    FixedFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ThresholdMode {
    /// `t_j = 3 μ (2^j / n2) √(ln ln n2)`.
    Theoretical { mu: f64 },
    Bootstrap {
        n_boot: usize,
        recipe: BootstrapRecipe,
        statistic: BootstrapStatistic,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    pub levels: LevelPlan,
    pub alpha: f64,
    pub threshold_mode: ThresholdMode,
    pub split_pi: f64,
    pub seed: u64,
    /// Parameter grid of the null family; `None` uses [`ParameterGrid::default_for`].
    pub grid: Option<ParameterGrid>,
    /// Test each level at `α / |J|`.
    pub bonferroni: bool,
}

impl Default for TestConfig {
    fn default() -> Self {
        TestConfig {
            levels: LevelPlan::Fixed {
                levels: LevelSet::range(1, 3).expect("valid range"),
            },
            alpha: 0.05,
            threshold_mode: ThresholdMode::Bootstrap {
                n_boot: 20,
                recipe: BootstrapRecipe::SdGauss,
                statistic: BootstrapStatistic::RerunInfimum,
            },
            split_pi: 0.5,
            seed: 0,
            grid: None,
            bonferroni: false,
        }
    }
}

impl TestConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if !(self.split_pi > 0.0 && self.split_pi < 1.0) {
            return Err(Error::Config(format!(
                "split fraction must lie in (0, 1), got {}",
                self.split_pi
            )));
        }
        match self.threshold_mode {
            ThresholdMode::Theoretical { mu } => {
                if !(mu > 0.0 && mu.is_finite()) {
                    return Err(Error::Config(format!("mu must be positive, got {mu}")));
                }
            }
            ThresholdMode::Bootstrap { n_boot, recipe, .. } => {
                check_n_boot(n_boot, recipe, self.alpha)?;
            }
        }
        if let LevelPlan::Theoretical { q } = self.levels {
            if q == 0 {
                return Err(Error::Config("regularity order q must be >= 1".into()));
            }
        }
        Ok(())
    }

    /// Same configuration with another seed.
    pub fn with_seed(&self, seed: u64) -> Self {
        TestConfig {
            seed,
            ..self.clone()
        }
    }

    fn level_alpha(&self, levels: usize) -> f64 {
        if self.bonferroni {
            self.alpha / levels as f64
        } else {
            self.alpha
        }
    }
}

fn check_n_boot(n_boot: usize, recipe: BootstrapRecipe, alpha: f64) -> Result<()> {
    let needed = match recipe {
        BootstrapRecipe::SdGauss => 2,
        BootstrapRecipe::Quantile => (1.0 / alpha - 1e-9).ceil() as usize,
    };
    if n_boot < needed {
        return Err(Error::Config(format!(
            "{recipe:?} thresholds need at least {needed} bootstrap samples, got {n_boot}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Reject,
    Accept,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelSource {
    Fixed,
    Theoretical,
    /// The theoretical window was empty; see [`practical_level_set`].
    PracticalFallback,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelOutcome {
    pub j: LevelIndex,
    pub statistic: f64,
    pub threshold: f64,
    pub exceeds: bool,
    /// Grid minimizer (one-sample test only).
    pub best_spec: Option<CopulaSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub decision: Decision,
    /// Null family; `None` for the two-sample test.
    pub h0_family: Option<Family>,
    pub per_level: Vec<LevelOutcome>,
    pub level_source: LevelSource,
    pub n: usize,
    pub n1: usize,
    pub n2: usize,
    pub tau_hat: Option<f64>,
    /// Parameter the bootstrap samples from.
    pub fitted: Option<CopulaSpec>,
    pub warnings: Vec<String>,
    pub config: TestConfig,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl TestReport {
    /// The decision agrees with the per-level exceedances.
    pub fn is_consistent(&self) -> bool {
        let any = self.per_level.iter().any(|l| l.statistic > l.threshold);
        self.per_level
            .iter()
            .all(|l| l.exceeds == (l.statistic > l.threshold))
            && (self.decision == Decision::Reject) == any
    }
}

/// `t_j = 3 μ (2^j / n2) √(ln ln n2)`.
pub fn theoretical_threshold(j: LevelIndex, n2: usize, mu: f64) -> Result<f64> {
    if n2 <= 16 {
        return Err(Error::Domain(format!(
            "threshold needs n2 > 16 so that ln ln n2 > 0, got {n2}"
        )));
    }
    if !(mu > 0.0) {
        return Err(Error::Domain(format!("mu must be positive, got {mu}")));
    }
    let n2 = n2 as f64;
    Ok(3.0 * mu * j.scale() / n2 * n2.ln().ln().sqrt())
}

/// `{1, …, min(4, ⌊½ log2(n2 / ln n2)⌋)}`, at least `{1}`.
pub fn practical_level_set(n2: usize) -> LevelSet {
    let n2f = n2.max(3) as f64;
    let top = (0.5 * (n2f / n2f.ln()).log2()).floor().clamp(1.0, 4.0) as u32;
    LevelSet::range(1, top).expect("1 <= top <= 4")
}

/// Levels to use for sizes `(n1, n2)`, with their origin and any warning.
pub fn resolve_levels(
    plan: &LevelPlan,
    n1: usize,
    n2: usize,
) -> Result<(LevelSet, LevelSource, Option<String>)> {
    match plan {
        LevelPlan::Fixed { levels } => Ok((levels.clone(), LevelSource::Fixed, None)),
        LevelPlan::Theoretical { q } => match theoretical_level_set(n1, n2, *q)? {
            LevelWindow::Window { levels, .. } => Ok((levels, LevelSource::Theoretical, None)),
            LevelWindow::Empty { j0, j_inf } => {
                let levels = practical_level_set(n2);
                let warning = format!(
                    "theoretical level window is empty (j0 = {j0:.3} > j_inf = {j_inf:.3}); using practical levels {:?}",
                    levels.levels().iter().map(|l| l.get()).collect::<Vec<_>>()
                );
                Ok((levels, LevelSource::PracticalFallback, Some(warning)))
            }
        },
    }
}

/// Critical value from replicate statistics.
pub fn threshold_from_replicates(
    values: &[f64],
    recipe: BootstrapRecipe,
    alpha: f64,
) -> Result<f64> {
    check_n_boot(values.len(), recipe, alpha)?;
    let b = values.len() as f64;
    Ok(match recipe {
        BootstrapRecipe::SdGauss => {
            let mean = values.iter().sum::<f64>() / b;
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (b - 1.0);
            mean + normal_quantile(1.0 - alpha) * var.sqrt()
        }
        BootstrapRecipe::Quantile => {
            let mut sorted = values.to_vec();
            sorted.sort_by(f64::total_cmp);
            // Order statistic ⌈(1 - α)(B + 1)⌉, capped at B.
            let k = ((1.0 - alpha) * (b + 1.0) - 1e-9).ceil().clamp(1.0, b) as usize;
            sorted[k - 1]
        }
    })
}

/// Coefficient tables of a grid at each level, built once and shared by
/// the observed statistic and every bootstrap replicate.
#[derive(Debug, Clone)]
pub struct GridTables {
    specs: Vec<CopulaSpec>,
    levels: LevelSet,
    tables: Vec<Vec<CoefficientTable>>,
}

impl GridTables {
    pub fn new(grid: &ParameterGrid, levels: &LevelSet) -> Result<Self> {
        let specs = grid.specs();
        let tables = levels
            .levels()
            .iter()
            .map(|&j| {
                specs
                    .iter()
                    .map(|s| scaling_coeffs(s, j))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GridTables {
            specs,
            levels: levels.clone(),
            tables,
        })
    }

    pub fn specs(&self) -> &[CopulaSpec] {
        &self.specs
    }

    pub fn levels(&self) -> &LevelSet {
        &self.levels
    }

    /// Per level: index of the grid minimizer and `inf_λ T̃_j(λ)`.
    pub fn infima(&self, pseudo: &PseudoSample) -> Result<Vec<(usize, f64)>> {
        self.levels
            .levels()
            .iter()
            .zip(&self.tables)
            .map(|(&j, tables)| infimum_over_tables(&CellHistogram::new(pseudo.pairs(), j), tables))
            .collect()
    }
}

/// The adaptive test prepared for one null family and one sample size.
#[derive(Debug, Clone)]
pub struct AdaptiveTest {
    family: Family,
    grid: ParameterGrid,
    config: TestConfig,
    n: usize,
    n1: usize,
    n2: usize,
    source: LevelSource,
    warnings: Vec<String>,
    tables: GridTables,
}

impl AdaptiveTest {
    pub fn new(family: Family, config: &TestConfig, n: usize) -> Result<Self> {
        config.validate()?;
        if n < MIN_TEST_SIZE {
            return Err(Error::Size(format!(
                "the test needs at least {MIN_TEST_SIZE} observations, got {n}"
            )));
        }
        let grid = match &config.grid {
            Some(g) => g.clone(),
            None => ParameterGrid::default_for(family)?,
        };
        if grid.family() != family {
            return Err(Error::Config(format!(
                "grid family {} does not match the null family {family}",
                grid.family()
            )));
        }
        let (n1, n2) = split_sizes(n, config.split_pi)?;
        let (levels, source, warning) = resolve_levels(&config.levels, n1, n2)?;
        let mut warnings: Vec<String> = warning.into_iter().collect();
        if let ThresholdMode::Theoretical { .. } = config.threshold_mode {
            warnings.push(
                "theoretical thresholds depend on a user-chosen mu; no calibrated default exists"
                    .into(),
            );
        }
        let tables = GridTables::new(&grid, &levels)?;
        Ok(AdaptiveTest {
            family,
            grid,
            config: config.clone(),
            n,
            n1,
            n2,
            source,
            warnings,
            tables,
        })
    }

    pub fn levels(&self) -> &LevelSet {
        self.tables.levels()
    }

    pub fn grid(&self) -> &ParameterGrid {
        &self.grid
    }

    /// Null parameter fitted by Kendall-tau inversion, falling back to the
    /// grid entry with the nearest tau when the family cannot attain `τ̂`.
    pub fn fit(&self, data: &BivariateSample) -> Result<(f64, CopulaSpec, Option<String>)> {
        let tau_hat = kendall_tau_empirical(data);
        if self.family == Family::Independence {
            return Ok((tau_hat, CopulaSpec::Independence, None));
        }
        match tau_to_param(self.family, tau_hat) {
            Ok(spec) => Ok((tau_hat, spec, None)),
            Err(e) => {
                let mut best = (f64::INFINITY, self.tables.specs[0]);
                for s in self.tables.specs() {
                    let d = (param_to_tau(s)? - tau_hat).abs();
                    if d < best.0 {
                        best = (d, *s);
                    }
                }
                let warning = format!(
                    "tau inversion failed ({e}); bootstrapping from nearest grid point {}",
                    best.1
                );
                Ok((tau_hat, best.1, Some(warning)))
            }
        }
    }

    /// Per-level bootstrap statistics, one row per replicate.
    pub fn bootstrap_replicates(
        &self,
        fitted: &CopulaSpec,
        n_boot: usize,
        statistic: BootstrapStatistic,
        seed: u64,
    ) -> Result<Vec<Vec<f64>>> {
        let fitted_tables = match statistic {
            BootstrapStatistic::FixedFit => Some(
                self.levels()
                    .levels()
                    .iter()
                    .map(|&j| scaling_coeffs(fitted, j))
                    .collect::<Result<Vec<_>>>()?,
            ),
            BootstrapStatistic::RerunInfimum => None,
        };
        let rows = map_indexed(n_boot, |b| -> Result<Vec<f64>> {
            let mut rng = stream(seed, &[label::BOOTSTRAP, b as u64]);
            let data = BivariateSample::new(sample(fitted, self.n, &mut rng)?)?;
            let split = split_sample(&data, self.config.split_pi, &mut rng)?;
            let pseudo = pseudo_observations(&split);
            match &fitted_tables {
                None => Ok(self
                    .tables
                    .infima(&pseudo)?
                    .into_iter()
                    .map(|(_, v)| v)
                    .collect()),
                Some(tables) => self
                    .levels()
                    .levels()
                    .iter()
                    .zip(tables)
                    .map(|(&j, t)| CellHistogram::new(pseudo.pairs(), j).statistic(t))
                    .collect(),
            }
        });
        rows.into_iter().collect()
    }

    /// Per-level critical values for data of the prepared size.
    pub fn thresholds(&self, fitted: &CopulaSpec, seed: u64) -> Result<Vec<f64>> {
        let level_alpha = self.config.level_alpha(self.levels().len());
        match self.config.threshold_mode {
            ThresholdMode::Theoretical { mu } => self
                .levels()
                .levels()
                .iter()
                .map(|&j| theoretical_threshold(j, self.n2, mu))
                .collect(),
            ThresholdMode::Bootstrap {
                n_boot,
                recipe,
                statistic,
            } => {
                let rows = self.bootstrap_replicates(fitted, n_boot, statistic, seed)?;
                (0..self.levels().len())
                    .map(|l| {
                        let column: Vec<f64> = rows.iter().map(|r| r[l]).collect();
                        threshold_from_replicates(&column, recipe, level_alpha)
                    })
                    .collect()
            }
        }
    }

    pub fn run(&self, data: &BivariateSample) -> Result<TestReport> {
        self.run_seeded(data, self.config.seed)
    }

    /// Run with `seed` in place of the configured seed.
    pub fn run_seeded(&self, data: &BivariateSample, seed: u64) -> Result<TestReport> {
        let start = Stopwatch::start();
        if data.len() != self.n {
            return Err(Error::Contract(format!(
                "test prepared for {} observations, got {}",
                self.n,
                data.len()
            )));
        }
        let mut warnings = self.warnings.clone();
        let split = split_sample(
            data,
            self.config.split_pi,
            &mut stream(seed, &[label::SPLIT]),
        )?;
        let pseudo = pseudo_observations(&split);
        let infima = self.tables.infima(&pseudo)?;
        let (tau_hat, fitted, warning) = self.fit(data)?;
        warnings.extend(warning);
        let thresholds = self.thresholds(&fitted, seed)?;
        let per_level: Vec<LevelOutcome> = self
            .levels()
            .levels()
            .iter()
            .zip(infima.iter().zip(&thresholds))
            .map(|(&j, (&(idx, statistic), &threshold))| LevelOutcome {
                j,
                statistic,
                threshold,
                exceeds: statistic > threshold,
                best_spec: Some(self.tables.specs[idx]),
            })
            .collect();
        let decision = decide(&per_level);
        Ok(TestReport {
            decision,
            h0_family: Some(self.family),
            per_level,
            level_source: self.source,
            n: self.n,
            n1: self.n1,
            n2: self.n2,
            tau_hat: Some(tau_hat),
            fitted: Some(fitted),
            warnings,
            config: self.config.with_seed(seed),
            elapsed: start.elapsed(),
        })
    }
}

fn decide(per_level: &[LevelOutcome]) -> Decision {
    if per_level.iter().any(|l| l.exceeds) {
        Decision::Reject
    } else {
        Decision::Accept
    }
}

/// Parametric bootstrap thresholds for data of size `n` drawn from `fitted`.
pub fn bootstrap_thresholds(
    fitted: &CopulaSpec,
    config: &TestConfig,
    n: usize,
) -> Result<Vec<f64>> {
    if !matches!(config.threshold_mode, ThresholdMode::Bootstrap { .. }) {
        return Err(Error::Config(
            "bootstrap thresholds need a bootstrap threshold mode".into(),
        ));
    }
    AdaptiveTest::new(fitted.family(), config, n)?.thresholds(fitted, config.seed)
}

/// Goodness-of-fit test of `data` against the copula family `family`.
pub fn adaptive_test(
    data: &BivariateSample,
    family: Family,
    config: &TestConfig,
) -> Result<TestReport> {
    AdaptiveTest::new(family, config, data.len())?.run(data)
}

/// Test whether two samples share the same copula.
///
/// Both samples are cut to the common size and split with one shared index
/// partition, so pseudo-observations stay paired by index. Bootstrap
/// thresholds come from random label swaps within pairs.
pub fn two_sample_test(
    a: &BivariateSample,
    b: &BivariateSample,
    config: &TestConfig,
) -> Result<TestReport> {
    let start = Stopwatch::start();
    config.validate()?;
    let n = a.len().min(b.len());
    if n < MIN_TEST_SIZE {
        return Err(Error::Size(format!(
            "the test needs at least {MIN_TEST_SIZE} observations, got {n}"
        )));
    }
    let mut warnings = Vec::new();
    if a.len() != b.len() {
        warnings.push(format!(
            "samples truncated to the common size {n} (sizes {} and {})",
            a.len(),
            b.len()
        ));
    }
    let (a, b) = (a.truncated(n)?, b.truncated(n)?);
    let (n1, n2) = split_sizes(n, config.split_pi)?;
    let (levels, source, warning) = resolve_levels(&config.levels, n1, n2)?;
    warnings.extend(warning);

    let split_a = split_sample(
        &a,
        config.split_pi,
        &mut stream(config.seed, &[label::SPLIT]),
    )?;
    let split_b = split_sample(
        &b,
        config.split_pi,
        &mut stream(config.seed, &[label::SPLIT]),
    )?;
    let pa = pseudo_observations(&split_a);
    let pb = pseudo_observations(&split_b);

    let differing = levels
        .levels()
        .iter()
        .map(|&j| two_sample_cells_of(pa.pairs(), pb.pairs(), j))
        .collect::<Result<Vec<_>>>()?;
    let observed: Vec<f64> = levels
        .levels()
        .iter()
        .zip(&differing)
        .map(|(&j, pairs)| two_sample_value_swapped(pairs, None, n2, j))
        .collect();

    let level_alpha = config.level_alpha(levels.len());
    let thresholds: Vec<f64> = match config.threshold_mode {
        ThresholdMode::Theoretical { mu } => {
            warnings.push(
                "theoretical thresholds depend on a user-chosen mu; no calibrated default exists"
                    .into(),
            );
            levels
                .levels()
                .iter()
                .map(|&j| theoretical_threshold(j, n2, mu))
                .collect::<Result<_>>()?
        }
        ThresholdMode::Bootstrap { n_boot, recipe, .. } => {
            let rows = map_indexed(n_boot, |r| {
                let mut rng = stream(config.seed, &[label::PERMUTATION, r as u64]);
                let swap: Vec<bool> = (0..n2).map(|_| rng.random::<bool>()).collect();
                levels
                    .levels()
                    .iter()
                    .zip(&differing)
                    .map(|(&j, pairs)| two_sample_value_swapped(pairs, Some(&swap), n2, j))
                    .collect::<Vec<f64>>()
            });
            (0..levels.len())
                .map(|l| {
                    let column: Vec<f64> = rows.iter().map(|r| r[l]).collect();
                    threshold_from_replicates(&column, recipe, level_alpha)
                })
                .collect::<Result<_>>()?
        }
    };

    let per_level: Vec<LevelOutcome> = levels
        .levels()
        .iter()
        .zip(observed.iter().zip(&thresholds))
        .map(|(&j, (&statistic, &threshold))| LevelOutcome {
            j,
            statistic,
            threshold,
            exceeds: statistic > threshold,
            best_spec: None,
        })
        .collect();
    Ok(TestReport {
        decision: decide(&per_level),
        h0_family: None,
        per_level,
        level_source: source,
        n,
        n1,
        n2,
        tau_hat: None,
        fitted: None,
        warnings,
        config: config.clone(),
        elapsed: start.elapsed(),
    })
}

/// Wall-clock timer; reads zero where the platform has no clock (wasm32 without WASI).
struct Stopwatch(
    #[cfg(not(all(target_arch = "wasm32", target_os = "unknown")))] std::time::Instant,
);

impl Stopwatch {
    fn start() -> Self {
        #[cfg(not(all(target_arch = "wasm32", target_os = "unknown")))]
        return Stopwatch(std::time::Instant::now());
        #[cfg(all(target_arch = "wasm32", target_os = "unknown"))]
        return Stopwatch();
    }

    fn elapsed(&self) -> Duration {
        #[cfg(not(all(target_arch = "wasm32", target_os = "unknown")))]
        return self.0.elapsed();
        #[cfg(all(target_arch = "wasm32", target_os = "unknown"))]
        return Duration::ZERO;
    }
}

/// Stream seed of Monte-Carlo replicate `r` under `seed`.
pub fn replicate_seed(seed: u64, r: u64) -> u64 {
    stream_key(seed, &[label::REPLICATE, r])
}
