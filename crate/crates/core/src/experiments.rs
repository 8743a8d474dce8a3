//! Monte-Carlo power studies, parameter fitting, CSV ingestion and the
//! lower-bound alternative generator.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::copula::{
    param_to_tau, sample, scaling_coeffs, tau_to_param, CopulaSpec, Family, ParameterGrid,
};
use crate::empirical::{full_sample_pseudo, kendall_tau_empirical, BivariateSample, PseudoSample};
use crate::error::{Error, Result};
use crate::gof::{replicate_seed, AdaptiveTest, Decision, TestConfig};
use crate::parallel::map_indexed;
use crate::report;
use crate::rng::{label, stream};
use crate::special::compensated_sum;
use crate::ustat::CellHistogram;
use crate::wavelet::{trend_energy, CoefficientTable, LevelIndex};

/// Contents of a data file: one sample (2 columns) or two index-paired samples (4 columns).
#[derive(Debug, Clone, PartialEq)]
pub enum CsvData {
    Single(BivariateSample),
    Paired(BivariateSample, BivariateSample),
}

impl CsvData {
    pub fn rows(&self) -> usize {
        match self {
            CsvData::Single(s) => s.len(),
            CsvData::Paired(a, _) => a.len(),
        }
    }
}

/// Read a comma-separated file with 2 or 4 numeric columns and an optional header line.
pub fn load_csv(path: &Path) -> Result<CsvData> {
    let file =
        std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_csv(file)
}

pub fn read_csv<R: Read>(reader: R) -> Result<CsvData> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (idx, record) in rdr.records().enumerate() {
        let line = idx + 1;
        let record = record.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> =
            record.iter().map(str::parse::<f64>).collect();
        let values = match parsed {
            Ok(v) => v,
            Err(_) if idx == 0 => continue,
            Err(_) => {
                let bad = record
                    .iter()
                    .find(|f| f.parse::<f64>().is_err())
                    .unwrap_or("");
                return Err(Error::Parse {
                    line,
                    message: format!("non-numeric value {bad:?}"),
                });
            }
        };
        if values.len() != 2 && values.len() != 4 {
            return Err(Error::Parse {
                line,
                message: format!("expected 2 or 4 columns, found {}", values.len()),
            });
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Parse {
                line,
                message: format!("non-finite value {v}"),
            });
        }
        match width {
            None => width = Some(values.len()),
            Some(w) if w != values.len() => {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {w} columns, found {}", values.len()),
                })
            }
            _ => {}
        }
        rows.push(values);
    }
    if rows.len() < 4 {
        return Err(Error::Size(format!(
            "need at least 4 data rows, found {}",
            rows.len()
        )));
    }
    if width == Some(2) {
        Ok(CsvData::Single(BivariateSample::new(
            rows.iter().map(|r| (r[0], r[1])).collect(),
        )?))
    } else {
        Ok(CsvData::Paired(
            BivariateSample::new(rows.iter().map(|r| (r[0], r[1])).collect())?,
            BivariateSample::new(rows.iter().map(|r| (r[2], r[3])).collect())?,
        ))
    }
}

/// Write pairs as CSV with an optional header; floats round-trip exactly.
pub fn write_csv<W: Write>(
    writer: W,
    header: Option<[&str; 2]>,
    pairs: &[(f64, f64)],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| Error::Io(e.to_string());
    if let Some(h) = header {
        w.write_record(h).map_err(io)?;
    }
    for &(x, y) in pairs {
        w.write_record([format!("{x:?}"), format!("{y:?}")])
            .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerRow {
    pub h0_family: Family,
    pub true_spec: CopulaSpec,
    pub tau: f64,
    pub rejection_rate: f64,
    pub standard_error: f64,
    pub n_mc: usize,
    pub n: usize,
    pub config_hash: String,
    /// User-supplied reference value shown next to the estimate.
    pub reference: Option<f64>,
}

impl PowerRow {
    /// `√(p̂ (1 - p̂) / N_MC)`.
    pub fn standard_error_of(rate: f64, n_mc: usize) -> f64 {
        (rate * (1.0 - rate) / n_mc as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PowerTable {
    pub rows: Vec<PowerRow>,
}

/// Hex SHA-256 prefix of a canonical JSON rendering.
fn hash_of<T: Serialize>(item: &T) -> Result<String> {
    let text =
        serde_json::to_string(&report::to_value(item)?).map_err(|e| Error::Io(e.to_string()))?;
    let digest = Sha256::digest(text.as_bytes());
    Ok(digest.iter().take(8).fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    }))
}

/// Rejection rate of the adaptive test for `h0_family` on `n_mc` data sets
/// drawn from `true_spec`.
///
/// Replicate `r` draws its data and runs its test from streams derived from
/// `(config.seed, r)`, so the result does not depend on the thread count.
pub fn power_study(
    h0_family: Family,
    true_spec: &CopulaSpec,
    n: usize,
    n_mc: usize,
    config: &TestConfig,
) -> Result<PowerRow> {
    if n_mc < 10 {
        return Err(Error::Config(format!(
            "power studies need n_mc >= 10, got {n_mc}"
        )));
    }
    let test = AdaptiveTest::new(h0_family, config, n)?;
    let outcomes = map_indexed(n_mc, |r| -> Result<bool> {
        let seed = replicate_seed(config.seed, r as u64);
        let data = BivariateSample::new(sample(true_spec, n, &mut stream(seed, &[label::DATA]))?)?;
        let report = test.run_seeded(&data, seed)?;
        Ok(report.decision == Decision::Reject)
    });
    let rejections = outcomes
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|&r| r)
        .count();
    let rate = rejections as f64 / n_mc as f64;
    let config_hash = hash_of(&(h0_family, true_spec, n, n_mc, config))?;
    Ok(PowerRow {
        h0_family,
        true_spec: *true_spec,
        tau: param_to_tau(true_spec)?,
        rejection_rate: rate,
        standard_error: PowerRow::standard_error_of(rate, n_mc),
        n_mc,
        n,
        config_hash,
        reference: None,
    })
}

/// Aligned text table: one block per null family, one line per true
/// family, one column per Kendall tau, cells `p̂ (se)`.
pub fn render_power_table(table: &PowerTable) -> String {
    let taus: BTreeSet<u64> = table
        .rows
        .iter()
        .map(|r| (r.tau * 1e6).round() as u64)
        .collect();
    let taus: Vec<u64> = taus.into_iter().collect();
    let mut h0s: Vec<Family> = Vec::new();
    for r in &table.rows {
        if !h0s.contains(&r.h0_family) {
            h0s.push(r.h0_family);
        }
    }
    let cell_width = 24;
    let mut out = String::new();
    let _ = write!(out, "{:<14}{:<14}", "H0 copula", "True copula");
    for t in &taus {
        let _ = write!(
            out,
            "{:>cell_width$}",
            format!("tau={:.2}", *t as f64 / 1e6)
        );
    }
    out.push('\n');
    let rule = "-".repeat(28 + cell_width * taus.len());
    for h0 in h0s {
        out.push_str(&rule);
        out.push('\n');
        let mut trues: Vec<Family> = Vec::new();
        for r in table.rows.iter().filter(|r| r.h0_family == h0) {
            if !trues.contains(&r.true_spec.family()) {
                trues.push(r.true_spec.family());
            }
        }
        for (i, tf) in trues.iter().enumerate() {
            let first = if i == 0 {
                h0.to_string()
            } else {
                String::new()
            };
            let marker = if *tf == h0 { "*" } else { "" };
            let _ = write!(out, "{:<14}{:<14}", first, format!("{tf}{marker}"));
            for t in &taus {
                let cell = table
                    .rows
                    .iter()
                    .find(|r| {
                        r.h0_family == h0
                            && r.true_spec.family() == *tf
                            && (r.tau * 1e6).round() as u64 == *t
                    })
                    .map(|r| {
                        let mut c = format!("{:.2} ({:.4})", r.rejection_rate, r.standard_error);
                        if let Some(reference) = r.reference {
                            let _ = write!(c, " [{reference:.2}]");
                        }
                        c
                    })
                    .unwrap_or_else(|| "-".into());
                let _ = write!(out, "{cell:>cell_width$}");
            }
            out.push('\n');
        }
    }
    out.push_str(&rule);
    out.push_str("\n* empirical level (data drawn from the null family)\n");
    out
}

/// Parameter matching the sample Kendall tau.
pub fn fit_by_tau(data: &BivariateSample, family: Family) -> Result<CopulaSpec> {
    tau_to_param(family, kendall_tau_empirical(data))
}

/// Un-thresholded Haar projection estimate `2^j · N_k / n2`.
pub fn linear_density_estimate(pseudo: &PseudoSample, j: LevelIndex) -> Result<CoefficientTable> {
    let n = pseudo.pairs().len();
    if n == 0 {
        return Err(Error::Contract(
            "density estimate needs at least one point".into(),
        ));
    }
    let hist = CellHistogram::new(pseudo.pairs(), j);
    let scale = j.scale();
    CoefficientTable::new(
        j,
        hist.counts()
            .iter()
            .map(|&c| scale * c as f64 / n as f64)
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AseFit {
    pub spec: CopulaSpec,
    /// `2^{-2j} Σ_k (benchmark_k - c_{j,k}(λ))²` at the minimizer.
    pub ase: f64,
    /// `ase` divided by `2^{-2j} Σ_k benchmark_k²`.
    pub relative_ase: f64,
    pub j: LevelIndex,
}

/// Default resolution of the ASE benchmark.
pub const DEFAULT_ASE_LEVEL: u32 = 3;

/// Grid parameter closest in average squared error to the linear benchmark
/// built from full-sample ranks.
pub fn fit_by_ase(data: &BivariateSample, grid: &ParameterGrid, j: LevelIndex) -> Result<AseFit> {
    let benchmark = linear_density_estimate(&full_sample_pseudo(data), j)?;
    fit_table_by_ase(&benchmark, grid)
}

/// ASE minimizer against a given benchmark table; ties go to the earliest grid entry.
pub fn fit_table_by_ase(benchmark: &CoefficientTable, grid: &ParameterGrid) -> Result<AseFit> {
    let j = benchmark.level();
    let area = 1.0 / (j.scale() * j.scale());
    let mut best: Option<(CopulaSpec, f64)> = None;
    for spec in grid.specs() {
        let target = scaling_coeffs(&spec, j)?;
        let ase = area
            * compensated_sum(
                benchmark
                    .values()
                    .iter()
                    .zip(target.values())
                    .map(|(b, c)| (b - c) * (b - c)),
            );
        if best.is_none_or(|(_, v)| ase < v) {
            best = Some((spec, ase));
        }
    }
    let (spec, ase) =
        best.ok_or_else(|| Error::Contract("parameter grid must not be empty".into()))?;
    let energy = area * trend_energy(benchmark);
    Ok(AseFit {
        spec,
        ase,
        relative_ase: if energy > 0.0 {
            ase / energy
        } else {
            f64::INFINITY
        },
        j,
    })
}

/// Sign-randomized Haar perturbation of a null density at level `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LbAlternativeSpec {
    pub base: CopulaSpec,
    pub j: LevelIndex,
    pub s: f64,
    pub m: f64,
    pub c1: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LbSample {
    pub points: Vec<(f64, f64)>,
    /// Perturbation amplitude `u_j(n)`.
    pub amplitude: f64,
    /// Signs `δ_k`, row-major over the level-`j` cells.
    pub signs: Vec<i8>,
    /// `‖c_j - c_{λ0}‖ = √(3 · 2^{2j}) · u_j(n)`.
    pub l2_distance: f64,
    /// Estimate of `‖c_{λ0} - P_{j+1} c_{λ0}‖` from finer projections.
    pub projection_error: f64,
    /// Piecewise-constant perturbed density on the level-`j+1` grid.
    pub density: CoefficientTable,
}

impl LbAlternativeSpec {
    pub fn new(base: CopulaSpec, j: LevelIndex, s: f64, m: f64, c1: f64, n: usize) -> Result<Self> {
        base.validate()?;
        if !(s >= 0.5) {
            return Err(Error::Domain(format!(
                "smoothness s must be >= 1/2, got {s}"
            )));
        }
        if !(m > 0.0) || !(c1 >= 0.0) {
            return Err(Error::Domain(format!(
                "need M > 0 and C1 >= 0, got M = {m}, C1 = {c1}"
            )));
        }
        if n < 16 {
            return Err(Error::Domain(format!("n must exceed e^e, got {n}")));
        }
        if j.get() + 1 > crate::copula::MAX_COEFF_LEVEL {
            return Err(Error::Config(format!(
                "level {j} too fine for exact cell sampling"
            )));
        }
        let spec = LbAlternativeSpec {
            base,
            j,
            s,
            m,
            c1,
            n,
        };
        let base_density = spec.base_density()?;
        spec.check_positive(&base_density)?;
        Ok(spec)
    }

    /// `u_j(n) = C1 · M · (n / √(ln ln n))^{-2(s+1)/(4s+2)}`.
    pub fn amplitude(&self) -> f64 {
        let n = self.n as f64;
        let t = n.ln().ln().sqrt();
        self.c1 * self.m * (n / t).powf(-2.0 * (self.s + 1.0) / (4.0 * self.s + 2.0))
    }

    fn fine(&self) -> LevelIndex {
        LevelIndex::new(self.j.get() + 1).expect("checked on construction")
    }

    /// Density values of the level-`j+1` projection of the base copula.
    fn base_density(&self) -> Result<Vec<f64>> {
        let fine = self.fine();
        let c = scaling_coeffs(&self.base, fine)?;
        Ok(c.values().iter().map(|v| v * fine.scale()).collect())
    }

    /// Perturbation pattern on the four children of a level-`j` cell.
    fn child_pattern(&self, d1: usize, d2: usize) -> f64 {
        if d1 == 0 && d2 == 0 {
            3.0
        } else {
            -1.0
        }
    }

    fn perturbed(&self, base: &[f64], signs: &[i8]) -> Vec<f64> {
        let fine = self.fine();
        let side = fine.side();
        let u = self.amplitude() * self.j.scale();
        let mut out = base.to_vec();
        for k1 in 0..side {
            for k2 in 0..side {
                let parent = (k1 / 2) * self.j.side() + k2 / 2;
                out[k1 * side + k2] +=
                    signs[parent] as f64 * u * self.child_pattern(k1 % 2, k2 % 2);
            }
        }
        out
    }

    /// Worst case over both signs in every cell.
    fn check_positive(&self, base: &[f64]) -> Result<()> {
        let fine = self.fine();
        let side = fine.side();
        let u = self.amplitude() * self.j.scale();
        for k1 in 0..side {
            for k2 in 0..side {
                let low = base[k1 * side + k2] - 3.0 * u;
                if low < 0.0 {
                    return Err(Error::Amplitude(format!(
                        "perturbation of size {u:.4e} makes the density negative in cell ({k1}, {k2}); choose a smaller C1"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Perturbation table `c_j - P_{j+1} c_{λ0}` on the level-`j+1` grid, as Haar scaling coefficients.
pub fn lb_perturbation_coefficients(
    spec: &LbAlternativeSpec,
    signs: &[i8],
) -> Result<CoefficientTable> {
    let fine = spec.fine();
    let zero = vec![0.0; fine.cell_count()];
    let delta = spec.perturbed(&zero, signs);
    CoefficientTable::new(fine, delta.iter().map(|d| d / fine.scale()).collect())
}

/// Draw the signs, then `n` points from the perturbed piecewise-constant density.
pub fn lb_alternative_sample<R: Rng + ?Sized>(
    spec: &LbAlternativeSpec,
    rng: &mut R,
) -> Result<LbSample> {
    let fine = spec.fine();
    let base = spec.base_density()?;
    spec.check_positive(&base)?;
    let signs: Vec<i8> = (0..spec.j.cell_count())
        .map(|_| if rng.random::<bool>() { 1 } else { -1 })
        .collect();
    let density = spec.perturbed(&base, &signs);
    let weights: Vec<f64> = density.iter().map(|d| d.max(0.0)).collect();
    let index = WeightedIndex::new(&weights).map_err(|e| Error::Amplitude(e.to_string()))?;
    let side = fine.side();
    let width = 1.0 / fine.scale();
    let points = (0..spec.n)
        .map(|_| {
            let cell = index.sample(rng);
            let (k1, k2) = (cell / side, cell % side);
            let u = (k1 as f64 + rng.random::<f64>()) * width;
            let v = (k2 as f64 + rng.random::<f64>()) * width;
            (u, v)
        })
        .collect();
    let finest =
        LevelIndex::new((spec.j.get() + 5).min(crate::copula::MAX_COEFF_LEVEL)).expect("bounded");
    let coarse_energy = trend_energy(&scaling_coeffs(&spec.base, fine)?);
    let fine_energy = trend_energy(&scaling_coeffs(&spec.base, finest)?);
    Ok(LbSample {
        points,
        amplitude: spec.amplitude(),
        signs,
        l2_distance: (3.0 * spec.j.scale() * spec.j.scale()).sqrt() * spec.amplitude(),
        projection_error: (fine_energy - coarse_energy).max(0.0).sqrt(),
        density: CoefficientTable::new(fine, density)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::empirical::PseudoSample;
    use approx::assert_abs_diff_eq;
    use std::io::Cursor;

    fn lvl(j: u32) -> LevelIndex {
        LevelIndex::new(j).unwrap()
    }

    #[test]
    fn csv_with_header_and_crlf() {
        let text = "loss,alae\r\n1.5,2\r\n3,4\r\n5,6e1\r\n7,8\r\n";
        let CsvData::Single(s) = read_csv(Cursor::new(text)).unwrap() else {
            panic!()
        };
        assert_eq!(
            s.pairs(),
            &[(1.5, 2.0), (3.0, 4.0), (5.0, 60.0), (7.0, 8.0)]
        );
    }

    #[test]
    fn csv_errors_name_the_line() {
        let err = read_csv(Cursor::new("1,2\n3,4\n1.0,abc\n5,6\n")).unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 3,
                message: "non-numeric value \"abc\"".into()
            }
        );
        assert!(matches!(
            read_csv(Cursor::new("1,2\n3,4\n")),
            Err(Error::Size(_))
        ));
        assert!(matches!(
            read_csv(Cursor::new("1,2,3\n")),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            read_csv(Cursor::new("1,2\n3,4,5,6\n")),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn csv_four_columns_are_paired_samples() {
        let text = "1,2,3,4\n5,6,7,8\n9,10,11,12\n13,14,15,16\n";
        let CsvData::Paired(a, b) = read_csv(Cursor::new(text)).unwrap() else {
            panic!()
        };
        assert_eq!(a.pairs()[1], (5.0, 6.0));
        assert_eq!(b.pairs()[3], (15.0, 16.0));
    }

    #[test]
    fn csv_round_trip_is_idempotent() {
        let pairs = vec![
            (0.1, 1e-300),
            (std::f64::consts::PI, -2.5),
            (1.0 / 3.0, 7.0),
            (4.0, 5.0),
        ];
        let mut buf = Vec::new();
        write_csv(&mut buf, Some(["x", "y"]), &pairs).unwrap();
        let CsvData::Single(s) = read_csv(Cursor::new(buf.clone())).unwrap() else {
            panic!()
        };
        assert_eq!(s.pairs(), pairs.as_slice());
        let mut again = Vec::new();
        write_csv(&mut again, Some(["x", "y"]), s.pairs()).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn fit_by_tau_examples() {
        // A sample whose tau-a is exactly 0.31 is hard to build; check the map instead.
        let g = tau_to_param(Family::Gumbel, 0.31).unwrap();
        assert_abs_diff_eq!(g.parameter(), 1.4493, epsilon = 1e-4);
        let n = tau_to_param(Family::Gaussian, 0.31).unwrap();
        assert_abs_diff_eq!(
            n.parameter(),
            (std::f64::consts::PI * 0.31 / 2.0).sin(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(n.parameter(), 0.4679, epsilon = 1e-4);
        let flat =
            BivariateSample::new(vec![(1.0, 1.0), (2.0, 2.0), (3.0, 3.0), (4.0, 0.0)]).unwrap();
        assert_eq!(kendall_tau_empirical(&flat), 0.0);
        assert!(matches!(
            fit_by_tau(&flat, Family::Clayton),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn linear_estimate_examples() {
        let p = PseudoSample::from_uniform(vec![(0.1, 0.2), (0.3, 0.4), (0.2, 0.1)]).unwrap();
        let t = linear_density_estimate(&p, lvl(1)).unwrap();
        assert_eq!(t.values(), &[2.0, 0.0, 0.0, 0.0]);
        let spec = CopulaSpec::new(Family::Clayton, 2.0).unwrap();
        let pts = sample(&spec, 100_000, &mut stream(1, &[])).unwrap();
        let est =
            linear_density_estimate(&PseudoSample::from_uniform(pts).unwrap(), lvl(3)).unwrap();
        assert_abs_diff_eq!(est.mass(), 1.0, epsilon = 1e-14);
        let exact = scaling_coeffs(&spec, lvl(3)).unwrap();
        for (a, b) in est.values().iter().zip(exact.values()) {
            assert!((a - b).abs() <= 0.02, "{a} vs {b}");
        }
    }

    #[test]
    fn ase_trivial_cases() {
        let spec = tau_to_param(Family::Frank, 0.3).unwrap();
        let exact = scaling_coeffs(&spec, lvl(3)).unwrap();
        let fit = fit_table_by_ase(&exact, &ParameterGrid::single(spec)).unwrap();
        assert_eq!(fit.spec, spec);
        assert_abs_diff_eq!(fit.ase, 0.0, epsilon = 1e-20);
        let grid = ParameterGrid::default_for(Family::Frank).unwrap();
        let other = tau_to_param(Family::Frank, 0.3).unwrap();
        let fit = fit_table_by_ase(&exact, &grid).unwrap();
        assert!(
            (param_to_tau(&fit.spec).unwrap() - param_to_tau(&other).unwrap()).abs() < 0.05 + 1e-9
        );
    }

    #[test]
    fn power_row_se_identity_and_determinism() {
        let spec = tau_to_param(Family::Frank, 0.25).unwrap();
        let config = TestConfig::default();
        let a = power_study(Family::Frank, &spec, 128, 10, &config).unwrap();
        let b = power_study(Family::Frank, &spec, 128, 10, &config).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            a.standard_error,
            PowerRow::standard_error_of(a.rejection_rate, a.n_mc)
        );
        assert_eq!(a.config_hash.len(), 16);
        assert!(power_study(Family::Frank, &spec, 128, 9, &config).is_err());
        let text = render_power_table(&PowerTable { rows: vec![a] });
        assert!(text.contains("Frank*"));
    }

    #[test]
    fn lb_amplitude_and_distance() {
        let spec =
            LbAlternativeSpec::new(CopulaSpec::Independence, lvl(2), 1.0, 1.0, 0.1, 1_000_000)
                .unwrap();
        let n = 1e6f64;
        let expected = 0.1 * (n / n.ln().ln().sqrt()).powf(-4.0 / 6.0);
        assert_abs_diff_eq!(spec.amplitude(), expected, epsilon = 1e-18);
        let small = LbAlternativeSpec { n: 100, ..spec };
        let s = lb_alternative_sample(&small, &mut stream(2, &[])).unwrap();
        let pert = lb_perturbation_coefficients(&small, &s.signs).unwrap();
        assert_abs_diff_eq!(trend_energy(&pert).sqrt(), s.l2_distance, epsilon = 1e-15);
        assert_abs_diff_eq!(
            compensated_sum(pert.values().iter().copied()),
            0.0,
            epsilon = 1e-12
        );
        assert_eq!(s.projection_error, 0.0);
    }

    #[test]
    fn lb_zero_amplitude_is_the_projection() {
        let base = tau_to_param(Family::Gumbel, 0.4).unwrap();
        let spec = LbAlternativeSpec::new(base, lvl(2), 1.0, 1.0, 0.0, 5000).unwrap();
        let s = lb_alternative_sample(&spec, &mut stream(3, &[])).unwrap();
        let proj = scaling_coeffs(&base, lvl(3)).unwrap();
        for (d, c) in s.density.values().iter().zip(proj.values()) {
            assert_abs_diff_eq!(*d, c * 8.0, epsilon = 1e-15);
        }
        assert!(s.projection_error > 0.0);
    }

    #[test]
    fn lb_rejects_negative_densities() {
        let base = tau_to_param(Family::Clayton, 0.75).unwrap();
        let err = LbAlternativeSpec::new(base, lvl(3), 0.5, 1.0, 1e3, 100).unwrap_err();
        assert!(matches!(err, Error::Amplitude(_)));
    }
}
