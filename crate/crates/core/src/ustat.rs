//! Projection U-statistics on the Haar grid.
//!
//! For level `j` and cell `k` let `a_i = φ_{j,k}(P_i) - c_{j,k}(λ)`. The
//! statistic `θ̃_{j,k}(λ)` is the off-diagonal pair mean of `a_{i1} a_{i2}`.
//! Because `φ_{j,k}` only takes the values `0` and `2^j`, it depends on the
//! sample through the cell count `N_k` alone:
//!
//! `θ̃_{j,k} = 2^{2j} N_k (N_k - 1) / (n (n - 1)) - 2 · 2^j c_{j,k} N_k / n + c_{j,k}²`.
//!
//! One histogram per level therefore serves every parameter of a grid.

use serde::{Deserialize, Serialize};

use crate::copula::{scaling_coeffs, CopulaSpec, ParameterGrid};
use crate::empirical::PseudoSample;
use crate::error::{Error, Result};
use crate::special::{compensated_sum, NeumaierSum};
use crate::wavelet::{flat_cell_of, CellIndex, CoefficientTable, LevelIndex};

/// Cell counts of a point set at one level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellHistogram {
    level: LevelIndex,
    counts: Vec<u64>,
    n: usize,
}

impl CellHistogram {
    pub fn new(points: &[(f64, f64)], j: LevelIndex) -> Self {
        let mut counts = vec![0u64; j.cell_count()];
        for &(u, v) in points {
            counts[flat_cell_of(j, u, v)] += 1;
        }
        CellHistogram {
            level: j,
            counts,
            n: points.len(),
        }
    }

    pub fn level(&self) -> LevelIndex {
        self.level
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn check(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Contract(format!(
                "U-statistic needs n2 >= 2, got {}",
                self.n
            )));
        }
        Ok(())
    }

    /// `2^{2j} Σ_k N_k (N_k - 1) / (n (n - 1))`, the part shared by every target.
    fn pair_energy(&self) -> f64 {
        let nn = self.n as f64 * (self.n as f64 - 1.0);
        let s = j_scale_sq(self.level);
        compensated_sum(self.counts.iter().map(|&c| {
            let c = c as f64;
            s * c * (c - 1.0) / nn
        }))
    }

    /// `θ̃_{j,k}` for every cell against `target`.
    pub fn per_cell(&self, target: &CoefficientTable) -> Result<Vec<f64>> {
        self.check()?;
        check_levels(self.level, target)?;
        let n = self.n as f64;
        let nn = n * (n - 1.0);
        let scale = self.level.scale();
        let sq = j_scale_sq(self.level);
        Ok(self
            .counts
            .iter()
            .zip(target.values())
            .map(|(&count, &c)| {
                let count = count as f64;
                sq * count * (count - 1.0) / nn - 2.0 * scale * c * count / n + c * c
            })
            .collect())
    }

    /// `Σ_k θ̃_{j,k}` against `target`.
    pub fn statistic(&self, target: &CoefficientTable) -> Result<f64> {
        Ok(compensated_sum(self.per_cell(target)?))
    }
}

fn j_scale_sq(j: LevelIndex) -> f64 {
    let s = j.scale();
    s * s
}

fn check_levels(j: LevelIndex, target: &CoefficientTable) -> Result<()> {
    if target.level() != j {
        return Err(Error::Contract(format!(
            "target table is at level {} but the statistic is at level {j}",
            target.level()
        )));
    }
    Ok(())
}

/// Level statistic `T̃_j(λ)` with optional per-cell terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelStatistic {
    pub j: LevelIndex,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_cell: Option<CoefficientTable>,
}

/// `θ̃_{j,k}(λ)` evaluated from the points through `(S1² - S2) / (n (n - 1))`.
pub fn theta_tilde_jk(
    pseudo: &PseudoSample,
    target: &CoefficientTable,
    j: LevelIndex,
    k: CellIndex,
) -> Result<f64> {
    theta_from_points(pseudo.pairs(), target, j, k)
}

pub(crate) fn theta_from_points(
    points: &[(f64, f64)],
    target: &CoefficientTable,
    j: LevelIndex,
    k: CellIndex,
) -> Result<f64> {
    let n = points.len();
    if n < 2 {
        return Err(Error::Contract(format!(
            "U-statistic needs n2 >= 2, got {n}"
        )));
    }
    check_levels(j, target)?;
    let k = CellIndex::new(j, k.k1, k.k2)?;
    let flat = k.flat(j);
    let c = target.values()[flat];
    let scale = j.scale();
    let mut s1 = NeumaierSum::default();
    let mut s2 = NeumaierSum::default();
    for &(u, v) in points {
        let phi = if flat_cell_of(j, u, v) == flat {
            scale
        } else {
            0.0
        };
        let a = phi - c;
        s1.add(a);
        s2.add(a * a);
    }
    let (s1, s2) = (s1.total(), s2.total());
    let nf = n as f64;
    Ok((s1 * s1 - s2) / (nf * (nf - 1.0)))
}

fn level_statistic(
    points: &[(f64, f64)],
    target: &CoefficientTable,
    j: LevelIndex,
) -> Result<LevelStatistic> {
    check_levels(j, target)?;
    let hist = CellHistogram::new(points, j);
    let per_cell = hist.per_cell(target)?;
    let value = compensated_sum(per_cell.iter().copied());
    Ok(LevelStatistic {
        j,
        value,
        per_cell: Some(CoefficientTable::new(j, per_cell)?),
    })
}

/// `T̃_j(λ)` on rank pseudo-observations.
pub fn t_tilde(pseudo: &PseudoSample, spec: &CopulaSpec, j: LevelIndex) -> Result<LevelStatistic> {
    level_statistic(pseudo.pairs(), &scaling_coeffs(spec, j)?, j)
}

/// `T̂_j(λ)` on direct copula observations.
pub fn t_hat(direct: &[(f64, f64)], spec: &CopulaSpec, j: LevelIndex) -> Result<LevelStatistic> {
    level_statistic(direct, &scaling_coeffs(spec, j)?, j)
}

/// Unbiased estimate of the trend energy `Σ_k c_{j,k}²` of the sampled density.
pub fn norm_squared_estimate(pseudo: &PseudoSample, j: LevelIndex) -> Result<f64> {
    let hist = CellHistogram::new(pseudo.pairs(), j);
    hist.check()?;
    Ok(hist.pair_energy())
}

/// Minimizer of `T̃_j` over a parameter grid; ties go to the earliest entry.
pub fn infimum_over_grid(
    pseudo: &PseudoSample,
    grid: &ParameterGrid,
    j: LevelIndex,
) -> Result<(CopulaSpec, LevelStatistic)> {
    let specs = grid.specs();
    let tables = specs
        .iter()
        .map(|s| scaling_coeffs(s, j))
        .collect::<Result<Vec<_>>>()?;
    let hist = CellHistogram::new(pseudo.pairs(), j);
    let (idx, value) = infimum_over_tables(&hist, &tables)?;
    Ok((
        specs[idx],
        LevelStatistic {
            j,
            value,
            per_cell: Some(CoefficientTable::new(j, hist.per_cell(&tables[idx])?)?),
        },
    ))
}

/// Grid scan against precomputed tables: index of the minimizer and its value.
///
/// The histogram-only term is computed once; each table adds
/// `Σ_k c_k² - 2 · 2^j / n · Σ_k c_k N_k`.
pub fn infimum_over_tables(
    hist: &CellHistogram,
    tables: &[CoefficientTable],
) -> Result<(usize, f64)> {
    hist.check()?;
    if tables.is_empty() {
        return Err(Error::Contract("parameter grid must not be empty".into()));
    }
    let shared = hist.pair_energy();
    let weight = 2.0 * hist.level.scale() / hist.n as f64;
    let mut best = (0usize, f64::INFINITY);
    for (i, table) in tables.iter().enumerate() {
        check_levels(hist.level, table)?;
        let mut acc = NeumaierSum::default();
        acc.add(shared);
        for (&count, &c) in hist.counts.iter().zip(table.values()) {
            acc.add(c * c - weight * c * count as f64);
        }
        let value = acc.total();
        if value < best.1 {
            best = (i, value);
        }
    }
    Ok(best)
}

/// Two-sample level statistic with `a_i = φ_{j,k}(A_i) - φ_{j,k}(B_i)` for
/// index-paired point sets.
///
/// With `P_k = #{i : A_i ∈ k, B_i ∉ k}` and `Q_k = #{i : B_i ∈ k, A_i ∉ k}`
/// the cell term is `2^{2j} ((P_k - Q_k)² - (P_k + Q_k)) / (n (n - 1))`.
pub fn two_sample_statistic(
    a: &[(f64, f64)],
    b: &[(f64, f64)],
    j: LevelIndex,
) -> Result<LevelStatistic> {
    let counts = two_sample_counts(a, b, j)?;
    let per_cell = two_sample_cells(&counts, a.len(), j);
    Ok(LevelStatistic {
        j,
        value: compensated_sum(per_cell.iter().copied()),
        per_cell: Some(CoefficientTable::new(j, per_cell)?),
    })
}

/// `(i, cell of a_i, cell of b_i)` at level `j` for the pairs falling in different cells.
pub(crate) fn two_sample_cells_of(
    a: &[(f64, f64)],
    b: &[(f64, f64)],
    j: LevelIndex,
) -> Result<Vec<(usize, usize, usize)>> {
    if a.len() != b.len() {
        return Err(Error::Contract(format!(
            "paired samples differ in size ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::Contract(format!(
            "U-statistic needs n2 >= 2, got {}",
            a.len()
        )));
    }
    Ok(a.iter()
        .zip(b)
        .enumerate()
        .map(|(i, (&(ua, va), &(ub, vb)))| (i, flat_cell_of(j, ua, va), flat_cell_of(j, ub, vb)))
        .filter(|(_, ka, kb)| ka != kb)
        .collect())
}

fn two_sample_counts(a: &[(f64, f64)], b: &[(f64, f64)], j: LevelIndex) -> Result<Vec<(i64, i64)>> {
    let mut counts = vec![(0i64, 0i64); j.cell_count()];
    for (_, ka, kb) in two_sample_cells_of(a, b, j)? {
        counts[ka].0 += 1;
        counts[kb].1 += 1;
    }
    Ok(counts)
}

fn two_sample_cells(counts: &[(i64, i64)], n: usize, j: LevelIndex) -> Vec<f64> {
    let nn = n as f64 * (n as f64 - 1.0);
    let sq = j_scale_sq(j);
    counts
        .iter()
        .map(|&(p, q)| sq * ((p - q) * (p - q) - (p + q)) as f64 / nn)
        .collect()
}

/// Two-sample statistic from differing cell pairs, with pair `i` swapped
/// when `swap[i]` holds. Used by the permutation calibration.
pub(crate) fn two_sample_value_swapped(
    pairs: &[(usize, usize, usize)],
    swap: Option<&[bool]>,
    n: usize,
    j: LevelIndex,
) -> f64 {
    let mut counts = vec![(0i64, 0i64); j.cell_count()];
    for &(i, ka, kb) in pairs {
        let (x, y) = if swap.is_some_and(|s| s[i]) {
            (kb, ka)
        } else {
            (ka, kb)
        };
        counts[x].0 += 1;
        counts[y].1 += 1;
    }
    compensated_sum(two_sample_cells(&counts, n, j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copula::{sample, tau_to_param, Family};
    use crate::empirical::{pseudo_observations, split_sample, BivariateSample};
    use crate::rng::stream;
    use crate::wavelet::trend_energy;
    use proptest::prelude::*;
    use rand::Rng;

    fn lvl(j: u32) -> LevelIndex {
        LevelIndex::new(j).unwrap()
    }

    fn uniform_pseudo(points: Vec<(f64, f64)>) -> PseudoSample {
        PseudoSample::from_uniform(points).unwrap()
    }

    /// Direct pair enumeration of `Σ_{i≠l} a_i a_l / (n(n-1))` and of `Σ |a_i a_l|`.
    fn naive(
        points: &[(f64, f64)],
        target: &CoefficientTable,
        j: LevelIndex,
        k: CellIndex,
    ) -> (f64, f64) {
        let c = target.get(k);
        let a: Vec<f64> = points
            .iter()
            .map(|&(u, v)| crate::wavelet::haar_scaling_eval(j, k, u, v).unwrap() - c)
            .collect();
        let n = a.len() as f64;
        let mut sum = NeumaierSum::default();
        let mut abs = 0.0;
        for i in 0..a.len() {
            for l in 0..a.len() {
                if i != l {
                    sum.add(a[i] * a[l]);
                    abs += (a[i] * a[l]).abs();
                }
            }
        }
        (sum.total() / (n * (n - 1.0)), abs / (n * (n - 1.0)))
    }

    #[test]
    fn two_points_in_one_cell() {
        let j = lvl(2);
        let spec = tau_to_param(Family::Clayton, 0.5).unwrap();
        let target = scaling_coeffs(&spec, j).unwrap();
        let k = CellIndex::new(j, 1, 2).unwrap();
        let p = uniform_pseudo(vec![(0.3, 0.6), (0.4, 0.7)]);
        let c = target.get(k);
        let expected = (4.0 - c) * (4.0 - c);
        assert!((theta_tilde_jk(&p, &target, j, k).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn zero_target_and_empty_cell() {
        let j = lvl(1);
        let p = uniform_pseudo(vec![(0.1, 0.1), (0.2, 0.3), (0.3, 0.2)]);
        let k = CellIndex::new(j, 1, 1).unwrap();
        assert_eq!(
            theta_tilde_jk(&p, &CoefficientTable::zeros(j), j, k).unwrap(),
            0.0
        );
    }

    #[test]
    fn clayton_random_instance_matches_double_sum() {
        let j = lvl(2);
        let spec = CopulaSpec::new(Family::Clayton, 2.0).unwrap();
        let target = scaling_coeffs(&spec, j).unwrap();
        let mut rng = stream(42, &[]);
        let pts: Vec<(f64, f64)> = (0..50).map(|_| (rng.random(), rng.random())).collect();
        let k = CellIndex::new(j, 1, 1).unwrap();
        let (oracle, _) = naive(&pts, &target, j, k);
        let fast = theta_tilde_jk(&uniform_pseudo(pts), &target, j, k).unwrap();
        assert!((fast - oracle).abs() <= 1e-10 * oracle.abs().max(1e-300) + 1e-15);
    }

    #[test]
    fn small_trivial_statistics() {
        let p = uniform_pseudo(vec![(0.5, 0.5), (0.5, 0.5)]);
        let t = t_tilde(&p, &CopulaSpec::Independence, lvl(0)).unwrap();
        assert_eq!(t.value, 0.0);
        let p = uniform_pseudo(vec![(0.1, 0.1), (0.9, 0.9)]);
        assert_eq!(norm_squared_estimate(&p, lvl(0)).unwrap(), 1.0);
        assert!(norm_squared_estimate(&uniform_pseudo(vec![(0.1, 0.1)]), lvl(0)).is_err());
    }

    #[test]
    fn t_hat_and_t_tilde_agree_on_identical_points() {
        let pts = vec![
            (0.1, 0.2),
            (0.25, 0.5),
            (0.75, 0.5),
            (0.9, 0.95),
            (0.3, 0.3),
        ];
        let spec = tau_to_param(Family::Frank, 0.4).unwrap();
        let a = t_hat(&pts, &spec, lvl(2)).unwrap();
        let b = t_tilde(&uniform_pseudo(pts), &spec, lvl(2)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn infimum_examples() {
        let spec = tau_to_param(Family::Gumbel, 0.3).unwrap();
        let pts = sample(&spec, 400, &mut stream(1, &[])).unwrap();
        let p = uniform_pseudo(pts);
        let single = ParameterGrid::single(spec);
        assert_eq!(infimum_over_grid(&p, &single, lvl(2)).unwrap().0, spec);

        let grid = ParameterGrid::default_for(Family::Gumbel).unwrap();
        let (best, stat) = infimum_over_grid(&p, &grid, lvl(2)).unwrap();
        for s in grid.specs() {
            let v = t_tilde(&p, &s, lvl(2)).unwrap().value;
            assert!(stat.value <= v + 1e-15);
            if s == best {
                assert!((stat.value - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn infimum_breaks_ties_by_grid_order() {
        let j = lvl(1);
        let tables = vec![CoefficientTable::uniform(j), CoefficientTable::uniform(j)];
        let hist = CellHistogram::new(&[(0.1, 0.1), (0.9, 0.2), (0.4, 0.8)], j);
        assert_eq!(infimum_over_tables(&hist, &tables).unwrap().0, 0);
    }

    #[test]
    fn direct_statistic_is_unbiased_under_independence() {
        let j = lvl(1);
        let reps = 500;
        let vals: Vec<f64> = (0..reps)
            .map(|r| {
                let pts = sample(&CopulaSpec::Independence, 256, &mut stream(3, &[r])).unwrap();
                t_hat(&pts, &CopulaSpec::Independence, j).unwrap().value
            })
            .collect();
        let mean = vals.iter().sum::<f64>() / reps as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps as f64 - 1.0);
        assert!(
            mean.abs() <= 3.0 * (var / reps as f64).sqrt(),
            "mean {mean}"
        );
    }

    #[test]
    fn norm_estimate_tracks_trend_energy() {
        let j = lvl(3);
        let spec = CopulaSpec::new(Family::Clayton, 2.0).unwrap();
        let truth = trend_energy(&scaling_coeffs(&spec, j).unwrap());
        let reps = 200;
        let vals: Vec<f64> = (0..reps)
            .map(|r| {
                let pts = sample(&spec, 2000, &mut stream(4, &[r])).unwrap();
                norm_squared_estimate(&uniform_pseudo(pts), j).unwrap()
            })
            .collect();
        let mean = vals.iter().sum::<f64>() / reps as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps as f64 - 1.0);
        assert!(
            (mean - truth).abs() <= 3.0 * (var / reps as f64).sqrt(),
            "{mean} vs {truth}"
        );
    }

    #[test]
    fn rank_statistic_runs_end_to_end() {
        let spec = tau_to_param(Family::Student { nu: 4 }, 0.25).unwrap();
        let data = BivariateSample::new(sample(&spec, 512, &mut stream(5, &[])).unwrap()).unwrap();
        let split = split_sample(&data, 0.5, &mut stream(5, &[1])).unwrap();
        let p = pseudo_observations(&split);
        let s = t_tilde(&p, &spec, lvl(3)).unwrap();
        let cells = s.per_cell.as_ref().unwrap();
        assert!((compensated_sum(cells.values().iter().copied()) - s.value).abs() <= 1e-10);
    }

    #[test]
    fn two_sample_matches_pair_sum() {
        let mut rng = stream(9, &[]);
        for j in 0..=3 {
            let j = lvl(j);
            let a: Vec<(f64, f64)> = (0..60).map(|_| (rng.random(), rng.random())).collect();
            let b: Vec<(f64, f64)> = (0..60)
                .map(|_| (rng.random::<f64>().powi(2), rng.random()))
                .collect();
            let stat = two_sample_statistic(&a, &b, j).unwrap();
            let n = a.len() as f64;
            let mut oracle = NeumaierSum::default();
            for k in 0..j.cell_count() {
                let k = CellIndex::from_flat(j, k);
                let d: Vec<f64> = a
                    .iter()
                    .zip(&b)
                    .map(|(&(ua, va), &(ub, vb))| {
                        crate::wavelet::haar_scaling_eval(j, k, ua, va).unwrap()
                            - crate::wavelet::haar_scaling_eval(j, k, ub, vb).unwrap()
                    })
                    .collect();
                for i in 0..d.len() {
                    for l in 0..d.len() {
                        if i != l {
                            oracle.add(d[i] * d[l] / (n * (n - 1.0)));
                        }
                    }
                }
            }
            assert!((stat.value - oracle.total()).abs() < 1e-10, "{j}");
            assert_eq!(stat.value, two_sample_statistic(&b, &a, j).unwrap().value);
            assert_eq!(two_sample_statistic(&a, &a, j).unwrap().value, 0.0);
        }
    }

    fn arb_points(max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
        proptest::collection::vec((0.0f64..=1.0, 0.0f64..=1.0), 2..max)
    }

    fn arb_spec() -> impl Strategy<Value = CopulaSpec> {
        (0usize..6, 0.05f64..0.85).prop_map(|(f, tau)| {
            let family = [
                Family::Independence,
                Family::Gaussian,
                Family::Student { nu: 4 },
                Family::Clayton,
                Family::Gumbel,
                Family::Frank,
            ][f];
            if family == Family::Independence {
                CopulaSpec::Independence
            } else {
                tau_to_param(family, tau).unwrap()
            }
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn binned_closed_form_and_pair_sum_agree(pts in arb_points(120), spec in arb_spec(), j in 0u32..=3, cell in 0usize..64) {
            let j = lvl(j);
            let target = scaling_coeffs(&spec, j).unwrap();
            let k = CellIndex::from_flat(j, cell % j.cell_count());
            let (oracle, scale) = naive(&pts, &target, j, k);
            let direct = theta_from_points(&pts, &target, j, k).unwrap();
            let binned = CellHistogram::new(&pts, j).per_cell(&target).unwrap()[k.flat(j)];
            prop_assert!((direct - oracle).abs() <= 1e-10 * scale.max(f64::MIN_POSITIVE));
            prop_assert!((binned - oracle).abs() <= 1e-10 * scale.max(f64::MIN_POSITIVE));
        }

        #[test]
        fn statistic_is_permutation_invariant(pts in arb_points(80), seed in 0u64..1000, spec in arb_spec()) {
            let j = lvl(2);
            let mut shuffled = pts.clone();
            use rand::seq::SliceRandom;
            shuffled.shuffle(&mut stream(seed, &[]));
            let a = t_hat(&pts, &spec, j).unwrap().value;
            let b = t_hat(&shuffled, &spec, j).unwrap().value;
            prop_assert_eq!(a, b);
        }

        #[test]
        fn add_then_remove_restores_value(pts in arb_points(60), extra in (0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0)) {
            let j = lvl(2);
            let spec = CopulaSpec::new(Family::Clayton, 1.5).unwrap();
            let before = t_hat(&pts, &spec, j).unwrap().value;
            let mut more = pts.clone();
            more.push((extra.0, extra.1));
            more.push((extra.2, extra.3));
            let _ = t_hat(&more, &spec, j).unwrap();
            more.truncate(pts.len());
            prop_assert_eq!(before, t_hat(&more, &spec, j).unwrap().value);
        }

        #[test]
        fn level_value_is_sum_of_cells(pts in arb_points(100), spec in arb_spec(), j in 0u32..=3) {
            let s = t_hat(&pts, &spec, lvl(j)).unwrap();
            let total: f64 = compensated_sum(s.per_cell.unwrap().values().iter().copied());
            prop_assert!((total - s.value).abs() <= 1e-10);
        }
    }
}
