//! Sample splitting, empirical margins, rank pseudo-observations and the
//! empirical Kendall tau.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Observed pairs `(x, y)` with arbitrary real margins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BivariateSample {
    pairs: Vec<(f64, f64)>,
}

impl BivariateSample {
    /// At least four finite pairs.
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self> {
        if pairs.len() < 4 {
            return Err(Error::Size(format!(
                "need at least 4 observations, got {}",
                pairs.len()
            )));
        }
        if let Some(i) = pairs
            .iter()
            .position(|(x, y)| !x.is_finite() || !y.is_finite())
        {
            return Err(Error::Contract(format!("observation {i} is not finite")));
        }
        Ok(BivariateSample { pairs })
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn xs(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.1).collect()
    }

    /// First `n` observations.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        BivariateSample::new(self.pairs[..n.min(self.len())].to_vec())
    }

    fn subset(&self, idx: &[usize]) -> Self {
        BivariateSample {
            pairs: idx.iter().map(|&i| self.pairs[i]).collect(),
        }
    }
}

/// Disjoint halves of a sample: `part1` estimates the margins, `part2`
/// feeds the U-statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSample {
    pub part1: BivariateSample,
    pub part2: BivariateSample,
    pub pi: f64,
    /// Original indices of the part-2 observations.
    pub part2_indices: Vec<usize>,
}

/// Sizes `(n1, n2)` of a split with `n1 = ⌈π n⌉`.
pub fn split_sizes(n: usize, pi: f64) -> Result<(usize, usize)> {
    if !(pi > 0.0 && pi < 1.0) {
        return Err(Error::Config(format!(
            "split fraction must lie in (0, 1), got {pi}"
        )));
    }
    if (n as f64) * pi.min(1.0 - pi) < 2.0 {
        return Err(Error::Config(format!(
            "split of {n} observations with pi = {pi} leaves a part with fewer than 2 points"
        )));
    }
    // Guard against 0.3 * 10 = 3.0000000000000004.
    let n1 = ((pi * n as f64) - 1e-9).ceil() as usize;
    let n2 = n - n1;
    if n1 < 1 || n2 < 2 {
        return Err(Error::Config(format!(
            "degenerate split sizes ({n1}, {n2})"
        )));
    }
    Ok((n1, n2))
}

/// Uniformly random partition into parts of sizes `⌈π n⌉` and the rest.
/// Each part keeps the original observation order.
pub fn split_sample<R: Rng + ?Sized>(
    data: &BivariateSample,
    pi: f64,
    rng: &mut R,
) -> Result<SplitSample> {
    let n = data.len();
    let (n1, _) = split_sizes(n, pi)?;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let (first, second) = idx.split_at_mut(n1);
    first.sort_unstable();
    second.sort_unstable();
    Ok(SplitSample {
        part1: data.subset(first),
        part2: data.subset(second),
        pi,
        part2_indices: second.to_vec(),
    })
}

/// Right-continuous empirical distribution function.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMargin {
    sorted: Vec<f64>,
}

impl EmpiricalMargin {
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Contract(
                "empirical margin needs at least one value".into(),
            ));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(EmpiricalMargin { sorted })
    }

    /// `#{i : X_i <= x}`.
    pub fn count_le(&self, x: f64) -> usize {
        self.sorted.partition_point(|&v| v <= x)
    }

    /// `F̂(x) = #{i : X_i <= x} / n`.
    pub fn eval(&self, x: f64) -> f64 {
        self.count_le(x) as f64 / self.sorted.len() as f64
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }
}

pub fn empirical_margin(values: &[f64]) -> Result<EmpiricalMargin> {
    EmpiricalMargin::new(values)
}

/// Rank-transformed pairs `(R_i / n1, S_i / n1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoSample {
    pairs: Vec<(f64, f64)>,
    n1: usize,
    n2: usize,
}

impl PseudoSample {
    /// Wrap points that already live in `[0,1]²` (e.g. direct copula draws).
    pub fn from_uniform(pairs: Vec<(f64, f64)>) -> Result<Self> {
        if let Some(i) = pairs
            .iter()
            .position(|&(u, v)| !(0.0..=1.0).contains(&u) || !(0.0..=1.0).contains(&v))
        {
            return Err(Error::Contract(format!(
                "pseudo-observation {i} outside [0,1]^2"
            )));
        }
        let n = pairs.len();
        Ok(PseudoSample {
            pairs,
            n1: n,
            n2: n,
        })
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    /// Rank normalizer.
    pub fn n1(&self) -> usize {
        self.n1
    }

    /// Number of pseudo-observations.
    pub fn n2(&self) -> usize {
        self.n2
    }

    /// Pairs with zero coordinates moved to `1/(2 n1)`; used only where a
    /// copula density is evaluated.
    pub fn clamped_pairs(&self) -> Vec<(f64, f64)> {
        let floor = 0.5 / self.n1 as f64;
        self.pairs
            .iter()
            .map(|&(u, v)| {
                (
                    if u == 0.0 { floor } else { u },
                    if v == 0.0 { floor } else { v },
                )
            })
            .collect()
    }
}

/// Pseudo-observations of part 2 built from the part-1 empirical margins.
pub fn pseudo_observations(split: &SplitSample) -> PseudoSample {
    let n1 = split.part1.len();
    let fx = EmpiricalMargin::new(&split.part1.xs()).expect("part 1 is non-empty");
    let fy = EmpiricalMargin::new(&split.part1.ys()).expect("part 1 is non-empty");
    let denom = n1 as f64;
    let pairs: Vec<(f64, f64)> = split
        .part2
        .pairs()
        .iter()
        .map(|&(x, y)| (fx.count_le(x) as f64 / denom, fy.count_le(y) as f64 / denom))
        .collect();
    PseudoSample {
        n2: pairs.len(),
        pairs,
        n1,
    }
}

/// Full-sample rank transform `(R_i / n, S_i / n)` with `R_i = #{l : X_l <= X_i}`.
pub fn full_sample_pseudo(data: &BivariateSample) -> PseudoSample {
    let n = data.len();
    let fx = EmpiricalMargin::new(&data.xs()).expect("non-empty");
    let fy = EmpiricalMargin::new(&data.ys()).expect("non-empty");
    let pairs = data
        .pairs()
        .iter()
        .map(|&(x, y)| (fx.eval(x), fy.eval(y)))
        .collect();
    PseudoSample {
        pairs,
        n1: n,
        n2: n,
    }
}

/// Above this size the `O(n log n)` inversion count replaces the pair loop.
pub const KENDALL_BRUTE_FORCE_MAX: usize = 20_000;

/// Kendall's tau-a: `(C - D) / (n(n-1)/2)`, ties counted as neither.
pub fn kendall_tau_empirical(data: &BivariateSample) -> f64 {
    kendall_tau_pairs(data.pairs())
}

pub(crate) fn kendall_tau_pairs(pairs: &[(f64, f64)]) -> f64 {
    let n = pairs.len();
    if n < 2 {
        return 0.0;
    }
    let numerator = if n <= KENDALL_BRUTE_FORCE_MAX {
        concordance_brute_force(pairs)
    } else {
        concordance_merge_sort(pairs)
    };
    let total = (n as i64) * (n as i64 - 1) / 2;
    numerator as f64 / total as f64
}

/// `C - D` by enumerating all pairs.
pub fn concordance_brute_force(pairs: &[(f64, f64)]) -> i64 {
    let mut s = 0i64;
    for i in 0..pairs.len() {
        let (xi, yi) = pairs[i];
        for &(xl, yl) in &pairs[i + 1..] {
            let dx = (xl - xi).partial_cmp(&0.0).map_or(0, |o| o as i64);
            let dy = (yl - yi).partial_cmp(&0.0).map_or(0, |o| o as i64);
            s += dx * dy;
        }
    }
    s
}

/// `C - D` by counting inversions after sorting on `(x, y)` (Knight's method).
pub fn concordance_merge_sort(pairs: &[(f64, f64)]) -> i64 {
    let n = pairs.len() as i64;
    let mut sorted = pairs.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let tie_pairs = |run: i64| run * (run - 1) / 2;
    let mut tied_x = 0i64;
    let mut tied_xy = 0i64;
    let mut i = 0;
    while i < sorted.len() {
        let mut l = i + 1;
        while l < sorted.len() && sorted[l].0 == sorted[i].0 {
            l += 1;
        }
        tied_x += tie_pairs((l - i) as i64);
        let mut a = i;
        while a < l {
            let mut b = a + 1;
            while b < l && sorted[b].1 == sorted[a].1 {
                b += 1;
            }
            tied_xy += tie_pairs((b - a) as i64);
            a = b;
        }
        i = l;
    }

    let mut ys: Vec<f64> = sorted.iter().map(|p| p.1).collect();
    let mut buf = vec![0.0; ys.len()];
    let discordant = count_inversions(&mut ys, &mut buf);

    let mut tied_y = 0i64;
    let mut i = 0;
    while i < ys.len() {
        let mut l = i + 1;
        while l < ys.len() && ys[l] == ys[i] {
            l += 1;
        }
        tied_y += tie_pairs((l - i) as i64);
        i = l;
    }
    let total = n * (n - 1) / 2;
    total - tied_x - tied_y + tied_xy - 2 * discordant
}

/// Sorts `v` and returns the number of strict inversions.
fn count_inversions(v: &mut [f64], buf: &mut [f64]) -> i64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut count = {
        let (left, right) = v.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        count_inversions(left, bl) + count_inversions(right, br)
    };
    let (mut i, mut l, mut k) = (0, mid, 0);
    while i < mid && l < n {
        if v[l] < v[i] {
            buf[k] = v[l];
            count += (mid - i) as i64;
            l += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - l].copy_from_slice(&v[l..n]);
    v.copy_from_slice(&buf[..n]);
    count
}
