//! Tensor Haar scaling basis on the unit square.
//!
//! A level `j` splits `[0,1]²` into `2^j × 2^j` half-open cells; the top and
//! right edges are folded into the last cell so every point has exactly one
//! active cell. The scaling function of cell `k` equals `2^j` on its cell.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::compensated_sum;

/// Largest level an index grid may use.
pub const MAX_LEVEL: u32 = 30;

/// Resolution level `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LevelIndex(u32);

impl LevelIndex {
    pub fn new(j: u32) -> Result<Self> {
        if j > MAX_LEVEL {
            return Err(Error::Contract(format!("level {j} exceeds {MAX_LEVEL}")));
        }
        Ok(LevelIndex(j))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Cells per axis, `2^j`.
    pub fn side(self) -> usize {
        1usize << self.0
    }

    /// `2^j` as a float; also the value of the scaling function on its cell.
    pub fn scale(self) -> f64 {
        (self.0 as f64).exp2()
    }

    pub fn cell_count(self) -> usize {
        self.side() * self.side()
    }
}

impl std::fmt::Display for LevelIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Cell `k = (k1, k2)` of a level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CellIndex {
    pub k1: usize,
    pub k2: usize,
}

impl CellIndex {
    pub fn new(j: LevelIndex, k1: usize, k2: usize) -> Result<Self> {
        let side = j.side();
        if k1 >= side || k2 >= side {
            return Err(Error::Contract(format!(
                "cell ({k1},{k2}) invalid for level {j} (side {side})"
            )));
        }
        Ok(CellIndex { k1, k2 })
    }

    /// Row-major position inside a dense table of the given level.
    pub fn flat(self, j: LevelIndex) -> usize {
        self.k1 * j.side() + self.k2
    }

    pub fn from_flat(j: LevelIndex, idx: usize) -> Self {
        CellIndex {
            k1: idx / j.side(),
            k2: idx % j.side(),
        }
    }
}

/// Dense table of per-cell values at one level, indexed row-major by `(k1, k2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTable {
    level: LevelIndex,
    values: Vec<f64>,
}

impl CoefficientTable {
    pub fn new(level: LevelIndex, values: Vec<f64>) -> Result<Self> {
        if values.len() != level.cell_count() {
            return Err(Error::Contract(format!(
                "table of level {level} needs {} entries, got {}",
                level.cell_count(),
                values.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Contract(format!("non-finite table entry at {bad}")));
        }
        Ok(CoefficientTable { level, values })
    }

    pub fn zeros(level: LevelIndex) -> Self {
        CoefficientTable {
            level,
            values: vec![0.0; level.cell_count()],
        }
    }

    /// Coefficients of the independence copula: every entry `2^{-j}`.
    pub fn uniform(level: LevelIndex) -> Self {
        CoefficientTable {
            level,
            values: vec![1.0 / level.scale(); level.cell_count()],
        }
    }

    pub fn level(&self) -> LevelIndex {
        self.level
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, k: CellIndex) -> f64 {
        self.values[k.flat(self.level)]
    }

    /// `Σ_k 2^{-j} values[k]`; equals 1 for the coefficients of a density.
    pub fn mass(&self) -> f64 {
        compensated_sum(self.values.iter().copied()) / self.level.scale()
    }

    /// Coarsen by one level: each parent is half the sum of its four children.
    pub fn coarsen(&self) -> Result<Self> {
        let j = self.level.get();
        if j == 0 {
            return Err(Error::Contract("cannot coarsen level 0".into()));
        }
        let parent = LevelIndex(j - 1);
        let side = parent.side();
        let child_side = self.level.side();
        let mut values = vec![0.0; parent.cell_count()];
        for k1 in 0..side {
            for k2 in 0..side {
                let c = |a: usize, b: usize| self.values[(2 * k1 + a) * child_side + 2 * k2 + b];
                values[k1 * side + k2] = 0.5 * (c(0, 0) + c(0, 1) + c(1, 0) + c(1, 1));
            }
        }
        Ok(CoefficientTable {
            level: parent,
            values,
        })
    }
}

/// Ordered, non-empty set of levels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LevelSet(Vec<LevelIndex>);

impl LevelSet {
    pub fn new(mut levels: Vec<LevelIndex>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Config("level set must not be empty".into()));
        }
        let before = levels.len();
        levels.sort();
        levels.dedup();
        if levels.len() != before {
            return Err(Error::Config("level set contains duplicates".into()));
        }
        Ok(LevelSet(levels))
    }

    /// `{lo, lo+1, …, hi}`.
    pub fn range(lo: u32, hi: u32) -> Result<Self> {
        if lo > hi {
            return Err(Error::Config(format!("empty level range {lo}..={hi}")));
        }
        LevelSet::new((lo..=hi).map(LevelIndex::new).collect::<Result<_>>()?)
    }

    pub fn levels(&self) -> &[LevelIndex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> LevelIndex {
        *self.0.last().expect("non-empty")
    }
}

/// Value of the tensor Haar scaling function `φ_{j,k}` at `(u, v)`.
pub fn haar_scaling_eval(j: LevelIndex, k: CellIndex, u: f64, v: f64) -> Result<f64> {
    CellIndex::new(j, k.k1, k.k2)?;
    if cell_of(j, u, v) == k {
        Ok(j.scale())
    } else {
        Ok(0.0)
    }
}

#[inline]
fn axis_cell(side: usize, scale: f64, x: f64) -> usize {
    let x = x.clamp(0.0, 1.0);
    ((x * scale) as usize).min(side - 1)
}

/// The unique cell of level `j` containing `(u, v)`.
pub fn cell_of(j: LevelIndex, u: f64, v: f64) -> CellIndex {
    let side = j.side();
    let scale = j.scale();
    CellIndex {
        k1: axis_cell(side, scale, u),
        k2: axis_cell(side, scale, v),
    }
}

/// Row-major cell position of `(u, v)`; the hot path of the binning code.
#[inline]
pub(crate) fn flat_cell_of(j: LevelIndex, u: f64, v: f64) -> usize {
    let side = j.side();
    let scale = j.scale();
    axis_cell(side, scale, u) * side + axis_cell(side, scale, v)
}

/// Trend energy `Σ_k values[k]²` of a coefficient table.
pub fn trend_energy(coeffs: &CoefficientTable) -> f64 {
    compensated_sum(coeffs.values.iter().map(|v| v * v))
}

/// Outcome of the theoretical level-window computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LevelWindow {
    Window {
        levels: LevelSet,
        j0: f64,
        j_inf: f64,
    },
    Empty {
        j0: f64,
        j_inf: f64,
    },
}

impl LevelWindow {
    pub fn levels(&self) -> Option<&LevelSet> {
        match self {
            LevelWindow::Window { levels, .. } => Some(levels),
            LevelWindow::Empty { .. } => None,
        }
    }
}

/// Level window `{⌊j0⌋, …, ⌊j∞⌋}` from the sample sizes and the regularity
/// order `q` of the scaling function:
/// `2^{j0} = log n2 · log n1`,
/// `2^{j∞} = (n2 / log n2)^{1/2} ∧ (n1 / log n1)^{1/2 - 1/(2q)}`.
pub fn theoretical_level_set(n1: usize, n2: usize, q: u32) -> Result<LevelWindow> {
    if n1 < 8 || n2 < 8 {
        return Err(Error::Contract(format!(
            "level window needs n1, n2 >= 8 (got {n1}, {n2})"
        )));
    }
    if q == 0 {
        return Err(Error::Contract("regularity order q must be >= 1".into()));
    }
    let (n1f, n2f) = (n1 as f64, n2 as f64);
    let j0 = (n2f.ln() * n1f.ln()).log2();
    let first = (n2f / n2f.ln()).sqrt();
    let second = (n1f / n1f.ln()).powf(0.5 - 0.5 / q as f64);
    let j_inf = first.min(second).log2();
    let lo = j0.floor();
    let hi = j_inf.floor().min(MAX_LEVEL as f64);
    if lo > hi {
        return Ok(LevelWindow::Empty { j0, j_inf });
    }
    let levels = LevelSet::range(lo as u32, hi as u32)?;
    Ok(LevelWindow::Window { levels, j0, j_inf })
}
