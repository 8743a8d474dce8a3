use super::density::{cdf, Conditional};
use super::CopulaSpec;
use crate::error::{Error, Result};
use crate::special::integrate_vec;
use crate::wavelet::{CoefficientTable, LevelIndex};

/// Finest level for which coefficient tables are produced.
pub const MAX_COEFF_LEVEL: u32 = 12;

/// Haar scaling coefficients `c_{j,k} = 2^j · P(cell k)` of a copula.
///
/// Archimedean families use rectangle differences of the closed-form CDF on
/// the edge grid. The elliptical families integrate the conditional
/// distribution across each column of cells with adaptive Gauss–Kronrod
/// quadrature.
pub fn scaling_coeffs(spec: &CopulaSpec, j: LevelIndex) -> Result<CoefficientTable> {
    spec.validate()?;
    if j.get() > MAX_COEFF_LEVEL {
        return Err(Error::Config(format!(
            "coefficient tables limited to level {MAX_COEFF_LEVEL}, got {j}"
        )));
    }
    let side = j.side();
    let edges: Vec<f64> = (0..=side).map(|m| m as f64 / side as f64).collect();
    let mut mass = vec![0.0; side * side];
    match spec {
        CopulaSpec::Independence => return Ok(CoefficientTable::uniform(j)),
        CopulaSpec::Gaussian { .. } | CopulaSpec::Student { .. } => {
            let h = Conditional::new(spec);
            let scores: Vec<f64> = edges[1..side].iter().map(|&e| h.score(e)).collect();
            for k1 in 0..side {
                let (a, b) = (edges[k1], edges[k1 + 1]);
                // Column integrals of h(e_m | w) for the interior edges e_1..e_{side-1}.
                let integrals = if scores.is_empty() {
                    Vec::new()
                } else {
                    integrate_vec(
                        |w, out: &mut [f64]| {
                            let xw = h.score(w);
                            for (o, &xv) in out.iter_mut().zip(&scores) {
                                *o = h.eval_scores(xv, xw);
                            }
                        },
                        a,
                        b,
                        scores.len(),
                        1e-13,
                    )
                };
                let width = b - a;
                let column = |m: usize| -> f64 {
                    if m == 0 {
                        0.0
                    } else if m == side {
                        width
                    } else {
                        integrals[m - 1]
                    }
                };
                for k2 in 0..side {
                    mass[k1 * side + k2] = column(k2 + 1) - column(k2);
                }
            }
        }
        _ => {
            let mut grid = vec![0.0; (side + 1) * (side + 1)];
            for (i, &u) in edges.iter().enumerate() {
                for (m, &v) in edges.iter().enumerate() {
                    grid[i * (side + 1) + m] = cdf(spec, u, v)?;
                }
            }
            let at = |i: usize, m: usize| grid[i * (side + 1) + m];
            for k1 in 0..side {
                for k2 in 0..side {
                    mass[k1 * side + k2] =
                        at(k1 + 1, k2 + 1) - at(k1, k2 + 1) - at(k1 + 1, k2) + at(k1, k2);
                }
            }
        }
    }
    let scale = j.scale();
    CoefficientTable::new(j, mass.into_iter().map(|p| p * scale).collect())
}
