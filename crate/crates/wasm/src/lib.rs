//! WebAssembly bindings for the browser demo in `www/`.

use wasm_bindgen::prelude::*;

use copula_gof::copula::{sample, scaling_coeffs, tau_to_param, CopulaSpec, Family};
use copula_gof::empirical::BivariateSample;
use copula_gof::gof::{adaptive_test, TestConfig};
use copula_gof::report;
use copula_gof::rng::{label, stream};
use copula_gof::wavelet::LevelIndex;

fn spec_of(family: &str, tau: f64) -> Result<CopulaSpec, JsError> {
    let family: Family = family.parse()?;
    if family == Family::Independence {
        return Ok(CopulaSpec::Independence);
    }
    Ok(tau_to_param(family, tau)?)
}

/// Average copula density on each cell of the `2^j x 2^j` grid, row-major in `(k1, k2)`.
#[wasm_bindgen]
pub fn density_heatmap(family: &str, tau: f64, j: u32) -> Result<Vec<f64>, JsError> {
    let j = LevelIndex::new(j.min(7))?;
    let table = scaling_coeffs(&spec_of(family, tau)?, j)?;
    Ok(table.values().iter().map(|c| c * j.scale()).collect())
}

/// `n` points as a flat `[u0, v0, u1, v1, ...]` array.
#[wasm_bindgen]
pub fn sample_points(family: &str, tau: f64, n: usize, seed: u32) -> Result<Vec<f64>, JsError> {
    let points = sample(
        &spec_of(family, tau)?,
        n,
        &mut stream(u64::from(seed), &[label::DATA]),
    )?;
    Ok(points.into_iter().flat_map(|(u, v)| [u, v]).collect())
}

/// Draw `n` points from the true copula and test them against `h0_family`; returns the JSON report.
#[wasm_bindgen]
pub fn simulate_and_test(
    true_family: &str,
    tau: f64,
    h0_family: &str,
    n: usize,
    seed: u32,
) -> Result<String, JsError> {
    let seed = u64::from(seed);
    let points = sample(
        &spec_of(true_family, tau)?,
        n,
        &mut stream(seed, &[label::DATA]),
    )?;
    let data = BivariateSample::new(points)?;
    let config = TestConfig {
        seed,
        ..TestConfig::default()
    };
    let report = adaptive_test(&data, h0_family.parse()?, &config)?;
    Ok(report::to_json(&report)?)
}
