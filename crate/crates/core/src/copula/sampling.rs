use std::f64::consts::PI;

use rand::distr::Open01;
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, Exp1, Gamma, StandardNormal};

use super::CopulaSpec;
use crate::error::{Error, Result};
use crate::special::{normal_cdf, t_cdf};

/// Largest double below 1; samplers never emit 0 or 1.
const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

#[inline]
fn open(x: f64) -> f64 {
    x.clamp(f64::MIN_POSITIVE, BELOW_ONE)
}

/// Draw `n` i.i.d. pairs from a copula.
///
/// Elliptical families use the Cholesky factor of the correlation matrix
/// (with chi-square mixing for Student), Clayton a Gamma frailty, Gumbel a
/// positive-stable frailty and Frank conditional inversion.
pub fn sample<R: Rng + ?Sized>(
    spec: &CopulaSpec,
    n: usize,
    rng: &mut R,
) -> Result<Vec<(f64, f64)>> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::Contract("sample size must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(n);
    match *spec {
        CopulaSpec::Independence => {
            for _ in 0..n {
                out.push((rng.sample(Open01), rng.sample(Open01)));
            }
        }
        CopulaSpec::Gaussian { rho } => {
            let c = (1.0 - rho * rho).sqrt();
            for _ in 0..n {
                let z1: f64 = rng.sample(StandardNormal);
                let z2: f64 = rng.sample(StandardNormal);
                out.push((open(normal_cdf(z1)), open(normal_cdf(rho * z1 + c * z2))));
            }
        }
        CopulaSpec::Student { rho, nu } => {
            let c = (1.0 - rho * rho).sqrt();
            let nu = nu as f64;
            let chi = ChiSquared::new(nu).map_err(|e| Error::Domain(e.to_string()))?;
            for _ in 0..n {
                let z1: f64 = rng.sample(StandardNormal);
                let z2: f64 = rng.sample(StandardNormal);
                let w: f64 = chi.sample(rng);
                let s = (nu / w).sqrt();
                out.push((
                    open(t_cdf(z1 * s, nu)),
                    open(t_cdf((rho * z1 + c * z2) * s, nu)),
                ));
            }
        }
        CopulaSpec::Clayton { theta } => {
            let frailty = Gamma::new(1.0 / theta, 1.0).map_err(|e| Error::Domain(e.to_string()))?;
            for _ in 0..n {
                let v: f64 = frailty.sample(rng);
                let e1: f64 = rng.sample(Exp1);
                let e2: f64 = rng.sample(Exp1);
                // Laplace transform of the frailty: (1 + t)^{-1/θ}.
                let lt = |t: f64| (-(t.ln_1p()) / theta).exp();
                out.push((open(lt(e1 / v)), open(lt(e2 / v))));
            }
        }
        CopulaSpec::Gumbel { theta } => {
            let alpha = 1.0 / theta;
            for _ in 0..n {
                let s = if theta == 1.0 {
                    1.0
                } else {
                    positive_stable(alpha, rng)
                };
                let e1: f64 = rng.sample(Exp1);
                let e2: f64 = rng.sample(Exp1);
                let lt = |t: f64| (-t.powf(alpha)).exp();
                out.push((open(lt(e1 / s)), open(lt(e2 / s))));
            }
        }
        CopulaSpec::Frank { theta } => {
            let em = (-theta).exp_m1();
            for _ in 0..n {
                let u: f64 = rng.sample(Open01);
                let p: f64 = rng.sample(Open01);
                let a = (-theta * u).exp();
                let v = -(p * em / (p + (1.0 - p) * a)).ln_1p() / theta;
                out.push((u, open(v)));
            }
        }
    }
    Ok(out)
}

/// Positive stable variate with Laplace transform `exp(-t^α)`, `0 < α < 1`
/// (Kanter's representation).
fn positive_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let angle: f64 = PI * rng.sample::<f64, _>(Open01);
    let w: f64 = rng.sample(Exp1);
    let a = (alpha * angle).sin() / angle.sin().powf(1.0 / alpha);
    let b = ((1.0 - alpha) * angle).sin() / w;
    a * b.powf((1.0 - alpha) / alpha)
}
