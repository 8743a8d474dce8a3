use super::CopulaSpec;
use crate::error::Result;
use crate::special::{integrate, normal_cdf, normal_quantile, t_cdf, t_ln_pdf, t_quantile};

use statrs::function::gamma::ln_gamma;

/// Clamp applied before density evaluation.
pub(crate) const EDGE_EPS: f64 = 1e-12;

/// Copula density `c(u, v)`. Points on the boundary are clamped to
/// `[ε, 1 - ε]` with `ε = 1e-12`.
pub fn density(spec: &CopulaSpec, u: f64, v: f64) -> Result<f64> {
    spec.validate()?;
    let u = u.clamp(EDGE_EPS, 1.0 - EDGE_EPS);
    let v = v.clamp(EDGE_EPS, 1.0 - EDGE_EPS);
    Ok(match *spec {
        CopulaSpec::Independence => 1.0,
        CopulaSpec::Gaussian { rho } => {
            let (x, y) = (normal_quantile(u), normal_quantile(v));
            let r2 = 1.0 - rho * rho;
            (-(rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * r2)).exp() / r2.sqrt()
        }
        CopulaSpec::Student { rho, nu } => {
            let nu = nu as f64;
            let (x, y) = (t_quantile(u, nu), t_quantile(v, nu));
            let r2 = 1.0 - rho * rho;
            let q = (x * x - 2.0 * rho * x * y + y * y) / r2;
            let ln_joint = ln_gamma(0.5 * (nu + 2.0))
                - ln_gamma(0.5 * nu)
                - (nu * std::f64::consts::PI).ln()
                - 0.5 * r2.ln()
                - 0.5 * (nu + 2.0) * (q / nu).ln_1p();
            (ln_joint - t_ln_pdf(x, nu) - t_ln_pdf(y, nu)).exp()
        }
        CopulaSpec::Clayton { theta } => {
            let (lu, lv) = (u.ln(), v.ln());
            let l = clayton_log_sum(theta, lu, lv);
            ((1.0 + theta).ln() - (theta + 1.0) * (lu + lv) - (1.0 / theta + 2.0) * l).exp()
        }
        CopulaSpec::Gumbel { theta } => {
            let (x, y) = (-u.ln(), -v.ln());
            let s = x.powf(theta) + y.powf(theta);
            let a = s.powf(1.0 / theta);
            let ln_c = -a - u.ln() - v.ln()
                + (theta - 1.0) * (x * y).ln()
                + (2.0 / theta - 2.0) * s.ln()
                + ((a + theta - 1.0) / a).ln();
            ln_c.exp()
        }
        CopulaSpec::Frank { theta } => {
            let em = (-theta).exp_m1();
            let denom = em + (-theta * u).exp_m1() * (-theta * v).exp_m1();
            -theta * em * (-theta * (u + v)).exp() / (denom * denom)
        }
    })
}

/// `ln(u^{-θ} + v^{-θ} - 1)` evaluated without overflow.
fn clayton_log_sum(theta: f64, lu: f64, lv: f64) -> f64 {
    let (a, b) = (-theta * lu, -theta * lv);
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp() - (-m).exp()).ln()
}

/// Copula distribution function `C(u, v)`.
///
/// Closed forms for the Archimedean families; the elliptical families
/// integrate the conditional distribution `∂C/∂u` over `[0, u]`.
pub fn cdf(spec: &CopulaSpec, u: f64, v: f64) -> Result<f64> {
    spec.validate()?;
    let u = u.clamp(0.0, 1.0);
    let v = v.clamp(0.0, 1.0);
    if u == 0.0 || v == 0.0 {
        return Ok(0.0);
    }
    if u == 1.0 {
        return Ok(v);
    }
    if v == 1.0 {
        return Ok(u);
    }
    Ok(match *spec {
        CopulaSpec::Independence => u * v,
        CopulaSpec::Clayton { theta } => (-clayton_log_sum(theta, u.ln(), v.ln()) / theta).exp(),
        CopulaSpec::Gumbel { theta } => {
            let (x, y) = (-u.ln(), -v.ln());
            (-(x.powf(theta) + y.powf(theta)).powf(1.0 / theta)).exp()
        }
        CopulaSpec::Frank { theta } => {
            let num = (-theta * u).exp_m1() * (-theta * v).exp_m1() / (-theta).exp_m1();
            -num.ln_1p() / theta
        }
        CopulaSpec::Gaussian { .. } | CopulaSpec::Student { .. } => {
            let h = Conditional::new(spec);
            let xv = h.score(v);
            integrate(|w| h.eval(xv, w), 0.0, u, 1e-12).clamp(0.0, u.min(v))
        }
    }
    .clamp(0.0, 1.0))
}

/// Probability of the rectangle `[a1, b1] × [a2, b2]`.
pub fn rectangle_mass(spec: &CopulaSpec, a1: f64, b1: f64, a2: f64, b2: f64) -> Result<f64> {
    Ok(cdf(spec, b1, b2)? - cdf(spec, a1, b2)? - cdf(spec, b1, a2)? + cdf(spec, a1, a2)?)
}

/// Conditional distribution `h(v | w) = ∂C(w, v)/∂w` of the elliptical families,
/// expressed on the score scale (normal or Student quantiles).
pub(crate) struct Conditional {
    kind: Elliptical,
    rho: f64,
    scale: f64,
}

enum Elliptical {
    Normal,
    Student { nu: f64 },
}

impl Conditional {
    pub(crate) fn new(spec: &CopulaSpec) -> Self {
        match *spec {
            CopulaSpec::Gaussian { rho } => Conditional {
                kind: Elliptical::Normal,
                rho,
                scale: (1.0 - rho * rho).sqrt(),
            },
            CopulaSpec::Student { rho, nu } => Conditional {
                kind: Elliptical::Student { nu: nu as f64 },
                rho,
                scale: 1.0 - rho * rho,
            },
            _ => unreachable!("conditional form is only used for elliptical copulas"),
        }
    }

    /// Margin quantile of a uniform value.
    pub(crate) fn score(&self, v: f64) -> f64 {
        match self.kind {
            Elliptical::Normal => normal_quantile(v),
            Elliptical::Student { nu } => t_quantile(v, nu),
        }
    }

    /// `h(v | w)` given the score of `v`.
    pub(crate) fn eval(&self, xv: f64, w: f64) -> f64 {
        let xw = self.score(w);
        self.eval_scores(xv, xw)
    }

    pub(crate) fn eval_scores(&self, xv: f64, xw: f64) -> f64 {
        if xv == f64::INFINITY {
            return 1.0;
        }
        if xv == f64::NEG_INFINITY {
            return 0.0;
        }
        match self.kind {
            Elliptical::Normal => normal_cdf((xv - self.rho * xw) / self.scale),
            Elliptical::Student { nu } => {
                let s = ((nu + xw * xw) * self.scale / (nu + 1.0)).sqrt();
                t_cdf((xv - self.rho * xw) / s, nu + 1.0)
            }
        }
    }
}
