//! Parametric bivariate copula families.
//!
//! Gaussian, Student, Clayton, Gumbel and Frank copulas plus the independence
//! copula: densities, distribution functions, exact samplers, the maps between
//! parameters and Kendall's tau, and exact Haar scaling coefficients.

mod coeffs;
mod density;
mod sampling;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::debye1;

pub use coeffs::{scaling_coeffs, MAX_COEFF_LEVEL};
pub use density::{cdf, density, rectangle_mass};
pub use sampling::sample;

/// Largest Student degrees of freedom accepted.
pub const MAX_STUDENT_DOF: u32 = 200;

/// Copula family tag. Student carries its (fixed) degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Independence,
    Gaussian,
    Student { nu: u32 },
    Clayton,
    Gumbel,
    Frank,
}

impl Family {
    /// The five families used in the simulation study.
    pub const STUDY: [Family; 5] = [
        Family::Clayton,
        Family::Gumbel,
        Family::Frank,
        Family::Gaussian,
        Family::Student { nu: 4 },
    ];

    /// Short machine name accepted by [`FromStr`].
    pub fn slug(&self) -> String {
        match self {
            Family::Independence => "independence".into(),
            Family::Gaussian => "gaussian".into(),
            Family::Student { nu } => format!("student{nu}"),
            Family::Clayton => "clayton".into(),
            Family::Gumbel => "gumbel".into(),
            Family::Frank => "frank".into(),
        }
    }

    fn check(&self) -> Result<()> {
        if let Family::Student { nu } = *self {
            if nu == 0 || nu > MAX_STUDENT_DOF {
                return Err(Error::Domain(format!(
                    "Student degrees of freedom must be in 1..={MAX_STUDENT_DOF}, got {nu}"
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Independence => write!(f, "Independence"),
            Family::Gaussian => write!(f, "Normal"),
            Family::Student { nu } => write!(f, "Student({nu})"),
            Family::Clayton => write!(f, "Clayton"),
            Family::Gumbel => write!(f, "Gumbel"),
            Family::Frank => write!(f, "Frank"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let family = match lower.as_str() {
            "independence" | "indep" | "product" => Family::Independence,
            "gaussian" | "normal" => Family::Gaussian,
            "clayton" => Family::Clayton,
            "gumbel" => Family::Gumbel,
            "frank" => Family::Frank,
            other => {
                let digits = other
                    .strip_prefix("student")
                    .or_else(|| other.strip_prefix('t'))
                    .map(|d| {
                        d.trim_start_matches([':', '(', '-', '_'])
                            .trim_end_matches(')')
                    });
                match digits.map(str::parse::<u32>) {
                    Some(Ok(nu)) => Family::Student { nu },
                    _ => return Err(Error::Domain(format!("unknown copula family '{s}'"))),
                }
            }
        };
        family.check()?;
        Ok(family)
    }
}

/// A fully specified copula: family plus parameter, validated on construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CopulaSpec {
    Independence,
    Gaussian { rho: f64 },
    Student { rho: f64, nu: u32 },
    Clayton { theta: f64 },
    Gumbel { theta: f64 },
    Frank { theta: f64 },
}

impl CopulaSpec {
    /// Build a spec from a family tag and its scalar parameter
    /// (`ρ` for the elliptical families, `θ` otherwise; ignored for independence).
    pub fn new(family: Family, param: f64) -> Result<Self> {
        let spec = match family {
            Family::Independence => CopulaSpec::Independence,
            Family::Gaussian => CopulaSpec::Gaussian { rho: param },
            Family::Student { nu } => CopulaSpec::Student { rho: param, nu },
            Family::Clayton => CopulaSpec::Clayton { theta: param },
            Family::Gumbel => CopulaSpec::Gumbel { theta: param },
            Family::Frank => CopulaSpec::Frank { theta: param },
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn family(&self) -> Family {
        match *self {
            CopulaSpec::Independence => Family::Independence,
            CopulaSpec::Gaussian { .. } => Family::Gaussian,
            CopulaSpec::Student { nu, .. } => Family::Student { nu },
            CopulaSpec::Clayton { .. } => Family::Clayton,
            CopulaSpec::Gumbel { .. } => Family::Gumbel,
            CopulaSpec::Frank { .. } => Family::Frank,
        }
    }

    /// The free scalar parameter (`NaN`-free; 0 for independence).
    pub fn parameter(&self) -> f64 {
        match *self {
            CopulaSpec::Independence => 0.0,
            CopulaSpec::Gaussian { rho } | CopulaSpec::Student { rho, .. } => rho,
            CopulaSpec::Clayton { theta }
            | CopulaSpec::Gumbel { theta }
            | CopulaSpec::Frank { theta } => theta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.family().check()?;
        let p = self.parameter();
        if !p.is_finite() {
            return Err(Error::Domain(format!(
                "{} parameter must be finite",
                self.family()
            )));
        }
        let ok = match *self {
            CopulaSpec::Independence => true,
            CopulaSpec::Gaussian { rho } | CopulaSpec::Student { rho, .. } => {
                rho > -1.0 && rho < 1.0
            }
            CopulaSpec::Clayton { theta } => theta > 0.0,
            CopulaSpec::Gumbel { theta } => theta >= 1.0,
            CopulaSpec::Frank { theta } => theta != 0.0,
        };
        if ok {
            Ok(())
        } else {
            let domain = match self.family() {
                Family::Gaussian | Family::Student { .. } => "rho in (-1, 1)",
                Family::Clayton => "theta > 0",
                Family::Gumbel => "theta >= 1",
                Family::Frank => "theta != 0",
                Family::Independence => "",
            };
            Err(Error::Domain(format!(
                "{} parameter {p} outside domain ({domain})",
                self.family()
            )))
        }
    }
}

impl fmt::Display for CopulaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CopulaSpec::Independence => write!(f, "Independence"),
            CopulaSpec::Gaussian { rho } => write!(f, "Normal(rho={rho:.4})"),
            CopulaSpec::Student { rho, nu } => write!(f, "Student(rho={rho:.4}, nu={nu})"),
            CopulaSpec::Clayton { theta } => write!(f, "Clayton(theta={theta:.4})"),
            CopulaSpec::Gumbel { theta } => write!(f, "Gumbel(theta={theta:.4})"),
            CopulaSpec::Frank { theta } => write!(f, "Frank(theta={theta:.4})"),
        }
    }
}

/// Kendall's tau of a copula.
pub fn param_to_tau(spec: &CopulaSpec) -> Result<f64> {
    spec.validate()?;
    Ok(match *spec {
        CopulaSpec::Independence => 0.0,
        CopulaSpec::Gaussian { rho } | CopulaSpec::Student { rho, .. } => {
            std::f64::consts::FRAC_2_PI * rho.asin()
        }
        CopulaSpec::Clayton { theta } => theta / (theta + 2.0),
        CopulaSpec::Gumbel { theta } => 1.0 - 1.0 / theta,
        CopulaSpec::Frank { theta } => frank_tau(theta),
    })
}

fn frank_tau(theta: f64) -> f64 {
    1.0 - 4.0 / theta * (1.0 - debye1(theta))
}

/// Invert Kendall's tau within a family.
pub fn tau_to_param(family: Family, tau: f64) -> Result<CopulaSpec> {
    family.check()?;
    if !(tau > -1.0 && tau < 1.0) {
        return Err(Error::Domain(format!("Kendall tau {tau} outside (-1, 1)")));
    }
    let param = match family {
        Family::Independence => {
            if tau != 0.0 {
                return Err(Error::Domain(format!(
                    "independence copula cannot attain tau {tau}"
                )));
            }
            0.0
        }
        Family::Gaussian | Family::Student { .. } => (std::f64::consts::FRAC_PI_2 * tau).sin(),
        Family::Clayton => {
            if tau <= 0.0 {
                return Err(Error::Domain(format!(
                    "Clayton requires tau > 0, got {tau}"
                )));
            }
            2.0 * tau / (1.0 - tau)
        }
        Family::Gumbel => {
            if tau < 0.0 {
                return Err(Error::Domain(format!(
                    "Gumbel requires tau >= 0, got {tau}"
                )));
            }
            1.0 / (1.0 - tau)
        }
        Family::Frank => {
            if tau == 0.0 {
                return Err(Error::Domain("Frank cannot attain tau = 0".into()));
            }
            let target = tau.abs();
            let mut hi = 1.0;
            while frank_tau(hi) < target {
                hi *= 2.0;
            }
            let mut lo = 0.0;
            while hi - lo > 1e-10 * hi.max(1.0) {
                let mid = 0.5 * (lo + hi);
                if mid == lo || mid == hi {
                    break;
                }
                if frank_tau(mid) < target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi) * tau.signum()
        }
    };
    CopulaSpec::new(family, param)
}

/// Discretized parameter set of one family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterGrid {
    family: Family,
    params: Vec<f64>,
}

impl ParameterGrid {
    pub fn new(family: Family, params: Vec<f64>) -> Result<Self> {
        if params.is_empty() {
            return Err(Error::Domain("parameter grid must not be empty".into()));
        }
        for &p in &params {
            CopulaSpec::new(family, p)?;
        }
        Ok(ParameterGrid { family, params })
    }

    /// One-element grid, i.e. a simple null hypothesis.
    pub fn single(spec: CopulaSpec) -> Self {
        ParameterGrid {
            family: spec.family(),
            params: vec![spec.parameter()],
        }
    }

    /// Grid of the parameters attaining each of the given Kendall taus.
    pub fn from_taus(family: Family, taus: &[f64]) -> Result<Self> {
        let params = taus
            .iter()
            .map(|&t| tau_to_param(family, t).map(|s| s.parameter()))
            .collect::<Result<Vec<_>>>()?;
        ParameterGrid::new(family, params)
    }

    /// Default grid used by the simulation harness: the parameters at
    /// Kendall tau 0.05, 0.10, …, 0.90.
    pub fn default_for(family: Family) -> Result<Self> {
        if family == Family::Independence {
            return Ok(ParameterGrid::single(CopulaSpec::Independence));
        }
        let taus: Vec<f64> = (1..=18).map(|i| i as f64 * 0.05).collect();
        ParameterGrid::from_taus(family, &taus)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn specs(&self) -> Vec<CopulaSpec> {
        self.params
            .iter()
            .map(|&p| CopulaSpec::new(self.family, p).expect("validated on construction"))
            .collect()
    }
}

/// Inclusive arithmetic grid `lo:step:hi`.
pub fn grid_from_range(family: Family, lo: f64, step: f64, hi: f64) -> Result<ParameterGrid> {
    if !(step > 0.0) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Domain(format!("invalid grid step {step}")));
    }
    if lo > hi {
        return Err(Error::Domain(format!(
            "grid lower bound {lo} exceeds upper bound {hi}"
        )));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    let params = (0..count)
        .map(|i| {
            let x = lo + i as f64 * step;
            (x * 1e12).round() / 1e12
        })
        .collect();
    ParameterGrid::new(family, params)
}

/// Parse the `lo:step:hi` grid syntax (a bare number is a one-point grid).
pub fn parse_grid(family: Family, text: &str) -> Result<ParameterGrid> {
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| Error::Domain(format!("invalid grid number '{s}' in '{text}'")))
    };
    match parts.as_slice() {
        [single] => ParameterGrid::new(family, vec![num(single)?]),
        [lo, step, hi] => grid_from_range(family, num(lo)?, num(step)?, num(hi)?),
        _ => Err(Error::Domain(format!(
            "grid '{text}' is not of the form lo:step:hi"
        ))),
    }
}
