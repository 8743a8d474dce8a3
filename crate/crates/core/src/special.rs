//! Special functions and numerical integration shared by the copula families.
//!
//! Normal and Student-t distribution functions, the order-1 Debye function,
//! adaptive Gauss–Kronrod quadrature (scalar and vector-valued) and a
//! compensated accumulator.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use libm::erfc;
use statrs::function::beta::beta_reg;
use statrs::function::erf::erfc_inv;
use statrs::function::gamma::ln_gamma;

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal quantile. Returns `±inf` at 0 and 1.
pub fn normal_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    -SQRT_2 * erfc_inv(2.0 * p)
}

/// Density of the Student t distribution with `nu` degrees of freedom.
pub fn t_pdf(x: f64, nu: f64) -> f64 {
    t_ln_pdf(x, nu).exp()
}

pub fn t_ln_pdf(x: f64, nu: f64) -> f64 {
    ln_gamma(0.5 * (nu + 1.0))
        - ln_gamma(0.5 * nu)
        - 0.5 * (nu * PI).ln()
        - 0.5 * (nu + 1.0) * (x * x / nu).ln_1p()
}

/// CDF of the Student t distribution.
///
/// Closed forms for 1, 2 and 4 degrees of freedom, regularized incomplete
/// beta otherwise.
pub fn t_cdf(x: f64, nu: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == f64::INFINITY {
        return 1.0;
    }
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    if nu == 1.0 {
        return 0.5 + x.atan() / PI;
    }
    if nu == 2.0 {
        return 0.5 + x / (2.0 * (2.0 + x * x).sqrt());
    }
    if nu == 4.0 {
        let s = 1.0 + 0.25 * x * x;
        // Evaluate the lower tail directly to keep precision for large |x|.
        let ax = x.abs();
        let upper = 0.5 - 0.375 * (ax / s.sqrt()) * (1.0 - ax * ax / (12.0 * s));
        let upper = if upper < 1e-3 {
            t_tail_beta(ax, nu)
        } else {
            upper
        };
        return if x < 0.0 { upper } else { 1.0 - upper };
    }
    let tail = t_tail_beta(x.abs(), nu);
    if x < 0.0 {
        tail
    } else {
        1.0 - tail
    }
}

/// `P(T > t)` for `t >= 0` via the incomplete beta function.
fn t_tail_beta(t: f64, nu: f64) -> f64 {
    if t == 0.0 {
        return 0.5;
    }
    0.5 * beta_reg(0.5 * nu, 0.5, nu / (nu + t * t))
}

/// Quantile of the Student t distribution.
pub fn t_quantile(p: f64, nu: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    if p == 0.5 {
        return 0.0;
    }
    let lower = p.min(1.0 - p);
    let sign = if p < 0.5 { -1.0 } else { 1.0 };
    if nu == 1.0 {
        return (PI * (p - 0.5)).tan();
    }
    if nu == 2.0 {
        return sign * (1.0 - 2.0 * lower) / (2.0 * lower * (1.0 - lower)).sqrt();
    }
    if nu == 4.0 {
        let alpha = 4.0 * lower * (1.0 - lower);
        let sa = alpha.sqrt();
        let q = ((sa.acos()) / 3.0).cos() / sa;
        return sign * 2.0 * (q - 1.0).max(0.0).sqrt();
    }
    // Newton on the lower tail with a bisection safeguard.
    let mut x = normal_quantile(lower);
    let (mut lo, mut hi) = (f64::NEG_INFINITY, 0.0);
    for _ in 0..200 {
        let f = t_cdf(x, nu) - lower;
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let d = t_pdf(x, nu);
        let mut next = x - f / d;
        if !next.is_finite() || next >= hi || (lo.is_finite() && next <= lo) {
            next = if lo.is_finite() {
                0.5 * (lo + hi)
            } else {
                2.0 * x.min(-1.0)
            };
        }
        if (next - x).abs() <= 1e-13 * x.abs().max(1.0) {
            x = next;
            break;
        }
        x = next;
    }
    sign * x.abs()
}

/// Order-1 Debye function `D1(x) = (1/x) ∫_0^x t/(e^t - 1) dt`.
pub fn debye1(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    if x < 0.0 {
        return debye1(-x) - 0.5 * x;
    }
    let integrand = |t: f64| if t == 0.0 { 1.0 } else { t / t.exp_m1() };
    integrate(integrand, 0.0, x, 1e-13 * x.max(1.0)) / x
}

// Gauss–Kronrod 7/15 abscissae and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_3,
    0.949_107_912_342_758_524_526_189_684_047_9,
    0.864_864_423_359_769_072_789_712_788_640_9,
    0.741_531_185_599_394_439_863_864_773_280_8,
    0.586_087_235_467_691_130_294_144_845_693_0,
    0.405_845_151_377_397_166_906_606_412_076_9,
    0.207_784_955_007_898_467_600_689_403_773_2,
    0.000_000_000_000_000_000_000_000_000_000_0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_2,
    0.104_790_010_322_250_183_839_876_322_541_5,
    0.140_653_259_715_525_918_745_189_590_510_2,
    0.169_004_726_639_267_902_826_583_426_598_6,
    0.190_350_578_064_785_409_913_256_402_421_0,
    0.204_432_940_075_298_892_414_161_999_234_6,
    0.209_482_141_084_727_828_012_999_174_891_7,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_1,
    0.279_705_391_489_276_667_901_467_771_423_8,
    0.381_830_050_505_118_944_950_369_775_488_98,
    0.417_959_183_673_469_387_755_102_040_816_3,
];

struct Panel {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15_vec<F>(f: &mut F, a: f64, b: f64, dim: usize, buf: &mut [f64]) -> Panel
where
    F: FnMut(f64, &mut [f64]),
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kron = vec![0.0; dim];
    let mut gauss = vec![0.0; dim];
    f(c, buf);
    for d in 0..dim {
        kron[d] = WGK[7] * buf[d];
        gauss[d] = WG[3] * buf[d];
    }
    for i in 0..7 {
        let dx = h * XGK[i];
        for x in [c - dx, c + dx] {
            f(x, buf);
            for d in 0..dim {
                kron[d] += WGK[i] * buf[d];
                if i % 2 == 1 {
                    gauss[d] += WG[i / 2] * buf[d];
                }
            }
        }
    }
    let mut error: f64 = 0.0;
    for d in 0..dim {
        kron[d] *= h;
        gauss[d] *= h;
        error = error.max((kron[d] - gauss[d]).abs());
    }
    Panel {
        a,
        b,
        value: kron,
        error,
    }
}

/// Globally adaptive Gauss–Kronrod quadrature of a vector-valued integrand.
///
/// `f(x, out)` writes the `dim` components at `x`. Panels are bisected in
/// order of decreasing error until the summed max-norm error estimate drops
/// below `tol` or the panel budget is exhausted.
pub fn integrate_vec<F>(mut f: F, a: f64, b: f64, dim: usize, tol: f64) -> Vec<f64>
where
    F: FnMut(f64, &mut [f64]),
{
    const MAX_PANELS: usize = 4000;
    let mut buf = vec![0.0; dim];
    let mut heap = BinaryHeap::new();
    let first = gk15_vec(&mut f, a, b, dim, &mut buf);
    let mut total_err = first.error;
    heap.push(first);
    while total_err > tol && heap.len() < MAX_PANELS {
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let left = gk15_vec(&mut f, worst.a, mid, dim, &mut buf);
        let right = gk15_vec(&mut f, mid, worst.b, dim, &mut buf);
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    let mut out = vec![NeumaierSum::default(); dim];
    for panel in heap.iter() {
        for (acc, v) in out.iter_mut().zip(&panel.value) {
            acc.add(*v);
        }
    }
    out.into_iter().map(|s| s.total()).collect()
}

/// Scalar adaptive Gauss–Kronrod quadrature.
pub fn integrate<F>(mut f: F, a: f64, b: f64, tol: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    integrate_vec(|x, out: &mut [f64]| out[0] = f(x), a, b, 1, tol)[0]
}

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<NeumaierSum>().total()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use statrs::distribution::{ContinuousCDF, StudentsT};

    #[test]
    fn t_cdf_closed_forms_match_incomplete_beta() {
        for nu in [1.0, 2.0, 4.0] {
            let reference = StudentsT::new(0.0, 1.0, nu).unwrap();
            for &x in &[-40.0, -5.0, -1.3, -0.2, 0.0, 0.7, 2.5, 9.0] {
                assert_abs_diff_eq!(t_cdf(x, nu), reference.cdf(x), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn t_quantile_inverts_cdf() {
        for nu in [1.0, 2.0, 3.0, 4.0, 5.0, 7.5, 30.0] {
            for &p in &[1e-9, 1e-4, 0.01, 0.3, 0.5, 0.77, 0.99, 1.0 - 1e-7] {
                let x = t_quantile(p, nu);
                assert_abs_diff_eq!(t_cdf(x, nu), p, epsilon = 1e-11 * p.max(1e-3));
            }
        }
    }

    #[test]
    fn normal_quantile_round_trip() {
        for &p in &[1e-12, 0.025, 0.5, 0.975] {
            assert_abs_diff_eq!(normal_cdf(normal_quantile(p)), p, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(
            normal_quantile(0.95),
            1.644_853_626_951_472_2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn debye_known_values() {
        // D1(1) = 0.777504634112248...
        assert_abs_diff_eq!(debye1(1.0), 0.777_504_634_112_248_3, epsilon = 1e-12);
        // Reflection D1(-x) = D1(x) + x/2.
        assert_abs_diff_eq!(debye1(-2.0), debye1(2.0) + 1.0, epsilon = 1e-13);
    }

    #[test]
    fn integrate_handles_endpoint_singularity() {
        let v = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10);
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-8);
    }

    #[test]
    fn neumaier_recovers_cancellation() {
        let s = compensated_sum([1e16, 1.0, -1e16, 1.0]);
        assert_eq!(s, 2.0);
    }
}
