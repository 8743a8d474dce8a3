//! Reference computations written independently of the library internals.

#![allow(dead_code, clippy::excessive_precision)]

/// 10-point Gauss–Legendre nodes and weights on [-1, 1].
const GL_NODES: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL_WEIGHTS: [f64; 5] = [
    0.295_524_224_714_752_9,
    0.269_266_719_309_996_4,
    0.219_086_362_515_982_0,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_1,
];

fn gl10(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    let mut s = 0.0;
    for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
        s += w * (f(mid - half * x) + f(mid + half * x));
    }
    s * half
}

fn adaptive(
    f: &mut dyn FnMut(f64) -> f64,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = (a + b) / 2.0;
    let left = gl10(f, a, m);
    let right = gl10(f, m, b);
    if depth == 0 || (left + right - whole).abs() <= tol {
        return left + right;
    }
    adaptive(f, a, m, left, tol / 2.0, depth - 1) + adaptive(f, m, b, right, tol / 2.0, depth - 1)
}

/// Adaptive bisection Gauss–Legendre integral of `f` over [a, b].
pub fn integrate(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let whole = gl10(&mut f, a, b);
    adaptive(&mut f, a, b, whole, tol, 40)
}

/// Mass of a density over the rectangle [a1, b1] x [a2, b2] by nested 1-D quadrature.
pub fn rectangle_integral(
    density: impl Fn(f64, f64) -> f64,
    a1: f64,
    b1: f64,
    a2: f64,
    b2: f64,
    tol: f64,
) -> f64 {
    integrate(
        |u| integrate(|v| density(u, v), a2, b2, tol / 10.0),
        a1,
        b1,
        tol,
    )
}

/// `(1 / (n (n - 1))) Σ_{i ≠ l} <a_i, a_l>` with `a_i = φ_j(P_i) - c`, by explicit
/// pair loop, and the same sum with absolute values as a scale.
pub fn naive_double_sum(points: &[(f64, f64)], coeffs: &[f64], j: u32) -> (f64, f64) {
    let side = 1usize << j;
    let scale = side as f64;
    let cell = |(u, v): (f64, f64)| {
        let k1 = ((u * scale) as usize).min(side - 1);
        let k2 = ((v * scale) as usize).min(side - 1);
        k1 * side + k2
    };
    let cells: Vec<usize> = points.iter().map(|&p| cell(p)).collect();
    let c2: f64 = coeffs.iter().map(|c| c * c).sum();
    let n = points.len();
    let (mut sum, mut abs) = (0.0, 0.0);
    for i in 0..n {
        for l in 0..n {
            if i == l {
                continue;
            }
            let same = if cells[i] == cells[l] {
                scale * scale
            } else {
                0.0
            };
            let term = same - scale * coeffs[cells[i]] - scale * coeffs[cells[l]] + c2;
            sum += term;
            abs += term.abs();
        }
    }
    let norm = (n * (n - 1)) as f64;
    (sum / norm, abs / norm)
}

/// Clayton density written out directly.
pub fn clayton_density(theta: f64, u: f64, v: f64) -> f64 {
    (1.0 + theta)
        * (u * v).powf(-theta - 1.0)
        * (u.powf(-theta) + v.powf(-theta) - 1.0).powf(-1.0 / theta - 2.0)
}

/// Gaussian copula cell masses on the `side x side` grid, integrating the
/// bivariate normal density between normal quantiles of the cell edges.
pub fn gaussian_cell_masses(rho: f64, side: usize, tol: f64) -> Vec<f64> {
    let edges: Vec<f64> = (0..=side)
        .map(|k| match k {
            0 => -9.0,
            k if k == side => 9.0,
            k => inverse_normal(k as f64 / side as f64),
        })
        .collect();
    let r2 = 1.0 - rho * rho;
    let pdf = |x: f64, y: f64| {
        (-(x * x - 2.0 * rho * x * y + y * y) / (2.0 * r2)).exp()
            / (2.0 * std::f64::consts::PI * r2.sqrt())
    };
    let mut out = Vec::with_capacity(side * side);
    for k1 in 0..side {
        for k2 in 0..side {
            out.push(rectangle_integral(
                pdf,
                edges[k1],
                edges[k1 + 1],
                edges[k2],
                edges[k2 + 1],
                tol,
            ));
        }
    }
    out
}

/// Standard normal quantile by bisection on an erfc-free series CDF.
pub fn inverse_normal(p: f64) -> f64 {
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if normal_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Φ via the Marsaglia series for |x| < 7 and the asymptotic tail beyond.
pub fn normal_cdf(x: f64) -> f64 {
    if x < -7.0 {
        let pdf = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let z = -x;
        return pdf / z * (1.0 - 1.0 / (z * z) + 3.0 / z.powi(4) - 15.0 / z.powi(6));
    }
    if x > 7.0 {
        return 1.0 - normal_cdf(-x);
    }
    let (mut term, mut sum) = (x, x);
    let mut i = 1.0;
    while term.abs() > 1e-300 && i < 1000.0 {
        term *= x * x / (2.0 * i + 1.0);
        sum += term;
        i += 1.0;
    }
    0.5 + sum * (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}
