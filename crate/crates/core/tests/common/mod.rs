//! Reference quadrature that shares no code with the library: Gauss-Legendre
//! nodes from Newton on the Legendre recurrence, composed with `x = cos t`
//! so that the endpoint factors `(1-x^2)^a` become smooth powers of `sin t`.

#![allow(dead_code)]

use std::f64::consts::PI;

use cubasquare::weights::WeightSpec;

pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = Vec::with_capacity(m);
    let mut ws = Vec::with_capacity(m);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 1..m {
                let kf = k as f64;
                let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        xs.push(x);
        ws.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    (xs, ws)
}

/// Angles and weights for `int_0^pi g(t) dt`, split into `panels` pieces.
pub fn theta_rule(panels: usize, per_panel: usize) -> Vec<(f64, f64)> {
    let (xs, ws) = gauss_legendre(per_panel);
    let h = PI / panels as f64;
    let mut out = Vec::with_capacity(panels * per_panel);
    for p in 0..panels {
        let a = p as f64 * h;
        for (x, w) in xs.iter().zip(&ws) {
            out.push((a + 0.5 * h * (x + 1.0), 0.5 * h * w));
        }
    }
    out
}

fn axis_exponents(w: &WeightSpec) -> (f64, f64) {
    match *w {
        WeightSpec::Constant => (0.0, 0.0),
        WeightSpec::ProductGegenbauer { lambda } => (lambda - 0.5, lambda - 0.5),
        WeightSpec::ProductJacobiPair { alpha, beta } => (alpha, beta),
        WeightSpec::GeneralizedChebyshev { gamma, .. } => (gamma, gamma),
    }
}

fn diagonal(w: &WeightSpec, x: f64, y: f64) -> f64 {
    match *w {
        WeightSpec::GeneralizedChebyshev { alpha, beta, .. } => {
            (x - y).abs().powf(2.0 * alpha + 1.0) * (x + y).abs().powf(2.0 * beta + 1.0)
        }
        _ => 1.0,
    }
}

/// `int int f(x, y) W(x, y) dx dy` for weights whose axis exponents are
/// half-integers and whose diagonal factors are polynomial.
pub fn integrate(w: &WeightSpec, f: impl Fn(f64, f64) -> f64) -> f64 {
    Grid::new(w).integrate(f)
}

pub fn moment(w: &WeightSpec, i: usize, j: usize) -> f64 {
    integrate(w, |x, y| x.powi(i as i32) * y.powi(j as i32))
}

/// `int_{-1}^1 x^k (1-x^2)^a dx = B((k+1)/2, a+1)` for even `k`.
pub fn beta_moment(k: usize, a: f64) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    let p = (k as f64 + 1.0) / 2.0;
    (ln_gamma(p) + ln_gamma(a + 1.0) - ln_gamma(p + a + 1.0)).exp()
}

/// Lanczos approximation, good to about 1e-15 for positive arguments.
pub fn ln_gamma(x: f64) -> f64 {
    const G: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = G[0];
    let t = x + 7.5;
    for (i, g) in G.iter().enumerate().skip(1) {
        a += g / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Points of `[-1, 1]^2` from a fixed linear congruential stream.
pub fn sample_points(count: usize, seed: u64) -> Vec<[f64; 2]> {
    let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = || {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    };
    (0..count).map(|_| [next(), next()]).collect()
}

pub fn same_set(a: &[[f64; 2]], b: &[[f64; 2]], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter()
            .all(|p| b.iter().any(|q| (p[0] - q[0]).abs() < tol && (p[1] - q[1]).abs() < tol))
}

/// The reference rule as explicit points and weights, with the weight
/// function folded into the weights.
pub struct Grid {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

impl Grid {
    pub fn new(w: &WeightSpec) -> Self {
        let (ax, ay) = axis_exponents(w);
        let rule = theta_rule(8, 40);
        let mut points = Vec::with_capacity(rule.len() * rule.len());
        let mut weights = Vec::with_capacity(rule.len() * rule.len());
        for &(t, wt) in &rule {
            for &(u, wu) in &rule {
                let (x, y) = (t.cos(), u.cos());
                points.push([x, y]);
                weights.push(wt * wu * t.sin().powf(2.0 * ax + 1.0) * u.sin().powf(2.0 * ay + 1.0) * diagonal(w, x, y));
            }
        }
        Self { points, weights }
    }

    pub fn integrate(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(p[0], p[1])).sum()
    }

    pub fn values(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        self.points.iter().map(|p| f(p[0], p[1])).collect()
    }

    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).zip(&self.weights).map(|((x, y), w)| x * y * w).sum()
    }
}
