//! Univariate orthogonal polynomials, their zeros, and Gauss rules.
//!
//! Every evaluator follows the convention that a polynomial of negative
//! degree is identically zero. Jacobi polynomials are normalized against the
//! probability measure `c (1-x)^alpha (1+x)^beta dx`, so that `p_0 = 1`.

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Chebyshev polynomial of the first kind by three-term recurrence.
pub fn chebyshev_t(n: i32, x: f64) -> f64 {
    match n {
        n if n < 0 => 0.0,
        0 => 1.0,
        1 => x,
        _ => {
            let (mut prev, mut cur) = (1.0, x);
            for _ in 1..n {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Chebyshev polynomial of the second kind by three-term recurrence.
pub fn chebyshev_u(n: i32, x: f64) -> f64 {
    match n {
        n if n < 0 => 0.0,
        0 => 1.0,
        _ => {
            let (mut prev, mut cur) = (1.0, 2.0 * x);
            for _ in 1..n {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Values `T_0(x), ..., T_n(x)`.
pub fn chebyshev_t_values(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n >= 1 {
        out.push(x);
    }
    for k in 2..=n {
        let next = 2.0 * x * out[k - 1] - out[k - 2];
        out.push(next);
    }
    out
}

/// Gegenbauer polynomial `C_n^lambda(x)`.
///
/// `lambda = 0` is rejected: in that limit the family degenerates and the
/// Chebyshev polynomial `T_n` ([`chebyshev_t`]) takes its place.
pub fn gegenbauer(lambda: f64, n: i32, x: f64) -> Result<f64> {
    if lambda == 0.0 {
        return Err(Error::InvalidParameter(
            "Gegenbauer lambda = 0 is the Chebyshev limit; evaluate T_n with chebyshev_t".into(),
        ));
    }
    if lambda <= -0.5 || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Gegenbauer lambda must exceed -1/2, got {lambda}"
        )));
    }
    Ok(match n {
        n if n < 0 => 0.0,
        0 => 1.0,
        _ => {
            let (mut prev, mut cur) = (1.0, 2.0 * lambda * x);
            for k in 2..=n {
                let k = k as f64;
                let next = (2.0 * x * (k + lambda - 1.0) * cur - (k + 2.0 * lambda - 2.0) * prev) / k;
                prev = cur;
                cur = next;
            }
            cur
        }
    })
}

fn check_jacobi_params(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha > -1.0 && beta > -1.0) || !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Jacobi parameters must exceed -1, got ({alpha}, {beta})"
        )));
    }
    Ok(())
}

/// Total mass `int_{-1}^{1} (1-x)^alpha (1+x)^beta dx`.
pub fn jacobi_mass(alpha: f64, beta: f64) -> f64 {
    ((alpha + beta + 1.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
        - ln_gamma(alpha + beta + 2.0))
    .exp()
}

/// Recurrence coefficients of the orthonormal Jacobi family.
///
/// `sqrt(b_{k+1}) p_{k+1} = (x - a_k) p_k - sqrt(b_k) p_{k-1}`.
#[derive(Debug, Clone)]
pub struct JacobiRecurrence {
    alpha: f64,
    beta: f64,
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl JacobiRecurrence {
    /// Coefficients sufficient to evaluate up to degree `max_degree`.
    pub fn new(alpha: f64, beta: f64, max_degree: usize) -> Self {
        let diag = (0..=max_degree).map(|k| jacobi_diag(alpha, beta, k)).collect();
        // offdiag[k] = sqrt(b_k); offdiag[0] is unused.
        let offdiag = (0..=max_degree + 1)
            .map(|k| if k == 0 { 0.0 } else { jacobi_offdiag_sq(alpha, beta, k).sqrt() })
            .collect();
        Self {
            alpha,
            beta,
            diag,
            offdiag,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn max_degree(&self) -> usize {
        self.diag.len() - 1
    }

    /// `a_k`, for `k <= max_degree`.
    pub fn diag(&self, k: usize) -> f64 {
        self.diag[k]
    }

    /// `sqrt(b_k)`, for `1 <= k <= max_degree + 1`.
    pub fn offdiag(&self, k: usize) -> f64 {
        self.offdiag[k]
    }

    /// Writes `p_0(x), ..., p_n(x)` into `out`.
    pub fn values_into(&self, n: usize, x: f64, out: &mut Vec<f64>) {
        assert!(n <= self.max_degree(), "degree {n} beyond recurrence table");
        out.clear();
        out.push(1.0);
        if n == 0 {
            return;
        }
        out.push((x - self.diag[0]) / self.offdiag[1]);
        for k in 1..n {
            let next = ((x - self.diag[k]) * out[k] - self.offdiag[k] * out[k - 1]) / self.offdiag[k + 1];
            out.push(next);
        }
    }

    pub fn values(&self, n: usize, x: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(n + 1);
        self.values_into(n, x, &mut out);
        out
    }

    /// `(p_n(x), p_n'(x))`.
    pub fn value_and_derivative(&self, n: usize, x: f64) -> (f64, f64) {
        let (mut p_prev, mut p) = (0.0, 1.0);
        let (mut d_prev, mut d) = (0.0, 0.0);
        for k in 0..n {
            let b = self.offdiag[k + 1];
            let a = self.diag[k];
            let sb = self.offdiag[k];
            let p_next = ((x - a) * p - sb * p_prev) / b;
            let d_next = ((x - a) * d + p - sb * d_prev) / b;
            p_prev = p;
            p = p_next;
            d_prev = d;
            d = d_next;
        }
        (p, d)
    }
}

fn jacobi_diag(alpha: f64, beta: f64, k: usize) -> f64 {
    let s = alpha + beta;
    if k == 0 {
        (beta - alpha) / (s + 2.0)
    } else {
        let t = 2.0 * k as f64 + s;
        (beta * beta - alpha * alpha) / (t * (t + 2.0))
    }
}

fn jacobi_offdiag_sq(alpha: f64, beta: f64, k: usize) -> f64 {
    let s = alpha + beta;
    if k == 1 {
        4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + s).powi(2) * (3.0 + s))
    } else {
        let kf = k as f64;
        let t = 2.0 * kf + s;
        4.0 * kf * (kf + alpha) * (kf + beta) * (kf + s) / (t * t * (t + 1.0) * (t - 1.0))
    }
}

/// Orthonormal Jacobi polynomial `p_n^{(alpha,beta)}(x)` with `p_0 = 1`.
pub fn jacobi_normalized(alpha: f64, beta: f64, n: i32, x: f64) -> Result<f64> {
    check_jacobi_params(alpha, beta)?;
    if n < 0 {
        return Ok(0.0);
    }
    let n = n as usize;
    Ok(JacobiRecurrence::new(alpha, beta, n).values(n, x)[n])
}

/// Angles `0 = theta_0 < theta_1 < ... < theta_m < pi` where
/// `cos(theta_k)` are the zeros of the degree-`m` Jacobi polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiAngleGrid {
    pub alpha: f64,
    pub beta: f64,
    pub m: usize,
    pub thetas: Vec<f64>,
}

/// Zeros of `p_m` in ascending order, from the symmetric Jacobi matrix and
/// polished by one Newton step.
pub fn jacobi_zeros(alpha: f64, beta: f64, m: usize) -> Result<Vec<f64>> {
    check_jacobi_params(alpha, beta)?;
    if m == 0 {
        return Err(Error::InvalidParameter("number of zeros must be at least 1".into()));
    }
    let rec = JacobiRecurrence::new(alpha, beta, m);
    let mut jm = DMatrix::<f64>::zeros(m, m);
    for k in 0..m {
        jm[(k, k)] = rec.diag[k];
        if k + 1 < m {
            jm[(k, k + 1)] = rec.offdiag[k + 1];
            jm[(k + 1, k)] = rec.offdiag[k + 1];
        }
    }
    let eig = SymmetricEigen::try_new(jm, f64::EPSILON, 10_000).ok_or_else(|| {
        Error::EigenFailure(format!("Jacobi matrix of order {m}, parameters ({alpha}, {beta})"))
    })?;
    let mut zeros: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    zeros.sort_by(f64::total_cmp);
    for z in zeros.iter_mut() {
        let (p, dp) = rec.value_and_derivative(m, *z);
        if dp != 0.0 {
            *z -= p / dp;
        }
    }
    Ok(zeros)
}

pub fn jacobi_angle_grid(alpha: f64, beta: f64, m: usize) -> Result<JacobiAngleGrid> {
    let zeros = jacobi_zeros(alpha, beta, m)?;
    let mut thetas = Vec::with_capacity(m + 1);
    thetas.push(0.0);
    // descending zeros give ascending angles
    thetas.extend(zeros.iter().rev().map(|z| z.clamp(-1.0, 1.0).acos()));
    Ok(JacobiAngleGrid {
        alpha,
        beta,
        m,
        thetas,
    })
}

/// A one-dimensional quadrature rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `m`-point Gauss-Jacobi rule for `(1-x)^alpha (1+x)^beta`, exact through
/// degree `2m - 1`. Weights are the Christoffel numbers at the polished
/// zeros.
pub fn gauss_rule_1d(alpha: f64, beta: f64, m: usize) -> Result<GaussRule> {
    let points = jacobi_zeros(alpha, beta, m)?;
    let rec = JacobiRecurrence::new(alpha, beta, m);
    let mass = jacobi_mass(alpha, beta);
    let mut buf = Vec::with_capacity(m);
    let weights = points
        .iter()
        .map(|&x| {
            rec.values_into(m - 1, x, &mut buf);
            mass / buf.iter().map(|p| p * p).sum::<f64>()
        })
        .collect();
    Ok(GaussRule { points, weights })
}
