//! Orthogonal polynomials for the generalized Chebyshev weights.
//!
//! With `x = cos(theta)`, `y = cos(phi)`, `a = cos(theta - phi)` and
//! `b = cos(theta + phi)`, the building blocks are the symmetric functions
//!
//! ```text
//! P^{-1/2}_{k,n} = p_n(a) p_k(b) + p_k(a) p_n(b)
//! P^{+1/2}_{k,n} = (p_{n+1}(a) p_k(b) - p_k(a) p_{n+1}(b)) / (a - b)
//! ```
//!
//! where `a - b = 2 sin(theta) sin(phi)`. Both are polynomials in `x` and
//! `y`; they are evaluated at interior grid points and converted to the
//! Chebyshev basis, which removes the removable singularity on the boundary.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::poly::{ChebFitter, Poly2};
use crate::univariate::JacobiRecurrence;

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma == 0.5 || gamma == -0.5 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("gamma must be -1/2 or 1/2, got {gamma}")))
    }
}

/// Evaluates `P_{k,n}^{alpha,beta,gamma}` at an interior point.
pub fn p_kn(alpha: f64, beta: f64, gamma: f64, k: usize, n: usize, x: f64, y: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if k > n {
        return Err(Error::InvalidParameter(format!("need k <= n, got k={k}, n={n}")));
    }
    let rec = JacobiRecurrence::new(alpha, beta, n + 1);
    let (a, b) = angle_sum_difference(x, y);
    let pa = rec.values(n + 1, a);
    let pb = rec.values(n + 1, b);
    Ok(p_kn_from_values(gamma, k, n, &pa, &pb, a - b))
}

fn angle_sum_difference(x: f64, y: f64) -> (f64, f64) {
    let t = x.clamp(-1.0, 1.0).acos();
    let p = y.clamp(-1.0, 1.0).acos();
    ((t - p).cos(), (t + p).cos())
}

fn p_kn_from_values(gamma: f64, k: usize, n: usize, pa: &[f64], pb: &[f64], a_minus_b: f64) -> f64 {
    if gamma < 0.0 {
        pa[n] * pb[k] + pa[k] * pb[n]
    } else {
        (pa[n + 1] * pb[k] - pa[k] * pb[n + 1]) / a_minus_b
    }
}

/// Prefactor multiplying a `P_{k,m}` block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Prefactor {
    One,
    XSquaredMinusYSquared,
    XPlusY,
    XMinusY,
}

impl Prefactor {
    fn eval(self, x: f64, y: f64) -> f64 {
        match self {
            Prefactor::One => 1.0,
            Prefactor::XSquaredMinusYSquared => x * x - y * y,
            Prefactor::XPlusY => x + y,
            Prefactor::XMinusY => x - y,
        }
    }
}

/// Polynomials fitted on one tensor grid for a fixed total degree.
struct GridFit {
    fitter: ChebFitter,
    a: DMatrix<f64>,
    b: DMatrix<f64>,
}

impl GridFit {
    fn new(d: usize) -> Self {
        let fitter = ChebFitter::new(d);
        let n = d + 1;
        let nodes = fitter.nodes().to_vec();
        let mut a = DMatrix::zeros(n, n);
        let mut b = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let (u, v) = angle_sum_difference(nodes[i], nodes[j]);
                a[(i, j)] = u;
                b[(i, j)] = v;
            }
        }
        Self { fitter, a, b }
    }

    /// Fits `prefactor * P_{k,m}^{alpha,beta,gamma}` for `k = 0..=kmax`.
    fn fit_block(&self, alpha: f64, beta: f64, gamma: f64, m: usize, kmax: usize, pre: Prefactor) -> Result<Vec<Poly2>> {
        let rec = JacobiRecurrence::new(alpha, beta, m + 1);
        let n = self.fitter.degree() + 1;
        let nodes = self.fitter.nodes();
        let mut pa = vec![Vec::new(); n * n];
        let mut pb = vec![Vec::new(); n * n];
        for i in 0..n {
            for j in 0..n {
                pa[i * n + j] = rec.values(m + 1, self.a[(i, j)]);
                pb[i * n + j] = rec.values(m + 1, self.b[(i, j)]);
            }
        }
        let mut out = Vec::with_capacity(kmax + 1);
        for k in 0..=kmax {
            let values = DMatrix::from_fn(n, n, |i, j| {
                let idx = i * n + j;
                let amb = self.a[(i, j)] - self.b[(i, j)];
                pre.eval(nodes[i], nodes[j]) * p_kn_from_values(gamma, k, m, &pa[idx], &pb[idx], amb)
            });
            let (p, tail) = self.fitter.fit_values(&values);
            let scale = p.coeffs.iter().fold(0.0f64, |s, c| s.max(c.abs())).max(1.0);
            if tail > 1e-8 * scale {
                return Err(Error::InvalidParameter(format!(
                    "P_{{{k},{m}}} with parameters ({alpha}, {beta}, {gamma}) did not fit a polynomial of degree {} (tail {tail:.2e})",
                    self.fitter.degree()
                )));
            }
            out.push(p);
        }
        Ok(out)
    }
}

/// The two mutually orthogonal families spanning `V_n(W_{alpha,beta,gamma})`.
#[derive(Debug, Clone)]
pub struct GeneralizedBasis {
    pub n: usize,
    /// The `1Q_{k,n}` family.
    pub first: Vec<Poly2>,
    /// The `2Q_{k,n}` family.
    pub second: Vec<Poly2>,
}

impl GeneralizedBasis {
    pub fn all(&self) -> impl Iterator<Item = &Poly2> {
        self.first.iter().chain(self.second.iter())
    }
}

/// `1Q` and `2Q` of total degree `n`:
///
/// * `n = 2m`: `1Q_k = P^{a,b}_{k,m}` for `k <= m` and
///   `2Q_k = (x^2-y^2) P^{a+1,b+1}_{k,m-1}` for `k <= m-1`;
/// * `n = 2m+1`: `1Q_k = (x+y) P^{a,b+1}_{k,m}` and
///   `2Q_k = (x-y) P^{a+1,b}_{k,m}`, both for `k <= m`.
pub fn generalized_basis(alpha: f64, beta: f64, gamma: f64, n: usize) -> Result<GeneralizedBasis> {
    check_gamma(gamma)?;
    if !(alpha > -1.0 && beta > -1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha and beta must exceed -1, got ({alpha}, {beta})"
        )));
    }
    let grid = GridFit::new(n);
    let m = n / 2;
    let (first, second) = if n.is_multiple_of(2) {
        let first = grid.fit_block(alpha, beta, gamma, m, m, Prefactor::One)?;
        let second = if m == 0 {
            Vec::new()
        } else {
            grid.fit_block(alpha + 1.0, beta + 1.0, gamma, m - 1, m - 1, Prefactor::XSquaredMinusYSquared)?
        };
        (first, second)
    } else {
        (
            grid.fit_block(alpha, beta + 1.0, gamma, m, m, Prefactor::XPlusY)?,
            grid.fit_block(alpha + 1.0, beta, gamma, m, m, Prefactor::XMinusY)?,
        )
    };
    Ok(GeneralizedBasis { n, first, second })
}

/// The extra degree-`2m+1` polynomial
/// `(x+y) [p_m^{(a,b+1)}(A) p_m^{(a+1,b)}(B) + p_m^{(a,b+1)}(B) p_m^{(a+1,b)}(A)]`.
pub fn q_m_polynomial(alpha: f64, beta: f64, m: usize) -> Result<Poly2> {
    let d = 2 * m + 1;
    let fitter = ChebFitter::new(d);
    let r1 = JacobiRecurrence::new(alpha, beta + 1.0, m);
    let r2 = JacobiRecurrence::new(alpha + 1.0, beta, m);
    let (p, tail) = fitter.fit(|x, y| {
        let (a, b) = angle_sum_difference(x, y);
        let (p1a, p1b) = (r1.values(m, a)[m], r1.values(m, b)[m]);
        let (p2a, p2b) = (r2.values(m, a)[m], r2.values(m, b)[m]);
        (x + y) * (p1a * p2b + p1b * p2a)
    });
    if tail > 1e-8 * p.coeffs.iter().fold(1.0f64, |s, c| s.max(c.abs())) {
        return Err(Error::InvalidParameter(format!("q_{m} did not fit a polynomial (tail {tail:.2e})")));
    }
    Ok(p)
}
