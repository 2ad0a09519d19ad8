//! Systems of polynomials in the product-Legendre basis and their common
//! real zeros.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::nodes::{Family, NodeSet};
use crate::poly::{ChebFitter, Poly2};

pub const ZERO_TOL: f64 = 1e-10;
pub const ZERO_DEDUP: f64 = 1e-9;
pub const SEED_GRID: usize = 60;
pub const SEED_EXTENT: f64 = 1.3;
const NEWTON_STEPS: usize = 80;
const CLIP: f64 = 5.0;

/// `sqrt(2k+1) P_k(x)` and derivatives for `k = 0..=n`.
pub fn legendre_hat_with_derivative(n: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    let mut p = vec![0.0; n + 1];
    let mut d = vec![0.0; n + 1];
    p[0] = 1.0;
    if n >= 1 {
        p[1] = x;
        d[1] = 1.0;
    }
    for k in 1..n {
        let kf = k as f64;
        p[k + 1] = ((2.0 * kf + 1.0) * x * p[k] - kf * p[k - 1]) / (kf + 1.0);
        d[k + 1] = d[k - 1] + (2.0 * kf + 1.0) * p[k];
    }
    for k in 0..=n {
        let s = (2.0 * k as f64 + 1.0).sqrt();
        p[k] *= s;
        d[k] *= s;
    }
    (p, d)
}

/// `P_k^n(x, y) = Phat_{n-k}(x) Phat_k(y)`, `0 <= k <= n`.
pub fn legendre_basis(n: usize, x: f64, y: f64) -> Vec<f64> {
    let (px, _) = legendre_hat_with_derivative(n, x);
    let (py, _) = legendre_hat_with_derivative(n, y);
    (0..=n).map(|k| px[n - k] * py[k]).collect()
}

/// Polynomials `C P_n + D P_{n-1}` in the orthonormal product-Legendre
/// basis; `D` is absent for systems of pure degree `n`.
#[derive(Debug, Clone)]
pub struct LegendrePolySystem {
    pub n: usize,
    pub c: DMatrix<f64>,
    pub d: Option<DMatrix<f64>>,
}

impl LegendrePolySystem {
    pub fn new(n: usize, c: DMatrix<f64>, d: Option<DMatrix<f64>>) -> Result<Self> {
        if n == 0 || c.ncols() != n + 1 || d.as_ref().is_some_and(|d| d.ncols() != n || d.nrows() != c.nrows()) {
            return Err(Error::InvalidParameter(format!(
                "polynomial system shape mismatch at degree {n}"
            )));
        }
        Ok(Self { n, c, d })
    }

    pub fn len(&self) -> usize {
        self.c.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.c.nrows() == 0
    }

    /// Values and the two partial derivatives of every polynomial.
    pub fn eval_with_gradient(&self, x: f64, y: f64) -> (DVector<f64>, DVector<f64>, DVector<f64>) {
        let n = self.n;
        let (px, dx) = legendre_hat_with_derivative(n, x);
        let (py, dy) = legendre_hat_with_derivative(n, y);
        let mut f = DVector::zeros(self.len());
        let mut fx = DVector::zeros(self.len());
        let mut fy = DVector::zeros(self.len());
        let mut add = |m: &DMatrix<f64>, deg: usize| {
            for k in 0..=deg {
                let (b, bx, by) = (px[deg - k] * py[k], dx[deg - k] * py[k], px[deg - k] * dy[k]);
                for r in 0..m.nrows() {
                    let c = m[(r, k)];
                    f[r] += c * b;
                    fx[r] += c * bx;
                    fy[r] += c * by;
                }
            }
        };
        add(&self.c, n);
        if let Some(d) = &self.d {
            add(d, n - 1);
        }
        (f, fx, fy)
    }

    pub fn eval(&self, x: f64, y: f64) -> DVector<f64> {
        self.eval_with_gradient(x, y).0
    }

    /// The same polynomials in the product-Chebyshev representation.
    pub fn to_polys(&self) -> Vec<Poly2> {
        let fitter = ChebFitter::new(self.n);
        (0..self.len())
            .map(|r| fitter.fit(|x, y| self.eval(x, y)[r]).0)
            .collect()
    }
}

fn gauss_newton(sys: &LegendrePolySystem, mut x: f64, mut y: f64) -> Option<[f64; 2]> {
    for _ in 0..NEWTON_STEPS {
        let (f, fx, fy) = sys.eval_with_gradient(x, y);
        let (a, b, c) = (fx.dot(&fx), fx.dot(&fy), fy.dot(&fy));
        let (r1, r2) = (fx.dot(&f), fy.dot(&f));
        let det = a * c - b * b;
        if det.abs() < 1e-300 {
            break;
        }
        let dx = -(c * r1 - b * r2) / det;
        let dy = -(a * r2 - b * r1) / det;
        x = (x + dx).clamp(-CLIP, CLIP);
        y = (y + dy).clamp(-CLIP, CLIP);
        if dx.abs().max(dy.abs()) < 1e-16 {
            break;
        }
    }
    (sys.eval(x, y).amax() < ZERO_TOL).then_some([x, y])
}

/// All real common zeros reachable by Gauss-Newton from a dense seed grid
/// over `[-1.3, 1.3]^2`, deduplicated and sorted.
pub fn find_common_zeros(sys: &LegendrePolySystem) -> Vec<[f64; 2]> {
    let grid: Vec<f64> = (0..SEED_GRID)
        .map(|i| -SEED_EXTENT + 2.0 * SEED_EXTENT * i as f64 / (SEED_GRID - 1) as f64)
        .collect();
    let found: Vec<Option<[f64; 2]>> = (0..SEED_GRID * SEED_GRID)
        .into_par_iter()
        .map(|s| gauss_newton(sys, grid[s % SEED_GRID], grid[s / SEED_GRID]))
        .collect();
    let mut pts: Vec<[f64; 2]> = Vec::new();
    for p in found.into_iter().flatten() {
        if pts
            .iter()
            .all(|q| (p[0] - q[0]).abs().max((p[1] - q[1]).abs()) > ZERO_DEDUP)
        {
            pts.push(p);
        }
    }
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts
}

/// Common zeros as a node set; a count other than `expected_count` is an
/// error carrying the points found.
pub fn common_zeros(sys: &LegendrePolySystem, expected_count: usize, variant: &str) -> Result<NodeSet> {
    let points = find_common_zeros(sys);
    if points.len() != expected_count {
        return Err(Error::CountMismatch {
            expected: expected_count,
            found: points.len(),
            points,
        });
    }
    Ok(NodeSet {
        family: Family::Discovered,
        n: sys.n,
        expected_count,
        alpha: None,
        beta: None,
        variant: variant.to_string(),
        points,
    })
}
