//! Bivariate polynomials stored in the product-Chebyshev basis.
//!
//! The coefficient of `T_i(x) T_j(y)` lives at [`graded_index`]`(i + j, j)`,
//! so a polynomial of total degree `d` is a prefix of one of any higher
//! degree.

use nalgebra::{DMatrix, DVector};

use crate::univariate::chebyshev_t_values;

/// `dim Pi_d^2 = (d+1)(d+2)/2`.
pub fn dim(d: usize) -> usize {
    (d + 1) * (d + 2) / 2
}

/// Position of `T_{s-j}(x) T_j(y)` in the graded ordering.
pub fn graded_index(s: usize, j: usize) -> usize {
    debug_assert!(j <= s);
    s * (s + 1) / 2 + j
}

/// Feature vector `[T_{s-j}(x) T_j(y)]` for all `s <= d`.
pub fn cheb_features(d: usize, x: f64, y: f64) -> Vec<f64> {
    let mut out = vec![0.0; dim(d)];
    cheb_features_into(d, x, y, &mut out);
    out
}

pub fn cheb_features_into(d: usize, x: f64, y: f64, out: &mut [f64]) {
    let tx = chebyshev_t_values(d, x);
    let ty = chebyshev_t_values(d, y);
    for s in 0..=d {
        let base = s * (s + 1) / 2;
        for j in 0..=s {
            out[base + j] = tx[s - j] * ty[j];
        }
    }
}

/// Feature matrix with one column per point.
pub fn feature_matrix(d: usize, points: &[[f64; 2]]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim(d), points.len());
    let mut buf = vec![0.0; dim(d)];
    for (k, p) in points.iter().enumerate() {
        cheb_features_into(d, p[0], p[1], &mut buf);
        m.column_mut(k).copy_from_slice(&buf);
    }
    m
}

/// Chebyshev series of `x * c`.
pub fn times_x_1d(c: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; c.len() + 1];
    for (i, &ci) in c.iter().enumerate() {
        if i == 0 {
            out[1] += ci;
        } else {
            out[i + 1] += 0.5 * ci;
            out[i - 1] += 0.5 * ci;
        }
    }
    out
}

/// Chebyshev series of `U_n`.
pub fn chebyshev_u_series(n: i32) -> Vec<f64> {
    if n < 0 {
        return vec![0.0];
    }
    let n = n as usize;
    let mut c = vec![0.0; n + 1];
    for j in (0..=n).rev().step_by(2) {
        c[j] = if j == 0 { 1.0 } else { 2.0 };
    }
    c
}

/// Chebyshev series of `T_n`.
pub fn chebyshev_t_series(n: i32) -> Vec<f64> {
    if n < 0 {
        return vec![0.0];
    }
    let mut c = vec![0.0; n as usize + 1];
    c[n as usize] = 1.0;
    c
}

/// A polynomial of total degree at most `degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly2 {
    pub degree: usize,
    pub coeffs: Vec<f64>,
}

impl Poly2 {
    pub fn zero(degree: usize) -> Self {
        Self {
            degree,
            coeffs: vec![0.0; dim(degree)],
        }
    }

    pub fn from_coeffs(degree: usize, coeffs: Vec<f64>) -> Self {
        assert_eq!(coeffs.len(), dim(degree));
        Self { degree, coeffs }
    }

    /// `T_i(x) T_j(y)`.
    pub fn cheb_tt(i: usize, j: usize) -> Self {
        let mut p = Self::zero(i + j);
        p.coeffs[graded_index(i + j, j)] = 1.0;
        p
    }

    /// `f(x) g(y)` from univariate Chebyshev series.
    pub fn from_product(cx: &[f64], cy: &[f64]) -> Self {
        let degree = cx.len() + cy.len() - 2;
        let mut p = Self::zero(degree);
        for (i, &a) in cx.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in cy.iter().enumerate() {
                p.coeffs[graded_index(i + j, j)] += a * b;
            }
        }
        p
    }

    /// Coefficient of `T_i(x) T_j(y)`.
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i + j > self.degree {
            0.0
        } else {
            self.coeffs[graded_index(i + j, j)]
        }
    }

    /// Coefficients padded to degree `d >= self.degree`.
    pub fn padded(&self, d: usize) -> Vec<f64> {
        assert!(d >= self.degree);
        let mut c = self.coeffs.clone();
        c.resize(dim(d), 0.0);
        c
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let f = cheb_features(self.degree, x, y);
        f.iter().zip(&self.coeffs).map(|(a, b)| a * b).sum()
    }

    pub fn add(&self, other: &Poly2) -> Poly2 {
        let d = self.degree.max(other.degree);
        let a = self.padded(d);
        let b = other.padded(d);
        Poly2::from_coeffs(d, a.iter().zip(&b).map(|(u, v)| u + v).collect())
    }

    pub fn scale(&self, s: f64) -> Poly2 {
        Poly2::from_coeffs(self.degree, self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Largest coefficient magnitude above total degree `d`.
    pub fn tail_above(&self, d: usize) -> f64 {
        if d >= self.degree {
            return 0.0;
        }
        self.coeffs[dim(d)..].iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Drops coefficients above total degree `d`.
    pub fn truncate(&self, d: usize) -> Poly2 {
        let d = d.min(self.degree);
        Poly2::from_coeffs(d, self.coeffs[..dim(d)].to_vec())
    }

    /// Exact product, computed with `T_a T_b = (T_{a+b} + T_{|a-b|}) / 2`.
    pub fn mul(&self, other: &Poly2) -> Poly2 {
        let d = self.degree + other.degree;
        let mut out = Poly2::zero(d);
        for s in 0..=self.degree {
            for j in 0..=s {
                let a = self.coeffs[graded_index(s, j)];
                if a == 0.0 {
                    continue;
                }
                let i = s - j;
                for t in 0..=other.degree {
                    for l in 0..=t {
                        let b = other.coeffs[graded_index(t, l)];
                        if b == 0.0 {
                            continue;
                        }
                        let k = t - l;
                        let c = 0.25 * a * b;
                        for xi in [i + k, i.abs_diff(k)] {
                            for yj in [j + l, j.abs_diff(l)] {
                                out.coeffs[graded_index(xi + yj, yj)] += c;
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// Fits a bivariate polynomial of total degree `d` from a callable, using
/// the discrete Chebyshev transform on the `(d+1) x (d+1)` tensor grid of
/// first-kind Chebyshev points. The transform is exact for tensor degree
/// `d`, so the fit reproduces any polynomial of that total degree; the
/// discarded tail above `d` is returned for diagnosis.
pub struct ChebFitter {
    d: usize,
    nodes: Vec<f64>,
    // tmat[(i, a)] = scale_i T_i(x_a)
    tmat: DMatrix<f64>,
}

impl ChebFitter {
    pub fn new(d: usize) -> Self {
        let n = d + 1;
        let nodes: Vec<f64> = (0..n)
            .map(|a| ((a as f64 + 0.5) * std::f64::consts::PI / n as f64).cos())
            .collect();
        let mut tmat = DMatrix::zeros(n, n);
        for (a, &x) in nodes.iter().enumerate() {
            let t = chebyshev_t_values(d, x);
            for i in 0..n {
                let scale = if i == 0 { 1.0 } else { 2.0 } / n as f64;
                tmat[(i, a)] = scale * t[i];
            }
        }
        Self { d, nodes, tmat }
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    /// Grid abscissae; `values[(a, b)]` must hold `f(nodes[a], nodes[b])`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Returns the fitted polynomial and the largest dropped coefficient.
    pub fn fit_values(&self, values: &DMatrix<f64>) -> (Poly2, f64) {
        let c = &self.tmat * values * self.tmat.transpose();
        let mut p = Poly2::zero(self.d);
        let mut tail: f64 = 0.0;
        for i in 0..=self.d {
            for j in 0..=self.d {
                if i + j <= self.d {
                    p.coeffs[graded_index(i + j, j)] = c[(i, j)];
                } else {
                    tail = tail.max(c[(i, j)].abs());
                }
            }
        }
        (p, tail)
    }

    pub fn fit(&self, f: impl Fn(f64, f64) -> f64) -> (Poly2, f64) {
        let n = self.d + 1;
        let values = DMatrix::from_fn(n, n, |a, b| f(self.nodes[a], self.nodes[b]));
        self.fit_values(&values)
    }
}

/// Values on a tensor grid of the polynomial with coefficient vector `c`
/// (graded, degree `d`), as `tx * M * ty^t` with `tx[(a, i)] = T_i(gx[a])`.
pub fn eval_on_tensor_grid(d: usize, c: &[f64], tx: &DMatrix<f64>, ty: &DMatrix<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(d + 1, d + 1);
    for s in 0..=d {
        for j in 0..=s {
            m[(s - j, j)] = c[graded_index(s, j)];
        }
    }
    tx * m * ty.transpose()
}

/// Matrix `[T_i(g_a)]` with rows indexed by grid points.
pub fn cheb_grid_matrix(d: usize, grid: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(grid.len(), d + 1);
    for (a, &g) in grid.iter().enumerate() {
        for (i, v) in chebyshev_t_values(d, g).into_iter().enumerate() {
            m[(a, i)] = v;
        }
    }
    m
}

/// Dot product of a coefficient vector with a feature vector.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

pub fn to_dvector(c: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(c)
}
