//! Orthonormal bases of `V_n(W)`, three-term coefficients and reproducing
//! kernels.
//!
//! Every basis polynomial is stored in the product-Chebyshev basis (see
//! [`crate::poly`]), so evaluating all of them at a point is a single
//! matrix-vector product. Orthonormality is with respect to the full
//! measure `W(x, y) dx dy`, hence `K_0 = 1 / mass`.

pub mod gencheb;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::poly::{cheb_features, cheb_features_into, dim, feature_matrix, times_x_1d, Poly2};
use crate::univariate::{jacobi_mass, JacobiRecurrence};
use crate::weights::{tensor_rule, WeightSpec};

pub use gencheb::{generalized_basis, p_kn, q_m_polynomial, GeneralizedBasis};

/// Univariate orthonormal polynomials for `(1-x^2)^a` as Chebyshev series,
/// normalized against the unnormalized weight.
pub fn jacobi_series(a: f64, max_degree: usize) -> Vec<Vec<f64>> {
    let rec = JacobiRecurrence::new(a, a, max_degree);
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(max_degree + 1);
    out.push(vec![1.0]);
    for k in 0..max_degree {
        let mut next = times_x_1d(&out[k]);
        for (i, c) in out[k].iter().enumerate() {
            next[i] -= rec.diag(k) * c;
        }
        if k > 0 {
            for (i, c) in out[k - 1].iter().enumerate() {
                next[i] -= rec.offdiag(k) * c;
            }
        }
        let s = rec.offdiag(k + 1);
        next.iter_mut().for_each(|c| *c /= s);
        out.push(next);
    }
    let norm = jacobi_mass(a, a).sqrt();
    out.into_iter()
        .map(|c| c.into_iter().map(|v| v / norm).collect())
        .collect()
}

/// Coefficients of `x_i P_n = A_{n,i} P_{n+1} + B_{n,i} P_n + A_{n-1,i}^t P_{n-1}`.
#[derive(Debug, Clone)]
pub struct ThreeTermCoefficients {
    pub n: usize,
    pub a1: DMatrix<f64>,
    pub a2: DMatrix<f64>,
    pub b1: DMatrix<f64>,
    pub b2: DMatrix<f64>,
}

/// `a_k = (k+1) / sqrt((2k+1)(2k+3))`.
pub fn legendre_a(k: usize) -> f64 {
    let k = k as f64;
    (k + 1.0) / ((2.0 * k + 1.0) * (2.0 * k + 3.0)).sqrt()
}

/// Closed-form constant-weight matrices: `A1[k][k] = a_{n-k}`,
/// `A2[k][k+1] = a_k`.
pub fn legendre_three_term(n: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut a1 = DMatrix::zeros(n + 1, n + 2);
    let mut a2 = DMatrix::zeros(n + 1, n + 2);
    for k in 0..=n {
        a1[(k, k)] = legendre_a(n - k);
        a2[(k, k + 1)] = legendre_a(k);
    }
    (a1, a2)
}

/// Orthonormal basis of `Pi_{max_degree}^2` graded by degree.
#[derive(Debug, Clone)]
pub struct OrthoBasis2D {
    weight: WeightSpec,
    max_degree: usize,
    /// Row `r` holds the Chebyshev coefficients of basis polynomial `r`.
    coeffs: DMatrix<f64>,
    /// `int T_a T_b W` over the Chebyshev features.
    gram_t: DMatrix<f64>,
    /// `int T_a W`.
    moments_t: DVector<f64>,
}

impl OrthoBasis2D {
    pub fn new(weight: WeightSpec, max_degree: usize) -> Result<Self> {
        weight.validate()?;
        let d = dim(max_degree);
        let rule = tensor_rule(&weight, 2 * max_degree)?;
        let phi = feature_matrix(max_degree, &rule.points);
        let wts = DVector::from_column_slice(&rule.weights);
        let mut scaled = phi.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= wts[k];
        }
        let gram_t = &scaled * phi.transpose();
        let moments_t = &phi * &wts;

        let mut coeffs = DMatrix::zeros(d, d);
        match weight {
            WeightSpec::GeneralizedChebyshev { alpha, beta, gamma } => {
                let mut row = 0;
                for n in 0..=max_degree {
                    let gb = generalized_basis(alpha, beta, gamma, n)?;
                    for p in gb.all() {
                        let c = DVector::from_column_slice(&p.padded(max_degree));
                        let norm = c.dot(&(&gram_t * &c)).sqrt();
                        coeffs.row_mut(row).copy_from(&(c / norm).transpose());
                        row += 1;
                    }
                }
                debug_assert_eq!(row, d);
            }
            _ => {
                let (ax, ay) = weight.axis_exponents();
                let sx = jacobi_series(ax, max_degree);
                let sy = jacobi_series(ay, max_degree);
                for n in 0..=max_degree {
                    for k in 0..=n {
                        let p = Poly2::from_product(&sx[n - k], &sy[k]);
                        let c = p.padded(max_degree);
                        coeffs.row_mut(dim(n) - (n + 1) + k).copy_from_slice(&c);
                    }
                }
            }
        }
        Ok(Self {
            weight,
            max_degree,
            coeffs,
            gram_t,
            moments_t,
        })
    }

    pub fn weight(&self) -> &WeightSpec {
        &self.weight
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Coefficient matrix (one row per basis polynomial).
    pub fn coeffs(&self) -> &DMatrix<f64> {
        &self.coeffs
    }

    pub fn gram_t(&self) -> &DMatrix<f64> {
        &self.gram_t
    }

    fn check_degree(&self, n: usize) {
        assert!(n <= self.max_degree, "degree {n} exceeds basis degree {}", self.max_degree);
    }

    /// `P_k^n` as a polynomial.
    pub fn poly(&self, n: usize, k: usize) -> Poly2 {
        self.check_degree(n);
        assert!(k <= n);
        let row = dim(n) - (n + 1) + k;
        let c: Vec<f64> = self.coeffs.row(row).iter().take(dim(n)).copied().collect();
        Poly2::from_coeffs(n, c)
    }

    /// All members of `V_n`.
    pub fn degree_polys(&self, n: usize) -> Vec<Poly2> {
        (0..=n).map(|k| self.poly(n, k)).collect()
    }

    /// Rows of the coefficient matrix for degrees `<= n`, truncated to
    /// Chebyshev features of degree `<= n`.
    pub fn rows_through(&self, n: usize) -> DMatrix<f64> {
        self.check_degree(n);
        self.coeffs.view((0, 0), (dim(n), dim(n))).into_owned()
    }

    /// Values of `P_k^n`, `0 <= k <= n`.
    pub fn eval_degree(&self, n: usize, x: f64, y: f64) -> Vec<f64> {
        self.check_degree(n);
        let f = cheb_features(n, x, y);
        let start = dim(n) - (n + 1);
        (start..dim(n))
            .map(|r| self.coeffs.row(r).iter().zip(&f).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Values of every basis polynomial of degree `<= n`.
    pub fn eval_through(&self, n: usize, x: f64, y: f64) -> DVector<f64> {
        let f = DVector::from_vec(cheb_features(n, x, y));
        self.rows_through(n) * f
    }

    /// `int p q W`.
    pub fn inner(&self, p: &Poly2, q: &Poly2) -> f64 {
        assert!(p.degree <= self.max_degree && q.degree <= self.max_degree);
        let a = DVector::from_vec(p.padded(self.max_degree));
        let b = DVector::from_vec(q.padded(self.max_degree));
        a.dot(&(&self.gram_t * b))
    }

    /// `int p W`.
    pub fn integral(&self, p: &Poly2) -> f64 {
        assert!(p.degree <= self.max_degree);
        p.coeffs.iter().zip(self.moments_t.iter()).map(|(a, b)| a * b).sum()
    }

    /// Chebyshev moments `int T_{s-j}(x) T_j(y) W` for features of degree `<= d`.
    pub fn cheb_moments(&self, d: usize) -> Result<DVector<f64>> {
        if d <= self.max_degree {
            return Ok(self.moments_t.rows(0, dim(d)).into_owned());
        }
        cheb_moments(&self.weight, d)
    }

    /// Gram matrix of the degree-`<= n` basis.
    pub fn gram(&self, n: usize) -> DMatrix<f64> {
        let c = self.coeffs.rows(0, dim(n)).into_owned();
        &c * &self.gram_t * c.transpose()
    }

    /// Three-term coefficients at degree `n`; requires `n + 1 <= max_degree`.
    pub fn three_term(&self, n: usize) -> ThreeTermCoefficients {
        self.check_degree(n + 1);
        let zero = DMatrix::zeros(n + 1, n + 1);
        if self.weight == WeightSpec::Constant {
            let (a1, a2) = legendre_three_term(n);
            return ThreeTermCoefficients {
                n,
                a1,
                a2,
                b1: zero.clone(),
                b2: zero,
            };
        }
        let x = Poly2::cheb_tt(1, 0);
        let y = Poly2::cheb_tt(0, 1);
        let pn = self.degree_polys(n);
        let pn1 = self.degree_polys(n + 1);
        let mut a1 = DMatrix::zeros(n + 1, n + 2);
        let mut a2 = DMatrix::zeros(n + 1, n + 2);
        for (k, p) in pn.iter().enumerate() {
            let xp = x.mul(p);
            let yp = y.mul(p);
            for (l, q) in pn1.iter().enumerate() {
                a1[(k, l)] = self.inner(&xp, q);
                a2[(k, l)] = self.inner(&yp, q);
            }
        }
        // Central symmetry forces B = 0 exactly.
        ThreeTermCoefficients {
            n,
            a1,
            a2,
            b1: zero.clone(),
            b2: zero,
        }
    }

    /// `K_n(z, z2)` by direct summation.
    pub fn kernel_k(&self, n: usize, z: [f64; 2], z2: [f64; 2]) -> f64 {
        let u = self.eval_through(n, z[0], z[1]);
        let v = self.eval_through(n, z2[0], z2[1]);
        u.dot(&v)
    }
}

/// Chebyshev moments of a weight for features of degree `<= d`.
pub fn cheb_moments(w: &WeightSpec, d: usize) -> Result<DVector<f64>> {
    let rule = tensor_rule(w, d)?;
    let mut out = DVector::zeros(dim(d));
    let mut buf = vec![0.0; dim(d)];
    for (p, wt) in rule.points.iter().zip(&rule.weights) {
        cheb_features_into(d, p[0], p[1], &mut buf);
        for (o, b) in out.iter_mut().zip(&buf) {
            *o += wt * b;
        }
    }
    Ok(out)
}

/// Which of the admissible `K_n^*` configurations a spec represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelConfig {
    /// `sigma = 0`: the kernel is `K_{n-1}` (Gaussian rules of degree `2n-2`).
    Gaussian,
    /// `sigma = floor(n/2)`.
    Minimal,
    /// `sigma = floor(n/2) + 1`.
    NearMinimal,
}

/// The split of `V_n` that defines `Pi_n^* = Pi_{n-1} + span Q_n` and
/// `K_n^* = K_{n-1} + sum_j Q_j Q_j`.
#[derive(Debug, Clone)]
pub struct KernelStarSpec {
    pub n: usize,
    pub config: KernelConfig,
    /// Orthonormal complement of the vanishing polynomials inside `V_n`.
    pub q: Vec<Poly2>,
}

impl KernelStarSpec {
    pub fn gaussian(n: usize) -> Self {
        Self {
            n,
            config: KernelConfig::Gaussian,
            q: Vec::new(),
        }
    }

    pub fn sigma(&self) -> usize {
        self.q.len()
    }

    /// Builds `Q_n` as the orthonormal complement in `V_n` of the span of
    /// `vanishing`, which must lie in `V_n`.
    pub fn from_vanishing(basis: &OrthoBasis2D, n: usize, vanishing: &[Poly2]) -> Result<Self> {
        if n == 0 || n > basis.max_degree() {
            return Err(Error::InvalidParameter(format!(
                "kernel degree {n} outside 1..={}",
                basis.max_degree()
            )));
        }
        let vn = basis.degree_polys(n);
        let mut c = DMatrix::zeros(vanishing.len(), n + 1);
        for (i, p) in vanishing.iter().enumerate() {
            let mut captured = 0.0;
            for (k, q) in vn.iter().enumerate() {
                c[(i, k)] = basis.inner(p, q);
                captured += c[(i, k)] * c[(i, k)];
            }
            let total = basis.inner(p, p);
            if (total - captured).abs() > 1e-8 * total.max(f64::MIN_POSITIVE) {
                return Err(Error::InvalidParameter(format!(
                    "vanishing polynomial {i} is not orthogonal to lower degrees (captured {captured:.6e} of {total:.6e})"
                )));
            }
        }
        // pad to square so the SVD returns a full set of right singular vectors
        let rows = vanishing.len().max(n + 1);
        let mut padded = DMatrix::zeros(rows, n + 1);
        padded.view_mut((0, 0), (vanishing.len(), n + 1)).copy_from(&c);
        let svd = padded.svd(false, true);
        let vt = svd
            .v_t
            .ok_or_else(|| Error::EigenFailure("vanishing-span SVD".into()))?;
        let top = svd.singular_values.max();
        let null: Vec<usize> = (0..=n)
            .filter(|&i| svd.singular_values[i] <= 1e-10 * top)
            .collect();
        let sigma = null.len();
        let config = if sigma == n / 2 {
            KernelConfig::Minimal
        } else if sigma == n / 2 + 1 {
            KernelConfig::NearMinimal
        } else {
            return Err(Error::InvalidParameter(format!(
                "complement dimension {sigma} is neither floor(n/2) nor floor(n/2)+1 for n = {n}"
            )));
        };
        let q = null
            .iter()
            .map(|&i| {
                let v = vt.row(i).transpose();
                let mut acc = Poly2::zero(n);
                for (k, p) in vn.iter().enumerate() {
                    acc = acc.add(&p.scale(v[k]));
                }
                acc
            })
            .collect();
        Ok(Self { n, config, q })
    }

    /// Rescales `Q_n` within its span so that `K_n^*` is diagonal on
    /// `nodes`, i.e. `K_n^*(z_j, z_k) = 0` for `j != k`.
    ///
    /// The products `Q_i Q_j` have degree `2n`, beyond the exactness of a
    /// degree `2n - 1` rule, so the `W`-orthonormal complement need not
    /// make the cardinal functions vanish at the other nodes. The metric
    /// `M` on `span Q_n` is found by linear least squares over all node
    /// pairs and must be positive definite; `M = I` when the orthonormal
    /// complement already works.
    pub fn fit_to_nodes(&self, basis: &OrthoBasis2D, nodes: &[[f64; 2]]) -> Result<Self> {
        let s = self.q.len();
        if s == 0 || nodes.len() < 2 {
            return Ok(self.clone());
        }
        let n = self.n;
        let lower = basis.rows_through(n - 1);
        let feats = feature_matrix(n, nodes);
        let p = lower * feats.rows(0, dim(n - 1));
        let qrows = DMatrix::from_fn(s, dim(n), |i, k| self.q[i].padded(n)[k]);
        let f = qrows * &feats;
        let kl = p.transpose() * &p;
        // Unknowns are the entries M_uv, u <= v, each paired with the
        // symmetric unit matrix E_c. The equations f_j^t E_c f_k = -Kl_jk
        // over pairs j < k are solved through normal equations assembled
        // from full sums minus the diagonal, so no pair list is formed.
        let pairs: Vec<(usize, usize)> = (0..s).flat_map(|a| (a..s).map(move |b| (a, b))).collect();
        let count = nodes.len();
        let unit = |&(u, v): &(usize, usize)| {
            let mut e = DMatrix::zeros(s, s);
            e[(u, v)] = 1.0;
            e[(v, u)] = 1.0;
            e
        };
        let units: Vec<DMatrix<f64>> = pairs.iter().map(unit).collect();
        let gram = &f * f.transpose();
        let fkf = &f * &kl * f.transpose();
        let diag: Vec<DVector<f64>> = (0..count)
            .map(|j| {
                let fj = f.column(j);
                DVector::from_iterator(units.len(), units.iter().map(|e| (fj.transpose() * e * fj)[(0, 0)]))
            })
            .collect();
        let eg: Vec<DMatrix<f64>> = units.iter().map(|e| e * &gram).collect();
        let c = units.len();
        let mut normal = DMatrix::zeros(c, c);
        let mut rhs = DVector::zeros(c);
        for a in 0..c {
            for b in a..c {
                let full = (&eg[a] * &eg[b]).trace();
                let d: f64 = diag.iter().map(|v| v[a] * v[b]).sum();
                normal[(a, b)] = 0.5 * (full - d);
                normal[(b, a)] = normal[(a, b)];
            }
            let full = (&units[a] * &fkf).trace();
            let d: f64 = (0..count).map(|j| diag[j][a] * kl[(j, j)]).sum();
            rhs[a] = -0.5 * (full - d);
        }
        let svd = normal.svd(true, true);
        let smax = svd.singular_values.max();
        let sol = svd
            .solve(&rhs, 1e-14 * smax)
            .map_err(|e| Error::SingularSystem(e.to_string()))?;
        let mut m = DMatrix::zeros(s, s);
        for (c, &(u, v)) in pairs.iter().enumerate() {
            m[(u, v)] = sol[c];
            m[(v, u)] = sol[c];
        }
        let kstar = &kl + f.transpose() * &m * &f;
        let scale = kl.diagonal().max();
        let mut resid: f64 = 0.0;
        for j in 0..count {
            for k in j + 1..count {
                resid = resid.max(kstar[(j, k)].abs());
            }
        }
        if resid > 1e-9 * scale {
            return Err(Error::SingularSystem(format!(
                "no metric on the complement makes the kernel diagonal on the nodes (residual {resid:.3e})"
            )));
        }
        let l = m
            .cholesky()
            .ok_or_else(|| Error::SingularSystem("complement metric is not positive definite".into()))?
            .l();
        let q = (0..s)
            .map(|i| {
                let mut acc = Poly2::zero(n);
                for (a, qa) in self.q.iter().enumerate() {
                    acc = acc.add(&qa.scale(l[(a, i)]));
                }
                acc
            })
            .collect();
        Ok(Self { n, config: self.config, q })
    }

    /// Feature rows: orthonormal basis of `Pi_{n-1}` followed by `Q_n`, each
    /// as Chebyshev coefficients of degree `<= n`.
    pub fn feature_rows(&self, basis: &OrthoBasis2D) -> DMatrix<f64> {
        let n = self.n;
        let lower = if n == 0 { 0 } else { dim(n - 1) };
        let mut rows = DMatrix::zeros(lower + self.q.len(), dim(n));
        if n > 0 {
            let r = basis.rows_through(n - 1);
            rows.view_mut((0, 0), (lower, lower)).copy_from(&r);
        }
        for (j, q) in self.q.iter().enumerate() {
            rows.row_mut(lower + j).copy_from_slice(&q.padded(n));
        }
        rows
    }
}

/// `K_n^*(z, z2) = K_{n-1}(z, z2) + sum_j Q_j(z) Q_j(z2)`.
pub fn kernel_k_star(spec: &KernelStarSpec, basis: &OrthoBasis2D, z: [f64; 2], z2: [f64; 2]) -> f64 {
    let mut k = if spec.n == 0 { 0.0 } else { basis.kernel_k(spec.n - 1, z, z2) };
    for q in &spec.q {
        k += q.eval(z[0], z[1]) * q.eval(z2[0], z2[1]);
    }
    k
}
