//! Lagrange interpolation on the node families, Lebesgue constants and
//! convergence diagnostics.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis2d::{cheb_moments, KernelStarSpec, OrthoBasis2D};
use crate::cubature::RuleFamily;
use crate::error::{Error, Result};
use crate::nodes::{padua_points, NodeSet};
use crate::poly::{cheb_grid_matrix, eval_on_tensor_grid, cheb_features, feature_matrix, Poly2};
use crate::weights::{tensor_rule, WeightSpec};

/// Default resolution of the Lebesgue grid.
pub const DEFAULT_RESOLUTION: usize = 256;

/// Smallest accepted Lebesgue grid resolution.
pub const MIN_RESOLUTION: usize = 64;

/// `cos(k pi / (r - 1))`, `k = 0..r`: Chebyshev-Lobatto abscissae including
/// both endpoints. Grids of sizes `r` and `r'` are nested when `r - 1`
/// divides `r' - 1`.
pub fn lobatto_grid(r: usize) -> Vec<f64> {
    assert!(r >= 2);
    (0..r)
        .map(|k| (k as f64 * std::f64::consts::PI / (r - 1) as f64).cos())
        .collect()
}

/// The interpolation space of an [`Interpolant`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterpSpace {
    /// `Pi_{n-1} + span Q_n` with `sigma` complement polynomials.
    KernelStar { n: usize, sigma: usize },
    /// The full space `Pi_n^2`.
    FullDegree { n: usize },
}

/// A Lagrange interpolant stored through its cardinal functions.
#[derive(Debug, Clone)]
pub struct Interpolant {
    pub nodes: NodeSet,
    pub values: Vec<f64>,
    pub weight: WeightSpec,
    pub space: InterpSpace,
    /// Cubature weights for kernel-based interpolants.
    pub lambdas: Option<Vec<f64>>,
    /// 2-norm condition number of the collocation matrix, when one is solved.
    pub condition: Option<f64>,
    degree: usize,
    /// Column `k` holds the Chebyshev coefficients of the cardinal function `l_k`.
    cardinals: DMatrix<f64>,
    coeffs: DVector<f64>,
}

impl Interpolant {
    fn from_cardinals(
        nodes: NodeSet,
        values: Vec<f64>,
        weight: WeightSpec,
        space: InterpSpace,
        degree: usize,
        cardinals: DMatrix<f64>,
    ) -> Result<Self> {
        if values.len() != nodes.len() {
            return Err(Error::InvalidParameter(format!(
                "{} values for {} nodes",
                values.len(),
                nodes.len()
            )));
        }
        let coeffs = &cardinals * DVector::from_column_slice(&values);
        Ok(Self {
            nodes,
            values,
            weight,
            space,
            lambdas: None,
            condition: None,
            degree,
            cardinals,
            coeffs,
        })
    }

    /// Total degree of the Chebyshev expansion.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn cardinals(&self) -> &DMatrix<f64> {
        &self.cardinals
    }

    pub fn poly(&self) -> Poly2 {
        Poly2::from_coeffs(self.degree, self.coeffs.iter().copied().collect())
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let f = cheb_features(self.degree, x, y);
        self.coeffs.iter().zip(&f).map(|(a, b)| a * b).sum()
    }

    /// Cardinal function `l_k(x, y)`.
    pub fn cardinal(&self, k: usize, x: f64, y: f64) -> f64 {
        let f = cheb_features(self.degree, x, y);
        self.cardinals.column(k).iter().zip(&f).map(|(a, b)| a * b).sum()
    }

    /// Replaces the sampled values, keeping the cardinal functions.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        let mut out = Self::from_cardinals(
            self.nodes.clone(),
            values,
            self.weight,
            self.space,
            self.degree,
            self.cardinals.clone(),
        )?;
        out.lambdas = self.lambdas.clone();
        out.condition = self.condition;
        Ok(out)
    }

    /// `int L f W` from the Chebyshev moments of the weight.
    pub fn integral(&self) -> Result<f64> {
        let m = cheb_moments(&self.weight, self.degree)?;
        Ok(self.coeffs.dot(&m))
    }

    /// Values on the tensor grid `gx x gy`.
    pub fn eval_grid(&self, grid: &[f64]) -> DMatrix<f64> {
        let t = cheb_grid_matrix(self.degree, grid);
        eval_on_tensor_grid(self.degree, self.coeffs.as_slice(), &t, &t)
    }

    /// `max sum_k |l_k|` over a `resolution x resolution` Lobatto grid: a
    /// lower estimate of the Lebesgue constant.
    pub fn lebesgue(&self, resolution: usize) -> Result<f64> {
        if resolution < MIN_RESOLUTION {
            return Err(Error::InvalidParameter(format!(
                "Lebesgue grid resolution must be at least {MIN_RESOLUTION}, got {resolution}"
            )));
        }
        let grid = lobatto_grid(resolution);
        let t = cheb_grid_matrix(self.degree, &grid);
        let d = self.degree;
        let sum = (0..self.cardinals.ncols())
            .into_par_iter()
            .fold(
                || DMatrix::<f64>::zeros(resolution, resolution),
                |mut acc, k| {
                    let v = eval_on_tensor_grid(d, self.cardinals.column(k).as_slice(), &t, &t);
                    acc.zip_apply(&v, |a, b| *a += b.abs());
                    acc
                },
            )
            .reduce(
                || DMatrix::<f64>::zeros(resolution, resolution),
                |a, b| a + b,
            );
        Ok(sum.max())
    }
}

/// `L_n f = sum_k f(z_k) lambda_k K_n^*(., z_k)`.
pub fn interpolate_kernel(
    nodes: &NodeSet,
    spec: &KernelStarSpec,
    basis: &OrthoBasis2D,
    values: Vec<f64>,
) -> Result<Interpolant> {
    let rows = spec.feature_rows(basis);
    let phi = &rows * feature_matrix(spec.n, &nodes.points);
    let mut lambdas = Vec::with_capacity(nodes.len());
    let mut scaled = phi.clone();
    for (index, mut col) in scaled.column_iter_mut().enumerate() {
        let k = phi.column(index).norm_squared();
        if !(k > 0.0) {
            return Err(Error::NonPositiveKernel { index, value: k });
        }
        col /= k;
        lambdas.push(1.0 / k);
    }
    let cardinals = rows.transpose() * scaled;
    let space = InterpSpace::KernelStar {
        n: spec.n,
        sigma: spec.sigma(),
    };
    let mut out = Interpolant::from_cardinals(nodes.clone(), values, *basis.weight(), space, spec.n, cardinals)?;
    out.lambdas = Some(lambdas);
    Ok(out)
}

/// The unique interpolant in `Pi_n^2` on the Padua points, by collocation
/// in the product-Chebyshev basis.
pub fn interpolate_padua(n: usize, values: Vec<f64>) -> Result<Interpolant> {
    let nodes = padua_points(n)?;
    let v = feature_matrix(n, &nodes.points).transpose();
    let sv = v.singular_values();
    let smin = sv.min();
    if !(smin > 0.0) {
        return Err(Error::SingularSystem(format!("Padua collocation matrix for n = {n}")));
    }
    let condition = sv.max() / smin;
    let inv = v
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::SingularSystem(format!("Padua collocation matrix for n = {n}")))?;
    let mut out = Interpolant::from_cardinals(
        nodes,
        values,
        WeightSpec::CHEB1,
        InterpSpace::FullDegree { n },
        n,
        inv,
    )?;
    out.condition = Some(condition);
    Ok(out)
}

/// Node families with an interpolation operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum InterpFamily {
    /// Minimal (even `n`) or near-minimal (odd `n`) first-kind Chebyshev nodes.
    Cheb1,
    /// Gaussian second-kind Chebyshev nodes; interpolates in `Pi_{n-1}`.
    GaussU,
    Padua,
    GenCheb { alpha: f64, beta: f64 },
}

impl InterpFamily {
    fn rule_family(&self, n: usize) -> Option<RuleFamily> {
        match *self {
            InterpFamily::Cheb1 => Some(RuleFamily::ChebT { n }),
            InterpFamily::GaussU => Some(RuleFamily::GaussU { n }),
            InterpFamily::Padua => None,
            InterpFamily::GenCheb { alpha, beta } => Some(RuleFamily::GenCheb { alpha, beta, n }),
        }
    }

    /// Interpolant of `f` at the degree-`n` nodes.
    pub fn interpolate(&self, n: usize, f: impl Fn(f64, f64) -> f64) -> Result<Interpolant> {
        match self.rule_family(n) {
            None => {
                let nodes = padua_points(n)?;
                let values = nodes.points.iter().map(|p| f(p[0], p[1])).collect();
                interpolate_padua(n, values)
            }
            Some(rf) => {
                let nodes = rf.nodes()?;
                let (basis, spec) = rf
                    .kernel(&nodes)?
                    .ok_or_else(|| Error::InvalidParameter("family has no kernel".into()))?;
                let values = nodes.points.iter().map(|p| f(p[0], p[1])).collect();
                interpolate_kernel(&nodes, &spec, &basis, values)
            }
        }
    }

    /// Exponent `2 max(alpha, beta) + 1` of the expected Lebesgue growth,
    /// for the generalized family.
    pub fn growth_exponent(&self) -> Option<f64> {
        match *self {
            InterpFamily::GenCheb { alpha, beta } => Some(2.0 * alpha.max(beta) + 1.0),
            _ => None,
        }
    }
}

/// Lebesgue-constant estimate on a `resolution^2` Lobatto grid.
pub fn lebesgue_constant(family: InterpFamily, n: usize, resolution: usize) -> Result<f64> {
    family.interpolate(n, |_, _| 0.0)?.lebesgue(resolution)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorNorm {
    /// Maximum over a fixed 201 x 201 Lobatto grid.
    Sup,
    /// Weighted L2 norm from a high-order tensor rule.
    L2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub error: f64,
}

/// Grid size used by the sup-norm diagnostic.
pub const SUP_GRID: usize = 201;

/// `||f - L_n f||` for each `n` in `n_list`.
pub fn convergence_report(
    family: InterpFamily,
    f: impl Fn(f64, f64) -> f64 + Sync,
    n_list: &[usize],
    norm: ErrorNorm,
) -> Result<Vec<ConvergenceRow>> {
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let interp = family.interpolate(n, &f)?;
        let error = match norm {
            ErrorNorm::Sup => {
                let grid = lobatto_grid(SUP_GRID);
                let lf = interp.eval_grid(&grid);
                let mut e: f64 = 0.0;
                for (a, &x) in grid.iter().enumerate() {
                    for (b, &y) in grid.iter().enumerate() {
                        e = e.max((f(x, y) - lf[(a, b)]).abs());
                    }
                }
                e
            }
            ErrorNorm::L2 => {
                let rule = tensor_rule(&interp.weight, 2 * n + 60)?;
                rule.integrate(|x, y| (f(x, y) - interp.eval(x, y)).powi(2)).sqrt()
            }
        };
        rows.push(ConvergenceRow { n, error });
    }
    Ok(rows)
}
