//! Cubature rules: weights, exactness verification and lower bounds.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::basis2d::{cheb_moments, generalized_basis, KernelConfig, KernelStarSpec, OrthoBasis2D};
use crate::error::{Error, Result};
use crate::nodes::{
    gauss_u_nodes, gencheb_nodes, min_t_nodes_even, n_min, near_min_t_nodes_odd, padua_points, NodeSet,
};
use crate::poly::{cheb_features, feature_matrix};
use crate::weights::{is_centrally_symmetric, moment_table, WeightSpec};

/// Relative tolerance of the exactness check.
pub const EXACTNESS_TOL: f64 = 1e-9;

/// Moment-residual tolerance of the Vandermonde solve.
pub const MOMENT_TOL: f64 = 1e-10;

/// A positive rule `sum_k lambda_k f(z_k)` of a declared degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubatureRule {
    pub weight: WeightSpec,
    pub degree: usize,
    pub nodes: NodeSet,
    pub lambdas: Vec<f64>,
    pub provenance: String,
}

impl CubatureRule {
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn apply(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        self.nodes
            .points
            .iter()
            .zip(&self.lambdas)
            .map(|(p, l)| l * f(p[0], p[1]))
            .sum()
    }

    pub fn min_lambda(&self) -> f64 {
        self.lambdas.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn check_positive(lambdas: &[f64]) -> Result<()> {
    match lambdas.iter().position(|l| !(*l > 0.0)) {
        Some(index) => Err(Error::NonPositiveWeight {
            index,
            value: lambdas[index],
        }),
        None => Ok(()),
    }
}

/// `lambda_k = 1 / K_n^*(z_k, z_k)`; the degree is `2n-2` for the Gaussian
/// configuration and `2n-1` otherwise.
pub fn weights_from_kernel(nodes: &NodeSet, spec: &KernelStarSpec, basis: &OrthoBasis2D) -> Result<CubatureRule> {
    let rows = spec.feature_rows(basis);
    let mut lambdas = Vec::with_capacity(nodes.len());
    for (index, z) in nodes.points.iter().enumerate() {
        let f = DVector::from_vec(cheb_features(spec.n, z[0], z[1]));
        let v = &rows * f;
        let k = v.norm_squared();
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::NonPositiveKernel { index, value: k });
        }
        lambdas.push(1.0 / k);
    }
    let degree = match spec.config {
        KernelConfig::Gaussian => 2 * spec.n - 2,
        _ => 2 * spec.n - 1,
    };
    Ok(CubatureRule {
        weight: *basis.weight(),
        degree,
        nodes: nodes.clone(),
        lambdas,
        provenance: format!(
            "kernel weights 1/K*(z,z), {:?} configuration with sigma = {}; nodes: {}",
            spec.config,
            spec.sigma(),
            nodes.variant
        ),
    })
}

/// Weights solving the Chebyshev moment equations through `exact_degree`
/// in the least-squares sense.
pub fn weights_from_vandermonde(nodes: &NodeSet, w: &WeightSpec, exact_degree: usize) -> Result<CubatureRule> {
    let v = feature_matrix(exact_degree, &nodes.points);
    let m = cheb_moments(w, exact_degree)?;
    let mass = m[0];
    let svd = v.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let lam = svd
        .solve(&m, 1e-13 * smax)
        .map_err(|e| Error::SingularSystem(e.to_string()))?;
    let residual = (&v * &lam - &m).amax() / mass.abs();
    if residual > MOMENT_TOL {
        return Err(Error::MomentResidual {
            residual,
            tolerance: MOMENT_TOL,
            degree: exact_degree,
        });
    }
    let lambdas: Vec<f64> = lam.iter().copied().collect();
    check_positive(&lambdas)?;
    Ok(CubatureRule {
        weight: *w,
        degree: exact_degree,
        nodes: nodes.clone(),
        lambdas,
        provenance: format!("moment-matching weights, residual {residual:.2e}; nodes: {}", nodes.variant),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonomialFailure {
    pub i: usize,
    pub j: usize,
    pub rel_error: f64,
}

/// Outcome of checking a rule against the moment oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactnessReport {
    pub declared_degree: usize,
    pub pass: bool,
    /// Largest `|Q(x^i y^j) - I(x^i y^j)| / I(1)` over `i + j <= declared`.
    pub max_rel_error: f64,
    /// Highest degree through which every monomial passes (searched up to
    /// `declared + 2`); `None` when even constants fail.
    pub exact_through: Option<usize>,
    /// First failing monomial in graded order.
    pub first_failure: Option<MonomialFailure>,
    pub tolerance: f64,
}

impl ExactnessReport {
    /// First failing total degree, if any was found.
    pub fn failure_degree(&self) -> Option<usize> {
        self.first_failure.map(|f| f.i + f.j)
    }

    /// The rule is exact beyond its declared degree.
    pub fn exceeds_declared(&self) -> bool {
        matches!(self.exact_through, Some(d) if d > self.declared_degree)
    }
}

/// Compares `sum lambda_k x_k^i y_k^j` with the oracle for `i + j <= degree + 2`.
pub fn exactness_check(rule: &CubatureRule) -> Result<ExactnessReport> {
    exactness_check_with_tol(rule, EXACTNESS_TOL)
}

pub fn exactness_check_with_tol(rule: &CubatureRule, tol: f64) -> Result<ExactnessReport> {
    let top = rule.degree + 2;
    let table = moment_table(&rule.weight, top)?;
    let mass = table[0][0];
    let mut sums = vec![vec![0.0; top + 1]; top + 1];
    for (p, l) in rule.nodes.points.iter().zip(&rule.lambdas) {
        let mut xi = 1.0;
        for row in sums.iter_mut() {
            let mut yj = 1.0;
            for v in row.iter_mut() {
                *v += l * xi * yj;
                yj *= p[1];
            }
            xi *= p[0];
        }
    }
    let mut max_rel_error: f64 = 0.0;
    let mut first_failure = None;
    let mut exact_through = None;
    for s in 0..=top {
        let mut ok = true;
        for j in 0..=s {
            let i = s - j;
            let err = (sums[i][j] - table[i][j]).abs() / mass;
            if s <= rule.degree {
                max_rel_error = max_rel_error.max(err);
            }
            if err > tol {
                ok = false;
                if first_failure.is_none() {
                    first_failure = Some(MonomialFailure { i, j, rel_error: err });
                }
            }
        }
        if ok && exact_through == s.checked_sub(1) {
            exact_through = Some(s);
        }
        if !ok && first_failure.is_some() && s > rule.degree {
            break;
        }
    }
    Ok(ExactnessReport {
        declared_degree: rule.degree,
        pass: max_rel_error <= tol,
        max_rel_error,
        exact_through,
        first_failure,
        tolerance: tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerBounds {
    pub dim_bound: usize,
    pub rank_bound: usize,
    pub moeller_bound: Option<usize>,
}

/// Node-count lower bounds for a rule of degree `2n-1`.
pub fn lower_bounds(w: &WeightSpec, n: usize) -> Result<LowerBounds> {
    if n == 0 {
        return Err(Error::InvalidParameter("lower bounds need n >= 1".into()));
    }
    let dim_bound = n * (n + 1) / 2;
    let basis = OrthoBasis2D::new(*w, n)?;
    let tt = basis.three_term(n - 1);
    let m = &tt.a1 * tt.a2.transpose() - &tt.a2 * tt.a1.transpose();
    let sv = m.singular_values();
    let smax = sv.max();
    let rank = if smax == 0.0 {
        0
    } else {
        sv.iter().filter(|s| **s > 1e-10 * smax).count()
    };
    Ok(LowerBounds {
        dim_bound,
        rank_bound: dim_bound + rank / 2,
        moeller_bound: is_centrally_symmetric(w).then(|| n_min(n)),
    })
}

/// The explicit families with a known kernel configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RuleFamily {
    /// Gaussian rule of degree `2n-2` for the second-kind Chebyshev weight.
    GaussU { n: usize },
    /// Minimal (`n` even) or near-minimal (`n` odd) first-kind Chebyshev rule.
    ChebT { n: usize },
    /// Degree-`2n-1` rule on the Padua points (first-kind Chebyshev weight).
    Padua { n: usize },
    /// Minimal or near-minimal rule for `W_{alpha,beta,-1/2}`.
    GenCheb { alpha: f64, beta: f64, n: usize },
}

impl RuleFamily {
    pub fn n(&self) -> usize {
        match *self {
            RuleFamily::GaussU { n }
            | RuleFamily::ChebT { n }
            | RuleFamily::Padua { n }
            | RuleFamily::GenCheb { n, .. } => n,
        }
    }

    pub fn weight(&self) -> WeightSpec {
        match *self {
            RuleFamily::GaussU { .. } => WeightSpec::CHEB2,
            RuleFamily::ChebT { .. } | RuleFamily::Padua { .. } => WeightSpec::CHEB1,
            RuleFamily::GenCheb { alpha, beta, .. } => WeightSpec::GeneralizedChebyshev {
                alpha,
                beta,
                gamma: -0.5,
            },
        }
    }

    pub fn degree(&self) -> usize {
        match *self {
            RuleFamily::GaussU { n } => 2 * n - 2,
            _ => 2 * self.n() - 1,
        }
    }

    pub fn nodes(&self) -> Result<NodeSet> {
        match *self {
            RuleFamily::GaussU { n } => gauss_u_nodes(n),
            RuleFamily::ChebT { n } if n % 2 == 0 => min_t_nodes_even(n),
            RuleFamily::ChebT { n } => near_min_t_nodes_odd(n),
            RuleFamily::Padua { n } => padua_points(n),
            RuleFamily::GenCheb { alpha, beta, n } => gencheb_nodes(alpha, beta, n),
        }
    }

    /// Basis and kernel spec, for the families whose weights come from
    /// `K_n^*`. Padua rules have none.
    pub fn kernel(&self, nodes: &NodeSet) -> Result<Option<(OrthoBasis2D, KernelStarSpec)>> {
        let n = self.n();
        let spec = match *self {
            RuleFamily::Padua { .. } => return Ok(None),
            RuleFamily::GaussU { n } => {
                let basis = OrthoBasis2D::new(self.weight(), n)?;
                return Ok(Some((basis, KernelStarSpec::gaussian(n))));
            }
            RuleFamily::ChebT { .. } => {
                let basis = OrthoBasis2D::new(self.weight(), n)?;
                let spec = KernelStarSpec::from_vanishing(&basis, n, &nodes.vanishing_polynomials())?
                    .fit_to_nodes(&basis, &nodes.points)?;
                (basis, spec)
            }
            RuleFamily::GenCheb { alpha, beta, n } => {
                let basis = OrthoBasis2D::new(self.weight(), n)?;
                let gb = generalized_basis(alpha, beta, -0.5, n)?;
                let vanishing = if n % 2 == 0 { gb.first } else { gb.second };
                let spec = KernelStarSpec::from_vanishing(&basis, n, &vanishing)?.fit_to_nodes(&basis, &nodes.points)?;
                (basis, spec)
            }
        };
        Ok(Some(spec))
    }

    /// Builds the rule: kernel weights where available, moment matching
    /// for Padua nodes.
    pub fn build(&self) -> Result<CubatureRule> {
        let nodes = self.nodes()?;
        match self.kernel(&nodes)? {
            Some((basis, spec)) => weights_from_kernel(&nodes, &spec, &basis),
            None => weights_from_vandermonde(&nodes, &self.weight(), self.degree()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nodes::Family;

    fn single_node() -> CubatureRule {
        CubatureRule {
            weight: WeightSpec::Constant,
            degree: 1,
            nodes: NodeSet {
                family: Family::Discovered,
                n: 1,
                expected_count: 1,
                alpha: None,
                beta: None,
                variant: String::new(),
                points: vec![[0.0, 0.0]],
            },
            lambdas: vec![4.0],
            provenance: "midpoint".into(),
        }
    }

    #[test]
    fn midpoint_rule_fails_at_degree_two() {
        let r = exactness_check(&single_node()).unwrap();
        assert!(r.pass);
        assert_eq!(r.exact_through, Some(1));
        assert_eq!(r.failure_degree(), Some(2));
    }

    #[test]
    fn constant_weight_bounds() {
        let b = lower_bounds(&WeightSpec::Constant, 5).unwrap();
        assert_eq!(b.moeller_bound, Some(17));
        assert_eq!(b.rank_bound, 17);
        assert_eq!(b.dim_bound, 15);
        assert_eq!(lower_bounds(&WeightSpec::Constant, 4).unwrap().moeller_bound, Some(12));
    }

    #[test]
    fn negative_weights_rejected() {
        assert!(matches!(
            check_positive(&[1.0, -1e-3]),
            Err(Error::NonPositiveWeight { index: 1, .. })
        ));
    }
}
