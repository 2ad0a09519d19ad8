//! Weight functions on the square and the tensor-Gauss moment oracle.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::univariate::{gauss_rule_1d, GaussRule};

/// Environment variable overriding the per-axis safety margin of the oracle.
pub const ORACLE_MARGIN_ENV: &str = "CUBASQUARE_ORACLE_DIGITS";

const DEFAULT_MARGIN: usize = 2;

/// A centrally symmetric weight function on `[-1, 1]^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum WeightSpec {
    /// `W = 1`.
    Constant,
    /// `(1-x^2)^(lambda-1/2) (1-y^2)^(lambda-1/2)`; `lambda = 0` and `1` are
    /// the Chebyshev weights of the first and second kind.
    ProductGegenbauer { lambda: f64 },
    /// `(1-x^2)^alpha (1-y^2)^beta`.
    ProductJacobiPair { alpha: f64, beta: f64 },
    /// `|x-y|^(2 alpha+1) |x+y|^(2 beta+1) (1-x^2)^gamma (1-y^2)^gamma`,
    /// with `gamma = +-1/2`.
    GeneralizedChebyshev { alpha: f64, beta: f64, gamma: f64 },
}

impl WeightSpec {
    pub const CHEB1: WeightSpec = WeightSpec::ProductGegenbauer { lambda: 0.0 };
    pub const CHEB2: WeightSpec = WeightSpec::ProductGegenbauer { lambda: 1.0 };

    pub fn gencheb(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let w = WeightSpec::GeneralizedChebyshev { alpha, beta, gamma };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: String| {
            Err(Error::UnsupportedWeight {
                weight: self.to_string(),
                reason,
            })
        };
        match *self {
            WeightSpec::Constant => Ok(()),
            WeightSpec::ProductGegenbauer { lambda } => {
                if lambda.is_finite() && lambda > -0.5 {
                    Ok(())
                } else {
                    bad("lambda must exceed -1/2".into())
                }
            }
            WeightSpec::ProductJacobiPair { alpha, beta } => {
                if alpha > -1.0 && beta > -1.0 && alpha.is_finite() && beta.is_finite() {
                    Ok(())
                } else {
                    bad("exponents must exceed -1".into())
                }
            }
            WeightSpec::GeneralizedChebyshev { alpha, beta, gamma } => {
                if !(alpha > -1.0 && beta > -1.0 && alpha.is_finite() && beta.is_finite()) {
                    bad("alpha and beta must exceed -1".into())
                } else if gamma != 0.5 && gamma != -0.5 {
                    bad("gamma must be -1/2 or 1/2".into())
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Exponents `(a, b)` of the per-axis Jacobi factors `(1-x^2)^a (1-y^2)^b`.
    pub fn axis_exponents(&self) -> (f64, f64) {
        match *self {
            WeightSpec::Constant => (0.0, 0.0),
            WeightSpec::ProductGegenbauer { lambda } => (lambda - 0.5, lambda - 0.5),
            WeightSpec::ProductJacobiPair { alpha, beta } => (alpha, beta),
            WeightSpec::GeneralizedChebyshev { gamma, .. } => (gamma, gamma),
        }
    }

    /// Whether the weight is a product of univariate weights.
    pub fn is_product(&self) -> bool {
        !matches!(self, WeightSpec::GeneralizedChebyshev { .. })
    }

    /// Integer exponents of the `(x-y)` and `(x+y)` factors, when the oracle
    /// can integrate them exactly.
    pub fn diagonal_exponents(&self) -> Result<(u32, u32)> {
        match *self {
            WeightSpec::GeneralizedChebyshev { alpha, beta, .. } => {
                let a = even_integer(2.0 * alpha + 1.0);
                let b = even_integer(2.0 * beta + 1.0);
                match (a, b) {
                    (Some(a), Some(b)) => Ok((a, b)),
                    _ => Err(Error::UnsupportedWeight {
                        weight: self.to_string(),
                        reason: "the exact oracle needs alpha, beta in {-1/2, 1/2, 3/2, ...}".into(),
                    }),
                }
            }
            _ => Ok((0, 0)),
        }
    }

    /// Pointwise value of the weight.
    pub fn density(&self, x: f64, y: f64) -> f64 {
        match *self {
            WeightSpec::GeneralizedChebyshev { alpha, beta, gamma } => {
                (x - y).abs().powf(2.0 * alpha + 1.0)
                    * (x + y).abs().powf(2.0 * beta + 1.0)
                    * ((1.0 - x * x) * (1.0 - y * y)).powf(gamma)
            }
            _ => {
                let (a, b) = self.axis_exponents();
                (1.0 - x * x).powf(a) * (1.0 - y * y).powf(b)
            }
        }
    }
}

fn even_integer(t: f64) -> Option<u32> {
    let r = t.round();
    if (t - r).abs() < 1e-12 && r >= 0.0 && (r as u32).is_multiple_of(2) {
        Some(r as u32)
    } else {
        None
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v}")
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            WeightSpec::Constant => write!(f, "const"),
            WeightSpec::ProductGegenbauer { lambda } if lambda == 0.0 => write!(f, "cheb1"),
            WeightSpec::ProductGegenbauer { lambda } if lambda == 1.0 => write!(f, "cheb2"),
            WeightSpec::ProductGegenbauer { lambda } => write!(f, "gegenbauer:{}", fmt_num(lambda)),
            WeightSpec::ProductJacobiPair { alpha, beta } => {
                write!(f, "jacobi:{}:{}", fmt_num(alpha), fmt_num(beta))
            }
            WeightSpec::GeneralizedChebyshev { alpha, beta, gamma } => {
                write!(f, "gencheb:{}:{}:{}", fmt_num(alpha), fmt_num(beta), fmt_num(gamma))
            }
        }
    }
}

impl FromStr for WeightSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |t: &str| -> Result<f64> {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad number `{t}` in weight `{s}`: {e}")))
        };
        let w = match parts.as_slice() {
            ["const"] | ["constant"] => WeightSpec::Constant,
            ["cheb1"] => WeightSpec::CHEB1,
            ["cheb2"] => WeightSpec::CHEB2,
            ["gegenbauer", l] => WeightSpec::ProductGegenbauer { lambda: num(l)? },
            ["jacobi", a, b] => WeightSpec::ProductJacobiPair {
                alpha: num(a)?,
                beta: num(b)?,
            },
            ["gencheb", a, b, g] => WeightSpec::GeneralizedChebyshev {
                alpha: num(a)?,
                beta: num(b)?,
                gamma: num(g)?,
            },
            _ => {
                return Err(Error::Parse(format!(
                    "unknown weight `{s}` (expected const, cheb1, cheb2, gegenbauer:L, jacobi:A:B or gencheb:A:B:G)"
                )))
            }
        };
        w.validate()?;
        Ok(w)
    }
}

impl TryFrom<String> for WeightSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<WeightSpec> for String {
    fn from(w: WeightSpec) -> String {
        w.to_string()
    }
}

/// Per-axis safety margin for the oracle's Gauss order.
pub fn oracle_margin() -> usize {
    std::env::var(ORACLE_MARGIN_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MARGIN)
}

type RuleKey = (u64, u64, usize);

fn rule_cache() -> &'static RwLock<HashMap<RuleKey, Arc<GaussRule>>> {
    static CACHE: OnceLock<RwLock<HashMap<RuleKey, Arc<GaussRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Gauss-Jacobi rule shared through a process-wide cache.
pub fn cached_gauss_rule(alpha: f64, beta: f64, m: usize) -> Result<Arc<GaussRule>> {
    let key = (alpha.to_bits(), beta.to_bits(), m);
    if let Some(r) = rule_cache().read().expect("rule cache poisoned").get(&key) {
        return Ok(r.clone());
    }
    let rule = Arc::new(gauss_rule_1d(alpha, beta, m)?);
    rule_cache()
        .write()
        .expect("rule cache poisoned")
        .insert(key, rule.clone());
    Ok(rule)
}

/// Tensor rule whose weights already include the full weight function.
#[derive(Debug, Clone)]
pub struct TensorRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

impl TensorRule {
    pub fn integrate(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(p[0], p[1]))
            .sum()
    }
}

/// Rule exact for `int p W` with `p` of total degree `degree`.
pub fn tensor_rule(w: &WeightSpec, degree: usize) -> Result<TensorRule> {
    w.validate()?;
    let (da, db) = w.diagonal_exponents()?;
    let total = degree + (da + db) as usize;
    let m = total.div_ceil(2) + oracle_margin();
    let m = m.max(1);
    let (ax, ay) = w.axis_exponents();
    let rx = cached_gauss_rule(ax, ax, m)?;
    let ry = cached_gauss_rule(ay, ay, m)?;
    let mut points = Vec::with_capacity(m * m);
    let mut weights = Vec::with_capacity(m * m);
    for (&x, &wx) in rx.points.iter().zip(&rx.weights) {
        for (&y, &wy) in ry.points.iter().zip(&ry.weights) {
            let factor = (x - y).powi(da as i32) * (x + y).powi(db as i32);
            points.push([x, y]);
            weights.push(wx * wy * factor);
        }
    }
    Ok(TensorRule { points, weights })
}

/// `int int x^i y^j W(x, y) dx dy`.
pub fn moment(w: &WeightSpec, i: usize, j: usize) -> Result<f64> {
    if (i + j) % 2 == 1 {
        return Ok(0.0);
    }
    let rule = tensor_rule(w, i + j)?;
    Ok(rule.integrate(|x, y| x.powi(i as i32) * y.powi(j as i32)))
}

/// All monomial moments with `i + j <= degree`, indexed `[i][j]`.
pub fn moment_table(w: &WeightSpec, degree: usize) -> Result<Vec<Vec<f64>>> {
    let rule = tensor_rule(w, degree)?;
    let mut table = vec![vec![0.0; degree + 1]; degree + 1];
    let mut xp = vec![0.0; degree + 1];
    let mut yp = vec![0.0; degree + 1];
    for (p, wt) in rule.points.iter().zip(&rule.weights) {
        powers_into(p[0], &mut xp);
        powers_into(p[1], &mut yp);
        for i in 0..=degree {
            for j in 0..=degree - i {
                table[i][j] += wt * xp[i] * yp[j];
            }
        }
    }
    for (i, row) in table.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            if (i + j) % 2 == 1 {
                *v = 0.0;
            }
        }
    }
    Ok(table)
}

fn powers_into(x: f64, out: &mut [f64]) {
    let mut p = 1.0;
    for v in out.iter_mut() {
        *v = p;
        p *= x;
    }
}

pub fn total_mass(w: &WeightSpec) -> Result<f64> {
    moment(w, 0, 0)
}

/// Whether `W(x, y) = W(-x, -y)`. Every supported kind is.
pub fn is_centrally_symmetric(w: &WeightSpec) -> bool {
    match *w {
        WeightSpec::Constant
        | WeightSpec::ProductGegenbauer { .. }
        | WeightSpec::ProductJacobiPair { .. }
        | WeightSpec::GeneralizedChebyshev { .. } => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn basic_moments() {
        assert_relative_eq!(moment(&WeightSpec::Constant, 0, 0).unwrap(), 4.0, epsilon = 1e-14);
        assert_relative_eq!(moment(&WeightSpec::CHEB1, 0, 0).unwrap(), PI * PI, epsilon = 1e-13);
        assert_eq!(moment(&WeightSpec::Constant, 1, 4).unwrap(), 0.0);
        assert_relative_eq!(moment(&WeightSpec::Constant, 2, 4).unwrap(), 4.0 / 15.0, epsilon = 1e-14);
    }

    #[test]
    fn gencheb_explicit_form() {
        // (1/2, -1/2, -1/2): (x-y)^2 / sqrt((1-x^2)(1-y^2)); mass = pi^2 (1/2 + 1/2) = pi^2
        let w = WeightSpec::gencheb(0.5, -0.5, -0.5).unwrap();
        assert_relative_eq!(total_mass(&w).unwrap(), PI * PI, epsilon = 1e-13);
        assert_relative_eq!(w.density(0.3, -0.2), 0.25 / (0.91f64 * 0.96).sqrt(), epsilon = 1e-14);
        let bad = WeightSpec::gencheb(0.3, 0.5, -0.5).unwrap();
        assert!(moment(&bad, 0, 0).is_err());
    }

    #[test]
    fn symmetry_guard() {
        assert!(is_centrally_symmetric(&WeightSpec::Constant));
        assert!(is_centrally_symmetric(&WeightSpec::CHEB1));
        assert!(is_centrally_symmetric(&WeightSpec::gencheb(0.5, -0.5, -0.5).unwrap()));
    }

    #[test]
    fn canonical_strings_round_trip() {
        for s in ["const", "cheb1", "cheb2", "gegenbauer:0.75", "jacobi:0.5:-0.5", "gencheb:0.5:-0.5:-0.5"] {
            let w: WeightSpec = s.parse().unwrap();
            assert_eq!(w.to_string(), s);
        }
        assert_eq!("gegenbauer:0".parse::<WeightSpec>().unwrap(), WeightSpec::CHEB1);
        assert!("gegenbauer:-0.7".parse::<WeightSpec>().is_err());
        assert!("gencheb:0.5:0.5:0.2".parse::<WeightSpec>().is_err());
        assert!("nonsense".parse::<WeightSpec>().is_err());
        let json = serde_json::to_string(&WeightSpec::CHEB2).unwrap();
        assert_eq!(json, "\"cheb2\"");
        assert_eq!(serde_json::from_str::<WeightSpec>(&json).unwrap(), WeightSpec::CHEB2);
    }

    #[test]
    fn gauss_rule_cache_reuses_rules() {
        let a = cached_gauss_rule(0.25, 0.25, 7).unwrap();
        let b = cached_gauss_rule(0.25, 0.25, 7).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }
}
