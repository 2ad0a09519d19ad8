//! Explicit node families on the square and their generating polynomials.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{chebyshev_t_series, chebyshev_u_series, Poly2};
use crate::univariate::jacobi_angle_grid;

/// Max-norm distance under which two nodes are identified.
pub const DEDUP_TOL: f64 = 1e-12;

/// Residual bound used when selecting among candidate index conventions.
const SELECT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    GaussU,
    MinTEven,
    NearMinTOdd,
    Padua,
    GenChebEven,
    GenChebOdd,
    /// Nodes found numerically as common zeros of a polynomial system.
    Discovered,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::GaussU => "gauss_u",
            Family::MinTEven => "min_t_even",
            Family::NearMinTOdd => "near_min_t_odd",
            Family::Padua => "padua",
            Family::GenChebEven => "gen_cheb_even",
            Family::GenChebOdd => "gen_cheb_odd",
            Family::Discovered => "discovered",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::Parse(format!("unknown node family `{s}`")))
    }
}

/// `N_min = n(n+1)/2 + floor(n/2)`.
pub fn n_min(n: usize) -> usize {
    n * (n + 1) / 2 + n / 2
}

/// A finite point set with the bookkeeping needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSet {
    pub family: Family,
    pub n: usize,
    pub expected_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Which index convention produced the points.
    #[serde(default)]
    pub variant: String,
    pub points: Vec<[f64; 2]>,
}

impl NodeSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Minimum pairwise max-norm separation.
    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            for q in &self.points[i + 1..] {
                best = best.min((p[0] - q[0]).abs().max((p[1] - q[1]).abs()));
            }
        }
        best
    }

    /// Whether the set is mapped onto itself by `f`.
    pub fn invariant_under(&self, f: impl Fn([f64; 2]) -> [f64; 2], tol: f64) -> bool {
        self.points.iter().all(|&p| {
            let q = f(p);
            self.points
                .iter()
                .any(|r| (r[0] - q[0]).abs() <= tol && (r[1] - q[1]).abs() <= tol)
        })
    }

    pub fn inside_square(&self, tol: f64) -> bool {
        self.points.iter().all(|p| p[0].abs() <= 1.0 + tol && p[1].abs() <= 1.0 + tol)
    }

    /// The generating polynomials that vanish on the set, when known.
    pub fn vanishing_polynomials(&self) -> Vec<Poly2> {
        match self.family {
            Family::GaussU => gauss_u_vanishing(self.n),
            Family::MinTEven => min_t_vanishing(self.n, VanishingForm::PlusRunning),
            Family::NearMinTOdd => near_min_t_vanishing(self.n),
            Family::Padua => padua_vanishing(self.n),
            _ => Vec::new(),
        }
    }

    /// `max |p(z)|` over the set and the given polynomials.
    pub fn vanishing_residual(&self, polys: &[Poly2]) -> f64 {
        max_residual(&self.points, polys)
    }
}

pub fn max_residual(points: &[[f64; 2]], polys: &[Poly2]) -> f64 {
    let mut r: f64 = 0.0;
    for p in polys {
        for z in points {
            r = r.max(p.eval(z[0], z[1]).abs());
        }
    }
    r
}

/// Sorts lexicographically and merges points closer than `tol` (max norm).
pub fn dedupe_sorted(mut pts: Vec<[f64; 2]>, tol: f64) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut out: Vec<[f64; 2]> = Vec::with_capacity(pts.len());
    for p in pts {
        if !out
            .iter()
            .any(|q| (p[0] - q[0]).abs() <= tol && (p[1] - q[1]).abs() <= tol)
        {
            out.push(p);
        }
    }
    out
}

fn cleaned(v: f64) -> f64 {
    // cos of exact multiples of pi/2 produce 6e-17 instead of 0
    if v.abs() < 1e-15 {
        0.0
    } else {
        v
    }
}

fn cos_frac(num: f64, den: f64) -> f64 {
    cleaned((num * PI / den).cos())
}

fn finish(family: Family, n: usize, expected: usize, variant: &str, pts: Vec<[f64; 2]>) -> NodeSet {
    NodeSet {
        family,
        n,
        expected_count: expected,
        alpha: None,
        beta: None,
        variant: variant.to_string(),
        points: dedupe_sorted(pts, DEDUP_TOL),
    }
}

fn t(n: i32) -> Vec<f64> {
    chebyshev_t_series(n)
}

fn u(n: i32) -> Vec<f64> {
    chebyshev_u_series(n)
}

fn prod(a: Vec<f64>, b: Vec<f64>) -> Poly2 {
    Poly2::from_product(&a, &b)
}

/// `U_{n-k}(x) U_k(y) + U_k(x) U_{n-1-k}(y)`, `0 <= k <= n`.
pub fn gauss_u_vanishing(n: usize) -> Vec<Poly2> {
    gauss_u_vanishing_signed(n, 1.0)
}

fn gauss_u_vanishing_signed(n: usize, sign: f64) -> Vec<Poly2> {
    let n = n as i32;
    (0..=n)
        .map(|k| prod(u(n - k), u(k)).add(&prod(u(k), u(n - 1 - k)).scale(sign)))
        .collect()
}

/// Nodes of the Gaussian rule of degree `2n-2` for the Chebyshev weight of
/// the second kind; `n(n+1)/2` interior points.
pub fn gauss_u_nodes(n: usize) -> Result<NodeSet> {
    if n == 0 {
        return Err(Error::InvalidParameter("gauss_u_nodes needs n >= 1".into()));
    }
    let nf = n as f64;
    let mut pts = Vec::new();
    for i in 1..=n.div_ceil(2) {
        for j in 1..=n.div_ceil(2) {
            pts.push([
                cos_frac(2.0 * i as f64, nf + 2.0),
                cos_frac(2.0 * j as f64 - 1.0, nf + 1.0),
            ]);
        }
    }
    for i in 1..=n / 2 + 1 {
        for j in 1..=n / 2 {
            pts.push([
                cos_frac(2.0 * i as f64 - 1.0, nf + 2.0),
                cos_frac(2.0 * j as f64, nf + 1.0),
            ]);
        }
    }
    let expected = n * (n + 1) / 2;
    let candidates = [("printed-sign", -1.0), ("plus-sign", 1.0)];
    let set = finish(Family::GaussU, n, expected, "", pts);
    for (name, sign) in candidates {
        if set.vanishing_residual(&gauss_u_vanishing_signed(n, sign)) <= SELECT_TOL {
            return Ok(NodeSet {
                variant: format!("nodes as displayed; vanishing {name}"),
                ..set
            });
        }
    }
    Err(Error::InvalidParameter(format!(
        "no vanishing convention fits the degree-{n} second-kind nodes"
    )))
}

/// Vanishing-polynomial conventions tried for the even first-kind family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VanishingForm {
    /// `T_{2m-k+1}(x) T_{m-1}(y) - T_{k-1}(x) T_{m-k+1}(y)` as typeset.
    AsTypeset,
    /// `T_{2m-k+1}(x) T_{k-1}(y) - T_{k-1}(x) T_{2m-k+1}(y)`.
    MinusRunning,
    /// `T_{2m-k+1}(x) T_{k-1}(y) + T_{k-1}(x) T_{2m-k+1}(y)`.
    PlusRunning,
}

/// `1 <= k <= m+1` generators for `n = 2m` in the given convention.
pub fn min_t_vanishing(n: usize, form: VanishingForm) -> Vec<Poly2> {
    let m = (n / 2) as i32;
    (1..=m + 1)
        .map(|k| match form {
            VanishingForm::AsTypeset => prod(t(2 * m - k + 1), t(m - 1)).add(&prod(t(k - 1), t(m - k + 1)).scale(-1.0)),
            VanishingForm::MinusRunning => {
                prod(t(2 * m - k + 1), t(k - 1)).add(&prod(t(k - 1), t(2 * m - k + 1)).scale(-1.0))
            }
            VanishingForm::PlusRunning => prod(t(2 * m - k + 1), t(k - 1)).add(&prod(t(k - 1), t(2 * m - k + 1))),
        })
        .collect()
}

fn min_t_candidates(m: usize) -> Vec<(&'static str, Vec<[f64; 2]>)> {
    let mf = m as f64;
    let mut typeset = Vec::new();
    let mut half = Vec::new();
    for i in 0..=m {
        for j in 0..m {
            let p = [cos_frac(i as f64, mf), cos_frac(2.0 * j as f64 + 1.0, 2.0 * mf)];
            typeset.push(p);
            half.push(p);
        }
    }
    for i in 0..=m {
        for j in 1..=m {
            typeset.push([cos_frac(2.0 * i as f64 + 1.0, mf), cos_frac(j as f64, mf)]);
        }
    }
    for i in 0..m {
        for j in 0..=m {
            half.push([cos_frac(2.0 * i as f64 + 1.0, 2.0 * mf), cos_frac(j as f64, mf)]);
        }
    }
    vec![("index ranges as typeset", typeset), ("second grid at (2i+1)pi/(2m)", half)]
}

/// Minimal-rule nodes for the first-kind Chebyshev weight, `n = 2m`.
///
/// Candidate index conventions are enumerated and the first that has
/// exactly `N_min` points annihilated by one of the candidate generator
/// families is kept; the choice is recorded in `variant`.
pub fn min_t_nodes_even(n: usize) -> Result<NodeSet> {
    if n < 2 || n % 2 == 1 {
        return Err(Error::InvalidParameter(format!("min_t_nodes_even needs even n >= 2, got {n}")));
    }
    let expected = n_min(n);
    let forms = [
        ("as typeset", VanishingForm::AsTypeset),
        ("minus sign, running index", VanishingForm::MinusRunning),
        ("plus sign, running index", VanishingForm::PlusRunning),
    ];
    for (name, pts) in min_t_candidates(n / 2) {
        let set = finish(Family::MinTEven, n, expected, "", pts);
        if set.len() != expected {
            continue;
        }
        for (fname, form) in forms {
            if set.vanishing_residual(&min_t_vanishing(n, form)) <= SELECT_TOL {
                return Ok(NodeSet {
                    variant: format!("{name}; vanishing {fname}"),
                    ..set
                });
            }
        }
    }
    Err(Error::InvalidParameter(format!("no candidate node grid fits n = {n}")))
}

/// `T_{2m-k}(x) T_{k-1}(y) - T_{k-1}(x) T_{2m-k}(y)`, `1 <= k <= m`, `n = 2m-1`.
pub fn near_min_t_vanishing(n: usize) -> Vec<Poly2> {
    let m = n.div_ceil(2) as i32;
    (1..=m)
        .map(|k| prod(t(2 * m - k), t(k - 1)).add(&prod(t(k - 1), t(2 * m - k)).scale(-1.0)))
        .collect()
}

fn near_min_candidates(m: usize) -> Vec<(&'static str, Vec<[f64; 2]>)> {
    let den = 2.0 * m as f64 - 1.0;
    let mut even = Vec::new();
    for i in 0..m {
        for j in 0..m {
            even.push([cos_frac(2.0 * i as f64, den), cos_frac(2.0 * j as f64, den)]);
        }
    }
    let mut typeset = even.clone();
    for i in 0..m {
        for j in 1..m {
            typeset.push([
                cos_frac(2.0 * (m - i) as f64 - 1.0, den),
                cos_frac(2.0 * m as f64 - j as f64 - 1.0, den),
            ]);
        }
    }
    let mut odd = even;
    for i in 0..m {
        for j in 0..m {
            odd.push([
                cos_frac(2.0 * (m - i) as f64 - 1.0, den),
                cos_frac(2.0 * (m - j) as f64 - 1.0, den),
            ]);
        }
    }
    vec![("index ranges as typeset", typeset), ("second grid at odd multiples for both axes", odd)]
}

/// Near-minimal nodes for the first-kind Chebyshev weight, `n = 2m-1`:
/// `N_min + 1 = 2m^2` points.
pub fn near_min_t_nodes_odd(n: usize) -> Result<NodeSet> {
    if n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("near_min_t_nodes_odd needs odd n, got {n}")));
    }
    let m = n.div_ceil(2);
    let expected = n_min(n) + 1;
    let polys = near_min_t_vanishing(n);
    for (name, pts) in near_min_candidates(m) {
        let set = finish(Family::NearMinTOdd, n, expected, name, pts);
        if set.len() == expected && set.vanishing_residual(&polys) <= SELECT_TOL {
            return Ok(set);
        }
    }
    Err(Error::InvalidParameter(format!("no candidate node grid fits n = {n}")))
}

/// `Q_0 = T_{n+1}(x) - T_{n-1}(x)`,
/// `Q_k = T_{n-k+1}(x) T_k(y) + T_{n-k+1}(y) T_{k-1}(x)`.
pub fn padua_vanishing(n: usize) -> Vec<Poly2> {
    let n = n as i32;
    let mut out = vec![prod(t(n + 1), t(0)).add(&prod(t(n - 1), t(0)).scale(-1.0))];
    for k in 1..=n + 1 {
        out.push(prod(t(n - k + 1), t(k)).add(&prod(t(k - 1), t(n - k + 1))));
    }
    out
}

/// Padua points: `(n+1)(n+2)/2` points, unisolvent for `Pi_n^2`.
pub fn padua_points(n: usize) -> Result<NodeSet> {
    if n == 0 {
        return Err(Error::InvalidParameter("padua_points needs n >= 1".into()));
    }
    let nf = n as f64;
    let h = n / 2;
    let mut pts = Vec::new();
    for i in 0..=h {
        for j in 1..=h + 1 {
            pts.push([cos_frac(2.0 * i as f64, nf), cos_frac(2.0 * j as f64 - 1.0, nf + 1.0)]);
        }
    }
    for i in 1..=h + 1 {
        for j in 1..=h + 2 {
            pts.push([cos_frac(2.0 * i as f64 - 1.0, nf), cos_frac(2.0 * j as f64 - 2.0, nf + 1.0)]);
        }
    }
    let expected = (n + 1) * (n + 2) / 2;
    let variant = if n.is_multiple_of(2) {
        "index ranges as typeset; angles past pi folded onto duplicates"
    } else {
        "index ranges as typeset"
    };
    let set = finish(Family::Padua, n, expected, variant, pts);
    if set.len() != expected {
        return Err(Error::CountMismatch {
            expected,
            found: set.len(),
            points: set.points,
        });
    }
    Ok(set)
}

/// `(-cos((n+1) t), -cos(n t))`.
pub fn lissajous_curve_point(n: usize, t: f64) -> [f64; 2] {
    let nf = n as f64;
    [-((nf + 1.0) * t).cos(), -(nf * t).cos()]
}

/// Nodes of the minimal (`n = 2m`) or near-minimal (`n = 2m+1`) rule for
/// `W_{alpha,beta,-1/2}`, built from Jacobi angles.
pub fn gencheb_nodes(alpha: f64, beta: f64, n: usize) -> Result<NodeSet> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("gencheb_nodes needs n >= 2, got {n}")));
    }
    let m = n / 2;
    let (family, params, jmin, expected) = if n.is_multiple_of(2) {
        (Family::GenChebEven, (alpha, beta), 1, n_min(n))
    } else {
        (Family::GenChebOdd, (alpha + 1.0, beta), 0, n_min(n) + 1)
    };
    let grid = jacobi_angle_grid(params.0, params.1, m)?;
    let th = &grid.thetas;
    let mut pts = Vec::new();
    for k in jmin..=m {
        for j in jmin..=k {
            let s = cleaned(((th[j] - th[k]) / 2.0).cos());
            let t = cleaned(((th[j] + th[k]) / 2.0).cos());
            pts.extend_from_slice(&[[s, t], [t, s], [-s, -t], [-t, -s]]);
        }
    }
    let mut set = finish(family, n, expected, "", pts);
    set.alpha = Some(alpha);
    set.beta = Some(beta);
    set.variant = if n.is_multiple_of(2) {
        "4-fold orbits over 1 <= j <= k <= m".into()
    } else {
        "4-fold orbits over 0 <= j <= k <= m; coincident orbit points merged".into()
    };
    if set.len() != expected {
        return Err(Error::CountMismatch {
            expected,
            found: set.len(),
            points: set.points,
        });
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn small_counts() {
        assert_eq!(gauss_u_nodes(2).unwrap().len(), 3);
        assert_eq!(min_t_nodes_even(2).unwrap().len(), 4);
        assert_eq!(near_min_t_nodes_odd(1).unwrap().len(), 2);
        assert_eq!(padua_points(1).unwrap().len(), 3);
        assert_eq!(n_min(5), 17);
        assert_eq!(n_min(4), 12);
    }

    #[test]
    fn selected_variants_are_recorded() {
        let s = min_t_nodes_even(8).unwrap();
        assert_eq!(s.variant, "second grid at (2i+1)pi/(2m); vanishing plus sign, running index");
        let s = near_min_t_nodes_odd(7).unwrap();
        assert_eq!(s.variant, "second grid at odd multiples for both axes");
        let s = gauss_u_nodes(5).unwrap();
        assert_eq!(s.variant, "nodes as displayed; vanishing plus-sign");
    }

    #[test]
    fn lissajous_points() {
        assert_eq!(lissajous_curve_point(7, 0.0), [-1.0, -1.0]);
        let p = lissajous_curve_point(11, PI);
        assert_abs_diff_eq!(p[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p[1], 1.0, epsilon = 1e-14);
        let a = lissajous_curve_point(5, 0.3);
        let b = lissajous_curve_point(5, 0.3 + 2.0 * PI);
        assert_abs_diff_eq!(a[0], b[0], epsilon = 1e-13);
        assert_abs_diff_eq!(a[1], b[1], epsilon = 1e-13);
    }

    #[test]
    fn invalid_parities_rejected() {
        assert!(min_t_nodes_even(7).is_err());
        assert!(near_min_t_nodes_odd(6).is_err());
        assert!(gencheb_nodes(0.5, 0.5, 1).is_err());
    }

    #[test]
    fn family_strings() {
        assert_eq!(Family::NearMinTOdd.to_string(), "near_min_t_odd");
        assert_eq!("padua".parse::<Family>().unwrap(), Family::Padua);
        assert!("bogus".parse::<Family>().is_err());
    }
}
