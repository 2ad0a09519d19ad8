//! Numerical search for minimal rules of the constant weight.
//!
//! Gaussian rules of degree `2n - 2` correspond to matrices
//! `Gamma = G_n H G_{n-1}^t` with `H` Hankel; minimal rules of degree
//! `2n - 1` correspond to `W = VV^t = I - G_n H G_n^t` of rank
//! `floor(n/2)`. Both reduce to small quadratic systems which are solved
//! from many random starts, after which the nodes are recovered as common
//! zeros and the weights by moment matching.

pub mod fixtures;
pub mod lm;
pub mod zeros;

use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis2d::legendre_three_term;
use crate::cubature::{exactness_check, weights_from_vandermonde, CubatureRule, ExactnessReport};
use crate::error::{Error, Result};
use crate::weights::WeightSpec;

pub use lm::{levenberg_marquardt, LmOptions, LmOutcome};
pub use zeros::{common_zeros, find_common_zeros, legendre_basis, LegendrePolySystem};

/// Residual below which a start counts as a solution.
pub const SOLVE_TOL: f64 = 1e-10;
/// Two solutions are identified when a symmetry image agrees this well.
pub const SYMMETRY_TOL: f64 = 1e-7;
pub const PSD_TOL: f64 = 1e-9;
pub const RANK_TOL: f64 = 1e-8;

/// `gamma_k = (2k)! sqrt(2k+1) / (2^k k!^2)`.
pub fn gamma(k: usize) -> f64 {
    // central binomial over 2^k, built as a running product to stay exact
    // in floating point as long as possible
    let mut c = 1.0;
    for i in 1..=k {
        c *= (k + i) as f64 / i as f64;
    }
    c * (2.0 * k as f64 + 1.0).sqrt() / 2f64.powi(k as i32)
}

/// Diagonal of `G_n`: `g_{n-k,k} = gamma_{n-k} gamma_k`.
#[derive(Debug, Clone)]
pub struct ScalingMatrices {
    pub n: usize,
    pub g: DVector<f64>,
}

impl ScalingMatrices {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            g: DVector::from_fn(n + 1, |k, _| gamma(n - k) * gamma(k)),
        }
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.g)
    }
}

/// The three-term matrices `(A_{n,1}, A_{n,2})` of the product-Legendre
/// basis.
pub fn legendre_a_matrices(n: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    legendre_three_term(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    /// Gaussian rules of degree `2n - 2`.
    Even,
    /// Minimal rules of degree `2n - 1`.
    Odd,
}

impl SystemKind {
    pub fn hankel_len(self, n: usize) -> usize {
        match self {
            SystemKind::Even => 2 * n,
            SystemKind::Odd => 2 * n + 1,
        }
    }

    pub fn equation_count(self, n: usize) -> usize {
        match self {
            SystemKind::Even => n * (n - 1) / 2,
            SystemKind::Odd => n * (n + 1) / 2,
        }
    }

    pub fn rule_degree(self, n: usize) -> usize {
        match self {
            SystemKind::Even => 2 * n - 2,
            SystemKind::Odd => 2 * n - 1,
        }
    }

    pub fn node_count(self, n: usize) -> usize {
        match self {
            SystemKind::Even => n * (n + 1) / 2,
            SystemKind::Odd => n * (n + 1) / 2 + n / 2,
        }
    }

    /// Sign of the parity action `h_s -> sign_s h_s`.
    fn parity_sign(self, s: usize) -> f64 {
        let alt = if s.is_multiple_of(2) { 1.0 } else { -1.0 };
        match self {
            SystemKind::Even => -alt,
            SystemKind::Odd => alt,
        }
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SystemKind::Even => "even",
            SystemKind::Odd => "odd",
        })
    }
}

impl std::str::FromStr for SystemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" => Ok(SystemKind::Even),
            "odd" => Ok(SystemKind::Odd),
            other => Err(Error::Parse(format!("unknown system `{other}`, expected even or odd"))),
        }
    }
}

/// Anti-diagonal entries `h_0, ..., h_{L-1}` of a Hankel matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HankelParam {
    pub kind: SystemKind,
    pub n: usize,
    pub h: Vec<f64>,
}

impl HankelParam {
    pub fn new(kind: SystemKind, n: usize, h: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("system degree must be at least 2, got {n}")));
        }
        if h.len() != kind.hankel_len(n) {
            return Err(Error::InvalidParameter(format!(
                "{kind} system at n = {n} takes {} Hankel entries, got {}",
                kind.hankel_len(n),
                h.len()
            )));
        }
        Ok(Self { kind, n, h })
    }

    /// `(n+1) x n` for the even system, `(n+1) x (n+1)` for the odd one.
    pub fn matrix(&self) -> DMatrix<f64> {
        let cols = match self.kind {
            SystemKind::Even => self.n,
            SystemKind::Odd => self.n + 1,
        };
        DMatrix::from_fn(self.n + 1, cols, |i, j| self.h[i + j])
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            h: self.h.iter().map(|v| v * c).collect(),
            ..self.clone()
        }
    }

    /// Images under the parity and reversal actions, and for the even
    /// system also under `h -> -h` (the residual is quadratic in `Gamma`).
    pub fn orbit(&self) -> Vec<Vec<f64>> {
        let parity: Vec<f64> = self
            .h
            .iter()
            .enumerate()
            .map(|(s, v)| self.kind.parity_sign(s) * v)
            .collect();
        let rev = |v: &[f64]| v.iter().rev().copied().collect::<Vec<_>>();
        let mut out = vec![self.h.clone(), rev(&self.h), rev(&parity), parity];
        if self.kind == SystemKind::Even {
            let neg: Vec<Vec<f64>> = out.iter().map(|v| v.iter().map(|x| -x).collect()).collect();
            out.extend(neg);
        }
        out
    }

    /// Smallest entrywise distance from `other` to a symmetry image of
    /// `self`.
    pub fn symmetric_distance(&self, other: &HankelParam) -> f64 {
        if self.kind != other.kind || self.n != other.n {
            return f64::INFINITY;
        }
        self.orbit()
            .iter()
            .map(|img| {
                img.iter()
                    .zip(&other.h)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// `M = A1^t A2 - A2^t A1` and `C = A1 A2^t - A2 A1^t` at degree `n - 1`.
fn skew_pair(n: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let (a1, a2) = legendre_a_matrices(n - 1);
    let m = a1.transpose() * &a2 - a2.transpose() * &a1;
    let c = &a1 * a2.transpose() - &a2 * a1.transpose();
    (m, c)
}

fn strict_upper(m: &DMatrix<f64>) -> DVector<f64> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push(m[(i, j)]);
        }
    }
    DVector::from_vec(out)
}

fn check(h: &HankelParam, kind: SystemKind) -> Result<()> {
    if h.kind != kind {
        return Err(Error::InvalidParameter(format!("expected a {kind} Hankel parameter, got {}", h.kind)));
    }
    Ok(())
}

/// `Gamma = G_n H G_{n-1}^t`.
pub fn even_gamma(h: &HankelParam) -> Result<DMatrix<f64>> {
    check(h, SystemKind::Even)?;
    let gn = ScalingMatrices::new(h.n).matrix();
    let gm = ScalingMatrices::new(h.n - 1).matrix();
    Ok(gn * h.matrix() * gm.transpose())
}

/// Largest asymmetry of `A_{n-1,i} Gamma`; zero for every Hankel `H`.
pub fn even_symmetry_residual(n: usize, gamma: &DMatrix<f64>) -> f64 {
    let (a1, a2) = legendre_a_matrices(n - 1);
    [a1, a2]
        .iter()
        .map(|a| {
            let p = a * gamma;
            (&p - p.transpose()).amax()
        })
        .fold(0.0, f64::max)
}

/// Independent entries of `Gamma^t M Gamma - C`, length `n(n-1)/2`.
pub fn even_system_residual(h: &HankelParam) -> Result<DVector<f64>> {
    let gamma = even_gamma(h)?;
    let (m, c) = skew_pair(h.n);
    Ok(strict_upper(&(gamma.transpose() * m * &gamma - c)))
}

/// `W = I - G_n H G_n^t`.
pub fn odd_w(h: &HankelParam) -> Result<DMatrix<f64>> {
    check(h, SystemKind::Odd)?;
    let g = ScalingMatrices::new(h.n).matrix();
    Ok(DMatrix::identity(h.n + 1, h.n + 1) - &g * h.matrix() * g.transpose())
}

/// Largest entry of `A1 (W - I) A2^t - A2 (W - I) A1^t`; zero for every
/// Hankel `H`.
pub fn odd_symmetry_residual(n: usize, w: &DMatrix<f64>) -> f64 {
    let (a1, a2) = legendre_a_matrices(n - 1);
    let d = w - DMatrix::identity(n + 1, n + 1);
    (&a1 * &d * a2.transpose() - &a2 * &d * a1.transpose()).amax()
}

/// Independent entries of `W M W`, length `n(n+1)/2`.
pub fn odd_system_residual(h: &HankelParam) -> Result<DVector<f64>> {
    let w = odd_w(h)?;
    let (m, _) = skew_pair(h.n);
    Ok(strict_upper(&(&w * m * &w)))
}

/// Extra constraints cycled over the starts to reach symmetric solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ansatz {
    Free,
    OddEntriesZero,
    EvenEntriesZero,
    ReversalInvariant,
    ReversalParityInvariant,
}

impl Ansatz {
    pub const CYCLE: [Ansatz; 5] = [
        Ansatz::Free,
        Ansatz::OddEntriesZero,
        Ansatz::EvenEntriesZero,
        Ansatz::ReversalInvariant,
        Ansatz::ReversalParityInvariant,
    ];

    fn rows(self, kind: SystemKind, h: &[f64], out: &mut Vec<f64>) {
        let l = h.len();
        match self {
            Ansatz::Free => {}
            Ansatz::OddEntriesZero => out.extend(h.iter().skip(1).step_by(2)),
            Ansatz::EvenEntriesZero => out.extend(h.iter().step_by(2)),
            Ansatz::ReversalInvariant => out.extend((0..l / 2).map(|s| h[s] - h[l - 1 - s])),
            Ansatz::ReversalParityInvariant => {
                out.extend((0..l.div_ceil(2)).map(|s| h[s] - kind.parity_sign(l - 1 - s) * h[l - 1 - s]))
            }
        }
    }
}

/// Outcome of a multistart search. An empty solution list means nothing
/// was found from the given starts, which is not a proof that no solution
/// exists.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Search<T> {
    pub kind: SystemKind,
    pub n: usize,
    pub seeds: usize,
    pub rng_seed: u64,
    pub solutions: Vec<T>,
}

impl<T> Search<T> {
    pub fn not_found(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn status(&self) -> String {
        if self.not_found() {
            format!(
                "not found: no solution of the {} system at n = {} from {} starts (not a proof of nonexistence)",
                self.kind, self.n, self.seeds
            )
        } else {
            format!(
                "found {} solution(s) of the {} system at n = {} up to symmetry",
                self.solutions.len(),
                self.kind,
                self.n
            )
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvenSolution {
    pub h: HankelParam,
    pub gamma: DMatrix<f64>,
    pub residual: f64,
}

impl EvenSolution {
    pub fn from_h(h: HankelParam) -> Result<Self> {
        let residual = even_system_residual(&h)?.amax();
        if residual > SOLVE_TOL {
            return Err(Error::SystemResidual {
                system: "even",
                residual,
                tolerance: SOLVE_TOL,
            });
        }
        let gamma = even_gamma(&h)?;
        Ok(Self { h, gamma, residual })
    }

    /// `P_n + Gamma P_{n-1}`.
    pub fn polynomials(&self) -> LegendrePolySystem {
        let n = self.h.n;
        LegendrePolySystem {
            n,
            c: DMatrix::identity(n + 1, n + 1),
            d: Some(self.gamma.clone()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OddSystemSolution {
    pub n: usize,
    pub h: HankelParam,
    pub wmat: DMatrix<f64>,
    pub v: DMatrix<f64>,
    pub u: DMatrix<f64>,
    pub residual: f64,
}

impl OddSystemSolution {
    /// Verifies the system and the PSD/rank condition, then factors
    /// `W = V V^t` and takes `U` as the orthonormal complement of `V`.
    pub fn from_h(h: HankelParam) -> Result<Self> {
        let n = h.n;
        let r = n / 2;
        let residual = odd_system_residual(&h)?.amax();
        if residual > SOLVE_TOL {
            return Err(Error::SystemResidual {
                system: "odd",
                residual,
                tolerance: SOLVE_TOL,
            });
        }
        let w = odd_w(&h)?;
        let eig = SymmetricEigen::new(w.clone());
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        if vals[n] < -PSD_TOL {
            return Err(Error::RankCondition(format!("W has negative eigenvalue {:.3e}", vals[n])));
        }
        let rank = vals.iter().filter(|&&v| v > RANK_TOL).count();
        if rank != r {
            return Err(Error::RankCondition(format!("W has rank {rank}, need {r}")));
        }
        if vals[r - 1] < 100.0 * vals[r].abs() {
            return Err(Error::RankCondition(format!(
                "no clear rank gap: {:.3e} vs {:.3e}",
                vals[r - 1],
                vals[r]
            )));
        }
        let v = DMatrix::from_fn(n + 1, r, |i, j| eig.eigenvectors[(i, order[j])] * vals[j].sqrt());
        let u = DMatrix::from_fn(n + 1, n + 1 - r, |i, j| eig.eigenvectors[(i, order[r + j])]);
        Ok(Self {
            n,
            h,
            wmat: w,
            v,
            u,
            residual,
        })
    }

    /// `U^t P_n`.
    pub fn polynomials(&self) -> LegendrePolySystem {
        orthogonal_polys_from_u(self.n, &self.u)
    }
}

/// The polynomials `U^t P_n` in the product-Legendre basis.
pub fn orthogonal_polys_from_u(n: usize, u: &DMatrix<f64>) -> LegendrePolySystem {
    LegendrePolySystem {
        n,
        c: u.transpose(),
        d: None,
    }
}

fn start_rng(rng_seed: u64, start: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    rng.set_stream(start as u64);
    rng
}

fn dedupe(found: Vec<HankelParam>) -> Vec<HankelParam> {
    let mut out: Vec<HankelParam> = Vec::new();
    for h in found {
        if out.iter().all(|o| o.symmetric_distance(&h) > SYMMETRY_TOL) {
            out.push(h);
        }
    }
    out
}

/// Multistart Levenberg-Marquardt on the even system.
pub fn solve_even_system(n: usize, seeds: usize, rng_seed: u64) -> Result<Search<EvenSolution>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("even system needs n >= 2, got {n}")));
    }
    let kind = SystemKind::Even;
    let len = kind.hankel_len(n);
    let scale = 1.0 / (ScalingMatrices::new(n).g.max() * ScalingMatrices::new(n - 1).g.max());
    let found: Vec<Option<HankelParam>> = (0..seeds)
        .into_par_iter()
        .map(|i| {
            let mut rng = start_rng(rng_seed, i);
            let mult = [1.0, 3.0, 10.0][rng.random_range(0..3)];
            let x0 = DVector::from_fn(len, |_, _| rng.random_range(-1.0..1.0) * scale * mult);
            let ansatz = Ansatz::CYCLE[i % Ansatz::CYCLE.len()];
            let f = |x: &DVector<f64>| {
                let h = HankelParam {
                    kind,
                    n,
                    h: x.as_slice().to_vec(),
                };
                let mut rows: Vec<f64> = even_system_residual(&h).map(|r| r.as_slice().to_vec()).unwrap_or_default();
                let mut extra = Vec::new();
                ansatz.rows(kind, &h.h, &mut extra);
                rows.extend(extra.into_iter().map(|v| v / scale));
                DVector::from_vec(rows)
            };
            let out = levenberg_marquardt(f, x0, LmOptions::default());
            let h = HankelParam::new(kind, n, out.x.as_slice().to_vec()).ok()?;
            let ok = out.residual.is_finite() && even_system_residual(&h).ok()?.amax() <= SOLVE_TOL;
            ok.then_some(h)
        })
        .collect();
    let solutions = dedupe(found.into_iter().flatten().collect())
        .into_iter()
        .map(EvenSolution::from_h)
        .collect::<Result<Vec<_>>>()?;
    Ok(Search {
        kind,
        n,
        seeds,
        rng_seed,
        solutions,
    })
}

/// `h` from `S = G^{-1} (I - V V^t) G^{-1}` by anti-diagonal means.
fn hankel_from_v(n: usize, g: &DVector<f64>, v: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let d = DMatrix::identity(n + 1, n + 1) - v * v.transpose();
    let s = DMatrix::from_fn(n + 1, n + 1, |i, j| d[(i, j)] / (g[i] * g[j]));
    let h = (0..=2 * n)
        .map(|t| {
            let lo = t.saturating_sub(n);
            let hi = t.min(n);
            (lo..=hi).map(|i| s[(i, t - i)]).sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect();
    (h, d)
}

/// Residual of the odd system in the factor `V`: `V^t M V = 0`, `I - VV^t`
/// of the form `G H G^t`, plus ansatz rows on the implied `h`.
fn odd_v_residual(n: usize, v: &DMatrix<f64>, m: &DMatrix<f64>, g: &DVector<f64>, ansatz: Ansatz) -> DVector<f64> {
    let r = v.ncols();
    let k = v.transpose() * m * v;
    let mut rows = Vec::new();
    for i in 0..r {
        for j in i + 1..r {
            rows.push(k[(i, j)]);
        }
    }
    let (h, d) = hankel_from_v(n, g, v);
    for i in 0..=n {
        for j in i..=n {
            rows.push(d[(i, j)] - g[i] * g[j] * h[i + j]);
        }
    }
    let gmax2 = g.max() * g.max();
    let mut extra = Vec::new();
    ansatz.rows(SystemKind::Odd, &h, &mut extra);
    rows.extend(extra.into_iter().map(|x| x * gmax2));
    DVector::from_vec(rows)
}

/// Multistart search for the odd system, solved in the factor `V` so that
/// `W` is positive semidefinite of rank at most `floor(n/2)` by
/// construction. Converged points whose `W` fails the rank test are kept
/// in `algebraic_only`.
pub fn odd_system_solve(n: usize, seeds: usize, rng_seed: u64) -> Result<OddSearch> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("odd system needs n >= 2, got {n}")));
    }
    let r = n / 2;
    let (m, _) = skew_pair(n);
    let g = ScalingMatrices::new(n).g;
    let found: Vec<Option<HankelParam>> = (0..seeds)
        .into_par_iter()
        .map(|i| {
            let mut rng = start_rng(rng_seed, i);
            let x0 = DVector::from_fn((n + 1) * r, |_, _| rng.random_range(-1.5..1.5));
            let ansatz = Ansatz::CYCLE[i % Ansatz::CYCLE.len()];
            let f = |x: &DVector<f64>| {
                let v = DMatrix::from_column_slice(n + 1, r, x.as_slice());
                odd_v_residual(n, &v, &m, &g, ansatz)
            };
            let out = levenberg_marquardt(f, x0, LmOptions::default());
            if !(out.residual <= SOLVE_TOL) {
                return None;
            }
            let v = DMatrix::from_column_slice(n + 1, r, out.x.as_slice());
            let (h, _) = hankel_from_v(n, &g, &v);
            let h = HankelParam::new(SystemKind::Odd, n, h).ok()?;
            (odd_system_residual(&h).ok()?.amax() <= SOLVE_TOL).then_some(h)
        })
        .collect();
    let mut solutions = Vec::new();
    let mut algebraic_only = Vec::new();
    for h in dedupe(found.into_iter().flatten().collect()) {
        match OddSystemSolution::from_h(h.clone()) {
            Ok(s) => solutions.push(s),
            Err(_) => algebraic_only.push(h),
        }
    }
    Ok(OddSearch {
        search: Search {
            kind: SystemKind::Odd,
            n,
            seeds,
            rng_seed,
            solutions,
        },
        algebraic_only,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OddSearch {
    #[serde(flatten)]
    pub search: Search<OddSystemSolution>,
    pub algebraic_only: Vec<HankelParam>,
}

/// A rule recovered from a system solution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscoveredRule {
    pub h: HankelParam,
    pub rule: CubatureRule,
    /// Nodes outside `[-1, 1]^2`.
    pub outside: usize,
    pub report: ExactnessReport,
}

impl DiscoveredRule {
    fn from_polys(h: HankelParam, sys: &LegendrePolySystem) -> Result<Self> {
        let kind = h.kind;
        let n = h.n;
        let variant = format!("common zeros of the {kind} system at n = {n}");
        let nodes = common_zeros(sys, kind.node_count(n), &variant)?;
        let outside = nodes
            .points
            .iter()
            .filter(|p| p[0].abs() > 1.0 + 1e-12 || p[1].abs() > 1.0 + 1e-12)
            .count();
        let mut rule = weights_from_vandermonde(&nodes, &WeightSpec::Constant, kind.rule_degree(n))?;
        rule.provenance = format!("{variant}; moment-matching weights");
        let report = exactness_check(&rule)?;
        Ok(Self {
            h,
            rule,
            outside,
            report,
        })
    }

    pub fn from_even(sol: &EvenSolution) -> Result<Self> {
        Self::from_polys(sol.h.clone(), &sol.polynomials())
    }

    pub fn from_odd(sol: &OddSystemSolution) -> Result<Self> {
        Self::from_polys(sol.h.clone(), &sol.polynomials())
    }
}
