//! Levenberg-Marquardt for small dense residual maps.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy)]
pub struct LmOptions {
    pub max_iter: usize,
    /// Stop once `max |f| <= ftol`.
    pub ftol: f64,
    /// Finite-difference step. Central differences are exact for quadratic
    /// maps, so the step only trades rounding against nothing.
    pub step: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self {
            max_iter: 400,
            ftol: 1e-14,
            step: 1e-4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LmOutcome {
    pub x: DVector<f64>,
    /// `max |f(x)|` at the returned point.
    pub residual: f64,
    pub iterations: usize,
}

fn jacobian(f: &impl Fn(&DVector<f64>) -> DVector<f64>, x: &DVector<f64>, m: usize, h: f64) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(m, x.len());
    let mut xp = x.clone();
    for c in 0..x.len() {
        let orig = xp[c];
        xp[c] = orig + h;
        let fp = f(&xp);
        xp[c] = orig - h;
        let fm = f(&xp);
        xp[c] = orig;
        j.set_column(c, &((fp - fm) / (2.0 * h)));
    }
    j
}

/// Minimizes `|f(x)|^2` from `x0` with `mu I` damping, which also handles
/// systems with fewer equations than unknowns.
pub fn levenberg_marquardt(f: impl Fn(&DVector<f64>) -> DVector<f64>, x0: DVector<f64>, opts: LmOptions) -> LmOutcome {
    let mut x = x0;
    let mut fx = f(&x);
    let mut cost = fx.norm_squared();
    let mut mu = 1e-3;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        if !cost.is_finite() || fx.amax() <= opts.ftol {
            break;
        }
        iterations += 1;
        let j = jacobian(&f, &x, fx.len(), opts.step);
        let jt = j.transpose();
        let jtj = &jt * &j;
        let g = &jt * &fx;
        let scale = jtj.diagonal().max().max(1e-300);
        let mut improved = false;
        while mu < 1e12 {
            let mut a = jtj.clone();
            for i in 0..a.nrows() {
                a[(i, i)] += mu * scale;
            }
            let Some(chol) = a.cholesky() else {
                mu *= 4.0;
                continue;
            };
            let step = chol.solve(&(-&g));
            let xn = &x + &step;
            let fnew = f(&xn);
            let cnew = fnew.norm_squared();
            if cnew.is_finite() && cnew < cost {
                x = xn;
                fx = fnew;
                cost = cnew;
                mu = (mu / 3.0).max(1e-15);
                improved = true;
                break;
            }
            mu *= 4.0;
        }
        if !improved {
            break;
        }
    }
    LmOutcome {
        residual: fx.amax(),
        x,
        iterations,
    }
}
