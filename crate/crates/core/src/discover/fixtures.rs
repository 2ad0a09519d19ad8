//! Reference Hankel matrices and degree-5 polynomials for the constant
//! weight, both as typeset and with the corrections that make them
//! satisfy their systems.

use nalgebra::DMatrix;

use super::{HankelParam, SystemKind};

fn make(kind: SystemKind, n: usize, scale: f64, h: &[f64]) -> HankelParam {
    HankelParam {
        kind,
        n,
        h: h.iter().map(|v| v * scale).collect(),
    }
}

fn root7() -> f64 {
    7f64.sqrt()
}

/// Gaussian case `n = 3`: `4/(27 sqrt 7) (-11/25, 0, 1, 0, 2/5, 0)`.
pub fn even_h3() -> HankelParam {
    make(
        SystemKind::Even,
        3,
        4.0 / (27.0 * root7()),
        &[-11.0 / 25.0, 0.0, 1.0, 0.0, 2.0 / 5.0, 0.0],
    )
}

/// Minimal case `n = 3` as typeset; the last entry `4/35` is off.
pub fn odd_h3_as_typeset() -> HankelParam {
    make(SystemKind::Odd, 3, 4.0 / 135.0, &[-8.0 / 35.0, 0.0, 1.0, 0.0, 0.0, 0.0, 4.0 / 35.0])
}

/// Minimal case `n = 3` with last entry `27/35`.
pub fn odd_h3() -> HankelParam {
    make(SystemKind::Odd, 3, 4.0 / 135.0, &[-8.0 / 35.0, 0.0, 1.0, 0.0, 0.0, 0.0, 27.0 / 35.0])
}

/// Minimal case `n = 4`, exact as typeset.
pub fn odd_h4() -> HankelParam {
    let a = 94.0 / 231.0;
    let b = -82.0 / 55.0;
    make(SystemKind::Odd, 4, 44.0 / 14385.0, &[a, 1.0, 1.0, 1.0, b, 1.0, 1.0, 1.0, a])
}

fn h5(c: f64) -> HankelParam {
    let r = 10.0 * 86f64.sqrt() / 189.0;
    let s = (43.0f64 / 2.0).sqrt() / 9.0;
    let a = 1151.0 / 2079.0;
    make(
        SystemKind::Odd,
        5,
        96.0 / 77875.0,
        &[a, r, c, -s, 1.0, 0.0, 1.0, s, c, -r, a],
    )
}

/// Minimal case `n = 5` as typeset; `-31/86` is off.
pub fn odd_h5_as_typeset() -> HankelParam {
    h5(-31.0 / 86.0)
}

/// Minimal case `n = 5` with `-31/81`.
pub fn odd_h5() -> HankelParam {
    h5(-31.0 / 81.0)
}

fn q5(q3_first: f64) -> DMatrix<f64> {
    let r = 10.0 * 86f64.sqrt() / 189.0;
    let s21 = 21f64.sqrt();
    let s77 = 77f64.sqrt();
    #[rustfmt::skip]
    let rows = [
        r, 1081.0 * 11f64.sqrt() / (2835.0 * 3f64.sqrt()), 0.0, 0.0, 0.0, 1.0,
        205.0 / (21.0 * 33f64.sqrt()), r, 0.0, 0.0, 1.0, 0.0,
        q3_first, 62.0 * 5f64.sqrt() / (81.0 * s21), 0.0, 1.0, 0.0, 0.0,
        -10.0 * 5f64.sqrt() / (3.0 * s77), -(430f64.sqrt()) / (9.0 * s21), 1.0, 0.0, 0.0, 0.0,
    ];
    DMatrix::from_row_slice(4, 6, &rows)
}

/// Coefficients of `Q_1..Q_4` (rows) in `P_0^5..P_5^5` as typeset; the
/// first entry of `Q_3` has `sqrt 438` where `sqrt 430` is needed.
pub fn q5_as_typeset() -> DMatrix<f64> {
    q5(-5.0 * 438f64.sqrt() / (27.0 * 77f64.sqrt()))
}

pub fn q5_corrected() -> DMatrix<f64> {
    q5(-5.0 * 430f64.sqrt() / (27.0 * 77f64.sqrt()))
}
