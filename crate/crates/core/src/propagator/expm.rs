//! Exponential of a small dense complex matrix by scaling and squaring with a
//! truncated Taylor series.

use num_complex::Complex64 as C64;

use crate::model::Matrix3;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// After scaling, the 1-norm is at most this, so 18 Taylor terms leave a
/// remainder below 0.5¹⁹/19! ≈ 2e-23.
const SCALED_NORM: f64 = 0.5;
const TAYLOR_TERMS: usize = 18;

pub(crate) fn identity() -> Matrix3 {
    let mut m = [[ZERO; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

pub(crate) fn matmul(a: &Matrix3, b: &Matrix3) -> Matrix3 {
    let mut out = [[ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    out
}

pub(crate) fn matvec(a: &Matrix3, v: &[C64; 3]) -> [C64; 3] {
    let mut out = [ZERO; 3];
    for (o, row) in out.iter_mut().zip(a.iter()) {
        *o = row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
    }
    out
}

fn scale(a: &Matrix3, s: C64) -> Matrix3 {
    let mut out = *a;
    out.iter_mut().flatten().for_each(|z| *z *= s);
    out
}

fn norm1(a: &Matrix3) -> f64 {
    (0..3)
        .map(|j| (0..3).map(|i| a[i][j].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub(crate) fn expm(a: &Matrix3) -> Matrix3 {
    let norm = norm1(a);
    let squarings = if norm > SCALED_NORM {
        (norm / SCALED_NORM).log2().ceil() as i32
    } else {
        0
    };
    let scaled = scale(a, C64::new(0.5f64.powi(squarings), 0.0));

    let mut result = identity();
    let mut term = identity();
    for k in 1..=TAYLOR_TERMS {
        term = scale(&matmul(&term, &scaled), C64::new(1.0 / k as f64, 0.0));
        for i in 0..3 {
            for j in 0..3 {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        result = matmul(&result, &result);
    }
    result
}
