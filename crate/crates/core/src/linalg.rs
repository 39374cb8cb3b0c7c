//! Small dense helpers for symmetric 3x3 matrices.

use std::f64::consts::PI;

pub(crate) type Mat3 = [[f64; 3]; 3];

pub(crate) fn det3(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Eigenvalues of a symmetric 3x3 matrix in ascending order (trigonometric
/// closed form).
pub(crate) fn sym_eigenvalues(m: &Mat3) -> [f64; 3] {
    let p1 = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
    let q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
    let d0 = m[0][0] - q;
    let d1 = m[1][1] - q;
    let d2 = m[2][2] - q;
    let p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1;
    if p2 == 0.0 {
        return [q, q, q];
    }
    let p = (p2 / 6.0).sqrt();
    let b = [
        [d0 / p, m[0][1] / p, m[0][2] / p],
        [m[1][0] / p, d1 / p, m[1][2] / p],
        [m[2][0] / p, m[2][1] / p, d2 / p],
    ];
    let r = (det3(&b) / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let largest = q + 2.0 * p * phi.cos();
    let smallest = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
    let middle = 3.0 * q - largest - smallest;
    let mut e = [smallest, middle, largest];
    e.sort_by(|a, b| a.total_cmp(b));
    e
}

/// Lower-triangular Cholesky factor; `None` if the matrix is not positive
/// definite.
pub(crate) fn cholesky(m: &Mat3) -> Option<Mat3> {
    let mut l = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..=i {
            let mut acc = m[i][j];
            for k in 0..j {
                acc -= l[i][k] * l[j][k];
            }
            if i == j {
                if acc <= 0.0 {
                    return None;
                }
                l[i][i] = acc.sqrt();
            } else {
                l[i][j] = acc / l[j][j];
            }
        }
    }
    Some(l)
}

fn lower_inverse(l: &Mat3) -> Mat3 {
    let mut inv = [[0.0; 3]; 3];
    for i in 0..3 {
        inv[i][i] = 1.0 / l[i][i];
        for j in 0..i {
            let mut acc = 0.0;
            for k in j..i {
                acc += l[i][k] * inv[k][j];
            }
            inv[i][j] = -acc / l[i][i];
        }
    }
    inv
}

/// Largest `|x·Px| / x·Mx` over nonzero `x`, for symmetric `P` and positive
/// definite `M`. Returns `None` when `M` is not positive definite.
pub(crate) fn relative_spectral_radius(p: &Mat3, m: &Mat3) -> Option<f64> {
    let l = cholesky(m)?;
    let li = lower_inverse(&l);
    // C = L^{-1} P L^{-T}
    let mut tmp = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            tmp[i][j] = (0..3).map(|k| li[i][k] * p[k][j]).sum();
        }
    }
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| tmp[i][k] * li[j][k]).sum();
        }
    }
    // symmetrise away rounding asymmetry
    for i in 0..3 {
        for j in 0..i {
            let avg = 0.5 * (c[i][j] + c[j][i]);
            c[i][j] = avg;
            c[j][i] = avg;
        }
    }
    let e = sym_eigenvalues(&c);
    Some(e[0].abs().max(e[2].abs()))
}
