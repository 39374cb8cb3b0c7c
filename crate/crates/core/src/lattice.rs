//! Geometry of the cuboidal lattice family.
//!
//! `Λ(u, v)` is generated by `r1 = (u, v, 0)`, `r2 = (u, 0, v)`, `r3 = (0, v, v)`
//! with `A = u²/v²`. Everything here is a pure function of `A` (and, where
//! stated, the scale `v`).

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat3};

pub const ACC: f64 = 1.0 / 3.0;
pub const BCC: f64 = 0.5;
pub const MCC: f64 = std::f64::consts::FRAC_1_SQRT_2;
pub const FCC: f64 = 1.0;

/// Distance to 1/3 or 1 below which the boundary kissing number is used.
pub const BOUNDARY_SNAP: f64 = 1e-12;

/// Coordinate window used when searching for minimal vectors.
pub const KISSING_WINDOW: i64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `0 < A < 1/3`
    Low,
    /// `1/3 ≤ A ≤ 1`
    Mid,
    /// `A > 1`
    High,
}

/// The family parameter `A` together with its regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnisotropyParam {
    a: f64,
    regime: Regime,
}

impl AnisotropyParam {
    pub fn value(&self) -> f64 {
        self.a
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn is_mid(&self) -> bool {
        self.regime == Regime::Mid
    }

    /// Square of the normalising scale `v`, evaluated without a square root so
    /// that e.g. `(A+1)·v² == 1` holds exactly in the middle regime.
    pub fn scale_squared(&self) -> f64 {
        match self.regime {
            Regime::Low => 1.0 / (4.0 * self.a),
            Regime::Mid => 1.0 / (self.a + 1.0),
            Regime::High => 0.5,
        }
    }

    pub(crate) fn require_mid(&self) -> Result<()> {
        if self.is_mid() {
            Ok(())
        } else {
            Err(Error::RegimeMismatch {
                a: self.a,
                expected: "1/3 <= A <= 1",
            })
        }
    }
}

/// Classify `A` into its regime. The boundaries `1/3` and `1` are `Mid`.
pub fn classify(a: f64) -> Result<AnisotropyParam> {
    if !a.is_finite() || a <= 0.0 {
        return Err(Error::InvalidAnisotropy(a));
    }
    let regime = if a < ACC {
        Regime::Low
    } else if a <= FCC {
        Regime::Mid
    } else {
        Regime::High
    };
    Ok(AnisotropyParam { a, regime })
}

/// Scale `v` making the minimum norm of `Λ(v√A, v)` equal to one.
pub fn normalization_scale(param: &AnisotropyParam) -> f64 {
    let a = param.value();
    match param.regime() {
        Regime::Low => 1.0 / (2.0 * a.sqrt()),
        Regime::Mid => 1.0 / (a + 1.0).sqrt(),
        Regime::High => std::f64::consts::FRAC_1_SQRT_2,
    }
}

/// Symmetric positive definite 3x3 Gram matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GramMatrix {
    entries: Mat3,
}

impl GramMatrix {
    pub fn new(entries: [[f64; 3]; 3]) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[[f64; 3]; 3] {
        &self.entries
    }

    pub fn det(&self) -> f64 {
        linalg::det3(&self.entries)
    }

    pub fn leading_minors(&self) -> [f64; 3] {
        let m = &self.entries;
        [
            m[0][0],
            m[0][0] * m[1][1] - m[0][1] * m[1][0],
            self.det(),
        ]
    }

    pub fn is_symmetric(&self) -> bool {
        let m = &self.entries;
        m[0][1] == m[1][0] && m[0][2] == m[2][0] && m[1][2] == m[2][1]
    }

    pub fn is_positive_definite(&self) -> bool {
        self.leading_minors().iter().all(|&d| d > 0.0)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 3] {
        linalg::sym_eigenvalues(&self.entries)
    }

    /// `cᵀ G c`.
    pub fn form(&self, c: [i64; 3]) -> f64 {
        let m = &self.entries;
        let x = c.map(|v| v as f64);
        let mut acc = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                acc += x[i] * m[i][j] * x[j];
            }
        }
        acc
    }
}

/// A member of the family at a fixed scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CuboidalLattice {
    pub param: AnisotropyParam,
    pub v: f64,
    pub u: f64,
    pub basis: [[f64; 3]; 3],
    pub gram: GramMatrix,
}

impl CuboidalLattice {
    /// Lattice `Λ(v√A, v)` at an arbitrary scale.
    pub fn with_scale(param: AnisotropyParam, v: f64) -> Self {
        Self::from_parts(param, v, v * v)
    }

    fn from_parts(param: AnisotropyParam, v: f64, v2: f64) -> Self {
        let a = param.value();
        let u = v * a.sqrt();
        let basis = [[u, v, 0.0], [u, 0.0, v], [0.0, v, v]];
        let gram = GramMatrix::new([
            [v2 * (a + 1.0), v2 * a, v2],
            [v2 * a, v2 * (a + 1.0), v2],
            [v2, v2, 2.0 * v2],
        ]);
        Self {
            param,
            v,
            u,
            basis,
            gram,
        }
    }

    /// Gram matrix recomputed from the basis vectors.
    pub fn gram_from_basis(&self) -> GramMatrix {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = (0..3).map(|k| self.basis[i][k] * self.basis[j][k]).sum();
            }
        }
        GramMatrix::new(m)
    }

    /// Cartesian position of the lattice point with coefficients `c`.
    pub fn point(&self, c: [i64; 3]) -> [f64; 3] {
        let mut x = [0.0; 3];
        for (coef, r) in c.iter().zip(self.basis.iter()) {
            for k in 0..3 {
                x[k] += *coef as f64 * r[k];
            }
        }
        x
    }
}

/// The normalised lattice (minimum norm one).
pub fn build_lattice(param: AnisotropyParam) -> CuboidalLattice {
    CuboidalLattice::from_parts(param, normalization_scale(&param), param.scale_squared())
}

/// Squared length of `c1 r1 + c2 r2 + c3 r3` in the normalised lattice:
/// `v²·(A(i+j)² + (j+k)² + (i+k)²)`.
///
/// The integer part is summed before `A` enters, so the result is bitwise
/// symmetric under `i ↔ j`.
#[inline]
pub fn quadratic_form(param: &AnisotropyParam, c: [i64; 3]) -> f64 {
    let [i, j, k] = c;
    let s1 = ((i + j) * (i + j)) as f64;
    let s2 = ((j + k) * (j + k) + (i + k) * (i + k)) as f64;
    let a = param.value();
    match param.regime() {
        Regime::Mid => (a * s1 + s2) / (a + 1.0),
        _ => (a * s1 + s2) * param.scale_squared(),
    }
}

/// Closed-form minimum norm of `Λ(v√A, v)`.
pub fn minimum_norm(param: &AnisotropyParam, v: f64) -> f64 {
    let a = param.value();
    let v2 = v * v;
    match param.regime() {
        Regime::Low => 4.0 * a * v2,
        Regime::Mid => (a + 1.0) * v2,
        Regime::High => 2.0 * v2,
    }
}

/// Minimum of `cᵀGc` over `0 < max|cᵢ| ≤ window`.
pub fn enumerated_minimum_norm(param: &AnisotropyParam, v: f64, window: i64) -> f64 {
    let gram = CuboidalLattice::with_scale(*param, v).gram;
    window_points(window)
        .map(|c| gram.form(c))
        .fold(f64::INFINITY, f64::min)
}

fn window_points(window: i64) -> impl Iterator<Item = [i64; 3]> {
    let r = -window..=window;
    r.clone()
        .flat_map(move |i| {
            let r = -window..=window;
            r.clone()
                .flat_map(move |j| (-window..=window).map(move |k| [i, j, k]))
        })
        .filter(|c| *c != [0, 0, 0])
}

/// Packing density from the closed forms; independent of scale.
pub fn packing_density(param: &AnisotropyParam) -> f64 {
    let a = param.value();
    match param.regime() {
        Regime::Low => 2.0 * PI * a / 3.0,
        Regime::Mid => PI / 12.0 * ((a + 1.0).powi(3) / a).sqrt(),
        Regime::High => PI / 6.0 * (2.0 / a).sqrt(),
    }
}

/// `dΔ/dA` on the open middle interval.
pub fn density_derivative(param: &AnisotropyParam) -> Result<f64> {
    let a = param.value();
    if !(a > ACC && a < FCC) {
        return Err(Error::RegimeMismatch {
            a,
            expected: "1/3 < A < 1",
        });
    }
    Ok(PI / 24.0 * ((a + 1.0) / a.powi(3)).sqrt() * (2.0 * a - 1.0))
}

/// Snap `A` onto 1/3 or 1 when it lies within [`BOUNDARY_SNAP`] of them.
pub fn snap_to_boundary(a: f64) -> f64 {
    if (a - ACC).abs() < BOUNDARY_SNAP {
        ACC
    } else if (a - FCC).abs() < BOUNDARY_SNAP {
        FCC
    } else {
        a
    }
}

/// Number of minimal vectors of the normalised lattice, by enumeration.
pub fn kissing_number(param: &AnisotropyParam, tol: f64) -> Result<u32> {
    kissing_number_in_window(param, tol, KISSING_WINDOW)
}

pub fn kissing_number_in_window(param: &AnisotropyParam, tol: f64, window: i64) -> Result<u32> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidTolerance(tol));
    }
    let snapped = classify(snap_to_boundary(param.value()))?;
    let count = window_points(window)
        .filter(|&c| (quadratic_form(&snapped, c) - 1.0).abs() < tol)
        .count();
    Ok(count as u32)
}

/// Distinct normalised norms in ascending order, grouped with their
/// multiplicities, for `0 < max|cᵢ| ≤ window`.
pub fn norm_shells(param: &AnisotropyParam, window: i64, tol: f64) -> Vec<(f64, u32)> {
    let mut norms: Vec<f64> = window_points(window)
        .map(|c| quadratic_form(param, c))
        .collect();
    norms.sort_by(|a, b| a.total_cmp(b));
    let mut shells: Vec<(f64, u32)> = Vec::new();
    for q in norms {
        match shells.last_mut() {
            Some((rep, n)) if (q - *rep).abs() < tol => *n += 1,
            _ => shells.push((q, 1)),
        }
    }
    shells
}
