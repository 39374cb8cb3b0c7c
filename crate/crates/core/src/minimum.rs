//! Numerical evidence for the stationary minimum of `L(A; s)` at bcc, and the
//! tables behind the density and lattice-sum plots.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{classify, packing_density, ACC, BCC, FCC};
use crate::summation::cube_sum;
use crate::zeta::{
    check_exponent, d2lda2, d2lda2_at_half, dlda, dlda_at_half_symmetrized, epstein_zeta,
    epstein_zeta_transformed, lattice_tail, NegPow, SumSpec, CONVERGENCE_EXPONENT,
};

pub const H_FIRST: f64 = 1e-4;
pub const H_SECOND: f64 = 1e-3;
pub const SYMMETRIZED_LIMIT: f64 = 1e-10;
pub const ANALYTIC_FIRST_SLACK: f64 = 1e-9;
pub const DEFAULT_TOL_FIRST: f64 = 1e-5;
pub const DEFAULT_TOL_SECOND_REL: f64 = 0.01;
pub const GOLDEN_WIDTH: f64 = 1e-4;

/// Default relative tolerance for scans: tighter where the tail decays fast.
pub fn default_scan_tol(s: f64) -> f64 {
    if s >= 4.0 {
        1e-8
    } else {
        1e-6
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoremOptions {
    /// Common cutoff for every series and stencil point.
    pub cutoff: u32,
    pub h_first: f64,
    pub h_second: f64,
}

impl Default for TheoremOptions {
    fn default() -> Self {
        Self {
            cutoff: 64,
            h_first: H_FIRST,
            h_second: H_SECOND,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: &'static str, value: f64, threshold: f64) -> Self {
        Self {
            name,
            value,
            threshold,
            passed: value <= threshold,
        }
    }

    fn above(name: &'static str, value: f64, threshold: f64) -> Self {
        Self {
            name,
            value,
            threshold,
            passed: value > threshold,
        }
    }
}

/// First and second `A`-derivatives at bcc from independent routes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremReport {
    pub s: f64,
    pub cutoff: u32,
    pub first_deriv_analytic: f64,
    pub first_deriv_analytic_tail: f64,
    pub first_deriv_symmetrized: f64,
    pub first_deriv_fd: f64,
    /// The single non-negative series at bcc.
    pub second_deriv_analytic: f64,
    pub second_deriv_analytic_tail: f64,
    /// The general two-series expression evaluated at bcc.
    pub second_deriv_general: f64,
    pub second_deriv_general_tail: f64,
    pub second_deriv_fd: f64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Check that `∂L/∂A = 0` and `∂²L/∂A² > 0` at `A = 1/2`.
///
/// Finite differences use the transformed-coordinate sum at the same cutoff as
/// the analytic series, so both sides are derivatives of the same finite sum.
/// The positivity check is certified: the truncated value minus its tail
/// bound must stay positive.
pub fn verify_theorem(s: f64, tol_first: f64, tol_second_rel: f64) -> Result<TheoremReport> {
    verify_theorem_with(s, tol_first, tol_second_rel, &TheoremOptions::default())
}

pub fn verify_theorem_with(
    s: f64,
    tol_first: f64,
    tol_second_rel: f64,
    opts: &TheoremOptions,
) -> Result<TheoremReport> {
    check_exponent(s, CONVERGENCE_EXPONENT)?;
    for t in [tol_first, tol_second_rel, opts.h_first, opts.h_second] {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::InvalidTolerance(t));
        }
    }
    // Only require the tail to be below the magnitude; the checks compare
    // sums truncated identically.
    let spec = SumSpec::cutoff(opts.cutoff).with_gate(1.0);
    let half = classify(BCC)?;
    let l = |a: f64| -> Result<f64> {
        Ok(epstein_zeta_transformed(&classify(a)?, s, &spec)?.value)
    };

    let sym = dlda_at_half_symmetrized(s, &spec)?;
    let d1 = dlda(&half, s, &spec)?;
    let h1 = opts.h_first;
    let fd1 = (l(BCC + h1)? - l(BCC - h1)?) / (2.0 * h1);

    let d2 = d2lda2_at_half(s, &spec)?;
    let d2g = d2lda2(&half, s, &spec)?;
    let h2 = opts.h_second;
    let fd2 = (l(BCC + h2)? - 2.0 * l(BCC)? + l(BCC - h2)?) / (h2 * h2);

    let checks = vec![
        Check::at_most("first_symmetrized", sym.value.abs(), SYMMETRIZED_LIMIT),
        Check::at_most(
            "first_analytic",
            d1.value.abs(),
            d1.tail_bound + ANALYTIC_FIRST_SLACK,
        ),
        Check::at_most("first_fd", fd1.abs(), tol_first),
        Check::above("second_margin", d2.value - d2.tail_bound, 0.0),
        Check::above("second_fd_positive", fd2, 0.0),
        Check::at_most(
            "second_fd_rel",
            ((d2.value - fd2) / d2.value).abs(),
            tol_second_rel,
        ),
        Check::at_most(
            "second_cross_formula",
            (d2.value - d2g.value).abs(),
            d2.tail_bound + d2g.tail_bound,
        ),
    ];
    let passed = checks.iter().all(|c| c.passed);
    Ok(TheoremReport {
        s,
        cutoff: opts.cutoff,
        first_deriv_analytic: d1.value,
        first_deriv_analytic_tail: d1.tail_bound,
        first_deriv_symmetrized: sym.value,
        first_deriv_fd: fd1,
        second_deriv_analytic: d2.value,
        second_deriv_analytic_tail: d2.tail_bound,
        second_deriv_general: d2g.value,
        second_deriv_general_tail: d2g.tail_bound,
        second_deriv_fd: fd2,
        checks,
        passed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub a: f64,
    pub value: f64,
    pub tail_bound: f64,
    pub cutoff: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanTable {
    pub s: f64,
    pub a_min: f64,
    pub a_max: f64,
    pub steps: usize,
    pub rows: Vec<ScanRow>,
}

/// Uniform grid, endpoints included, with the last point pinned to `max`.
pub fn uniform_grid(min: f64, max: f64, steps: usize) -> Vec<f64> {
    let width = max - min;
    (0..steps)
        .map(|k| {
            if k + 1 == steps {
                max
            } else {
                min + width * k as f64 / (steps - 1) as f64
            }
        })
        .collect()
}

fn check_mid_grid(a_min: f64, a_max: f64, steps: usize, min_steps: usize) -> Result<()> {
    if !(a_min >= ACC && a_min < a_max && a_max <= FCC) {
        return Err(Error::InvalidGrid(format!(
            "need 1/3 <= min < max <= 1, got [{a_min}, {a_max}]"
        )));
    }
    if steps < min_steps {
        return Err(Error::InvalidGrid(format!(
            "need at least {min_steps} steps, got {steps}"
        )));
    }
    Ok(())
}

/// Tabulate `L(A; s)` on a uniform grid in the middle range; `tol` is the
/// relative tail tolerance for each row.
pub fn scan_l(s: f64, a_min: f64, a_max: f64, steps: usize, tol: f64) -> Result<ScanTable> {
    check_exponent(s, CONVERGENCE_EXPONENT)?;
    check_mid_grid(a_min, a_max, steps, 2)?;
    let spec = SumSpec::rel_tol(tol);
    let rows = uniform_grid(a_min, a_max, steps)
        .into_par_iter()
        .map(|a| {
            let z = epstein_zeta(&classify(a)?, s, &spec)?;
            Ok(ScanRow {
                a,
                value: z.value,
                tail_bound: z.tail_bound,
                cutoff: z.cutoff_used,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanTable {
        s,
        a_min,
        a_max,
        steps,
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Argmin {
    pub a_star: f64,
    pub l_star: f64,
    /// Set when the smallest grid value sits on an endpoint; no refinement
    /// is done in that case.
    pub boundary: Option<Boundary>,
    pub cutoff: u32,
}

/// Grid scan followed by golden-section refinement of the bracketing cell.
///
/// One cutoff, large enough for the default tolerance at every grid point, is
/// used throughout so that the objective is a smooth function of `A`. This is
/// grid evidence only, not a global statement.
pub fn argmin_scan(s: f64, a_min: f64, a_max: f64, steps: usize) -> Result<Argmin> {
    check_exponent(s, CONVERGENCE_EXPONENT)?;
    check_mid_grid(a_min, a_max, steps, 8)?;
    let grid = uniform_grid(a_min, a_max, steps);
    let tol = default_scan_tol(s);
    let pow = NegPow::new(s);
    let mut cutoff = 0;
    for &a in &grid {
        let param = classify(a)?;
        let [probe] = cube_sum(4, Default::default(), |i, j, k| {
            [pow.eval(crate::lattice::quadratic_form(&param, [i, j, k]))]
        });
        cutoff = cutoff.max(lattice_tail(&param, s).select_cutoff(tol * probe.value)?);
    }
    let spec = SumSpec::cutoff(cutoff);
    let l = |a: f64| -> Result<f64> { Ok(epstein_zeta(&classify(a)?, s, &spec)?.value) };

    let values = grid
        .par_iter()
        .map(|&a| l(a))
        .collect::<Result<Vec<_>>>()?;
    let best = values
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .map(|(k, _)| k)
        .expect("grid is non-empty");
    if best == 0 || best + 1 == grid.len() {
        return Ok(Argmin {
            a_star: grid[best],
            l_star: values[best],
            boundary: Some(if best == 0 {
                Boundary::Lower
            } else {
                Boundary::Upper
            }),
            cutoff,
        });
    }

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (grid[best - 1], grid[best + 1]);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = l(x1)?;
    let mut f2 = l(x2)?;
    while hi - lo > GOLDEN_WIDTH {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = l(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = l(x2)?;
        }
    }
    let a_star = 0.5 * (lo + hi);
    Ok(Argmin {
        a_star,
        l_star: l(a_star)?,
        boundary: None,
        cutoff,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityRow {
    pub a: f64,
    pub density: f64,
}

/// Packing density on a uniform grid across all regimes.
pub fn density_table(a_min: f64, a_max: f64, steps: usize) -> Result<Vec<DensityRow>> {
    if !(a_min > 0.0 && a_min < a_max && a_max.is_finite()) {
        return Err(Error::InvalidGrid(format!(
            "need 0 < min < max, got [{a_min}, {a_max}]"
        )));
    }
    if steps < 2 {
        return Err(Error::InvalidGrid(format!("need at least 2 steps, got {steps}")));
    }
    uniform_grid(a_min, a_max, steps)
        .into_iter()
        .map(|a| {
            Ok(DensityRow {
                a,
                density: packing_density(&classify(a)?),
            })
        })
        .collect()
}
