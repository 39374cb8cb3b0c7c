//! Degenerate limits of the normalised family.
//!
//! As `A → ∞` only the vectors with `c2 = -c1` stay bounded and they form a
//! square lattice; as `A → 0` only multiples of `r1 + r2 - r3 = (1, 0, 0)`
//! stay bounded. As `s → ∞` the lattice sum counts minimal vectors.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{
    build_lattice, classify, kissing_number, norm_shells, quadratic_form, ACC, FCC,
};
use crate::zeta::{
    check_exponent, epstein_zeta, square_lattice_series, SumSpec, ZetaValue,
    CONVERGENCE_EXPONENT,
};

/// Exactness required of the distance-preservation checks.
pub const ISOMETRY_TOL: f64 = 1e-13;
/// Slack on the leading-order `A → ∞` deviation estimate.
pub const A_TO_INF_SLACK: f64 = 2.0;
/// Slack on the next-shell estimate for `s → ∞`.
pub const S_TO_INF_SLACK: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitDirection {
    AToInf,
    AToZero,
    SToInf,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitReport {
    pub direction: LimitDirection,
    pub probes: Vec<f64>,
    pub deviations: Vec<f64>,
    /// Truncation bounds attached to each deviation (zero where nothing is summed).
    pub tail_bounds: Vec<f64>,
    /// Bound the final deviation must fall below.
    pub threshold: f64,
    pub converged: bool,
}

impl LimitReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.deviations.windows(2).all(|w| w[1] < w[0])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SublatticePoint {
    pub coords: [i64; 2],
    pub vector: [f64; 3],
}

/// Points `c1 (r1 - r2) + c3 r3` of the normalised lattice for `A > 1`, for
/// `|c1|, |c3| ≤ window`. They equal `c1 (0, 1/√2, -1/√2) + c3 (0, 1/√2, 1/√2)`
/// whatever the value of `A`.
pub fn finite_sublattice_vectors(a: f64, window: i64) -> Result<Vec<SublatticePoint>> {
    let param = classify(a)?;
    if a <= FCC {
        return Err(Error::RegimeMismatch {
            a,
            expected: "A > 1",
        });
    }
    let lattice = build_lattice(param);
    let mut out = Vec::new();
    for c1 in -window..=window {
        for c3 in -window..=window {
            out.push(SublatticePoint {
                coords: [c1, c3],
                vector: lattice.point([c1, -c1, c3]),
            });
        }
    }
    Ok(out)
}

fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Largest `| |x - y| - |φ(x) - φ(y)| |` over all pairs.
pub fn isometry_defect(points: &[SublatticePoint]) -> f64 {
    let mut worst: f64 = 0.0;
    for (n, p) in points.iter().enumerate() {
        for q in &points[n + 1..] {
            let image = dist(
                &p.coords.map(|c| c as f64),
                &q.coords.map(|c| c as f64),
            );
            worst = worst.max((dist(&p.vector, &q.vector) - image).abs());
        }
    }
    worst
}

/// `Σ' (m² + n²)^{-s}` over the square lattice.
pub fn square_lattice_zeta(s: f64, spec: &SumSpec) -> Result<ZetaValue> {
    check_exponent(s, 1.0)?;
    square_lattice_series(s, spec)
}

/// Relative tail tolerance used when probing limits.
fn limit_tol(s: f64) -> f64 {
    if s >= 8.0 {
        1e-16
    } else if s >= 4.0 {
        1e-12
    } else {
        1e-7
    }
}

fn check_probes(probes: &[f64], increasing: bool) -> Result<()> {
    if probes.is_empty() {
        return Err(Error::InvalidProbes("no probes given".into()));
    }
    let ordered = probes.windows(2).all(|w| {
        if increasing {
            w[1] > w[0]
        } else {
            w[1] < w[0]
        }
    });
    if !ordered {
        return Err(Error::InvalidProbes(format!(
            "probes must be strictly {}",
            if increasing { "increasing" } else { "decreasing" }
        )));
    }
    Ok(())
}

/// Leading-order size of `L(A; s) - ζ_{ℤ²}(s)` for large `A`: the shells
/// `c1 + c2 = ±1` contribute about `2^s π A^{1-s} / (s - 1)`.
pub fn a_to_inf_estimate(s: f64, a: f64) -> f64 {
    2f64.powf(s) * std::f64::consts::PI * a.powf(1.0 - s) / (s - 1.0)
}

/// Compare `L(A; s)` for `A > 1` against the square-lattice sum.
pub fn verify_a_to_inf(s: f64, probes: &[f64]) -> Result<LimitReport> {
    check_exponent(s, CONVERGENCE_EXPONENT)?;
    check_probes(probes, true)?;
    if probes[0] <= FCC {
        return Err(Error::InvalidProbes("A probes must exceed 1".into()));
    }
    let spec = SumSpec::rel_tol(limit_tol(s));
    let square = square_lattice_zeta(s, &spec)?;
    let mut deviations = Vec::with_capacity(probes.len());
    let mut tails = Vec::with_capacity(probes.len());
    for &a in probes {
        let l = epstein_zeta(&classify(a)?, s, &spec)?;
        deviations.push((l.value - square.value).abs());
        tails.push(l.tail_bound + square.tail_bound);
    }
    let a_max = *probes.last().unwrap();
    let threshold = A_TO_INF_SLACK * a_to_inf_estimate(s, a_max) + tails.last().unwrap();
    let mut report = LimitReport {
        direction: LimitDirection::AToInf,
        probes: probes.to_vec(),
        deviations,
        tail_bounds: tails,
        threshold,
        converged: false,
    };
    report.converged =
        report.strictly_decreasing() && *report.deviations.last().unwrap() < threshold;
    Ok(report)
}

/// For `0 < A < 1/3`: the multiples of `(1, 1, -1)` sit at distance `|t|`
/// from the origin for every `A`, and every other lattice vector escapes.
/// The deviation is the reciprocal of the smallest escaping norm.
pub fn verify_a_to_zero(probes: &[f64]) -> Result<LimitReport> {
    check_probes(probes, false)?;
    if probes.iter().any(|&a| !(a > 0.0 && a < ACC)) {
        return Err(Error::InvalidProbes("A probes must lie in (0, 1/3)".into()));
    }
    let window = 3;
    let mut deviations = Vec::new();
    let mut worst_defect: f64 = 0.0;
    for &a in probes {
        let param = classify(a)?;
        let lattice = build_lattice(param);
        let line: Vec<SublatticePoint> = (-window..=window)
            .map(|t| SublatticePoint {
                coords: [t, 0],
                vector: lattice.point([t, t, -t]),
            })
            .collect();
        worst_defect = worst_defect.max(isometry_defect(&line));
        let mut escaping = f64::INFINITY;
        for i in -window..=window {
            for j in -window..=window {
                for k in -window..=window {
                    if (j + k, i + k) != (0, 0) {
                        escaping = escaping.min(quadratic_form(&param, [i, j, k]));
                    }
                }
            }
        }
        deviations.push(1.0 / escaping);
    }
    let mut report = LimitReport {
        direction: LimitDirection::AToZero,
        probes: probes.to_vec(),
        tail_bounds: vec![0.0; deviations.len()],
        deviations,
        threshold: ISOMETRY_TOL,
        converged: false,
    };
    report.converged = report.strictly_decreasing() && worst_defect <= ISOMETRY_TOL;
    Ok(report)
}

/// Smallest normalised norm above the minimum, with its multiplicity.
pub fn next_shell(a: f64) -> Result<(f64, u32)> {
    let shells = norm_shells(&classify(a)?, 3, 1e-9);
    Ok(shells[1])
}

/// Track `L(A; s) - kiss(A)` as `s` grows.
pub fn verify_s_to_inf(a: f64, s_probes: &[f64]) -> Result<LimitReport> {
    if !(ACC..=FCC).contains(&a) {
        return Err(Error::RegimeMismatch {
            a,
            expected: "1/3 <= A <= 1",
        });
    }
    check_probes(s_probes, true)?;
    for &s in s_probes {
        check_exponent(s, CONVERGENCE_EXPONENT)?;
    }
    let param = classify(a)?;
    let kiss = kissing_number(&param, 1e-9)? as f64;
    let mut deviations = Vec::new();
    let mut tails = Vec::new();
    for &s in s_probes {
        let l = epstein_zeta(&param, s, &SumSpec::rel_tol(limit_tol(s)))?;
        deviations.push(l.value - kiss);
        tails.push(l.tail_bound);
    }
    let (q2, _) = next_shell(a)?;
    let s_max = *s_probes.last().unwrap();
    let threshold = S_TO_INF_SLACK * q2.powf(-s_max);
    let mut report = LimitReport {
        direction: LimitDirection::SToInf,
        probes: s_probes.to_vec(),
        deviations,
        tail_bounds: tails,
        threshold,
        converged: false,
    };
    report.converged = report.strictly_decreasing()
        && report.deviations.iter().all(|&d| d > 0.0)
        && *report.deviations.last().unwrap() < threshold;
    Ok(report)
}
