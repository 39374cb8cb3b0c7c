//! Epstein zeta sums `L(A; s)` over the cuboidal family and their first and
//! second derivatives in `A`.
//!
//! All series are truncated to the cube `max(|i|,|j|,|k|) ≤ N` and come with a
//! rigorous bound on the discarded part. For a positive definite form
//! `Q(x) = xᵀMx` with extreme eigenvalues `λ ≤ Λ` and determinant `D`, a
//! unit-cell comparison with the integral over `{Q ≥ λ(N+½)²}` gives
//!
//! ```text
//! Σ_{‖c‖∞>N} Q(c)^{-s} ≤ (1 + δ/(√λ(N+1)))^{2s} · 4π / ((2s-3)√D) · (√λ(N+½))^{3-2s},
//! ```
//!
//! with `δ = √(3Λ)/2`. Derivative numerators `P` are bounded by `|P| ≤ μQ`,
//! where `μ` is the spectral radius of `P` relative to `M`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{build_lattice, quadratic_form, AnisotropyParam};
use crate::linalg::{self, Mat3};
use crate::summation::{cube_sum, square_sum, Accumulation, SeriesSum};

/// The three-dimensional series converge for `s` above this value.
pub const CONVERGENCE_EXPONENT: f64 = 1.5;
pub const MIN_CUTOFF: u32 = 4;
/// Largest cutoff the engine will choose from a tolerance.
pub const CUTOFF_CAP: u32 = 2000;
/// Default reporting gate: tail bound must be below this fraction of the magnitude.
pub const DEFAULT_GATE: f64 = 1e-3;
/// Cutoff used to obtain a certified lower bound for relative tolerances.
const PROBE_CUTOFF: u32 = 4;

/// What drives the truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Truncation {
    Cutoff(u32),
    /// Absolute bound on the discarded tail.
    AbsTol(f64),
    /// Tail bound relative to a certified lower bound of the series magnitude.
    RelTol(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SumSpec {
    pub truncation: Truncation,
    pub accumulation: Accumulation,
    /// Results with `tail_bound >= gate * magnitude` are refused.
    pub gate: f64,
}

impl SumSpec {
    fn with_truncation(truncation: Truncation) -> Self {
        Self {
            truncation,
            accumulation: Accumulation::Compensated,
            gate: DEFAULT_GATE,
        }
    }

    pub fn cutoff(n: u32) -> Self {
        Self::with_truncation(Truncation::Cutoff(n))
    }

    pub fn abs_tol(tol: f64) -> Self {
        Self::with_truncation(Truncation::AbsTol(tol))
    }

    pub fn rel_tol(tol: f64) -> Self {
        Self::with_truncation(Truncation::RelTol(tol))
    }

    pub fn with_accumulation(mut self, accumulation: Accumulation) -> Self {
        self.accumulation = accumulation;
        self
    }

    pub fn with_gate(mut self, gate: f64) -> Self {
        self.gate = gate;
        self
    }

    fn validate(&self) -> Result<()> {
        match self.truncation {
            Truncation::Cutoff(n) if n < MIN_CUTOFF => return Err(Error::InvalidCutoff(n)),
            Truncation::AbsTol(t) | Truncation::RelTol(t) if !(t.is_finite() && t > 0.0) => {
                return Err(Error::InvalidTolerance(t))
            }
            _ => {}
        }
        if !(self.gate.is_finite() && self.gate > 0.0) {
            return Err(Error::InvalidTolerance(self.gate));
        }
        Ok(())
    }
}

/// A truncated sum with its certified truncation bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZetaValue {
    pub value: f64,
    /// Upper bound on `|true value - value|`.
    pub tail_bound: f64,
    pub cutoff_used: u32,
    pub term_count: u64,
    /// The truncation request that produced this value.
    pub truncation: Truncation,
    /// Quantity the gate compares against: the value itself for positive
    /// series, the sum of absolute terms for signed ones.
    pub magnitude: f64,
    pub max_term: f64,
}

impl ZetaValue {
    pub fn lower(&self) -> f64 {
        self.value - self.tail_bound
    }

    pub fn upper(&self) -> f64 {
        self.value + self.tail_bound
    }
}

/// `x ↦ x^{-s}` with a fast path for integral exponents.
#[derive(Debug, Clone, Copy)]
pub(crate) enum NegPow {
    Int(i32),
    Real(f64),
}

impl NegPow {
    pub(crate) fn new(s: f64) -> Self {
        if s.fract() == 0.0 && s.abs() <= 256.0 {
            NegPow::Int(s as i32)
        } else {
            NegPow::Real(s)
        }
    }

    #[inline(always)]
    pub(crate) fn eval(self, x: f64) -> f64 {
        match self {
            NegPow::Int(n) => x.powi(-n),
            NegPow::Real(s) => x.powf(-s),
        }
    }
}

/// Bound on `Σ_{‖c‖∞>N} Q(c)^{-s}` for a positive definite form in `dim`
/// dimensions.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TailModel {
    dim: f64,
    s: f64,
    sqrt_lambda: f64,
    delta: f64,
    log_lead: f64,
}

impl TailModel {
    fn new(dim: f64, s: f64, lambda_min: f64, lambda_max: f64, det: f64) -> Self {
        let lam = lambda_min * (1.0 - 1e-12) - 1e-15 * lambda_max;
        assert!(lam > 0.0, "form is not positive definite");
        let big = lambda_max * (1.0 + 1e-12);
        let det = det * (1.0 - 1e-12);
        let sphere = if dim == 3.0 {
            4.0 * std::f64::consts::PI
        } else {
            2.0 * std::f64::consts::PI
        };
        Self {
            dim,
            s,
            sqrt_lambda: lam.sqrt(),
            delta: (dim * big).sqrt() / 2.0,
            log_lead: sphere.ln() - (2.0 * s - dim).ln() - 0.5 * det.ln(),
        }
    }

    pub(crate) fn for_form(m: &Mat3, s: f64) -> Self {
        let e = linalg::sym_eigenvalues(m);
        Self::new(3.0, s, e[0], e[2], linalg::det3(m))
    }

    pub(crate) fn for_square_lattice(s: f64) -> Self {
        Self::new(2.0, s, 1.0, 1.0, 1.0)
    }

    /// Monotone decreasing in `n`.
    pub(crate) fn bound(&self, n: u32) -> f64 {
        let n = n as f64;
        let radius = self.sqrt_lambda * (n + 0.5);
        let cell = 1.0 + self.delta / (self.sqrt_lambda * (n + 1.0));
        (self.log_lead + (self.dim - 2.0 * self.s) * radius.ln() + 2.0 * self.s * cell.ln()).exp()
    }
}

/// A tail model scaled by the bound on the numerator and prefactor.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TailBound {
    model: TailModel,
    factor: f64,
}

impl TailBound {
    pub(crate) fn at(&self, n: u32) -> f64 {
        self.factor * self.model.bound(n)
    }

    /// Smallest cutoff in `[MIN_CUTOFF, CUTOFF_CAP]` whose bound is at most `tol`.
    pub(crate) fn select_cutoff(&self, tol: f64) -> Result<u32> {
        if self.at(CUTOFF_CAP) > tol {
            return Err(Error::CutoffCapExceeded {
                tol,
                cap: CUTOFF_CAP,
            });
        }
        let (mut lo, mut hi) = (MIN_CUTOFF, CUTOFF_CAP);
        if self.at(lo) <= tol {
            return Ok(lo);
        }
        // invariant: at(lo) > tol >= at(hi)
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.at(mid) <= tol {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }
}

pub(crate) fn check_exponent(s: f64, min: f64) -> Result<()> {
    if s.is_finite() && s > min {
        Ok(())
    } else {
        Err(Error::Divergent { s, min })
    }
}

/// Resolve the truncation, sum, and apply the gate.
///
/// `probe` returns the magnitude of the series truncated at a small cutoff; it
/// is a lower bound for the full magnitude and turns relative tolerances into
/// absolute ones.
pub(crate) fn run_series<S, P>(
    spec: &SumSpec,
    tail: &TailBound,
    positive: bool,
    probe: P,
    sum: S,
) -> Result<ZetaValue>
where
    S: Fn(u32) -> SeriesSum,
    P: Fn() -> f64,
{
    spec.validate()?;
    let cutoff = match spec.truncation {
        Truncation::Cutoff(n) => n,
        Truncation::AbsTol(t) => tail.select_cutoff(t)?,
        Truncation::RelTol(r) => tail.select_cutoff(r * probe())?,
    };
    let s = sum(cutoff);
    let tail_bound = tail.at(cutoff);
    let magnitude = if positive { s.value } else { s.abs_value };
    if !(tail_bound < spec.gate * magnitude) {
        return Err(Error::GateExceeded {
            tail_bound,
            magnitude,
            gate: spec.gate,
        });
    }
    Ok(ZetaValue {
        value: s.value,
        tail_bound,
        cutoff_used: cutoff,
        term_count: s.term_count,
        truncation: spec.truncation,
        magnitude,
        max_term: s.max_term,
    })
}

fn magnitude_of(s: SeriesSum, positive: bool) -> f64 {
    if positive {
        s.value
    } else {
        s.abs_value
    }
}

// Forms and numerators in the transformed coordinates (I,J,K) = (i-j, -k, j).

/// `i² + j² + k² - 2(ij+ik)·A/(A+1) + 2jk·(A-1)/(A+1)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TransformedForm {
    two_alpha: f64,
    two_beta: f64,
    matrix: Mat3,
}

impl TransformedForm {
    pub(crate) fn new(a: f64) -> Self {
        let alpha = a / (a + 1.0);
        let beta = (a - 1.0) / (a + 1.0);
        Self {
            two_alpha: 2.0 * alpha,
            two_beta: 2.0 * beta,
            matrix: [[1.0, -alpha, -alpha], [-alpha, 1.0, beta], [-alpha, beta, 1.0]],
        }
    }

    /// The bcc point, written with the symmetric `-(2/3)(ij+ik+jk)` cross term.
    pub(crate) fn at_half() -> Self {
        let t = 1.0 / 3.0;
        Self {
            two_alpha: 2.0 * t,
            two_beta: -2.0 * t,
            matrix: [[1.0, -t, -t], [-t, 1.0, -t], [-t, -t, 1.0]],
        }
    }

    #[inline(always)]
    pub(crate) fn eval(&self, i: i64, j: i64, k: i64) -> f64 {
        let n0 = (i * i + j * j + k * k) as f64;
        let n1 = (i * j + i * k) as f64;
        let n2 = (j * k) as f64;
        n0 - self.two_alpha * n1 + self.two_beta * n2
    }
}

/// `ij + ik - 2jk`
const NUM_JK: Mat3 = [[0.0, 0.5, 0.5], [0.5, 0.0, -1.0], [0.5, -1.0, 0.0]];
/// `ij + jk - 2ik`
const NUM_IK: Mat3 = [[0.0, 0.5, -1.0], [0.5, 0.0, 0.5], [-1.0, 0.5, 0.0]];
/// `jk + ik - 2ij`
const NUM_IJ: Mat3 = [[0.0, -1.0, 0.5], [-1.0, 0.0, 0.5], [0.5, 0.5, 0.0]];

#[inline(always)]
fn num_jk(i: i64, j: i64, k: i64) -> f64 {
    (i * j + i * k - 2 * j * k) as f64
}

#[inline(always)]
fn num_ik(i: i64, j: i64, k: i64) -> f64 {
    (i * j + j * k - 2 * i * k) as f64
}

#[inline(always)]
fn num_ij(i: i64, j: i64, k: i64) -> f64 {
    (j * k + i * k - 2 * i * j) as f64
}

fn numerator_ratio(p: &Mat3, form: &TransformedForm) -> f64 {
    let mu = linalg::relative_spectral_radius(p, &form.matrix)
        .expect("transformed form is positive definite on the middle regime");
    mu * (1.0 + 1e-10) + 1e-15
}

fn lattice_sum(param: &AnisotropyParam, s: f64, cutoff: u32, mode: Accumulation) -> SeriesSum {
    let pow = NegPow::new(s);
    let param = *param;
    let [sum] = cube_sum(cutoff, mode, move |i, j, k| {
        [pow.eval(quadratic_form(&param, [i, j, k]))]
    });
    sum
}

pub(crate) fn lattice_tail(param: &AnisotropyParam, s: f64) -> TailBound {
    let gram = build_lattice(*param).gram;
    TailBound {
        model: TailModel::for_form(gram.entries(), s),
        factor: 1.0,
    }
}

/// `L(A; s) = Σ' g(A; i,j,k)^{-s}` over the normalised lattice.
///
/// Any regime is accepted; outside `1/3 ≤ A ≤ 1` the normalised Gram form of
/// that regime is used.
pub fn epstein_zeta(param: &AnisotropyParam, s: f64, spec: &SumSpec) -> Result<ZetaValue> {
    check_exponent(s, CONVERGENCE_EXPONENT)?;
    let tail = lattice_tail(param, s);
    let mode = spec.accumulation;
    run_series(
        spec,
        &tail,
        true,
        || lattice_sum(param, s, PROBE_CUTOFF, mode).value,
        |n| lattice_sum(param, s, n, mode),
    )
}

/// Bound on the part of `L(A; s)` outside the cube of half-width `n`.
pub fn tail_bound(param: &AnisotropyParam, s: f64, n: u32) -> Result<f64> {
    check_exponent(s, CONVERGENCE_EXPONENT)?;
    if n < MIN_CUTOFF {
        return Err(Error::InvalidCutoff(n));
    }
    Ok(lattice_tail(param, s).at(n))
}

fn transformed_sum(form: TransformedForm, s: f64, cutoff: u32, mode: Accumulation) -> SeriesSum {
    let pow = NegPow::new(s);
    let [sum] = cube_sum(cutoff, mode, move |i, j, k| [pow.eval(form.eval(i, j, k))]);
    sum
}

/// `L(A; s)` summed in the coordinates `(I,J,K) = (i-j, -k, j)`.
///
/// The map is a bijection of `ℤ³`, so the limit agrees with [`epstein_zeta`];
/// only the truncation region differs.
pub fn epstein_zeta_transformed(
    param: &AnisotropyParam,
    s: f64,
    spec: &SumSpec,
) -> Result<ZetaValue> {
    check_exponent(s, CONVERGENCE_EXPONENT)?;
    param.require_mid()?;
    let form = TransformedForm::new(param.value());
    transformed_series(form, s, spec)
}

pub(crate) fn transformed_series(form: TransformedForm, s: f64, spec: &SumSpec) -> Result<ZetaValue> {
    let tail = TailBound {
        model: TailModel::for_form(&form.matrix, s),
        factor: 1.0,
    };
    let mode = spec.accumulation;
    run_series(
        spec,
        &tail,
        true,
        || transformed_sum(form, s, PROBE_CUTOFF, mode).value,
        |n| transformed_sum(form, s, n, mode),
    )
}

/// `∂L/∂A = 2s/(A+1)² Σ' (ij+ik-2jk) / Q^{s+1}`.
pub fn dlda(param: &AnisotropyParam, s: f64, spec: &SumSpec) -> Result<ZetaValue> {
    check_exponent(s, CONVERGENCE_EXPONENT)?;
    param.require_mid()?;
    let a = param.value();
    let form = TransformedForm::new(a);
    let pre = 2.0 * s / ((a + 1.0) * (a + 1.0));
    let tail = TailBound {
        model: TailModel::for_form(&form.matrix, s),
        factor: pre * numerator_ratio(&NUM_JK, &form),
    };
    let pow = NegPow::new(s);
    let mode = spec.accumulation;
    let sum = move |n: u32| {
        let [r] = cube_sum(n, mode, move |i, j, k| {
            let q = form.eval(i, j, k);
            [pre * num_jk(i, j, k) * pow.eval(q) / q]
        });
        r
    };
    run_series(spec, &tail, false, || magnitude_of(sum(PROBE_CUTOFF), false), sum)
}

/// The three symmetric versions of the first-derivative series at `A = 1/2`
/// and their average.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetrizedDerivative {
    /// Average of the three series; its summand vanishes identically.
    pub value: f64,
    /// Numerators `ij+ik-2jk`, `ij+jk-2ik`, `jk+ik-2ij` in that order.
    pub series: [f64; 3],
    /// Bound on the truncation error of each individual series.
    pub series_tail_bound: f64,
    pub cutoff_used: u32,
    pub term_count: u64,
    pub max_term: f64,
}

impl SymmetrizedDerivative {
    /// Rounding allowance `1e-12 · term_count · max_term`.
    pub fn rounding_budget(&self) -> f64 {
        1e-12 * self.term_count as f64 * self.max_term
    }
}

/// `∂L/∂A` at bcc as the average of the three index-permuted series.
pub fn dlda_at_half_symmetrized(s: f64, spec: &SumSpec) -> Result<SymmetrizedDerivative> {
    check_exponent(s, CONVERGENCE_EXPONENT)?;
    spec.validate()?;
    let form = TransformedForm::at_half();
    let pre = 8.0 * s / 9.0;
    let mu = [NUM_JK, NUM_IK, NUM_IJ]
        .iter()
        .map(|p| numerator_ratio(p, &form))
        .fold(0.0, f64::max);
    let tail = TailBound {
        model: TailModel::for_form(&form.matrix, s),
        factor: pre * mu,
    };
    let pow = NegPow::new(s);
    let mode = spec.accumulation;
    let sums = move |n: u32| {
        cube_sum(n, mode, move |i, j, k| {
            let q = form.eval(i, j, k);
            let w = pre * pow.eval(q) / q;
            [num_jk(i, j, k) * w, num_ik(i, j, k) * w, num_ij(i, j, k) * w]
        })
    };
    let cutoff = match spec.truncation {
        Truncation::Cutoff(n) => n,
        Truncation::AbsTol(t) => tail.select_cutoff(t)?,
        Truncation::RelTol(r) => tail.select_cutoff(r * sums(PROBE_CUTOFF)[0].abs_value)?,
    };
    let parts = sums(cutoff);
    let series = parts.map(|p| p.value);
    Ok(SymmetrizedDerivative {
        value: (series[0] + series[1] + series[2]) / 3.0,
        series,
        series_tail_bound: tail.at(cutoff),
        cutoff_used: cutoff,
        term_count: parts[0].term_count,
        max_term: parts.iter().map(|p| p.max_term).fold(0.0, f64::max),
    })
}

/// `∂²L/∂A²` from the two-series expression valid on the whole middle range.
pub fn d2lda2(param: &AnisotropyParam, s: f64, spec: &SumSpec) -> Result<ZetaValue> {
    check_exponent(s, CONVERGENCE_EXPONENT)?;
    param.require_mid()?;
    let a = param.value();
    let form = TransformedForm::new(a);
    let ap1 = a + 1.0;
    let pre1 = -4.0 * s / (ap1 * ap1 * ap1);
    let pre2 = 4.0 * s * (s + 1.0) / (ap1 * ap1 * ap1 * ap1);
    let mu = numerator_ratio(&NUM_JK, &form);
    let tail = TailBound {
        model: TailModel::for_form(&form.matrix, s),
        factor: pre1.abs() * mu + pre2 * mu * mu,
    };
    let pow = NegPow::new(s);
    let mode = spec.accumulation;
    let sum = move |n: u32| {
        let [r] = cube_sum(n, mode, move |i, j, k| {
            let q = form.eval(i, j, k);
            let p = num_jk(i, j, k);
            let w = pow.eval(q) / q;
            [pre1 * p * w + pre2 * p * p * w / q]
        });
        r
    };
    run_series(spec, &tail, false, || magnitude_of(sum(PROBE_CUTOFF), false), sum)
}

/// `∂²L/∂A²` at bcc: `64s(s+1)/81 Σ' (jk+ik-2ij)² / Q^{s+2}`, a series of
/// non-negative terms.
pub fn d2lda2_at_half(s: f64, spec: &SumSpec) -> Result<ZetaValue> {
    check_exponent(s, CONVERGENCE_EXPONENT)?;
    let form = TransformedForm::at_half();
    let pre = 64.0 * s * (s + 1.0) / 81.0;
    let mu = numerator_ratio(&NUM_IJ, &form);
    let tail = TailBound {
        model: TailModel::for_form(&form.matrix, s),
        factor: pre * mu * mu,
    };
    let pow = NegPow::new(s);
    let mode = spec.accumulation;
    let sum = move |n: u32| {
        let [r] = cube_sum(n, mode, move |i, j, k| {
            let q = form.eval(i, j, k);
            let p = num_ij(i, j, k);
            [pre * p * p * pow.eval(q) / (q * q)]
        });
        r
    };
    run_series(spec, &tail, true, || sum(PROBE_CUTOFF).value, sum)
}

/// `Σ' (m² + n²)^{-s}` over `ℤ²`.
pub(crate) fn square_lattice_series(s: f64, spec: &SumSpec) -> Result<ZetaValue> {
    let tail = TailBound {
        model: TailModel::for_square_lattice(s),
        factor: 1.0,
    };
    let pow = NegPow::new(s);
    let mode = spec.accumulation;
    let sum = move |n: u32| square_sum(n, mode, move |m, k| pow.eval((m * m + k * k) as f64));
    run_series(spec, &tail, true, || sum(PROBE_CUTOFF).value, sum)
}
