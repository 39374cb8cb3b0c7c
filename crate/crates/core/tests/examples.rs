//! Worked examples for each module, checked against independent oracles:
//! published values, cofactor determinants, brute-force sums written out
//! here, and finite differences.

use approx::assert_relative_eq;
use cuboidal::lattice::enumerated_minimum_norm;
use cuboidal::limits::{
    finite_sublattice_vectors, isometry_defect, square_lattice_zeta, verify_a_to_inf,
    verify_s_to_inf,
};
use cuboidal::minimum::{argmin_scan, density_table, scan_l, verify_theorem};
use cuboidal::*;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

fn p(a: f64) -> AnisotropyParam {
    classify(a).unwrap()
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs()
}

/// Plain triple loop over the normalised Gram form, no symmetry tricks.
fn brute_lattice_sum(a: f64, s: f64, n: i64) -> f64 {
    let param = p(a);
    let mut total = 0.0;
    for i in -n..=n {
        for j in -n..=n {
            for k in -n..=n {
                if (i, j, k) != (0, 0, 0) {
                    total += quadratic_form(&param, [i, j, k]).powf(-s);
                }
            }
        }
    }
    total
}

fn cofactor_det(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

#[test]
fn bcc_is_middle_regime() {
    assert_eq!(p(0.5).regime(), Regime::Mid);
    assert_eq!(p(1.0 / 3.0).regime(), Regime::Mid);
    assert_eq!(p(1.0).regime(), Regime::Mid);
    assert_eq!(p(0.2).regime(), Regime::Low);
    assert_eq!(p(2.0).regime(), Regime::High);
}

#[test]
fn bcc_gram_determinant_is_16_over_27() {
    let lattice = build_lattice(p(0.5));
    let det = cofactor_det(lattice.gram.entries());
    assert_relative_eq!(det, 16.0 / 27.0, max_relative = 1e-14);
    assert_relative_eq!(lattice.gram.det(), 16.0 / 27.0, max_relative = 1e-14);
}

#[test]
fn quadratic_form_by_substitution() {
    assert_relative_eq!(quadratic_form(&p(0.5), [1, 1, -1]), 4.0 / 3.0, max_relative = 1e-15);
    assert_relative_eq!(quadratic_form(&p(1.0 / 3.0), [1, 1, -1]), 1.0, max_relative = 1e-15);
}

#[test]
fn named_densities() {
    assert_relative_eq!(packing_density(&p(1.0)), PI * 2f64.sqrt() / 6.0, max_relative = 1e-12);
    assert_relative_eq!(packing_density(&p(0.5)), PI * 3f64.sqrt() / 8.0, max_relative = 1e-12);
    assert_relative_eq!(packing_density(&p(1.0 / 3.0)), 2.0 * PI / 9.0, max_relative = 1e-12);
    assert!((packing_density(&p(1.0)) - 0.740).abs() < 5e-4);
    assert!((packing_density(&p(0.5)) - 0.680).abs() < 5e-4);
    assert!((packing_density(&p(1.0 / 3.0)) - 0.698).abs() < 5e-4);
}

#[test]
fn density_derivative_vanishes_at_bcc_and_matches_differences() {
    assert!(density_derivative(&p(0.5)).unwrap().abs() < 1e-14);
    let h = 1e-6;
    let fd = (packing_density(&p(0.75 + h)) - packing_density(&p(0.75 - h))) / (2.0 * h);
    let d = density_derivative(&p(0.75)).unwrap();
    assert!(rel(d, fd) < 1e-6, "{d} vs {fd}");
}

#[test]
fn named_kissing_numbers() {
    assert_eq!(kissing_number(&p(1.0), 1e-9).unwrap(), 12);
    assert_eq!(kissing_number(&p(1.0 / 3.0), 1e-9).unwrap(), 10);
    assert_eq!(kissing_number(&p(FRAC_1_SQRT_2), 1e-9).unwrap(), 8);
}

#[test]
fn figure_values_from_direct_summation() {
    let cases = [
        (1.0, 6.0, 1e-10, 12.131880196544579717, 1e-9),
        (0.5, 6.0, 1e-10, 9.11418326807535893, 1e-9),
        (0.5, 3.0, 1e-7, 12.253667867292322831, 1e-6),
        (1.0, 3.0, 1e-7, 14.453921043744471864, 1e-6),
    ];
    for (a, s, tol, expected, accept) in cases {
        let z = epstein_zeta(&p(a), s, &SumSpec::rel_tol(tol)).unwrap();
        assert!(rel(z.value, expected) < accept, "L({a};{s}) = {}", z.value);
        assert!(z.tail_bound <= tol * z.value);
        assert!(z.lower() <= expected + 1e-12 * expected, "bound brackets the value");
    }
}

#[test]
fn transformed_coordinates_agree_with_direct() {
    for (a, s, tol) in [(0.5, 6.0, 1e-10), (1.0, 3.0, 1e-7), (2.0 / 3.0, 4.0, 1e-9)] {
        let spec = SumSpec::rel_tol(tol);
        let d = epstein_zeta(&p(a), s, &spec).unwrap();
        let t = epstein_zeta_transformed(&p(a), s, &spec).unwrap();
        let slack = 1e-13 * d.value;
        assert!(
            (d.value - t.value).abs() <= d.tail_bound + t.tail_bound + slack,
            "A={a} s={s}: {} vs {}",
            d.value,
            t.value
        );
    }
    let t = epstein_zeta_transformed(&p(1.0), 3.0, &SumSpec::rel_tol(1e-7)).unwrap();
    assert!(rel(t.value, 14.453921) < 1e-6);
}

#[test]
fn tail_bound_covers_brute_force_differences() {
    // independent triple loop at N and 2N
    let n = 20;
    let small = brute_lattice_sum(0.5, 3.0, n);
    let large = brute_lattice_sum(0.5, 3.0, 2 * n);
    let bound = tail_bound(&p(0.5), 3.0, n as u32).unwrap();
    assert!((large - small).abs() <= bound, "{} > {bound}", large - small);

    let engine = epstein_zeta(&p(0.5), 3.0, &SumSpec::cutoff(100)).unwrap();
    let reference = epstein_zeta(&p(0.5), 3.0, &SumSpec::cutoff(200)).unwrap();
    assert!((reference.value - engine.value).abs() <= engine.tail_bound);

    let n30 = epstein_zeta(&p(1.0), 6.0, &SumSpec::cutoff(30)).unwrap();
    let n60 = brute_lattice_sum(1.0, 6.0, 60);
    let err = (n60 - n30.value).abs();
    assert!(err < 1e-9 && err <= n30.tail_bound, "{err} vs {}", n30.tail_bound);
}

#[test]
fn engine_matches_brute_force_at_equal_cutoff() {
    for (a, s) in [(0.5, 3.0), (0.8, 2.5), (1.0 / 3.0, 4.0)] {
        let brute = brute_lattice_sum(a, s, 12);
        let z = epstein_zeta(&p(a), s, &SumSpec::cutoff(12).with_gate(1.0)).unwrap();
        assert!(rel(z.value, brute) < 1e-13, "A={a} s={s}");
    }
}

#[test]
fn first_derivative_examples() {
    let z = dlda(&p(0.5), 3.0, &SumSpec::rel_tol(1e-6).with_gate(1.0)).unwrap();
    assert!(z.value.abs() <= z.tail_bound + 1e-9);

    let spec = SumSpec::rel_tol(1e-13);
    let h = 1e-4;
    for (a, sign) in [(0.4, -1.0), (0.9, 1.0)] {
        let d = dlda(&p(a), 6.0, &SumSpec::rel_tol(1e-12)).unwrap().value;
        let up = epstein_zeta(&p(a + h), 6.0, &spec).unwrap().value;
        let down = epstein_zeta(&p(a - h), 6.0, &spec).unwrap().value;
        let fd = (up - down) / (2.0 * h);
        assert_eq!(d.signum(), sign, "A={a}");
        assert!(rel(d, fd) < 1e-5, "A={a}: {d} vs {fd}");
    }
}

#[test]
fn symmetrized_first_derivative_is_zero() {
    let d = dlda_at_half_symmetrized(3.0, &SumSpec::cutoff(60)).unwrap();
    assert!(d.value.abs() <= d.rounding_budget());
    assert!(d.value.abs() <= 1e-10);
}

#[test]
fn second_derivative_examples() {
    let general = d2lda2(&p(0.5), 3.0, &SumSpec::rel_tol(1e-6).with_gate(1.0)).unwrap();
    assert!(general.value > general.tail_bound);

    let spec = SumSpec::rel_tol(1e-12);
    let g6 = d2lda2(&p(0.5), 6.0, &spec).unwrap();
    let h6 = d2lda2_at_half(6.0, &spec).unwrap();
    assert!((g6.value - h6.value).abs() <= g6.tail_bound + h6.tail_bound + 1e-12 * h6.value);

    let h = 1e-3;
    let fine = SumSpec::rel_tol(1e-14);
    let l = |a: f64| epstein_zeta(&p(a), 6.0, &fine).unwrap().value;
    let fd = (l(0.5 + h) - 2.0 * l(0.5) + l(0.5 - h)) / (h * h);
    assert!(rel(g6.value, fd) < 0.01, "{} vs {fd}", g6.value);

    let h3 = d2lda2_at_half(3.0, &SumSpec::rel_tol(1e-6)).unwrap();
    assert!(h3.lower() > 0.0);
}

#[test]
fn theorem_passes_for_classic_exponents() {
    for s in [3.0, 6.0] {
        let report = verify_theorem(s, 1e-5, 0.01).unwrap();
        assert!(report.passed, "s={s}: {:?}", report.checks);
    }
}

#[test]
fn scan_rows_hit_figure_values() {
    let t6 = scan_l(6.0, 1.0 / 3.0, 1.0, 21, 1e-10).unwrap();
    let at = |t: &cuboidal::minimum::ScanTable, a: f64| {
        t.rows
            .iter()
            .find(|r| (r.a - a).abs() < 1e-12)
            .unwrap()
            .value
    };
    assert!(rel(at(&t6, 0.5), 9.114183268) < 1e-9);
    assert!(rel(at(&t6, 1.0), 12.131880196) < 1e-9);
    let t3 = scan_l(3.0, 1.0 / 3.0, 1.0, 21, 1e-7).unwrap();
    assert!(rel(at(&t3, 2.0 / 3.0), 12.597590639) < 1e-6);
    let t20 = scan_l(20.0, 1.0 / 3.0, 1.0, 3, 1e-10).unwrap();
    assert!(rel(t20.rows[0].value, 10.00118) < 1e-4);
    assert!(rel(t20.rows[2].value, 12.0000057) < 1e-7);
}

#[test]
fn argmin_lands_on_bcc() {
    for s in [6.0, 3.0] {
        let m = argmin_scan(s, 1.0 / 3.0, 1.0, 33).unwrap();
        assert!(m.boundary.is_none());
        assert!((m.a_star - 0.5).abs() < 1e-3, "s={s}: {}", m.a_star);
    }
}

#[test]
fn density_table_contains_named_values() {
    let rows = density_table(1.0 / 3.0, 1.0, 5).unwrap();
    let find = |a: f64| rows.iter().find(|r| (r.a - a).abs() < 1e-12).unwrap().density;
    assert_relative_eq!(find(0.5), PI * 3f64.sqrt() / 8.0, max_relative = 1e-12);
    assert_relative_eq!(find(1.0 / 3.0), 2.0 * PI / 9.0, max_relative = 1e-12);
}

#[test]
fn sublattice_is_an_isometric_copy_of_the_square_lattice() {
    let pts = finite_sublattice_vectors(5.0, 3).unwrap();
    let unit = pts.iter().find(|q| q.coords == [1, 0]).unwrap();
    let h = FRAC_1_SQRT_2;
    for (x, y) in unit.vector.iter().zip([0.0, h, -h]) {
        assert!((x - y).abs() < 1e-13);
    }
    assert!(isometry_defect(&pts) <= 1e-13);
}

#[test]
fn square_lattice_zeta_against_double_loop() {
    let brute = |s: f64, n: i64| {
        let mut t = 0.0;
        for m in -n..=n {
            for k in -n..=n {
                if (m, k) != (0, 0) {
                    t += ((m * m + k * k) as f64).powf(-s);
                }
            }
        }
        t
    };
    let z = square_lattice_zeta(6.0, &SumSpec::cutoff(40)).unwrap();
    assert!(rel(z.value, brute(6.0, 40)) < 1e-13);
    // the true remainder is below one ulp here, so allow for rounding
    assert!((brute(6.0, 80) - z.value).abs() <= z.tail_bound + 1e-14 * z.value);

    let a = square_lattice_zeta(2.0, &SumSpec::cutoff(200)).unwrap();
    let b = square_lattice_zeta(2.0, &SumSpec::cutoff(400)).unwrap();
    assert!((a.value - b.value).abs() <= a.tail_bound);
}

#[test]
fn large_anisotropy_approaches_square_lattice() {
    let r = verify_a_to_inf(6.0, &[4.0, 16.0, 64.0]).unwrap();
    assert!(r.strictly_decreasing());
    assert!(r.deviations[2] < 1e-3);
    assert!(r.converged);
}

#[test]
fn large_exponent_approaches_kissing_number() {
    let r = verify_s_to_inf(0.5, &[10.0, 20.0, 50.0]).unwrap();
    assert!(r.converged && r.strictly_decreasing());
    assert!(r.deviations.iter().all(|&d| d > 0.0));
    assert!(r.deviations[2] < 1e-3);
    let l20 = epstein_zeta(&p(0.5), 20.0, &SumSpec::rel_tol(1e-12)).unwrap();
    assert!(rel(l20.value, 8.0190273087) < 1e-9);

    let r1 = verify_s_to_inf(1.0, &[10.0, 20.0]).unwrap();
    assert!(r1.converged);
    let l1 = epstein_zeta(&p(1.0), 20.0, &SumSpec::rel_tol(1e-12)).unwrap();
    assert!(rel(l1.value, 12.0000057) < 1e-7);

    let acc = epstein_zeta(&p(1.0 / 3.0), 20.0, &SumSpec::rel_tol(1e-12)).unwrap();
    assert!(rel(acc.value, 10.00118) < 1e-4);
}

#[test]
fn minimum_norm_by_enumeration_is_one() {
    for a in [1.0 / 3.0, 0.5, FRAC_1_SQRT_2, 1.0] {
        let v = normalization_scale(&p(a));
        assert_relative_eq!(enumerated_minimum_norm(&p(a), v, 3), 1.0, max_relative = 1e-12);
    }
}
