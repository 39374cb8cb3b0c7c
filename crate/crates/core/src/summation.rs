//! Deterministic shell-ordered lattice summation.
//!
//! The cube `max(|i|,|j|,|k|) ≤ N` is split into cubic shells `m = 1..=N`.
//! Shells are evaluated independently (possibly on different rayon workers)
//! and then folded in increasing `m`. Inside a shell the points are visited in
//! lexicographic order. The result therefore does not depend on the number of
//! worker threads.
//!
//! Every summand used by this crate is even (`f(-c) = f(c)`), so only the
//! lexicographically positive half of each shell is visited and the result is
//! doubled, which is exact in binary floating point.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Accumulation {
    Plain,
    #[default]
    Compensated,
}

/// Running sum with optional Neumaier compensation.
#[derive(Debug, Clone, Copy)]
pub struct Accumulator {
    sum: f64,
    comp: f64,
    mode: Accumulation,
}

impl Accumulator {
    pub fn new(mode: Accumulation) -> Self {
        Self {
            sum: 0.0,
            comp: 0.0,
            mode,
        }
    }

    #[inline(always)]
    pub fn add(&mut self, x: f64) {
        match self.mode {
            Accumulation::Plain => self.sum += x,
            Accumulation::Compensated => {
                let t = self.sum + x;
                if self.sum.abs() >= x.abs() {
                    self.comp += (self.sum - t) + x;
                } else {
                    self.comp += (x - t) + self.sum;
                }
                self.sum = t;
            }
        }
    }

    pub fn merge(&mut self, other: &Accumulator) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Result of summing one series over a cube.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesSum {
    pub value: f64,
    /// Sum of absolute values of the retained terms.
    pub abs_value: f64,
    /// Largest retained term in magnitude.
    pub max_term: f64,
    pub term_count: u64,
}

#[derive(Clone, Copy)]
struct ShellSum<const K: usize> {
    acc: [Accumulator; K],
    abs: [f64; K],
    max: [f64; K],
    count: u64,
}

impl<const K: usize> ShellSum<K> {
    fn new(mode: Accumulation) -> Self {
        Self {
            acc: [Accumulator::new(mode); K],
            abs: [0.0; K],
            max: [0.0; K],
            count: 0,
        }
    }

    #[inline(always)]
    fn push(&mut self, t: [f64; K]) {
        for n in 0..K {
            self.acc[n].add(t[n]);
            let a = t[n].abs();
            self.abs[n] += a;
            if a > self.max[n] {
                self.max[n] = a;
            }
        }
        self.count += 1;
    }
}

/// Visit the lexicographically positive half of the cubic shell
/// `max(|i|,|j|,|k|) = m` in lexicographic order.
#[inline(always)]
pub fn for_each_half_shell<F: FnMut(i64, i64, i64)>(m: i64, mut visit: F) {
    debug_assert!(m >= 1);
    visit(0, 0, m);
    for j in 1..=m {
        if j == m {
            for k in -m..=m {
                visit(0, j, k);
            }
        } else {
            visit(0, j, -m);
            visit(0, j, m);
        }
    }
    for i in 1..=m {
        for j in -m..=m {
            if i == m || j == -m || j == m {
                for k in -m..=m {
                    visit(i, j, k);
                }
            } else {
                visit(i, j, -m);
                visit(i, j, m);
            }
        }
    }
}

/// Sum `K` even series simultaneously over `0 < max|cᵢ| ≤ cutoff`.
pub fn cube_sum<const K: usize, F>(cutoff: u32, mode: Accumulation, term: F) -> [SeriesSum; K]
where
    F: Fn(i64, i64, i64) -> [f64; K] + Sync,
{
    let shells: Vec<ShellSum<K>> = (1..=cutoff as i64)
        .into_par_iter()
        .map(|m| {
            let mut shell = ShellSum::<K>::new(mode);
            for_each_half_shell(m, |i, j, k| shell.push(term(i, j, k)));
            shell
        })
        .collect();
    fold_shells(shells, mode)
}

/// Visit the lexicographically positive half of the square shell
/// `max(|m|,|n|) = r` in lexicographic order.
#[inline(always)]
pub fn for_each_half_ring<F: FnMut(i64, i64)>(r: i64, mut visit: F) {
    debug_assert!(r >= 1);
    visit(0, r);
    for m in 1..=r {
        if m == r {
            for n in -r..=r {
                visit(m, n);
            }
        } else {
            visit(m, -r);
            visit(m, r);
        }
    }
}

/// Sum an even two-dimensional series over `0 < max(|m|,|n|) ≤ cutoff`.
pub fn square_sum<F>(cutoff: u32, mode: Accumulation, term: F) -> SeriesSum
where
    F: Fn(i64, i64) -> f64 + Sync,
{
    let shells: Vec<ShellSum<1>> = (1..=cutoff as i64)
        .into_par_iter()
        .map(|r| {
            let mut shell = ShellSum::<1>::new(mode);
            for_each_half_ring(r, |m, n| shell.push([term(m, n)]));
            shell
        })
        .collect();
    fold_shells(shells, mode)[0]
}

fn fold_shells<const K: usize>(shells: Vec<ShellSum<K>>, mode: Accumulation) -> [SeriesSum; K] {
    let mut total = [Accumulator::new(mode); K];
    let mut abs = [Accumulator::new(mode); K];
    let mut max = [0.0f64; K];
    let mut count = 0u64;
    for shell in &shells {
        for n in 0..K {
            total[n].merge(&shell.acc[n]);
            abs[n].add(shell.abs[n]);
            max[n] = max[n].max(shell.max[n]);
        }
        count += shell.count;
    }
    std::array::from_fn(|n| SeriesSum {
        value: 2.0 * total[n].value(),
        abs_value: 2.0 * abs[n].value(),
        max_term: max[n],
        term_count: 2 * count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn half_shell_is_half_of_the_shell() {
        for m in 1..=6i64 {
            let mut seen = Vec::new();
            for_each_half_shell(m, |i, j, k| seen.push((i, j, k)));
            let full = (2 * m + 1).pow(3) - (2 * m - 1).pow(3);
            assert_eq!(seen.len() as i64, full / 2);
            let set: HashSet<_> = seen.iter().copied().collect();
            assert_eq!(set.len(), seen.len());
            for &(i, j, k) in &seen {
                assert_eq!(i.abs().max(j.abs()).max(k.abs()), m);
                assert!((i, j, k) > (0, 0, 0));
                assert!(!set.contains(&(-i, -j, -k)));
            }
            let mut sorted = seen.clone();
            sorted.sort();
            assert_eq!(sorted, seen, "lexicographic order");
        }
    }

    #[test]
    fn half_ring_is_half_of_the_ring() {
        for r in 1..=6i64 {
            let mut seen = Vec::new();
            for_each_half_ring(r, |m, n| seen.push((m, n)));
            assert_eq!(seen.len() as i64, 4 * r);
            let mut sorted = seen.clone();
            sorted.sort();
            assert_eq!(sorted, seen);
            for &(m, n) in &seen {
                assert_eq!(m.abs().max(n.abs()), r);
                assert!((m, n) > (0, 0));
            }
        }
    }

    #[test]
    fn cube_sum_counts_and_brute_force() {
        let n = 7;
        let f = |i: i64, j: i64, k: i64| [1.0 / ((i * i + 2 * j * j + 3 * k * k) as f64)];
        let [s] = cube_sum(n, Accumulation::Compensated, f);
        assert_eq!(s.term_count, (2 * n as u64 + 1).pow(3) - 1);
        let mut brute = 0.0;
        let r = -(n as i64)..=(n as i64);
        for i in r.clone() {
            for j in r.clone() {
                for k in r.clone() {
                    if (i, j, k) != (0, 0, 0) {
                        brute += f(i, j, k)[0];
                    }
                }
            }
        }
        assert!((s.value - brute).abs() < 1e-12 * brute);
        assert!((s.abs_value - s.value).abs() < 1e-13 * s.value);
        assert_eq!(s.max_term, 1.0);
    }

    #[test]
    fn compensation_beats_plain_on_cancellation() {
        let mut plain = Accumulator::new(Accumulation::Plain);
        let mut comp = Accumulator::new(Accumulation::Compensated);
        for x in [1.0, 1e100, 1.0, -1e100] {
            plain.add(x);
            comp.add(x);
        }
        assert_eq!(comp.value(), 2.0);
        assert_eq!(plain.value(), 0.0);
    }

    #[test]
    fn worker_count_does_not_change_bits() {
        let f = |i: i64, j: i64, k: i64| [((i * i + j * j + k * k) as f64).powf(-1.7)];
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| cube_sum(30, Accumulation::Compensated, f));
        let b = four.install(|| cube_sum(30, Accumulation::Compensated, f));
        assert_eq!(a[0].value.to_bits(), b[0].value.to_bits());
    }
}
