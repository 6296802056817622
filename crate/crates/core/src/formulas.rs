//! Closed-form evaluations built on graph and representation spectra: the
//! full-cycle product formula, expected `k`-cycle counts, the exponential
//! convergence bound, the matrix-tree identity and equilibration times.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::characters::a_rho_closed_form;
use crate::error::{capability, domain, Error, Result};
use crate::partitions::binomial;
use crate::spectra::{
    hook_eigenvalues_bacher, irrep_laplacian_eigenvalues, laplacian_eigenvalues, torus_eigenvalues, WeightedGraph,
};

/// Largest `n` accepted by [`expected_k_cycles`].
pub const MAX_EXPECTATION_N: usize = 12;
/// Largest `n` for which spanning trees are enumerated.
pub const MAX_TREE_N: usize = 9;
/// Largest hypercube dimension for the closed-form profile.
pub const MAX_HYPERCUBE_D: usize = 40;
/// Relative precision of the equilibration-time bisection.
pub const EQUILIBRATION_PRECISION: f64 = 1e-6;

/// Strictly increasing, finite, nonnegative process times.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return domain("time grid is empty");
        }
        for &t in &times {
            if !t.is_finite() || t < 0.0 {
                return domain(format!("time {t} is not a finite nonnegative number"));
            }
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return domain("times must be strictly increasing");
        }
        Ok(TimeGrid { times })
    }

    pub fn single(t: f64) -> Result<Self> {
        Self::new(vec![t])
    }

    /// `count` evenly spaced points from `start` to `stop` inclusive.
    pub fn linear(start: f64, stop: f64, count: usize) -> Result<Self> {
        match count {
            0 => domain("grid needs at least one point"),
            1 => Self::new(vec![start]),
            _ => {
                let step = (stop - start) / (count - 1) as f64;
                Self::new((0..count).map(|i| start + step * i as f64).collect())
            }
        }
    }

    /// `count` geometrically spaced points from `start` to `stop` inclusive.
    pub fn logarithmic(start: f64, stop: f64, count: usize) -> Result<Self> {
        if !(start > 0.0 && stop > 0.0) {
            return domain("log grid endpoints must be positive");
        }
        match count {
            0 => domain("grid needs at least one point"),
            1 => Self::new(vec![start]),
            _ => {
                let (a, b) = (start.ln(), stop.ln());
                let step = (b - a) / (count - 1) as f64;
                let mut times: Vec<f64> = (0..count).map(|i| (a + step * i as f64).exp()).collect();
                times[0] = start;
                times[count - 1] = stop;
                Self::new(times)
            }
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Accepts `a,b,c`, `lin:start:stop:count` or `log:start:stop:count`.
impl FromStr for TimeGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::Domain(format!("bad time grid `{s}`: {msg}"));
        let num = |v: &str| v.trim().parse::<f64>().map_err(|e| bad(format!("`{v}`: {e}")));
        if let Some(rest) = s.strip_prefix("lin:").or_else(|| s.strip_prefix("log:")) {
            let fields: Vec<&str> = rest.split(':').collect();
            if fields.len() != 3 {
                return Err(bad("expected start:stop:count".into()));
            }
            let (start, stop) = (num(fields[0])?, num(fields[1])?);
            let count: usize = fields[2].trim().parse().map_err(|e| bad(format!("count: {e}")))?;
            return if s.starts_with("lin:") {
                Self::linear(start, stop, count)
            } else {
                Self::logarithmic(start, stop, count)
            };
        }
        let times = s.split(',').map(num).collect::<Result<Vec<f64>>>()?;
        Self::new(times)
    }
}

/// Values of some function of time on a grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Series {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl Series {
    pub fn new(grid: &TimeGrid, f: impl FnMut(f64) -> f64) -> Self {
        Series { times: grid.times.clone(), values: grid.times.iter().copied().map(f).collect() }
    }

    /// `t,value` rows under a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,value\n");
        for (t, v) in self.times.iter().zip(&self.values) {
            let _ = writeln!(s, "{t},{v}");
        }
        s
    }
}

/// `ln(1 - e^{-x})` for `x >= 0`, `-inf` at zero.
fn log_one_minus_exp_neg(x: f64) -> f64 {
    if x <= 0.0 {
        f64::NEG_INFINITY
    } else if x < std::f64::consts::LN_2 {
        (-(-x).exp_m1()).ln()
    } else {
        (-(-x).exp()).ln_1p()
    }
}

/// `(1/n) Π_{i>=1} (1 - e^{-λ_i t})` from the sorted spectrum `λ_0 <= λ_1 <= …`.
pub fn prob_full_cycle_from_spectrum(eigs: &[f64], t: f64) -> f64 {
    let n = eigs.len();
    let log: f64 = eigs.iter().skip(1).map(|&l| log_one_minus_exp_neg(l * t)).sum();
    log.exp() / n as f64
}

/// Probability that the interchange process is a single `n`-cycle at time `t`.
pub fn prob_full_cycle(graph: &WeightedGraph, t: f64) -> f64 {
    prob_full_cycle_from_spectrum(&laplacian_eigenvalues(graph), t)
}

/// The same probability as an alternating sum over hook representations,
/// each traced through its subset-sum spectrum.
pub fn full_cycle_hook_sum(eigs: &[f64], t: f64) -> Result<f64> {
    let n = eigs.len();
    if n > crate::partitions::MAX_N {
        return capability(format!("hook-sum replay enumerates 2^(n-1) subsets; n={n} is too large"));
    }
    let mut total = 0.0;
    for i in 0..n {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let trace: f64 = hook_eigenvalues_bacher(&eigs[1..], i)?.iter().map(|l| (-t * l).exp()).sum();
        total += sign * trace;
    }
    Ok(total / n as f64)
}

/// Spectra of the representations entering `E s_k`, computed once and
/// reusable across times.
#[derive(Clone, Debug)]
pub struct KCycleSpectra {
    n: usize,
    k: usize,
    lambda1: f64,
    terms: Vec<(i32, Vec<f64>)>,
}

impl KCycleSpectra {
    pub fn new(graph: &WeightedGraph, k: usize) -> Result<Self> {
        let n = graph.n();
        if n > MAX_EXPECTATION_N {
            return capability(format!("expected k-cycle counts are limited to n <= {MAX_EXPECTATION_N}, got n={n}"));
        }
        let eigs = laplacian_eigenvalues(graph);
        let mut terms = Vec::new();
        for (rho, a) in a_rho_closed_form(n, k)? {
            let spectrum = if rho.is_hook() {
                hook_eigenvalues_bacher(&eigs[1..], rho.len() - 1)?
            } else {
                irrep_laplacian_eigenvalues(graph, &rho)?.eigenvalues
            };
            terms.push((a, spectrum));
        }
        Ok(KCycleSpectra { n, k, lambda1: eigs.get(1).copied().unwrap_or(0.0), terms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Spectral gap of the graph.
    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    /// `E s_k(t) = (1/k) Σ_ρ a_ρ Σ_j e^{-t λ_j(ρ)}`.
    pub fn expectation(&self, t: f64) -> f64 {
        let sum: f64 = self
            .terms
            .iter()
            .map(|(a, eigs)| *a as f64 * eigs.iter().map(|l| (-t * l).exp()).sum::<f64>())
            .sum();
        sum / self.k as f64
    }
}

/// Expected number of `k`-cycles at time `t`.
pub fn expected_k_cycles(graph: &WeightedGraph, k: usize, t: f64) -> Result<f64> {
    Ok(KCycleSpectra::new(graph, k)?.expectation(t))
}

/// `(3^n / k) e^{-t λ_1}`, the bound on `|E s_k(t) - 1/k|`.
pub fn chuk_bound(n: usize, k: usize, t: f64, lambda1: f64) -> f64 {
    let direct = 3f64.powi(n as i32) / k as f64 * (-t * lambda1).exp();
    if direct.is_finite() {
        direct
    } else {
        (n as f64 * 3f64.ln() - (k as f64).ln() - t * lambda1).exp()
    }
}

/// Both sides of the weighted matrix-tree identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatrixTreeCheck {
    /// `(1/n) Π_{i>=1} λ_i`.
    pub spectral: f64,
    /// `Σ_T Π_{e∈T} a_e` over spanning trees, absent past [`MAX_TREE_N`].
    pub tree_sum: Option<f64>,
}

impl MatrixTreeCheck {
    pub fn relative_gap(&self) -> Option<f64> {
        self.tree_sum.map(|s| {
            let scale = s.abs().max(self.spectral.abs());
            if scale == 0.0 {
                0.0
            } else {
                (s - self.spectral).abs() / scale
            }
        })
    }
}

pub fn matrix_tree_check(graph: &WeightedGraph) -> MatrixTreeCheck {
    let eigs = laplacian_eigenvalues(graph);
    let spectral = eigs.iter().skip(1).product::<f64>() / graph.n() as f64;
    let tree_sum = (graph.n() <= MAX_TREE_N).then(|| spanning_tree_sum(graph));
    MatrixTreeCheck { spectral, tree_sum }
}

/// Sum of edge-weight products over all spanning trees, by enumerating
/// forests edge by edge.
pub fn spanning_tree_sum(graph: &WeightedGraph) -> f64 {
    let n = graph.n();
    if n == 1 {
        return 1.0;
    }
    let edges = graph.edges();
    fn find(label: &[usize], mut x: usize) -> usize {
        while label[x] != x {
            x = label[x];
        }
        x
    }
    fn rec(edges: &[crate::spectra::Edge], idx: usize, needed: usize, label: &mut Vec<usize>, weight: f64) -> f64 {
        if needed == 0 {
            return weight;
        }
        if edges.len() - idx < needed {
            return 0.0;
        }
        let e = edges[idx];
        let mut total = rec(edges, idx + 1, needed, label, weight);
        let (a, b) = (find(label, e.i), find(label, e.j));
        if a != b {
            label[a] = b;
            total += rec(edges, idx + 1, needed - 1, label, weight * e.w);
            label[a] = a;
        }
        total
    }
    let mut label: Vec<usize> = (0..n).collect();
    rec(edges, 0, n - 1, &mut label, 1.0)
}

/// `ln P(s_n(t) = 1)` on the `d`-cube: eigenvalue `2k` has multiplicity
/// `C(d, k)`.
pub fn hypercube_log_prob(d: usize, t: f64) -> Result<f64> {
    if d == 0 || d > MAX_HYPERCUBE_D {
        return domain(format!("hypercube dimension must be in 1..={MAX_HYPERCUBE_D}, got {d}"));
    }
    let mut log = -(d as f64) * std::f64::consts::LN_2;
    for k in 1..=d {
        log += binomial(d, k) as f64 * log_one_minus_exp_neg(2.0 * k as f64 * t);
    }
    Ok(log)
}

pub fn hypercube_prob_profile(d: usize, times: &TimeGrid) -> Result<Vec<f64>> {
    times.times().iter().map(|&t| hypercube_log_prob(d, t).map(f64::exp)).collect()
}

fn check_fraction(fraction: f64) -> Result<()> {
    if fraction > 0.0 && fraction < 1.0 {
        Ok(())
    } else {
        domain(format!("threshold fraction must lie in (0, 1), got {fraction}"))
    }
}

/// `min{t : P(s_n(t) = 1) >= fraction / n}` from a sorted spectrum;
/// infinite when the graph is disconnected.
pub fn equilibration_time_from_spectrum(eigs: &[f64], fraction: f64) -> Result<f64> {
    check_fraction(fraction)?;
    let n = eigs.len();
    if n <= 1 {
        return Ok(0.0);
    }
    let gap = eigs[1];
    if gap <= 0.0 {
        return Ok(f64::INFINITY);
    }
    let target = fraction / n as f64;
    let p = |t: f64| prob_full_cycle_from_spectrum(eigs, t);
    let (mut lo, mut hi) = (0.0, 64.0 / gap);
    while p(hi) < target {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > EQUILIBRATION_PRECISION * hi {
        let mid = 0.5 * (lo + hi);
        if p(mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

pub fn equilibration_time(graph: &WeightedGraph, fraction: f64) -> Result<f64> {
    equilibration_time_from_spectrum(&laplacian_eigenvalues(graph), fraction)
}

/// Equilibration time of the discrete torus `(Z/side)^dim` from its
/// closed-form spectrum.
pub fn torus_equilibration_time(side: usize, dim: usize, fraction: f64) -> Result<f64> {
    if side < 3 || dim == 0 {
        return domain(format!("torus needs side >= 3 and dim >= 1, got {side}:{dim}"));
    }
    equilibration_time_from_spectrum(&torus_eigenvalues(side, dim), fraction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{build_graph, GraphSpec};
    use proptest::prelude::*;

    fn complete(n: usize) -> WeightedGraph {
        build_graph(&GraphSpec::Complete { n, weight: 1.0 }).unwrap()
    }

    #[test]
    fn time_grid_parsing() {
        assert_eq!("0.1,1,10".parse::<TimeGrid>().unwrap().times(), &[0.1, 1.0, 10.0]);
        assert_eq!("lin:0:1:5".parse::<TimeGrid>().unwrap().times(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        let log: TimeGrid = "log:0.01:100:5".parse().unwrap();
        assert_eq!(log.times()[0], 0.01);
        assert_eq!(log.times()[4], 100.0);
        assert!((log.times()[2] - 1.0).abs() < 1e-12);
        for bad in ["", "1,1", "2,1", "-1", "nan", "lin:0:1", "log:0:1:3", "lin:0:1:0", "x"] {
            assert!(bad.parse::<TimeGrid>().is_err(), "{bad}");
        }
    }

    #[test]
    fn full_cycle_examples() {
        for n in 2..=6 {
            assert_eq!(prob_full_cycle(&complete(n), 0.0), 0.0);
        }
        let k4 = complete(4);
        let expected = 0.25 * (1.0 - (-4.0f64).exp()).powi(3);
        assert!((prob_full_cycle(&k4, 1.0) - expected).abs() < 1e-14);
        let g = WeightedGraph::random_connected(5, 9).unwrap();
        let gap = laplacian_eigenvalues(&g)[1];
        assert!((prob_full_cycle(&g, 1e6 / gap) - 0.2).abs() < 1e-15);
        let split = WeightedGraph::new(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert_eq!(prob_full_cycle(&split, 10.0), 0.0);
    }

    #[test]
    fn expectation_examples() {
        for seed in 0..3 {
            for n in 2..=6 {
                let g = WeightedGraph::random_connected(n, seed * 10 + n as u64).unwrap();
                let gap = laplacian_eigenvalues(&g)[1];
                for k in 1..=n {
                    let s = KCycleSpectra::new(&g, k).unwrap();
                    let at_zero = s.expectation(0.0);
                    let want = if k == 1 { n as f64 } else { 0.0 };
                    assert!((at_zero - want).abs() < 1e-9, "n={n} k={k}: {at_zero}");
                    assert!((s.expectation(40.0 / gap) - 1.0 / k as f64).abs() < 1e-8);
                }
                for t in [0.1, 1.0, 10.0] {
                    let e = expected_k_cycles(&g, n, t).unwrap();
                    assert!((e - prob_full_cycle(&g, t)).abs() < 1e-10);
                }
            }
        }
        let big = build_graph(&GraphSpec::Path { n: 13 }).unwrap();
        assert!(matches!(expected_k_cycles(&big, 2, 1.0), Err(Error::Capability(_))));
    }

    #[test]
    fn expected_cycle_counts_sum_to_n() {
        let g = WeightedGraph::random_connected(6, 5).unwrap();
        for t in [0.05, 0.7, 3.0] {
            let total: f64 = (1..=6).map(|k| k as f64 * expected_k_cycles(&g, k, t).unwrap()).sum();
            assert!((total - 6.0).abs() < 1e-9);
        }
    }

    #[test]
    fn hook_sum_replay_matches_product() {
        for n in 2..=8 {
            let g = WeightedGraph::random_connected(n, 77 + n as u64).unwrap();
            let eigs = laplacian_eigenvalues(&g);
            for t in [0.1, 1.0, 10.0] {
                let replay = full_cycle_hook_sum(&eigs, t).unwrap();
                assert!((replay - prob_full_cycle_from_spectrum(&eigs, t)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn bound_examples() {
        assert_eq!(chuk_bound(5, 2, 0.0, 1.0), 121.5);
        assert!((chuk_bound(700, 1, 700.0, 3f64.ln()) - 1.0).abs() < 1e-9);
        let t = 5.0 * 3f64.ln() / 2.0;
        assert!((chuk_bound(5, 3, t, 2.0) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn bound_holds_on_random_graphs() {
        for seed in 0..50u64 {
            let n = 2 + (seed as usize % 6);
            let g = WeightedGraph::random_connected(n, 1000 + seed).unwrap();
            for k in 1..=n {
                let s = KCycleSpectra::new(&g, k).unwrap();
                for t in [0.1, 1.0, 5.0] {
                    let gap = (s.expectation(t) - 1.0 / k as f64).abs();
                    assert!(gap <= chuk_bound(n, k, t, s.lambda1()), "seed {seed} k={k} t={t}");
                }
            }
        }
    }

    #[test]
    fn matrix_tree_examples() {
        let triangle = build_graph(&GraphSpec::Cycle { n: 3 }).unwrap();
        let c = matrix_tree_check(&triangle);
        assert!((c.spectral - 3.0).abs() < 1e-12);
        assert_eq!(c.tree_sum, Some(3.0));
        let path = build_graph(&GraphSpec::Path { n: 3 }).unwrap();
        let c = matrix_tree_check(&path);
        assert!((c.spectral - 1.0).abs() < 1e-12);
        assert_eq!(c.tree_sum, Some(1.0));
        let c = matrix_tree_check(&complete(4));
        assert!((c.spectral - 16.0).abs() < 1e-10);
        assert_eq!(c.tree_sum, Some(16.0));
        assert_eq!(spanning_tree_sum(&complete(6)), 1296.0);
        assert_eq!(matrix_tree_check(&complete(10)).tree_sum, None);
        let split = WeightedGraph::new(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let c = matrix_tree_check(&split);
        assert_eq!(c.tree_sum, Some(0.0));
        assert_eq!(c.spectral, 0.0);
    }

    #[test]
    fn small_time_limit_is_the_tree_sum() {
        for n in 2..=5 {
            let g = WeightedGraph::random_connected(n, 500 + n as u64).unwrap();
            let t = 1e-4;
            let ratio = prob_full_cycle(&g, t) / t.powi(n as i32 - 1);
            let trees = spanning_tree_sum(&g);
            assert!((ratio / trees - 1.0).abs() < 0.01, "n={n}: {ratio} vs {trees}");
        }
    }

    #[test]
    fn hypercube_examples() {
        let p = hypercube_prob_profile(3, &TimeGrid::single(10.0).unwrap()).unwrap();
        assert!((p[0] - 0.125).abs() < 1e-6);
        let cube = build_graph(&GraphSpec::Hypercube { d: 3 }).unwrap();
        let grid: TimeGrid = "0,0.05,0.3,1,4".parse().unwrap();
        for (t, v) in grid.times().iter().zip(hypercube_prob_profile(3, &grid).unwrap()) {
            assert!((v - prob_full_cycle(&cube, *t)).abs() < 1e-10);
        }
        let d = 20usize;
        let ln_d = (d as f64).ln();
        let scaled = |t: f64| (hypercube_log_prob(d, t).unwrap() + d as f64 * std::f64::consts::LN_2).exp();
        // reference values from an independent float evaluation of the product
        assert!((scaled(0.4 * ln_d) - 0.008178445517621997).abs() < 1e-12);
        assert!((scaled(0.6 * ln_d) - 0.4833753605382176).abs() < 1e-12);
        assert!(scaled(0.3 * ln_d) < 1e-9);
        assert!(hypercube_log_prob(41, 1.0).is_err());
        assert!(hypercube_log_prob(40, 1.0).unwrap().is_finite());
    }

    #[test]
    fn equilibration_examples() {
        let t = equilibration_time(&complete(4), 0.5).unwrap();
        let want = -(1.0 - 2f64.powf(-1.0 / 3.0)).ln() / 4.0;
        assert!((t - want).abs() <= 2e-6 * want, "{t} vs {want}");
        let edge = WeightedGraph::new(2, [(0, 1, 0.3)]).unwrap();
        let want = 2f64.ln() / 0.6;
        assert!((equilibration_time(&edge, 0.5).unwrap() - want).abs() <= 2e-6 * want);
        let split = WeightedGraph::new(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert_eq!(equilibration_time(&split, 0.5).unwrap(), f64::INFINITY);
        assert!(equilibration_time(&edge, 1.0).is_err());
        assert!(equilibration_time(&edge, 0.0).is_err());
    }

    #[test]
    fn torus_equilibration_matches_graph_route() {
        let torus = build_graph(&GraphSpec::Torus { side: 4, dim: 2 }).unwrap();
        let a = equilibration_time(&torus, 0.5).unwrap();
        let b = torus_equilibration_time(4, 2, 0.5).unwrap();
        assert!((a - b).abs() <= 1e-5 * a);
    }

    #[test]
    fn torus_equilibration_scales_with_area() {
        let ratios: Vec<f64> = [5usize, 7, 9, 11]
            .iter()
            .map(|&m| torus_equilibration_time(m, 3, 0.5).unwrap() / (m * m) as f64)
            .collect();
        let (lo, hi) = ratios.iter().fold((f64::MAX, 0.0f64), |(lo, hi), &r| (lo.min(r), hi.max(r)));
        assert!(hi / lo <= 2.0, "{ratios:?}");
    }

    proptest! {
        #[test]
        fn full_cycle_probability_is_monotone(seed in 0u64..1000, n in 2usize..8) {
            let g = WeightedGraph::random_connected(n, seed).unwrap();
            let eigs = laplacian_eigenvalues(&g);
            let mut prev = 0.0;
            for i in 0..60 {
                let p = prob_full_cycle_from_spectrum(&eigs, 0.05 * i as f64);
                prop_assert!(p >= prev);
                prop_assert!(p <= 1.0 / n as f64);
                prev = p;
            }
        }
    }
}
