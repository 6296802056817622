//! The invariant suite behind `verify`: exact combinatorial identities,
//! spectral identities and formula consistency over a fixed set of test
//! graphs. Output depends only on `n_max`.

use std::fmt::Write as _;

use serde::Serialize;

use crate::characters::{
    a_rho_closed_form, alpha_k, alpha_k_coefficients, character_table, decompose, inner_product, nonzero_k_by_shape,
    psi_inner_product, ClassFunction, MAX_TABLE_N,
};
use crate::error::{capability, Result};
use crate::exact::{int, Rational};
use crate::formulas::{chuk_bound, full_cycle_hook_sum, matrix_tree_check, prob_full_cycle_from_spectrum, KCycleSpectra};
use crate::mc::cycle_observables;
use crate::partitions::{dominates, enumerate_partitions, factorial, Partition};
use crate::spectra::{
    build_graph, hook_eigenvalues_bacher, irrep_laplacian_eigenvalues, laplacian_eigenvalues, max_gap,
    permutation_module_spectrum, youngs_rule_spectrum, GraphSpec, OrthogonalForm, WeightedGraph,
    DEFAULT_DIMENSION_CAP,
};
use crate::symfun::{ch_alpha_k, derive_a_rho_via_pieri, kostka, monomial_to_schur};

/// Largest `n_max` accepted by [`run_suite`].
pub const MAX_VERIFY_N: usize = MAX_TABLE_N;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    /// Largest `n` exercised.
    pub n_max: usize,
    pub passed: bool,
    pub detail: String,
}

/// Connected test graphs on `n` vertices: complete, path, cycle, hypercube
/// when `n` is a power of two, and two random weighted graphs.
pub fn test_graphs(n: usize) -> Vec<(String, WeightedGraph)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut specs = vec![GraphSpec::Complete { n, weight: 1.0 }, GraphSpec::Path { n }];
    if n >= 3 {
        specs.push(GraphSpec::Cycle { n });
    }
    if n.is_power_of_two() && n >= 4 {
        specs.push(GraphSpec::Hypercube { d: n.trailing_zeros() as usize });
    }
    for spec in specs {
        out.push((spec.to_string(), build_graph(&spec).expect("builder specs are valid")));
    }
    for seed in [1, 2] {
        let seed = 1000 * n as u64 + seed;
        out.push((format!("random:{n}:{seed}"), WeightedGraph::random_connected(n, seed).expect("n >= 2")));
    }
    out
}

struct Suite {
    n_max: usize,
    results: Vec<CheckResult>,
}

impl Suite {
    /// Runs `body` for every `n` in `from..=min(cap, n_max)`; it returns the
    /// worst error seen or a failure message.
    fn check(
        &mut self,
        name: &'static str,
        from: usize,
        cap: usize,
        mut body: impl FnMut(usize) -> Result<std::result::Result<f64, String>>,
    ) {
        let top = cap.min(self.n_max);
        let mut worst: f64 = 0.0;
        let mut failure = None;
        for n in from..=top {
            match body(n) {
                Ok(Ok(err)) => worst = worst.max(err),
                Ok(Err(msg)) => {
                    failure = Some(format!("n={n}: {msg}"));
                    break;
                }
                Err(e) => {
                    failure = Some(format!("n={n}: {e}"));
                    break;
                }
            }
        }
        let (passed, detail) = match failure {
            Some(msg) => (false, msg),
            None if top < from => (true, "skipped".to_string()),
            None if worst == 0.0 => (true, "exact".to_string()),
            None => (true, format!("max err {worst:.2e}")),
        };
        self.results.push(CheckResult { name, n_max: top, passed, detail });
    }
}

fn within(err: f64, tol: f64, what: &str) -> std::result::Result<f64, String> {
    if err <= tol {
        Ok(err)
    } else {
        Err(format!("{what}: error {err:.3e} exceeds {tol:.0e}"))
    }
}

fn exact(ok: bool, what: impl FnOnce() -> String) -> std::result::Result<f64, String> {
    if ok {
        Ok(0.0)
    } else {
        Err(what())
    }
}

/// Runs every check for `1 <= n <= n_max`.
pub fn run_suite(n_max: usize) -> Result<Vec<CheckResult>> {
    if n_max == 0 || n_max > MAX_VERIFY_N {
        return capability(format!("verify supports 1 <= n-max <= {MAX_VERIFY_N}, got {n_max}"));
    }
    let mut s = Suite { n_max, results: Vec::new() };

    s.check("class sizes sum to n!", 1, 10, |n| {
        let total: u128 = enumerate_partitions(n)?.iter().map(|p| p.class_size()).sum();
        Ok(exact(total == factorial(n)?, || format!("sum {total}")))
    });
    s.check("squared dimensions sum to n!", 1, 10, |n| {
        let total: u128 = enumerate_partitions(n)?.iter().map(|p| p.dimension().pow(2)).sum();
        Ok(exact(total == factorial(n)?, || format!("sum {total}")))
    });
    s.check("dominance is a partial order", 1, 8, |n| {
        let ps = enumerate_partitions(n)?;
        for a in &ps {
            if !dominates(a, a)? {
                return Ok(Err(format!("{a} not reflexive")));
            }
            for b in &ps {
                if a != b && dominates(a, b)? && dominates(b, a)? {
                    return Ok(Err(format!("{a} and {b} dominate each other")));
                }
                for c in &ps {
                    if dominates(a, b)? && dominates(b, c)? && !dominates(a, c)? {
                        return Ok(Err(format!("{a} >= {b} >= {c} but not {a} >= {c}")));
                    }
                }
            }
        }
        Ok(Ok(0.0))
    });
    s.check("kostka matrix unitriangular", 1, 8, |n| {
        let ps = enumerate_partitions(n)?;
        for (i, mu) in ps.iter().enumerate() {
            for (j, lambda) in ps.iter().enumerate() {
                let k = kostka(mu, lambda)?;
                if (i == j && k != 1) || (i > j && k != 0) {
                    return Ok(Err(format!("K({mu},{lambda}) = {k}")));
                }
            }
        }
        Ok(Ok(0.0))
    });
    s.check("character orthogonality", 1, MAX_TABLE_N, |n| {
        let table = character_table(n)?;
        let order = factorial(n)? as i128;
        let sizes: Vec<i128> = table.partitions.iter().map(|p| p.class_size() as i128).collect();
        let m = sizes.len();
        for a in 0..m {
            for b in 0..m {
                let rows: i128 = (0..m).map(|c| sizes[c] * table.values[a][c] * table.values[b][c]).sum();
                let cols: i128 = (0..m).map(|r| table.values[r][a] * table.values[r][b]).sum();
                let want_rows = if a == b { order } else { 0 };
                let want_cols = if a == b { order / sizes[a] } else { 0 };
                if rows != want_rows || cols != want_cols {
                    return Ok(Err(format!("pair ({a},{b})")));
                }
            }
        }
        Ok(Ok(0.0))
    });
    s.check("closed-form coefficients = decomposition", 1, MAX_TABLE_N, |n| {
        for k in 1..=n {
            if decompose(&alpha_k(n, k)?)? != alpha_k_coefficients(n, k)? {
                return Ok(Err(format!("k={k}")));
            }
        }
        Ok(Ok(0.0))
    });
    s.check("closed-form coefficients = Pieri expansion", 1, MAX_TABLE_N, |n| {
        for k in 1..=n {
            let pieri = derive_a_rho_via_pieri(n, k)?;
            let closed = a_rho_closed_form(n, k)?;
            let same = pieri.len() == closed.len() && closed.iter().all(|(rho, a)| pieri.coeff(rho) == int(*a as i128));
            if !same {
                return Ok(Err(format!("k={k}")));
            }
            let via_ch = monomial_to_schur(&ch_alpha_k(n, k)?)?.scale(int(k as i128));
            if via_ch != pieri {
                return Ok(Err(format!("k={k}: Frobenius route differs")));
            }
        }
        Ok(Ok(0.0))
    });
    s.check("Young's rule on cycle counts", 1, 7, |n| {
        for k in 1..=n {
            let f = alpha_k(n, k)?;
            for lambda in enumerate_partitions(n)? {
                let mut rhs = Rational::from_integer(0);
                for mu in enumerate_partitions(n)? {
                    let kk = kostka(&mu, &lambda)?;
                    if kk != 0 {
                        rhs += int(kk as i128) * inner_product(&f, &ClassFunction::character(&mu)?)?;
                    }
                }
                if psi_inner_product(&f, &lambda)? != rhs {
                    return Ok(Err(format!("k={k}, lambda={lambda}")));
                }
            }
        }
        Ok(Ok(0.0))
    });
    s.check("two-row hooks occur for two k of opposite sign", 2, MAX_TABLE_N, |n| {
        for (rho, ks) in nonzero_k_by_shape(n)? {
            if ks.len() != 2 || ks[0].1 != -ks[1].1 {
                return Ok(Err(format!("{rho}: {ks:?}")));
            }
        }
        Ok(Ok(0.0))
    });
    s.check("orthogonal form: orthogonal involutions", 2, 7, |n| {
        let mut worst: f64 = 0.0;
        for rho in enumerate_partitions(n)? {
            let form = OrthogonalForm::new(&rho, DEFAULT_DIMENSION_CAP)?;
            let id = crate::linalg::Matrix::identity(form.dim());
            for i in 0..n {
                for j in (i + 1)..n {
                    let u = form.transposition(i, j);
                    worst = worst.max(u.transpose().mul(&u).max_abs_diff(&id));
                    worst = worst.max(u.mul(&u).max_abs_diff(&id));
                }
            }
        }
        Ok(within(worst, 1e-10, "U^T U = U^2 = I"))
    });
    s.check("hook spectra match subset sums", 2, 7, |n| {
        let mut worst: f64 = 0.0;
        for (name, g) in test_graphs(n) {
            let eigs = laplacian_eigenvalues(&g);
            for i in 0..n {
                let yor = irrep_laplacian_eigenvalues(&g, &Partition::hook(n, i)?)?.eigenvalues;
                let bacher = hook_eigenvalues_bacher(&eigs[1..], i)?;
                let err = max_gap(&yor, &bacher);
                if err > 1e-8 {
                    return Ok(Err(format!("{name}, i={i}: {err:.3e}")));
                }
                worst = worst.max(err);
            }
        }
        Ok(Ok(worst))
    });
    // the direct side diagonalizes matrices of size up to n!, so only the
    // two random graphs are used here
    s.check("permutation modules follow Young's rule", 2, 6, |n| {
        let mut worst: f64 = 0.0;
        for (name, g) in test_graphs(n).into_iter().filter(|(name, _)| name.starts_with("random")) {
            for lambda in enumerate_partitions(n)? {
                let direct = permutation_module_spectrum(&lambda, &g, 1000)?;
                let err = max_gap(&direct, &youngs_rule_spectrum(&lambda, &g)?);
                if err > 1e-8 {
                    return Ok(Err(format!("{name}, {lambda}: {err:.3e}")));
                }
                worst = worst.max(err);
            }
        }
        Ok(Ok(worst))
    });
    s.check("spectral gap bounds every nontrivial irrep", 2, 7, |n| {
        for (name, g) in test_graphs(n) {
            let gap = laplacian_eigenvalues(&g)[1];
            for rho in enumerate_partitions(n)?.into_iter().skip(1) {
                let min = irrep_laplacian_eigenvalues(&g, &rho)?.eigenvalues[0];
                if min < gap - 1e-8 {
                    return Ok(Err(format!("{name}, {rho}: {min} < {gap}")));
                }
            }
        }
        Ok(Ok(0.0))
    });
    s.check("standard representation trace", 2, 7, |n| {
        let mut worst: f64 = 0.0;
        for (_, g) in test_graphs(n) {
            let eigs = irrep_laplacian_eigenvalues(&g, &Partition::hook(n, 1)?)?.eigenvalues;
            worst = worst.max((eigs.iter().sum::<f64>() - 2.0 * g.total_weight()).abs());
        }
        Ok(within(worst, 1e-8, "trace"))
    });
    s.check("full-cycle formula: product = hook sum = expectation", 2, 8, |n| {
        let mut worst: f64 = 0.0;
        for (name, g) in test_graphs(n) {
            let eigs = laplacian_eigenvalues(&g);
            let spectra = KCycleSpectra::new(&g, n)?;
            for t in [0.1, 1.0, 10.0] {
                let p = prob_full_cycle_from_spectrum(&eigs, t);
                let err = (p - full_cycle_hook_sum(&eigs, t)?).abs().max((p - spectra.expectation(t)).abs());
                if err > 1e-10 {
                    return Ok(Err(format!("{name}, t={t}: {err:.3e}")));
                }
                worst = worst.max(err);
            }
        }
        Ok(Ok(worst))
    });
    s.check("convergence bound on expected cycle counts", 2, 8, |n| {
        for (name, g) in test_graphs(n) {
            for k in 1..=n {
                let spectra = KCycleSpectra::new(&g, k)?;
                for t in [0.1, 1.0, 10.0] {
                    let dev = (spectra.expectation(t) - 1.0 / k as f64).abs();
                    if dev > chuk_bound(n, k, t, spectra.lambda1()) {
                        return Ok(Err(format!("{name}, k={k}, t={t}")));
                    }
                }
            }
        }
        Ok(Ok(0.0))
    });
    s.check("matrix-tree identity", 2, 8, |n| {
        let mut worst: f64 = 0.0;
        for (name, g) in test_graphs(n) {
            let rel = matrix_tree_check(&g).relative_gap().unwrap_or(f64::INFINITY);
            if rel > 1e-9 {
                return Ok(Err(format!("{name}: relative gap {rel:.3e}")));
            }
            worst = worst.max(rel);
        }
        Ok(Ok(worst))
    });
    s.check("transpositions merge or split one cycle", 2, 8, |n| {
        let mut perm: Vec<usize> = (0..n).collect();
        let mut cycles = n;
        // a fixed walk over every pair, twice
        for _ in 0..2 {
            for i in 0..n {
                for j in (i + 1)..n {
                    perm.swap(i, j);
                    let stats = cycle_observables(&perm);
                    let weighted: usize = stats.counts.iter().enumerate().map(|(k, m)| k * m).sum();
                    if weighted != n || stats.total.abs_diff(cycles) != 1 {
                        return Ok(Err(format!("after ({i} {j}): {} cycles, from {cycles}", stats.total)));
                    }
                    cycles = stats.total;
                }
            }
        }
        Ok(Ok(0.0))
    });
    Ok(s.results)
}

/// Fixed-width pass/fail table.
pub fn format_table(results: &[CheckResult]) -> String {
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(5).max(5);
    let mut out = format!("{:<width$}  n<=  result  detail\n", "check");
    for r in results {
        let verdict = if r.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{:<width$}  {:>3}  {:<6}  {}", r.name, r.n_max, verdict, r.detail);
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    let _ = writeln!(out, "{} checks, {} failed", results.len(), failed);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes_and_is_stable() {
        let a = run_suite(5).unwrap();
        assert!(a.iter().all(|r| r.passed), "{}", format_table(&a));
        assert_eq!(format_table(&a), format_table(&run_suite(5).unwrap()));
        assert!(run_suite(0).is_err());
        assert!(run_suite(MAX_VERIFY_N + 1).is_err());
    }

    #[test]
    fn test_graphs_are_connected() {
        for n in 2..=8 {
            let graphs = test_graphs(n);
            assert!(graphs.len() >= 4);
            assert!(graphs.iter().all(|(_, g)| g.is_connected() && g.n() == n));
        }
        assert!(test_graphs(1).is_empty());
    }
}
