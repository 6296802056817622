use cyclespec::characters::{alpha_k_coefficients, coefficient_entries, decompose, ClassFunction};
use cyclespec::exact::rat;
use cyclespec::formulas::{expected_k_cycles, matrix_tree_check, prob_full_cycle};
use cyclespec::spectra::{laplacian_eigenvalues, WeightedGraph};
use cyclespec::symfun::{derive_a_rho_via_pieri, SchurExpansion};
use cyclespec::Partition;

#[test]
fn edge_list_round_trip_feeds_the_formulas() {
    let text = "# weighted kite\nn 4\n0 1 1.5\n1 2 0.5\n2 0 1\n2 3 2\n1 2 0.25\n";
    let g = WeightedGraph::parse_edge_list(text).unwrap();
    assert_eq!(g.weight(1, 2), 0.75);
    let again = WeightedGraph::parse_edge_list(&g.to_edge_list()).unwrap();
    assert_eq!(g, again);
    let p = prob_full_cycle(&g, 0.8);
    assert!((p - expected_k_cycles(&g, 4, 0.8).unwrap()).abs() < 1e-12);
    let check = matrix_tree_check(&g);
    // spanning trees of the kite: the triangle contributes three, the pendant edge is forced
    let triangle = 1.5 * 0.75 + 0.75 * 1.0 + 1.5 * 1.0;
    assert!((check.tree_sum.unwrap() - 2.0 * triangle).abs() < 1e-12);
    assert!((check.spectral - 2.0 * triangle).abs() < 1e-9);
    assert_eq!(laplacian_eigenvalues(&g)[0], 0.0);
}

#[test]
fn parse_errors_carry_line_numbers() {
    let err = WeightedGraph::parse_edge_list("0 1 1\n0 1\n").unwrap_err().to_string();
    assert!(err.contains("line 2"), "{err}");
    assert!(WeightedGraph::parse_edge_list("0 0 1\n").is_err());
    assert!(WeightedGraph::parse_edge_list("0 1 -1\n").is_err());
    assert!(WeightedGraph::parse_edge_list("0 1 1\nn 2\n").is_err());
}

#[test]
fn schur_expansion_json_round_trip() {
    let e = derive_a_rho_via_pieri(6, 4).unwrap();
    let json = serde_json::to_string(&e).unwrap();
    let back: SchurExpansion = serde_json::from_str(&json).unwrap();
    assert_eq!(e, back);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["basis"], "schur");
    assert_eq!(v["n"], 6);
}

#[test]
fn full_cycle_class_function_is_an_alternating_hook_sum() {
    // the indicator of an n-cycle is (1/n) Σ_i (-1)^i χ_[n-i,1^i]
    for n in 1..=7 {
        let f = ClassFunction::from_fn(n, |mu| if mu.len() == 1 { rat(1, 1) } else { rat(0, 1) }).unwrap();
        let coeffs = decompose(&f).unwrap();
        assert_eq!(coeffs.len(), n);
        for i in 0..n {
            let sign = if i % 2 == 0 { 1 } else { -1 };
            assert_eq!(coeffs[&Partition::hook(n, i).unwrap()], rat(sign, n as i128));
        }
        assert_eq!(coeffs, alpha_k_coefficients(n, n).unwrap());
    }
}

#[test]
fn coefficient_entries_follow_enumeration_order() {
    let entries = coefficient_entries(&alpha_k_coefficients(5, 3).unwrap());
    let parts: Vec<Vec<usize>> = entries.iter().map(|e| e.partition.parts().to_vec()).collect();
    assert_eq!(parts, vec![vec![5], vec![2, 2, 1], vec![2, 1, 1, 1]]);
    assert_eq!(entries[0].value(), rat(1, 3));
}
