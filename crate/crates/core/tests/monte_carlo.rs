use cyclespec::formulas::{prob_full_cycle, KCycleSpectra, TimeGrid};
use cyclespec::mc::{run_simulation, run_simulation_with_threads, Observable, SimConfig};
use cyclespec::spectra::{build_graph, WeightedGraph};

fn graph(spec: &str) -> WeightedGraph {
    build_graph(&spec.parse().unwrap()).unwrap()
}

#[test]
fn z_scores_over_a_forty_cell_grid() {
    let graphs = [graph("complete:4"), graph("path:5"), graph("cycle:4"), WeightedGraph::random_connected(5, 31).unwrap()];
    let times = [0.2, 0.7, 1.5, 4.0];
    let mut z = Vec::new();
    for (gi, g) in graphs.iter().enumerate() {
        let mut config = SimConfig::new(g.clone(), TimeGrid::new(times.to_vec()).unwrap(), 40_000, 11 + gi as u64);
        config.observables = vec![Observable::CycleCount(2), Observable::FullCycle];
        let report = run_simulation(&config).unwrap();
        let s2 = KCycleSpectra::new(g, 2).unwrap();
        for &t in &times {
            for (obs, exact) in [(Observable::CycleCount(2), s2.expectation(t)), (Observable::FullCycle, prob_full_cycle(g, t))] {
                let e = report.estimate(obs, t).unwrap();
                z.push((e.mean - exact) / e.stderr);
            }
        }
        // two more cells at a late time for s_1
        let mut late = SimConfig::new(g.clone(), "6,9".parse().unwrap(), 40_000, 500 + gi as u64);
        late.observables = vec![Observable::CycleCount(1)];
        let report = run_simulation(&late).unwrap();
        let s1 = KCycleSpectra::new(g, 1).unwrap();
        for t in [6.0, 9.0] {
            let e = report.estimate(Observable::CycleCount(1), t).unwrap();
            z.push((e.mean - s1.expectation(t)) / e.stderr);
        }
    }
    assert_eq!(z.len(), 40);
    let within = z.iter().filter(|v| v.abs() < 4.0).count();
    assert!(within >= 38, "{within}/40 within 4 SE: {z:?}");
}

#[test]
fn cycle_counts_conserve_vertices() {
    let g = WeightedGraph::random_connected(6, 2).unwrap();
    let grid: TimeGrid = "0.1,0.5,2".parse().unwrap();
    let config = SimConfig::new(g, grid.clone(), 5_000, 3);
    let report = run_simulation(&config).unwrap();
    for &t in grid.times() {
        // Σ k s_k = n holds per replica, so the weighted mean is exact and
        // the weighted sum has no spread
        let total: f64 = (1..=6).map(|k| k as f64 * report.estimate(Observable::CycleCount(k), t).unwrap().mean).sum();
        assert!((total - 6.0).abs() < 1e-9);
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let mut config = SimConfig::new(graph("cycle:6"), "1".parse().unwrap(), 9_000, 77);
    config.observables = vec![Observable::TotalCycles, Observable::OriginCycleLength];
    let one = run_simulation_with_threads(&config, Some(1)).unwrap();
    let three = run_simulation_with_threads(&config, Some(3)).unwrap();
    assert_eq!(one.estimates, three.estimates);
    assert_eq!(one.to_csv(), three.to_csv());
}
