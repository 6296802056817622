//! Event-driven simulation of the interchange process.
//!
//! Every replica starts from the identity. Waiting times between rings are
//! `Exp(W)` with `W` the total edge weight, and the ringing edge is drawn
//! from an alias table. Replica `r` draws from `ChaCha8Rng` seeded with
//! `seed_from_u64(master_seed)` on stream `r`, so a replica's path depends
//! only on `(master_seed, r)`. Replicas are grouped into fixed chunks whose
//! sums are combined in chunk order, which makes every report bit-identical
//! for any number of worker threads.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Exp;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::formulas::{prob_full_cycle, KCycleSpectra, TimeGrid, MAX_EXPECTATION_N};
use crate::spectra::WeightedGraph;

/// Replicas per reduction chunk.
pub const CHUNK: u64 = 4096;

/// Quantities recorded at each checkpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Observable {
    /// `s_k`, the number of `k`-cycles.
    CycleCount(usize),
    /// `1{s_n = 1}`.
    FullCycle,
    /// Length of the cycle through vertex 0.
    OriginCycleLength,
    /// Total number of cycles.
    TotalCycles,
    /// `2^{total cycles}`.
    MagnetizationWeight,
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observable::CycleCount(k) => write!(f, "s_{k}"),
            Observable::FullCycle => f.write_str("full_cycle"),
            Observable::OriginCycleLength => f.write_str("origin_cycle_length"),
            Observable::TotalCycles => f.write_str("total_cycles"),
            Observable::MagnetizationWeight => f.write_str("magnetization_weight"),
        }
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "full_cycle" => Observable::FullCycle,
            "origin_cycle_length" => Observable::OriginCycleLength,
            "total_cycles" => Observable::TotalCycles,
            "magnetization_weight" => Observable::MagnetizationWeight,
            _ => match s.strip_prefix("s_").map(str::parse::<usize>) {
                Some(Ok(k)) if k >= 1 => Observable::CycleCount(k),
                _ => return domain(format!("unknown observable `{s}`")),
            },
        })
    }
}

impl Serialize for Observable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Observable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `s_1 … s_n`, full cycle, origin length and total cycles.
pub fn default_observables(n: usize) -> Vec<Observable> {
    let mut v: Vec<Observable> = (1..=n).map(Observable::CycleCount).collect();
    v.extend([Observable::FullCycle, Observable::OriginCycleLength, Observable::TotalCycles]);
    v
}

#[derive(Clone, Debug, Serialize)]
pub struct SimConfig {
    pub graph: WeightedGraph,
    pub checkpoints: TimeGrid,
    pub replicas: u64,
    pub master_seed: u64,
    pub observables: Vec<Observable>,
}

impl SimConfig {
    pub fn new(graph: WeightedGraph, checkpoints: TimeGrid, replicas: u64, master_seed: u64) -> Self {
        let observables = default_observables(graph.n());
        SimConfig { graph, checkpoints, replicas, master_seed, observables }
    }

    fn validate(&self) -> Result<()> {
        if self.replicas == 0 {
            return domain("replicas must be at least 1");
        }
        if !(self.graph.total_weight() > 0.0) {
            return domain("total jump rate is zero");
        }
        for o in &self.observables {
            if let Observable::CycleCount(k) = o {
                if *k == 0 || *k > self.graph.n() {
                    return domain(format!("s_{k} is not defined for n={}", self.graph.n()));
                }
            }
        }
        Ok(())
    }
}

/// Cycle structure of a permutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleStats {
    /// `counts[k]` is `s_k`; index 0 is unused.
    pub counts: Vec<usize>,
    pub origin_length: usize,
    pub total: usize,
}

/// Cycle counts by index chasing. `perm` must be a permutation of `0..n`.
pub fn cycle_observables(perm: &[usize]) -> CycleStats {
    let n = perm.len();
    let mut seen = vec![false; n];
    let mut counts = vec![0usize; n + 1];
    let mut origin_length = 0;
    let mut total = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut v = start;
        while !seen[v] {
            seen[v] = true;
            v = perm[v];
            len += 1;
        }
        counts[len] += 1;
        total += 1;
        if start == 0 {
            origin_length = len;
        }
    }
    CycleStats { counts, origin_length, total }
}

impl CycleStats {
    fn value(&self, o: Observable) -> f64 {
        match o {
            Observable::CycleCount(k) => self.counts[k] as f64,
            Observable::FullCycle => (self.total == 1) as u8 as f64,
            Observable::OriginCycleLength => self.origin_length as f64,
            Observable::TotalCycles => self.total as f64,
            Observable::MagnetizationWeight => (self.total as f64).exp2(),
        }
    }
}

/// The per-graph sampling tables shared by all replicas.
struct Sampler {
    n: usize,
    ends: Vec<(usize, usize)>,
    alias: WeightedAliasIndex<f64>,
    wait: Exp<f64>,
}

impl Sampler {
    fn new(graph: &WeightedGraph) -> Result<Self> {
        let ends = graph.edges().iter().map(|e| (e.i, e.j)).collect();
        let weights = graph.edges().iter().map(|e| e.w).collect();
        let alias = WeightedAliasIndex::new(weights).map_err(|e| Error::Domain(format!("edge weights: {e}")))?;
        let wait = Exp::new(graph.total_weight()).map_err(|e| Error::Domain(format!("total rate: {e}")))?;
        Ok(Sampler { n: graph.n(), ends, alias, wait })
    }

    /// Runs one replica, calling `record` with the cycle statistics at each
    /// checkpoint in order.
    fn replica(&self, master_seed: u64, replica: u64, checkpoints: &[f64], mut record: impl FnMut(usize, &CycleStats)) {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(replica);
        let mut perm: Vec<usize> = (0..self.n).collect();
        let mut next = self.wait.sample(&mut rng);
        for (c, &t) in checkpoints.iter().enumerate() {
            while next <= t {
                let (i, j) = self.ends[self.alias.sample(&mut rng)];
                perm.swap(i, j);
                next += self.wait.sample(&mut rng);
            }
            record(c, &cycle_observables(&perm));
        }
    }
}

/// Runs `f` on a pool of `threads` workers, or the global pool when `None`.
fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::Capability(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Chunk-ordered map-reduce over replica indices.
fn reduce_replicas<A: Send>(
    replicas: u64,
    threads: Option<usize>,
    init: impl Fn() -> A + Sync,
    run: impl Fn(&mut A, u64) + Sync,
    merge: impl Fn(&mut A, A),
) -> Result<A> {
    let chunks = replicas.div_ceil(CHUNK);
    let parts: Vec<A> = with_threads(threads, || {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut acc = init();
                for r in (c * CHUNK)..((c + 1) * CHUNK).min(replicas) {
                    run(&mut acc, r);
                }
                acc
            })
            .collect()
    })?;
    let mut total = init();
    for p in parts {
        merge(&mut total, p);
    }
    Ok(total)
}

/// Mean and standard error of one observable at one checkpoint.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub observable: Observable,
    pub t: f64,
    pub mean: f64,
    pub stderr: f64,
    pub replicas: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimReport {
    pub config: SimConfig,
    pub estimates: Vec<Estimate>,
}

/// `(mean, stderr)` from a sum and sum of squares over `count` samples.
fn mean_and_stderr(sum: f64, sumsq: f64, count: u64) -> (f64, f64) {
    let n = count as f64;
    let mean = sum / n;
    if count < 2 {
        return (mean, 0.0);
    }
    let var = ((sumsq - sum * mean) / (n - 1.0)).max(0.0);
    (mean, (var / n).sqrt())
}

pub fn run_simulation(config: &SimConfig) -> Result<SimReport> {
    run_simulation_with_threads(config, None)
}

/// As [`run_simulation`] on at most `threads` workers. The result does not
/// depend on the thread count.
pub fn run_simulation_with_threads(config: &SimConfig, threads: Option<usize>) -> Result<SimReport> {
    config.validate()?;
    let sampler = Sampler::new(&config.graph)?;
    let times = config.checkpoints.times();
    let obs = &config.observables;
    let width = times.len() * obs.len();
    let stats = reduce_replicas(
        config.replicas,
        threads,
        || vec![(0.0f64, 0.0f64); width],
        |acc, r| {
            sampler.replica(config.master_seed, r, times, |c, s| {
                debug_assert_eq!(s.counts.iter().enumerate().map(|(k, m)| k * m).sum::<usize>(), sampler.n);
                for (o, &observable) in obs.iter().enumerate() {
                    let v = s.value(observable);
                    let cell = &mut acc[c * obs.len() + o];
                    cell.0 += v;
                    cell.1 += v * v;
                }
            })
        },
        |total, part| {
            for (a, b) in total.iter_mut().zip(part) {
                a.0 += b.0;
                a.1 += b.1;
            }
        },
    )?;
    let mut estimates = Vec::with_capacity(width);
    for &observable in obs {
        for (c, &t) in times.iter().enumerate() {
            let (sum, sumsq) = stats[c * obs.len() + obs.iter().position(|&o| o == observable).unwrap()];
            let (mean, stderr) = mean_and_stderr(sum, sumsq, config.replicas);
            estimates.push(Estimate { observable, t, mean, stderr, replicas: config.replicas, exact: None, z: None });
        }
    }
    Ok(SimReport { config: config.clone(), estimates })
}

impl SimReport {
    pub fn estimate(&self, observable: Observable, t: f64) -> Option<&Estimate> {
        self.estimates.iter().find(|e| e.observable == observable && e.t == t)
    }

    /// Fills `exact` and `z` where a closed form exists: the full-cycle
    /// indicator always, `s_k` for `n <= 12`.
    pub fn attach_exact(&mut self) -> Result<()> {
        let graph = &self.config.graph;
        let n = graph.n();
        let mut spectra = std::collections::HashMap::new();
        for e in &mut self.estimates {
            let exact = match e.observable {
                Observable::FullCycle => Some(prob_full_cycle(graph, e.t)),
                Observable::CycleCount(k) if n <= MAX_EXPECTATION_N => {
                    if let std::collections::hash_map::Entry::Vacant(e) = spectra.entry(k) {
                        e.insert(KCycleSpectra::new(graph, k)?);
                    }
                    Some(spectra[&k].expectation(e.t))
                }
                _ => None,
            };
            e.exact = exact;
            e.z = exact.map(|x| z_score(e.mean, e.stderr, x));
        }
        Ok(())
    }

    /// `observable,t,mean,stderr,replicas` rows under a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("observable,t,mean,stderr,replicas\n");
        for e in &self.estimates {
            let _ = writeln!(s, "{},{},{},{},{}", e.observable, e.t, e.mean, e.stderr, e.replicas);
        }
        s
    }
}

/// `(mean - exact) / stderr`; zero when both the deviation and the error
/// vanish.
pub fn z_score(mean: f64, stderr: f64, exact: f64) -> f64 {
    let dev = mean - exact;
    if stderr > 0.0 {
        dev / stderr
    } else if dev.abs() <= 1e-12 * exact.abs().max(1.0) {
        0.0
    } else {
        f64::INFINITY.copysign(dev)
    }
}

/// Weighted long-cycle ratio at one checkpoint.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MagnetizationPoint {
    pub t: f64,
    /// `(1/2) E[1{c(0) > n'} 2^{cycles}] / E[2^{cycles}]`, absent when the
    /// denominator estimate vanishes.
    pub magnetization: Option<f64>,
    pub magnetization_stderr: Option<f64>,
    /// `log2` of the sample mean of `2^{cycles}`.
    pub log2_denominator: f64,
    /// Unweighted `P(c(0) > n')`.
    pub long_cycle_probability: f64,
    pub long_cycle_stderr: f64,
    pub indeterminate: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MagnetizationReport {
    pub threshold: usize,
    pub replicas: u64,
    pub master_seed: u64,
    pub points: Vec<MagnetizationPoint>,
}

/// Magnetization estimate with delta-method error bars. Weights `2^L` are
/// handled as `2^{L - L_max}` with `L_max` the largest cycle count seen at
/// that checkpoint.
pub fn magnetization_estimator(
    config: &SimConfig,
    threshold: usize,
    threads: Option<usize>,
) -> Result<MagnetizationReport> {
    config.validate()?;
    if threshold >= config.graph.n() {
        return domain(format!("threshold {threshold} must be below n = {}", config.graph.n()));
    }
    let sampler = Sampler::new(&config.graph)?;
    let times = config.checkpoints.times();
    let m = times.len();
    // per replica and checkpoint: total cycles and the long-cycle indicator
    let samples: Vec<(u32, bool)> = reduce_replicas(
        config.replicas,
        threads,
        Vec::new,
        |acc, r| {
            sampler.replica(config.master_seed, r, times, |_, s| acc.push((s.total as u32, s.origin_length > threshold)))
        },
        |total, part| total.extend(part),
    )?;
    let n = config.replicas as f64;
    let mut points = Vec::with_capacity(m);
    for (c, &t) in times.iter().enumerate() {
        let at = || samples.iter().skip(c).step_by(m);
        let l_max = at().map(|s| s.0).max().unwrap_or(0);
        let (mut sx, mut sy, mut sxx, mut syy, mut sxy, mut si) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        for &(l, long) in at() {
            let y = (l as f64 - l_max as f64).exp2();
            let x = if long { y } else { 0.0 };
            sx += x;
            sy += y;
            sxx += x * x;
            syy += y * y;
            sxy += x * y;
            si += long as u8 as f64;
        }
        let (mx, my) = (sx / n, sy / n);
        let (p, p_err) = mean_and_stderr(si, si, config.replicas);
        let indeterminate = !(my > 0.0);
        let (magnetization, magnetization_stderr) = if indeterminate {
            (None, None)
        } else {
            let r = mx / my;
            let err = if config.replicas < 2 {
                0.0
            } else {
                let d = n - 1.0;
                let vxx = (sxx - sx * mx) / d;
                let vyy = (syy - sy * my) / d;
                let vxy = (sxy - sx * my) / d;
                ((vxx - 2.0 * r * vxy + r * r * vyy).max(0.0) / n).sqrt() / my
            };
            (Some(0.5 * r), Some(0.5 * err))
        };
        points.push(MagnetizationPoint {
            t,
            magnetization,
            magnetization_stderr,
            log2_denominator: l_max as f64 + my.log2(),
            long_cycle_probability: p,
            long_cycle_stderr: p_err,
            indeterminate,
        });
    }
    Ok(MagnetizationReport { threshold, replicas: config.replicas, master_seed: config.master_seed, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::expected_k_cycles;
    use crate::spectra::build_graph;
    use proptest::prelude::*;

    fn graph(spec: &str) -> WeightedGraph {
        build_graph(&spec.parse().unwrap()).unwrap()
    }

    #[test]
    fn cycle_observable_examples() {
        let id = cycle_observables(&[0, 1, 2, 3, 4]);
        assert_eq!(id.counts, vec![0, 5, 0, 0, 0, 0]);
        assert_eq!((id.origin_length, id.total), (1, 5));
        let full = cycle_observables(&[1, 2, 3, 4, 0]);
        assert_eq!(full.counts[5], 1);
        assert_eq!((full.origin_length, full.total), (5, 1));
        let mixed = cycle_observables(&[1, 0, 3, 4, 2]);
        assert_eq!(mixed.counts, vec![0, 0, 1, 1, 0, 0]);
        assert_eq!((mixed.origin_length, mixed.total), (2, 2));
    }

    #[test]
    fn observable_names_round_trip() {
        for o in [
            Observable::CycleCount(3),
            Observable::FullCycle,
            Observable::OriginCycleLength,
            Observable::TotalCycles,
            Observable::MagnetizationWeight,
        ] {
            assert_eq!(o.to_string().parse::<Observable>().unwrap(), o);
        }
        assert!("s_0".parse::<Observable>().is_err());
        assert!("s_x".parse::<Observable>().is_err());
    }

    proptest! {
        #[test]
        fn transpositions_merge_or_split(n in 2usize..12, seed in any::<u64>(), steps in 1usize..40) {
            use rand::Rng;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut perm: Vec<usize> = (0..n).collect();
            for _ in 0..steps {
                let i = rng.random_range(0..n);
                let j = (i + rng.random_range(1..n)) % n;
                let before = cycle_observables(&perm);
                let mut v = perm[i];
                let mut same = false;
                while v != i {
                    if v == j {
                        same = true;
                    }
                    v = perm[v];
                }
                perm.swap(i, j);
                let after = cycle_observables(&perm);
                let expected = if same { before.total + 1 } else { before.total - 1 };
                prop_assert_eq!(after.total, expected);
                prop_assert_eq!(after.counts.iter().enumerate().map(|(k, m)| k * m).sum::<usize>(), n);
            }
        }
    }

    #[test]
    fn identity_at_time_zero() {
        let config = SimConfig::new(graph("complete:5"), TimeGrid::single(0.0).unwrap(), 200, 1);
        let report = run_simulation(&config).unwrap();
        for e in &report.estimates {
            let want = match e.observable {
                Observable::CycleCount(1) => 5.0,
                Observable::OriginCycleLength => 1.0,
                Observable::TotalCycles => 5.0,
                _ => 0.0,
            };
            assert_eq!((e.mean, e.stderr), (want, 0.0), "{}", e.observable);
        }
    }

    #[test]
    fn bad_configs_are_rejected() {
        let grid = TimeGrid::single(1.0).unwrap();
        let mut config = SimConfig::new(graph("path:3"), grid.clone(), 0, 1);
        assert!(run_simulation(&config).is_err());
        config.replicas = 1;
        config.observables = vec![Observable::CycleCount(4)];
        assert!(run_simulation(&config).is_err());
        let empty = WeightedGraph::new(3, [(0, 1, 0.0)]).unwrap();
        assert!(run_simulation(&SimConfig::new(empty, grid, 1, 1)).is_err());
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let mut config = SimConfig::new(graph("cycle:5"), "0.3,1,2.5".parse().unwrap(), 3 * CHUNK + 17, 99);
        config.observables.push(Observable::MagnetizationWeight);
        let a = serde_json::to_string(&run_simulation_with_threads(&config, Some(1)).unwrap()).unwrap();
        let b = serde_json::to_string(&run_simulation_with_threads(&config, Some(4)).unwrap()).unwrap();
        assert_eq!(a, b);
        config.master_seed = 100;
        let c = serde_json::to_string(&run_simulation_with_threads(&config, Some(4)).unwrap()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn agrees_with_exact_values() {
        let cases = [("complete:4", Observable::FullCycle), ("path:4", Observable::CycleCount(2))];
        for (spec, key) in cases {
            let mut report = run_simulation(&SimConfig::new(graph(spec), TimeGrid::single(1.0).unwrap(), 100_000, 5)).unwrap();
            report.attach_exact().unwrap();
            for e in &report.estimates {
                if let Some(z) = e.z {
                    assert!(z.abs() < 4.0, "{spec} {}: z = {z}", e.observable);
                }
            }
            let e = report.estimate(key, 1.0).unwrap();
            assert!(e.z.unwrap().abs() < 3.0, "{spec} {key}: z = {:?}", e.z);
            let s2 = report.estimate(Observable::CycleCount(2), 1.0).unwrap();
            assert_eq!(s2.exact, Some(expected_k_cycles(&graph(spec), 2, 1.0).unwrap()));
        }
    }

    #[test]
    fn csv_layout() {
        let report = run_simulation(&SimConfig::new(graph("path:2"), "0,1".parse().unwrap(), 10, 3)).unwrap();
        let csv = report.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("observable,t,mean,stderr,replicas"));
        assert_eq!(lines.next(), Some("s_1,0,2,0,10"));
        assert_eq!(csv.lines().count(), 1 + 5 * 2);
    }

    #[test]
    fn magnetization_at_time_zero() {
        let config = SimConfig::new(graph("torus:3:2"), "0,0.5".parse().unwrap(), 500, 8);
        let report = magnetization_estimator(&config, 4, Some(2)).unwrap();
        let p0 = &report.points[0];
        assert_eq!(p0.magnetization, Some(0.0));
        assert_eq!(p0.log2_denominator, 9.0);
        assert_eq!(p0.long_cycle_probability, 0.0);
        let p1 = &report.points[1];
        assert!(p1.magnetization.unwrap().is_finite());
        assert!(p1.magnetization_stderr.unwrap() >= 0.0);
        assert!(magnetization_estimator(&config, 9, None).is_err());
    }

    #[test]
    fn magnetization_seeds_agree() {
        let mut config = SimConfig::new(graph("torus:3:3"), "0.5,2".parse().unwrap(), 10_000, 1);
        let a = magnetization_estimator(&config, 13, None).unwrap();
        config.master_seed = 2;
        let b = magnetization_estimator(&config, 13, None).unwrap();
        for (x, y) in a.points.iter().zip(&b.points) {
            let (mx, my) = (x.magnetization.unwrap(), y.magnetization.unwrap());
            let combined = x.magnetization_stderr.unwrap().hypot(y.magnetization_stderr.unwrap());
            assert!((mx - my).abs() <= 3.0 * combined + 1e-12, "t={}: {mx} vs {my} ± {combined}", x.t);
        }
    }
}
