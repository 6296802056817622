//! Weighted graphs: builders, the edge-list file format and Laplacians.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub w: f64,
}

/// Symmetric nonnegative edge weights on vertices `0..n`.
///
/// Edges are stored once with `i < j`, sorted, and only with positive
/// weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    /// Builds a graph, summing repeated edges. Self-loops, negative or
    /// non-finite weights and out-of-range vertices are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return domain("graph needs at least one vertex");
        }
        let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (i, j, w) in edges {
            if i == j {
                return domain(format!("self-loop at vertex {i}"));
            }
            if i >= n || j >= n {
                return domain(format!("edge {{{i},{j}}} out of range for n={n}"));
            }
            if !w.is_finite() || w < 0.0 {
                return domain(format!("edge {{{i},{j}}} has invalid weight {w}"));
            }
            *acc.entry((i.min(j), i.max(j))).or_insert(0.0) += w;
        }
        let edges = acc.into_iter().filter(|&(_, w)| w > 0.0).map(|((i, j), w)| Edge { i, j, w }).collect();
        Ok(WeightedGraph { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let key = (i.min(j), i.max(j));
        self.edges
            .binary_search_by(|e| (e.i, e.j).cmp(&key))
            .map(|idx| self.edges[idx].w)
            .unwrap_or(0.0)
    }

    /// `Σ_{i<j} a_{i,j}`, the total jump rate of the interchange process.
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn degree(&self, v: usize) -> f64 {
        self.edges.iter().filter(|e| e.i == v || e.j == v).map(|e| e.w).sum()
    }

    /// Number of edges incident to `v`.
    pub fn incident_edges(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.i == v || e.j == v).count()
    }

    pub fn is_connected(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        let mut components = self.n;
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.i), find(&mut parent, e.j));
            if a != b {
                parent[a] = b;
                components -= 1;
            }
        }
        components == 1
    }

    /// `L[i][j] = -a_{i,j}`, `L[i][i] = Σ_j a_{i,j}`.
    pub fn laplacian(&self) -> Matrix {
        let mut l = Matrix::zeros(self.n);
        for e in &self.edges {
            l[(e.i, e.j)] -= e.w;
            l[(e.j, e.i)] -= e.w;
            l[(e.i, e.i)] += e.w;
            l[(e.j, e.j)] += e.w;
        }
        l
    }

    /// Random connected graph: a Hamiltonian path plus each remaining pair
    /// with probability 1/2, weights uniform in `[0.1, 2)`.
    pub fn random_connected(n: usize, seed: u64) -> Result<Self> {
        use rand::{Rng, SeedableRng};
        if n < 2 {
            return domain("random graph needs n >= 2");
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let keep = j == i + 1 || rng.random_bool(0.5);
                let w: f64 = rng.random_range(0.1..2.0);
                if keep {
                    edges.push((i, j, w));
                }
            }
        }
        Self::new(n, edges)
    }

    /// Reads the edge-list format: `i j w` per line, `#` comments, an
    /// optional leading `n <count>` header.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut declared_n = None;
        let mut edges = Vec::new();
        let mut seen_content = false;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = |msg: String| Error::Parse { line: line_no, msg };
            if fields[0] == "n" {
                if seen_content {
                    return Err(bad("the `n <count>` header must come first".into()));
                }
                if fields.len() != 2 {
                    return Err(bad("expected `n <count>`".into()));
                }
                let n: usize = fields[1].parse().map_err(|e| bad(format!("bad vertex count: {e}")))?;
                declared_n = Some(n);
                seen_content = true;
                continue;
            }
            seen_content = true;
            if fields.len() != 3 {
                return Err(bad(format!("expected `i j w`, found {} fields", fields.len())));
            }
            let i: usize = fields[0].parse().map_err(|e| bad(format!("bad vertex `{}`: {e}", fields[0])))?;
            let j: usize = fields[1].parse().map_err(|e| bad(format!("bad vertex `{}`: {e}", fields[1])))?;
            let w: f64 = fields[2].parse().map_err(|e| bad(format!("bad weight `{}`: {e}", fields[2])))?;
            edges.push((i, j, w));
        }
        let inferred = edges.iter().map(|&(i, j, _)| i.max(j) + 1).max().unwrap_or(0);
        let n = match declared_n {
            Some(n) => n,
            None if inferred == 0 => return domain("edge list contains no edges and no `n` header"),
            None => inferred,
        };
        Self::new(n, edges)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_edge_list(&std::fs::read_to_string(path)?)
    }

    /// Writes the edge-list format with an explicit header.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("n {}\n", self.n);
        for e in &self.edges {
            s.push_str(&format!("{} {} {}\n", e.i, e.j, e.w));
        }
        s
    }
}

/// Named graph families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphSpec {
    Complete { n: usize, weight: f64 },
    Hypercube { d: usize },
    Torus { side: usize, dim: usize },
    Path { n: usize },
    Cycle { n: usize },
    FromEdges { n: usize, edges: Vec<(usize, usize, f64)> },
}

pub fn build_graph(spec: &GraphSpec) -> Result<WeightedGraph> {
    match *spec {
        GraphSpec::Complete { n, weight } => {
            if n < 2 {
                return domain("complete graph needs n >= 2");
            }
            if !(weight.is_finite() && weight > 0.0) {
                return domain(format!("complete graph weight must be positive, got {weight}"));
            }
            let edges = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j, weight)));
            WeightedGraph::new(n, edges)
        }
        GraphSpec::Hypercube { d } => {
            if !(1..=16).contains(&d) {
                return domain(format!("hypercube dimension must be in 1..=16, got {d}"));
            }
            let n = 1usize << d;
            let edges = (0..n).flat_map(|x| (0..d).map(move |b| (x, x ^ (1 << b))).filter(|(x, y)| x < y));
            WeightedGraph::new(n, edges.map(|(x, y)| (x, y, 1.0)))
        }
        GraphSpec::Torus { side, dim } => {
            if side < 3 || dim == 0 {
                return domain(format!("torus needs side >= 3 and dim >= 1 (got side={side}, dim={dim})"));
            }
            let n = side
                .checked_pow(dim as u32)
                .filter(|&n| n <= 1 << 20)
                .ok_or_else(|| Error::Domain(format!("torus {side}^{dim} is too large")))?;
            let mut edges = Vec::with_capacity(n * dim);
            for v in 0..n {
                let mut stride = 1;
                for _ in 0..dim {
                    let coord = (v / stride) % side;
                    let next = if coord + 1 == side { v + stride - side * stride } else { v + stride };
                    edges.push((v, next, 1.0));
                    stride *= side;
                }
            }
            WeightedGraph::new(n, edges)
        }
        GraphSpec::Path { n } => {
            if n < 2 {
                return domain("path needs n >= 2");
            }
            WeightedGraph::new(n, (0..n - 1).map(|i| (i, i + 1, 1.0)))
        }
        GraphSpec::Cycle { n } => {
            if n < 3 {
                return domain("cycle needs n >= 3");
            }
            WeightedGraph::new(n, (0..n).map(|i| (i, (i + 1) % n, 1.0)))
        }
        GraphSpec::FromEdges { n, ref edges } => WeightedGraph::new(n, edges.iter().copied()),
    }
}

/// Builder mini-language: `complete:N[:w]`, `hypercube:D`, `torus:SIDE:DIM`,
/// `path:N`, `cycle:N`.
impl FromStr for GraphSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fields: Vec<&str> = s.split(':').collect();
        let num = |idx: usize| -> Result<usize> {
            fields
                .get(idx)
                .ok_or_else(|| Error::Domain(format!("builder `{s}` is missing a field")))?
                .parse()
                .map_err(|e| Error::Domain(format!("builder `{s}`: {e}")))
        };
        let arity = |want: &[usize]| -> Result<()> {
            if want.contains(&fields.len()) {
                Ok(())
            } else {
                domain(format!("builder `{s}` has the wrong number of fields"))
            }
        };
        match fields[0] {
            "complete" => {
                arity(&[2, 3])?;
                let weight = match fields.get(2) {
                    Some(w) => w.parse().map_err(|e| Error::Domain(format!("builder `{s}`: {e}")))?,
                    None => 1.0,
                };
                Ok(GraphSpec::Complete { n: num(1)?, weight })
            }
            "hypercube" => {
                arity(&[2])?;
                Ok(GraphSpec::Hypercube { d: num(1)? })
            }
            "torus" => {
                arity(&[3])?;
                Ok(GraphSpec::Torus { side: num(1)?, dim: num(2)? })
            }
            "path" => {
                arity(&[2])?;
                Ok(GraphSpec::Path { n: num(1)? })
            }
            "cycle" => {
                arity(&[2])?;
                Ok(GraphSpec::Cycle { n: num(1)? })
            }
            other => domain(format!("unknown graph builder `{other}`")),
        }
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSpec::Complete { n, weight } => write!(f, "complete:{n}:{weight}"),
            GraphSpec::Hypercube { d } => write!(f, "hypercube:{d}"),
            GraphSpec::Torus { side, dim } => write!(f, "torus:{side}:{dim}"),
            GraphSpec::Path { n } => write!(f, "path:{n}"),
            GraphSpec::Cycle { n } => write!(f, "cycle:{n}"),
            GraphSpec::FromEdges { n, edges } => write!(f, "edges:{n}:{}", edges.len()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builder_examples() {
        let k4 = build_graph(&GraphSpec::Complete { n: 4, weight: 1.0 }).unwrap();
        assert_eq!(k4.edges().len(), 6);
        assert!(k4.edges().iter().all(|e| e.w == 1.0));

        let q3 = build_graph(&GraphSpec::Hypercube { d: 3 }).unwrap();
        assert_eq!(q3.n(), 8);
        assert_eq!(q3.edges().len(), 12);
        assert!((0..8).all(|v| q3.incident_edges(v) == 3));

        let t = build_graph(&GraphSpec::Torus { side: 3, dim: 2 }).unwrap();
        assert_eq!(t.n(), 9);
        assert!((0..9).all(|v| t.incident_edges(v) == 4));

        let t3 = build_graph(&GraphSpec::Torus { side: 5, dim: 3 }).unwrap();
        assert_eq!(t3.edges().len(), 125 * 3);
        assert!((0..125).all(|v| t3.incident_edges(v) == 6));

        assert_eq!(build_graph(&GraphSpec::Path { n: 4 }).unwrap().edges().len(), 3);
        assert_eq!(build_graph(&GraphSpec::Cycle { n: 5 }).unwrap().edges().len(), 5);
    }

    #[test]
    fn builder_errors() {
        assert!(build_graph(&GraphSpec::Complete { n: 1, weight: 1.0 }).is_err());
        assert!(build_graph(&GraphSpec::Complete { n: 3, weight: -1.0 }).is_err());
        assert!(build_graph(&GraphSpec::Torus { side: 2, dim: 2 }).is_err());
        assert!(build_graph(&GraphSpec::Cycle { n: 2 }).is_err());
        assert!(build_graph(&GraphSpec::Hypercube { d: 0 }).is_err());
        assert!(WeightedGraph::new(3, [(0, 0, 1.0)]).is_err());
        assert!(WeightedGraph::new(3, [(0, 5, 1.0)]).is_err());
        assert!(WeightedGraph::new(3, [(0, 1, f64::NAN)]).is_err());
    }

    #[test]
    fn builder_spec_parsing() {
        assert_eq!("complete:4".parse::<GraphSpec>().unwrap(), GraphSpec::Complete { n: 4, weight: 1.0 });
        assert_eq!("complete:5:0.2".parse::<GraphSpec>().unwrap(), GraphSpec::Complete { n: 5, weight: 0.2 });
        assert_eq!("torus:5:3".parse::<GraphSpec>().unwrap(), GraphSpec::Torus { side: 5, dim: 3 });
        assert_eq!("hypercube:3".parse::<GraphSpec>().unwrap(), GraphSpec::Hypercube { d: 3 });
        assert!("torus:5".parse::<GraphSpec>().is_err());
        assert!("star:5".parse::<GraphSpec>().is_err());
        assert!("path:x".parse::<GraphSpec>().is_err());
    }

    #[test]
    fn edge_list_format() {
        let g = WeightedGraph::parse_edge_list("# triangle\n0 1 1\n1 2 1.0  # comment\n\n2 0 1\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.total_weight(), 3.0);

        let g = WeightedGraph::parse_edge_list("n 5\n0 1 0.5\n").unwrap();
        assert_eq!(g.n(), 5);
        assert_eq!(g.weight(1, 0), 0.5);
        assert_eq!(g.weight(2, 3), 0.0);

        let back = WeightedGraph::parse_edge_list(&g.to_edge_list()).unwrap();
        assert_eq!(back, g);

        assert!(matches!(WeightedGraph::parse_edge_list("0 1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(WeightedGraph::parse_edge_list("0 1 1\nn 3\n"), Err(Error::Parse { line: 2, .. })));
        assert!(WeightedGraph::parse_edge_list("0 1 -2\n").is_err());
        assert!(WeightedGraph::parse_edge_list("# nothing\n").is_err());
    }

    #[test]
    fn laplacian_rows_sum_to_zero() {
        let g = WeightedGraph::new(4, [(0, 1, 0.3), (1, 2, 2.0), (0, 3, 1.5), (1, 3, 0.25)]).unwrap();
        let l = g.laplacian();
        for i in 0..4 {
            assert!(l.row(i).iter().sum::<f64>().abs() < 1e-15);
            assert_eq!(l[(i, i)], g.degree(i));
        }
        assert!(g.is_connected());
        assert!(!WeightedGraph::new(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap().is_connected());
    }
}
