//! Spectra of the interchange-process Laplacian: on the graph itself, on
//! each irreducible representation (Young's orthogonal form), on the hook
//! representations by Bacher's subset-sum rule, and on the permutation
//! modules spanned by colourings.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{capability, domain, Result};
use crate::linalg::{clamp_small, symmetric_eigenvalues, Matrix};
use crate::partitions::Partition;

pub use crate::graph::{build_graph, Edge, GraphSpec, WeightedGraph};

/// Default bound on the dimension of a dense representation matrix.
pub const DEFAULT_DIMENSION_CAP: usize = 5000;
/// Eigenvalues below this fraction of the largest are reported as zero.
pub const CLAMP_RELATIVE: f64 = 1e-10;

/// Sorted Laplacian eigenvalues of the graph, `λ_0 = 0` first.
pub fn laplacian_eigenvalues(graph: &WeightedGraph) -> Vec<f64> {
    let mut eig = symmetric_eigenvalues(&graph.laplacian());
    clamp_small(&mut eig, CLAMP_RELATIVE);
    eig[0] = 0.0;
    eig
}

/// Spectrum of the Laplacian on one irreducible representation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IrrepSpectrum {
    pub rho: Partition,
    pub eigenvalues: Vec<f64>,
}

/// A standard Young tableau, stored as the row of each entry `0..n`.
type RowWord = Vec<u8>;

/// Standard tableaux of one shape in canonical order, with the content
/// (column minus row) of every entry.
#[derive(Debug)]
pub struct StandardBasis {
    shape: Partition,
    words: Vec<RowWord>,
    contents: Vec<Vec<i64>>,
    index: HashMap<RowWord, usize>,
}

impl StandardBasis {
    fn build(shape: &Partition) -> Self {
        let n = shape.n();
        let mut words = Vec::new();
        let mut fill = vec![0usize; shape.len()];
        let mut word = Vec::with_capacity(n);
        fn rec(shape: &[usize], fill: &mut [usize], word: &mut RowWord, out: &mut Vec<RowWord>, n: usize) {
            if word.len() == n {
                out.push(word.clone());
                return;
            }
            for r in 0..shape.len() {
                let addable = fill[r] < shape[r] && (r == 0 || fill[r - 1] > fill[r]);
                if addable {
                    fill[r] += 1;
                    word.push(r as u8);
                    rec(shape, fill, word, out, n);
                    word.pop();
                    fill[r] -= 1;
                }
            }
        }
        rec(shape.parts(), &mut fill, &mut word, &mut words, n);
        // canonical order: lexicographic on the row-reading word (the
        // entries of row 0 left to right, then row 1, ...)
        let reading = |w: &RowWord| -> Vec<usize> {
            let mut rows: Vec<Vec<usize>> = vec![Vec::new(); shape.len()];
            for (entry, &r) in w.iter().enumerate() {
                rows[r as usize].push(entry);
            }
            rows.concat()
        };
        words.sort_by_cached_key(reading);
        let contents = words
            .iter()
            .map(|w| {
                let mut fill = vec![0i64; shape.len()];
                w.iter()
                    .map(|&r| {
                        let col = fill[r as usize];
                        fill[r as usize] += 1;
                        col - r as i64
                    })
                    .collect()
            })
            .collect();
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        StandardBasis { shape: shape.clone(), words, contents, index }
    }

    /// Cached basis for a shape.
    pub fn for_shape(shape: &Partition) -> Arc<StandardBasis> {
        static CACHE: OnceLock<Mutex<HashMap<Partition, Arc<StandardBasis>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(b) = cache.lock().unwrap().get(shape) {
            return Arc::clone(b);
        }
        let built = Arc::new(Self::build(shape));
        Arc::clone(cache.lock().unwrap().entry(shape.clone()).or_insert(built))
    }

    pub fn dim(&self) -> usize {
        self.words.len()
    }

    pub fn shape(&self) -> &Partition {
        &self.shape
    }

    /// Row of each entry, per tableau.
    pub fn tableaux(&self) -> &[RowWord] {
        &self.words
    }
}

/// Young's orthogonal form of the adjacent transposition `(k, k+1)`:
/// at most two nonzeros per row.
#[derive(Clone, Debug)]
pub struct AdjacentTransposition {
    diag: Vec<f64>,
    partner: Vec<Option<usize>>,
    off: Vec<f64>,
}

impl AdjacentTransposition {
    pub fn new(basis: &StandardBasis, k: usize) -> Self {
        let dim = basis.dim();
        let mut diag = vec![0.0; dim];
        let mut partner = vec![None; dim];
        let mut off = vec![0.0; dim];
        for t in 0..dim {
            let c = &basis.contents[t];
            let axial = (c[k + 1] - c[k]) as f64;
            diag[t] = 1.0 / axial;
            let w = &basis.words[t];
            // k and k+1 in different rows and columns: swapping them gives
            // another standard tableau
            if axial.abs() > 1.0 {
                let mut swapped = w.clone();
                swapped.swap(k, k + 1);
                let other = basis.index[&swapped];
                partner[t] = Some(other);
                off[t] = (1.0 - 1.0 / (axial * axial)).sqrt();
            }
        }
        AdjacentTransposition { diag, partner, off }
    }

    /// `self · m`.
    pub fn left_mul(&self, m: &Matrix) -> Matrix {
        let dim = m.dim();
        let mut out = Matrix::zeros(dim);
        for t in 0..dim {
            for c in 0..dim {
                let mut v = self.diag[t] * m[(t, c)];
                if let Some(p) = self.partner[t] {
                    v += self.off[t] * m[(p, c)];
                }
                out[(t, c)] = v;
            }
        }
        out
    }

    /// `m · self` (the matrix is symmetric).
    pub fn right_mul(&self, m: &Matrix) -> Matrix {
        let dim = m.dim();
        let mut out = Matrix::zeros(dim);
        for r in 0..dim {
            for t in 0..dim {
                let mut v = m[(r, t)] * self.diag[t];
                if let Some(p) = self.partner[t] {
                    v += m[(r, p)] * self.off[t];
                }
                out[(r, t)] = v;
            }
        }
        out
    }

    pub fn to_dense(&self) -> Matrix {
        self.left_mul(&Matrix::identity(self.diag.len()))
    }
}

/// The irreducible representation `U_ρ` in Young's orthogonal form.
#[derive(Debug)]
pub struct OrthogonalForm {
    basis: Arc<StandardBasis>,
    adjacent: Vec<AdjacentTransposition>,
}

impl OrthogonalForm {
    pub fn new(rho: &Partition, dimension_cap: usize) -> Result<Self> {
        let dim = rho.dimension();
        if dim > dimension_cap as u128 {
            return capability(format!("dim U_{rho} = {dim} exceeds the dimension cap {dimension_cap}"));
        }
        let basis = StandardBasis::for_shape(rho);
        let adjacent = (0..rho.n().saturating_sub(1)).map(|k| AdjacentTransposition::new(&basis, k)).collect();
        Ok(OrthogonalForm { basis, adjacent })
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn adjacent(&self, k: usize) -> &AdjacentTransposition {
        &self.adjacent[k]
    }

    /// `U((i j))` for `i < j`, as the conjugate
    /// `s_{j-1} ⋯ s_{i+1} s_i s_{i+1} ⋯ s_{j-1}`.
    pub fn transposition(&self, i: usize, j: usize) -> Matrix {
        assert!(i < j && j < self.basis.shape.n(), "transposition ({i} {j}) out of range");
        let mut m = self.adjacent[i].to_dense();
        for k in (i + 1)..j {
            m = self.adjacent[k].right_mul(&self.adjacent[k].left_mul(&m));
        }
        m
    }

    /// `U_ρ(Δ_A) = Σ_{i<j} a_{i,j} (I - U((i j)))`.
    pub fn laplacian(&self, graph: &WeightedGraph) -> Result<Matrix> {
        let n = self.basis.shape.n();
        if graph.n() != n {
            return domain(format!("graph on {} vertices paired with {}", graph.n(), self.basis.shape));
        }
        let dim = self.dim();
        let mut out = Matrix::zeros(dim);
        let total = graph.total_weight();
        for t in 0..dim {
            out[(t, t)] = total;
        }
        // walk j upward for each i, reusing U((i j)) to get U((i j+1))
        for i in 0..n {
            if !graph.edges().iter().any(|e| e.i == i) {
                continue;
            }
            let last = graph.edges().iter().filter(|e| e.i == i).map(|e| e.j).max().unwrap();
            let mut m = self.adjacent[i].to_dense();
            for j in (i + 1)..=last {
                if j > i + 1 {
                    m = self.adjacent[j - 1].right_mul(&self.adjacent[j - 1].left_mul(&m));
                }
                let w = graph.weight(i, j);
                if w > 0.0 {
                    out.add_scaled(&m, -w);
                }
            }
        }
        Ok(out)
    }
}

/// Eigenvalues of `U_ρ(Δ_A)` with the default dimension cap.
pub fn irrep_laplacian_eigenvalues(graph: &WeightedGraph, rho: &Partition) -> Result<IrrepSpectrum> {
    irrep_laplacian_eigenvalues_capped(graph, rho, DEFAULT_DIMENSION_CAP)
}

pub fn irrep_laplacian_eigenvalues_capped(
    graph: &WeightedGraph,
    rho: &Partition,
    dimension_cap: usize,
) -> Result<IrrepSpectrum> {
    if rho.n() != graph.n() {
        return domain(format!("{rho} is not a partition of the vertex count {}", graph.n()));
    }
    let form = OrthogonalForm::new(rho, dimension_cap)?;
    let mut eigenvalues = symmetric_eigenvalues(&form.laplacian(graph)?);
    clamp_small(&mut eigenvalues, CLAMP_RELATIVE);
    Ok(IrrepSpectrum { rho: rho.clone(), eigenvalues })
}

/// Eigenvalues on the hook `[n-i, 1^i]`: all sums of `i` distinct graph
/// eigenvalues `λ_1, …, λ_{n-1}`. `graph_eigs` is that positive part.
pub fn hook_eigenvalues_bacher(graph_eigs: &[f64], i: usize) -> Result<Vec<f64>> {
    if i > graph_eigs.len() {
        return domain(format!("hook index {i} exceeds n-1 = {}", graph_eigs.len()));
    }
    let mut out = Vec::new();
    fn rec(eigs: &[f64], start: usize, left: usize, acc: f64, out: &mut Vec<f64>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for idx in start..=(eigs.len() - left) {
            rec(eigs, idx + 1, left - 1, acc + eigs[idx], out);
        }
    }
    rec(graph_eigs, 0, i, 0.0, &mut out);
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Spectrum of `Δ_A` on the permutation module `V_λ`, i.e. the generator of
/// the multi-colour exclusion process with `λ_c` particles of colour `c`.
pub fn permutation_module_spectrum(lambda: &Partition, graph: &WeightedGraph, cap: usize) -> Result<Vec<f64>> {
    if lambda.n() != graph.n() {
        return domain(format!("{lambda} is not a partition of the vertex count {}", graph.n()));
    }
    let states = colourings(lambda, cap)?;
    let index: HashMap<&[u8], usize> = states.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
    let mut m = Matrix::zeros(states.len());
    let mut scratch = Vec::with_capacity(graph.n());
    for (a, s) in states.iter().enumerate() {
        for e in graph.edges() {
            if s[e.i] == s[e.j] {
                continue;
            }
            scratch.clear();
            scratch.extend_from_slice(s);
            scratch.swap(e.i, e.j);
            let b = index[scratch.as_slice()];
            m[(a, a)] += e.w;
            m[(a, b)] -= e.w;
        }
    }
    let mut eig = symmetric_eigenvalues(&m);
    clamp_small(&mut eig, CLAMP_RELATIVE);
    Ok(eig)
}

/// All vertex colourings with `λ_c` vertices of colour `c`.
fn colourings(lambda: &Partition, cap: usize) -> Result<Vec<Vec<u8>>> {
    let count = crate::partitions::factorial(lambda.n())? / lambda.young_subgroup_order();
    if count > cap as u128 {
        return capability(format!("V_{lambda} has {count} cosets, above the cap {cap}"));
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut left = lambda.parts().to_vec();
    let mut cur = Vec::with_capacity(lambda.n());
    fn rec(left: &mut [usize], cur: &mut Vec<u8>, n: usize, out: &mut Vec<Vec<u8>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for c in 0..left.len() {
            if left[c] > 0 {
                left[c] -= 1;
                cur.push(c as u8);
                rec(left, cur, n, out);
                cur.pop();
                left[c] += 1;
            }
        }
    }
    rec(&mut left, &mut cur, lambda.n(), &mut out);
    Ok(out)
}

/// Closed-form spectrum of the unit-weight hypercube `{0,1}^d`: `2k` with
/// multiplicity `binom(d, k)`, sorted.
pub fn hypercube_eigenvalues(d: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(1 << d);
    for k in 0..=d {
        let mult = crate::partitions::binomial(d, k) as usize;
        out.extend(std::iter::repeat_n(2.0 * k as f64, mult));
    }
    out
}

/// Closed-form spectrum of the unit-weight torus `(Z/m)^dim`:
/// `Σ_j 2 (1 - cos(2π ξ_j / m))` over `ξ ∈ {0..m-1}^dim`, sorted.
pub fn torus_eigenvalues(side: usize, dim: usize) -> Vec<f64> {
    let cycle: Vec<f64> = (0..side)
        .map(|xi| 2.0 * (1.0 - (2.0 * std::f64::consts::PI * xi as f64 / side as f64).cos()))
        .collect();
    let mut out = vec![0.0];
    for _ in 0..dim {
        out = out.iter().flat_map(|&acc| cycle.iter().map(move |&c| acc + c)).collect();
    }
    out.sort_by(f64::total_cmp);
    out[0] = 0.0;
    out
}

/// Two isospectral weighted graphs on four vertices with different
/// spectra on the `[2,2]` representation.
#[derive(Clone, Debug, Serialize)]
pub struct IsospectralPair {
    pub seed: u64,
    pub attempt: u64,
    pub first: WeightedGraph,
    pub second: WeightedGraph,
    /// Largest per-eigenvalue difference of the graph spectra.
    pub laplacian_gap: f64,
    /// Largest per-eigenvalue difference of the `[2,2]` spectra.
    pub irrep_gap: f64,
}

/// Spectra are considered equal below this per-eigenvalue gap.
pub const ISOSPECTRAL_TOLERANCE: f64 = 1e-9;
/// Minimum `[2,2]` spectral difference for a pair to count.
pub const IRREP_SEPARATION: f64 = 1e-3;

/// Random search for an isospectral pair on four vertices: draw a generic
/// weighted graph, conjugate its Laplacian by a small random rotation
/// fixing `(1,1,1,1)`, and keep the result if it is again the Laplacian of
/// nonnegative weights and the `[2,2]` spectra separate.
pub fn isospectral_pair_search(seed: u64, attempts: u64) -> Result<Option<IsospectralPair>> {
    let n = 4;
    let rho = Partition::new(vec![2, 2])?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frame = orthonormal_complement_of_ones();
    for attempt in 0..attempts {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((i, j, rng.random_range(0.2..1.5)));
            }
        }
        let first = WeightedGraph::new(n, edges)?;
        let rotation = small_rotation(&mut rng, &frame);
        let l1 = first.laplacian();
        let l2 = rotation.mul(&l1).mul(&rotation.transpose());
        let mut weights = Vec::new();
        let mut valid = true;
        for i in 0..n {
            for j in (i + 1)..n {
                let sym = 0.5 * (l2[(i, j)] + l2[(j, i)]);
                if sym > 1e-12 {
                    valid = false;
                }
                weights.push((i, j, (-sym).max(0.0)));
            }
        }
        if !valid {
            continue;
        }
        let second = WeightedGraph::new(n, weights)?;
        let laplacian_gap = max_gap(&laplacian_eigenvalues(&first), &laplacian_eigenvalues(&second));
        if laplacian_gap > ISOSPECTRAL_TOLERANCE {
            continue;
        }
        let irrep_gap = max_gap(
            &irrep_laplacian_eigenvalues(&first, &rho)?.eigenvalues,
            &irrep_laplacian_eigenvalues(&second, &rho)?.eigenvalues,
        );
        if irrep_gap > IRREP_SEPARATION {
            return Ok(Some(IsospectralPair { seed, attempt, first, second, laplacian_gap, irrep_gap }));
        }
    }
    Ok(None)
}

pub fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Columns spanning the complement of `(1,1,1,1)`, orthonormal.
fn orthonormal_complement_of_ones() -> [[f64; 4]; 3] {
    let h = 0.5;
    [[h, -h, h, -h], [h, h, -h, -h], [h, -h, -h, h]]
}

/// `Q = P R Pᵀ + (1/4) 11ᵀ` with `R` the Cayley transform of a small random
/// skew-symmetric 3×3 matrix.
fn small_rotation(rng: &mut ChaCha8Rng, frame: &[[f64; 4]; 3]) -> Matrix {
    let (a, b, c): (f64, f64, f64) =
        (rng.random_range(-0.15..0.15), rng.random_range(-0.15..0.15), rng.random_range(-0.15..0.15));
    let skew = [[0.0, a, b], [-a, 0.0, c], [-b, -c, 0.0]];
    // R = (I - S)^{-1} (I + S)
    let mut minus = [[0.0; 3]; 3];
    let mut plus = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let id = if i == j { 1.0 } else { 0.0 };
            minus[i][j] = id - skew[i][j];
            plus[i][j] = id + skew[i][j];
        }
    }
    let inv = invert3(&minus);
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            r[i][j] = (0..3).map(|k| inv[i][k] * plus[k][j]).sum();
        }
    }
    let mut q = Matrix::zeros(4);
    for x in 0..4 {
        for y in 0..4 {
            let mut v = 0.25;
            for i in 0..3 {
                for j in 0..3 {
                    v += frame[i][x] * r[i][j] * frame[j][y];
                }
            }
            q[(x, y)] = v;
        }
    }
    q
}

fn invert3(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let mut inv = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            inv[i][j] = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / det;
        }
    }
    inv
}

/// Multiset union of `K_{μλ}` copies of each irreducible spectrum: the
/// spectrum Young's rule predicts for `V_λ`.
pub fn youngs_rule_spectrum(lambda: &Partition, graph: &WeightedGraph) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    let mut cache: BTreeMap<Partition, Vec<f64>> = BTreeMap::new();
    for mu in crate::partitions::enumerate_partitions(lambda.n())? {
        let k = crate::symfun::kostka(&mu, lambda)?;
        if k == 0 {
            continue;
        }
        let spec = match cache.get(&mu) {
            Some(s) => s.clone(),
            None => {
                let s = irrep_laplacian_eigenvalues(graph, &mu)?.eigenvalues;
                cache.insert(mu.clone(), s.clone());
                s
            }
        };
        for _ in 0..k {
            out.extend_from_slice(&spec);
        }
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}
