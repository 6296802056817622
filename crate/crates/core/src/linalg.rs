//! Dense symmetric matrices and a cyclic Jacobi eigensolver.

/// Row-major dense square matrix, used for symmetric operators.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "matrix must be square");
            m.data[i * n..(i + 1) * n].copy_from_slice(row);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                let src = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j];
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// `self += scale * other`.
    pub fn add_scaled(&mut self, other: &Matrix, scale: f64) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += scale * b;
        }
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Convergence threshold on the off-diagonal Frobenius mass, relative to the
/// Frobenius norm of the input.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted
/// ascending. Only the upper triangle is read.
///
/// Each sweep visits every pair `(p, q)` once in round-robin order, so a
/// round is a set of disjoint rotations applied together: first to the
/// columns, row by row, then to the rows. Both passes stream through
/// contiguous memory.
pub fn symmetric_eigenvalues(m: &Matrix) -> Vec<f64> {
    let n = m.n;
    if n == 0 {
        return Vec::new();
    }
    let mut a = m.clone();
    for i in 0..n {
        for j in 0..i {
            a.data[i * n + j] = a.data[j * n + i];
        }
    }
    let scale = a.frobenius();
    if scale == 0.0 {
        return vec![0.0; n];
    }
    let target = JACOBI_TOLERANCE * scale;
    let schedule = round_robin(n);
    let mut rotations: Vec<(usize, usize, f64, f64)> = Vec::with_capacity(n / 2);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| 2.0 * a.data[i * n + j].powi(2))
            .sum::<f64>()
            .sqrt();
        if off < target {
            break;
        }
        for round in &schedule {
            rotations.clear();
            for &(p, q) in round {
                let apq = a.data[p * n + q];
                if apq.abs() < f64::MIN_POSITIVE {
                    continue;
                }
                let (app, aqq) = (a.data[p * n + p], a.data[q * n + q]);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                rotations.push((p, q, c, t * c));
            }
            if !rotations.is_empty() {
                apply_rotations(&mut a, &rotations);
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a.data[i * n + i]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// Rounds of disjoint pairs covering every pair of `0..n` exactly once
/// (circle method).
fn round_robin(n: usize) -> Vec<Vec<(usize, usize)>> {
    let m = n + n % 2;
    let mut ring: Vec<usize> = (0..m).collect();
    let mut rounds = Vec::with_capacity(m - 1);
    for _ in 0..m.saturating_sub(1) {
        let round = (0..m / 2)
            .map(|k| (ring[k], ring[m - 1 - k]))
            .filter(|&(x, y)| x < n && y < n)
            .map(|(x, y)| (x.min(y), x.max(y)))
            .collect();
        rounds.push(round);
        ring[1..].rotate_right(1);
    }
    rounds
}

/// `A <- J^T A J` for a product `J` of rotations on disjoint index pairs,
/// each annihilating its `a[p][q]`.
fn apply_rotations(a: &mut Matrix, rotations: &[(usize, usize, f64, f64)]) {
    let n = a.n;
    for row in a.data.chunks_exact_mut(n) {
        for &(p, q, c, s) in rotations {
            let (x, y) = (row[p], row[q]);
            row[p] = c * x - s * y;
            row[q] = s * x + c * y;
        }
    }
    for &(p, q, c, s) in rotations {
        let (lo, hi) = a.data.split_at_mut(q * n);
        let rp = &mut lo[p * n..(p + 1) * n];
        let rq = &mut hi[..n];
        for (x, y) in rp.iter_mut().zip(rq.iter_mut()) {
            let (u, v) = (*x, *y);
            *x = c * u - s * v;
            *y = s * u + c * v;
        }
        a.data[p * n + q] = 0.0;
        a.data[q * n + p] = 0.0;
    }
}

/// Sets eigenvalues below `rel * max|λ|` to exactly zero.
pub fn clamp_small(eigs: &mut [f64], rel: f64) {
    let max = eigs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cut = rel * max;
    for v in eigs.iter_mut() {
        if v.abs() < cut {
            *v = 0.0;
        }
    }
}
