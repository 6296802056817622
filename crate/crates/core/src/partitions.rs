//! Integer partitions (Young diagrams) and the exact combinatorics attached to
//! them: enumeration, dominance, hook lengths, irreducible dimensions and
//! conjugacy-class sizes of the symmetric group.
//!
//! All arithmetic is exact in `u128`. The degree is capped at [`MAX_N`] so
//! that `n!` always fits.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Largest supported degree.
pub const MAX_N: usize = 20;

/// A partition of `n`: a non-increasing list of positive parts.
///
/// Ordering is lexicographic on the parts, so `[4] > [3,1] > [2,2]`.
/// [`enumerate_partitions`] lists partitions from largest to smallest in
/// this order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    parts: Vec<usize>,
    n: usize,
}

impl Partition {
    /// Validates a non-increasing list of positive parts.
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return domain(format!("partition {parts:?} has a zero part"));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return domain(format!("partition {parts:?} is not non-increasing"));
        }
        let n = parts.iter().sum();
        Ok(Partition { parts, n })
    }

    /// Sorts arbitrary positive parts into canonical order (e.g. cycle lengths).
    pub fn from_unsorted(mut parts: Vec<usize>) -> Result<Self> {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self::new(parts)
    }

    /// The one-row partition `[n]`.
    pub fn row(n: usize) -> Self {
        assert!(n >= 1, "row partition needs n >= 1");
        Partition { parts: vec![n], n }
    }

    /// The one-column partition `[1^n]`.
    pub fn column(n: usize) -> Self {
        assert!(n >= 1, "column partition needs n >= 1");
        Partition { parts: vec![1; n], n }
    }

    /// The hook `[n-i, 1^i]`.
    pub fn hook(n: usize, i: usize) -> Result<Self> {
        if n == 0 || i >= n {
            return domain(format!("hook [n-i,1^i] needs 0 <= i < n (n={n}, i={i})"));
        }
        let mut parts = vec![n - i];
        parts.extend(std::iter::repeat_n(1, i));
        Ok(Partition { parts, n })
    }

    /// The shape `[a, b, 1^c]`; `b = 0` gives the pure hook `[a, 1^c]`.
    pub fn two_row_hook(a: usize, b: usize, c: usize) -> Result<Self> {
        if a == 0 || b > a {
            return domain(format!("[a,b,1^c] needs a >= b >= 0 and a >= 1 (got {a},{b},{c})"));
        }
        if b == 0 {
            let mut parts = vec![a];
            parts.extend(std::iter::repeat_n(1, c));
            return Self::new(parts);
        }
        let mut parts = vec![a, b];
        parts.extend(std::iter::repeat_n(1, c));
        Self::new(parts)
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// The degree `n` (sum of parts).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of rows, `r(λ)`.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Part `i` (0-based), reading missing parts as zero.
    pub fn part(&self, i: usize) -> usize {
        self.parts.get(i).copied().unwrap_or(0)
    }

    /// True for shapes `[a, 1^c]`.
    pub fn is_hook(&self) -> bool {
        self.parts.iter().skip(1).all(|&p| p == 1)
    }

    /// True for shapes `[a, b, 1^c]` (at most two rows longer than one).
    pub fn is_two_row_hook(&self) -> bool {
        self.parts.iter().skip(2).all(|&p| p == 1)
    }

    /// Multiplicity of each part size.
    pub fn multiplicities(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for &p in &self.parts {
            *m.entry(p).or_insert(0) += 1;
        }
        m
    }

    /// Multiplicity of part `k`.
    pub fn multiplicity(&self, k: usize) -> usize {
        self.parts.iter().filter(|&&p| p == k).count()
    }

    /// Transposed diagram.
    pub fn conjugate(&self) -> Partition {
        let cols = self.part(0);
        let parts: Vec<usize> = (0..cols)
            .map(|j| self.parts.iter().filter(|&&p| p > j).count())
            .collect();
        Partition { parts, n: self.n }
    }

    /// Hook lengths, row by row.
    pub fn hook_lengths(&self) -> Vec<usize> {
        let conj = self.conjugate();
        let mut hooks = Vec::with_capacity(self.n);
        for (i, &row) in self.parts.iter().enumerate() {
            for j in 0..row {
                hooks.push((row - j - 1) + (conj.parts[j] - i - 1) + 1);
            }
        }
        hooks
    }

    /// Dimension of the irreducible representation `U_λ`, by the hook-length
    /// formula.
    pub fn dimension(&self) -> u128 {
        let num = factorial(self.n).expect("partition degree exceeds MAX_N");
        let den: u128 = self.hook_lengths().iter().map(|&h| h as u128).product();
        num / den
    }

    /// Number of permutations of cycle type `self`.
    pub fn class_size(&self) -> u128 {
        let num = factorial(self.n).expect("partition degree exceeds MAX_N");
        let den: u128 = self
            .multiplicities()
            .iter()
            .map(|(&j, &m)| (j as u128).pow(m as u32) * factorial(m).unwrap())
            .product();
        num / den
    }

    /// Order of the Young subgroup `S_{λ_1} × … × S_{λ_r}`.
    pub fn young_subgroup_order(&self) -> u128 {
        self.parts.iter().map(|&p| factorial(p).unwrap()).product()
    }

    /// Diagram containment `μ ⊆ λ`.
    pub fn contains(&self, other: &Partition) -> bool {
        other.len() <= self.len() && other.parts.iter().zip(&self.parts).all(|(o, s)| o <= s)
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;

    fn try_from(parts: Vec<usize>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

/// `n!` with an explicit bound check.
pub fn factorial(n: usize) -> Result<u128> {
    if n > MAX_N {
        return domain(format!("factorial of {n} exceeds the supported bound {MAX_N}"));
    }
    Ok((1..=n as u128).product())
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// All partitions of `n`, from `[n]` down to `[1^n]` in reverse
/// lexicographic order.
pub fn enumerate_partitions(n: usize) -> Result<Vec<Partition>> {
    if n == 0 || n > MAX_N {
        return domain(format!("enumerate_partitions needs 1 <= n <= {MAX_N}, got {n}"));
    }
    fn rec(remaining: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        for p in (1..=max.min(remaining)).rev() {
            prefix.push(p);
            rec(remaining - p, p, prefix, out);
            prefix.pop();
        }
    }
    let mut raw = Vec::new();
    rec(n, n, &mut Vec::with_capacity(n), &mut raw);
    Ok(raw.into_iter().map(|parts| Partition { parts, n }).collect())
}

/// Dominance order: every prefix sum of `sigma` is at least that of `rho`.
pub fn dominates(sigma: &Partition, rho: &Partition) -> Result<bool> {
    if sigma.n != rho.n {
        return domain(format!("dominance needs equal degrees ({} vs {})", sigma.n, rho.n));
    }
    let len = sigma.len().max(rho.len());
    let (mut s, mut r) = (0, 0);
    for i in 0..len {
        s += sigma.part(i);
        r += rho.part(i);
        if s < r {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Closed form `dim U_[a,b,1^c] = b(a-b+1) / ((b+c)(a+c+1)) · n!/(a! b! c!)`.
pub fn hook_dimension_formula(a: usize, b: usize, c: usize) -> Result<u128> {
    if b == 0 || a < b {
        return domain(format!("closed form needs a >= b >= 1 (got a={a}, b={b})"));
    }
    let n = a + b + c;
    let multinomial = factorial(n)? / (factorial(a)? * factorial(b)? * factorial(c)?);
    let num = (b * (a - b + 1)) as u128 * multinomial;
    let den = ((b + c) * (a + c + 1)) as u128;
    debug_assert_eq!(num % den, 0);
    Ok(num / den)
}
