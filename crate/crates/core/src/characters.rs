//! Class functions on the symmetric group and their decomposition into
//! irreducible characters.
//!
//! A class function is stored by cycle type. Irreducible characters come
//! from the Murnaghan–Nakayama rule, and Young-subgroup averages are taken
//! over the cycle-type distribution of `S_{λ_1} × … × S_{λ_r}` rather than
//! over group elements.

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{capability, domain, Result};
use crate::exact::{CoeffEntry, Rational};
use crate::partitions::{enumerate_partitions, factorial, Partition, MAX_N};

/// Largest degree for which full character tables are materialized.
pub const MAX_TABLE_N: usize = 8;

/// A rational-valued function on the conjugacy classes of `S_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassFunction {
    n: usize,
    values: BTreeMap<Partition, Rational>,
}

impl ClassFunction {
    pub fn from_fn(n: usize, mut f: impl FnMut(&Partition) -> Rational) -> Result<Self> {
        let values = enumerate_partitions(n)?.into_iter().map(|mu| {
            let v = f(&mu);
            (mu, v)
        });
        Ok(ClassFunction { n, values: values.collect() })
    }

    pub fn constant(n: usize, c: Rational) -> Result<Self> {
        Self::from_fn(n, |_| c)
    }

    /// The irreducible character `χ_ρ` as a class function.
    pub fn character(rho: &Partition) -> Result<Self> {
        let n = rho.n();
        if n <= MAX_TABLE_N {
            let table = character_table(n)?;
            let row = table.index_of(rho);
            return Self::from_fn(n, |mu| Rational::from_integer(table.values[row][table.index_of(mu)]));
        }
        let mut err = None;
        let f = Self::from_fn(n, |mu| match mn_character(rho, mu) {
            Ok(v) => Rational::from_integer(v),
            Err(e) => {
                err = Some(e);
                Rational::zero()
            }
        })?;
        match err {
            Some(e) => Err(e),
            None => Ok(f),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self, cycle_type: &Partition) -> Rational {
        self.values.get(cycle_type).copied().unwrap_or_else(Rational::zero)
    }

    pub fn values(&self) -> impl Iterator<Item = (&Partition, &Rational)> {
        self.values.iter().rev()
    }
}

/// `α_k`: number of `k`-cycles, as a class function on `S_n`.
pub fn alpha_k(n: usize, k: usize) -> Result<ClassFunction> {
    if k == 0 || k > n {
        return domain(format!("alpha_k needs 1 <= k <= n (n={n}, k={k})"));
    }
    ClassFunction::from_fn(n, |mu| Rational::from_integer(mu.multiplicity(k) as i128))
}

/// Murnaghan–Nakayama: `χ_ρ` on the class of cycle type `mu`.
pub fn mn_character(rho: &Partition, mu: &Partition) -> Result<i128> {
    if rho.n() != mu.n() {
        return domain(format!("character needs equal degrees ({rho} vs {mu})"));
    }
    let mut memo = HashMap::new();
    Ok(mn_rec(&beta_set(rho.parts()), mu.parts(), &mut memo))
}

/// Beta-numbers `ρ_i + (r - i)` (0-based `i`), strictly decreasing.
fn beta_set(parts: &[usize]) -> Vec<usize> {
    let r = parts.len();
    parts.iter().enumerate().map(|(i, &p)| p + (r - 1 - i)).collect()
}

/// Removing a border strip of length `l` moves one bead from `b` to the
/// free position `b - l`; the strip height is the number of beads jumped.
fn mn_rec(beta: &[usize], cycles: &[usize], memo: &mut HashMap<(Vec<usize>, usize), i128>) -> i128 {
    let Some((&l, rest)) = cycles.split_first() else {
        return 1;
    };
    let key = (beta.to_vec(), cycles.len());
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let mut total = 0;
    for (idx, &b) in beta.iter().enumerate() {
        if b < l {
            continue;
        }
        let target = b - l;
        if beta.contains(&target) {
            continue;
        }
        let height = beta.iter().filter(|&&x| x > target && x < b).count();
        let mut next: Vec<usize> = beta.to_vec();
        next[idx] = target;
        next.sort_unstable_by(|x, y| y.cmp(x));
        let sign = if height % 2 == 0 { 1 } else { -1 };
        total += sign * mn_rec(&normalize_beta(next), rest, memo);
    }
    memo.insert(key, total);
    total
}

/// Drops the beads that encode zero-length rows so that equal shapes share
/// one memo key.
fn normalize_beta(mut beta: Vec<usize>) -> Vec<usize> {
    // beads sitting at 0, 1, .., j-1 at the bottom are empty rows
    let mut shift = 0;
    while let Some(&last) = beta.last() {
        if last == shift {
            beta.pop();
            shift += 1;
        } else {
            break;
        }
    }
    beta.iter().map(|b| b - shift).collect()
}

/// Character table of `S_n`, rows and columns in enumeration order.
#[derive(Clone, Debug, Serialize)]
pub struct CharacterTable {
    pub partitions: Vec<Partition>,
    /// `values[ρ][μ] = χ_ρ(μ)`.
    pub values: Vec<Vec<i128>>,
}

impl CharacterTable {
    pub fn index_of(&self, p: &Partition) -> usize {
        // enumeration order is strictly decreasing
        self.partitions.binary_search_by(|q| p.cmp(q)).expect("partition of the table degree")
    }
}

fn build_table(n: usize) -> Result<CharacterTable> {
    let partitions = enumerate_partitions(n)?;
    let values = partitions
        .iter()
        .map(|rho| partitions.iter().map(|mu| mn_character(rho, mu)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(CharacterTable { partitions, values })
}

/// Cached character table for `1 <= n <= 8`.
pub fn character_table(n: usize) -> Result<&'static CharacterTable> {
    static TABLES: [OnceLock<CharacterTable>; MAX_TABLE_N + 1] = [const { OnceLock::new() }; MAX_TABLE_N + 1];
    if n == 0 {
        return domain("character table needs n >= 1");
    }
    if n > MAX_TABLE_N {
        return capability(format!("character tables are materialized only for n <= {MAX_TABLE_N} (requested n={n})"));
    }
    if let Some(t) = TABLES[n].get() {
        return Ok(t);
    }
    let table = build_table(n)?;
    Ok(TABLES[n].get_or_init(|| table))
}

/// `⟨f, g⟩ = (1/n!) Σ_μ |C_μ| f(μ) g(μ)`.
pub fn inner_product(f: &ClassFunction, g: &ClassFunction) -> Result<Rational> {
    if f.n != g.n {
        return domain(format!("inner product of class functions on S_{} and S_{}", f.n, g.n));
    }
    let order = factorial(f.n)? as i128;
    let mut acc = Rational::zero();
    for (mu, fv) in &f.values {
        let size = mu.class_size() as i128;
        acc += *fv * g.value(mu) * Rational::new(size, order);
    }
    Ok(acc)
}

/// Number of elements of each cycle type in the Young subgroup
/// `S_{λ_1} × … × S_{λ_r}`.
pub fn young_subgroup_cycle_types(lambda: &Partition) -> BTreeMap<Partition, u128> {
    let mut dist: BTreeMap<Vec<usize>, u128> = BTreeMap::from([(Vec::new(), 1)]);
    for &m in lambda.parts() {
        let factor: Vec<(Vec<usize>, u128)> = enumerate_partitions(m)
            .expect("part within bounds")
            .into_iter()
            .map(|mu| {
                let size = mu.class_size();
                (Vec::from(mu), size)
            })
            .collect();
        let mut next = BTreeMap::new();
        for (acc, count) in &dist {
            for (parts, size) in &factor {
                let mut merged = acc.clone();
                merged.extend_from_slice(parts);
                merged.sort_unstable_by(|a, b| b.cmp(a));
                *next.entry(merged).or_insert(0) += count * size;
            }
        }
        dist = next;
    }
    dist.into_iter()
        .map(|(parts, c)| (Partition::new(parts).expect("sorted positive parts"), c))
        .collect()
}

/// `⟨f, ψ_λ⟩`: the average of `f` over the Young subgroup `T_λ`.
pub fn psi_inner_product(f: &ClassFunction, lambda: &Partition) -> Result<Rational> {
    if f.n != lambda.n() {
        return domain(format!("class function on S_{} paired with {lambda}", f.n));
    }
    let order = lambda.young_subgroup_order() as i128;
    let mut acc = Rational::zero();
    for (mu, count) in young_subgroup_cycle_types(lambda) {
        acc += f.value(&mu) * Rational::new(count as i128, order);
    }
    Ok(acc)
}

/// Coefficients `⟨f, χ_ρ⟩` of `f` on the irreducible characters; zero
/// coefficients are omitted.
pub fn decompose(f: &ClassFunction) -> Result<BTreeMap<Partition, Rational>> {
    if f.n > MAX_TABLE_N {
        return capability(format!("decompose is limited to n <= {MAX_TABLE_N} (requested n={})", f.n));
    }
    let table = character_table(f.n)?;
    let order = factorial(f.n)? as i128;
    let sizes: Vec<i128> = table.partitions.iter().map(|mu| mu.class_size() as i128).collect();
    let mut out = BTreeMap::new();
    for (rho, row) in table.partitions.iter().zip(&table.values) {
        let mut c = Rational::zero();
        for ((mu, &chi), &size) in table.partitions.iter().zip(row).zip(&sizes) {
            c += f.value(mu) * Rational::new(chi * size, order);
        }
        if !c.is_zero() {
            out.insert(rho.clone(), c);
        }
    }
    Ok(out)
}

/// `Σ_ρ c_ρ χ_ρ` evaluated on every class.
pub fn reconstruct(n: usize, coeffs: &BTreeMap<Partition, Rational>) -> Result<ClassFunction> {
    let mut chars = Vec::with_capacity(coeffs.len());
    for (rho, c) in coeffs {
        if rho.n() != n {
            return domain(format!("{rho} is not a partition of {n}"));
        }
        chars.push((ClassFunction::character(rho)?, *c));
    }
    ClassFunction::from_fn(n, |mu| chars.iter().map(|(chi, c)| chi.value(mu) * *c).sum())
}

/// The coefficient table `a_ρ` for `k · α_k = Σ_ρ a_ρ χ_ρ`:
///
/// * `a_[n] = 1`;
/// * `a_[k-i-1, n-k+1, 1^i] = (-1)^{i+1}` for `0 <= i <= 2k-n-2`;
/// * `a_[n-k, k-i, 1^i] = (-1)^i` for `max(2k-n, 0) <= i <= k-1`;
/// * zero otherwise. Empty ranges contribute nothing.
pub fn a_rho_closed_form(n: usize, k: usize) -> Result<BTreeMap<Partition, i32>> {
    if k == 0 || k > n || n > MAX_N {
        return domain(format!("a_rho needs 1 <= k <= n <= {MAX_N} (n={n}, k={k})"));
    }
    let sign = |e: usize| if e.is_multiple_of(2) { 1 } else { -1 };
    let mut out = BTreeMap::new();
    out.insert(Partition::row(n), 1);
    let (n_i, k_i) = (n as i64, k as i64);
    for i in 0..=(2 * k_i - n_i - 2).max(-1) {
        let i = i as usize;
        let rho = Partition::two_row_hook(k - i - 1, n - k + 1, i)?;
        let prev = out.insert(rho, sign(i + 1));
        debug_assert!(prev.is_none());
    }
    let start = (2 * k_i - n_i).max(0) as usize;
    for i in start..k {
        let rho = Partition::two_row_hook(n - k, k - i, i)?;
        let prev = out.insert(rho, sign(i));
        debug_assert!(prev.is_none());
    }
    Ok(out)
}

/// Serializable coefficient list in enumeration order.
pub fn coefficient_entries(coeffs: &BTreeMap<Partition, Rational>) -> Vec<CoeffEntry> {
    coeffs.iter().rev().map(|(p, c)| CoeffEntry::new(p.clone(), *c)).collect()
}

/// `a_rho_closed_form` scaled by `1/k`, in the form returned by
/// [`decompose`].
pub fn alpha_k_coefficients(n: usize, k: usize) -> Result<BTreeMap<Partition, Rational>> {
    Ok(a_rho_closed_form(n, k)?
        .into_iter()
        .map(|(p, a)| (p, Rational::new(a as i128, k as i128)))
        .collect())
}

/// For every shape `[a, b, 1^c]` other than `[n]`, the values of `k` with
/// `a_ρ(n, k) != 0`, with their signs.
pub fn nonzero_k_by_shape(n: usize) -> Result<BTreeMap<Partition, Vec<(usize, i32)>>> {
    let mut out: BTreeMap<Partition, Vec<(usize, i32)>> = BTreeMap::new();
    for rho in enumerate_partitions(n)? {
        if rho.is_two_row_hook() && rho.len() > 1 {
            out.insert(rho, Vec::new());
        }
    }
    for k in 1..=n {
        for (rho, a) in a_rho_closed_form(n, k)? {
            if let Some(v) = out.get_mut(&rho) {
                v.push((k, a));
            }
        }
    }
    Ok(out)
}
