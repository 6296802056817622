//! Symmetric functions of degree `n` in the monomial and Schur bases.
//!
//! Expansions are sparse partition-indexed coefficient vectors with exact
//! rational coefficients; no polynomial in the variables is ever expanded.
//! The number of variables is taken equal to the degree, so no partition of
//! `n` is truncated.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::marker::PhantomData;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::exact::{CoeffEntry, Rational};
use crate::partitions::{enumerate_partitions, Partition};

pub trait Basis: Clone + fmt::Debug + Default {
    const NAME: &'static str;
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Monomial;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Schur;

impl Basis for Monomial {
    const NAME: &'static str = "monomial";
}

impl Basis for Schur {
    const NAME: &'static str = "schur";
}

/// A homogeneous symmetric function of degree `n` written in basis `B`.
#[derive(Clone, PartialEq, Eq)]
pub struct Expansion<B: Basis> {
    n: usize,
    coeffs: BTreeMap<Partition, Rational>,
    basis: PhantomData<B>,
}

/// Coefficients on the monomial symmetric functions `M_λ`.
pub type MonomialExpansion = Expansion<Monomial>;
/// Coefficients on the Schur functions `S_μ`.
pub type SchurExpansion = Expansion<Schur>;

impl<B: Basis> Expansion<B> {
    pub fn zero(n: usize) -> Self {
        Expansion { n, coeffs: BTreeMap::new(), basis: PhantomData }
    }

    /// A single basis element with coefficient one.
    pub fn basis_element(lambda: Partition) -> Self {
        let mut e = Self::zero(lambda.n());
        e.coeffs.insert(lambda, Rational::one());
        e
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Partition, Rational)>) -> Result<Self> {
        let mut e = Self::zero(n);
        for (lambda, c) in terms {
            e.add_term(lambda, c)?;
        }
        Ok(e)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Adds `c` to the coefficient of `lambda`, dropping it if it cancels.
    pub fn add_term(&mut self, lambda: Partition, c: Rational) -> Result<()> {
        if lambda.n() != self.n {
            return domain(format!("{lambda} is not a partition of {}", self.n));
        }
        if c.is_zero() {
            return Ok(());
        }
        let entry = self.coeffs.entry(lambda).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.retain(|_, v| !v.is_zero());
        }
        Ok(())
    }

    pub fn coeff(&self, lambda: &Partition) -> Rational {
        self.coeffs.get(lambda).copied().unwrap_or_else(Rational::zero)
    }

    /// Nonzero terms, largest partition first.
    pub fn terms(&self) -> impl Iterator<Item = (&Partition, &Rational)> {
        self.coeffs.iter().rev()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, s: Rational) -> Self {
        let mut out = Self::zero(self.n);
        if !s.is_zero() {
            out.coeffs = self.coeffs.iter().map(|(k, v)| (k.clone(), *v * s)).collect();
        }
        out
    }

    fn combine(mut self, rhs: &Self, sign: Rational) -> Self {
        assert_eq!(self.n, rhs.n, "adding expansions of different degree");
        for (k, v) in &rhs.coeffs {
            self.add_term(k.clone(), *v * sign).expect("degree checked");
        }
        self
    }
}

impl<B: Basis> Add for Expansion<B> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.combine(&rhs, Rational::one())
    }
}

impl<B: Basis> Sub for Expansion<B> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.combine(&rhs, -Rational::one())
    }
}

impl<B: Basis> Neg for Expansion<B> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-Rational::one())
    }
}

impl<B: Basis> fmt::Debug for Expansion<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = if B::NAME == "schur" { "S" } else { "M" };
        if self.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, v)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({v}){sym}{k}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct ExpansionJson {
    n: usize,
    basis: String,
    coeffs: Vec<CoeffEntry>,
}

impl<B: Basis> Serialize for Expansion<B> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ExpansionJson {
            n: self.n,
            basis: B::NAME.to_string(),
            coeffs: self.terms().map(|(k, v)| CoeffEntry::new(k.clone(), *v)).collect(),
        }
        .serialize(s)
    }
}

impl<'de, B: Basis> Deserialize<'de> for Expansion<B> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = ExpansionJson::deserialize(d)?;
        if raw.basis != B::NAME {
            return Err(D::Error::custom(format!("expected basis {:?}, found {:?}", B::NAME, raw.basis)));
        }
        let mut e = Self::zero(raw.n);
        for entry in raw.coeffs {
            if entry.den == 0 {
                return Err(D::Error::custom("zero denominator"));
            }
            e.add_term(entry.partition.clone(), entry.value()).map_err(D::Error::custom)?;
        }
        Ok(e)
    }
}

/// Number of semistandard Young tableaux of shape `mu` and content `lambda`.
///
/// Entries are placed largest first: the cells holding the largest value
/// form a horizontal strip on the rim, so the count recurses over strip
/// removals, memoized on the remaining shape and content length.
pub fn kostka(mu: &Partition, lambda: &Partition) -> Result<u128> {
    if mu.n() != lambda.n() {
        return domain(format!("kostka needs equal degrees ({mu} vs {lambda})"));
    }
    let mut memo = HashMap::new();
    Ok(kostka_rec(mu.parts().to_vec(), lambda.parts(), &mut memo))
}

fn kostka_rec(shape: Vec<usize>, content: &[usize], memo: &mut HashMap<(Vec<usize>, usize), u128>) -> u128 {
    let Some((&last, rest)) = content.split_last() else {
        return u128::from(shape.is_empty());
    };
    // columns strictly increase, so a shape with more rows than remaining
    // values cannot be filled
    if shape.len() > content.len() {
        return 0;
    }
    let key = (shape.clone(), content.len());
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let mut total = 0;
    for inner in horizontal_strip_removals(&shape, last) {
        total += kostka_rec(inner, rest, memo);
    }
    memo.insert(key, total);
    total
}

/// Shapes `ν ⊆ shape` with `shape/ν` a horizontal strip of `size` cells.
fn horizontal_strip_removals(shape: &[usize], size: usize) -> Vec<Vec<usize>> {
    fn rec(shape: &[usize], row: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if row == shape.len() {
            if left == 0 {
                let mut v = cur.clone();
                while v.last() == Some(&0) {
                    v.pop();
                }
                out.push(v);
            }
            return;
        }
        let lower = shape.get(row + 1).copied().unwrap_or(0);
        let max_take = (shape[row] - lower).min(left);
        for take in 0..=max_take {
            cur.push(shape[row] - take);
            rec(shape, row + 1, left - take, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(shape, 0, size, &mut Vec::with_capacity(shape.len()), &mut out);
    out
}

/// Shapes obtained from `shape` by adding a horizontal strip of `size` cells.
fn horizontal_strip_additions(shape: &[usize], size: usize) -> Vec<Vec<usize>> {
    fn rec(shape: &[usize], row: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if row > shape.len() {
            if left == 0 {
                let mut v = cur.clone();
                while v.last() == Some(&0) {
                    v.pop();
                }
                out.push(v);
            }
            return;
        }
        let base = shape.get(row).copied().unwrap_or(0);
        // no two new cells in one column: a row grows at most to the old
        // length of the row above it
        let cap = if row == 0 { left } else { (shape[row - 1] - base).min(left) };
        for add in (0..=cap).rev() {
            cur.push(base + add);
            rec(shape, row + 1, left - add, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(shape, 0, size, &mut Vec::with_capacity(shape.len() + 1), &mut out);
    out
}

/// Kostka matrix for degree `n`, indexed by `enumerate_partitions(n)`.
pub fn kostka_matrix(n: usize) -> Result<Vec<Vec<u128>>> {
    let parts = enumerate_partitions(n)?;
    parts
        .iter()
        .map(|mu| parts.iter().map(|lambda| kostka(mu, lambda)).collect())
        .collect()
}

/// `S_μ = Σ_λ K_{μλ} M_λ`.
pub fn schur_to_monomial(e: &SchurExpansion) -> Result<MonomialExpansion> {
    let mut out = MonomialExpansion::zero(e.n());
    if e.is_empty() {
        return Ok(out);
    }
    let all = enumerate_partitions(e.n())?;
    for (mu, c) in e.terms() {
        for lambda in all.iter().filter(|l| *l <= mu) {
            let k = kostka(mu, lambda)?;
            if k != 0 {
                out.add_term(lambda.clone(), *c * Rational::from_integer(k as i128))?;
            }
        }
    }
    Ok(out)
}

/// Inverts [`schur_to_monomial`] by forward substitution: the Kostka matrix
/// is unitriangular with respect to lexicographic order.
pub fn monomial_to_schur(e: &MonomialExpansion) -> Result<SchurExpansion> {
    let mut out = SchurExpansion::zero(e.n());
    if e.is_empty() {
        return Ok(out);
    }
    let all = enumerate_partitions(e.n())?;
    for lambda in &all {
        let mut c = e.coeff(lambda);
        for (mu, s) in out.coeffs.iter() {
            if mu > lambda {
                let k = kostka(mu, lambda)?;
                if k != 0 {
                    c -= *s * Rational::from_integer(k as i128);
                }
            }
        }
        out.add_term(lambda.clone(), c)?;
    }
    Ok(out)
}

/// Pieri rule: `S_λ · H_m` as the sum of `S_ν` over shapes `ν` obtained by
/// adding `m` boxes to `λ`, no two in the same column.
pub fn pieri_multiply(lambda: &Partition, m: usize) -> Result<SchurExpansion> {
    if m == 0 {
        return domain("pieri_multiply needs m >= 1");
    }
    Ok(pieri_unchecked(lambda, m))
}

fn pieri_unchecked(lambda: &Partition, m: usize) -> SchurExpansion {
    let mut out = SchurExpansion::zero(lambda.n() + m);
    for nu in horizontal_strip_additions(lambda.parts(), m) {
        let nu = Partition::new(nu).expect("strip addition keeps shapes valid");
        out.add_term(nu, Rational::one()).expect("degree matches");
    }
    out
}

/// `H_n` in the monomial basis: every `M_λ` with coefficient one.
pub fn complete_homogeneous(n: usize) -> Result<MonomialExpansion> {
    let all = enumerate_partitions(n)?;
    MonomialExpansion::from_terms(n, all.into_iter().map(|l| (l, Rational::one())))
}

/// Number of parts of `lambda` that are at least `k`.
pub fn parts_at_least(lambda: &Partition, k: usize) -> usize {
    lambda.parts().iter().filter(|&&p| p >= k).count()
}

/// Frobenius characteristic of the `k`-cycle counting function: coefficient
/// `#{i : λ_i >= k} / k` on `M_λ`.
pub fn ch_alpha_k(n: usize, k: usize) -> Result<MonomialExpansion> {
    if k == 0 || k > n {
        return domain(format!("ch_alpha_k needs 1 <= k <= n (n={n}, k={k})"));
    }
    let all = enumerate_partitions(n)?;
    MonomialExpansion::from_terms(
        n,
        all.into_iter()
            .map(|l| {
                let beta = parts_at_least(&l, k) as i128;
                (l, Rational::new(beta, k as i128))
            }),
    )
}

/// `(Σ x_i^k) · H_{n-k}` in the Schur basis, assembled as the alternating
/// sum over hooks `Σ_i (-1)^i S_[k-i,1^i] · H_{n-k}` with each product
/// expanded by the Pieri rule.
pub fn derive_a_rho_via_pieri(n: usize, k: usize) -> Result<SchurExpansion> {
    if k == 0 || k > n {
        return domain(format!("derive_a_rho_via_pieri needs 1 <= k <= n (n={n}, k={k})"));
    }
    let mut total = SchurExpansion::zero(n);
    for i in 0..k {
        let hook = Partition::hook(k, i)?;
        let term = if n == k { SchurExpansion::basis_element(hook) } else { pieri_unchecked(&hook, n - k) };
        total = if i % 2 == 0 { total + term } else { total - term };
    }
    Ok(total)
}

impl TryFrom<MonomialExpansion> for SchurExpansion {
    type Error = Error;
    fn try_from(e: MonomialExpansion) -> Result<Self> {
        monomial_to_schur(&e)
    }
}
