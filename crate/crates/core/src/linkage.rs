//! Linked and unlinked indices in `(Z/p²)^k` and the subspace counts that
//! govern the moments.
//!
//! An index `u = (u_1, …, u_k)` with `u_i = u_{i1}·p + u_{i2}` is identified
//! with the vector `(u_{11}, u_{12}, u_{21}, u_{22}, …) ∈ F_p^{2k}`. Two
//! indices are linked when `Φ_k(u, v) = Σ_i u_{i1}(v_{i2} − u_{i2})` is
//! nonzero in either order. Throughout, `q(·)` projects onto the high digits
//! `u_{i1}` (odd positions, 1-based) and `p(·)` onto the low digits `u_{i2}`
//! (even positions).
//!
//! Maximal unlinked sets are translates of the `k`-dimensional subspaces
//! `V = p(V)^⊥ ⊕ p(V)`, where `p(V)^⊥` (standard dot product on `F_p^k`) sits
//! in the high-digit coordinates.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinkageError {
    #[error("index vectors differ in shape: (p={0}, k={1}) vs (p={2}, k={3})")]
    DimensionMismatch(u64, usize, u64, usize),
    #[error("brute-force enumeration over {0} indices exceeds the limit of {1}")]
    TooLarge(u64, u64),
}

/// Largest `p^{2k}` accepted by the brute-force enumerator.
pub const BRUTE_FORCE_LIMIT: u64 = 729;

/// An element of `(Z/p²)^k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexVector {
    p: u64,
    coords: Vec<u64>,
}

impl IndexVector {
    pub fn new(p: u64, coords: Vec<u64>) -> Self {
        assert!(coords.iter().all(|&c| c < p * p), "coordinates lie in Z/p²");
        Self { p, coords }
    }

    /// Decode the integer `Σ_i coords[i]·(p²)^i`.
    pub fn from_index(p: u64, k: usize, mut index: u64) -> Self {
        let m = p * p;
        let coords = (0..k)
            .map(|_| {
                let c = index % m;
                index /= m;
                c
            })
            .collect();
        Self { p, coords }
    }

    pub fn index(&self) -> u64 {
        let m = self.p * self.p;
        self.coords.iter().rev().fold(0, |acc, &c| acc * m + c)
    }

    /// The flat vector `(u_{11}, u_{12}, …, u_{k1}, u_{k2})` in `F_p^{2k}`.
    pub fn from_flat(p: u64, flat: &[u64]) -> Self {
        let coords = flat.chunks(2).map(|d| d[0] * p + d[1]).collect();
        Self { p, coords }
    }

    pub fn flat(&self) -> Vec<u64> {
        self.coords.iter().flat_map(|&c| [c / self.p, c % self.p]).collect()
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    /// `(u_{i1}, u_{i2})`.
    pub fn digits(&self, i: usize) -> (u64, u64) {
        (self.coords[i] / self.p, self.coords[i] % self.p)
    }

    /// `Φ_k(self, v) = Σ_i u_{i1}(v_{i2} − u_{i2}) mod p`.
    pub fn phi_k(&self, v: &IndexVector) -> Result<u64, LinkageError> {
        if self.p != v.p || self.k() != v.k() {
            return Err(LinkageError::DimensionMismatch(self.p, self.k(), v.p, v.k()));
        }
        Ok(phi_flat(self.p, &self.flat(), &v.flat()))
    }
}

pub fn phi_k(u: &IndexVector, v: &IndexVector) -> Result<u64, LinkageError> {
    u.phi_k(v)
}

fn phi_flat(p: u64, u: &[u64], v: &[u64]) -> u64 {
    u.chunks(2).zip(v.chunks(2)).map(|(a, b)| a[0] * ((b[1] + p - a[1]) % p)).sum::<u64>() % p
}

fn unlinked_flat(p: u64, u: &[u64], v: &[u64]) -> bool {
    phi_flat(p, u, v) == 0 && phi_flat(p, v, u) == 0
}

pub fn is_unlinked_set(set: &[IndexVector]) -> Result<bool, LinkageError> {
    for (i, u) in set.iter().enumerate() {
        for v in &set[i + 1..] {
            if u.phi_k(v)? != 0 || v.phi_k(u)? != 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnumerationMethod {
    /// Maximal clique enumeration in the unlinked graph.
    Brute,
    /// Translates of `p(V)^⊥ ⊕ p(V)`.
    Subspace,
}

/// A maximal unlinked set as a sorted list of [`IndexVector::index`] codes.
pub type IndexSet = Vec<u64>;

/// All maximal unlinked subsets of `(Z/p²)^k`, each sorted, in sorted order.
pub fn enumerate_maximal_unlinked_sets(
    p: u64,
    k: usize,
    method: EnumerationMethod,
) -> Result<Vec<IndexSet>, LinkageError> {
    match method {
        EnumerationMethod::Brute => brute_force_sets(p, k),
        EnumerationMethod::Subspace => Ok(subspace_sets(p, k)),
    }
}

fn brute_force_sets(p: u64, k: usize) -> Result<Vec<IndexSet>, LinkageError> {
    let n = (p * p).pow(k as u32);
    if n > BRUTE_FORCE_LIMIT {
        return Err(LinkageError::TooLarge(n, BRUTE_FORCE_LIMIT));
    }
    let n = n as usize;
    let flats: Vec<Vec<u64>> = (0..n).map(|i| IndexVector::from_index(p, k, i as u64).flat()).collect();
    let words = n.div_ceil(64);
    let mut adj = vec![vec![0u64; words]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && unlinked_flat(p, &flats[i], &flats[j]) {
                adj[i][j / 64] |= 1 << (j % 64);
            }
        }
    }
    let mut out = Vec::new();
    let all = Bits::full(n);
    bron_kerbosch(&adj, &mut Vec::new(), all, Bits::empty(n), &mut out);
    for s in out.iter_mut() {
        s.sort_unstable();
    }
    out.sort();
    Ok(out)
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn full(n: usize) -> Self {
        let mut b = Self::empty(n);
        for i in 0..n {
            b.0[i / 64] |= 1 << (i % 64);
        }
        b
    }
    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }
    fn and(&self, other: &[u64]) -> Bits {
        Bits(self.0.iter().zip(other).map(|(a, b)| a & b).collect())
    }
    fn and_not(&self, other: &[u64]) -> Bits {
        Bits(self.0.iter().zip(other).map(|(a, b)| a & !b).collect())
    }
    fn count_and(&self, other: &[u64]) -> u32 {
        self.0.iter().zip(other).map(|(a, b)| (a & b).count_ones()).sum()
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }
    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &bits)| {
            (0..64).filter(move |b| bits >> b & 1 == 1).map(move |b| w * 64 + b)
        })
    }
}

/// Bron–Kerbosch with Tomita pivoting; emits every maximal clique once.
fn bron_kerbosch(adj: &[Vec<u64>], r: &mut Vec<u64>, mut cand: Bits, mut excl: Bits, out: &mut Vec<IndexSet>) {
    if cand.is_empty() {
        if excl.is_empty() {
            out.push(r.clone());
        }
        return;
    }
    let pivot = cand.iter().chain(excl.iter()).max_by_key(|&u| cand.count_and(&adj[u])).unwrap();
    let branch: Vec<usize> = cand.and_not(&adj[pivot]).iter().collect();
    for v in branch {
        r.push(v as u64);
        bron_kerbosch(adj, r, cand.and(&adj[v]), excl.and(&adj[v]), out);
        r.pop();
        cand.clear(v);
        excl.set(v);
    }
}

fn subspace_sets(p: u64, k: usize) -> Vec<IndexSet> {
    let mut seen = BTreeSet::new();
    for v0 in all_subspaces(p, k) {
        let v0_perp = v0.orthogonal_complement();
        let v = interleave(&v0_perp, &v0);
        let members = v.elements();
        // translates by a with q(a) ∈ p(V)^⊥; a ranges over F_p^{2k}
        for a in all_vectors(p, 2 * k) {
            let qa: Vec<u64> = a.iter().step_by(2).copied().collect();
            if !v0_perp.contains(&qa) {
                continue;
            }
            let mut set: IndexSet = members
                .iter()
                .map(|m| {
                    let flat: Vec<u64> = m.iter().zip(&a).map(|(x, y)| (x + y) % p).collect();
                    IndexVector::from_flat(p, &flat).index()
                })
                .collect();
            set.sort_unstable();
            seen.insert(set);
        }
    }
    seen.into_iter().collect()
}

/// The subspace of `F_p^{2k}` whose high-digit part is `high` and low-digit
/// part is `low`.
fn interleave(high: &SubspaceBasis, low: &SubspaceBasis) -> SubspaceBasis {
    let k = high.dim_ambient;
    let p = high.p;
    let mut vecs = Vec::new();
    for b in &high.basis {
        vecs.push((0..2 * k).map(|i| if i % 2 == 0 { b[i / 2] } else { 0 }).collect());
    }
    for b in &low.basis {
        vecs.push((0..2 * k).map(|i| if i % 2 == 1 { b[i / 2] } else { 0 }).collect());
    }
    SubspaceBasis::from_vectors(p, 2 * k, vecs)
}

/// Every vector of `F_p^n`, lexicographic.
pub fn all_vectors(p: u64, n: usize) -> impl Iterator<Item = Vec<u64>> {
    let total = p.pow(n as u32);
    (0..total).map(move |mut idx| {
        let mut v = vec![0u64; n];
        for slot in v.iter_mut().rev() {
            *slot = idx % p;
            idx /= p;
        }
        v
    })
}

/// A subspace of `F_p^n` held as a basis in reduced row echelon form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubspaceBasis {
    p: u64,
    dim_ambient: usize,
    basis: Vec<Vec<u64>>,
}

fn inv_mod(a: u64, p: u64) -> u64 {
    crate::arith::pow_mod(a, p - 2, p)
}

impl SubspaceBasis {
    pub fn from_vectors(p: u64, n: usize, vecs: Vec<Vec<u64>>) -> Self {
        let mut rows: Vec<Vec<u64>> = vecs.into_iter().map(|v| v.into_iter().map(|x| x % p).collect()).collect();
        let mut rank = 0;
        for c in 0..n {
            let Some(piv) = (rank..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
            rows.swap(rank, piv);
            let inv = inv_mod(rows[rank][c], p);
            for x in rows[rank].iter_mut() {
                *x = *x * inv % p;
            }
            for i in 0..rows.len() {
                if i != rank && rows[i][c] != 0 {
                    let f = rows[i][c];
                    for j in 0..n {
                        rows[i][j] = (rows[i][j] + p * p - f * rows[rank][j] % p) % p;
                    }
                }
            }
            rank += 1;
        }
        rows.truncate(rank);
        Self { p, dim_ambient: n, basis: rows }
    }

    pub fn zero(p: u64, n: usize) -> Self {
        Self { p, dim_ambient: n, basis: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim_ambient
    }

    pub fn basis(&self) -> &[Vec<u64>] {
        &self.basis
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        let mut vecs = self.basis.clone();
        vecs.push(v.to_vec());
        SubspaceBasis::from_vectors(self.p, self.dim_ambient, vecs).dim() == self.dim()
    }

    /// All `p^dim` elements.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let p = self.p;
        all_vectors(p, self.dim())
            .map(|coef| {
                let mut v = vec![0u64; self.dim_ambient];
                for (c, b) in coef.iter().zip(&self.basis) {
                    for (x, y) in v.iter_mut().zip(b) {
                        *x = (*x + c * y) % p;
                    }
                }
                v
            })
            .collect()
    }

    /// `{x : x·b = 0 for all b}` under the standard dot product.
    pub fn orthogonal_complement(&self) -> SubspaceBasis {
        let p = self.p;
        let n = self.dim_ambient;
        let pivots: Vec<usize> =
            self.basis.iter().map(|row| row.iter().position(|&x| x != 0).unwrap()).collect();
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let vecs = free
            .iter()
            .map(|&f| {
                let mut v = vec![0u64; n];
                v[f] = 1;
                for (row, &pc) in self.basis.iter().zip(&pivots) {
                    v[pc] = (p - row[f]) % p;
                }
                v
            })
            .collect();
        SubspaceBasis::from_vectors(p, n, vecs)
    }

    /// Image under the coordinate projection onto `positions`.
    pub fn project(&self, positions: &[usize]) -> SubspaceBasis {
        let vecs = self.basis.iter().map(|b| positions.iter().map(|&i| b[i]).collect()).collect();
        SubspaceBasis::from_vectors(self.p, positions.len(), vecs)
    }
}

/// Every subspace of `F_p^n`, enumerated as reduced echelon forms.
pub fn all_subspaces(p: u64, n: usize) -> Vec<SubspaceBasis> {
    let mut out = Vec::new();
    for r in 0..=n {
        for pivots in combinations(n, r) {
            // free positions: (row i, column c) with c > pivot_i, c not a pivot
            let slots: Vec<(usize, usize)> = pivots
                .iter()
                .enumerate()
                .flat_map(|(i, &pc)| ((pc + 1)..n).filter(|c| !pivots.contains(c)).map(move |c| (i, c)))
                .collect();
            for fill in all_vectors(p, slots.len()) {
                let mut rows = vec![vec![0u64; n]; r];
                for (i, &pc) in pivots.iter().enumerate() {
                    rows[i][pc] = 1;
                }
                for (&(i, c), &x) in slots.iter().zip(&fill) {
                    rows[i][c] = x;
                }
                out.push(SubspaceBasis { p, dim_ambient: n, basis: rows });
            }
        }
    }
    out
}

fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, r, &mut Vec::new(), &mut out);
    out
}

/// Translate a set of flat vectors so that `a` moves to the origin.
pub fn translate_to_origin(p: u64, set: &[Vec<u64>], a: &[u64]) -> Vec<Vec<u64>> {
    set.iter().map(|u| u.iter().zip(a).map(|(x, y)| (x + p - y) % p).collect()).collect()
}

/// Closed under addition and scalar multiplication (and contains 0).
pub fn is_subspace(p: u64, set: &[Vec<u64>]) -> bool {
    let members: BTreeSet<&Vec<u64>> = set.iter().collect();
    let Some(first) = set.first() else { return false };
    if !members.contains(&vec![0u64; first.len()]) {
        return false;
    }
    set.iter().all(|u| {
        set.iter().all(|v| {
            let s: Vec<u64> = u.iter().zip(v).map(|(x, y)| (x + y) % p).collect();
            members.contains(&s)
        }) && (1..p).all(|c| members.contains(&u.iter().map(|x| x * c % p).collect::<Vec<u64>>()))
    })
}

/// `V = p(V)^⊥ ⊕ p(V)` with `p(V)^⊥` in the high-digit coordinates.
pub fn satisfies_characterization(v: &SubspaceBasis) -> bool {
    let k = v.ambient_dim() / 2;
    let low: Vec<usize> = (0..k).map(|i| 2 * i + 1).collect();
    let pv = v.project(&low);
    interleave(&pv.orthogonal_complement(), &pv) == *v
}

/// `n(k, r)`: number of `r`-dimensional subspaces of `F_p^k`.
pub fn n_subspaces(k: u32, r: u32, p: u64) -> BigUint {
    if r > k {
        return BigUint::zero();
    }
    let p = BigUint::from(p);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..r {
        num *= p.pow(k - i) - 1u32;
        den *= p.pow(r - i) - 1u32;
    }
    num / den
}

/// `N(k, p)`: number of subspaces of `F_p^k`.
pub fn count_subspaces(k: u32, p: u64) -> BigUint {
    (0..=k).map(|r| n_subspaces(k, r, p)).sum()
}

/// `Σ_r p^r n(k, r)`, the number of maximal unlinked sets.
pub fn count_maximal_unlinked(p: u64, k: u32) -> BigUint {
    let pb = BigUint::from(p);
    (0..=k).map(|r| pb.pow(r) * n_subspaces(k, r, p)).sum()
}
