//! Norm divisors and the rank of `φ(ker φ²)`.
//!
//! A divisor `b = ∏ l^{e_l}` (`e_l ∈ {0,1,2}`) of the discriminant is a
//! global norm from `K` iff it is a local norm at every ramified prime, and
//! at `l` that is the condition
//!
//! ```text
//! χ_l(b / l^{e_l}) · ∏_{q ≠ l} χ_q(l)^{-e_l} = 1.
//! ```
//!
//! Each class of `Cl_K^G` hit by the norm condition is represented by exactly
//! three such divisors, so `m = #{norm divisors}` is `3·|im φ|` and the rank
//! is `s = log₃(m/3)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fields::{fields_for_conductor, Conductor, CyclicCubicField, FieldError, LocalChar};
use crate::linkage::IndexVector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("exponent vector has length {got}, field has {expected} ramified primes")]
    DivisorShape { expected: usize, got: usize },
    #[error("norm divisor count {m} is not 3 times a power of 3 (conductor {conductor})")]
    InternalInvariant { conductor: u64, m: u64 },
    #[error("{0} is not a squarefree product of 3 and primes ≡ 1 mod 3")]
    InadmissibleD(u64),
    #[error("identity check for k = {0} is not supported (k must be ≥ 1)")]
    BadMoment(u32),
}

/// Exponents `e_l ∈ {0,1,2}` over the ramified primes, in the field's prime
/// order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NormDivisor {
    exponents: Vec<u8>,
}

impl NormDivisor {
    pub fn new(exponents: Vec<u8>) -> Self {
        assert!(exponents.iter().all(|&e| e < 3), "norm divisor exponents lie in 0..3");
        Self { exponents }
    }

    pub fn exponents(&self) -> &[u8] {
        &self.exponents
    }

    pub fn value(&self, primes: &[u64]) -> BigInt {
        primes
            .iter()
            .zip(&self.exponents)
            .fold(BigInt::one(), |acc, (&l, &e)| acc * BigInt::from(l).pow(e as u32))
    }

    /// All `3^r` divisors, the first prime's exponent varying slowest.
    pub fn all(r: usize) -> impl Iterator<Item = NormDivisor> {
        (0..3usize.pow(r as u32)).map(move |mut idx| {
            let mut e = vec![0u8; r];
            for slot in e.iter_mut().rev() {
                *slot = (idx % 3) as u8;
                idx /= 3;
            }
            NormDivisor { exponents: e }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankRecord {
    pub conductor: u64,
    pub char_signature: String,
    pub r: u32,
    pub m: u64,
    pub s: u32,
}

/// `X[i][j]` = exponent of `χ_{l_i}(l_j)`, with the diagonal unused.
pub(crate) struct CharTable {
    r: usize,
    exps: Vec<u8>,
}

impl CharTable {
    pub(crate) fn new(primes: &[u64], chars: &[LocalChar]) -> Self {
        let r = primes.len();
        let mut exps = vec![0u8; r * r];
        for i in 0..r {
            for j in 0..r {
                if i != j {
                    exps[i * r + j] = chars[i].exponent(primes[j]).expect("distinct primes are coprime");
                }
            }
        }
        Self { r, exps }
    }

    #[inline]
    pub(crate) fn get(&self, i: usize, j: usize) -> u32 {
        self.exps[i * self.r + j] as u32
    }

    /// Exponent of `χ(i_{b,l_i})` for the divisor with exponents `e`.
    fn local_exponent(&self, e: &[u8], i: usize) -> u32 {
        let mut acc = 0u32;
        let v = e[i] as u32;
        for j in 0..self.r {
            if j == i {
                continue;
            }
            // χ_{l_i}(l_j)^{e_j} · χ_{l_j}(l_i)^{-v}
            acc += self.get(i, j) * e[j] as u32 + (3 - v) * self.get(j, i);
        }
        acc % 3
    }

    fn is_norm(&self, e: &[u8]) -> bool {
        (0..self.r).all(|i| self.local_exponent(e, i) == 0)
    }
}

/// Whether `b` is a local norm from `K` at the ramified prime `l`.
pub fn is_local_norm(k: &CyclicCubicField, b: &NormDivisor, l: u64) -> Result<bool, NormError> {
    let primes = k.conductor().ramified_primes();
    if b.exponents.len() != primes.len() {
        return Err(NormError::DivisorShape { expected: primes.len(), got: b.exponents.len() });
    }
    let i = k.prime_index(l)?;
    let chars = k.local_chars();
    let v = b.exponents[i] as u32;
    let mut acc = 0u32;
    for (j, &q) in primes.iter().enumerate() {
        if j == i {
            continue;
        }
        // χ_l(q^{e_q}) for the unit part b / l^v
        acc += chars[i].exponent(q).expect("coprime") as u32 * b.exponents[j] as u32;
        // χ_q(l)^{-v}
        acc += (3 - v) * chars[j].exponent(l).expect("coprime") as u32;
    }
    Ok(acc.is_multiple_of(3))
}

/// Number of divisors `b | D` that are global norms from `K`.
pub fn count_norm_divisors(k: &CyclicCubicField) -> u64 {
    let primes = k.conductor().ramified_primes();
    let table = CharTable::new(primes, k.local_chars());
    NormDivisor::all(primes.len()).filter(|b| table.is_norm(&b.exponents)).count() as u64
}

fn log3_exact(n: u64) -> Option<u32> {
    if n == 0 {
        return None;
    }
    let s = n.ilog(3);
    (3u64.pow(s) == n).then_some(s)
}

/// `s = rk₃ φ(ker φ²)`, equal to `rk₃(Cl_K) − (r − 1)`.
pub fn rank_im_phi(k: &CyclicCubicField) -> Result<u32, NormError> {
    rank_record(k).map(|rec| rec.s)
}

pub fn rank_record(k: &CyclicCubicField) -> Result<RankRecord, NormError> {
    let m = count_norm_divisors(k);
    let conductor = k.conductor().value();
    let r = k.conductor().r() as u32;
    let s = m.is_multiple_of(3)
        .then(|| log3_exact(m / 3))
        .flatten()
        .filter(|&s| s < r)
        .ok_or(NormError::InternalInvariant { conductor, m })?;
    Ok(RankRecord { conductor, char_signature: k.char_signature(), r, m, s })
}

/// How the character sum runs over local character tuples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharacterTuples {
    /// One tuple per field, weighted by the orbit size `p − 1`.
    OrbitRepresentatives,
    /// All `(p − 1)^{ω(D)}` tuples.
    All,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCheck {
    pub d: u64,
    pub k: u32,
    /// `Σ_K |im(1 − σ_K)|^k` from the divisor algorithm.
    pub lhs: BigRational,
    /// The character sum; `None` when its imaginary part did not cancel.
    pub rhs: Option<BigRational>,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.rhs.as_ref() == Some(&self.lhs)
    }
}

fn squarefree_admissible_primes(d: u64) -> Result<Vec<u64>, NormError> {
    let fac = crate::arith::factorize(d);
    if d < 3 || fac.iter().any(|&(p, e)| e != 1 || (p != 3 && p % 3 != 1)) {
        return Err(NormError::InadmissibleD(d));
    }
    Ok(fac.into_iter().map(|(p, _)| p).collect())
}

/// Check `Σ_{K : D_K = D^{2}} |im(1−σ_K)|^k` against the character-sum
/// expression obtained by expanding the local norm indicators, where the
/// primes of `D` are distributed over `p^{2k}` slots indexed by
/// `(Z/p²)^k` and the pairing `Φ_k` supplies the exponents.
pub fn verify_character_sum_identity(d: u64, k: u32) -> Result<IdentityCheck, NormError> {
    verify_character_sum_identity_with(d, k, CharacterTuples::OrbitRepresentatives)
}

pub fn verify_character_sum_identity_with(
    d: u64,
    k: u32,
    tuples: CharacterTuples,
) -> Result<IdentityCheck, NormError> {
    const P: u64 = 3;
    if k == 0 {
        return Err(NormError::BadMoment(k));
    }
    let primes = squarefree_admissible_primes(d)?;
    let omega = primes.len();
    let f = if d.is_multiple_of(3) { d * 3 } else { d };
    let conductor = Conductor::new(f)?;
    debug_assert_eq!(conductor.ramified_primes(), primes.as_slice());

    // Left side: Σ_K (m_K / 3)^k
    let mut lhs = BigRational::zero();
    for field in fields_for_conductor(&conductor) {
        let m = count_norm_divisors(&field);
        lhs += BigRational::new(BigInt::from(m).pow(k), BigInt::from(P).pow(k));
    }

    // Right side.
    let slot_count = (P * P).pow(k) as usize;
    let slots: Vec<IndexVector> = (0..slot_count).map(|i| IndexVector::from_index(P, k as usize, i as u64)).collect();
    let mut phi = vec![0u32; slot_count * slot_count];
    for (u, su) in slots.iter().enumerate() {
        for (v, sv) in slots.iter().enumerate() {
            phi[u * slot_count + v] = su.phi_k(sv).expect("same shape") as u32;
        }
    }

    let selector_tuples: Vec<Vec<u8>> = (0..1usize << omega)
        .map(|mask| (0..omega).map(|i| 1 + ((mask >> i) & 1) as u8).collect())
        .filter(|sel: &Vec<u8>| tuples == CharacterTuples::All || sel[0] == 1)
        .collect();

    // counts[e] = number of terms equal to ω^e
    let mut counts = [0i128; 3];
    let mut assignment = vec![0usize; omega];
    for sel in &selector_tuples {
        let chars: Vec<LocalChar> = primes.iter().zip(sel).map(|(&l, &s)| LocalChar::new(l, s)).collect();
        let table = CharTable::new(&primes, &chars);
        assignment.iter_mut().for_each(|a| *a = 0);
        loop {
            // Π_v Π_{l | D_v} χ_l(Π_u D_u^{Φ_k(u, v)})
            let mut e = 0u32;
            for (i, &v) in assignment.iter().enumerate() {
                for (j, &u) in assignment.iter().enumerate() {
                    if i != j {
                        e += phi[u * slot_count + v] * table.get(i, j);
                    }
                }
            }
            counts[(e % 3) as usize] += 1;
            // next assignment of primes to slots
            let mut pos = 0;
            loop {
                if pos == omega {
                    break;
                }
                assignment[pos] += 1;
                if assignment[pos] < slot_count {
                    break;
                }
                assignment[pos] = 0;
                pos += 1;
            }
            if pos == omega {
                break;
            }
        }
    }

    // c0 + c1 ω + c2 ω² is rational iff c1 = c2, with value c0 − c1.
    let rhs = (counts[1] == counts[2]).then(|| {
        let weight: u64 = match tuples {
            CharacterTuples::OrbitRepresentatives => P - 1,
            CharacterTuples::All => 1,
        };
        let denom = BigInt::from(P - 1) * BigInt::from(P).pow(k) * BigInt::from(P).pow(k * omega as u32);
        BigRational::new(BigInt::from(counts[0] - counts[1]) * BigInt::from(weight), denom)
    });
    Ok(IdentityCheck { d, k, lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::enumerate_conductors;

    fn fields(f: u64) -> Vec<CyclicCubicField> {
        fields_for_conductor(&Conductor::new(f).unwrap())
    }

    #[test]
    fn trivial_divisor_is_a_norm_everywhere() {
        for f in [7u64, 63, 91, 819] {
            for k in fields(f) {
                let b = NormDivisor::new(vec![0; k.conductor().r()]);
                for &l in k.conductor().ramified_primes() {
                    assert!(is_local_norm(&k, &b, l).unwrap());
                }
            }
        }
    }

    #[test]
    fn prime_conductors_have_rank_zero() {
        let k = &fields(7)[0];
        assert!(is_local_norm(k, &NormDivisor::new(vec![1]), 7).unwrap());
        assert_eq!(count_norm_divisors(k), 3);
        assert_eq!(rank_im_phi(k).unwrap(), 0);
        assert_eq!(rank_im_phi(&fields(9)[0]).unwrap(), 0);
    }

    #[test]
    fn conductor_91() {
        // both fields of conductor 91 have class group 3-rank 1, so s = 0
        for k in fields(91) {
            assert_eq!(count_norm_divisors(&k), 3);
            let fails = NormDivisor::all(2)
                .filter(|b| !k.conductor().ramified_primes().iter().all(|&l| is_local_norm(&k, b, l).unwrap()))
                .count();
            assert_eq!(fails, 6);
        }
    }

    #[test]
    fn conductor_63() {
        for k in fields(63) {
            assert_eq!(rank_im_phi(&k).unwrap(), 0);
        }
    }

    #[test]
    fn local_norm_matches_direct_integer_evaluation() {
        // evaluate χ_l on the integer b / l^v rather than multiplicatively
        for f in [63u64, 91, 7 * 13 * 19, 9 * 7 * 13] {
            for k in fields(f) {
                let primes = k.conductor().ramified_primes().to_vec();
                for b in NormDivisor::all(primes.len()) {
                    for (i, &l) in primes.iter().enumerate() {
                        let v = b.exponents()[i] as u32;
                        let unit: u64 = primes
                            .iter()
                            .zip(b.exponents())
                            .filter(|(&q, _)| q != l)
                            .map(|(&q, &e)| q.pow(e as u32))
                            .product();
                        let mut val = crate::fields::local_character_eval(&k, l, unit).unwrap();
                        for &q in primes.iter().filter(|&&q| q != l) {
                            let c = crate::fields::local_character_eval(&k, q, l).unwrap();
                            val = val * c.conj().pow(v);
                        }
                        assert_eq!(is_local_norm(&k, &b, l).unwrap(), val.is_one(), "f={f} b={b:?} l={l}");
                    }
                }
            }
        }
    }

    /// Rank of a matrix over F_3.
    fn rank_f3(mut rows: Vec<Vec<u32>>) -> usize {
        let cols = rows.first().map_or(0, Vec::len);
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_multiple_of(3)) else { continue };
            rows.swap(rank, p);
            let inv = if rows[rank][c] % 3 == 1 { 1 } else { 2 };
            for x in rows[rank].iter_mut() {
                *x = (*x * inv) % 3;
            }
            for i in 0..rows.len() {
                if i != rank && !rows[i][c].is_multiple_of(3) {
                    let f = rows[i][c] % 3;
                    for j in 0..cols {
                        rows[i][j] = (rows[i][j] + 3 * 3 - f * rows[rank][j] % 3) % 3;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn norm_count_is_the_kernel_of_a_linear_system() {
        // The local conditions are linear in the exponent vector over F_3,
        // so m = 3^{r − rank}. Independent of the enumeration.
        for c in enumerate_conductors(30_000).filter(|c| c.r() >= 2) {
            for k in fields_for_conductor(&c) {
                let primes = c.ramified_primes();
                let r = primes.len();
                let chars = k.local_chars();
                let x = |i: usize, j: usize| chars[i].exponent(primes[j]).unwrap() as u32;
                let rows: Vec<Vec<u32>> = (0..r)
                    .map(|i| {
                        (0..r)
                            .map(|j| if j == i { (0..r).filter(|&q| q != i).map(|q| 2 * x(q, i)).sum::<u32>() % 3 } else { x(i, j) })
                            .collect()
                    })
                    .collect();
                let expected = 3u64.pow((r - rank_f3(rows)) as u32);
                assert_eq!(count_norm_divisors(&k), expected, "conductor {}", c.value());
            }
        }
    }

    #[test]
    fn conjugate_character_gives_same_rank() {
        for c in enumerate_conductors(5000).filter(|c| c.r() >= 2) {
            for k in fields_for_conductor(&c) {
                assert_eq!(count_norm_divisors(&k), count_norm_divisors(&k.conjugate()));
            }
        }
    }

    #[test]
    fn identity_small_cases() {
        let c = verify_character_sum_identity(7, 1).unwrap();
        assert!(c.holds());
        assert_eq!(c.lhs, BigRational::one());
        let c = verify_character_sum_identity(91, 1).unwrap();
        assert!(c.holds());
        assert_eq!(c.lhs, BigRational::from_integer(2.into()));
        assert!(verify_character_sum_identity(91, 2).unwrap().holds());
        assert!(verify_character_sum_identity(21, 2).unwrap().holds());
    }

    #[test]
    fn identity_all_tuples_mode_agrees() {
        for d in [7u64, 21, 91, 3 * 7 * 13] {
            let a = verify_character_sum_identity_with(d, 1, CharacterTuples::All).unwrap();
            let b = verify_character_sum_identity_with(d, 1, CharacterTuples::OrbitRepresentatives).unwrap();
            assert!(a.holds());
            assert_eq!(a.rhs, b.rhs);
        }
    }

    #[test]
    fn identity_rejects_bad_d() {
        assert_eq!(verify_character_sum_identity(1, 1), Err(NormError::InadmissibleD(1)));
        assert_eq!(verify_character_sum_identity(9, 1), Err(NormError::InadmissibleD(9)));
        assert_eq!(verify_character_sum_identity(35, 1), Err(NormError::InadmissibleD(35)));
        assert_eq!(verify_character_sum_identity(7, 0), Err(NormError::BadMoment(0)));
    }

    #[test]
    fn divisor_shape_checked() {
        let k = &fields(91)[0];
        assert!(matches!(is_local_norm(k, &NormDivisor::new(vec![0]), 7), Err(NormError::DivisorShape { .. })));
        assert!(matches!(is_local_norm(k, &NormDivisor::new(vec![0, 0]), 19), Err(NormError::Field(_))));
        assert_eq!(NormDivisor::new(vec![2, 1]).value(&[7, 13]), BigInt::from(637));
    }
}
