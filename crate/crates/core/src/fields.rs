//! Cyclic cubic fields, represented by conductor and a tuple of local cubic
//! characters.
//!
//! A conductor is `f = 9^ε · l₁ ⋯ l_t` with distinct primes `l_i ≡ 1 (mod 3)`
//! and `ε ∈ {0, 1}`. Each ramified prime carries one of its two cubic
//! characters; the global character `χ` and `χ²` cut out the same field, so
//! each field is listed once by fixing the choice at the smallest ramified
//! prime.
//!
//! Selector convention: at `l ≠ 3`, selector 1 is `x ↦ (x/π_l)₃` for the
//! primary prime `π_l` returned by [`factor_split_prime`], selector 2 is its
//! conjugate. At `3`, selector 1 is the character of `(Z/9)^×` with
//! `χ₃(2) = ω`, selector 2 the one with `χ₃(2) = ω²`.

use std::fmt;

use thiserror::Error;

use crate::arith;
use crate::eisenstein::{CubeRootValue, CubicCharModPrime};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not the conductor of a cyclic cubic field")]
    NotAdmissible(u64),
    #[error("{prime} does not ramify in the field of conductor {conductor}")]
    NotRamified { prime: u64, conductor: u64 },
    #[error("selector tuple {0:?} is invalid for this conductor")]
    BadSelectors(Vec<u8>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Conductor {
    value: u64,
    ramified_primes: Vec<u64>,
}

impl Conductor {
    pub fn new(value: u64) -> Result<Self, FieldError> {
        let fac = arith::factorize(value);
        Self::from_factorization(value, &fac).ok_or(FieldError::NotAdmissible(value))
    }

    pub(crate) fn from_factorization(value: u64, fac: &[(u64, u32)]) -> Option<Self> {
        if value < 7 {
            return None;
        }
        let mut primes = Vec::with_capacity(fac.len());
        for &(p, e) in fac {
            let ok = if p == 3 { e == 2 } else { p % 3 == 1 && e == 1 };
            if !ok {
                return None;
            }
            primes.push(p);
        }
        Some(Conductor { value, ramified_primes: primes })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    /// Ramified primes in increasing order; `3` appears once when `9 | f`.
    pub fn ramified_primes(&self) -> &[u64] {
        &self.ramified_primes
    }

    pub fn r(&self) -> usize {
        self.ramified_primes.len()
    }

    /// `D_K = f²`.
    pub fn discriminant(&self) -> u128 {
        self.value as u128 * self.value as u128
    }

    pub fn field_count(&self) -> usize {
        1 << (self.r() - 1)
    }
}

impl fmt::Display for Conductor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// A nontrivial cubic character of `(Z/l)^×` or, at `3`, of `(Z/9)^×`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalChar {
    Mod9 { selector: u8 },
    Prime { chi: CubicCharModPrime, selector: u8 },
}

/// Discrete log base 2 in `(Z/9)^×`, indexed by residue.
const DLOG2_MOD9: [Option<u8>; 9] = [None, Some(0), Some(1), None, Some(2), Some(5), None, Some(4), Some(3)];

impl LocalChar {
    pub fn new(l: u64, selector: u8) -> Self {
        if l == 3 {
            LocalChar::Mod9 { selector }
        } else {
            let chi = CubicCharModPrime::new(l).expect("ramified primes other than 3 split in Z[ω]");
            LocalChar::Prime { chi, selector }
        }
    }

    /// Exponent `e` with value `ω^e`, `None` when `x` is not a unit.
    pub fn exponent(&self, x: u64) -> Option<u8> {
        match *self {
            LocalChar::Mod9 { selector } => DLOG2_MOD9[(x % 9) as usize].map(|d| (d * selector) % 3),
            LocalChar::Prime { chi, selector } => chi.exponent(x).map(|e| (e * selector) % 3),
        }
    }

    pub fn eval(&self, x: u64) -> CubeRootValue {
        self.exponent(x).map_or(CubeRootValue::Zero, CubeRootValue::Root)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicCubicField {
    conductor: Conductor,
    selectors: Vec<u8>,
    chars: Vec<LocalChar>,
}

impl CyclicCubicField {
    /// Field with an arbitrary selector tuple (not necessarily the canonical
    /// orbit representative).
    pub fn with_selectors(conductor: Conductor, selectors: Vec<u8>) -> Result<Self, FieldError> {
        if selectors.len() != conductor.r() || selectors.iter().any(|s| !matches!(s, 1 | 2)) {
            return Err(FieldError::BadSelectors(selectors));
        }
        let chars = conductor
            .ramified_primes
            .iter()
            .zip(&selectors)
            .map(|(&l, &s)| LocalChar::new(l, s))
            .collect();
        Ok(Self { conductor, selectors, chars })
    }

    pub fn conductor(&self) -> &Conductor {
        &self.conductor
    }

    pub fn selectors(&self) -> &[u8] {
        &self.selectors
    }

    pub fn local_chars(&self) -> &[LocalChar] {
        &self.chars
    }

    /// Selectors as a digit string, e.g. `"121"`.
    pub fn char_signature(&self) -> String {
        self.selectors.iter().map(|s| char::from(b'0' + s)).collect()
    }

    pub fn is_canonical(&self) -> bool {
        self.selectors.first() == Some(&1)
    }

    /// The same field described by the conjugate character `χ²`.
    pub fn conjugate(&self) -> Self {
        let sel = self.selectors.iter().map(|s| 3 - s).collect();
        Self::with_selectors(self.conductor.clone(), sel).unwrap()
    }

    pub(crate) fn prime_index(&self, l: u64) -> Result<usize, FieldError> {
        self.conductor
            .ramified_primes
            .binary_search(&l)
            .map_err(|_| FieldError::NotRamified { prime: l, conductor: self.conductor.value })
    }
}

/// `χ_l(x)` for a ramified prime `l` of `K`.
pub fn local_character_eval(k: &CyclicCubicField, l: u64, x: u64) -> Result<CubeRootValue, FieldError> {
    let i = k.prime_index(l)?;
    Ok(k.chars[i].eval(x))
}

/// The `2^{r-1}` canonical fields of conductor `f`, selectors in
/// lexicographic order.
pub fn fields_for_conductor(f: &Conductor) -> Vec<CyclicCubicField> {
    let r = f.r();
    let base: Vec<LocalChar> = f.ramified_primes.iter().map(|&l| LocalChar::new(l, 1)).collect();
    (0..1usize << (r - 1))
        .map(|mask| {
            let selectors: Vec<u8> =
                (0..r).map(|i| if i == 0 { 1 } else { 1 + ((mask >> (r - 1 - i)) & 1) as u8 }).collect();
            let chars = base
                .iter()
                .zip(&selectors)
                .map(|(c, &s)| match *c {
                    LocalChar::Mod9 { .. } => LocalChar::Mod9 { selector: s },
                    LocalChar::Prime { chi, .. } => LocalChar::Prime { chi, selector: s },
                })
                .collect();
            CyclicCubicField { conductor: f.clone(), selectors, chars }
        })
        .collect()
}

const SEGMENT: u64 = 1 << 16;

/// Admissible conductors in `[lo, hi]`, increasing, produced by a segmented
/// sieve so memory stays `O(√hi + segment)`.
#[derive(Debug, Clone)]
pub struct ConductorStream {
    next: u64,
    hi: u64,
    small_primes: Vec<u64>,
    buffer: std::vec::IntoIter<Conductor>,
}

impl ConductorStream {
    pub fn new(lo: u64, hi: u64) -> Self {
        let root = (hi as f64).sqrt() as u64 + 1;
        let small_primes = (2..=root).filter(|&p| arith::is_prime(p)).collect();
        Self { next: lo.max(1), hi, small_primes, buffer: Vec::new().into_iter() }
    }

    fn fill(&mut self) {
        let lo = self.next;
        let hi = (lo + SEGMENT - 1).min(self.hi);
        let len = (hi - lo + 1) as usize;
        let mut rest: Vec<u64> = (lo..=hi).collect();
        let mut ok = vec![true; len];
        let mut factors: Vec<Vec<u64>> = vec![Vec::new(); len];
        for &p in &self.small_primes {
            if p * p > hi {
                break;
            }
            let first = lo.div_ceil(p) * p;
            let mut n = first;
            while n <= hi {
                let i = (n - lo) as usize;
                if ok[i] {
                    let mut e = 0;
                    while rest[i].is_multiple_of(p) {
                        rest[i] /= p;
                        e += 1;
                    }
                    let good = if p == 3 { e == 2 } else { p % 3 == 1 && e == 1 };
                    if good {
                        factors[i].push(p);
                    } else {
                        ok[i] = false;
                    }
                }
                n += p;
            }
        }
        let mut out = Vec::new();
        for i in 0..len {
            let value = lo + i as u64;
            if !ok[i] || value < 7 {
                continue;
            }
            let cofactor = rest[i];
            if cofactor > 1 {
                if cofactor % 3 != 1 {
                    continue;
                }
                factors[i].push(cofactor);
            }
            out.push(Conductor { value, ramified_primes: std::mem::take(&mut factors[i]) });
        }
        self.next = hi + 1;
        self.buffer = out.into_iter();
    }
}

impl Iterator for ConductorStream {
    type Item = Conductor;

    fn next(&mut self) -> Option<Conductor> {
        loop {
            if let Some(c) = self.buffer.next() {
                return Some(c);
            }
            if self.next > self.hi {
                return None;
            }
            self.fill();
        }
    }
}

/// Every admissible conductor `f ≤ bound`, in increasing order.
pub fn enumerate_conductors(bound: u64) -> ConductorStream {
    ConductorStream::new(1, bound)
}
