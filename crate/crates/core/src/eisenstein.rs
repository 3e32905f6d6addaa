//! Arithmetic in the Eisenstein integers `Z[ω]`, `ω² + ω + 1 = 0`.
//!
//! Elements are kept in the basis `{1, ω}` and every product is reduced with
//! `ω² = -1 - ω`. The cubic residue symbol is evaluated through the residue
//! field: for a split prime `π` of norm `l` the map `a + bω ↦ a + b·w (mod l)`,
//! where `w ≡ ω (mod π)`, identifies `Z[ω]/π` with `F_l`; for an inert
//! rational prime `q` the exponentiation runs in `Z[ω]/q ≅ F_{q²}` directly.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EisensteinError {
    #[error("norm {0} is divisible by 3")]
    NonCoprimeToThree(BigInt),
    #[error("{0} is not congruent to 1 mod 3, so it does not split in Z[ω]")]
    NotSplit(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid modulus {0}: must be primary with norm coprime to 3")]
    InvalidModulus(EisensteinInt),
    #[error("modulus norm {0} too large to factor")]
    ModulusTooLarge(BigInt),
}

/// `a + bω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EisensteinInt {
    pub a: BigInt,
    pub b: BigInt,
}

impl EisensteinInt {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        Self { a: a.into(), b: b.into() }
    }

    pub fn zero() -> Self {
        Self::new(0, 0)
    }

    pub fn one() -> Self {
        Self::new(1, 0)
    }

    pub fn omega() -> Self {
        Self::new(0, 1)
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Self::new(n, 0)
    }

    /// The six units `±1, ±ω, ±ω²`.
    pub fn units() -> [EisensteinInt; 6] {
        [
            Self::new(1, 0),
            Self::new(-1, 0),
            Self::new(0, 1),
            Self::new(0, -1),
            Self::new(-1, -1),
            Self::new(1, 1),
        ]
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn norm(&self) -> BigInt {
        &self.a * &self.a - &self.a * &self.b + &self.b * &self.b
    }

    /// Complex conjugation, `ω ↦ ω² = -1 - ω`.
    pub fn conj(&self) -> Self {
        Self { a: &self.a - &self.b, b: -&self.b }
    }

    /// `self ≡ 1 (mod 3)`.
    pub fn is_primary(&self) -> bool {
        self.a.mod_floor(&BigInt::from(3)).is_one() && self.b.mod_floor(&BigInt::from(3)).is_zero()
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &EisensteinInt) -> Option<EisensteinInt> {
        let n = d.norm();
        if n.is_zero() {
            return None;
        }
        let t = self * &d.conj();
        let (qa, ra) = t.a.div_rem(&n);
        let (qb, rb) = t.b.div_rem(&n);
        if ra.is_zero() && rb.is_zero() {
            Some(EisensteinInt { a: qa, b: qb })
        } else {
            None
        }
    }

    /// Euclidean division with the quotient rounded coordinate-wise, so
    /// `norm(remainder) < norm(d)`.
    pub fn div_rem_round(&self, d: &EisensteinInt) -> (EisensteinInt, EisensteinInt) {
        let n = d.norm();
        assert!(!n.is_zero(), "division by zero in Z[ω]");
        let t = self * &d.conj();
        let q = EisensteinInt { a: round_div(&t.a, &n), b: round_div(&t.b, &n) };
        let r = self - &(&q * d);
        (q, r)
    }

    pub fn gcd(&self, other: &EisensteinInt) -> EisensteinInt {
        let mut x = self.clone();
        let mut y = other.clone();
        while !y.is_zero() {
            let (_, r) = x.div_rem_round(&y);
            x = y;
            y = r;
        }
        x
    }

    /// Reduce both coordinates modulo a rational integer.
    pub fn reduce_mod(&self, n: &BigInt) -> EisensteinInt {
        EisensteinInt { a: self.a.mod_floor(n), b: self.b.mod_floor(n) }
    }
}

fn round_div(x: &BigInt, n: &BigInt) -> BigInt {
    // floor((2x + n) / 2n) for n > 0
    let two = BigInt::from(2);
    (x * &two + n).div_floor(&(n * &two))
}

impl fmt::Display for EisensteinInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_negative() {
            write!(f, "{} - {}ω", self.a, -&self.b)
        } else {
            write!(f, "{} + {}ω", self.a, self.b)
        }
    }
}

impl<'a> Mul<&'a EisensteinInt> for &'a EisensteinInt {
    type Output = EisensteinInt;
    fn mul(self, rhs: &'a EisensteinInt) -> EisensteinInt {
        // (a + bω)(c + dω) = ac - bd + (ad + bc - bd)ω
        let bd = &self.b * &rhs.b;
        EisensteinInt {
            a: &self.a * &rhs.a - &bd,
            b: &self.a * &rhs.b + &self.b * &rhs.a - bd,
        }
    }
}

impl Mul for EisensteinInt {
    type Output = EisensteinInt;
    fn mul(self, rhs: EisensteinInt) -> EisensteinInt {
        &self * &rhs
    }
}

impl<'a> Add<&'a EisensteinInt> for &'a EisensteinInt {
    type Output = EisensteinInt;
    fn add(self, rhs: &'a EisensteinInt) -> EisensteinInt {
        EisensteinInt { a: &self.a + &rhs.a, b: &self.b + &rhs.b }
    }
}

impl<'a> Sub<&'a EisensteinInt> for &'a EisensteinInt {
    type Output = EisensteinInt;
    fn sub(self, rhs: &'a EisensteinInt) -> EisensteinInt {
        EisensteinInt { a: &self.a - &rhs.a, b: &self.b - &rhs.b }
    }
}

impl Neg for EisensteinInt {
    type Output = EisensteinInt;
    fn neg(self) -> EisensteinInt {
        EisensteinInt { a: -self.a, b: -self.b }
    }
}

/// A value of a cubic character: `ω^e` for `e ∈ {0, 1, 2}`, or `Zero` when
/// the argument is not coprime to the modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CubeRootValue {
    Zero,
    Root(u8),
}

impl CubeRootValue {
    pub const ONE: CubeRootValue = CubeRootValue::Root(0);

    pub fn from_exponent(e: i64) -> Self {
        CubeRootValue::Root(e.rem_euclid(3) as u8)
    }

    pub fn exponent(self) -> Option<u8> {
        match self {
            CubeRootValue::Zero => None,
            CubeRootValue::Root(e) => Some(e),
        }
    }

    pub fn is_one(self) -> bool {
        self == CubeRootValue::ONE
    }

    pub fn conj(self) -> Self {
        match self {
            CubeRootValue::Zero => CubeRootValue::Zero,
            CubeRootValue::Root(e) => CubeRootValue::Root((3 - e) % 3),
        }
    }

    pub fn pow(self, n: u32) -> Self {
        match self {
            CubeRootValue::Zero if n == 0 => CubeRootValue::ONE,
            CubeRootValue::Zero => CubeRootValue::Zero,
            CubeRootValue::Root(e) => CubeRootValue::Root(((e as u32 * n) % 3) as u8),
        }
    }
}

impl Mul for CubeRootValue {
    type Output = CubeRootValue;
    fn mul(self, rhs: CubeRootValue) -> CubeRootValue {
        match (self, rhs) {
            (CubeRootValue::Root(x), CubeRootValue::Root(y)) => CubeRootValue::Root((x + y) % 3),
            _ => CubeRootValue::Zero,
        }
    }
}

impl fmt::Display for CubeRootValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CubeRootValue::Zero => write!(f, "0"),
            CubeRootValue::Root(e) => write!(f, "ω^{e}"),
        }
    }
}

pub fn norm(z: &EisensteinInt) -> BigInt {
    z.norm()
}

/// The unique unit multiple of `z` that is `≡ 1 (mod 3)`.
pub fn primary_associate(z: &EisensteinInt) -> Result<EisensteinInt, EisensteinError> {
    let n = z.norm();
    if n.mod_floor(&BigInt::from(3)).is_zero() {
        return Err(EisensteinError::NonCoprimeToThree(n));
    }
    EisensteinInt::units()
        .iter()
        .map(|u| u * z)
        .find(EisensteinInt::is_primary)
        .ok_or(EisensteinError::NonCoprimeToThree(n))
}

/// The primary prime `π` with `N(π) = l` for a rational prime `l ≡ 1 (mod 3)`.
///
/// `π` is the primary associate of `gcd(l, ω - w)` where `w` is the cube root
/// of unity `g^((l-1)/3) mod l` for the least `g` that is not a cube; its
/// conjugate is the other prime above `l`.
pub fn factor_split_prime(l: u64) -> Result<EisensteinInt, EisensteinError> {
    if !arith::is_prime(l) {
        return Err(EisensteinError::NotPrime(l));
    }
    if l % 3 != 1 {
        return Err(EisensteinError::NotSplit(l));
    }
    let w = arith::primitive_cube_root_of_unity(l);
    let g = EisensteinInt::from_integer(l).gcd(&EisensteinInt::new(-(w as i64), 1));
    let pi = primary_associate(&g)?;
    debug_assert_eq!(pi.norm(), BigInt::from(l));
    Ok(pi)
}

/// A prime of `Z[ω]` coprime to 3, in a form ready for symbol evaluation.
#[derive(Debug, Clone)]
enum ResiduePrime {
    /// Split prime of norm `l`; `w ≡ ω (mod π)` in `F_l`.
    Split { l: u64, w: u64 },
    /// Inert rational prime `q`, residue field `F_{q²}`.
    Inert { q: u64 },
}

impl ResiduePrime {
    fn split(pi: &EisensteinInt) -> Self {
        let l = pi.norm().to_u64().expect("split prime norm fits in u64");
        let a = pi.a.mod_floor(&BigInt::from(l)).to_u64().unwrap();
        let b = pi.b.mod_floor(&BigInt::from(l)).to_u64().unwrap();
        // a + bω ≡ 0  ⇒  ω ≡ -a/b
        let binv = arith::mod_inv(b, l).expect("b is a unit mod l for a split prime");
        let w = arith::mul_mod(l - a % l, binv, l) % l;
        ResiduePrime::Split { l, w }
    }

    fn symbol(&self, x: &EisensteinInt) -> CubeRootValue {
        match *self {
            ResiduePrime::Split { l, w } => {
                let lb = BigInt::from(l);
                let xa = x.a.mod_floor(&lb).to_u64().unwrap();
                let xb = x.b.mod_floor(&lb).to_u64().unwrap();
                let v = (xa + arith::mul_mod(xb, w, l)) % l;
                if v == 0 {
                    return CubeRootValue::Zero;
                }
                let t = arith::pow_mod(v, (l - 1) / 3, l);
                let w2 = arith::mul_mod(w, w, l);
                if t == 1 {
                    CubeRootValue::Root(0)
                } else if t == w {
                    CubeRootValue::Root(1)
                } else if t == w2 {
                    CubeRootValue::Root(2)
                } else {
                    unreachable!("Euler criterion produced a non cube root of unity")
                }
            }
            ResiduePrime::Inert { q } => {
                let qb = BigInt::from(q);
                let x = x.reduce_mod(&qb);
                if x.is_zero() {
                    return CubeRootValue::Zero;
                }
                let t = pow_mod_rational(&x, (q * q - 1) / 3, &qb);
                let m1 = BigInt::from(q - 1);
                match (t.a.to_u64().unwrap(), t.b.to_u64().unwrap()) {
                    (1, 0) => CubeRootValue::Root(0),
                    (0, 1) => CubeRootValue::Root(1),
                    _ if t.a == m1 && t.b == m1 => CubeRootValue::Root(2),
                    _ => unreachable!("Euler criterion produced a non cube root of unity"),
                }
            }
        }
    }
}

/// `x^e` in `Z[ω]/(n)` for a rational integer `n`.
fn pow_mod_rational(x: &EisensteinInt, mut e: u64, n: &BigInt) -> EisensteinInt {
    let mut base = x.reduce_mod(n);
    let mut acc = EisensteinInt::one();
    while e > 0 {
        if e & 1 == 1 {
            acc = (&acc * &base).reduce_mod(n);
        }
        base = (&base * &base).reduce_mod(n);
        e >>= 1;
    }
    acc
}

/// Largest modulus norm the symbol will factor by trial division.
const MAX_FACTOR_NORM: u64 = 1 << 50;

/// Primary prime factors of a primary `m`, with multiplicity.
fn primary_prime_factors(m: &EisensteinInt) -> Result<Vec<EisensteinInt>, EisensteinError> {
    let n = m.norm();
    let n64 = n
        .to_u64()
        .filter(|&v| v <= MAX_FACTOR_NORM)
        .ok_or_else(|| EisensteinError::ModulusTooLarge(n.clone()))?;
    let mut rest = m.clone();
    let mut out = Vec::new();
    for (l, _) in arith::factorize(n64) {
        if l % 3 == 1 {
            let pi = factor_split_prime(l)?;
            for p in [pi.conj(), pi] {
                while let Some(q) = rest.div_exact(&p) {
                    out.push(p.clone());
                    rest = q;
                }
            }
        } else {
            // inert: -q is the primary generator
            let p = EisensteinInt::from_integer(-(l as i64));
            while let Some(q) = rest.div_exact(&p) {
                out.push(p.clone());
                rest = q;
            }
        }
    }
    debug_assert!(rest.is_primary() && rest.norm().is_one());
    Ok(out)
}

/// The cubic residue symbol `(x/m)₃` for primary `m` with `3 ∤ N(m)`.
///
/// For prime `m = π` this is the cube root of unity congruent to
/// `x^((N(π)-1)/3)` modulo `π`; for composite `m` it is the product over the
/// prime factors of `m`.
pub fn cubic_residue_symbol(
    x: &EisensteinInt,
    m: &EisensteinInt,
) -> Result<CubeRootValue, EisensteinError> {
    if !m.is_primary() || m.norm().mod_floor(&BigInt::from(3)).is_zero() {
        return Err(EisensteinError::InvalidModulus(m.clone()));
    }
    let mut acc = CubeRootValue::ONE;
    for p in primary_prime_factors(m)? {
        let rp = if p.b.is_zero() {
            ResiduePrime::Inert { q: (-&p.a).to_u64().unwrap() }
        } else {
            ResiduePrime::split(&p)
        };
        acc = acc * rp.symbol(x);
        if acc == CubeRootValue::Zero {
            break;
        }
    }
    Ok(acc)
}

/// The cubic residue character attached to a split rational prime, in the
/// `u64` fast path used by field enumeration.
///
/// `chi(x) = (x/π)₃` for rational `x`, where `π` is the primary prime over `l`
/// (or its conjugate when `conjugate` is set).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CubicCharModPrime {
    l: u64,
    w: u64,
    w2: u64,
}

impl CubicCharModPrime {
    pub fn new(l: u64) -> Result<Self, EisensteinError> {
        let pi = factor_split_prime(l)?;
        Ok(Self::from_primary_prime(&pi))
    }

    pub fn from_primary_prime(pi: &EisensteinInt) -> Self {
        match ResiduePrime::split(pi) {
            ResiduePrime::Split { l, w } => CubicCharModPrime { l, w, w2: arith::mul_mod(w, w, l) },
            ResiduePrime::Inert { .. } => unreachable!(),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.l
    }

    /// Exponent `e` with `(x/π)₃ = ω^e`, `None` when `l | x`.
    pub fn exponent(&self, x: u64) -> Option<u8> {
        let v = x % self.l;
        if v == 0 {
            return None;
        }
        let t = arith::pow_mod(v, (self.l - 1) / 3, self.l);
        if t == 1 {
            Some(0)
        } else if t == self.w {
            Some(1)
        } else {
            debug_assert_eq!(t, self.w2);
            Some(2)
        }
    }

    pub fn eval(&self, x: u64) -> CubeRootValue {
        self.exponent(x).map_or(CubeRootValue::Zero, CubeRootValue::Root)
    }
}
