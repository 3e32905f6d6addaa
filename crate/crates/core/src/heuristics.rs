//! Predicted rank densities and moments.
//!
//! The Gerth density of `s = rk_p φ(ker φ²)` is
//! `η_∞(p) / (η_s(p) η_{s+1}(p) p^{s(s+1)})`, and the field average of
//! `|im φ|^k = p^{k s}` is `(N(k+1, p) − N(k, p)) / p^k`.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::linkage::{count_subspaces, n_subspaces};

/// Depth of a partial Euler product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EtaDepth {
    Finite(u32),
    Infinite,
}

/// `η_s(p) = ∏_{i=1}^{s} (1 − p^{-i})` as an exact rational.
pub fn eta_exact(s: u32, p: u64) -> BigRational {
    let pb = BigInt::from(p);
    (1..=s).fold(BigRational::one(), |acc, i| {
        let pi = pb.pow(i);
        acc * BigRational::new(&pi - 1, pi)
    })
}

/// `η_s(p)`; for `s = ∞` the product is truncated once the tail's effect on
/// the logarithm is provably below `tol`.
pub fn eta(s: EtaDepth, p: u64, tol: f64) -> f64 {
    match s {
        EtaDepth::Finite(n) => eta_exact(n, p).to_f64().unwrap(),
        EtaDepth::Infinite => eta_infinity(p, tol),
    }
}

/// `η_∞(p)` to relative accuracy about `tol`.
pub fn eta_infinity(p: u64, tol: f64) -> f64 {
    assert!(tol > 0.0, "tolerance must be positive");
    let pf = p as f64;
    let mut prod = 1.0;
    let mut n = 0u32;
    loop {
        n += 1;
        prod *= 1.0 - pf.powi(-(n as i32));
        // |log ∏_{i>n}(1 − p^{-i})| ≤ Σ_{i>n} p^{-i}/(1 − p^{-i}) ≤ p^{-n}/((p − 1)(1 − p^{-n-1}))
        let tail = pf.powi(-(n as i32)) / ((pf - 1.0) * (1.0 - pf.powi(-(n as i32) - 1)));
        if tail < tol || n > 2000 {
            return prod;
        }
    }
}

const ETA_TOL: f64 = 1e-16;

/// Gerth density of rank `s`.
pub fn predicted_density(s: u32, p: u64) -> f64 {
    let denom = eta_exact(s, p) * eta_exact(s + 1, p) * BigRational::from_integer(BigInt::from(p).pow(s * (s + 1)));
    eta_infinity(p, ETA_TOL) / denom.to_f64().unwrap()
}

/// Both normalizations of the predicted `k`-th moment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictedMoment {
    /// `N(k+1, p) − N(k, p)`.
    pub subspace_difference: BigUint,
    /// `(N(k+1, p) − N(k, p)) / p^k`: the limiting average of `|im φ|^k`.
    pub size_moment: BigRational,
}

pub fn predicted_moment(k: u32, p: u64) -> PredictedMoment {
    let diff = count_subspaces(k + 1, p) - count_subspaces(k, p);
    let size_moment = BigRational::new(BigInt::from(diff.clone()), BigInt::from(p).pow(k));
    PredictedMoment { subspace_difference: diff, size_moment }
}

/// `|Σ_{s ≤ s_max} density(s)·p^{ks} − (N(k+1) − N(k))/p^k|`.
pub fn consistency_moments_vs_density(p: u64, k: u32, s_max: u32) -> f64 {
    let sum: f64 = (0..=s_max).map(|s| predicted_density(s, p) * (p as f64).powi((k * s) as i32)).sum();
    (sum - predicted_moment(k, p).size_moment.to_f64().unwrap()).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DistributionVariant {
    /// `η_∞ / (η_s η_{s+1} p^{s(s+1)})`.
    Gerth,
    /// p-rank law of `μ₀`: `η_∞ / (η_s² p^{s²})`.
    CohenLenstraImaginary,
    /// p-rank law of `μ₁`; the same closed form as [`Self::Gerth`].
    CohenLenstraReal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankDistribution {
    pub p: u64,
    pub variant: DistributionVariant,
    pub densities: Vec<f64>,
}

impl RankDistribution {
    pub fn new(p: u64, variant: DistributionVariant, s_max: u32) -> Self {
        let eta_inf = eta_infinity(p, ETA_TOL);
        let densities = (0..=s_max)
            .map(|s| {
                let denom = match variant {
                    DistributionVariant::Gerth | DistributionVariant::CohenLenstraReal => {
                        eta_exact(s, p) * eta_exact(s + 1, p) * BigRational::from_integer(BigInt::from(p).pow(s * (s + 1)))
                    }
                    DistributionVariant::CohenLenstraImaginary => {
                        let e = eta_exact(s, p);
                        &e * &e * BigRational::from_integer(BigInt::from(p).pow(s * s))
                    }
                };
                eta_inf / denom.to_f64().unwrap()
            })
            .collect();
        Self { p, variant, densities }
    }

    pub fn total(&self) -> f64 {
        self.densities.iter().sum()
    }
}

/// `⊕ Z/p^{λ_i}` for a partition `λ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianPGroup {
    p: u64,
    partition: Vec<u32>,
}

impl AbelianPGroup {
    /// Parts are sorted into nonincreasing order; zero parts are dropped.
    pub fn new(p: u64, mut partition: Vec<u32>) -> Self {
        partition.retain(|&x| x > 0);
        partition.sort_unstable_by(|a, b| b.cmp(a));
        Self { p, partition }
    }

    pub fn trivial(p: u64) -> Self {
        Self::new(p, Vec::new())
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn partition(&self) -> &[u32] {
        &self.partition
    }

    pub fn rank(&self) -> u32 {
        self.partition.len() as u32
    }

    pub fn order(&self) -> BigUint {
        BigUint::from(self.p).pow(self.partition.iter().sum())
    }

    /// `|Aut G|` by the standard formula: with parts `e_1 ≤ … ≤ e_n`,
    /// `d_j = max{l : e_l = e_j}`, `c_j = min{l : e_l = e_j}`,
    /// `|Aut| = ∏_j (p^{d_j} − p^{j−1}) · ∏_j p^{e_j (n − d_j)} · ∏_j p^{(e_j − 1)(n − c_j + 1)}`.
    pub fn aut_order(&self) -> BigUint {
        let mut e: Vec<u32> = self.partition.clone();
        e.sort_unstable();
        let n = e.len() as u32;
        let p = BigUint::from(self.p);
        let mut acc = BigUint::one();
        for j in 1..=n {
            let ej = e[j as usize - 1];
            let d = (1..=n).filter(|&l| e[l as usize - 1] == ej).max().unwrap();
            let c = (1..=n).filter(|&l| e[l as usize - 1] == ej).min().unwrap();
            acc *= p.pow(d) - p.pow(j - 1);
            acc *= p.pow(ej * (n - d));
            acc *= p.pow((ej - 1) * (n - c + 1));
        }
        acc
    }
}

/// `μ_u(A) = η_∞(p) / (η_u(p) · |Aut A| · |A|^u)`, normalized so the total
/// mass over all finite abelian p-groups is 1 for every `u`.
pub fn cohen_lenstra_measure(a: &AbelianPGroup, u: u32) -> f64 {
    let denom = BigRational::from_integer((a.aut_order() * a.order().pow(u)).into()) * eta_exact(u, a.p);
    eta_infinity(a.p, ETA_TOL) / denom.to_f64().unwrap()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomSurCounts {
    /// `|Hom(G, (Z/p)^k)| = p^{k·rk_p G}`.
    pub hom_count: BigUint,
    /// `|Sur(G, (Z/p)^i)|` for `i = 0..=k`.
    pub sur_counts: Vec<BigUint>,
}

impl HomSurCounts {
    /// `Σ_i n(k, i, p) · |Sur(G, (Z/p)^i)|`.
    pub fn decomposed_total(&self, p: u64) -> BigUint {
        let k = self.sur_counts.len() as u32 - 1;
        self.sur_counts.iter().enumerate().map(|(i, s)| n_subspaces(k, i as u32, p) * s).sum()
    }
}

pub fn hom_and_sur_counts(g: &AbelianPGroup, k: u32) -> HomSurCounts {
    let p = BigUint::from(g.p);
    let rk = g.rank();
    let hom_count = p.pow(k * rk);
    let sur_counts = (0..=k)
        .map(|i| {
            if i > rk {
                BigUint::zero()
            } else {
                (0..i).fold(BigUint::one(), |acc, j| acc * (p.pow(rk) - p.pow(j)))
            }
        })
        .collect();
    HomSurCounts { hom_count, sur_counts }
}

/// Densities and moments for the `predict` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub p: u64,
    pub density: BTreeMap<u32, f64>,
    pub density_total: f64,
    /// `N(k+1) − N(k)`.
    pub subspace_difference: BTreeMap<u32, String>,
    /// Average of `|im φ|^k`, as `num/den` and as a float.
    pub size_moment: BTreeMap<u32, String>,
    pub size_moment_value: BTreeMap<u32, f64>,
    pub consistency: BTreeMap<u32, f64>,
}

pub fn prediction(p: u64, k_max: u32, s_max: u32) -> Prediction {
    let density: BTreeMap<u32, f64> = (0..=s_max).map(|s| (s, predicted_density(s, p))).collect();
    let density_total = density.values().sum();
    let mut subspace_difference = BTreeMap::new();
    let mut size_moment = BTreeMap::new();
    let mut size_moment_value = BTreeMap::new();
    let mut consistency = BTreeMap::new();
    for k in 1..=k_max {
        let m = predicted_moment(k, p);
        subspace_difference.insert(k, m.subspace_difference.to_string());
        size_moment.insert(k, m.size_moment.to_string());
        size_moment_value.insert(k, m.size_moment.to_f64().unwrap());
        consistency.insert(k, consistency_moments_vs_density(p, k, s_max));
    }
    Prediction { p, density, density_total, subspace_difference, size_moment, size_moment_value, consistency }
}
