use std::collections::BTreeSet;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{factorize, is_prime};
use crate::eisenstein::{cubic_residue_symbol, factor_split_prime, CubeRootValue, EisensteinInt};
use crate::linkage::{
    all_subspaces, count_maximal_unlinked, count_subspaces, enumerate_maximal_unlinked_sets, is_subspace,
    satisfies_characterization, translate_to_origin, EnumerationMethod, IndexVector, SubspaceBasis,
};
use crate::norms::verify_character_sum_identity;

use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyKind {
    /// Character-sum identity for admissible squarefree `D ≤ max_d` with
    /// `ω(D) ≤ max_omega`.
    Identity { max_d: u64, k: u32, max_omega: Option<usize> },
    /// Maximal unlinked sets in `(Z/p²)^k`: both enumerations, the closed
    /// form, and the structural lemmas.
    Combinatorics { p: u64, k: u32 },
    /// Cubic reciprocity on random pairs of primary primes of norm below
    /// `max_norm`.
    Reciprocity { pairs: usize, seed: u64, max_norm: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VerifySummary {
    pub cases: Vec<CaseResult>,
}

impl VerifySummary {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseResult> {
        self.cases.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.cases.push(CaseResult { name: name.into(), passed, detail: detail.into() });
    }
}

pub fn verify(kind: VerifyKind) -> Result<VerifySummary, HarnessError> {
    match kind {
        VerifyKind::Identity { max_d, k, max_omega } => verify_identity(max_d, k, max_omega),
        VerifyKind::Combinatorics { p, k } => Ok(verify_combinatorics(p, k)),
        VerifyKind::Reciprocity { pairs, seed, max_norm } => Ok(verify_reciprocity(pairs, seed, max_norm)),
    }
}

fn admissible_squarefree(d: u64) -> Option<usize> {
    if d < 3 {
        return None;
    }
    let fac = factorize(d);
    fac.iter().all(|&(p, e)| e == 1 && (p == 3 || p % 3 == 1)).then_some(fac.len())
}

fn verify_identity(max_d: u64, k: u32, max_omega: Option<usize>) -> Result<VerifySummary, HarnessError> {
    let mut summary = VerifySummary::default();
    for d in 3..=max_d {
        let Some(omega) = admissible_squarefree(d) else { continue };
        if max_omega.is_some_and(|w| omega > w) {
            continue;
        }
        let check = verify_character_sum_identity(d, k)?;
        let rhs = check.rhs.as_ref().map_or("non-real".to_string(), |r| r.to_string());
        summary.push(format!("D={d} k={k}"), check.holds(), format!("lhs={} rhs={rhs}", check.lhs));
    }
    Ok(summary)
}

fn verify_combinatorics(p: u64, k: u32) -> VerifySummary {
    let mut summary = VerifySummary::default();
    let ku = k as usize;
    let formula = count_maximal_unlinked(p, k);
    let diff = count_subspaces(k + 1, p) - count_subspaces(k, p);
    summary.push("closed form", formula == diff, format!("Σ p^r n(k,r) = {formula}, N(k+1) − N(k) = {diff}"));

    let subspace = enumerate_maximal_unlinked_sets(p, ku, EnumerationMethod::Subspace).expect("valid shape");
    summary.push(
        "subspace enumeration",
        BigUint::from(subspace.len()) == formula,
        format!("{} sets", subspace.len()),
    );
    let brute = match enumerate_maximal_unlinked_sets(p, ku, EnumerationMethod::Brute) {
        Ok(b) => b,
        Err(e) => {
            summary.push("brute enumeration", true, format!("skipped: {e}"));
            return summary;
        }
    };
    summary.push("brute enumeration", brute == subspace, format!("{} sets", brute.len()));

    let flat = |set: &[u64]| -> Vec<Vec<u64>> {
        set.iter().map(|&i| IndexVector::from_index(p, ku, i).flat()).collect()
    };
    let size = p.pow(k);
    let mut bad_translate = 0;
    let mut bad_char = 0;
    let mut bad_size = 0;
    for set in &brute {
        let vecs = flat(set);
        if vecs.len() as u64 != size {
            bad_size += 1;
        }
        for a in &vecs {
            let t = translate_to_origin(p, &vecs, a);
            if !is_subspace(p, &t) {
                bad_translate += 1;
                continue;
            }
            if !satisfies_characterization(&SubspaceBasis::from_vectors(p, 2 * ku, t)) {
                bad_char += 1;
            }
        }
    }
    summary.push("translates are subspaces", bad_translate == 0, format!("{bad_translate} failures"));
    summary.push("translates satisfy the characterization", bad_char == 0, format!("{bad_char} failures"));
    summary.push(format!("size p^k = {size}"), bad_size == 0, format!("{bad_size} failures"));

    // Converse: a subspace of F_p^{2k} has the split form exactly when it is
    // a maximal unlinked set.
    let maximal: BTreeSet<&Vec<u64>> = brute.iter().collect();
    let mut bad_converse = 0;
    for w in all_subspaces(p, 2 * ku) {
        let mut idx: Vec<u64> = w.elements().iter().map(|v| IndexVector::from_flat(p, v).index()).collect();
        idx.sort_unstable();
        if satisfies_characterization(&w) != maximal.contains(&idx) {
            bad_converse += 1;
        }
    }
    summary.push("characterization converse", bad_converse == 0, format!("{bad_converse} failures"));

    let bound = p.pow(k.saturating_sub(1));
    let mut bad_meet = 0;
    for (i, a) in brute.iter().enumerate() {
        let sa: BTreeSet<_> = a.iter().collect();
        for b in &brute[i + 1..] {
            if b.iter().filter(|x| sa.contains(x)).count() as u64 > bound {
                bad_meet += 1;
            }
        }
    }
    summary.push(format!("pairwise intersections ≤ {bound}"), bad_meet == 0, format!("{bad_meet} failures"));
    summary
}

fn random_primary_prime(rng: &mut ChaCha8Rng, max_norm: u64) -> EisensteinInt {
    loop {
        let l = rng.gen_range(5..max_norm);
        if !is_prime(l) {
            continue;
        }
        if l % 3 == 1 {
            let pi = factor_split_prime(l).expect("split prime");
            return if rng.gen_bool(0.5) { pi.conj() } else { pi };
        }
        if l * l < max_norm {
            return EisensteinInt::from_integer(-(l as i64));
        }
    }
}

fn verify_reciprocity(pairs: usize, seed: u64, max_norm: u64) -> VerifySummary {
    let mut summary = VerifySummary::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    while done < pairs {
        let a = random_primary_prime(&mut rng, max_norm);
        let b = random_primary_prime(&mut rng, max_norm);
        if a.norm() == b.norm() {
            continue;
        }
        let ab = cubic_residue_symbol(&a, &b).expect("primary modulus");
        let ba = cubic_residue_symbol(&b, &a).expect("primary modulus");
        summary.push(format!("({a} / {b})"), ab == ba && ab != CubeRootValue::Zero, format!("{ab:?} vs {ba:?}"));
        done += 1;
    }
    summary
}
