//! Exact computation of the 3-rank of `φ(ker φ²)` for cyclic cubic fields,
//! where `φ = 1 − σ` acts on the 3-torsion of the class group, together with
//! the combinatorics and closed forms that predict its distribution.
//!
//! Modules, bottom up:
//!
//! - [`eisenstein`]: `Z[ω]`, primary primes, the cubic residue symbol.
//! - [`fields`]: conductors and local cubic characters of cyclic cubic fields.
//! - [`norms`]: the local norm test, norm-divisor counts, the rank `s`, and
//!   the exact character-sum identity for `Σ_K |im φ|^k`.
//! - [`linkage`]: linked indices, maximal unlinked sets, subspace counts.
//! - [`heuristics`]: η-products, predicted densities and moments.
//! - [`harness`]: sharded scans, reports, checkpoints, cross-checks.

pub mod arith;
pub mod eisenstein;
pub mod fields;
pub mod harness;
pub mod heuristics;
pub mod linkage;
pub mod norms;

pub use eisenstein::{CubeRootValue, EisensteinInt};
pub use fields::{Conductor, CyclicCubicField};
pub use harness::{MomentReport, ScanConfig};
pub use norms::RankRecord;
