//! Black-box endomorphism probes, independent of the divisibility criterion.
//!
//! The defining property of an order-m element is that x ↦ x^n is a ring
//! endomorphism of every Z/nZ-algebra spanned by m module generators. The
//! probes here attack that property directly on concrete algebras — finite
//! fields F_{p^r} for p | n, and quotient rings (Z/nZ)[x]/(f) — by firing
//! random additivity tests (x + y)^n = x^n + y^n at the full exponent n.
//! No exponent is ever reduced by a group order on the way in: that keeps
//! the probe's arithmetic disjoint from the theory it is checking.
//!
//! A refutation comes with a reusable witness pair and is definitive.
//! A pass is evidence, not proof; the field probe therefore also pins the
//! power map against the Frobenius orbit when the field is small enough
//! to find a generator, which upgrades a pass on that field to a proof.

mod field;
mod quotient;

pub use field::{endo_probe_field, make_field, FiniteField};
pub use quotient::{endo_probe_quotient, QuotientRing};

use crate::arith::{is_prime_u64, pow_mod_u64, serde_nat_str, serde_u64_str, FactoredNat, Nat};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// Hard ceiling for [`exhaustive_order1`].
pub const EXHAUSTIVE_GUARD: u64 = 10_000_000;

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("{p} does not divide {n}; the field probe needs a prime factor of the exponent")]
    PrimeDoesNotDivide { p: u64, n: Nat },
    #[error("no irreducible polynomial of degree {r} over F_{p} found after {attempts} draws")]
    IrreducibleSearchFailed { p: u64, r: u32, attempts: u32 },
    #[error("quotient modulus must be monic of degree at least 1")]
    BadQuotientModulus,
    #[error("ring modulus must be at least 2, got {0}")]
    RingTooSmall(Nat),
    #[error("scan limit {limit} exceeds the {guard} guard")]
    LimitTooLarge { limit: u64, guard: u64 },
}

/// What a probe concluded. Witness coefficients are decimal strings,
/// little-endian in the generator: a refutation can be re-checked by
/// anyone with the subject's description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ProbeOutcome {
    ConsistentWithEndomorphism,
    RefutedWithWitness { x: Vec<String>, y: Vec<String> },
}

/// A complete, reproducible record of one probe run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleVerdict {
    /// Human-readable algebra, e.g. "F_{11^2}" or "(Z/561)[x]/(x^2 + 3)".
    pub subject: String,
    #[serde(with = "serde_nat_str")]
    pub n: Nat,
    pub trials: u32,
    /// Additivity failures observed before stopping (0 or 1).
    pub failures: u32,
    #[serde(with = "serde_u64_str")]
    pub seed: u64,
    /// Whether the field was small enough to compare against the
    /// Frobenius orbit of a multiplicative generator.
    pub frobenius_orbit_checked: bool,
    /// Some(false) with a Consistent outcome means the power map is
    /// provably not additive but the random hunt missed a witness.
    pub frobenius_orbit_consistent: Option<bool>,
    pub outcome: ProbeOutcome,
}

impl OracleVerdict {
    pub fn is_refutation(&self) -> bool {
        matches!(self.outcome, ProbeOutcome::RefutedWithWitness { .. })
    }
}

/// Every composite n <= limit satisfying b^n ≡ b (mod n) for *all*
/// b — checked literally against each residue, bailing at the first
/// counterexample. Quadratic-ish, hence the guard; meant as ground truth
/// for small ranges, not as a search tool.
pub fn exhaustive_order1(limit: u64) -> Result<Vec<u64>, OracleError> {
    if limit > EXHAUSTIVE_GUARD {
        return Err(OracleError::LimitTooLarge {
            limit,
            guard: EXHAUSTIVE_GUARD,
        });
    }
    let mut found = Vec::new();
    for n in 4..=limit {
        if is_prime_u64(n) {
            continue;
        }
        // b = 0 and b = 1 hold trivially; the rest complete the system
        if (2..n).all(|b| pow_mod_u64(b, n, n) == b) {
            found.push(n);
        }
    }
    Ok(found)
}

/// Checks the binomial-coefficient obstruction: an order-m element must
/// have C(n, r) ≡ 0 (mod n) for every r up to m. For squarefree n this
/// is exactly the statement that no prime factor of n is <= m.
pub fn binomial_lemma_check(n: &FactoredNat, m: u32) -> bool {
    let nv = n.value();
    let mut c = Nat::one();
    for r in 1..=m {
        if &Nat::from(r) > nv {
            // C(n, r) = 0 from here on; nothing left to refute
            return true;
        }
        // C(n, r) = C(n, r-1) * (n - r + 1) / r, exact at every step
        c = c * (nv - Nat::from(r - 1)) / Nat::from(r);
        if !(&c % nv).is_zero() {
            return false;
        }
    }
    true
}
