//! Search for non-rigid order-2 elements built around a distinguished prime.
//!
//! Fix a modulus L0 and a prime p0 not dividing it. A squarefree product
//! n = p0 * n0, with n0 drawn from P(2, L0), passes the order-2 criterion
//! whenever n ≡ 1 (mod L0) and n ≡ p0 (mod p0^2 - 1): the pool primes get
//! Frobenius exponent 0 at both degrees and p0 gets exponent exactly 1 at
//! degree 2, which is what makes n non-rigid. Both congruences fold into
//! the single condition n0 ≡ t (mod L) where L = lcm(L0, p0^2 - 1) and
//! t = crt(p0^{-1} mod L0, 1 mod p0^2 - 1) — a target the subset-product
//! engine can chase directly. The crt system is solvable precisely when
//! gcd(L0, p0^2 - 1) divides p0 - 1, which is the condition `validate`
//! enforces.

use crate::arith::{
    self, crt_combine, factor, is_prime_u64, serde_nat_str, serde_u64_str, ArithError,
    FactoredNat, Nat, Residue, MODULUS_LIMIT,
};
use crate::korselt::{self, Verdict};
use crate::mitm::{
    enumerate_hits, EngineConfig, MitmError, PartitionStrategy, SubsetProductInstance,
};
use crate::pool::{prime_pool, PoolError};
use num_traits::ToPrimitive;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum NonRigidError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{p0} divides the base modulus {l0}")]
    DividesModulus { p0: u64, l0: Nat },
    #[error(
        "gcd(L0, p0^2 - 1) = {gcd} does not divide p0 - 1 = {p0_minus_1}; \
         the two congruences on n are incompatible"
    )]
    GcdCondition { gcd: u64, p0_minus_1: u64 },
    #[error("lcm(L0, p0^2 - 1) for p0 = {p0} does not fit the modulus width")]
    ModulusTooLarge { l0: Nat, p0: u64 },
    #[error("no admissible prime up to {bound}")]
    NoCandidate { bound: u64 },
    #[error("{n} fails re-verification: {reason}")]
    Verification { n: Nat, reason: String },
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Mitm(#[from] MitmError),
    #[error(transparent)]
    Pool(#[from] PoolError),
}

/// A validated (L0, p0) pair with its derived search modulus and target.
#[derive(Debug, Clone)]
pub struct NonRigidInstance {
    l0: FactoredNat,
    p0: u64,
    /// lcm(L0, p0^2 - 1)
    modulus: u64,
    /// crt(p0^{-1} mod L0, 1 mod p0^2 - 1)
    target: u64,
}

impl NonRigidInstance {
    pub fn base_modulus(&self) -> &FactoredNat {
        &self.l0
    }

    pub fn p0(&self) -> u64 {
        self.p0
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn target(&self) -> u64 {
        self.target
    }

    /// The primes the cofactor n0 may use: P(2, L0) minus p0 and minus
    /// anything sharing a factor with the search modulus.
    pub fn admissible_primes(&self) -> Result<Vec<u64>, NonRigidError> {
        let pool = prime_pool(2, &self.l0)?;
        Ok(pool
            .primes
            .into_iter()
            .filter(|&p| p != self.p0 && !self.modulus.is_multiple_of(p))
            .collect())
    }
}

/// Checks every admissibility condition for (L0, p0), each failure with
/// its own error.
pub fn validate(l0: &FactoredNat, p0: u64) -> Result<NonRigidInstance, NonRigidError> {
    if !is_prime_u64(p0) {
        return Err(NonRigidError::NotPrime(p0));
    }
    if (l0.value() % Nat::from(p0)) == Nat::from(0u32) {
        return Err(NonRigidError::DividesModulus {
            p0,
            l0: l0.value().clone(),
        });
    }
    let too_large = || NonRigidError::ModulusTooLarge {
        l0: l0.value().clone(),
        p0,
    };
    let l0_u64 = l0.to_u64().ok_or_else(too_large)?;
    let p0_sq = p0.checked_mul(p0).ok_or_else(too_large)?;
    let m = p0_sq - 1;
    let g = arith::gcd_u64(l0_u64, m);
    if !(p0 - 1).is_multiple_of(g) {
        return Err(NonRigidError::GcdCondition {
            gcd: g,
            p0_minus_1: p0 - 1,
        });
    }
    let modulus = arith::lcm_u64(l0_u64, m)
        .filter(|&l| l < MODULUS_LIMIT)
        .ok_or_else(too_large)?;
    let p0_inv = arith::mod_inverse_u64(p0 % l0_u64, l0_u64)
        .expect("p0 does not divide L0, so it is a unit");
    let target = crt_combine(Residue::new(p0_inv, l0_u64)?, Residue::new(1, m)?)?;
    debug_assert_eq!(target.modulus(), modulus);
    Ok(NonRigidInstance {
        l0: l0.clone(),
        p0,
        modulus,
        target: target.value(),
    })
}

/// The least prime p0 <= bound that `validate` accepts for this L0.
pub fn smallest_valid_p0(l0: &FactoredNat, bound: u64) -> Result<NonRigidInstance, NonRigidError> {
    let mut p = 2u64;
    while p <= bound {
        if is_prime_u64(p) {
            match validate(l0, p) {
                Ok(instance) => return Ok(instance),
                Err(
                    NonRigidError::DividesModulus { .. }
                    | NonRigidError::GcdCondition { .. }
                    | NonRigidError::ModulusTooLarge { .. },
                ) => {}
                Err(other) => return Err(other),
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    Err(NonRigidError::NoCandidate { bound })
}

/// One discovered element n = p0 * n0.
#[derive(Debug, Clone, Serialize)]
pub struct NonRigidElement {
    #[serde(with = "serde_nat_str")]
    pub n: Nat,
    #[serde(with = "serde_nat_str")]
    pub n0: Nat,
    /// Factorization of n, p0 included.
    pub factors: FactoredNat,
    /// Subset mask of n0 over the pool passed to the search.
    #[serde(with = "serde_u64_str")]
    pub mask: u64,
}

/// Census of an instance's non-rigid elements.
#[derive(Debug, Clone)]
pub struct NonRigidCensus {
    pub instance_summary: String,
    pub count: usize,
    /// Sorted by n.
    pub elements: Vec<NonRigidElement>,
    /// pool size - log2 φ(L): log2 of the heuristic census estimate.
    pub expected_log2: f64,
}

/// Runs the subset-product search over the full admissible pool.
pub fn search_nonrigid(
    instance: &NonRigidInstance,
    strategy: PartitionStrategy,
    config: &EngineConfig,
) -> Result<NonRigidCensus, NonRigidError> {
    let primes = instance.admissible_primes()?;
    search_with_pool(instance, primes, strategy, config)
}

/// Same search over an explicit (sub)pool — every hit is still fully
/// re-verified, so a reduced pool yields a correct partial census.
pub fn search_with_pool(
    instance: &NonRigidInstance,
    primes: Vec<u64>,
    strategy: PartitionStrategy,
    config: &EngineConfig,
) -> Result<NonRigidCensus, NonRigidError> {
    let pool_size = primes.len();
    let subset = SubsetProductInstance::new(primes, instance.modulus, instance.target, strategy)?
        .with_min_factors(1);
    let result = enumerate_hits(&subset, config)?;

    let mut elements = Vec::with_capacity(result.hits.len());
    for hit in result.hits {
        let mut ps: Vec<u64> = Vec::with_capacity(hit.mask.count_ones() as usize + 1);
        let mut bits = hit.mask;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            ps.push(subset.primes()[i]);
            bits &= bits - 1;
        }
        ps.push(instance.p0);
        ps.sort_unstable();
        let factors = FactoredNat::from_primes(&ps).expect("distinct primes");
        verify_element(instance, &factors)?;
        elements.push(NonRigidElement {
            n: factors.value().clone(),
            n0: hit.product,
            factors,
            mask: hit.mask,
        });
    }
    elements.sort_by(|a, b| a.n.cmp(&b.n));

    let phi = arith::euler_phi(&factor(&Nat::from(instance.modulus))?);
    let phi_log2 = phi.to_f64().expect("phi < 2^63").log2();
    Ok(NonRigidCensus {
        instance_summary: format!(
            "p0={}, L={}, t={}, pool of {} primes",
            instance.p0, instance.modulus, instance.target, pool_size
        ),
        count: elements.len(),
        elements,
        expected_log2: pool_size as f64 - phi_log2,
    })
}

/// Re-derives every property a claimed element must have. Used on search
/// output and by the fast verification path that replaces a full sweep.
pub fn verify_element(
    instance: &NonRigidInstance,
    n: &FactoredNat,
) -> Result<(), NonRigidError> {
    let fail = |reason: String| NonRigidError::Verification {
        n: n.value().clone(),
        reason,
    };
    let p0 = Nat::from(instance.p0);
    match n.factors().iter().find(|(p, _)| *p == p0) {
        Some((_, 1)) => {}
        Some((_, e)) => return Err(fail(format!("p0 divides it {e} times, not once"))),
        None => return Err(fail("p0 does not divide it".into())),
    }
    let pool = prime_pool(2, &instance.l0)?;
    for (p, e) in n.factors() {
        if *p == p0 {
            continue;
        }
        if *e != 1 {
            return Err(fail(format!("{p} appears with exponent {e}")));
        }
        let p_u64 = u64::try_from(p).map_err(|_| fail(format!("{p} is outside the pool")))?;
        if pool.primes.binary_search(&p_u64).is_err() {
            return Err(fail(format!("{p} is not an admissible pool prime")));
        }
    }
    let n0 = n.value() / &p0;
    let n0_mod = u64::try_from(&n0 % Nat::from(instance.modulus)).expect("modulus fits u64");
    if n0_mod != instance.target {
        return Err(fail(format!(
            "cofactor ≡ {} (mod {}), expected {}",
            n0_mod, instance.modulus, instance.target
        )));
    }
    let report = korselt::check_order(n, 2);
    if report.verdict != Verdict::CarmichaelOfOrder {
        return Err(fail(format!(
            "order-2 verdict is {:?}, expected a non-rigid pass",
            report.verdict
        )));
    }
    match korselt::frobenius_exponent(n.value(), &p0, 2) {
        Some(1) => Ok(()),
        other => Err(fail(format!(
            "Frobenius exponent at (p0, 2) is {other:?}, expected Some(1)"
        ))),
    }
}
