//! Prime pools P(m, L) and the fecundity statistic F(L).
//!
//! P(m, L) is the set of primes p not dividing L with p^r - 1 | L for every
//! r <= m. Squarefree products of pool primes that are ≡ 1 (mod L) are
//! rigid Carmichael numbers of order m, and the expected number of such
//! products is about 2^F(L) where F(L) = #P(m,L) - log2 φ(L).

use crate::arith::{self, divisors_u64, euler_phi, is_prime_u64, ArithError, FactoredNat, Nat};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PoolError {
    #[error("modulus {0} does not fit the machine-width search range (must be < 2^63)")]
    ModulusTooLarge(Nat),
    #[error("scan prime bound {0} exceeds the guard limit of 100")]
    PrimeBoundTooLarge(u64),
    #[error(
        "scan would enumerate more than {ceiling} candidate moduli; tighten the exponent caps or the bound"
    )]
    TooManyCandidates { ceiling: u64 },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// The complete set of admissible primes for one (m, L).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimePool {
    pub order: u32,
    pub modulus: FactoredNat,
    /// Sorted ascending; machine-width is guaranteed by the modulus bound
    /// (every pool prime is at most L + 1).
    pub primes: Vec<u64>,
}

impl PrimePool {
    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }
}

/// Fecundity and the quantities it is assembled from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FecundityRecord {
    #[serde(rename = "L")]
    pub modulus: FactoredNat,
    pub pool_size: usize,
    pub phi_log2: f64,
    /// pool_size - phi_log2; also the log2 of the expected census size.
    pub fecundity: f64,
    pub expected_count_log2: f64,
}

/// Builds P(m, L) by enumerating divisors d of L and testing d + 1.
///
/// Candidates with d + 1 prime already satisfy the r = 1 condition
/// (p - 1 = d divides L); the higher degrees r in [2, m] are checked
/// directly. Complete: any pool prime p has p - 1 | L, so p - 1 is some
/// divisor d and p is examined.
pub fn prime_pool(m: u32, l: &FactoredNat) -> Result<PrimePool, PoolError> {
    assert!(m >= 1, "order must be at least 1");
    let (l_u64, l_factors) = machine_width(l)?;
    let mut primes = Vec::new();
    for d in divisors_u64(&l_factors) {
        let Some(p) = d.checked_add(1) else { continue };
        if !is_prime_u64(p) || l_u64 % p == 0 {
            continue;
        }
        if higher_degrees_hold(p, m, l_u64) {
            primes.push(p);
        }
    }
    primes.sort_unstable();
    Ok(PrimePool {
        order: m,
        modulus: l.clone(),
        primes,
    })
}

fn machine_width(l: &FactoredNat) -> Result<(u64, Vec<(u64, u32)>), PoolError> {
    let value = l
        .to_u64()
        .filter(|&v| v < arith::MODULUS_LIMIT)
        .ok_or_else(|| PoolError::ModulusTooLarge(l.value().clone()))?;
    let factors = l.factors_u64().expect("value fits, so factors fit");
    Ok((value, factors))
}

/// p^r - 1 | L for every r in [2, m], computed in u128 to dodge overflow.
fn higher_degrees_hold(p: u64, m: u32, l: u64) -> bool {
    let l_wide = l as u128;
    let mut power = p as u128;
    for _ in 2..=m {
        power = match power.checked_mul(p as u128) {
            Some(v) => v,
            None => return false, // p^r - 1 > L, cannot divide
        };
        let modulus = power - 1;
        if modulus > l_wide || !l_wide.is_multiple_of(modulus) {
            return false;
        }
    }
    true
}

/// F(L) = #P(m, L) - log2 φ(L), with the pieces it is made of.
pub fn fecundity(l: &FactoredNat, m: u32) -> Result<FecundityRecord, PoolError> {
    let pool = prime_pool(m, l)?;
    let phi = euler_phi(l);
    let phi_u64 = u64::try_from(&phi).expect("phi <= L < 2^63");
    let phi_log2 = (phi_u64 as f64).log2();
    let fecundity = pool.len() as f64 - phi_log2;
    Ok(FecundityRecord {
        modulus: l.clone(),
        pool_size: pool.len(),
        phi_log2,
        fecundity,
        expected_count_log2: fecundity,
    })
}

/// log2 of the heuristic estimate for the census size — an alias of
/// [`fecundity`]'s headline number, named for report readability.
pub fn expected_count(l: &FactoredNat, m: u32) -> Result<f64, PoolError> {
    Ok(fecundity(l, m)?.fecundity)
}

/// Scan controls: which moduli to enumerate and how hard to try.
#[derive(Debug, Clone)]
pub struct ScanParams {
    /// Only primes up to this bound (inclusive, guarded at 100) may divide
    /// a candidate modulus.
    pub prime_bound: u64,
    /// Per-prime exponent caps; primes not listed get `default_cap`.
    pub exponent_caps: BTreeMap<u64, u32>,
    pub default_cap: u32,
    /// Candidates are kept at or below this value.
    pub l_bound: u64,
    pub order: u32,
    /// How many top records to return.
    pub top_k: usize,
    /// Abort if the candidate count would exceed this.
    pub candidate_ceiling: u64,
}

impl Default for ScanParams {
    fn default() -> Self {
        ScanParams {
            prime_bound: 37,
            exponent_caps: BTreeMap::new(),
            default_cap: 1,
            l_bound: 1 << 45,
            order: 2,
            top_k: 100,
            candidate_ceiling: 1_000_000,
        }
    }
}

/// Enumerates every modulus L = ∏ p^e (p <= prime_bound, e <= cap(p),
/// L <= l_bound, including the empty product L = 1), computes each record,
/// and returns the `top_k` by fecundity, ties broken toward smaller L.
pub fn fecundity_scan(params: &ScanParams) -> Result<Vec<FecundityRecord>, PoolError> {
    if params.prime_bound > 100 {
        return Err(PoolError::PrimeBoundTooLarge(params.prime_bound));
    }
    let primes: Vec<u64> = (2..=params.prime_bound).filter(|&p| is_prime_u64(p)).collect();
    let caps: Vec<u32> = primes
        .iter()
        .map(|p| params.exponent_caps.get(p).copied().unwrap_or(params.default_cap))
        .collect();

    // DFS frame: (next prime index, partial product, exponents so far)
    type Frame = (usize, u64, Vec<(u64, u32)>);
    let mut candidates: Vec<Vec<(u64, u32)>> = Vec::new();
    let mut stack: Vec<Frame> = vec![(0, 1, Vec::new())];
    while let Some((idx, value, factors)) = stack.pop() {
        if idx == primes.len() {
            if candidates.len() as u64 >= params.candidate_ceiling {
                return Err(PoolError::TooManyCandidates {
                    ceiling: params.candidate_ceiling,
                });
            }
            candidates.push(factors);
            continue;
        }
        // exponent 0 first, then 1..cap while the bound allows
        stack.push((idx + 1, value, factors.clone()));
        let mut v = value;
        for e in 1..=caps[idx] {
            v = match v.checked_mul(primes[idx]) {
                Some(v) if v <= params.l_bound && v < arith::MODULUS_LIMIT => v,
                _ => break,
            };
            let mut f = factors.clone();
            f.push((primes[idx], e));
            stack.push((idx + 1, v, f));
        }
    }

    // one primality memo across all candidates: moduli share most divisors
    let mut memo: HashMap<u64, bool> = HashMap::new();
    let mut records = Vec::with_capacity(candidates.len());
    for factors in candidates {
        let l = FactoredNat::from_factors(
            factors.iter().map(|&(p, e)| (Nat::from(p), e)).collect(),
        )?;
        records.push(fecundity_memo(&l, &factors, params.order, &mut memo));
    }
    records.sort_by(|a, b| {
        b.fecundity
            .partial_cmp(&a.fecundity)
            .expect("fecundities are finite")
            .then_with(|| a.modulus.value().cmp(b.modulus.value()))
    });
    records.truncate(params.top_k);
    Ok(records)
}

/// Same arithmetic as [`fecundity`], but with primality answers cached
/// across calls — the scan revisits the same d + 1 values constantly.
fn fecundity_memo(
    l: &FactoredNat,
    factors: &[(u64, u32)],
    m: u32,
    memo: &mut HashMap<u64, bool>,
) -> FecundityRecord {
    let l_u64 = l.to_u64().expect("scan keeps moduli machine-width");
    let mut pool_size = 0usize;
    for d in divisors_u64(factors) {
        let Some(p) = d.checked_add(1) else { continue };
        let prime = *memo.entry(p).or_insert_with(|| is_prime_u64(p));
        if prime && !l_u64.is_multiple_of(p) && higher_degrees_hold(p, m, l_u64) {
            pool_size += 1;
        }
    }
    let phi_u64 = u64::try_from(&euler_phi(l)).expect("phi <= L < 2^63");
    let phi_log2 = (phi_u64 as f64).log2();
    FecundityRecord {
        modulus: l.clone(),
        pool_size,
        phi_log2,
        fecundity: pool_size as f64 - phi_log2,
        expected_count_log2: pool_size as f64 - phi_log2,
    }
}
