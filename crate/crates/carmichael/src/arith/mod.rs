//! Arbitrary-precision and machine-width number theory primitives.
//!
//! Everything downstream (criterion checks, prime pools, the subset-product
//! search) is built on the types and operations in this module. All
//! operations are pure functions on immutable values.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

mod factorize;
mod primality;

pub use factorize::{factor, factor_with, FactorConfig};
pub use primality::{is_prime, is_prime_u64};

/// Arbitrary-precision natural number.
pub type Nat = BigUint;

/// Exclusive upper bound on residue moduli used by the search engine.
/// Keeping moduli below 2^63 lets all residue arithmetic run in u64/u128.
pub const MODULUS_LIMIT: u64 = 1 << 63;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("modulus must be nonzero")]
    ZeroModulus,
    #[error("modulus {0} is too large for the search engine (must be < 2^63)")]
    ModulusTooLarge(u128),
    #[error("{a} is not invertible modulo {modulus} (gcd = {gcd})")]
    NotInvertible { a: Nat, modulus: Nat, gcd: Nat },
    #[error("CRT inconsistent: {r1} (mod {m1}) and {r2} (mod {m2}) disagree modulo gcd {gcd}")]
    CrtInconsistent { r1: u64, m1: u64, r2: u64, m2: u64, gcd: u64 },
    #[error("invalid factorization: {0}")]
    InvalidFactorization(String),
    #[error("factorization incomplete: ran out of effort with cofactor {cofactor} unfactored")]
    IncompleteFactorization {
        partial: Vec<(Nat, u32)>,
        cofactor: Nat,
    },
    #[error("cannot factor 0")]
    ZeroValue,
}

/// A natural number together with its complete, sorted prime factorization.
///
/// Invariants (enforced on every constructor): primes strictly increasing,
/// every base prime, every exponent positive, and the product of
/// `p^e` equals `value`. The empty factor list represents 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactoredNat {
    value: Nat,
    factors: Vec<(Nat, u32)>,
}

impl FactoredNat {
    pub fn one() -> Self {
        FactoredNat {
            value: Nat::one(),
            factors: Vec::new(),
        }
    }

    /// Builds a `FactoredNat` from `(prime, exponent)` pairs, validating all
    /// invariants.
    pub fn from_factors(factors: Vec<(Nat, u32)>) -> Result<Self, ArithError> {
        let mut value = Nat::one();
        let mut prev: Option<&Nat> = None;
        for (p, e) in &factors {
            if *e == 0 {
                return Err(ArithError::InvalidFactorization(format!(
                    "exponent of {p} must be positive"
                )));
            }
            if let Some(q) = prev {
                if q >= p {
                    return Err(ArithError::InvalidFactorization(format!(
                        "primes must be strictly increasing ({q} precedes {p})"
                    )));
                }
            }
            if !is_prime(p) {
                return Err(ArithError::InvalidFactorization(format!(
                    "{p} is not prime"
                )));
            }
            value *= p.pow(*e);
            prev = Some(p);
        }
        Ok(FactoredNat { value, factors })
    }

    /// Builds a squarefree `FactoredNat` from a sorted list of distinct primes.
    pub fn from_primes(primes: &[u64]) -> Result<Self, ArithError> {
        Self::from_factors(primes.iter().map(|&p| (Nat::from(p), 1)).collect())
    }

    pub fn value(&self) -> &Nat {
        &self.value
    }

    pub fn factors(&self) -> &[(Nat, u32)] {
        &self.factors
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|(_, e)| *e == 1)
    }

    /// Number of prime factors counted with multiplicity.
    pub fn big_omega(&self) -> u64 {
        self.factors.iter().map(|(_, e)| u64::from(*e)).sum()
    }

    /// Number of divisors.
    pub fn divisor_count(&self) -> u64 {
        self.factors
            .iter()
            .map(|(_, e)| u64::from(*e) + 1)
            .product()
    }

    pub fn euler_phi(&self) -> Nat {
        euler_phi(self)
    }

    pub fn divisors(&self) -> Divisors {
        divisors(self)
    }

    pub fn to_u64(&self) -> Option<u64> {
        u64::try_from(&self.value).ok()
    }

    /// The factorization with machine-width primes, if all of them fit.
    pub fn factors_u64(&self) -> Option<Vec<(u64, u32)>> {
        self.factors
            .iter()
            .map(|(p, e)| u64::try_from(p).ok().map(|p| (p, *e)))
            .collect()
    }
}

impl fmt::Display for FactoredNat {
    /// Canonical factorization string: `2^7*3^3*5^2*7*11` with `^1` omitted,
    /// and `1` for the empty product.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for (p, e) in &self.factors {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if *e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for FactoredNat {
    type Err = ArithError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ArithError::InvalidFactorization("empty string".into()));
        }
        if s == "1" {
            return Ok(FactoredNat::one());
        }
        let mut factors = Vec::new();
        for token in s.split('*') {
            let token = token.trim();
            let (base, exp) = match token.split_once('^') {
                Some((b, e)) => {
                    let exp: u32 = e.trim().parse().map_err(|_| {
                        ArithError::InvalidFactorization(format!("bad exponent in `{token}`"))
                    })?;
                    (b.trim(), exp)
                }
                None => (token, 1),
            };
            let prime = Nat::from_str(base).map_err(|_| {
                ArithError::InvalidFactorization(format!("bad integer `{base}`"))
            })?;
            factors.push((prime, exp));
        }
        FactoredNat::from_factors(factors)
    }
}

impl Serialize for FactoredNat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FactoredNat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A residue class with a machine-width modulus (< 2^63).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    pub fn new(value: u64, modulus: u64) -> Result<Self, ArithError> {
        if modulus == 0 {
            return Err(ArithError::ZeroModulus);
        }
        if modulus >= MODULUS_LIMIT {
            return Err(ArithError::ModulusTooLarge(modulus as u128));
        }
        Ok(Residue {
            value: value % modulus,
            modulus,
        })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

/// `base^exponent mod modulus` by square-and-multiply.
pub fn mod_pow(base: &Nat, exponent: &Nat, modulus: &Nat) -> Result<Nat, ArithError> {
    if modulus.is_zero() {
        return Err(ArithError::ZeroModulus);
    }
    if modulus.is_one() {
        return Ok(Nat::zero());
    }
    Ok(base.modpow(exponent, modulus))
}

/// `a*b mod m` without overflow.
#[inline]
pub fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod m` on machine words.
pub fn pow_mod_u64(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut base = base % m;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod_u64(acc, base, m);
        }
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd(a: &Nat, b: &Nat) -> Nat {
    a.gcd(b)
}

pub fn lcm(a: &Nat, b: &Nat) -> Nat {
    a.lcm(b)
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Least common multiple on u64, `None` on overflow.
pub fn lcm_u64(a: u64, b: u64) -> Option<u64> {
    if a == 0 || b == 0 {
        return Some(0);
    }
    (a / a.gcd(&b)).checked_mul(b)
}

/// Integer square root with an exactness flag.
pub fn isqrt(n: &Nat) -> (Nat, bool) {
    let root = n.sqrt();
    let exact = &root * &root == *n;
    (root, exact)
}

/// Euler's totient from a complete factorization: prod p^(e-1) * (p-1).
pub fn euler_phi(f: &FactoredNat) -> Nat {
    let mut phi = Nat::one();
    for (p, e) in f.factors() {
        phi *= p.pow(e - 1) * (p - 1u32);
    }
    phi
}

/// Modular inverse by extended Euclid. Errors when gcd(a, m) != 1.
pub fn mod_inverse(a: &Nat, m: &Nat) -> Result<Nat, ArithError> {
    if m.is_zero() {
        return Err(ArithError::ZeroModulus);
    }
    if m.is_one() {
        return Ok(Nat::zero());
    }
    let a_red = a % m;
    let e = num_bigint::BigInt::from(a_red.clone()).extended_gcd(&num_bigint::BigInt::from(m.clone()));
    if !e.gcd.is_one() {
        return Err(ArithError::NotInvertible {
            a: a.clone(),
            modulus: m.clone(),
            gcd: e.gcd.to_biguint().expect("gcd of naturals is nonnegative"),
        });
    }
    let m_int = num_bigint::BigInt::from(m.clone());
    let x = ((e.x % &m_int) + &m_int) % &m_int;
    Ok(x.to_biguint().expect("reduced representative is nonnegative"))
}

pub fn mod_inverse_u64(a: u64, m: u64) -> Option<u64> {
    // extended euclid on i128; m < 2^63 keeps everything in range
    if m == 0 {
        return None;
    }
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (i128::from(a % m), i128::from(m));
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    let m = i128::from(m);
    Some((((old_s % m) + m) % m) as u64)
}

/// Combines two congruences into one modulo the lcm of the moduli.
///
/// Succeeds exactly when the residues agree modulo gcd of the moduli;
/// the result reduces to each input under its respective modulus.
pub fn crt_combine(r1: Residue, r2: Residue) -> Result<Residue, ArithError> {
    let (a1, m1) = (r1.value, r1.modulus);
    let (a2, m2) = (r2.value, r2.modulus);
    let g = gcd_u64(m1, m2);
    if a1 % g != a2 % g {
        return Err(ArithError::CrtInconsistent {
            r1: a1,
            m1,
            r2: a2,
            m2,
            gcd: g,
        });
    }
    let l = lcm_u64(m1, m2)
        .filter(|&l| l < MODULUS_LIMIT)
        .ok_or(ArithError::ModulusTooLarge(m1 as u128 / g as u128 * m2 as u128))?;
    // x = a1 + m1 * k where k = ((a2 - a1)/g) * inv(m1/g) mod (m2/g)
    let m2g = m2 / g;
    let diff = ((i128::from(a2) - i128::from(a1)).rem_euclid(i128::from(m2))) as u64 / g;
    let inv = mod_inverse_u64(m1 / g % m2g, m2g).expect("m1/g and m2/g are coprime");
    let k = mulmod_u64(diff % m2g, inv, m2g);
    let x = (a1 as u128 + m1 as u128 * k as u128) % l as u128;
    Residue::new(x as u64, l)
}

/// Iterator over all divisors of a factored number.
///
/// Yields each divisor exactly once in a deterministic (odometer) order;
/// the count is the product of exponent+1 over the factorization.
pub struct Divisors {
    powers: Vec<Vec<Nat>>,
    counters: Vec<usize>,
    exhausted: bool,
}

/// Streams the divisors of `f` without materializing them.
pub fn divisors(f: &FactoredNat) -> Divisors {
    let powers = f
        .factors()
        .iter()
        .map(|(p, e)| {
            let mut row = Vec::with_capacity(*e as usize + 1);
            let mut acc = Nat::one();
            for _ in 0..=*e {
                row.push(acc.clone());
                acc *= p;
            }
            row
        })
        .collect::<Vec<_>>();
    Divisors {
        counters: vec![0; powers.len()],
        powers,
        exhausted: false,
    }
}

impl Iterator for Divisors {
    type Item = Nat;

    fn next(&mut self) -> Option<Nat> {
        if self.exhausted {
            return None;
        }
        let mut d = Nat::one();
        for (row, &c) in self.powers.iter().zip(&self.counters) {
            d *= &row[c];
        }
        // odometer increment
        let mut i = 0;
        loop {
            if i == self.counters.len() {
                self.exhausted = true;
                break;
            }
            if self.counters[i] + 1 < self.powers[i].len() {
                self.counters[i] += 1;
                break;
            }
            self.counters[i] = 0;
            i += 1;
        }
        Some(d)
    }
}

/// Iterator over divisors of a machine-width factored number.
pub struct DivisorsU64 {
    powers: Vec<Vec<u64>>,
    counters: Vec<usize>,
    exhausted: bool,
}

pub fn divisors_u64(factors: &[(u64, u32)]) -> DivisorsU64 {
    let powers = factors
        .iter()
        .map(|&(p, e)| {
            let mut row = Vec::with_capacity(e as usize + 1);
            let mut acc = 1u64;
            for _ in 0..=e {
                row.push(acc);
                acc = acc.saturating_mul(p);
            }
            row
        })
        .collect::<Vec<_>>();
    DivisorsU64 {
        counters: vec![0; powers.len()],
        powers,
        exhausted: false,
    }
}

impl Iterator for DivisorsU64 {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.exhausted {
            return None;
        }
        let mut d = 1u64;
        for (row, &c) in self.powers.iter().zip(&self.counters) {
            d *= row[c];
        }
        let mut i = 0;
        loop {
            if i == self.counters.len() {
                self.exhausted = true;
                break;
            }
            if self.counters[i] + 1 < self.powers[i].len() {
                self.counters[i] += 1;
                break;
            }
            self.counters[i] = 0;
            i += 1;
        }
        Some(d)
    }
}

/// Serde helpers: u64 as decimal string (avoids 53-bit truncation in
/// downstream JSON tools).
pub mod serde_u64_str {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serde helpers: arbitrary-precision naturals as decimal strings.
pub mod serde_nat_str {
    use super::Nat;
    use serde::{Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(v: &Nat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Nat, D::Error> {
        let s = String::deserialize(d)?;
        Nat::from_str(&s).map_err(serde::de::Error::custom)
    }
}
