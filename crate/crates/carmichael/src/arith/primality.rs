//! Primality testing: deterministic below 2^64, strong probable-prime
//! testing with a fixed round count above.

use super::{mulmod_u64, Nat};
use num_bigint::RandBigInt;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Witnesses that make Miller-Rabin deterministic for all n < 2^64.
const MR_BASES_U64: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Number of random rounds used above 2^64 (error probability <= 4^-64).
const MR_ROUNDS_BIG: usize = 64;

/// Small primes used to cheaply reject composites before Miller-Rabin.
const SMALL_PRIMES: [u64; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// Deterministic primality test for machine-width integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in SMALL_PRIMES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    // n odd, > 97: write n-1 = d * 2^s
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in MR_BASES_U64 {
        let mut x = super::pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primality test for arbitrary-precision naturals.
///
/// Deterministic below 2^64; otherwise a strong probable-prime test with
/// 64 rounds whose bases are drawn from a generator seeded by the input,
/// so repeated calls on the same value always agree.
pub fn is_prime(n: &Nat) -> bool {
    if let Ok(small) = u64::try_from(n) {
        return is_prime_u64(small);
    }
    for p in SMALL_PRIMES {
        if (n % p).is_zero() {
            return false;
        }
    }
    let one = Nat::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().expect("n > 2 is odd here");
    let d = &n_minus_1 >> s;
    let mut rng = ChaCha8Rng::seed_from_u64(seed_from(n));
    let low = Nat::from(2u32);
    'round: for _ in 0..MR_ROUNDS_BIG {
        let a = rng.gen_biguint_range(&low, &n_minus_1);
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'round;
            }
        }
        return false;
    }
    true
}

/// Derives a witness-generator seed from the number under test, making the
/// probabilistic path a pure function of its input.
fn seed_from(n: &Nat) -> u64 {
    let digits = n.to_u64_digits();
    let mut seed = 0xc6a4_a793_5bd1_e995u64 ^ (digits.len() as u64);
    for d in digits {
        seed = seed.rotate_left(23) ^ d.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    }
    seed
}

/// Simple sieve of Eratosthenes; returns all primes below `limit`.
pub(crate) fn sieve_below(limit: u64) -> Vec<u64> {
    if limit < 3 {
        return if limit > 2 { vec![2] } else { vec![] };
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit];
    let mut primes = Vec::new();
    for i in 2..limit {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j < limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert!(!is_prime_u64(0));
        assert!(!is_prime_u64(1));
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(3));
        assert!(!is_prime_u64(4));
        assert!(is_prime_u64(97));
        assert!(!is_prime_u64(9409)); // 97^2
    }

    #[test]
    fn matches_sieve_below_10000() {
        let primes = sieve_below(10_000);
        let mut idx = 0;
        for n in 0..10_000u64 {
            let expected = idx < primes.len() && primes[idx] == n;
            assert_eq!(is_prime_u64(n), expected, "disagree at {n}");
            if expected {
                idx += 1;
            }
        }
    }

    #[test]
    fn strong_pseudoprimes_rejected() {
        // strong pseudoprimes to base 2
        for n in [2047u64, 3277, 4033, 4681, 8321, 15841, 29341] {
            assert!(!is_prime_u64(n), "{n} is composite");
        }
        // Arnault's 3015341941 is a strong pseudoprime to bases 2..,
        // composite = 6763 * 10627 * 29947
        assert!(!is_prime_u64(3_215_031_751)); // spsp to 2,3,5,7
    }

    #[test]
    fn carmichael_numbers_are_composite() {
        for n in [561u64, 1105, 1729, 2465, 2821, 6601, 8911] {
            assert!(!is_prime_u64(n));
        }
    }

    #[test]
    fn big_path_agrees_on_known_values() {
        // 2^89 - 1 is a Mersenne prime; 2^87 - 1 is composite.
        let m89 = (Nat::one() << 89) - Nat::one();
        let m87 = (Nat::one() << 87) - Nat::one();
        assert!(is_prime(&m89));
        assert!(!is_prime(&m87));
    }

    #[test]
    fn big_path_is_deterministic() {
        let n = (Nat::one() << 127) - Nat::one(); // Mersenne prime
        assert!(is_prime(&n));
        assert!(is_prime(&n));
    }
}
