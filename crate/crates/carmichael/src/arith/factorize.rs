//! Integer factorization: trial division by sieved primes, then Pollard
//! rho (Brent's variant) with an explicit effort ceiling.

use super::primality::{is_prime, sieve_below};
use super::{mulmod_u64, ArithError, FactoredNat, Nat};
use num_integer::Integer;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;

/// Primes below one million, shared by all factorizations.
static TRIAL_PRIMES: Lazy<Vec<u64>> = Lazy::new(|| sieve_below(1_000_000));

/// Effort limits for [`factor_with`].
#[derive(Debug, Clone)]
pub struct FactorConfig {
    /// Trial-divide by primes up to this bound (clamped to 10^6).
    pub trial_bound: u64,
    /// Total Pollard-rho iterations allowed across all cofactors.
    pub rho_budget: u64,
}

impl Default for FactorConfig {
    fn default() -> Self {
        FactorConfig {
            trial_bound: 1_000_000,
            rho_budget: 50_000_000,
        }
    }
}

/// Complete factorization with default effort limits.
pub fn factor(n: &Nat) -> Result<FactoredNat, ArithError> {
    factor_with(n, &FactorConfig::default())
}

/// Complete factorization of `n >= 1`.
///
/// Returns [`ArithError::IncompleteFactorization`] carrying the factors
/// found so far when the rho budget runs out before the number is fully
/// split; never silently returns a partial answer.
pub fn factor_with(n: &Nat, config: &FactorConfig) -> Result<FactoredNat, ArithError> {
    if n.is_zero() {
        return Err(ArithError::ZeroValue);
    }
    if n.is_one() {
        return Ok(FactoredNat::one());
    }

    let mut found: Vec<(Nat, u32)> = Vec::new();
    let mut cofactor = n.clone();

    // Phase 1: trial division.
    let bound = config.trial_bound.min(1_000_000);
    for &p in TRIAL_PRIMES.iter().take_while(|&&p| p <= bound) {
        if cofactor.is_one() {
            break;
        }
        let big_p = Nat::from(p);
        // stop early once p^2 exceeds the cofactor: it is prime
        if big_p.bits() * 2 > cofactor.bits() + 1 && &big_p * &big_p > cofactor {
            break;
        }
        let mut e = 0u32;
        loop {
            let (q, r) = cofactor.div_rem(&big_p);
            if !r.is_zero() {
                break;
            }
            cofactor = q;
            e += 1;
        }
        if e > 0 {
            found.push((big_p, e));
        }
    }

    // Phase 2: split what remains with Pollard rho.
    let mut budget = config.rho_budget;
    let mut stack: Vec<Nat> = Vec::new();
    if !cofactor.is_one() {
        stack.push(cofactor);
    }
    let mut out_of_effort: Vec<Nat> = Vec::new();
    while let Some(c) = stack.pop() {
        if is_prime(&c) {
            merge_factor(&mut found, c, 1);
            continue;
        }
        let (root, exact) = super::isqrt(&c);
        if exact && is_prime(&root) {
            merge_factor(&mut found, root, 2);
            continue;
        }
        match rho_split(&c, &mut budget) {
            Some(d) => {
                let q = &c / &d;
                stack.push(d);
                stack.push(q);
            }
            None => out_of_effort.push(c),
        }
    }

    found.sort_by(|a, b| a.0.cmp(&b.0));
    if !out_of_effort.is_empty() {
        let mut residue = Nat::one();
        for c in out_of_effort {
            residue *= c;
        }
        return Err(ArithError::IncompleteFactorization {
            partial: found,
            cofactor: residue,
        });
    }
    let result = FactoredNat::from_factors(found)?;
    debug_assert_eq!(result.value(), n);
    Ok(result)
}

fn merge_factor(found: &mut Vec<(Nat, u32)>, p: Nat, e: u32) {
    for (q, f) in found.iter_mut() {
        if *q == p {
            *f += e;
            return;
        }
    }
    found.push((p, e));
}

/// Finds a nontrivial divisor of composite `n`, or `None` if the iteration
/// budget is exhausted. Uses Brent's cycle detection with batched gcds.
fn rho_split(n: &Nat, budget: &mut u64) -> Option<Nat> {
    if n.is_even() {
        return Some(Nat::from(2u32));
    }
    if let Ok(small) = u64::try_from(n) {
        return rho_split_u64(small, budget).map(Nat::from);
    }

    for c in 1u64.. {
        if *budget == 0 {
            return None;
        }
        let c = Nat::from(c);
        let mut y = Nat::from(2u32);
        let mut r: u64 = 1;
        let mut q = Nat::one();
        let (mut x, mut ys) = (y.clone(), y.clone());
        let mut g = Nat::one();
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = (&y * &y + &c) % n;
            }
            let mut k: u64 = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                let batch = 128.min(r - k);
                if *budget < batch {
                    *budget = 0;
                    return None;
                }
                *budget -= batch;
                for _ in 0..batch {
                    y = (&y * &y + &c) % n;
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += batch;
            }
            r *= 2;
        }
        if g == *n {
            // batch overshot: replay one step at a time
            loop {
                ys = (&ys * &ys + &c) % n;
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if g != *n {
            return Some(g);
        }
        // cycle degenerated; retry with the next polynomial offset
    }
    unreachable!()
}

fn rho_split_u64(n: u64, budget: &mut u64) -> Option<u64> {
    if n.is_multiple_of(2) {
        return Some(2);
    }
    for c in 1u64.. {
        if *budget == 0 {
            return None;
        }
        let mut y: u64 = 2;
        let mut r: u64 = 1;
        let mut q: u64 = 1;
        let (mut x, mut ys) = (y, y);
        let mut g: u64 = 1;
        let step = |v: u64| (mulmod_u64(v, v, n) + c) % n;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = step(y);
            }
            let mut k: u64 = 0;
            while k < r && g == 1 {
                ys = y;
                let batch = 128.min(r - k);
                if *budget < batch {
                    *budget = 0;
                    return None;
                }
                *budget -= batch;
                for _ in 0..batch {
                    y = step(y);
                    q = mulmod_u64(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += batch;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = step(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g != 1 {
                    break;
                }
            }
        }
        if g != n {
            return Some(g);
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::str::FromStr;

    #[test]
    fn factors_small_numbers() {
        let f = factor(&Nat::from(561u32)).unwrap();
        assert_eq!(f.to_string(), "3*11*17");
        let f = factor(&Nat::from(720u32)).unwrap();
        assert_eq!(f.to_string(), "2^4*3^2*5");
        let f = factor(&Nat::one()).unwrap();
        assert_eq!(f.to_string(), "1");
        let f = factor(&Nat::from(2u32)).unwrap();
        assert_eq!(f.to_string(), "2");
    }

    #[test]
    fn zero_is_rejected() {
        assert!(matches!(factor(&Nat::zero()), Err(ArithError::ZeroValue)));
    }

    #[test]
    fn factors_semiprime_beyond_trial_range() {
        // 1000003 * 1000033, both prime, both above the trial bound
        let n = Nat::from(1_000_003u64) * Nat::from(1_000_033u64);
        let f = factor(&n).unwrap();
        assert_eq!(f.to_string(), "1000003*1000033");
    }

    #[test]
    fn factors_prime_square_beyond_trial_range() {
        let p = Nat::from(1_000_003u64);
        let f = factor(&(&p * &p)).unwrap();
        assert_eq!(f.to_string(), "1000003^2");
    }

    #[test]
    fn factors_big_smooth_number() {
        // 2^10 * 3^5 * 1000003^2
        let n = Nat::from(1024u32) * Nat::from(243u32) * Nat::from(1_000_003u64).pow(2);
        let f = factor(&n).unwrap();
        assert_eq!(f.to_string(), "2^10*3^5*1000003^2");
        assert_eq!(f.value(), &n);
    }

    #[test]
    fn effort_ceiling_reports_partial_progress() {
        // RSA-style 2x 120-bit semiprime is far beyond a tiny rho budget
        let p = Nat::from_str("1267650600228229401496703205653").unwrap();
        let q = Nat::from_str("1267650600228229401496703205361").unwrap();
        assert!(is_prime(&p) && is_prime(&q));
        let n = Nat::from(12u32) * &p * &q;
        let config = FactorConfig {
            trial_bound: 1_000_000,
            rho_budget: 10,
        };
        match factor_with(&n, &config) {
            Err(ArithError::IncompleteFactorization { partial, cofactor }) => {
                // trial division still peeled off 2^2 * 3
                assert_eq!(partial, vec![(Nat::from(2u32), 2), (Nat::from(3u32), 1)]);
                assert_eq!(cofactor, &p * &q);
            }
            other => panic!("expected incomplete factorization, got {other:?}"),
        }
    }

    #[test]
    fn round_trips_through_value() {
        for n in [2u64, 97, 1 << 20, 999_983, 123_456_789, u32::MAX as u64] {
            let f = factor(&Nat::from(n)).unwrap();
            assert_eq!(f.value(), &Nat::from(n));
            assert!(f.factors().iter().all(|(p, _)| is_prime(p)));
        }
    }
}
