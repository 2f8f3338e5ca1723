//! The order-m Korselt criterion.
//!
//! A squarefree composite `n` is a Carmichael number of order `m` exactly
//! when for every prime `p | n` and every degree `1 <= r <= m` there is an
//! exponent `i` with `n ≡ p^i (mod p^r - 1)`. The exponent identifies which
//! power of Frobenius the n-th-power map induces on the field with `p^r`
//! elements; the number is *rigid* when every such exponent is 0, i.e. the
//! map is the identity on all the relevant fields.

use crate::arith::{FactoredNat, Nat};
use num_traits::One;
use serde::{Deserialize, Serialize};

/// The exponent decision for one `(prime, degree)` pair.
///
/// `exponent = Some(i)` certifies `n ≡ prime^i (mod prime^degree - 1)`
/// with `i` minimal in `[0, degree)`; `None` certifies that no exponent
/// works. Searching `[0, degree)` is complete: the powers of `p` modulo
/// `p^r - 1` repeat with period `r` (since `p^r ≡ 1`), so any witness
/// `i >= r` reduces to one below `r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobeniusWitness {
    #[serde(rename = "p", with = "crate::arith::serde_nat_str")]
    pub prime: Nat,
    #[serde(rename = "r")]
    pub degree: u32,
    #[serde(rename = "i")]
    pub exponent: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// Composite, squarefree, every witness has an exponent, and at least
    /// one exponent is nonzero.
    CarmichaelOfOrder,
    /// As above but every exponent is zero (the strictly stronger verdict;
    /// a rigid number is in particular a Carmichael number of the order).
    RigidCarmichaelOfOrder,
    NotCarmichael,
    /// Units and primes: the definition only applies to composites.
    NotComposite,
}

/// Full per-prime, per-degree record of one criterion evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KorseltReport {
    #[serde(with = "crate::arith::serde_nat_str")]
    pub n: Nat,
    pub factors: FactoredNat,
    pub order: u32,
    pub squarefree: bool,
    pub composite: bool,
    pub witnesses: Vec<FrobeniusWitness>,
    pub verdict: Verdict,
}

impl KorseltReport {
    /// True for both the rigid and non-rigid affirmative verdicts.
    pub fn is_carmichael(&self) -> bool {
        matches!(
            self.verdict,
            Verdict::CarmichaelOfOrder | Verdict::RigidCarmichaelOfOrder
        )
    }

    /// The witness for a given `(prime, degree)` pair, if `prime | n`.
    pub fn witness(&self, prime: &Nat, degree: u32) -> Option<&FrobeniusWitness> {
        self.witnesses
            .iter()
            .find(|w| w.prime == *prime && w.degree == degree)
    }
}

/// Least `i` in `[0, r)` with `n ≡ p^i (mod p^r - 1)`, or `None`.
///
/// For `p = 2, r = 1` the modulus is 1 and every `n` qualifies with `i = 0`.
pub fn frobenius_exponent(n: &Nat, p: &Nat, r: u32) -> Option<u32> {
    let modulus = p.pow(r) - Nat::one();
    if modulus.is_one() {
        return Some(0);
    }
    let n_red = n % &modulus;
    let mut power = Nat::one();
    for i in 0..r {
        if n_red == power {
            return Some(i);
        }
        power = power * p % &modulus;
    }
    None
}

/// Evaluates the order-`m` criterion on a fully factored `n`.
///
/// Witnesses are reported for every `(p, r)` pair even when an early pair
/// already refutes, so reports are complete rather than merely decisive.
pub fn check_order(n: &FactoredNat, m: u32) -> KorseltReport {
    assert!(m >= 1, "order must be at least 1");
    let composite = n.big_omega() >= 2;
    let squarefree = n.is_squarefree();
    let mut witnesses = Vec::with_capacity(n.factors().len() * m as usize);
    for (p, _) in n.factors() {
        for r in 1..=m {
            witnesses.push(FrobeniusWitness {
                prime: p.clone(),
                degree: r,
                exponent: frobenius_exponent(n.value(), p, r),
            });
        }
    }
    let all_witnessed = witnesses.iter().all(|w| w.exponent.is_some());
    let all_zero = witnesses.iter().all(|w| w.exponent == Some(0));
    let verdict = if !composite {
        Verdict::NotComposite
    } else if !squarefree || !all_witnessed {
        Verdict::NotCarmichael
    } else if all_zero {
        Verdict::RigidCarmichaelOfOrder
    } else {
        Verdict::CarmichaelOfOrder
    };
    KorseltReport {
        n: n.value().clone(),
        factors: n.clone(),
        order: m,
        squarefree,
        composite,
        witnesses,
        verdict,
    }
}

/// True when `n ≡ 1 (mod p^r - 1)` for every `p | n` and every `r <= m`,
/// i.e. the check_order verdict is [`Verdict::RigidCarmichaelOfOrder`].
pub fn is_rigid(n: &FactoredNat, m: u32) -> bool {
    check_order(n, m).verdict == Verdict::RigidCarmichaelOfOrder
}

/// Largest `m <= m_cap` for which `n` is a Carmichael number of order `m`
/// (0 when none). The criterion is cumulative in the degree `r`, so order
/// `m` implies every smaller order and stopping at the first failure is
/// exact.
pub fn max_order(n: &FactoredNat, m_cap: u32) -> u32 {
    let mut best = 0;
    for m in 1..=m_cap {
        if !check_order(n, m).is_carmichael() {
            break;
        }
        best = m;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factor;

    fn fnat(n: u64) -> FactoredNat {
        factor(&Nat::from(n)).unwrap()
    }

    #[test]
    fn frobenius_exponent_cases() {
        // 561 mod (3^2 - 1) = 561 mod 8 = 1
        assert_eq!(
            frobenius_exponent(&Nat::from(561u32), &Nat::from(3u32), 2),
            Some(0)
        );
        // 561 mod 120 = 81, and powers of 11 mod 120 are {1, 11}
        assert_eq!(
            frobenius_exponent(&Nat::from(561u32), &Nat::from(11u32), 2),
            None
        );
        // trivial modulus p^r - 1 = 1
        assert_eq!(
            frobenius_exponent(&Nat::from(7u32), &Nat::from(2u32), 1),
            Some(0)
        );
        // a genuinely nonzero exponent: n = p = 5, r = 2: 5 ≡ 5^1 mod 24
        assert_eq!(
            frobenius_exponent(&Nat::from(5u32), &Nat::from(5u32), 2),
            Some(1)
        );
    }

    #[test]
    fn classic_561_is_rigid_order_1_but_not_order_2() {
        let n = fnat(561);
        let r1 = check_order(&n, 1);
        assert_eq!(r1.verdict, Verdict::RigidCarmichaelOfOrder);
        assert!(r1.is_carmichael());
        assert!(r1.witnesses.iter().all(|w| w.exponent == Some(0)));
        assert_eq!(r1.witnesses.len(), 3);

        let r2 = check_order(&n, 2);
        assert_eq!(r2.verdict, Verdict::NotCarmichael);
        assert!(!r2.is_carmichael());
        let w = r2.witness(&Nat::from(11u32), 2).unwrap();
        assert_eq!(w.exponent, None);
        // the report is complete: all 6 pairs evaluated despite the refutation
        assert_eq!(r2.witnesses.len(), 6);
    }

    #[test]
    fn four_is_not_squarefree() {
        let r = check_order(&fnat(4), 1);
        assert!(r.composite);
        assert!(!r.squarefree);
        assert_eq!(r.verdict, Verdict::NotCarmichael);
    }

    #[test]
    fn primes_and_one_are_not_composite() {
        assert_eq!(check_order(&fnat(13), 2).verdict, Verdict::NotComposite);
        assert_eq!(check_order(&fnat(1), 1).verdict, Verdict::NotComposite);
    }

    #[test]
    fn max_order_cases() {
        assert_eq!(max_order(&fnat(561), 4), 1);
        // 15 = 3*5: 15 mod 4 = 3 is not a power of 5 mod 4 = {1}
        assert_eq!(max_order(&fnat(15), 4), 0);
        assert_eq!(max_order(&fnat(13), 4), 0); // prime
    }

    #[test]
    fn classic_order1_list_below_3000() {
        let mut found = Vec::new();
        for n in 2u64..3000 {
            let f = fnat(n);
            if check_order(&f, 1).is_carmichael() {
                found.push(n);
            }
        }
        assert_eq!(found, vec![561, 1105, 1729, 2465, 2821]);
    }

    #[test]
    fn order1_carmichaels_are_all_rigid() {
        // order 1 admits only i = 0, so Carmichael == rigid there
        for n in [561u64, 1105, 1729, 2465, 2821, 6601, 8911] {
            assert!(is_rigid(&fnat(n), 1));
        }
    }

    #[test]
    fn prime_factors_exceed_order() {
        // consequence of the binomial lemma: p | n implies p > m
        for n in [561u64, 1105, 1729, 2465, 2821, 6601, 8911, 41041] {
            let f = fnat(n);
            let m = max_order(&f, 4).max(1);
            for (p, _) in f.factors() {
                assert!(*p > Nat::from(m));
            }
        }
    }

    #[test]
    fn report_serializes_with_nullable_exponents() {
        let r = check_order(&fnat(561), 2);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"n\":\"561\""));
        assert!(json.contains("\"factors\":\"3*11*17\""));
        assert!(json.contains("\"i\":null"));
        assert!(json.contains("\"NotCarmichael\""));
        let back: KorseltReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn verdict_invariants_hold_on_a_sweep() {
        for n in 2u64..2000 {
            let f = fnat(n);
            for m in 1..=3 {
                let r = check_order(&f, m);
                let all_witnessed = r.witnesses.iter().all(|w| w.exponent.is_some());
                let all_zero = r.witnesses.iter().all(|w| w.exponent == Some(0));
                match r.verdict {
                    Verdict::CarmichaelOfOrder => {
                        assert!(r.composite && r.squarefree && all_witnessed && !all_zero)
                    }
                    Verdict::RigidCarmichaelOfOrder => {
                        assert!(r.composite && r.squarefree && all_zero)
                    }
                    Verdict::NotCarmichael => {
                        assert!(r.composite && (!r.squarefree || !all_witnessed))
                    }
                    Verdict::NotComposite => assert!(!r.composite),
                }
            }
        }
    }
}
