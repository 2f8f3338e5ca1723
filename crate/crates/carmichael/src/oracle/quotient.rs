//! (Z/nZ)[x]/(f) for monic f — rank-deg(f) test algebras over Z/nZ.
//!
//! Unlike the field probes these need no factorization of n at all, which
//! makes them the fully independent check: degree-2 moduli exercise the
//! order-2 property directly. One caveat worth knowing when reading
//! results: different moduli see different failures. x^2 - c splits into
//! field extensions at primes where c is a nonresidue and catches order-2
//! violations there, while the nilpotent choice x^2 collapses the power
//! map onto the base ring and passes for every classic (order-1) number.

use super::{OracleError, OracleVerdict, ProbeOutcome};
use crate::arith::Nat;
use num_bigint::RandBigInt;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientRing {
    n: Nat,
    /// Little-endian, length degree + 1, leading coefficient exactly 1 so
    /// reduction never needs an inverse.
    modulus: Vec<Nat>,
}

impl QuotientRing {
    pub fn new(n: Nat, modulus: Vec<Nat>) -> Result<Self, OracleError> {
        if n < Nat::from(2u32) {
            return Err(OracleError::RingTooSmall(n));
        }
        if modulus.len() < 2 || !modulus.last().expect("nonempty").is_one() {
            return Err(OracleError::BadQuotientModulus);
        }
        let modulus = modulus.into_iter().map(|c| c % &n).collect::<Vec<_>>();
        if !modulus.last().expect("nonempty").is_one() {
            // n = 1 would have collapsed the leading 1; already excluded
            return Err(OracleError::BadQuotientModulus);
        }
        Ok(QuotientRing { n, modulus })
    }

    /// (Z/n)[x]/(x^2): the dual-numbers line.
    pub fn nilpotent_line(n: &Nat) -> Result<Self, OracleError> {
        Self::new(n.clone(), vec![Nat::zero(), Nat::zero(), Nat::one()])
    }

    /// (Z/n)[x]/(x^2 + c1 x + c0).
    pub fn quadratic(n: &Nat, c1: &Nat, c0: &Nat) -> Result<Self, OracleError> {
        Self::new(n.clone(), vec![c0.clone(), c1.clone(), Nat::one()])
    }

    pub fn ring_modulus(&self) -> &Nat {
        &self.n
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn subject(&self) -> String {
        format!("(Z/{})[x]/({})", self.n, poly_string(&self.modulus))
    }

    pub fn zero(&self) -> Vec<Nat> {
        vec![Nat::zero(); self.degree()]
    }

    pub fn one(&self) -> Vec<Nat> {
        let mut e = self.zero();
        e[0] = Nat::one();
        e
    }

    pub fn add(&self, a: &[Nat], b: &[Nat]) -> Vec<Nat> {
        a.iter().zip(b).map(|(x, y)| (x + y) % &self.n).collect()
    }

    pub fn mul(&self, a: &[Nat], b: &[Nat]) -> Vec<Nat> {
        let mut raw = vec![Nat::zero(); a.len() + b.len() - 1];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                raw[i + j] = (&raw[i + j] + ai * bj) % &self.n;
            }
        }
        self.reduce(raw)
    }

    /// Divides by the monic modulus, then pads back to rank width.
    fn reduce(&self, mut rem: Vec<Nat>) -> Vec<Nat> {
        let d = self.degree();
        while rem.len() > d {
            let c = rem.pop().expect("len > d >= 1");
            if !c.is_zero() {
                let top = rem.len();
                for (j, fj) in self.modulus.iter().enumerate().take(d) {
                    let idx = top - d + j;
                    let sub = (&c * fj) % &self.n;
                    // additive complement keeps everything nonnegative
                    rem[idx] = (&rem[idx] + (&self.n - sub)) % &self.n;
                }
            }
        }
        rem.resize(d, Nat::zero());
        rem
    }

    /// a^e with the exponent used whole — see the module note on
    /// independence.
    pub fn pow(&self, a: &[Nat], e: &Nat) -> Vec<Nat> {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.mul(&acc, &acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    pub fn random_element(&self, rng: &mut ChaCha8Rng) -> Vec<Nat> {
        (0..self.degree())
            .map(|_| rng.gen_biguint_below(&self.n))
            .collect()
    }
}

fn poly_string(coeffs: &[Nat]) -> String {
    let mut terms = Vec::new();
    for (k, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let term = match k {
            0 => c.to_string(),
            _ => {
                let x = if k == 1 { "x".to_string() } else { format!("x^{k}") };
                if c.is_one() {
                    x
                } else {
                    format!("{c}{x}")
                }
            }
        };
        terms.push(term);
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}

/// Random additivity trials of x ↦ x^n on the ring, n being the ring's
/// own modulus.
pub fn endo_probe_quotient(ring: &QuotientRing, trials: u32, seed: u64) -> OracleVerdict {
    let n = ring.ring_modulus().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut outcome = ProbeOutcome::ConsistentWithEndomorphism;
    let mut failures = 0;
    for _ in 0..trials {
        let x = ring.random_element(&mut rng);
        let y = ring.random_element(&mut rng);
        let lhs = ring.pow(&ring.add(&x, &y), &n);
        let rhs = ring.add(&ring.pow(&x, &n), &ring.pow(&y, &n));
        if lhs != rhs {
            failures = 1;
            outcome = ProbeOutcome::RefutedWithWitness {
                x: x.iter().map(|c| c.to_string()).collect(),
                y: y.iter().map(|c| c.to_string()).collect(),
            };
            break;
        }
    }
    OracleVerdict {
        subject: ring.subject(),
        n,
        trials,
        failures,
        seed,
        frobenius_orbit_checked: false,
        frobenius_orbit_consistent: None,
        outcome,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn nat(s: &str) -> Nat {
        s.parse().unwrap()
    }

    #[test]
    fn construction_validates_inputs() {
        assert!(matches!(
            QuotientRing::new(Nat::one(), vec![Nat::zero(), Nat::one()]),
            Err(OracleError::RingTooSmall(_))
        ));
        assert!(matches!(
            QuotientRing::new(Nat::from(10u32), vec![Nat::from(3u32)]),
            Err(OracleError::BadQuotientModulus)
        ));
        assert!(matches!(
            QuotientRing::new(Nat::from(10u32), vec![Nat::zero(), Nat::from(2u32)]),
            Err(OracleError::BadQuotientModulus)
        ));
    }

    #[test]
    fn subject_strings_read_naturally() {
        let n = Nat::from(561u32);
        assert_eq!(
            QuotientRing::nilpotent_line(&n).unwrap().subject(),
            "(Z/561)[x]/(x^2)"
        );
        assert_eq!(
            QuotientRing::quadratic(&n, &Nat::zero(), &Nat::from(3u32))
                .unwrap()
                .subject(),
            "(Z/561)[x]/(x^2 + 3)"
        );
        assert_eq!(
            QuotientRing::quadratic(&n, &Nat::from(2u32), &Nat::from(7u32))
                .unwrap()
                .subject(),
            "(Z/561)[x]/(x^2 + 2x + 7)"
        );
    }

    #[test]
    fn ring_arithmetic_basics() {
        // (Z/10)[x]/(x^2 + 1): (3 + 4x)(2 + x) = 6 + 11x + 4x^2 = 2 + x
        let ring = QuotientRing::quadratic(&Nat::from(10u32), &Nat::zero(), &Nat::one()).unwrap();
        let prod = ring.mul(
            &[Nat::from(3u32), Nat::from(4u32)],
            &[Nat::from(2u32), Nat::one()],
        );
        assert_eq!(prod, vec![Nat::from(2u32), Nat::from(1u32)]);
    }

    #[test]
    fn nilpotent_line_cannot_see_order_one_failures() {
        // On (Z/561)[x]/(x^2) the power map collapses to the base ring,
        // where 561's universal Fermat property makes it additive — a
        // genuine pass even though 561 has no order-2 property.
        let ring = QuotientRing::nilpotent_line(&Nat::from(561u32)).unwrap();
        let verdict = endo_probe_quotient(&ring, 64, 3);
        assert!(!verdict.is_refutation());
    }

    #[test]
    fn splitting_quadratics_refute_561() {
        let n = Nat::from(561u32);
        // x^2 + 3 is irreducible mod 11 → an F_121 component
        let r1 = QuotientRing::quadratic(&n, &Nat::zero(), &Nat::from(3u32)).unwrap();
        assert!(endo_probe_quotient(&r1, 64, 3).is_refutation());
        // x^2 - 11 ≡ x^2 + 550 is irreducible mod 17 → an F_289 component
        let r2 = QuotientRing::quadratic(&n, &Nat::zero(), &Nat::from(550u32)).unwrap();
        assert!(endo_probe_quotient(&r2, 64, 3).is_refutation());
    }

    #[test]
    fn a_quadratic_refutes_1105() {
        // x^2 + 2 is inert at 13 and 1105 ≢ 13^i (mod 168)
        let n = Nat::from(1105u32);
        let ring = QuotientRing::quadratic(&n, &Nat::zero(), &Nat::from(2u32)).unwrap();
        assert!(endo_probe_quotient(&ring, 64, 5).is_refutation());
    }

    #[test]
    fn order_two_element_passes_many_quadratics() {
        let n = fixtures::PINCH.value_nat();
        let mut rings = vec![
            QuotientRing::nilpotent_line(&n).unwrap(),
            QuotientRing::quadratic(&n, &Nat::zero(), &Nat::from(3u32)).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..3 {
            let c1 = rng.gen_biguint_below(&n);
            let c0 = rng.gen_biguint_below(&n);
            rings.push(QuotientRing::quadratic(&n, &c1, &c0).unwrap());
        }
        for ring in &rings {
            let verdict = endo_probe_quotient(ring, 16, 77);
            assert!(!verdict.is_refutation(), "refuted on {}", ring.subject());
        }
    }

    #[test]
    fn witnesses_replay_outside_the_probe() {
        let n = nat("561");
        let ring = QuotientRing::quadratic(&n, &Nat::zero(), &Nat::from(3u32)).unwrap();
        let verdict = endo_probe_quotient(&ring, 64, 3);
        match &verdict.outcome {
            ProbeOutcome::RefutedWithWitness { x, y } => {
                let decode = |v: &Vec<String>| -> Vec<Nat> {
                    v.iter().map(|s| nat(s)).collect()
                };
                let (x, y) = (decode(x), decode(y));
                let lhs = ring.pow(&ring.add(&x, &y), &n);
                let rhs = ring.add(&ring.pow(&x, &n), &ring.pow(&y, &n));
                assert_ne!(lhs, rhs);
            }
            other => panic!("expected a refutation, got {other:?}"),
        }
        // and the probe is reproducible end to end
        assert_eq!(endo_probe_quotient(&ring, 64, 3), verdict);
    }
}
