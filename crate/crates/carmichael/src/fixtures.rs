//! Reference constants: the published moduli, prime pools' parent numbers,
//! and every displayed example number with its complete factorization.
//!
//! Each fixture stores both the prime list and the expanded decimal value;
//! a self-check test asserts the two agree, so downstream tests can trust
//! either form.

use crate::arith::{FactoredNat, Nat};
use std::str::FromStr;

/// The first search modulus: 2^7 * 3^3 * 5^2 * 7 * 11 * 13 * 17 * 19 * 29.
pub const L1_FACTORIZATION: &str = "2^7*3^3*5^2*7*11*13*17*19*29";
pub const L1_VALUE: &str = "810118108800";

/// The second search modulus: L1 * 31.
pub const L2_FACTORIZATION: &str = "2^7*3^3*5^2*7*11*13*17*19*29*31";
pub const L2_VALUE: &str = "25113661372800";

pub fn l1() -> FactoredNat {
    L1_FACTORIZATION.parse().expect("fixture parses")
}

pub fn l2() -> FactoredNat {
    L2_FACTORIZATION.parse().expect("fixture parses")
}

/// A named example number with its full squarefree factorization.
#[derive(Debug, Clone, Copy)]
pub struct Fixture {
    pub name: &'static str,
    pub primes: &'static [u64],
    /// Decimal expansion of the product of `primes`.
    pub value: &'static str,
}

impl Fixture {
    pub fn factored(&self) -> FactoredNat {
        FactoredNat::from_primes(self.primes).expect("fixture primes are sorted primes")
    }

    pub fn value_nat(&self) -> Nat {
        Nat::from_str(self.value).expect("fixture value is decimal")
    }
}

/// Pinch's rigid Carmichael number of order 2.
pub const PINCH: Fixture = Fixture {
    name: "pinch-order2",
    primes: &[17, 31, 41, 43, 89, 97, 167, 331],
    value: "443372888629441",
};

/// The two elements of the L1 census with the fewest prime divisors
/// (15 each).
pub const C2L1_MINIMAL: [Fixture; 2] = [
    Fixture {
        name: "c2l1-minimal-a",
        primes: &[
            31, 37, 101, 103, 109, 199, 419, 449, 521, 571, 911, 2089, 2551, 5851, 11969,
        ],
        value: "4924827541614265513589667769108860614401",
    },
    Fixture {
        name: "c2l1-minimal-b",
        primes: &[
            41, 67, 79, 181, 199, 233, 239, 307, 449, 521, 1217, 1871, 4159, 5851, 9281,
        ],
        value: "16075771355347638016980686030521098019201",
    },
];

/// The four order-2 Carmichael numbers arising from single sweep primes in
/// the L2 run (20/20/18 sorted split).
pub const FOURFOLD_L2: [Fixture; 4] = [
    Fixture {
        name: "c2l2-sweep-2551",
        primes: &[
            23, 43, 59, 61, 79, 89, 113, 131, 151, 191, 307, 311, 373, 419, 433, 463, 701, 1217,
            2551,
        ],
        value: "69560845369554955388165088342528866719334401",
    },
    Fixture {
        name: "c2l2-sweep-4523",
        primes: &[
            23, 53, 59, 79, 89, 101, 109, 113, 131, 181, 199, 233, 307, 349, 433, 701, 911, 1217,
            4523,
        ],
        value: "112788094121852627374401548507449628984140801",
    },
    Fixture {
        name: "c2l2-sweep-5279",
        primes: &[
            61, 67, 71, 89, 101, 103, 113, 151, 181, 191, 199, 233, 239, 271, 307, 419, 463, 521,
            571, 701, 911, 5279,
        ],
        value: "28428267389677772376959914325492376114874620587020801",
    },
    Fixture {
        name: "c2l2-sweep-15313",
        primes: &[
            41, 43, 53, 61, 89, 103, 113, 151, 191, 311, 349, 373, 419, 433, 463, 521, 571, 701,
            929, 15313,
        ],
        value: "1717985169415387463787686933915303091226840473601",
    },
];

/// The prime adjoined to the L2 pool to produce non-rigid examples.
pub const NONRIGID_P0: u64 = 1153;

/// lcm(L2, p0^2 - 1) — the working modulus of the non-rigid search.
pub const NONRIGID_L: u64 = 28_981_165_224_211_200;

/// The target residue for n0 = n / p0: the unique value mod [`NONRIGID_L`]
/// with t ≡ 1 (mod p0^2 - 1) and p0 * t ≡ 1 (mod L2).
pub const NONRIGID_T: u64 = 24_755_731_800_086_017;

/// Smallest of the 53 non-rigid order-2 Carmichael numbers found with
/// (L2, 1153); 23 prime factors including p0.
pub const NONRIGID_SMALLEST: Fixture = Fixture {
    name: "nonrigid-smallest",
    primes: &[
        23, 67, 71, 89, 109, 113, 191, 199, 233, 239, 271, 307, 373, 419, 521, 911, 929, 1153,
        1217, 1429, 2089, 2729, 23561,
    ],
    value: "392000251605356793349050844538065236557716721692385776886401",
};

/// Largest of the 53; 42 prime factors including p0.
pub const NONRIGID_LARGEST: Fixture = Fixture {
    name: "nonrigid-largest",
    primes: &[
        23, 37, 43, 53, 59, 61, 67, 71, 89, 103, 109, 113, 131, 181, 191, 199, 239, 271, 311, 373,
        379, 419, 433, 463, 521, 683, 701, 911, 929, 991, 1153, 1429, 2089, 2551, 3191, 4159,
        5279, 11969, 15809, 23561, 23869, 244529,
    ],
    value: "2706440581932960270059556320865135299543027488341564061948937275059222956610372230689798686533299112388959963299201",
};

/// All composite n < 10^5 with a^n ≡ a (mod n) for every a (order 1).
pub const CLASSIC_ORDER1: [u64; 16] = [
    561, 1105, 1729, 2465, 2821, 6601, 8911, 10585, 15841, 29341, 41041, 46657, 52633, 62745,
    63973, 75361,
];

/// Every fixture that is an order-2 Carmichael number, rigid or not.
pub fn order2_fixtures() -> Vec<&'static Fixture> {
    let mut all: Vec<&'static Fixture> = vec![&PINCH];
    all.extend(C2L1_MINIMAL.iter());
    all.extend(FOURFOLD_L2.iter());
    all.push(&NONRIGID_SMALLEST);
    all.push(&NONRIGID_LARGEST);
    all
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::korselt::{check_order, frobenius_exponent, max_order, Verdict};

    #[test]
    fn every_fixture_value_is_the_product_of_its_primes() {
        for f in order2_fixtures() {
            let factored = f.factored(); // validates primality and ordering
            assert_eq!(factored.value(), &f.value_nat(), "{}", f.name);
            assert!(factored.is_squarefree());
        }
        assert_eq!(l1().value(), &Nat::from_str(L1_VALUE).unwrap());
        assert_eq!(l2().value(), &Nat::from_str(L2_VALUE).unwrap());
    }

    #[test]
    fn pinch_number_is_rigid_of_order_exactly_2() {
        let n = PINCH.factored();
        assert_eq!(check_order(&n, 2).verdict, Verdict::RigidCarmichaelOfOrder);
        assert_eq!(max_order(&n, 4), 2);
    }

    #[test]
    fn census_elements_are_rigid_order_2() {
        for f in C2L1_MINIMAL.iter().chain(FOURFOLD_L2.iter()) {
            let report = check_order(&f.factored(), 2);
            assert_eq!(report.verdict, Verdict::RigidCarmichaelOfOrder, "{}", f.name);
        }
    }

    #[test]
    fn census_elements_reduce_to_1_mod_their_modulus() {
        let l1 = l1().value().clone();
        let l2 = l2().value().clone();
        for f in &C2L1_MINIMAL {
            assert!((f.value_nat() % &l1).eq(&Nat::from(1u32)), "{}", f.name);
        }
        for f in &FOURFOLD_L2 {
            assert!((f.value_nat() % &l2).eq(&Nat::from(1u32)), "{}", f.name);
        }
    }

    #[test]
    fn nonrigid_fixtures_are_order_2_but_not_rigid() {
        for f in [&NONRIGID_SMALLEST, &NONRIGID_LARGEST] {
            let n = f.factored();
            let report = check_order(&n, 2);
            assert_eq!(report.verdict, Verdict::CarmichaelOfOrder, "{}", f.name);
            // the Frobenius exponent at (p0, 2) is exactly 1: n ≡ p0, not 1
            assert_eq!(
                frobenius_exponent(n.value(), &Nat::from(NONRIGID_P0), 2),
                Some(1),
                "{}",
                f.name
            );
            // every other prime sees the identity
            for (p, _) in n.factors() {
                if *p != Nat::from(NONRIGID_P0) {
                    assert_eq!(frobenius_exponent(n.value(), p, 2), Some(0));
                }
            }
        }
    }

    #[test]
    fn nonrigid_fixtures_split_as_p0_times_target_residue() {
        for f in [&NONRIGID_SMALLEST, &NONRIGID_LARGEST] {
            let n = f.value_nat();
            let n0 = &n / Nat::from(NONRIGID_P0);
            assert_eq!(&n0 * Nat::from(NONRIGID_P0), n);
            assert_eq!(n0 % Nat::from(NONRIGID_L), Nat::from(NONRIGID_T));
        }
    }

    #[test]
    fn classic_list_members_verify_at_order_1() {
        for n in CLASSIC_ORDER1 {
            let f = crate::arith::factor(&Nat::from(n)).unwrap();
            assert!(check_order(&f, 1).is_carmichael(), "{n}");
        }
    }
}
