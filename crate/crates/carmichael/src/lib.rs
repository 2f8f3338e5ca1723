//! Verification and discovery of higher-order Carmichael numbers.
//!
//! A composite integer `n` is a *Carmichael number of order m* when raising
//! to the n-th power is an endomorphism of every `Z/nZ`-algebra that can be
//! generated as a module by `m` elements. This crate decides that property
//! through a Korselt-style divisibility criterion ([`korselt`]), searches
//! for new examples with a meet-in-the-middle subset-product engine over
//! pools of admissible primes ([`pool`], [`mitm`], [`nonrigid`]), and
//! cross-checks verdicts by direct endomorphism probing in finite fields
//! and polynomial quotient rings ([`oracle`]).
//!
//! The layering is strict: [`arith`] knows nothing of Carmichael numbers;
//! [`korselt`] is the decision procedure; the search modules only ever emit
//! numbers that re-verify through [`korselt`]; and [`oracle`] provides an
//! independent experimental check on all of it.

pub mod arith;
pub mod fixtures;
pub mod korselt;
pub mod mitm;
pub mod nonrigid;
pub mod oracle;
pub mod pool;
pub mod store;
