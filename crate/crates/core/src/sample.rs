//! Seeded sampling of rationals with a prescribed p-adic norm.

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::prime::OddPrime;
use crate::rational::PadicRational;

/// `p^(-a) * u` with `u` uniform among integers in `[1, p^M)` prime to `p`.
///
/// The result has norm exponent exactly `a`. `digit_count` is clamped to at
/// least one.
pub fn sample_with_norm<R: Rng + ?Sized>(a: i64, digit_count: u32, p: OddPrime, rng: &mut R) -> PadicRational {
    let bound = p.pow(u64::from(digit_count.max(1)));
    let pb = p.to_biguint();
    let u = loop {
        let u: BigUint = rng.gen_biguint_below(&bound);
        if !u.is_zero() && !u.is_multiple_of(&pb) {
            break u;
        }
    };
    PadicRational::from_scaled(BigInt::from(u), -a, p)
}

/// A deterministic source of samples; each worker owns its own instance.
#[derive(Clone, Debug)]
pub struct Sampler {
    rng: ChaCha8Rng,
    prime: OddPrime,
    digit_count: u32,
}

impl Sampler {
    pub fn new(prime: OddPrime, seed: u64, digit_count: u32) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed), prime, digit_count: digit_count.max(1) }
    }

    pub fn prime(&self) -> OddPrime {
        self.prime
    }

    pub fn with_norm(&mut self, a: i64) -> PadicRational {
        sample_with_norm(a, self.digit_count, self.prime, &mut self.rng)
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::NormExp;

    #[test]
    fn norm_never_drifts() {
        let p = OddPrime::new(3).unwrap();
        let mut s = Sampler::new(p, 7, 6);
        for i in 0..10_000 {
            let a = (i % 41) - 20;
            assert_eq!(s.with_norm(a).norm_exponent(), NormExp::Finite(a));
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let p = OddPrime::new(5).unwrap();
        let mut s1 = Sampler::new(p, 42, 8);
        let mut s2 = Sampler::new(p, 42, 8);
        let mut s3 = Sampler::new(p, 43, 8);
        let v1: alloc::vec::Vec<_> = (0..20).map(|_| s1.with_norm(-2)).collect();
        let v2: alloc::vec::Vec<_> = (0..20).map(|_| s2.with_norm(-2)).collect();
        let v3: alloc::vec::Vec<_> = (0..20).map(|_| s3.with_norm(-2)).collect();
        assert_eq!(v1, v2);
        assert_ne!(v1, v3);
        assert!(v1.iter().all(|x| x.norm_exponent() == NormExp::Finite(-2)));
    }

    #[test]
    fn units_cover_every_residue() {
        let p = OddPrime::new(7).unwrap();
        let mut s = Sampler::new(p, 1, 1);
        let mut seen = [false; 7];
        for _ in 0..500 {
            seen[s.with_norm(0).unit_residue().unwrap() as usize] = true;
        }
        assert!(!seen[0] && seen[1..].iter().all(|&b| b));
    }
}
