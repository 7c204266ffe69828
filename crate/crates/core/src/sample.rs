//! Seeded sampling of rational matrices and vectors.
//!
//! The generator is SplitMix64 (Steele, Lea and Flood): state advances by
//! `0x9E3779B97F4A7C15`, output mixes with multipliers `0xBF58476D1CE4E5B9`,
//! `0x94D049BB133111EB` and shifts 30/27/31. Integers in `[−B, B]` are drawn
//! with `rand`'s uniform range sampling on top of that stream.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::ratlin::{determinant, rat, RatMatrix, RatVector, Rational};

pub struct Sampler {
    rng: SplitMix64,
    bound: i64,
}

impl Sampler {
    pub fn new(seed: u64, bound: i64) -> Self {
        assert!(bound >= 1, "entry bound must be at least 1");
        Sampler {
            rng: SplitMix64::seed_from_u64(seed),
            bound,
        }
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn int(&mut self) -> i64 {
        self.rng.random_range(-self.bound..=self.bound)
    }

    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.random_range(lo..=hi)
    }

    pub fn index(&mut self, len: usize) -> usize {
        self.rng.random_range(0..len)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.random_bool(0.5)
    }

    pub fn rational(&mut self) -> Rational {
        rat(self.int())
    }

    pub fn matrix(&mut self, n: usize) -> RatMatrix {
        RatMatrix::from_fn(n, |_, _| rat(self.int()))
    }

    pub fn vector(&mut self, n: usize) -> RatVector {
        RatVector::new((0..n).map(|_| rat(self.int())).collect()).expect("n >= 1")
    }

    pub fn nonzero_vector(&mut self, n: usize) -> RatVector {
        loop {
            let v = self.vector(n);
            if !v.is_zero() {
                return v;
            }
        }
    }

    pub fn invertible(&mut self, n: usize) -> RatMatrix {
        loop {
            let g = self.matrix(n);
            if !determinant(&g).is_zero() {
                return g;
            }
        }
    }

    /// Invertible `g` with `g v0 = v0`: a random matrix corrected on the
    /// pivot column of `v0`.
    pub fn invertible_fixing(&mut self, v0: &RatVector) -> RatMatrix {
        let n = v0.dim();
        let i0 = v0.pivot().expect("v0 nonzero");
        loop {
            let a = self.matrix(n);
            let defect = &a.mul_vec(v0) - v0;
            let corr = RatMatrix::outer(&defect, &RatVector::unit(n, i0)).scale(&v0.get(i0).recip());
            let g = &a - &corr;
            debug_assert_eq!(&g.mul_vec(v0), v0);
            if !determinant(&g).is_zero() {
                return g;
            }
        }
    }

    /// Strictly upper triangular random matrix, conjugated by a random
    /// invertible matrix: a random nilpotent.
    pub fn nilpotent(&mut self, n: usize) -> RatMatrix {
        let u = RatMatrix::from_fn(n, |i, j| if j > i { rat(self.int()) } else { rat(0) });
        self.conjugate(&u)
    }

    /// `g X g⁻¹` for a random invertible `g`.
    pub fn conjugate(&mut self, x: &RatMatrix) -> RatMatrix {
        let g = self.invertible(x.n());
        let gi = crate::ratlin::inverse(&g).expect("invertible");
        &(&g * x) * &gi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_stream() {
        let mut a = Sampler::new(42, 10);
        let mut b = Sampler::new(42, 10);
        let xs: Vec<i64> = (0..32).map(|_| a.int()).collect();
        let ys: Vec<i64> = (0..32).map(|_| b.int()).collect();
        assert_eq!(xs, ys);
        assert!(xs.iter().all(|x| (-10..=10).contains(x)));
        let mut c = Sampler::new(43, 10);
        let zs: Vec<i64> = (0..32).map(|_| c.int()).collect();
        assert_ne!(xs, zs);
    }

    #[test]
    fn splitmix_reference_values() {
        use rand::RngCore;
        // Reference outputs of SplitMix64 seeded with 0.
        let mut r = SplitMix64::seed_from_u64(0);
        assert_eq!(r.next_u64(), 0xE220A8397B1DCDAF);
        assert_eq!(r.next_u64(), 0x6E789E6AA1B965F4);
    }

    #[test]
    fn p_elements_fix_v0() {
        let mut s = Sampler::new(7, 5);
        let v0 = RatVector::from_ints(&[0, 2, -1]);
        for _ in 0..10 {
            let g = s.invertible_fixing(&v0);
            assert_eq!(g.mul_vec(&v0), v0);
        }
    }
}
