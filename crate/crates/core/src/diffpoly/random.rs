//! Seeded random differential polynomials for the property suites.

use rand::Rng;

use super::{DiffPoly, Jet, Monomial};
use crate::rational::frac;

#[derive(Clone, Copy, Debug)]
pub struct RandomBounds {
    pub max_degree: u32,
    pub max_order: usize,
    pub max_genus: u32,
    pub max_terms: usize,
}

impl Default for RandomBounds {
    fn default() -> Self {
        RandomBounds {
            max_degree: 4,
            max_order: 4,
            max_genus: 2,
            max_terms: 5,
        }
    }
}

fn random_coeff<R: Rng>(rng: &mut R) -> crate::Rational {
    let num = rng.gen_range(1..=5) * if rng.gen_bool(0.5) { 1 } else { -1 };
    frac(num, rng.gen_range(1..=4))
}

fn random_jet<R: Rng>(rng: &mut R, degree: u32, max_order: usize) -> Jet {
    let mut exps = vec![0u32; max_order + 1];
    for _ in 0..degree {
        exps[rng.gen_range(0..=max_order)] += 1;
    }
    Jet::from_exponents(exps)
}

/// A random polynomial (possibly zero) within the bounds.
pub fn random_poly<R: Rng>(rng: &mut R, bounds: &RandomBounds) -> DiffPoly {
    let n = rng.gen_range(1..=bounds.max_terms);
    DiffPoly::from_terms((0..n).map(|_| {
        let degree = rng.gen_range(0..=bounds.max_degree);
        let jet = random_jet(rng, degree, bounds.max_order);
        (
            Monomial::new(rng.gen_range(0..=bounds.max_genus), jet),
            random_coeff(rng),
        )
    }))
}

/// A random polynomial homogeneous of jet degree `degree` (genus arbitrary).
pub fn random_homogeneous<R: Rng>(rng: &mut R, degree: u32, bounds: &RandomBounds) -> DiffPoly {
    let n = rng.gen_range(1..=bounds.max_terms);
    DiffPoly::from_terms((0..n).map(|_| {
        let jet = random_jet(rng, degree, bounds.max_order);
        (
            Monomial::new(rng.gen_range(0..=bounds.max_genus), jet),
            random_coeff(rng),
        )
    }))
}
