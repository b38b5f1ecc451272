#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use renyi_bounds::Pmf;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Random pmf on `n` atoms; cubing spreads the masses out.
pub fn random_pmf(rng: &mut StdRng, n: usize) -> Pmf {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0f64).powi(3)).collect();
    Pmf::from_weights(&w).unwrap()
}

pub fn random_sorted_pmf(rng: &mut StdRng, n: usize) -> Pmf {
    random_pmf(rng, n).sorted()
}

/// Random member of the ratio class: weights uniform on `[1, rho]`.
pub fn random_in_class(rng: &mut StdRng, n: usize, rho: f64) -> Pmf {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..=rho)).collect();
    Pmf::from_weights(&w).unwrap()
}

/// Every map `{0..n} -> {0..m}` that hits each output.
pub fn surjections(n: usize, m: usize) -> Vec<Vec<usize>> {
    let total = m.pow(n as u32);
    (0..total)
        .map(|mut i| {
            (0..n)
                .map(|_| {
                    let d = i % m;
                    i /= m;
                    d
                })
                .collect::<Vec<_>>()
        })
        .filter(|f: &Vec<usize>| (0..m).all(|j| f.contains(&j)))
        .collect()
}
