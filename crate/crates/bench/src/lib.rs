//! Seeded fixtures shared by the benches.

use std::sync::Arc;

use parchain::random::{random_chain_functor, random_cofibrant, random_dim1_poset, random_mat};
use parchain::{ChainFunctor, Mat};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn square(p: u32, n: usize, seed: u64) -> Mat {
    random_mat(&mut ChaCha8Rng::seed_from_u64(seed), p, n, n)
}

/// Random cofibrant chain functors on dimension-one posets.
pub fn cofibrant(p: u32, count: usize, seed: u64) -> Vec<ChainFunctor> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let q = Arc::new(random_dim1_poset(&mut rng, 8));
            random_cofibrant(&mut rng, q, p, 3, 4).0
        })
        .collect()
}

/// Random chain functors, not necessarily cofibrant.
pub fn general(p: u32, count: usize, seed: u64) -> Vec<ChainFunctor> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let q = Arc::new(random_dim1_poset(&mut rng, 6));
            random_chain_functor(&mut rng, q, p, 2)
        })
        .collect()
}
