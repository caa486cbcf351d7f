#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vco_core::Instance;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Delays and verification delays uniform in [1, 100] ms, failure
/// probabilities uniform in [0, 0.3], f_min = 1.
pub fn random_instance(rng: &mut ChaCha8Rng, n: usize) -> Instance {
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                d[i * n + j] = rng.gen_range(1.0..100.0);
            }
        }
    }
    let dv = (0..n).map(|_| rng.gen_range(1.0..100.0)).collect();
    let f = (0..n).map(|_| rng.gen_range(0.0..0.3)).collect();
    Instance::new(n, 1, d, dv, None, f).unwrap()
}

/// Two regions of 20 nodes: 1-5 ms inside a region, 20-50 ms across.
/// The verification committee sits in region 0. Every fifth node fails
/// with probability 0.3, the rest with 0.01.
pub fn two_tier_instance(seed: u64) -> Instance {
    let n = 40;
    let mut rng = rng(seed);
    let region = |i: usize| i / 20;
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                d[i * n + j] = if region(i) == region(j) {
                    rng.gen_range(1.0..5.0)
                } else {
                    rng.gen_range(20.0..50.0)
                };
            }
        }
    }
    let dv = (0..n)
        .map(|i| if region(i) == 0 { rng.gen_range(1.0..5.0) } else { rng.gen_range(20.0..50.0) })
        .collect();
    let f = (0..n).map(|i| if i % 5 == 0 { 0.3 } else { 0.01 }).collect();
    Instance::new(n, 1, d, dv, None, f).unwrap()
}
