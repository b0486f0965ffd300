use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::kernel::CoefficientVector;

/// Latin hypercube sample of `count` points in `[-δ, δ]^dim`.
///
/// Each axis is cut into `count` equal strata and every stratum receives
/// exactly one point; the stratum order per axis is a seeded permutation and
/// the position inside the stratum is uniform.
pub fn lhs_sample(count: usize, dim: usize, delta: f64, seed: u64) -> Vec<CoefficientVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = vec![vec![0.0; dim]; count];
    let width = 2.0 * delta / count as f64;
    let mut strata: Vec<usize> = (0..count).collect();
    for axis in 0..dim {
        strata.shuffle(&mut rng);
        for (sample, &s) in coords.iter_mut().zip(&strata) {
            let lo = -delta + width * s as f64;
            let hi = if s + 1 == count {
                delta
            } else {
                -delta + width * (s + 1) as f64
            };
            let u: f64 = rng.random();
            let v = lo + (hi - lo) * u;
            sample[axis] = if v < hi { v } else { lo };
        }
    }
    coords
        .into_iter()
        .map(|c| CoefficientVector::from_slice(&c))
        .collect()
}
