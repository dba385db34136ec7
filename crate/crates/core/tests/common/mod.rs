//! Shared generators for integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sparsiqc::lmi::{SdpFeasibilityProblem, VariableBounds};
use sparsiqc::sparse::SymSparse;

/// Random sparse symmetric matrix with entries in `[-1, 1]` and a full
/// diagonal drawn from `[-1, 1]`.
pub fn random_sym(n: usize, density: f64, rng: &mut ChaCha8Rng) -> SymSparse {
    let mut t = Vec::new();
    for i in 0..n {
        t.push((i, i, rng.gen_range(-1.0..1.0)));
        for j in 0..i {
            if rng.gen::<f64>() < density {
                t.push((i, j, rng.gen_range(-1.0..1.0)));
            }
        }
    }
    SymSparse::from_triplets(n, t).unwrap()
}

/// Random margin-form problem of order `n` with `m` box-bounded variables.
/// Half the variables live in `[0, 1]`, the rest in `[-1, 1]`.
pub fn random_problem(n: usize, m: usize, density: f64, seed: u64) -> SdpFeasibilityProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = random_sym(n, density, &mut rng);
    let q: Vec<SymSparse> = (0..m).map(|_| random_sym(n, density, &mut rng)).collect();
    let bounds = (0..m)
        .map(|i| {
            Some(if i % 2 == 0 {
                VariableBounds::UNIT
            } else {
                VariableBounds {
                    lower: -1.0,
                    upper: 1.0,
                }
            })
        })
        .collect();
    SdpFeasibilityProblem::new(w, q)
        .unwrap()
        .with_bounds(bounds)
        .unwrap()
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}
