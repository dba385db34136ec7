use nalgebra::{Complex, DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sparsiqc::generate::{generate_instance, sample_scale_free, GeneratorConfig};
use sparsiqc::lti::{
    block_diag, hinf_norm_default, lumped_response, Frequency, FrequencyGrid, StateSpaceSystem,
};
use sparsiqc::model::{
    build_interconnection, chain_interconnection, diag_multiplier, AdjacencyMatrix,
    InterconnectedSystem, InterconnectionMatrix, IqcMultiplierSpec,
};

type C64 = Complex<f64>;

fn random_system(states: usize, outputs: usize, inputs: usize, seed: u64) -> StateSpaceSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = |r: usize, c: usize| DMatrix::from_fn(r, c, |_, _| rng.gen_range(-1.0..1.0));
    // Shifting by the Gershgorin radius makes A Hurwitz.
    let mut a: DMatrix<f64> = g(states, states);
    for i in 0..states {
        let radius: f64 = a.row(i).iter().map(|v: &f64| v.abs()).sum();
        a[(i, i)] -= radius + 0.5;
    }
    StateSpaceSystem::new(a, g(states, inputs), g(outputs, states), g(outputs, inputs)).unwrap()
}

fn to_complex(m: &DMatrix<f64>) -> DMatrix<C64> {
    m.map(|v| C64::new(v, 0.0))
}

/// Block-diagonal stack of dense complex blocks.
fn stack(blocks: &[DMatrix<C64>]) -> DMatrix<C64> {
    let r: usize = blocks.iter().map(|b| b.nrows()).sum();
    let c: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut m = DMatrix::zeros(r, c);
    let (mut i, mut j) = (0, 0);
    for b in blocks {
        m.view_mut((i, j), b.shape()).copy_from(b);
        i += b.nrows();
        j += b.ncols();
    }
    m
}

/// `G_pq + G_pw (I - Gamma G_zw)^{-1} Gamma G_zq` from the subsystem
/// responses and the dense `Gamma`.
fn lumped_oracle(sys: &InterconnectedSystem, w: Frequency) -> DMatrix<C64> {
    let subs = sys.subsystems();
    let resp = |f: &dyn Fn(&sparsiqc::model::Subsystem) -> &StateSpaceSystem| {
        stack(
            &subs
                .iter()
                .map(|s| f(s).response(w).unwrap())
                .collect::<Vec<_>>(),
        )
    };
    let pq = resp(&|s| s.g_pq());
    let pw = resp(&|s| s.g_pw());
    let zq = resp(&|s| s.g_zq());
    let zw = resp(&|s| s.g_zw());
    let gamma = to_complex(&sys.interconnection().to_dense());
    let m = gamma.nrows();
    let loop_inv = (DMatrix::identity(m, m) - &gamma * zw)
        .try_inverse()
        .unwrap();
    pq + pw * loop_inv * gamma * zq
}

/// Counts of ones in each (row block, column block) pair.
fn block_counts(g: &InterconnectionMatrix) -> Vec<Vec<usize>> {
    let n = g.blocks();
    let mut counts = vec![vec![0; n]; n];
    for (r, c) in g.entries() {
        counts[g.row_owner(r).0][g.col_owner(c).0] += 1;
    }
    counts
}

#[test]
fn lumped_response_matches_closed_form_on_chain() {
    let inst = generate_instance(&GeneratorConfig::chain(3, 17), 0).unwrap();
    for w in [0.0, 0.3, 2.0, 40.0] {
        let w = Frequency::Finite(w);
        let got = lumped_response(&inst.system, w).unwrap();
        let want = lumped_oracle(&inst.system, w);
        assert!((&got - &want).norm() <= 1e-12 * (1.0 + want.norm()));
    }
}

#[test]
fn lumped_response_matches_closed_form_on_tree() {
    let cfg = GeneratorConfig::scale_free(12, 2.2, 4);
    let inst = generate_instance(&cfg, 1).unwrap();
    for w in [0.0, 1.0, 9.0] {
        let w = Frequency::Finite(w);
        let got = lumped_response(&inst.system, w).unwrap();
        let want = lumped_oracle(&inst.system, w);
        assert!((&got - &want).norm() <= 1e-11 * (1.0 + want.norm()));
    }
}

#[test]
fn lumped_response_is_finite_on_grid() {
    let grid = FrequencyGrid::default_analysis();
    for seed in 0..5 {
        let inst = generate_instance(&GeneratorConfig::chain(6, seed), 0).unwrap();
        assert!(inst.report.condition3);
        for w in grid.iter() {
            let g = lumped_response(&inst.system, w).unwrap();
            assert!(g.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        }
    }
}

#[test]
fn zero_gamma_leaves_g_pq() {
    let inst = generate_instance(&GeneratorConfig::chain(4, 8), 0).unwrap();
    let g = &inst.system;
    let zero = InterconnectionMatrix::zero(
        g.interconnection().row_blocks().to_vec(),
        g.interconnection().col_blocks().to_vec(),
    )
    .unwrap();
    let open = InterconnectedSystem::new(g.subsystems().to_vec(), zero).unwrap();
    for w in [
        Frequency::Finite(0.0),
        Frequency::Finite(1.7),
        Frequency::Infinity,
    ] {
        let pq = stack(
            &open
                .subsystems()
                .iter()
                .map(|s| s.g_pq().response(w).unwrap())
                .collect::<Vec<_>>(),
        );
        assert_eq!(lumped_response(&open, w).unwrap(), pq);
    }
}

#[test]
fn chain_interconnection_matches_path_graph() {
    for n in 2..=20 {
        let chain = chain_interconnection(n).unwrap();
        let built = build_interconnection(&AdjacencyMatrix::path(n));
        assert_eq!(chain.row_blocks(), built.row_blocks());
        assert_eq!(chain.col_blocks(), built.col_blocks());
        assert_eq!(block_counts(&chain), block_counts(&built));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn block_diag_response_is_blockwise(sizes in prop::collection::vec((0usize..4, 1usize..3, 1usize..3), 1..4), seed: u64, w in 0.0f64..50.0) {
        let systems: Vec<_> = sizes.iter().enumerate()
            .map(|(k, &(n, p, m))| random_system(n, p, m, seed.wrapping_add(k as u64)))
            .collect();
        let big = block_diag(&systems).unwrap();
        let w = Frequency::Finite(w);
        let want = stack(&systems.iter().map(|s| s.response(w).unwrap()).collect::<Vec<_>>());
        prop_assert!((big.response(w).unwrap() - want).norm() <= 1e-12);
    }

    #[test]
    fn hinf_norm_scales(n in 1usize..4, seed: u64, alpha in -5.0f64..5.0) {
        prop_assume!(alpha.abs() > 1e-3);
        let g = random_system(n, 2, 2, seed);
        let base = hinf_norm_default(&g).unwrap();
        let scaled = hinf_norm_default(&g.scale_output(alpha)).unwrap();
        prop_assert!((scaled - alpha.abs() * base).abs() <= 1e-9 * alpha.abs() * base);
    }

    #[test]
    fn gamma_consumes_every_edge_twice(n in 2usize..80, alpha in 1.5f64..3.5, seed: u64) {
        let adj = sample_scale_free(n, alpha, seed);
        let g = build_interconnection(&adj);
        prop_assert_eq!(g.nnz(), adj.degrees().iter().sum::<usize>());
        prop_assert_eq!(g.nnz(), 2 * (n - 1));
        prop_assert!(g.is_permutation());
        prop_assert_eq!(g.row_blocks(), &adj.degrees()[..]);
    }

    #[test]
    fn multiplier_sign_structure(dims in prop::collection::vec(1usize..4, 1..6), seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let specs: Vec<_> = dims.iter().map(|&d| IqcMultiplierSpec::parametric_scalar(d)).collect();
        let values: Vec<f64> = dims.iter().map(|_| rng.gen_range(0.0..3.0)).collect();
        let pi = diag_multiplier(&specs, &values).unwrap();
        let min11 = pi.p11.clone().symmetric_eigenvalues().min();
        let max22 = pi.p22.clone().symmetric_eigenvalues().max();
        prop_assert!(min11 >= 0.0 && max22 <= 0.0);
        let expect: Vec<f64> = dims.iter().zip(&values).flat_map(|(&d, &r)| std::iter::repeat_n(r, d)).collect();
        prop_assert_eq!(pi.p11.diagonal(), DVector::from_vec(expect));
    }
}
