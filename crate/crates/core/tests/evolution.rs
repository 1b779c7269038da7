mod common;

use proptest::prelude::*;
use wstate::evolution::{linspace, probability_trace};
use wstate::lattice::{ring_matrix, w_prime_distance, RingSpec};
use wstate::{evolve, PhotonAmplitudes};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn propagation_composes(seed in any::<u64>(), dim in 2usize..10, z1 in 0.0f64..5.0, z2 in 0.0f64..5.0) {
        let mut rng = common::rng(seed);
        let m = common::random_hermitian(&mut rng, dim);
        let s = common::random_state(&mut rng, dim);
        let direct = evolve(&m, z1 + z2, &s).unwrap();
        let stepped = evolve(&m, z2, &evolve(&m, z1, &s).unwrap()).unwrap();
        prop_assert!((direct.amplitudes() - stepped.amplitudes()).norm() < 1e-10);
    }

    #[test]
    fn trace_rows_are_distributions(seed in any::<u64>(), dim in 2usize..10) {
        let mut rng = common::rng(seed);
        let m = common::random_hermitian(&mut rng, dim);
        let s = common::random_state(&mut rng, dim);
        let trace = probability_trace(&m, &s, &linspace(0.0, 8.0, 40)).unwrap();
        for row in &trace.probabilities {
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
        prop_assert_eq!(&trace.probabilities[0], &s.probabilities());
    }
}

#[test]
fn trace_matches_pointwise_evolution() {
    let mut rng = common::rng(3);
    let m = common::random_hermitian(&mut rng, 6);
    let s = common::random_state(&mut rng, 6);
    let grid = linspace(0.0, 3.0, 101);
    let trace = probability_trace(&m, &s, &grid).unwrap();
    for (z, row) in grid.iter().zip(&trace.probabilities) {
        let p = evolve(&m, *z, &s).unwrap().probabilities();
        for (a, b) in p.iter().zip(row) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}

#[test]
fn ring_curves_first_meet_at_one_half() {
    let n = 7;
    let spec = RingSpec::resonant(n, 1.0).unwrap();
    let hub = PhotonAmplitudes::basis(n + 1, spec.hub()).unwrap();
    let grid = linspace(0.0, 2.0, 2001);
    let trace = probability_trace(&ring_matrix(&spec), &hub, &grid).unwrap();
    // On resonance the hub probability bottoms out at exactly 1/2, so the
    // two curves touch there; find the first local minimum of their gap.
    let gap: Vec<f64> = trace
        .probabilities
        .iter()
        .map(|row| row[n] - row[..n].iter().sum::<f64>())
        .collect();
    let first = (1..gap.len() - 1)
        .find(|&i| gap[i] <= gap[i - 1] && gap[i] <= gap[i + 1])
        .expect("gap has a minimum");
    let expected = w_prime_distance(spec.c, 1).unwrap();
    assert!((grid[first] - expected).abs() <= 1e-3);
    assert!(gap[first].abs() < 1e-5 && gap.iter().all(|g| *g > -1e-12));
    let at = evolve(&ring_matrix(&spec), expected, &hub)
        .unwrap()
        .probabilities();
    assert!((at[n] - 0.5).abs() < 1e-12);
}
