mod common;

use proptest::prelude::*;
use wstate::entanglement::{auto_detect, single_photon_condition, su2_matrices, variance_sum};
use wstate::fock::{check_bound, FockState};
use wstate::lattice::{chain_matrix, ChainSpec};
use wstate::state::decompose;
use wstate::{evolve, PhotonAmplitudes};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn report_ignores_global_phase(seed in any::<u64>(), n in 3usize..9, phase in -3.2f64..3.2) {
        let mut rng = common::rng(seed);
        let s = common::random_state(&mut rng, n);
        let alphas = common::random_alphas(&mut rng, n - 1);
        let a = single_photon_condition(&s, &alphas).unwrap();
        let b = single_photon_condition(&s.with_global_phase(phase), &alphas).unwrap();
        prop_assert!((a.separability_witness - b.separability_witness).abs() < 1e-12);
        prop_assert!((a.fidelity_gap_l1 - b.fidelity_gap_l1).abs() < 1e-12);
        prop_assert!((a.coherence - b.coherence).abs() < 1e-12);
    }

    #[test]
    fn variance_sum_matches_fock_evaluation(seed in any::<u64>(), n in 3usize..6) {
        let mut rng = common::rng(seed);
        let s = common::random_state(&mut rng, n);
        let alphas = common::random_alphas(&mut rng, n - 1);
        let small = variance_sum(&s, &su2_matrices(&alphas)).unwrap();
        let big = check_bound(&FockState::single_photon(&s, 2).unwrap(), &alphas).unwrap();
        prop_assert!((small.sum_var - big.sum_var).abs() < 1e-12);
        prop_assert!((small.bound - big.bound).abs() < 1e-12);
        prop_assert_eq!(small.violated(), big.violates);
    }
}

#[test]
fn chain_outputs_are_detected() {
    let spec = ChainSpec::new(vec![1.2043, 0.686372, 0.781121]).unwrap();
    let m = chain_matrix(&spec);
    for input in 0..4 {
        let s0 = PhotonAmplitudes::basis(4, input).unwrap();
        for i in 1..60 {
            let s = evolve(&m, 0.05 * i as f64, &s0).unwrap();
            let p_last = s.probabilities()[3];
            match auto_detect(&s) {
                Ok(r) => assert!(r.is_entangled(), "input {input}, step {i}: {r:?}"),
                // Only near-basis states may be rejected by the decomposition.
                Err(_) => assert!(
                    !(1e-12..=1.0 - 1e-12).contains(&p_last)
                        || s.probabilities().iter().any(|p| *p < 1e-24)
                ),
            }
        }
    }
}

#[test]
fn four_mode_chain_state_is_perfect_w_class() {
    let s6 = 6f64.sqrt();
    let s = PhotonAmplitudes::new(vec![
        wstate::Complex64::new(-1.0 / s6, 0.0),
        wstate::Complex64::new(0.0, 1.0 / s6),
        wstate::Complex64::new(1.0 / s6, 0.0),
        wstate::Complex64::new(0.0, 3f64.sqrt() / s6),
    ])
    .unwrap();
    let r = auto_detect(&s).unwrap();
    assert!(r.is_entangled());
    assert!((r.separability_witness - 1.0).abs() < 1e-10);
    assert!(decompose(&s).unwrap().lambda.abs() < 1e-15);
}
