#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use wstate::circuit::{CircuitSpec, DirectionalCoupler};
use wstate::{AlphaVector, Complex64, CouplingMatrix, PhotonAmplitudes};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> CouplingMatrix {
    let a = DMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let h = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
    CouplingMatrix::new(h).unwrap()
}

pub fn random_state(rng: &mut ChaCha8Rng, n: usize) -> PhotonAmplitudes {
    PhotonAmplitudes::normalized((0..n).map(|_| gaussian(rng)).collect()).unwrap()
}

pub fn random_alphas(rng: &mut ChaCha8Rng, len: usize) -> AlphaVector {
    AlphaVector::normalized((0..len).map(|_| gaussian(rng)).collect()).unwrap()
}

/// Valid spec with arbitrary coupler phases; the last coupler is balanced.
pub fn random_circuit(rng: &mut ChaCha8Rng, n: usize) -> CircuitSpec {
    let mut couplers: Vec<DirectionalCoupler> = (0..n - 2)
        .map(|_| {
            let theta: f64 = rng.random_range(0.05..1.5);
            let chi: f64 = rng.random_range(-3.0..3.0);
            let common = Complex64::from_polar(1.0, chi);
            DirectionalCoupler::new(
                common * theta.cos(),
                common * Complex64::new(0.0, theta.sin()),
            )
            .unwrap()
        })
        .collect();
    couplers.push(DirectionalCoupler::balanced());
    let phases = (0..n).map(|_| rng.random_range(-3.2..3.2)).collect();
    CircuitSpec::new(n, couplers, phases).unwrap()
}
