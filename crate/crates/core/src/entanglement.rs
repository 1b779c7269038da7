//! Generalized su(2) operators and the entanglement conditions built from
//! their sum-uncertainty relation, restricted to the single-photon sector.
//!
//! For coefficients `alpha` the operators are
//!
//! ```text
//! L1 = sum_j alpha_j a_j a_N† + alpha_j^* a_j† a_N
//! L2 = sum_j i alpha_j a_j a_N† - i alpha_j^* a_j† a_N
//! L3 = sum_jk alpha_j^* alpha_k a_j† a_k - N_N
//! ```
//!
//! They conserve photon number, so on single-photon states they are `N x N`
//! matrices in the basis `|1>_j`. Fully separable states satisfy
//! `Var(L1) + Var(L2) >= 2 <S>` with `S = sum_jk alpha_j^* alpha_k a_j† a_k + N_N`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::state::{
    check_same_dim, decompose, fidelity, generalized_w_pair, AlphaVector, PhotonAmplitudes, Su2Axis,
};
use crate::tolerance;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Single-photon matrices of `L1`, `L2`, `L3` for one alpha vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Su2Triple {
    pub alphas: AlphaVector,
    pub l1: DMatrix<Complex64>,
    pub l2: DMatrix<Complex64>,
    pub l3: DMatrix<Complex64>,
}

impl Su2Triple {
    pub fn dim(&self) -> usize {
        self.l1.nrows()
    }

    /// `S = sum_jk alpha_j^* alpha_k a_j† a_k + N_N`, half the separable bound.
    pub fn bound_operator(&self) -> DMatrix<Complex64> {
        let mut s = self.l3.clone();
        let last = self.dim() - 1;
        s[(last, last)] = Complex64::new(1.0, 0.0);
        s
    }
}

pub fn su2_matrices(alphas: &AlphaVector) -> Su2Triple {
    let n = alphas.modes();
    let last = n - 1;
    let a = alphas.as_slice();
    let mut l1 = DMatrix::zeros(n, n);
    let mut l2 = DMatrix::zeros(n, n);
    let mut l3 = DMatrix::zeros(n, n);
    for j in 0..last {
        l1[(j, last)] = a[j].conj();
        l1[(last, j)] = a[j];
        l2[(j, last)] = -I * a[j].conj();
        l2[(last, j)] = I * a[j];
        for k in 0..last {
            l3[(j, k)] = a[j].conj() * a[k];
        }
    }
    l3[(last, last)] = Complex64::new(-1.0, 0.0);
    Su2Triple {
        alphas: alphas.clone(),
        l1,
        l2,
        l3,
    }
}

/// `<psi|M|psi>` for Hermitian `M`.
pub fn expectation(m: &DMatrix<Complex64>, state: &PhotonAmplitudes) -> f64 {
    state.amplitudes().dotc(&(m * state.amplitudes())).re
}

/// `<M^2> - <M>^2`, with `<M^2>` evaluated as `||M psi||^2`.
pub fn variance(m: &DMatrix<Complex64>, state: &PhotonAmplitudes) -> f64 {
    let image = m * state.amplitudes();
    let mean = state.amplitudes().dotc(&image).re;
    image.norm_squared() - mean * mean
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceSum {
    pub var_l1: f64,
    pub var_l2: f64,
    pub sum_var: f64,
    /// `2 <S>`; fully separable states have `sum_var >= bound`.
    pub bound: f64,
}

impl VarianceSum {
    pub fn violated(&self) -> bool {
        self.sum_var < self.bound - tolerance::DETECTION
    }
}

pub fn variance_sum(state: &PhotonAmplitudes, triple: &Su2Triple) -> Result<VarianceSum> {
    check_same_dim(triple.dim(), state.n())?;
    let var_l1 = variance(&triple.l1, state);
    let var_l2 = variance(&triple.l2, state);
    Ok(VarianceSum {
        var_l1,
        var_l2,
        sum_var: var_l1 + var_l2,
        bound: 2.0 * expectation(&triple.bound_operator(), state),
    })
}

/// The correlation form of the separability bound: entanglement is certified
/// when `coherence = |sum_j alpha_j <a_j a_N†>|^2` exceeds
/// `coherence_bound = sum_jk <alpha_j^* alpha_k a_j† a_k N_N>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceTest {
    pub coherence: f64,
    pub coherence_bound: f64,
    pub violated: bool,
}

/// On a single photon `<a_j a_N†> = C_j C_N^*` and the four-operator bound vanishes.
pub fn entanglement_condition(
    state: &PhotonAmplitudes,
    alphas: &AlphaVector,
) -> Result<CoherenceTest> {
    check_same_dim(alphas.modes(), state.n())?;
    let last = state.amplitude(state.n() - 1);
    let overlap: Complex64 = alphas
        .as_slice()
        .iter()
        .enumerate()
        .map(|(j, a)| a * state.amplitude(j))
        .sum::<Complex64>()
        * last.conj();
    let coherence = overlap.norm_sqr();
    let coherence_bound = 0.0;
    Ok(CoherenceTest {
        coherence,
        coherence_bound,
        violated: coherence > coherence_bound + tolerance::DETECTION,
    })
}

/// Residuals of the squeezing identities for the alpha vector read off the
/// state itself:
/// `dL1 dL2 = |<L3>|`, `dL1^2 = |lambda <L3>|` and `dL2^2 |lambda| = |<L3>|`
/// (the last in product form so that `lambda = 0` stays finite).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezingCheck {
    pub product_residual: f64,
    pub var_l1_residual: f64,
    pub var_l2_residual: f64,
    pub var_l1: f64,
    pub var_l2: f64,
    pub mean_l3: f64,
    pub lambda: f64,
}

pub fn squeezing_check(state: &PhotonAmplitudes) -> Result<SqueezingCheck> {
    let decomposition = decompose(state)?;
    let triple = su2_matrices(&decomposition.alphas);
    let lambda = decomposition.lambda;
    let var_l1 = variance(&triple.l1, state);
    let var_l2 = variance(&triple.l2, state);
    let mean_l3 = expectation(&triple.l3, state);
    Ok(SqueezingCheck {
        product_residual: ((var_l1.max(0.0) * var_l2.max(0.0)).sqrt() - mean_l3.abs()).abs(),
        var_l1_residual: (var_l1 - (lambda * mean_l3).abs()).abs(),
        var_l2_residual: (var_l2 * lambda.abs() - mean_l3.abs()).abs(),
        var_l1,
        var_l2,
        mean_l3,
        lambda,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Entangled,
    NotDetected,
}

/// Everything the single-photon entanglement test computes, as raw values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    #[serde(flatten)]
    pub alphas: AlphaVector,
    pub coherence: f64,
    pub coherence_bound: f64,
    pub violates_variance_bound: bool,
    /// `|<Phi|W+>|^2 - |<Phi|W->|^2` for the `L1` eigenpair.
    pub fidelity_gap_l1: f64,
    /// Same for the `L2` eigenpair.
    pub fidelity_gap_l2: f64,
    /// `gap_l1^2 + gap_l2^2`; separable single-photon states give 0.
    pub separability_witness: f64,
    /// `1 - 2 |C_N|^2`.
    pub lambda: f64,
    pub verdict: Verdict,
}

impl EntanglementReport {
    pub fn is_entangled(&self) -> bool {
        self.verdict == Verdict::Entangled
    }
}

fn fidelity_gap(state: &PhotonAmplitudes, alphas: &AlphaVector, axis: Su2Axis) -> Result<f64> {
    let (plus, minus) = generalized_w_pair(alphas, axis);
    Ok(fidelity(state, &plus)? - fidelity(state, &minus)?)
}

/// Fidelity-gap test against the W pairs of a chosen alpha vector.
pub fn single_photon_condition(
    state: &PhotonAmplitudes,
    alphas: &AlphaVector,
) -> Result<EntanglementReport> {
    let correlation = entanglement_condition(state, alphas)?;
    let triple = su2_matrices(alphas);
    let sums = variance_sum(state, &triple)?;
    let gap_l1 = fidelity_gap(state, alphas, Su2Axis::L1)?;
    let gap_l2 = fidelity_gap(state, alphas, Su2Axis::L2)?;
    let witness = gap_l1 * gap_l1 + gap_l2 * gap_l2;
    Ok(EntanglementReport {
        alphas: alphas.clone(),
        coherence: correlation.coherence,
        coherence_bound: correlation.coherence_bound,
        violates_variance_bound: sums.violated(),
        fidelity_gap_l1: gap_l1,
        fidelity_gap_l2: gap_l2,
        separability_witness: witness,
        lambda: 1.0 - 2.0 * state.probabilities()[state.n() - 1],
        verdict: if witness > tolerance::DETECTION {
            Verdict::Entangled
        } else {
            Verdict::NotDetected
        },
    })
}

/// Chooses the alpha vector the state is squeezed for, then runs
/// [`single_photon_condition`].
pub fn auto_detect(state: &PhotonAmplitudes) -> Result<EntanglementReport> {
    let decomposition = decompose(state)?;
    single_photon_condition(state, &decomposition.alphas)
}
