//! Brute-force evaluation of the su(2) operators on truncated multimode Fock
//! spaces, used to check the separability bound on multiphoton product states.
//!
//! Basis states are occupation tuples `(n_1, .., n_N)` with `0 <= n_j <= cutoff`,
//! indexed in mixed radix with mode 1 as the least significant digit.
//! Truncated creation operators annihilate states at the cutoff, so every
//! quantity here is exact only for states with no weight on basis states where
//! some mode sits at the cutoff (the "top shell"); [`check_bound`] rejects
//! anything else.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::{self, Write};

use crate::derive_seed;
use crate::error::{Error, Result};
use crate::state::{check_same_dim, AlphaVector, PhotonAmplitudes};
use crate::tolerance;

pub const MAX_MODES: usize = 5;
pub const MAX_CUTOFF: usize = 3;
pub const MAX_BASIS: usize = 4096;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn check_space(modes: usize, cutoff: usize) -> Result<usize> {
    if !(2..=MAX_MODES).contains(&modes) {
        return Err(Error::InvalidDimension(format!(
            "modes must be in 2..={MAX_MODES}, got {modes}"
        )));
    }
    if !(1..=MAX_CUTOFF).contains(&cutoff) {
        return Err(Error::InvalidDimension(format!(
            "cutoff must be in 1..={MAX_CUTOFF}, got {cutoff}"
        )));
    }
    let size = (cutoff + 1).pow(modes as u32);
    if size > MAX_BASIS {
        return Err(Error::BasisTooLarge {
            size,
            limit: MAX_BASIS,
        });
    }
    Ok(size)
}

/// Occupation number of `mode` in basis state `index`.
fn occupation(index: usize, mode: usize, cutoff: usize) -> usize {
    (index / (cutoff + 1).pow(mode as u32)) % (cutoff + 1)
}

fn in_top_shell(index: usize, modes: usize, cutoff: usize) -> bool {
    (0..modes).any(|m| occupation(index, m, cutoff) == cutoff)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    modes: usize,
    cutoff: usize,
    amplitudes: DVector<Complex64>,
}

impl FockState {
    pub fn new(modes: usize, cutoff: usize, amplitudes: DVector<Complex64>) -> Result<Self> {
        let size = check_space(modes, cutoff)?;
        check_same_dim(size, amplitudes.len())?;
        let norm_sqr = amplitudes.norm_squared();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > tolerance::NORM {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self {
            modes,
            cutoff,
            amplitudes,
        })
    }

    pub fn vacuum(modes: usize, cutoff: usize) -> Result<Self> {
        let size = check_space(modes, cutoff)?;
        let mut v = DVector::zeros(size);
        v[0] = Complex64::new(1.0, 0.0);
        Self::new(modes, cutoff, v)
    }

    /// Tensor product of single-mode states `factors[j]` over `|0>..|len-1>`.
    pub fn product(factors: &[Vec<Complex64>], cutoff: usize) -> Result<Self> {
        let modes = factors.len();
        let size = check_space(modes, cutoff)?;
        for f in factors {
            if f.is_empty() || f.len() > cutoff + 1 {
                return Err(Error::InvalidDimension(format!(
                    "single-mode factor of length {} does not fit cutoff {cutoff}",
                    f.len()
                )));
            }
        }
        let mut v = DVector::zeros(size);
        for (index, slot) in v.iter_mut().enumerate() {
            let mut amp = Complex64::new(1.0, 0.0);
            for (m, f) in factors.iter().enumerate() {
                match f.get(occupation(index, m, cutoff)) {
                    Some(a) => amp *= a,
                    None => {
                        amp = Complex64::new(0.0, 0.0);
                        break;
                    }
                }
            }
            *slot = amp;
        }
        Self::new(modes, cutoff, v)
    }

    /// Embeds `sum_j C_j |1>_j`.
    pub fn single_photon(state: &PhotonAmplitudes, cutoff: usize) -> Result<Self> {
        let modes = state.n();
        let size = check_space(modes, cutoff)?;
        let mut v = DVector::zeros(size);
        for j in 0..modes {
            v[(cutoff + 1).pow(j as u32)] = state.amplitude(j);
        }
        Self::new(modes, cutoff, v)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    /// Probability on basis states with at least one mode at the cutoff.
    pub fn top_shell_weight(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| in_top_shell(*i, self.modes, self.cutoff))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FockOperatorKind {
    L1,
    L2,
    L3,
    /// `sum_jk alpha_j^* alpha_k a_j† a_k + N_N`.
    Bound,
}

/// Bilinear terms `coeff * a_j† a_k` (0-based modes) making up an operator.
fn terms(kind: FockOperatorKind, alphas: &AlphaVector) -> Vec<(Complex64, usize, usize)> {
    let a = alphas.as_slice();
    let last = a.len();
    let mut out = Vec::new();
    match kind {
        FockOperatorKind::L1 => {
            for (j, x) in a.iter().enumerate() {
                out.push((*x, last, j));
                out.push((x.conj(), j, last));
            }
        }
        FockOperatorKind::L2 => {
            for (j, x) in a.iter().enumerate() {
                out.push((I * x, last, j));
                out.push((-I * x.conj(), j, last));
            }
        }
        FockOperatorKind::L3 | FockOperatorKind::Bound => {
            for (j, x) in a.iter().enumerate() {
                for (k, y) in a.iter().enumerate() {
                    out.push((x.conj() * y, j, k));
                }
            }
            let sign = if kind == FockOperatorKind::L3 {
                -1.0
            } else {
                1.0
            };
            out.push((Complex64::new(sign, 0.0), last, last));
        }
    }
    out
}

/// Calls `f(target, source, weight)` for each nonzero matrix element of the
/// truncated `a_j† a_k`.
fn for_each_hop(
    modes: usize,
    cutoff: usize,
    j: usize,
    k: usize,
    mut f: impl FnMut(usize, usize, f64),
) {
    let size = (cutoff + 1).pow(modes as u32);
    let (sj, sk) = ((cutoff + 1).pow(j as u32), (cutoff + 1).pow(k as u32));
    for source in 0..size {
        let nk = occupation(source, k, cutoff);
        if j == k {
            if nk > 0 {
                f(source, source, nk as f64);
            }
            continue;
        }
        let nj = occupation(source, j, cutoff);
        if nk == 0 || nj == cutoff {
            continue;
        }
        f(source - sk + sj, source, ((nk * (nj + 1)) as f64).sqrt());
    }
}

fn apply_terms(
    terms: &[(Complex64, usize, usize)],
    modes: usize,
    cutoff: usize,
    v: &DVector<Complex64>,
) -> DVector<Complex64> {
    let mut out = DVector::zeros(v.len());
    for &(coeff, j, k) in terms {
        for_each_hop(modes, cutoff, j, k, |t, s, w| out[t] += coeff * w * v[s]);
    }
    out
}

/// Dense matrix of one of the four operators on a truncated space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    pub kind: FockOperatorKind,
    pub alphas: AlphaVector,
    pub modes: usize,
    pub cutoff: usize,
    pub matrix: DMatrix<Complex64>,
}

pub fn build_fock_operator(
    kind: FockOperatorKind,
    alphas: &AlphaVector,
    modes: usize,
    cutoff: usize,
) -> Result<FockOperator> {
    let size = check_space(modes, cutoff)?;
    check_same_dim(modes, alphas.modes())?;
    let mut matrix = DMatrix::zeros(size, size);
    for (coeff, j, k) in terms(kind, alphas) {
        for_each_hop(modes, cutoff, j, k, |t, s, w| matrix[(t, s)] += coeff * w);
    }
    Ok(FockOperator {
        kind,
        alphas: alphas.clone(),
        modes,
        cutoff,
        matrix,
    })
}

/// Expectations of the separability test on one state. `lhs21` is
/// `|sum_j alpha_j <a_j a_N†>|^2` and `rhs21` is `sum_jk <alpha_j^* alpha_k a_j† a_k N_N>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub sum_var: f64,
    pub bound: f64,
    pub lhs21: f64,
    pub rhs21: f64,
    pub violates: bool,
    /// `sum_var` rebuilt as `bound + 4 (rhs21 - lhs21)`.
    pub sum_var_expanded: f64,
}

pub fn check_bound(state: &FockState, alphas: &AlphaVector) -> Result<BoundCheck> {
    check_same_dim(state.modes, alphas.modes())?;
    let leak = state.top_shell_weight();
    if leak > tolerance::TOP_SHELL_WEIGHT {
        return Err(Error::TruncationLeak { weight: leak });
    }
    let (m, c, psi) = (state.modes, state.cutoff, &state.amplitudes);
    let apply = |kind| apply_terms(&terms(kind, alphas), m, c, psi);
    let variance = |image: &DVector<Complex64>| image.norm_squared() - psi.dotc(image).re.powi(2);

    let sum_var = variance(&apply(FockOperatorKind::L1)) + variance(&apply(FockOperatorKind::L2));
    let bound = 2.0 * psi.dotc(&apply(FockOperatorKind::Bound)).re;

    let last = m - 1;
    let a = alphas.as_slice();
    let x_terms: Vec<_> = a
        .iter()
        .enumerate()
        .map(|(j, x)| (x.conj(), j, last))
        .collect();
    let lhs21 = psi.dotc(&apply_terms(&x_terms, m, c, psi)).norm_sqr();

    let count_last = apply_terms(&[(Complex64::new(1.0, 0.0), last, last)], m, c, psi);
    let mut hop_terms = Vec::with_capacity(a.len() * a.len());
    for (j, x) in a.iter().enumerate() {
        for (k, y) in a.iter().enumerate() {
            hop_terms.push((x.conj() * y, j, k));
        }
    }
    let rhs21 = psi.dotc(&apply_terms(&hop_terms, m, c, &count_last)).re;

    Ok(BoundCheck {
        sum_var,
        bound,
        lhs21,
        rhs21,
        violates: sum_var < bound - tolerance::FOCK_VIOLATION,
        sum_var_expanded: bound + 4.0 * (rhs21 - lhs21),
    })
}

fn random_unit_vector(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..len)
            .map(|_| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
            .collect();
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// Product of independent single-mode states, each uniform on the unit
/// sphere of `span{|0>..|cutoff>}`. The returned state lives in a space with
/// cutoff `cutoff + 1`, so its top shell is empty by construction.
pub fn sample_product_state(modes: usize, cutoff: usize, seed: u64) -> Result<FockState> {
    if cutoff == 0 || cutoff >= MAX_CUTOFF {
        return Err(Error::InvalidDimension(format!(
            "sample cutoff must be in 1..{MAX_CUTOFF}, got {cutoff}"
        )));
    }
    check_space(modes, cutoff + 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let factors: Vec<_> = (0..modes)
        .map(|_| random_unit_vector(&mut rng, cutoff + 1))
        .collect();
    FockState::product(&factors, cutoff + 1)
}

/// Alpha vector with complex Gaussian entries, normalized.
pub fn sample_alphas(len: usize, seed: u64) -> Result<AlphaVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    AlphaVector::new(random_unit_vector(&mut rng, len))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchConfig {
    pub samples: usize,
    /// Mode counts cycled through sample by sample.
    pub modes: Vec<usize>,
    pub cutoff: usize,
    pub seed: u64,
}

impl Default for BatchConfig {
    fn default() -> Self {
        Self {
            samples: 1000,
            modes: vec![3, 4, 5],
            cutoff: 2,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatchRecord {
    pub seed: u64,
    pub modes: usize,
    pub check: BoundCheck,
}

/// Checks the bound on `samples` random product states, each with its own
/// random alpha vector. Sample `i` uses seed `derive_seed(config.seed, i)`.
pub fn run_batch(config: &BatchConfig) -> Result<Vec<BatchRecord>> {
    if config.modes.is_empty() {
        return Err(Error::InvalidDimension("no mode counts given".into()));
    }
    (0..config.samples as u64)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(config.seed, i);
            let modes = config.modes[i as usize % config.modes.len()];
            let state = sample_product_state(modes, config.cutoff, seed)?;
            let alphas = sample_alphas(modes - 1, derive_seed(seed, 0))?;
            Ok(BatchRecord {
                seed,
                modes,
                check: check_bound(&state, &alphas)?,
            })
        })
        .collect()
}

pub fn write_batch_csv<W: Write>(records: &[BatchRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "seed,sum_var,bound,lhs21,rhs21,violates")?;
    for r in records {
        let c = &r.check;
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.seed, c.sum_var, c.bound, c.lhs21, c.rhs21, c.violates
        )?;
    }
    Ok(())
}
