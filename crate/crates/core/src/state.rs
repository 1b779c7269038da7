//! Single-photon states over `N` spatial modes and the generalized perfect
//! W-state family.
//!
//! A single photon shared between `N` waveguides is described by its complex
//! amplitudes `C_j` on the single-excitation basis `|1>_j |0...0>`. The
//! generalized perfect W-states put weight `1/2` on the last mode and spread
//! the other half over the first `N - 1` modes with coefficients `alpha_j`.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Unit-norm complex amplitudes of a single photon over `N >= 2` modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateJson", into = "StateJson")]
pub struct PhotonAmplitudes {
    amplitudes: DVector<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    n: usize,
    amplitudes: Vec<[f64; 2]>,
}

impl TryFrom<StateJson> for PhotonAmplitudes {
    type Error = Error;

    fn try_from(raw: StateJson) -> Result<Self> {
        if raw.n != raw.amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: raw.n,
                found: raw.amplitudes.len(),
            });
        }
        PhotonAmplitudes::new(
            raw.amplitudes
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        )
    }
}

impl From<PhotonAmplitudes> for StateJson {
    fn from(state: PhotonAmplitudes) -> Self {
        StateJson {
            n: state.n(),
            amplitudes: state.amplitudes.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

impl PhotonAmplitudes {
    /// Validates length and normalization.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::from_vector(DVector::from_vec(amplitudes))
    }

    pub fn from_vector(amplitudes: DVector<Complex64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::InvalidDimension(format!(
                "a single-photon state needs at least 2 modes, got {}",
                amplitudes.len()
            )));
        }
        if amplitudes
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::NotNormalized { norm_sqr: f64::NAN });
        }
        let norm_sqr = amplitudes.norm_squared();
        if (norm_sqr - 1.0).abs() > tolerance::NORM {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales a noisy amplitude vector to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        Self::from_vector(v.unscale(norm))
    }

    /// Real amplitudes, rescaled to unit norm.
    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::normalized(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// The photon localized in `mode` (0-based).
    pub fn basis(n: usize, mode: usize) -> Result<Self> {
        if mode >= n {
            return Err(Error::InvalidDimension(format!(
                "mode index {mode} out of range for {n} modes"
            )));
        }
        let mut v = DVector::zeros(n);
        v[mode] = Complex64::new(1.0, 0.0);
        Self::from_vector(v)
    }

    pub fn n(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, mode: usize) -> Complex64 {
        self.amplitudes[mode]
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c.norm_sqr()).collect()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PhotonAmplitudes) -> Result<Complex64> {
        check_same_dim(self.n(), other.n())?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn with_global_phase(&self, phase: f64) -> Self {
        Self {
            amplitudes: self
                .amplitudes
                .map(|c| c * Complex64::from_polar(1.0, phase)),
        }
    }

    /// Multiplies mode `j` by `exp(i * phases[j])`.
    pub fn apply_phases(&self, phases: &[f64]) -> Result<Self> {
        check_same_dim(self.n(), phases.len())?;
        Ok(Self {
            amplitudes: DVector::from_iterator(
                self.n(),
                self.amplitudes
                    .iter()
                    .zip(phases)
                    .map(|(c, &p)| c * Complex64::from_polar(1.0, p)),
            ),
        })
    }

    pub(crate) fn from_vector_unchecked(amplitudes: DVector<Complex64>) -> Self {
        Self { amplitudes }
    }
}

pub(crate) fn check_same_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// The nonzero, unit-norm coefficients `alpha_1..alpha_{N-1}` that select a
/// generalized perfect W-state and its su(2) operator triple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AlphaJson", into = "AlphaJson")]
pub struct AlphaVector {
    alphas: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct AlphaJson {
    alphas: Vec<[f64; 2]>,
}

impl TryFrom<AlphaJson> for AlphaVector {
    type Error = Error;

    fn try_from(raw: AlphaJson) -> Result<Self> {
        AlphaVector::new(
            raw.alphas
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        )
    }
}

impl From<AlphaVector> for AlphaJson {
    fn from(a: AlphaVector) -> Self {
        AlphaJson {
            alphas: a.alphas.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

impl AlphaVector {
    pub fn new(alphas: Vec<Complex64>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::InvalidDimension(
                "alpha vector needs at least one coefficient".into(),
            ));
        }
        if let Some(index) = alphas
            .iter()
            .position(|a| a.norm() <= tolerance::ZERO_AMPLITUDE)
        {
            return Err(Error::ZeroAlpha { index });
        }
        let norm_sqr: f64 = alphas.iter().map(|a| a.norm_sqr()).sum();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > tolerance::NORM {
            return Err(Error::AlphaNotNormalized { norm_sqr });
        }
        Ok(Self { alphas })
    }

    pub fn normalized(alphas: Vec<Complex64>) -> Result<Self> {
        let norm = alphas.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        Self::new(alphas.into_iter().map(|a| a / norm).collect())
    }

    /// `alpha_j = 1/sqrt(len)` for every `j`.
    pub fn uniform(len: usize) -> Result<Self> {
        Self::normalized(vec![Complex64::new(1.0, 0.0); len])
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    /// Number of modes `N = len + 1` this vector addresses.
    pub fn modes(&self) -> usize {
        self.alphas.len() + 1
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.alphas
    }

    pub fn negated(&self) -> Self {
        Self {
            alphas: self.alphas.iter().map(|a| -a).collect(),
        }
    }
}

/// Which su(2) operator a generalized perfect W pair diagonalizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Su2Axis {
    L1,
    L2,
}

/// The perfect W-state: `1/sqrt(2(n-1))` on the first `n - 1` modes and
/// `1/sqrt(2)` on the last.
pub fn perfect_w(n: usize) -> Result<PhotonAmplitudes> {
    if n < 3 {
        return Err(Error::InvalidDimension(format!(
            "perfect W-state needs at least 3 modes, got {n}"
        )));
    }
    let side = 1.0 / (2.0 * (n - 1) as f64).sqrt();
    let mut v = vec![Complex64::new(side, 0.0); n];
    v[n - 1] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    PhotonAmplitudes::new(v)
}

/// The orthonormal pair of generalized perfect W-states that are the `+1`
/// and `-1` eigenvectors of `L1` (amplitudes `±alpha_j^*/sqrt 2`) or `L2`
/// (amplitudes `∓i alpha_j^*/sqrt 2`), with `1/sqrt 2` on the last mode.
pub fn generalized_w_pair(
    alphas: &AlphaVector,
    axis: Su2Axis,
) -> (PhotonAmplitudes, PhotonAmplitudes) {
    let build = |sign: f64| {
        let factor = match axis {
            Su2Axis::L1 => Complex64::new(sign, 0.0),
            Su2Axis::L2 => -I * sign,
        } * std::f64::consts::FRAC_1_SQRT_2;
        let mut v: Vec<Complex64> = alphas
            .as_slice()
            .iter()
            .map(|a| factor * a.conj())
            .collect();
        v.push(Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0));
        PhotonAmplitudes::from_vector_unchecked(DVector::from_vec(v))
    };
    (build(1.0), build(-1.0))
}

/// `|<a|b>|^2`.
pub fn fidelity(a: &PhotonAmplitudes, b: &PhotonAmplitudes) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

/// Sign choice for the alpha coefficients in the W decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// A genuinely entangled single-photon state written as
/// `global_phase * (d1 |W+> + d2 |W->)` over the `L1` eigenpair of `alphas`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WDecomposition {
    pub alphas: AlphaVector,
    /// Squeezing parameter `1 - 2|C_N|^2`, strictly inside `(-1, 1)`.
    pub lambda: f64,
    pub branch: Branch,
    pub d1: Complex64,
    pub d2: Complex64,
    /// `exp(i arg C_N)`, removed before fitting the W pair.
    pub global_phase: Complex64,
}

impl WDecomposition {
    pub fn reconstruct(&self) -> PhotonAmplitudes {
        let (plus, minus) = generalized_w_pair(&self.alphas, Su2Axis::L1);
        let v = (plus.amplitudes() * self.d1 + minus.amplitudes() * self.d2) * self.global_phase;
        PhotonAmplitudes::from_vector_unchecked(v)
    }
}

/// Decomposes with the branch that makes `d1` the larger coefficient.
pub fn decompose(state: &PhotonAmplitudes) -> Result<WDecomposition> {
    decompose_with_branch(state, Branch::Plus)
}

pub fn decompose_with_branch(state: &PhotonAmplitudes, branch: Branch) -> Result<WDecomposition> {
    let n = state.n();
    let last = state.amplitude(n - 1);
    let last_prob = last.norm_sqr();
    if last_prob <= tolerance::SINGULAR_LAST_MODE
        || last_prob >= 1.0 - tolerance::SINGULAR_LAST_MODE
    {
        return Err(Error::NotGenuinelyEntangled {
            last_mode_probability: last_prob,
        });
    }
    if let Some(mode) = (0..n - 1).find(|&j| state.amplitude(j).norm() <= tolerance::ZERO_AMPLITUDE)
    {
        return Err(Error::ZeroAmplitude { mode });
    }

    let rest: f64 = (0..n - 1).map(|j| state.amplitude(j).norm_sqr()).sum();
    let rest_norm = rest.sqrt();
    let unphase = Complex64::from_polar(1.0, -last.arg());
    let s = branch.sign();
    // alpha_j^* = s C_j e^{-i phi_N} / sqrt(rest)
    let alphas = (0..n - 1)
        .map(|j| (state.amplitude(j) * unphase * s / rest_norm).conj())
        .collect();
    let alphas = AlphaVector::normalized(alphas)?;

    let lambda = 1.0 - 2.0 * last_prob;
    let lower = (1.0 - lambda).sqrt();
    let upper = (1.0 + lambda).sqrt();
    Ok(WDecomposition {
        alphas,
        lambda,
        branch,
        d1: Complex64::new((lower + s * upper) / 2.0, 0.0),
        d2: Complex64::new((lower - s * upper) / 2.0, 0.0),
        global_phase: Complex64::from_polar(1.0, last.arg()),
    })
}
