//! Integrated circuit of phase shifters and directional couplers that measures
//! `<L1>`, `<L2>` and the separable bound, and in reverse prepares
//! generalized perfect W-states.
//!
//! Wiring for `N` inputs `a_1..a_N`: every input first passes a phase shifter
//! `a_j -> e^{-i phi_j} a_j`. Coupler `DC_1` mixes `a_1` and `a_2` into
//! `(b_1, c_1)`, and `DC_j` mixes `b_{j-1}` with `a_{j+1}`:
//!
//! ```text
//! b_j = T_j b_{j-1} + R_j a_{j+1}
//! c_j = R_j b_{j-1} + T_j a_{j+1}
//! ```
//!
//! The last coupler is balanced (`T = 1/sqrt 2`, `R = i/sqrt 2`). Outputs are
//! ordered `(c_1, .., c_{N-2}, b_{N-1}, c_{N-1})`; the last two are monitored.
//! All matrices here act on annihilation operators, so for a single photon
//! with input amplitudes `C` the output amplitudes are `U C`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{check_same_dim, AlphaVector, PhotonAmplitudes};
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCoupler")]
pub struct DirectionalCoupler {
    t: Complex64,
    r: Complex64,
}

#[derive(Deserialize)]
struct RawCoupler {
    t: Complex64,
    r: Complex64,
}

impl TryFrom<RawCoupler> for DirectionalCoupler {
    type Error = Error;

    fn try_from(raw: RawCoupler) -> Result<Self> {
        DirectionalCoupler::new(raw.t, raw.r)
    }
}

impl DirectionalCoupler {
    /// Requires `|t|^2 + |r|^2 = 1` and `r^* t + t^* r = 0`.
    pub fn new(t: Complex64, r: Complex64) -> Result<Self> {
        let norm = t.norm_sqr() + r.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > tolerance::COUPLER {
            return Err(Error::InvalidCoupler(format!("|t|^2 + |r|^2 = {norm}")));
        }
        let cross = 2.0 * (r.conj() * t).re;
        if cross.abs() > tolerance::COUPLER {
            return Err(Error::InvalidCoupler(format!("r*t + t*r = {cross}")));
        }
        Ok(Self { t, r })
    }

    /// Real transmission `t`, imaginary reflection `i r`.
    pub fn from_magnitudes(t: f64, r: f64) -> Result<Self> {
        Self::new(Complex64::new(t, 0.0), Complex64::new(0.0, r))
    }

    pub fn balanced() -> Self {
        Self {
            t: Complex64::new(FRAC_1_SQRT_2, 0.0),
            r: Complex64::new(0.0, FRAC_1_SQRT_2),
        }
    }

    pub fn identity() -> Self {
        Self {
            t: Complex64::new(1.0, 0.0),
            r: Complex64::new(0.0, 0.0),
        }
    }

    pub fn t(&self) -> Complex64 {
        self.t
    }

    pub fn r(&self) -> Complex64 {
        self.r
    }

    fn is_balanced(&self) -> bool {
        let b = Self::balanced();
        (self.t - b.t).norm() <= tolerance::COUPLER && (self.r - b.r).norm() <= tolerance::COUPLER
    }
}

/// `[[T, R], [R, T]]`.
pub fn dc_unitary(dc: &DirectionalCoupler) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[dc.t, dc.r, dc.r, dc.t])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct CircuitSpec {
    n: usize,
    couplers: Vec<DirectionalCoupler>,
    phases: Vec<f64>,
}

#[derive(Deserialize)]
struct RawSpec {
    n: usize,
    couplers: Vec<DirectionalCoupler>,
    phases: Vec<f64>,
}

impl TryFrom<RawSpec> for CircuitSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        CircuitSpec::new(raw.n, raw.couplers, raw.phases)
    }
}

impl CircuitSpec {
    /// `couplers` are `DC_1..DC_{N-1}`, `phases` are `phi_1..phi_N`.
    pub fn new(n: usize, couplers: Vec<DirectionalCoupler>, phases: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidCircuit(format!(
                "need at least 2 inputs, got {n}"
            )));
        }
        if couplers.len() != n - 1 {
            return Err(Error::InvalidCircuit(format!(
                "{n} inputs need {} couplers, got {}",
                n - 1,
                couplers.len()
            )));
        }
        if phases.len() != n {
            return Err(Error::InvalidCircuit(format!(
                "{n} inputs need {n} phases, got {}",
                phases.len()
            )));
        }
        if phases.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidCircuit("phases must be finite".into()));
        }
        if !couplers[n - 2].is_balanced() {
            return Err(Error::InvalidCircuit(
                "last coupler must be balanced (t = 1/sqrt 2, r = i/sqrt 2)".into(),
            ));
        }
        Ok(Self {
            n,
            couplers,
            phases,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn couplers(&self) -> &[DirectionalCoupler] {
        &self.couplers
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn phi_n(&self) -> f64 {
        self.phases[self.n - 1]
    }

    pub fn with_phi_n(&self, phi_n: f64) -> Result<Self> {
        let mut phases = self.phases.clone();
        phases[self.n - 1] = phi_n;
        Self::new(self.n, self.couplers.clone(), phases)
    }

    /// Output index of `b_{N-1}`.
    pub fn port_b(&self) -> usize {
        self.n - 2
    }

    /// Output index of `c_{N-1}`.
    pub fn port_c(&self) -> usize {
        self.n - 1
    }
}

/// Maps inputs `(a_1..a_N)` to outputs `(c_1..c_{N-2}, b_{N-1}, c_{N-1})`.
pub fn circuit_unitary(spec: &CircuitSpec) -> DMatrix<Complex64> {
    let n = spec.n;
    // Register rows: slot 0 carries the cascading b mode, slot j the c_j output.
    let mut slots = DMatrix::<Complex64>::zeros(n, n);
    for (j, phi) in spec.phases.iter().enumerate() {
        slots[(j, j)] = Complex64::from_polar(1.0, -phi);
    }
    for (idx, dc) in spec.couplers.iter().enumerate() {
        let j = idx + 1;
        let b = slots.row(0).clone_owned();
        let a = slots.row(j).clone_owned();
        slots.set_row(0, &(&b * dc.t + &a * dc.r));
        slots.set_row(j, &(&b * dc.r + &a * dc.t));
    }
    let mut out = DMatrix::zeros(n, n);
    for k in 0..n - 2 {
        out.set_row(k, &slots.row(k + 1));
    }
    out.set_row(n - 2, &slots.row(0));
    out.set_row(n - 1, &slots.row(n - 1));
    out
}

/// Coefficients of `b_{N-2} = sum_j alpha_j a_j` in terms of the unphased inputs.
pub fn circuit_alphas(spec: &CircuitSpec) -> Result<AlphaVector> {
    let len = spec.n - 1;
    let t: Vec<Complex64> = spec.couplers.iter().map(|c| c.t).collect();
    let r: Vec<Complex64> = spec.couplers.iter().map(|c| c.r).collect();
    // t[k], r[k] belong to DC_{k+1}; alpha_j (1-based) picks up T_j..T_{N-2}.
    let tail = |from: usize| -> Complex64 { t[from - 1..len - 1].iter().product() };
    let mut alphas = Vec::with_capacity(len);
    for j in 1..=len {
        let phase = Complex64::from_polar(1.0, -spec.phases[j - 1]);
        let a = if j == 1 {
            tail(1) * phase
        } else {
            tail(j) * r[j - 2] * phase
        };
        if a.norm() <= tolerance::ZERO_AMPLITUDE {
            return Err(Error::ZeroAlpha { index: j - 1 });
        }
        alphas.push(a);
    }
    AlphaVector::new(alphas)
}

/// Inverts [`circuit_alphas`] with real transmissions and imaginary
/// reflections; `phi_N` is set to `pi/2` so the circuit measures `L1`.
pub fn design_circuit(alphas: &AlphaVector) -> Result<CircuitSpec> {
    let a = alphas.as_slice();
    let len = a.len();
    let n = len + 1;
    let mut partial = Vec::with_capacity(len);
    let mut acc = 0.0;
    for x in a {
        acc += x.norm_sqr();
        partial.push(acc.sqrt());
    }
    let mut couplers = Vec::with_capacity(n - 1);
    for j in 2..=len {
        let s_j = partial[j - 1];
        couplers.push(DirectionalCoupler::from_magnitudes(
            partial[j - 2] / s_j,
            a[j - 1].norm() / s_j,
        )?);
    }
    couplers.push(DirectionalCoupler::balanced());
    let mut phases = Vec::with_capacity(n);
    // `+ 0.0` turns -0.0 into 0.0 for real positive alpha_1.
    phases.push(-a[0].arg() + 0.0);
    for x in &a[1..] {
        phases.push(FRAC_PI_2 - x.arg());
    }
    phases.push(FRAC_PI_2);
    CircuitSpec::new(n, couplers, phases)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Expectations {
    /// `<n_b - n_c>` at the outputs `b_{N-1}`, `c_{N-1}`.
    pub diff: f64,
    /// `<n_b + n_c>`.
    pub sum: f64,
}

/// Photon-number expectations at the monitored ports with `phi_N` overridden.
pub fn measure_expectations(
    spec: &CircuitSpec,
    state: &PhotonAmplitudes,
    phi_n: f64,
) -> Result<Expectations> {
    check_same_dim(spec.n, state.n())?;
    let spec = spec.with_phi_n(phi_n)?;
    let out = circuit_unitary(&spec) * state.amplitudes();
    let nb = out[spec.port_b()].norm_sqr();
    let nc = out[spec.port_c()].norm_sqr();
    Ok(Expectations {
        diff: nb - nc,
        sum: nb + nc,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Port {
    B,
    C,
}

impl std::str::FromStr for Port {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "b" | "B" => Ok(Port::B),
            "c" | "C" => Ok(Port::C),
            other => Err(Error::InvalidCircuit(format!(
                "unknown port {other:?}, expected b or c"
            ))),
        }
    }
}

/// Runs the circuit backwards from a photon injected at an output port.
/// With `phi_N = pi/2`, port b yields the `+1` and port c the `-1`
/// eigenstate of `L1` (up to global phase).
pub fn generate_from_circuit(spec: &CircuitSpec, port: Port) -> Result<PhotonAmplitudes> {
    let u = circuit_unitary(spec);
    let index = match port {
        Port::B => spec.port_b(),
        Port::C => spec.port_c(),
    };
    let column: DVector<Complex64> = u.row(index).transpose().map(|x| x.conj());
    PhotonAmplitudes::from_vector(column)
}

/// One element of the circuit in wiring order, for documentation export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "element", rename_all = "kebab-case")]
pub enum Stage {
    PhaseShifter {
        name: String,
        input: String,
        phi: f64,
    },
    Coupler {
        name: String,
        inputs: [String; 2],
        outputs: [String; 2],
        t: Complex64,
        r: Complex64,
    },
}

pub fn netlist(spec: &CircuitSpec) -> Vec<Stage> {
    let n = spec.n;
    let mut stages: Vec<Stage> = spec
        .phases
        .iter()
        .enumerate()
        .map(|(j, &phi)| Stage::PhaseShifter {
            name: format!("PS_{}", j + 1),
            input: format!("a_{}", j + 1),
            phi,
        })
        .collect();
    for (idx, dc) in spec.couplers.iter().enumerate() {
        let j = idx + 1;
        let first = if j == 1 {
            "a_1".to_string()
        } else {
            format!("b_{}", j - 1)
        };
        stages.push(Stage::Coupler {
            name: format!("DC_{j}"),
            inputs: [first, format!("a_{}", j + 1)],
            outputs: [format!("b_{j}"), format!("c_{j}")],
            t: dc.t,
            r: dc.r,
        });
    }
    debug_assert_eq!(stages.len(), 2 * n - 1);
    stages
}
