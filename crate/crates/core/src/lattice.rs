//! Coupling matrices for planar chains and for rings of waveguides around a
//! central guide, plus the analytic ring solution and its geometry.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::CouplingMatrix;

/// Planar array of `n` identical guides with nearest-neighbour couplings (cm⁻¹).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChain")]
pub struct ChainSpec {
    pub n: usize,
    pub couplings: Vec<f64>,
    /// Diagonal term; only a global phase for identical guides.
    #[serde(default)]
    pub propagation_constant: f64,
}

#[derive(Deserialize)]
struct RawChain {
    n: usize,
    couplings: Vec<f64>,
    #[serde(default)]
    propagation_constant: f64,
}

impl TryFrom<RawChain> for ChainSpec {
    type Error = Error;

    fn try_from(raw: RawChain) -> Result<Self> {
        ChainSpec::with_propagation_constant(raw.couplings, raw.propagation_constant).and_then(
            |spec| {
                if spec.n == raw.n {
                    Ok(spec)
                } else {
                    Err(Error::InvalidLattice(format!(
                        "chain with n = {} needs {} couplings, got {}",
                        raw.n,
                        raw.n.saturating_sub(1),
                        spec.couplings.len()
                    )))
                }
            },
        )
    }
}

impl ChainSpec {
    pub fn new(couplings: Vec<f64>) -> Result<Self> {
        Self::with_propagation_constant(couplings, 0.0)
    }

    pub fn with_propagation_constant(
        couplings: Vec<f64>,
        propagation_constant: f64,
    ) -> Result<Self> {
        if couplings.is_empty() {
            return Err(Error::InvalidLattice(
                "a chain needs at least 2 guides".into(),
            ));
        }
        if let Some(k) = couplings.iter().find(|k| !(k.is_finite() && **k > 0.0)) {
            return Err(Error::InvalidLattice(format!(
                "chain couplings must be positive and finite, got {k}"
            )));
        }
        if !propagation_constant.is_finite() {
            return Err(Error::InvalidLattice(
                "propagation constant must be finite".into(),
            ));
        }
        Ok(Self {
            n: couplings.len() + 1,
            couplings,
            propagation_constant,
        })
    }
}

/// `n_ring` guides on a ring around a central guide: hub coupling `kappa`,
/// nearest-neighbour ring coupling `c` (both cm⁻¹).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRing")]
pub struct RingSpec {
    pub n_ring: usize,
    pub kappa: f64,
    pub c: f64,
}

#[derive(Deserialize)]
struct RawRing {
    n_ring: usize,
    kappa: f64,
    c: f64,
}

impl TryFrom<RawRing> for RingSpec {
    type Error = Error;

    fn try_from(raw: RawRing) -> Result<Self> {
        RingSpec::new(raw.n_ring, raw.kappa, raw.c)
    }
}

impl RingSpec {
    pub fn new(n_ring: usize, kappa: f64, c: f64) -> Result<Self> {
        if n_ring < 3 {
            return Err(Error::InvalidLattice(format!(
                "a ring needs at least 3 surrounding guides, got {n_ring}"
            )));
        }
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::InvalidLattice(format!(
                "kappa must be positive, got {kappa}"
            )));
        }
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::InvalidLattice(format!(
                "c must be non-negative, got {c}"
            )));
        }
        Ok(Self { n_ring, kappa, c })
    }

    /// Ring coupling `c` with `kappa = c / sqrt(n_ring)`, so that `N kappa^2 = C^2`.
    pub fn resonant(n_ring: usize, c: f64) -> Result<Self> {
        Self::new(n_ring, c / (n_ring as f64).sqrt(), c)
    }

    /// Index of the central guide (0-based, after the ring guides).
    pub fn hub(&self) -> usize {
        self.n_ring
    }

    pub fn dim(&self) -> usize {
        self.n_ring + 1
    }
}

/// Either lattice, tagged by `"type"` in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Lattice {
    Chain(ChainSpec),
    Ring(RingSpec),
}

impl Lattice {
    pub fn coupling_matrix(&self) -> CouplingMatrix {
        match self {
            Lattice::Chain(spec) => chain_matrix(spec),
            Lattice::Ring(spec) => ring_matrix(spec),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Lattice::Chain(spec) => spec.n,
            Lattice::Ring(spec) => spec.dim(),
        }
    }

    /// Where a photon is launched by default: the first guide of a chain, the hub of a ring.
    pub fn default_input(&self) -> usize {
        match self {
            Lattice::Chain(_) => 0,
            Lattice::Ring(spec) => spec.hub(),
        }
    }
}

fn real_coupling(matrix: DMatrix<f64>) -> CouplingMatrix {
    CouplingMatrix::from_real(matrix).expect("lattice matrices are symmetric by construction")
}

/// Tridiagonal `M` with `k_{j,j+1}` off the diagonal.
pub fn chain_matrix(spec: &ChainSpec) -> CouplingMatrix {
    let n = spec.n;
    let mut m = DMatrix::from_diagonal_element(n, n, spec.propagation_constant);
    for (j, &k) in spec.couplings.iter().enumerate() {
        m[(j, j + 1)] = k;
        m[(j + 1, j)] = k;
    }
    real_coupling(m)
}

/// `(N+1)x(N+1)` matrix; the hub is the last index.
pub fn ring_matrix(spec: &RingSpec) -> CouplingMatrix {
    let n = spec.n_ring;
    let hub = spec.hub();
    let mut m = DMatrix::zeros(n + 1, n + 1);
    for j in 0..n {
        m[(j, hub)] = spec.kappa;
        m[(hub, j)] = spec.kappa;
        let next = (j + 1) % n;
        m[(j, next)] = spec.c;
        m[(next, j)] = spec.c;
    }
    real_coupling(m)
}

/// Dimensionless ring geometry that realizes `N kappa^2 = C^2` when the
/// couplings decay as `k exp(-distance / d0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingGeometry {
    pub n_ring: usize,
    pub r_over_d0: f64,
    pub a_over_d0: f64,
    pub kappa_over_k: f64,
    pub c_over_k: f64,
}

impl RingGeometry {
    /// Couplings for a characteristic strength `k`.
    pub fn ring_spec(&self, k: f64) -> Result<RingSpec> {
        RingSpec::new(self.n_ring, self.kappa_over_k * k, self.c_over_k * k)
    }
}

/// Geometry for `7 <= n_ring <= 12`.
pub fn ring_geometry(n_ring: usize) -> Result<RingGeometry> {
    if n_ring > 12 {
        return Err(Error::SecondNeighborCoupling { n_ring });
    }
    ring_geometry_unbounded(n_ring)
}

/// Like [`ring_geometry`] but accepts rings beyond 12 guides, where the
/// nearest-neighbour model itself no longer holds.
pub fn ring_geometry_unbounded(n_ring: usize) -> Result<RingGeometry> {
    if n_ring <= 6 {
        return Err(Error::GeometryInfeasible { n_ring });
    }
    let n = n_ring as f64;
    let chord = (PI / n).sin();
    let r_over_d0 = n.sqrt().ln() / (1.0 - 2.0 * chord);
    let a_over_d0 = 2.0 * r_over_d0 * chord;
    Ok(RingGeometry {
        n_ring,
        r_over_d0,
        a_over_d0,
        kappa_over_k: (-r_over_d0).exp(),
        c_over_k: (-a_over_d0).exp(),
    })
}

/// Coefficients of the hub creation operator after propagating `z`, in terms
/// of the initial creation operators: `a_hub†(z) = central a_hub†(0) +
/// surrounding * sum_j a_j†(0)`.
///
/// These are entries of `exp(-izM)`. The amplitudes of the state launched in
/// the hub are their complex conjugates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingCoefficients {
    pub central: Complex64,
    pub surrounding: Complex64,
}

impl RingCoefficients {
    pub fn central_probability(&self) -> f64 {
        self.central.norm_sqr()
    }

    pub fn surrounding_probability(&self) -> f64 {
        self.surrounding.norm_sqr()
    }
}

pub fn ring_central_amplitude(spec: &RingSpec, z: f64) -> RingCoefficients {
    let n = spec.n_ring as f64;
    let omega = (spec.c * spec.c + n * spec.kappa * spec.kappa).sqrt();
    let (sin, cos) = (omega * z).sin_cos();
    let envelope = Complex64::from_polar(1.0, -spec.c * z);
    RingCoefficients {
        central: envelope * Complex64::new(cos, spec.c / omega * sin),
        surrounding: envelope * Complex64::new(0.0, -spec.kappa / omega * sin),
    }
}

/// Distance where the hub probability first reaches 1/2 for odd `order`:
/// `z = order * pi / (2 sqrt 2 c)` on a resonant ring.
pub fn w_prime_distance(c: f64, order: u32) -> Result<f64> {
    if order.is_multiple_of(2) {
        return Err(Error::EvenOrder(order));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidLattice(format!(
            "ring coupling must be positive, got {c}"
        )));
    }
    Ok(order as f64 * PI / (2.0 * 2f64.sqrt() * c))
}
