use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("cannot normalize a zero vector")]
    ZeroVector,

    #[error("alpha coefficient {index} is zero")]
    ZeroAlpha { index: usize },

    #[error("alpha vector is not normalized (sum of squared magnitudes {norm_sqr})")]
    AlphaNotNormalized { norm_sqr: f64 },

    #[error("state is not genuinely entangled in the W decomposition: last-mode probability {last_mode_probability}")]
    NotGenuinelyEntangled { last_mode_probability: f64 },

    #[error("mode {mode} has zero amplitude, so its alpha coefficient would vanish")]
    ZeroAmplitude { mode: usize },

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("invalid propagation distance {0}")]
    InvalidDistance(f64),

    #[error("ring geometry infeasible for {n_ring} surrounding waveguides (requires more than 6)")]
    GeometryInfeasible { n_ring: usize },

    #[error("ring with {n_ring} surrounding waveguides has non-negligible second-neighbour coupling (limit 12)")]
    SecondNeighborCoupling { n_ring: usize },

    #[error("resonance order must be a positive odd integer, got {0}")]
    EvenOrder(u32),

    #[error("mode {mode}: magnitude {found} differs from target magnitude {expected}; not a pure phase correction")]
    MagnitudeMismatch {
        mode: usize,
        expected: f64,
        found: f64,
    },

    #[error("invalid synthesis problem: {0}")]
    InvalidProblem(String),

    #[error("invalid directional coupler: {0}")]
    InvalidCoupler(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("Fock basis of {size} states exceeds the limit of {limit}")]
    BasisTooLarge { size: usize, limit: usize },

    #[error("Fock state has amplitude {weight:e} in the top occupation shell; truncated ladder operators would bias the result")]
    TruncationLeak { weight: f64 },
}
