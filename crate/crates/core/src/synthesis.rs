//! Searching chain couplings and a propagation distance that spread a photon
//! into a prescribed occupation profile, and the per-guide phase shifts that
//! turn the result into the canonical state.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::derive_seed;
use crate::error::{Error, Result};
use crate::evolution::evolve;
use crate::lattice::{chain_matrix, ChainSpec};
use crate::state::{check_same_dim, PhotonAmplitudes};
use crate::tolerance;

pub const DEFAULT_COUPLING_BOUNDS: (f64, f64) = (0.1, 3.0);
pub const DEFAULT_Z_BOUNDS: (f64, f64) = (0.1, 5.0);
pub const DEFAULT_STARTS: usize = 64;

/// Search specification. `input_mode` is 1-based, as in the JSON form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisProblem {
    pub n: usize,
    pub input_mode: usize,
    pub target_probs: Vec<f64>,
    #[serde(default = "default_coupling_bounds")]
    pub coupling_bounds: (f64, f64),
    #[serde(default = "default_z_bounds")]
    pub z_bounds: (f64, f64),
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_starts")]
    pub starts: usize,
}

fn default_coupling_bounds() -> (f64, f64) {
    DEFAULT_COUPLING_BOUNDS
}

fn default_z_bounds() -> (f64, f64) {
    DEFAULT_Z_BOUNDS
}

fn default_starts() -> usize {
    DEFAULT_STARTS
}

impl SynthesisProblem {
    /// Problem with default bounds, seed 0 and 64 starts.
    pub fn new(n: usize, input_mode: usize, target_probs: Vec<f64>) -> Self {
        Self {
            n,
            input_mode,
            target_probs,
            coupling_bounds: DEFAULT_COUPLING_BOUNDS,
            z_bounds: DEFAULT_Z_BOUNDS,
            seed: 0,
            starts: DEFAULT_STARTS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidProblem(msg));
        if self.n < 2 {
            return bad(format!("need at least 2 guides, got {}", self.n));
        }
        if self.input_mode < 1 || self.input_mode > self.n {
            return bad(format!(
                "input_mode {} outside 1..={}",
                self.input_mode, self.n
            ));
        }
        if self.target_probs.len() != self.n {
            return bad(format!(
                "expected {} target probabilities, got {}",
                self.n,
                self.target_probs.len()
            ));
        }
        if self.target_probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return bad("target probabilities must be finite and nonnegative".into());
        }
        let total: f64 = self.target_probs.iter().sum();
        if (total - 1.0).abs() > tolerance::NORM {
            return bad(format!("target probabilities sum to {total}"));
        }
        let (klo, khi) = self.coupling_bounds;
        if !(klo.is_finite() && khi.is_finite() && klo > 0.0 && klo <= khi) {
            return bad(format!(
                "coupling bounds ({klo}, {khi}) must satisfy 0 < lo <= hi"
            ));
        }
        let (zlo, zhi) = self.z_bounds;
        if !(zlo.is_finite() && zhi.is_finite() && zlo >= 0.0 && zlo <= zhi) {
            return bad(format!(
                "z bounds ({zlo}, {zhi}) must satisfy 0 <= lo <= hi"
            ));
        }
        if self.starts == 0 {
            return bad("at least one start is required".into());
        }
        Ok(())
    }

    fn lower(&self) -> Vec<f64> {
        let mut v = vec![self.coupling_bounds.0; self.n - 1];
        v.push(self.z_bounds.0);
        v
    }

    fn upper(&self) -> Vec<f64> {
        let mut v = vec![self.coupling_bounds.1; self.n - 1];
        v.push(self.z_bounds.1);
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisResult {
    pub couplings: Vec<f64>,
    pub z: f64,
    /// `max_j |p_j - target_j|` for the returned parameters.
    pub residual: f64,
    /// Whether `residual` is below the acceptance threshold.
    pub converged: bool,
    pub achieved_probs: Vec<f64>,
    pub achieved_state: PhotonAmplitudes,
}

/// Evolves the input photon through the chain and returns the state.
pub fn chain_output(couplings: &[f64], z: f64, input_mode: usize) -> Result<PhotonAmplitudes> {
    let spec = ChainSpec::new(couplings.to_vec())?;
    let input = PhotonAmplitudes::basis(spec.n, input_mode - 1)?;
    evolve(&chain_matrix(&spec), z, &input)
}

fn max_deviation(probs: &[f64], target: &[f64]) -> f64 {
    probs
        .iter()
        .zip(target)
        .map(|(p, t)| (p - t).abs())
        .fold(0.0, f64::max)
}

struct Objective<'a> {
    problem: &'a SynthesisProblem,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Objective<'_> {
    fn clamp(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(v, (lo, hi))| v.clamp(*lo, *hi))
            .collect()
    }

    fn residual(&self, x: &[f64]) -> f64 {
        let (couplings, z) = x.split_at(x.len() - 1);
        match chain_output(couplings, z[0], self.problem.input_mode) {
            Ok(state) => max_deviation(&state.probabilities(), &self.problem.target_probs),
            Err(_) => f64::INFINITY,
        }
    }

    /// Residual at the clamped point plus the distance outside the box.
    fn penalized(&self, x: &[f64]) -> f64 {
        let inside = self.clamp(x);
        let outside: f64 = x.iter().zip(&inside).map(|(a, b)| (a - b).abs()).sum();
        self.residual(&inside) + outside
    }
}

const NM_MAX_EVALS: usize = 4000;
const NM_RESTARTS: usize = 6;
const NM_FTOL: f64 = 1e-15;
const NM_INITIAL_STEP: f64 = 0.1;

/// Plain Nelder-Mead (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: &F,
    start: &[f64],
    steps: &[f64],
    max_evals: usize,
) -> (Vec<f64>, f64) {
    let dim = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((start.to_vec(), f(start)));
    for i in 0..dim {
        let mut p = start.to_vec();
        p[i] += steps[i];
        let v = f(&p);
        simplex.push((p, v));
    }
    let mut evals = dim + 1;
    let point = |base: &[f64], dir: &[f64], t: f64| -> Vec<f64> {
        base.iter().zip(dir).map(|(b, d)| b + t * (d - b)).collect()
    };
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        if worst - best <= NM_FTOL * best.abs().max(1e-300) || worst - best <= f64::MIN_POSITIVE {
            break;
        }
        let mut centroid = vec![0.0; dim];
        for (p, _) in &simplex[..dim] {
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x / dim as f64;
            }
        }
        let reflected = point(&centroid, &simplex[dim].0, -1.0);
        let fr = f(&reflected);
        evals += 1;
        if fr < best {
            let expanded = point(&centroid, &simplex[dim].0, -2.0);
            let fe = f(&expanded);
            evals += 1;
            simplex[dim] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
            continue;
        }
        if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
            continue;
        }
        let (contracted, fc) = if fr < worst {
            let p = point(&centroid, &reflected, 0.5);
            let v = f(&p);
            (p, v)
        } else {
            let p = point(&centroid, &simplex[dim].0, 0.5);
            let v = f(&p);
            (p, v)
        };
        evals += 1;
        if fc < worst.min(fr) {
            simplex[dim] = (contracted, fc);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for entry in simplex.iter_mut().skip(1) {
            let p = point(&anchor, &entry.0, 0.5);
            let v = f(&p);
            *entry = (p, v);
        }
        evals += dim;
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0)
}

fn local_search(objective: &Objective, start: Vec<f64>) -> (Vec<f64>, f64) {
    let steps: Vec<f64> = objective
        .lower
        .iter()
        .zip(&objective.upper)
        .map(|(lo, hi)| NM_INITIAL_STEP * (hi - lo).max(1e-3))
        .collect();
    let f = |x: &[f64]| objective.penalized(x);
    let (mut x, mut fx) = nelder_mead(&f, &start, &steps, NM_MAX_EVALS);
    // Restarting from the best vertex with a fresh simplex escapes collapsed simplices.
    for round in 0..NM_RESTARTS {
        if fx < 1e-15 {
            break;
        }
        let scale = 0.5f64.powi(round as i32 + 1);
        let restart_steps: Vec<f64> = steps.iter().map(|s| s * scale).collect();
        let (y, fy) = nelder_mead(&f, &x, &restart_steps, NM_MAX_EVALS);
        if fy < fx {
            x = y;
            fx = fy;
        }
    }
    let x = objective.clamp(&x);
    let fx = objective.residual(&x);
    (x, fx)
}

/// `true` if candidate `a` should be preferred over `b`: lower residual, then
/// (for residuals within 1e-12) smaller z, then smaller couplings.
fn prefer(a: &(Vec<f64>, f64), b: &(Vec<f64>, f64)) -> bool {
    const TIE: f64 = 1e-12;
    if (a.1 - b.1).abs() > TIE {
        return a.1 < b.1;
    }
    let za = a.0[a.0.len() - 1];
    let zb = b.0[b.0.len() - 1];
    if za != zb {
        return za < zb;
    }
    a.0[..a.0.len() - 1] < b.0[..b.0.len() - 1]
}

/// Multi-start simplex search. Starts run in parallel; the reduction is done
/// sequentially in start order, so the result depends only on the problem.
pub fn search_chain_parameters(problem: &SynthesisProblem) -> Result<SynthesisResult> {
    problem.validate()?;
    let objective = Objective {
        problem,
        lower: problem.lower(),
        upper: problem.upper(),
    };
    let candidates: Vec<(Vec<f64>, f64)> = (0..problem.starts as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(problem.seed, i));
            let start: Vec<f64> = objective
                .lower
                .iter()
                .zip(&objective.upper)
                .map(|(&lo, &hi)| {
                    if lo < hi {
                        rng.random_range(lo..=hi)
                    } else {
                        lo
                    }
                })
                .collect();
            local_search(&objective, start)
        })
        .collect();
    let mut best = &candidates[0];
    for c in &candidates[1..] {
        if prefer(c, best) {
            best = c;
        }
    }
    let (couplings, z) = best.0.split_at(best.0.len() - 1);
    let achieved_state = chain_output(couplings, z[0], problem.input_mode)?;
    let achieved_probs = achieved_state.probabilities();
    let residual = max_deviation(&achieved_probs, &problem.target_probs);
    Ok(SynthesisResult {
        couplings: couplings.to_vec(),
        z: z[0],
        residual,
        converged: residual < tolerance::SYNTHESIS_RESIDUAL,
        achieved_probs,
        achieved_state,
    })
}

fn wrap_phase(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Angles `theta_j` with `e^{i theta_j} state_j = e^{i gamma} target_j`,
/// normalized so the last guide needs no shift. Angles lie in `(-pi, pi]`.
pub fn phase_corrections(state: &PhotonAmplitudes, target: &PhotonAmplitudes) -> Result<Vec<f64>> {
    phase_corrections_with_tolerance(state, target, tolerance::PHASE_MAGNITUDE)
}

pub fn phase_corrections_with_tolerance(
    state: &PhotonAmplitudes,
    target: &PhotonAmplitudes,
    magnitude_tolerance: f64,
) -> Result<Vec<f64>> {
    check_same_dim(state.n(), target.n())?;
    let n = state.n();
    for j in 0..n {
        let (s, t) = (state.amplitude(j).norm(), target.amplitude(j).norm());
        if (s - t).abs() > magnitude_tolerance {
            return Err(Error::MagnitudeMismatch {
                mode: j,
                expected: t,
                found: s,
            });
        }
    }
    let occupied = |j: usize| state.amplitude(j).norm() > tolerance::ZERO_AMPLITUDE;
    let raw = |j: usize| target.amplitude(j).arg() - state.amplitude(j).arg();
    let reference = (0..n)
        .rev()
        .find(|&j| occupied(j))
        .ok_or(Error::ZeroVector)?;
    let gamma = raw(reference);
    Ok((0..n)
        .map(|j| {
            if occupied(j) {
                wrap_phase(raw(j) - gamma)
            } else {
                0.0
            }
        })
        .collect())
}
