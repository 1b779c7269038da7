use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use wstate::circuit::{
    design_circuit, generate_from_circuit, measure_expectations, netlist, CircuitSpec, Port,
};
use wstate::entanglement::{auto_detect, single_photon_condition};
use wstate::evolution::{linspace, probability_trace};
use wstate::fock::{run_batch, write_batch_csv, BatchConfig};
use wstate::lattice::{ring_geometry, ring_geometry_unbounded, Lattice};
use wstate::synthesis::{search_chain_parameters, SynthesisProblem};
use wstate::{evolve, AlphaVector, Complex64, PhotonAmplitudes};

#[derive(Parser)]
#[command(
    name = "wstate",
    version,
    about = "Single-photon W-state synthesis and entanglement checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate a photon through a lattice and write the output state as JSON.
    Evolve {
        lattice: PathBuf,
        #[arg(long)]
        z: f64,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write occupation probabilities on a uniform z grid as CSV.
    Trace {
        lattice: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        z_min: f64,
        #[arg(long)]
        z_max: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search chain couplings and distance for a target probability profile.
    Synthesize {
        problem: PathBuf,
        /// Overrides the seed in the problem file.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dimensionless geometry of a resonant ring of N guides around a hub.
    RingGeometry {
        n: usize,
        /// Accept rings with more than 12 guides.
        #[arg(long)]
        allow_second_neighbor: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the single-photon entanglement test on a state.
    Verify {
        state: PathBuf,
        /// Alpha vector to test against; chosen from the state when omitted.
        #[arg(long)]
        alphas: Option<PathBuf>,
        /// Normalize the amplitudes instead of rejecting an unnormalized state.
        #[arg(long)]
        renormalize: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Coupler and phase settings whose circuit realizes an alpha vector.
    CircuitDesign {
        alphas: PathBuf,
        /// Also write the ordered stage list.
        #[arg(long)]
        netlist: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Photon-number difference and sum at the monitored outputs.
    CircuitMeasure {
        spec: PathBuf,
        state: PathBuf,
        #[arg(long)]
        phi_n: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// State prepared by injecting a photon backwards at an output port.
    CircuitGenerate {
        spec: PathBuf,
        #[arg(long)]
        port: Port,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the separability bound on random product Fock states; writes CSV.
    OracleSuite {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, value_delimiter = ',', default_values_t = vec![3, 4, 5])]
        modes: Vec<usize>,
        #[arg(long, default_value_t = 2)]
        cutoff: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
#[group(multiple = false)]
struct InputArgs {
    /// 1-based guide receiving the photon (default: first chain guide or ring hub).
    #[arg(long)]
    input_mode: Option<usize>,
    /// Initial state JSON instead of a single guide.
    #[arg(long)]
    state: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: {source}")]
    Parse {
        path: String,
        source: serde_json::Error,
    },
    #[error("{0}")]
    Domain(#[from] wstate::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Io { .. } | CliError::Parse { .. } => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Parse {
        path: path.display().to_string(),
        source,
    })
}

fn output(out: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    let label = out.map_or_else(|| "<stdout>".to_string(), |p| p.display().to_string());
    let io_err = |source| CliError::Io {
        path: label.clone(),
        source,
    };
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
            write(&mut w).and_then(|_| w.flush()).map_err(io_err)
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write(&mut w).and_then(|_| w.flush()).map_err(io_err)
        }
    }
}

fn write_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    output(out, |w| {
        serde_json::to_writer_pretty(&mut *w, value).map_err(io::Error::from)?;
        writeln!(w)
    })
}

/// State file accepted without the unit-norm check.
#[derive(Deserialize)]
struct LooseState {
    n: usize,
    amplitudes: Vec<Complex64>,
}

fn read_state(path: &Path, renormalize: bool) -> Result<PhotonAmplitudes> {
    if !renormalize {
        return read_json(path);
    }
    let loose: LooseState = read_json(path)?;
    if loose.n != loose.amplitudes.len() {
        return Err(wstate::Error::DimensionMismatch {
            expected: loose.n,
            found: loose.amplitudes.len(),
        }
        .into());
    }
    Ok(PhotonAmplitudes::normalized(loose.amplitudes)?)
}

fn initial_state(lattice: &Lattice, input: &InputArgs) -> Result<PhotonAmplitudes> {
    if let Some(path) = &input.state {
        return read_json(path);
    }
    let mode = match input.input_mode {
        Some(0) => {
            return Err(
                wstate::Error::InvalidDimension("input modes are numbered from 1".into()).into(),
            );
        }
        Some(j) => j - 1,
        None => lattice.default_input(),
    };
    Ok(PhotonAmplitudes::basis(lattice.dim(), mode)?)
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Evolve {
            lattice,
            z,
            input,
            out,
        } => {
            let lattice: Lattice = read_json(&lattice)?;
            let state = initial_state(&lattice, &input)?;
            let result = evolve(&lattice.coupling_matrix(), z, &state)?;
            write_json(out.as_deref(), &result)
        }
        Command::Trace {
            lattice,
            z_min,
            z_max,
            points,
            input,
            out,
        } => {
            let lattice: Lattice = read_json(&lattice)?;
            let state = initial_state(&lattice, &input)?;
            if points == 0 || !z_min.is_finite() || !z_max.is_finite() || z_min > z_max {
                return Err(wstate::Error::InvalidDimension(format!(
                    "need points >= 1 and z_min <= z_max, got {points} points on [{z_min}, {z_max}]"
                ))
                .into());
            }
            let trace = probability_trace(
                &lattice.coupling_matrix(),
                &state,
                &linspace(z_min, z_max, points),
            )?;
            output(out.as_deref(), |w| trace.write_csv(w))
        }
        Command::Synthesize { problem, seed, out } => {
            let mut problem: SynthesisProblem = read_json(&problem)?;
            if let Some(seed) = seed {
                problem.seed = seed;
            }
            let result = search_chain_parameters(&problem)?;
            if !result.converged {
                eprintln!(
                    "warning: best residual {:e} did not reach the target",
                    result.residual
                );
            }
            write_json(out.as_deref(), &result)
        }
        Command::RingGeometry {
            n,
            allow_second_neighbor,
            out,
        } => {
            let geometry = if allow_second_neighbor {
                ring_geometry_unbounded(n)?
            } else {
                ring_geometry(n)?
            };
            write_json(out.as_deref(), &geometry)
        }
        Command::Verify {
            state,
            alphas,
            renormalize,
            out,
        } => {
            let state = read_state(&state, renormalize)?;
            let report = match alphas {
                Some(path) => {
                    let alphas: AlphaVector = read_json(&path)?;
                    single_photon_condition(&state, &alphas)?
                }
                None => auto_detect(&state)?,
            };
            write_json(out.as_deref(), &report)
        }
        Command::CircuitDesign {
            alphas,
            netlist: netlist_path,
            out,
        } => {
            let alphas: AlphaVector = read_json(&alphas)?;
            let spec = design_circuit(&alphas)?;
            if let Some(path) = netlist_path {
                write_json(Some(&path), &netlist(&spec))?;
            }
            write_json(out.as_deref(), &spec)
        }
        Command::CircuitMeasure {
            spec,
            state,
            phi_n,
            out,
        } => {
            let spec: CircuitSpec = read_json(&spec)?;
            let state: PhotonAmplitudes = read_json(&state)?;
            write_json(out.as_deref(), &measure_expectations(&spec, &state, phi_n)?)
        }
        Command::CircuitGenerate { spec, port, out } => {
            let spec: CircuitSpec = read_json(&spec)?;
            write_json(out.as_deref(), &generate_from_circuit(&spec, port)?)
        }
        Command::OracleSuite {
            samples,
            modes,
            cutoff,
            seed,
            out,
        } => {
            let records = run_batch(&BatchConfig {
                samples,
                modes,
                cutoff,
                seed,
            })?;
            let violations = records.iter().filter(|r| r.check.violates).count();
            output(out.as_deref(), |w| write_batch_csv(&records, w))?;
            eprintln!(
                "{violations} of {} product states violate the bound",
                records.len()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let kind = match err {
                CliError::Domain(_) => "error",
                CliError::Parse { .. } => "parse error",
                CliError::Io { .. } => "i/o error",
            };
            eprintln!("wstate: {kind}: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
