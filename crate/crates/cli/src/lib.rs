//! Command-line front end for the `bohmtrap` library: configuration
//! parsing, deterministic CSV output and figure-reproduction recipes.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod recipes;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use config::{parse_config, AlphaSpec, RunConfig};
pub use error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "bohmtrap", version, about = "Moving-wall trap states, quantum effective forces and Bohmian trajectories")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ZeroKind {
    Cylinder,
    Spherical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodChoice {
    All,
    ClosedForm,
    Surface,
    Potential,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Positive zeros of J_m or j_l (columns order,n,zero).
    Zeros {
        #[arg(long, value_enum)]
        kind: ZeroKind,
        #[arg(long)]
        order: u32,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// ψ, its gradient and density at one point, as JSON.
    State {
        #[arg(long)]
        config: PathBuf,
        /// `r,theta,phi,t` (sphere), `rho,phi,t` (disc) or `rho,phi,z,t` (cylinder).
        #[arg(long, allow_hyphen_values = true)]
        probe: String,
    },
    /// Expansion coefficients of an initial eigenstate (columns nprime,re,im,abs2).
    Expand {
        #[arg(long)]
        geometry: String,
        /// Mode labels: `m,n`, `m,n,k` or `l,n,m`.
        #[arg(long, allow_hyphen_values = true)]
        mode: String,
        /// A number or a multiple of the mode's reference, e.g. `0.5*alpha_ref`.
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        /// Initial box radius as a fraction of a.
        #[arg(long = "as", default_value_t = 1.0)]
        small_radius_ratio: f64,
        #[arg(long, default_value_t = 40)]
        n_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Quantum effective force along a fixed direction (columns t,method,value).
    Force {
        #[arg(long)]
        config: PathBuf,
        /// `r,THETA0,PHI0`, `theta,THETA0,PHI0`, `phi,THETA0,PHI0` (sphere),
        /// `rho,PHI0`, `phi,PHI0` (disc, cylinder) or `z`.
        #[arg(long, allow_hyphen_values = true)]
        direction: String,
        /// `t0:t1:steps`.
        #[arg(long)]
        times: String,
        #[arg(long, value_enum, default_value_t = MethodChoice::All)]
        method: MethodChoice,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One Bohmian trajectory (columns t,r,theta,phi,L; z added for the cylinder).
    Traj {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        r0: f64,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
        theta0: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        phi0: f64,
        /// Axial start for the cylinder; defaults to mid-height.
        #[arg(long)]
        z0: Option<f64>,
        #[arg(long)]
        tend: f64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Born-distributed trajectory ensemble (columns traj,t,r,theta,phi,L).
    Ensemble {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        count: usize,
        /// Overrides the configured seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        tend: f64,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Radial two-particle trajectories in the sphere (columns t,r1,r2,sep).
    Twobody {
        #[arg(long)]
        stats: String,
        /// A number or a multiple of alpha_01 = pi/2, e.g. `-0.5*alpha_ref`.
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long)]
        r10: f64,
        #[arg(long)]
        r20: f64,
        #[arg(long)]
        tend: f64,
        #[arg(long, default_value_t = 40)]
        n_max: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Separation moments for all three statistics (columns stats,t,mean,rms).
    Moments {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long)]
        tend: f64,
        #[arg(long, default_value_t = 40)]
        steps: usize,
        #[arg(long, default_value_t = 40)]
        n_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finite-difference propagation of the configured eigenstate (columns t,y,r,abs).
    Oracle {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        dy: f64,
        /// Step in the rescaled time a t/L(t).
        #[arg(long, default_value_t = 1e-4)]
        dt: f64,
        #[arg(long)]
        tend: f64,
        /// Number of stored time slices.
        #[arg(long, default_value_t = 10)]
        slices: usize,
        /// Grid points written per slice.
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Figure-reproduction recipe: fig1a..fig1d, fig2a..fig2d, fig3, fig4,
    /// fig5, the groups fig1 and fig2, or all.
    Recipe {
        name: String,
        #[arg(long, default_value = "recipes")]
        out_dir: PathBuf,
    },
}

/// Runs one parsed command line.
pub fn run(cli: Cli) -> Result<()> {
    use commands::*;
    match cli.command {
        Command::Zeros { kind, order, count, out } => zeros(kind, order, count, out.as_deref()),
        Command::State { config, probe } => state(&load(&config)?, &probe),
        Command::Expand { geometry, mode, alpha, small_radius_ratio, n_max, out } => {
            expand(&geometry, &mode, &alpha, small_radius_ratio, n_max, out.as_deref())
        }
        Command::Force { config, direction, times, method, out } => force(&load(&config)?, &direction, &times, method, out.as_deref()),
        Command::Traj { config, r0, theta0, phi0, z0, tend, samples, out } => {
            traj(&load(&config)?, TrajStart { r0, theta0, phi0, z0 }, tend, samples, out.as_deref())
        }
        Command::Ensemble { config, count, seed, tend, samples, out } => ensemble(&load(&config)?, count, seed, tend, samples, out.as_deref()),
        Command::Twobody { stats, alpha, r10, r20, tend, n_max, samples, out } => {
            twobody(&stats, &alpha, (r10, r20), tend, n_max, samples, out.as_deref())
        }
        Command::Moments { alpha, tend, steps, n_max, out } => moments(&alpha, tend, steps, n_max, out.as_deref()),
        Command::Oracle { config, dy, dt, tend, slices, points, out } => oracle(&load(&config)?, OracleGrid { dy, dt, slices, points }, tend, out.as_deref()),
        Command::Recipe { name, out_dir } => recipes::run_recipe(&name, &out_dir).map(|manifests| {
            for m in manifests {
                println!("{}", m.display());
            }
        }),
    }
}

fn load(path: &std::path::Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    parse_config(&text)
}
