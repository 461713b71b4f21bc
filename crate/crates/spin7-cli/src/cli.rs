use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "spin7", version, about = "Cohomogeneity-one Spin(7) metrics: flows, classification, checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

/// Flags shared by every subcommand. Unset flags fall back to `--config`.
#[derive(Debug, Default, Args)]
pub struct Common {
    /// Metric family: A8, B8, BryantSalamon or G2xS1.
    #[arg(long, global = true)]
    pub family: Option<String>,
    /// Constant `k` of the z chart.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub k: Option<f64>,
    /// Constant `κ` of the y chart.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    /// Family scale (`ℓ`, `ℓ̃`, `r₀`), or `c₀` for the general solution.
    #[arg(long, global = true)]
    pub scale: Option<f64>,
    #[arg(long = "r-min", global = true)]
    pub r_min: Option<f64>,
    #[arg(long = "r-max", global = true)]
    pub r_max: Option<f64>,
    /// Acceptance tolerance for residual columns.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output file; relative paths resolve against `SPIN7_OUT_DIR` when set.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Emit JSON instead of text where both exist.
    #[arg(long, global = true)]
    pub json: bool,
    /// TOML file with defaults for the flags above (flags win).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Number of sample points.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Run the checks against the sign-flipped first-order system.
    #[arg(long = "sign-flip", global = true)]
    pub sign_flip: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the first-order flow and write the trajectory as CSV.
    Flow(FlowArgs),
    /// Classify the general solution for a given `k` or `κ` (JSON).
    Classify,
    /// Sample metric coefficients (CSV).
    Metric,
    /// Run one group of acceptance checks.
    Verify {
        #[arg(value_enum)]
        what: VerifyTarget,
    },
    /// L² norm of a harmonic 4-form, optionally with its radial profile.
    Harmonic(HarmonicArgs),
    /// Phase-plane vector field and sample trajectories (CSV).
    PhasePortrait(PhaseArgs),
    /// Full acceptance dossier.
    Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyTarget {
    Ricci,
    Holonomy,
    Cayley,
    Superpotential,
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    /// Initial `a` (with `--b`, `--c`), instead of a family.
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
    /// Length of the integration interval in `t`.
    #[arg(long = "t-end")]
    pub t_end: Option<f64>,
}

#[derive(Debug, Args)]
pub struct HarmonicArgs {
    /// self-dual or anti-self-dual.
    #[arg(long, default_value = "self-dual")]
    pub duality: String,
}

#[derive(Debug, Args)]
pub struct PhaseArgs {
    #[arg(long = "z-min", allow_negative_numbers = true)]
    pub z_min: Option<f64>,
    #[arg(long = "z-max", allow_negative_numbers = true)]
    pub z_max: Option<f64>,
    #[arg(long = "v-min", allow_negative_numbers = true)]
    pub v_min: Option<f64>,
    #[arg(long = "v-max", allow_negative_numbers = true)]
    pub v_max: Option<f64>,
    #[arg(long)]
    pub nz: Option<usize>,
    #[arg(long)]
    pub nv: Option<usize>,
    /// Where to write the trajectories; defaults to `<out stem>.trajectories.csv`.
    #[arg(long)]
    pub trajectories: Option<PathBuf>,
}
