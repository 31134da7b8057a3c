use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "bandedge", version, about = "Probe transparency near a photonic band edge")]
pub struct Cli {
    /// TOML file with default values; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate chi(delta) over a detuning grid.
    Spectrum(SpectrumArgs),
    /// Integrate the amplitude equations in time.
    Dynamics(DynamicsArgs),
    /// Run the invariant suite and write a JSON report.
    Validate(ValidateArgs),
    /// Send a probe pulse through a slab of atoms.
    Propagate(PropagateArgs),
    /// Tabulate the density of modes near the edge.
    Dos(DosArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Iso,
    Aniso,
    Markov,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    /// CSV plus a matplotlib script next to it.
    Plot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureArg {
    #[value(name = "1b")]
    Fig1b,
    #[value(name = "2a")]
    Fig2a,
    #[value(name = "2b")]
    Fig2b,
    #[value(name = "2c")]
    Fig2c,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    #[value(name = "1")]
    First,
    #[value(name = "2")]
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Perturbative,
    Coupled,
}

/// Physical parameters shared by the subcommands.
#[derive(Debug, Clone, Default, Args)]
pub struct PhysicsArgs {
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    /// Background decay rate gamma.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Isotropic coupling beta (sets the unit of frequency).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Anisotropic coupling beta_a.
    #[arg(long)]
    pub beta_a: Option<f64>,
    /// Markovian decay rate gamma1.
    #[arg(long)]
    pub gamma1: Option<f64>,
    /// Band-edge detuning delta_g.
    #[arg(long, allow_negative_numbers = true)]
    pub delta_g: Option<f64>,
    /// Probe Rabi frequency Omega.
    #[arg(long)]
    pub omega_rabi: Option<f64>,
    /// Susceptibility prefactor.
    #[arg(long)]
    pub chi_prefactor: Option<f64>,
    /// omega/c in the propagation phase and group velocity.
    #[arg(long)]
    pub omega_over_c: Option<f64>,
    /// Real part of the anisotropic transform constant c_a.
    #[arg(long, allow_negative_numbers = true)]
    pub c_a_re: Option<f64>,
    /// Imaginary part of the anisotropic transform constant c_a.
    #[arg(long, allow_negative_numbers = true)]
    pub c_a_im: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutputArgs {
    /// Output file; stdout when omitted (csv format only).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub physics: PhysicsArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub delta_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta_max: Option<f64>,
    #[arg(long)]
    pub delta_step: Option<f64>,
    /// Parameter preset: 2a, 2b or 2c.
    #[arg(long, value_enum)]
    pub figure: Option<FigureArg>,
}

#[derive(Debug, Clone, Args)]
pub struct DynamicsArgs {
    #[command(flatten)]
    pub physics: PhysicsArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Probe detuning delta.
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// Time step h.
    #[arg(long)]
    pub step: Option<f64>,
    /// Final time T.
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long, value_enum)]
    pub order: Option<OrderArg>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Also invert the transform and report the agreement on stderr.
    #[arg(long)]
    pub cross_validate: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    /// Real part of a replacement anisotropic constant c_a.
    #[arg(long, allow_negative_numbers = true)]
    pub c_a_re: Option<f64>,
    /// Imaginary part of a replacement anisotropic constant c_a.
    #[arg(long, allow_negative_numbers = true)]
    pub c_a_im: Option<f64>,
    /// Report file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PropagateArgs {
    #[command(flatten)]
    pub physics: PhysicsArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Input pulse CSV (t,re_E,im_E,abs_E); a Gaussian is generated otherwise.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Carrier detuning delta_c (defaults to delta_g).
    #[arg(long, allow_negative_numbers = true)]
    pub carrier: Option<f64>,
    /// Spectral standard deviation of the generated Gaussian.
    #[arg(long)]
    pub bandwidth: Option<f64>,
    /// Number of samples of the generated pulse (power of two).
    #[arg(long)]
    pub samples: Option<usize>,
    /// Time step of the generated pulse.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Slab length L.
    #[arg(long)]
    pub length: Option<f64>,
    /// Lower end of the trusted detuning window.
    #[arg(long, allow_negative_numbers = true)]
    pub window_min: Option<f64>,
    /// Upper end of the trusted detuning window.
    #[arg(long, allow_negative_numbers = true)]
    pub window_max: Option<f64>,
    /// Transparency-window experiment: bandwidth 0.01 beta at delta_g with
    /// (omega/2c) L = 10, isotropic vs Markovian; writes a JSON report.
    #[arg(long)]
    pub figure_window: bool,
}

#[derive(Debug, Clone, Args)]
pub struct DosArgs {
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub x_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub x_step: Option<f64>,
    /// Preset 1b: isotropic density of modes on [-2, 4].
    #[arg(long, value_enum)]
    pub figure: Option<FigureArg>,
}
