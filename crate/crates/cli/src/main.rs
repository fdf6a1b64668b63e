//! `minent`: command-line front end for minent-core.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "minent",
    version,
    about = "Minimal entropy of geodesic flows: entropy estimators, S¹-collapse families and the \
             classification of simply connected 4- and 5-manifolds with zero minimal entropy"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Report format; csv is available for sweeps and arc lists.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Exit with status 3 when the report carries non-convergence warnings.
    #[arg(long, global = true)]
    pub strict: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Topological entropy h_top of the geodesic flow and its volume-entropy and curvature brackets.
    #[command(subcommand)]
    Entropy(EntropyCommand),
    /// Volume and curvature of the collapsing family g_δ, the quotient of (M × S¹, g + δ dt²) by a circle action.
    CollapseSweep(CollapseArgs),
    /// Projection bound (det I)² ≥ 4^{-l}(det F̃)^{4l} and quotient volume bound of the multi-step collapse lemma on random instances.
    #[command(name = "lemma61-check")]
    Lemma61Check(LemmaArgs),
    /// Betti numbers of Tor_{C*(ΩM)}(k, k) for simply connected 5-manifolds and their polynomial or exponential growth (rational and mod-p ellipticity).
    TorGrowth(TorArgs),
    /// Minimal-entropy decision for a connected sum of S4, CP2, CP2bar, S2xS2 and K3, or realizability of an even intersection form.
    Classify4(Classify4Args),
    /// Minimal-entropy decision for a simply connected 5-manifold given by H2 and the Barden index i.
    Classify5(Classify5Args),
    /// Weights of the Brieskorn singularity x^a0 + y^a1 + z^a2 + w^a3 whose link carries a circle action.
    Brieskorn(BrieskornArgs),
    /// The chain c(n)‖M‖ ≤ λⁿ ≤ h_topⁿ ≤ (n-1)ⁿ MinVol between simplicial volume, volume entropy, topological entropy and minimal volume.
    ChainCheck(ChainArgs),
    /// Geodesic arcs between two points and the Mañé count n_T(p, q).
    Arcs(ArcsArgs),
}

#[derive(Subcommand, Debug)]
pub enum EntropyCommand {
    /// Mañé's estimate: exponential growth rate of the averaged arc count n_T(p, q).
    Mane(ManeArgs),
    /// Separated-set estimate: growth of maximal (T, ε)-separated sets of orbit segments.
    Separated(SeparatedArgs),
    /// Volume entropy λ of the universal cover with the curvature upper bounds on h_top.
    Volume(VolumeArgs),
}

#[derive(Args, Debug)]
pub struct ManeArgs {
    /// Metric spec: sphere:r=1, torus:a,b, hyperbolic:genus2-octagon, product:(A)x(B).
    #[arg(long)]
    pub metric: String,
    #[arg(long = "Tmax", default_value_t = 20.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of endpoint pairs averaged.
    #[arg(long, default_value_t = 16)]
    pub pairs: usize,
    /// Number of horizons in the T-grid.
    #[arg(long, default_value_t = 16)]
    pub grid: usize,
    /// Angular resolution for shooting.
    #[arg(long, default_value_t = 720)]
    pub resolution: usize,
    /// Largest acceptable RMS residual of the growth fit.
    #[arg(long, default_value_t = 0.25)]
    pub residual_threshold: f64,
    /// Slack allowed outside the [λ, upper] bracket before warning.
    #[arg(long, default_value_t = 0.05)]
    pub bracket_tolerance: f64,
}

#[derive(Args, Debug)]
pub struct SeparatedArgs {
    /// Metric spec: sphere:r=1, torus:a,b, hyperbolic:genus2-octagon, product:(A)x(B).
    #[arg(long)]
    pub metric: String,
    #[arg(long = "Tmax", default_value_t = 5.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Flow speed c, running φ_{ct}.
    #[arg(long, default_value_t = 1.0)]
    pub speed: f64,
    #[arg(long, default_value_t = 100)]
    pub checkpoints: usize,
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
}

#[derive(Args, Debug)]
pub struct VolumeArgs {
    /// Metric spec: sphere:r=1, torus:a,b, hyperbolic:genus2-octagon, product:(A)x(B).
    #[arg(long)]
    pub metric: String,
    /// Curvature sample points per axis.
    #[arg(long, default_value_t = 5)]
    pub per_axis: usize,
}

#[derive(Args, Debug)]
pub struct CollapseArgs {
    /// Base metric: sphere:r=R (rotation about the polar axis) or torus:a,b (translation).
    #[arg(long, default_value = "sphere:r=1")]
    pub metric: String,
    /// Translation direction d for a torus base; 2πd must be a lattice vector.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub direction: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', default_value = "1e-4,1e-3,1e-2,1e-1,1")]
    pub deltas: Vec<f64>,
    /// Curvature is sampled at distance ≥ ρ from the fixed set.
    #[arg(long, default_value_t = 0.1)]
    pub rho: f64,
    /// Curvature sample points per axis.
    #[arg(long, default_value_t = 8)]
    pub per_axis: usize,
    /// Gauss-Legendre nodes per panel.
    #[arg(long, default_value_t = 8)]
    pub order: usize,
    #[arg(long, default_value_t = 16)]
    pub panels: usize,
}

#[derive(Args, Debug)]
pub struct LemmaArgs {
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Largest dimension l of V₁ and V₂.
    #[arg(long, default_value_t = 5)]
    pub max_l: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct TorArgs {
    /// dim H²(M; k) for a single field.
    #[arg(long, conflicts_with_all = ["h2", "fields"])]
    pub a: Option<u64>,
    /// H2(M; Z), e.g. "Z+Z4"; every relevant field is reported.
    #[arg(long, conflicts_with = "fields")]
    pub h2: Option<String>,
    /// Explicit field dimensions, e.g. "Q=1,F2=3".
    #[arg(long)]
    pub fields: Option<String>,
    /// Last index of the Betti prefix.
    #[arg(long, default_value_t = 10)]
    pub n: usize,
}

#[derive(Args, Debug)]
pub struct Classify4Args {
    /// Connected-sum word, e.g. "CP2#CP2bar" or "K3#S2xS2".
    #[arg(long, required_unless_present = "even_form", conflicts_with = "even_form")]
    pub word: Option<String>,
    /// Even form kE8 ⊕ lH given as "k,l".
    #[arg(long, allow_hyphen_values = true)]
    pub even_form: Option<String>,
}

#[derive(Args, Debug)]
pub struct Classify5Args {
    /// H2(M; Z), e.g. "0", "Z", "Z2", "Z^2+Z3+Z3".
    #[arg(long)]
    pub h2: String,
    /// Barden index i(M): 0, 1, 2, … or inf.
    #[arg(long)]
    pub i: String,
}

#[derive(Args, Debug)]
pub struct BrieskornArgs {
    /// Exponents a0,a1,a2,a3, each at least 2.
    #[arg(long, value_delimiter = ',', required = true)]
    pub exponents: Vec<u64>,
}

#[derive(Args, Debug)]
pub struct ChainArgs {
    /// Dimension n of M.
    #[arg(long)]
    pub n: Option<usize>,
    /// Volume entropy λ.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Topological entropy h_top.
    #[arg(long)]
    pub h: Option<f64>,
    /// Metric spec from which n, λ and h_top are computed when not given.
    #[arg(long)]
    pub metric: Option<String>,
    #[arg(long = "Tmax", default_value_t = 20.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Simplicial volume ‖M‖.
    #[arg(long)]
    pub simplicial_volume: Option<f64>,
    /// The constant c(n) of the first link.
    #[arg(long)]
    pub c_n: Option<f64>,
    #[arg(long)]
    pub min_vol: Option<f64>,
    /// Allowed violation, in entropy units.
    #[arg(long, default_value_t = 0.1)]
    pub tolerance: f64,
}

#[derive(Args, Debug)]
pub struct ArcsArgs {
    /// Surface metric spec: sphere:r=1, torus:a,b, hyperbolic:genus2-octagon.
    #[arg(long)]
    pub metric: String,
    /// Start point in chart-0 coordinates.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub p: Vec<f64>,
    /// End point in chart-0 coordinates.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub q: Vec<f64>,
    #[arg(long = "Tmax", default_value_t = 10.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 720)]
    pub resolution: usize,
    /// Re-run at twice the resolution and fail if the count changes.
    #[arg(long)]
    pub check_resolution: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => match report::emit(&cli.common, &out) {
            Ok(()) => {
                for w in &out.warnings {
                    eprintln!("warning: {w}");
                }
                if cli.common.strict && !out.warnings.is_empty() {
                    ExitCode::from(3)
                } else {
                    ExitCode::SUCCESS
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code())
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
