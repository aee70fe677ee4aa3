use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::fnspec::FnSpec;

#[derive(Debug, Parser)]
#[command(
    name = "lpcrit",
    version,
    about = "Certified L^p bounds from shift and sine conditions, and certified counterexamples"
)]
pub struct Cli {
    /// JSON file with a "command" key and keys mirroring that command's flags;
    /// flags given on the command line take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bound ‖f‖_p from the shift and sine norms, or report that t·s ∈ πZ.
    VerifyCriterion(CriterionArgs),
    /// Build and verify a counterexample for a pair with t·s ∈ πZ.
    Counterexample(CounterexampleArgs),
    /// Number of lattice points with a given ℓ¹ norm.
    LatticeCount(LatticeArgs),
    /// Print Q_j with sin⟨b,x⟩ = Σ Q_j(x) sin x_j.
    TrigDecomp(TrigArgs),
    /// Volume and moments of the simplex Δ_a^n.
    Simplex(SimplexArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::VerifyCriterion(_) => "verify-criterion",
            Command::Counterexample(_) => "counterexample",
            Command::LatticeCount(_) => "lattice-count",
            Command::TrigDecomp(_) => "trig-decomp",
            Command::Simplex(_) => "simplex",
        }
    }
}

/// A number or a symbolic multiple of π such as `pi/2`, `3pi`, `-1/3`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Token {
    Number(f64),
    Text(String),
}

impl Token {
    pub fn as_text(&self) -> String {
        match self {
            Token::Number(v) => format!("{v:?}"),
            Token::Text(s) => s.clone(),
        }
    }
}

impl std::str::FromStr for Token {
    type Err = std::convert::Infallible;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(Token::Text(s.to_string()))
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct CriterionArgs {
    /// Shift step t (decimal or symbolic, e.g. pi/2).
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<Token>,
    /// Sine frequency s (decimal or symbolic).
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<Token>,
    /// Shift vector a for the n-dimensional criterion, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<Token>,
    /// Frequency vector b for the n-dimensional criterion, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<Token>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Test function: box:LO:HI, power:Q, reciprocal or const:V, optionally
    /// followed by @SCALE to evaluate at SCALE·x.
    #[arg(long = "fn")]
    #[serde(rename = "fn")]
    pub function: Option<FnSpec>,
    /// Upper bound on ‖Δ_t f‖_p, instead of --fn.
    #[arg(long)]
    pub shift_norm: Option<f64>,
    /// Upper bound on ‖sin(s·) f‖_p, instead of --fn.
    #[arg(long)]
    pub sine_norm: Option<f64>,
    /// Quantization tolerance ε_q.
    #[arg(long)]
    pub eps_q: Option<f64>,
    /// Half-width δ of the exceptional set (default: a quarter of dist(ts, πZ)).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct CounterexampleArgs {
    /// one_d_pi, t_zero, s_zero, lattice_nd, singleton (or singleton_dependent,
    /// singleton_independent).
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Divergence thresholds, comma separated.
    #[arg(long = "M", value_delimiter = ',', num_args = 1..)]
    #[serde(rename = "M")]
    pub thresholds: Option<Vec<f64>>,
    /// Dimension of the lattice family.
    #[arg(long)]
    pub n: Option<usize>,
    /// Radius decay of the lattice family.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Shift vector for the singleton constructions.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<Token>,
    /// Frequency vector for the singleton constructions.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<Token>,
    /// Decay exponent of (1+|x|)^-a for s_zero.
    #[arg(long, allow_hyphen_values = true)]
    pub exponent: Option<f64>,
    /// Use the constant function with this value for s_zero.
    #[arg(long, allow_hyphen_values = true)]
    pub constant: Option<f64>,
    /// Shift step checked for s_zero (default 1).
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// Sine frequency checked for t_zero (default 1).
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,
    /// Directory for report.json, layers.csv, mass.svg and norms.svg.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Outputs to write; csv and svg need --out-dir.
    #[arg(long, value_enum, value_delimiter = ',', num_args = 1..)]
    pub format: Option<Vec<Format>>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct LatticeArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<u64>,
    /// Count only the nonnegative orthant.
    #[arg(long)]
    pub orthant: bool,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct TrigArgs {
    /// Integer frequency vector, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct SimplexArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Size a of Δ_a^n.
    #[arg(long)]
    pub a: Option<f64>,
    /// Print the volume.
    #[arg(long)]
    pub volume: bool,
    /// Print ∫ ξ_1^P over the simplex.
    #[arg(long)]
    pub moment: Option<f64>,
    /// Cross-check by Monte Carlo with this many samples.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Fill unset fields from `base`.
pub trait Merge {
    fn merge(self, base: Self) -> Self;
}

impl Merge for CriterionArgs {
    fn merge(self, base: Self) -> Self {
        Self {
            t: self.t.or(base.t),
            s: self.s.or(base.s),
            a: self.a.or(base.a),
            b: self.b.or(base.b),
            p: self.p.or(base.p),
            function: self.function.or(base.function),
            shift_norm: self.shift_norm.or(base.shift_norm),
            sine_norm: self.sine_norm.or(base.sine_norm),
            eps_q: self.eps_q.or(base.eps_q),
            delta: self.delta.or(base.delta),
            out: self.out.or(base.out),
        }
    }
}

impl Merge for CounterexampleArgs {
    fn merge(self, base: Self) -> Self {
        Self {
            kind: self.kind.or(base.kind),
            p: self.p.or(base.p),
            thresholds: self.thresholds.or(base.thresholds),
            n: self.n.or(base.n),
            gamma: self.gamma.or(base.gamma),
            a: self.a.or(base.a),
            b: self.b.or(base.b),
            exponent: self.exponent.or(base.exponent),
            constant: self.constant.or(base.constant),
            t: self.t.or(base.t),
            s: self.s.or(base.s),
            out_dir: self.out_dir.or(base.out_dir),
            format: self.format.or(base.format),
        }
    }
}

impl Merge for LatticeArgs {
    fn merge(self, base: Self) -> Self {
        Self {
            n: self.n.or(base.n),
            k: self.k.or(base.k),
            orthant: self.orthant || base.orthant,
        }
    }
}

impl Merge for TrigArgs {
    fn merge(self, base: Self) -> Self {
        Self { b: self.b.or(base.b) }
    }
}

impl Merge for SimplexArgs {
    fn merge(self, base: Self) -> Self {
        Self {
            n: self.n.or(base.n),
            a: self.a.or(base.a),
            volume: self.volume || base.volume,
            moment: self.moment.or(base.moment),
            samples: self.samples.or(base.samples),
            seed: self.seed.or(base.seed),
        }
    }
}
