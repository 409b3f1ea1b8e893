//! `torus-pmra`: batch front end for lattice, K-theory, filter, analysis and
//! frame computations. Reports are canonical JSON tagged `"schema": 1`.
//!
//! Exit codes: 0 pass, 1 a check failed, 2 usage or validation error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use config::Overrides;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lattice(#[from] torus_pmra::lattice::LatticeError),
    #[error(transparent)]
    KTheory(#[from] torus_pmra::ktheory::KTheoryError),
    #[error(transparent)]
    Filter(#[from] torus_pmra::filters::FilterError),
    #[error(transparent)]
    Analysis(#[from] torus_pmra::analysis::AnalysisError),
    #[error(transparent)]
    Frame(#[from] torus_pmra::frames::FrameError),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Lattice(_) => "lattice",
            CliError::KTheory(_) => "ktheory",
            CliError::Filter(_) => "filters",
            CliError::Analysis(_) => "analysis",
            CliError::Frame(_) => "frames",
            CliError::Io(_) => "io",
            CliError::Json(_) => "json",
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "torus-pmra", version, about = "Projective multiresolution analyses over the torus")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default)]
pub struct GlobalArgs {
    /// Dilation matrix as JSON rows, e.g. '[[2,0],[0,2]]'.
    #[arg(long, global = true)]
    pub matrix: Option<String>,
    /// Unimodular S with A = S⁻¹DS, as JSON rows.
    #[arg(long, global = true)]
    pub conjugator: Option<String>,
    /// Coset level or frame level.
    #[arg(long, global = true)]
    pub level: Option<u32>,
    /// Product depth J, frame depth, or number of K₀ levels.
    #[arg(long, global = true)]
    pub depth: Option<u32>,
    /// Grid points per axis.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Lattice truncation radius R.
    #[arg(long, global = true)]
    pub radius: Option<u64>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Largest coset table size allowed.
    #[arg(long, global = true)]
    pub level_cap: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// TOML file with defaults for the numeric flags.
    #[arg(long, global = true, env = "TORUS_PMRA_CONFIG")]
    pub config: Option<PathBuf>,
}

impl GlobalArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            grid: self.grid,
            radius: self.radius,
            depth: self.depth,
            tol: self.tol,
            level_cap: self.level_cap,
            seed: self.seed,
            out: self.out.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Coset representatives of ℤⁿ/Aⁱℤⁿ.
    Cosets {
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// K₀ computations.
    #[command(subcommand)]
    K0(K0Command),
    /// Numerical verification suites.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Args, Debug, Clone)]
pub struct ModuleArgs {
    /// Rank of X(q, a).
    #[arg(long, default_value_t = 1)]
    pub q: i64,
    /// Twists a₁,…,a_{n−1}, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    pub twists: Vec<i64>,
    /// Unimodular B for X_B(q, a), as JSON rows.
    #[arg(long)]
    pub module_conjugator: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum K0Command {
    /// Class of X(q, a) or X_B(q, a).
    Class(ModuleArgs),
    /// Class of D(V₀) for V₀ ≅ X(q, a).
    Dilate(ModuleArgs),
    /// V_i and W_i for i < depth.
    Levels(ModuleArgs),
    /// B ∈ SL(3,ℤ) realizing q + c₁e₁∧e₂ + c₂e₁∧e₃ + c₃e₂∧e₃.
    #[command(name = "sl3-embed")]
    Sl3Embed {
        q: i64,
        #[arg(allow_negative_numbers = true)]
        c1: i64,
        #[arg(allow_negative_numbers = true)]
        c2: i64,
        #[arg(allow_negative_numbers = true)]
        c3: i64,
    },
}

#[derive(Args, Debug, Clone, Default)]
pub struct SectionArgs {
    /// Section as a JSON expression tree, or @path to a file holding one.
    #[arg(long)]
    pub section: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum VerifyCommand {
    /// Haar filter banks of the diagonal factors.
    Filters,
    /// Truncated infinite product against the closed-form scaling function.
    Phi,
    /// Ξ-membership of a section (Haar scaling function by default).
    Xi(SectionArgs),
    /// Refinement equation and unit lattice norm.
    Refine {
        #[command(flatten)]
        section: SectionArgs,
        /// Mask as a JSON section tree or @path.
        #[arg(long)]
        mask: Option<String>,
        #[arg(long, default_value_t = 1)]
        q: i64,
    },
    /// Reconstruction of corpus sections from band-limited frames.
    Frame {
        /// Also write the frame manifest here.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Random corpus sections per level.
        #[arg(long, default_value_t = 3)]
        samples: usize,
    },
    /// Gram identities at one wavelet level.
    Gram,
}

/// What a command produced.
pub struct Outcome {
    pub text: String,
    pub pass: bool,
}

fn error_json(e: &CliError) -> String {
    let v = serde_json::json!({
        "schema": 1,
        "pass": false,
        "error": { "kind": e.kind(), "message": e.to_string() },
    });
    output::canonical_json(&v).unwrap_or_else(|_| "{}\n".into())
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let file = match &cli.global.config {
        Some(p) => config::FileConfig::load(p)?,
        None => config::FileConfig::default(),
    };
    let flags = cli.global.overrides();
    let out = commands::dispatch(cli, &flags, &file)?;
    let target = flags.out.clone().or_else(|| file.out.clone());
    if let Some(path) = target {
        std::fs::write(&path, &out.text)?;
    } else {
        print!("{}", out.text);
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(o) if o.pass => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            print!("{}", error_json(&e));
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
