use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

/// Values read from a TOML config file. Every key is optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub grid: Option<usize>,
    pub radius: Option<u64>,
    pub depth: Option<u32>,
    pub tol: Option<f64>,
    pub level_cap: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("bad config: {e}")))
    }
}

/// The resolved settings of one run.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub grid: usize,
    pub radius: u64,
    pub depth: u32,
    pub tol: f64,
    pub level_cap: u64,
    pub seed: u64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_RADIUS: u64 = 64;
pub const DEFAULT_TOL: f64 = 1e-8;

/// Grid points per axis by dimension.
pub fn default_grid(n: usize) -> usize {
    match n {
        0 | 1 => 256,
        2 => 64,
        3 => 16,
        _ => 8,
    }
}

/// Flag values, each overriding the file and the defaults.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub grid: Option<usize>,
    pub radius: Option<u64>,
    pub depth: Option<u32>,
    pub tol: Option<f64>,
    pub level_cap: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

/// Command-specific defaults.
pub struct Defaults {
    pub grid: usize,
    pub depth: u32,
    pub tol: f64,
}

impl RunConfig {
    pub fn resolve(flags: &Overrides, file: &FileConfig, d: Defaults) -> Result<Self, CliError> {
        let cfg = RunConfig {
            grid: flags.grid.or(file.grid).unwrap_or(d.grid),
            radius: flags.radius.or(file.radius).unwrap_or(DEFAULT_RADIUS),
            depth: flags.depth.or(file.depth).unwrap_or(d.depth),
            tol: flags.tol.or(file.tol).unwrap_or(d.tol),
            level_cap: flags
                .level_cap
                .or(file.level_cap)
                .unwrap_or(torus_pmra::lattice::DEFAULT_LEVEL_CAP),
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            out: flags.out.clone().or_else(|| file.out.clone()),
        };
        if cfg.grid == 0 || cfg.radius == 0 || cfg.level_cap == 0 {
            return Err(CliError::Usage("grid, radius and level cap must be positive".into()));
        }
        if !(cfg.tol > 0.0 && cfg.tol.is_finite()) {
            return Err(CliError::Usage(format!("tolerance {} must be positive", cfg.tol)));
        }
        Ok(cfg)
    }
}
