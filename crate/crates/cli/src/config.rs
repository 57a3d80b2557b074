//! Run configuration: defaults, optional TOML file, command-line overrides.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use regionops::quadrature::QuadratureSpec;
use regionops::TruncationConfig64;

use crate::errors::CliError;

/// Fields accepted in a `--config` TOML file. Every field is optional; the
/// file supplies defaults that the command line can override.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub dim: Option<usize>,
    pub effective_dim: Option<usize>,
    pub quad_order: Option<usize>,
    pub tol: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub expr: Option<String>,
    pub steps: Option<usize>,
}

/// Command-line overrides, applied on top of the file values.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub dim: Option<usize>,
    pub effective_dim: Option<usize>,
    pub quad_order: Option<usize>,
    pub tol: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub expr: Option<String>,
    pub steps: Option<usize>,
}

/// Fully resolved configuration for one command run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub dim: usize,
    /// `None` keeps the truncation default (`dim / 2`).
    pub effective_dim: Option<usize>,
    pub quad_order: usize,
    pub tol: f64,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub expr: Option<String>,
    pub steps: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dim: 32,
            effective_dim: None,
            quad_order: 64,
            tol: 1e-8,
            out_dir: PathBuf::from("."),
            seed: 2026,
            expr: None,
            steps: 2,
        }
    }
}

impl RunConfig {
    /// Layers defaults, then the config file, then the command line.
    pub fn resolve(file: Option<FileConfig>, cli: Overrides) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(f) = file {
            apply(&mut cfg, f.dim, f.effective_dim, f.quad_order, f.tol, f.out_dir, f.seed, f.expr, f.steps);
        }
        apply(
            &mut cfg,
            cli.dim,
            cli.effective_dim,
            cli.quad_order,
            cli.tol,
            cli.out_dir,
            cli.seed,
            cli.expr,
            cli.steps,
        );
        // surface bad dimensions and tolerances as configuration errors
        cfg.truncation()?;
        cfg.quadrature()?;
        Ok(cfg)
    }

    /// Builds the validated truncation configuration.
    pub fn truncation(&self) -> Result<TruncationConfig64, CliError> {
        let mut t = TruncationConfig64::new(self.dim).map_err(usage)?;
        if let Some(eff) = self.effective_dim {
            t = t.with_effective_dim(eff).map_err(usage)?;
        }
        t.with_tol(self.tol).map_err(usage)
    }

    /// Builds the validated quadrature order.
    pub fn quadrature(&self) -> Result<QuadratureSpec, CliError> {
        QuadratureSpec::new(self.quad_order).map_err(usage)
    }

    /// The region expression, required by most commands.
    pub fn required_expr(&self) -> Result<&str, CliError> {
        self.expr.as_deref().ok_or_else(|| {
            CliError::Usage(
                "a region expression is required; pass --expr or set `expr` in the config file"
                    .into(),
            )
        })
    }
}

fn usage(e: regionops::Error) -> CliError {
    CliError::Usage(e.to_string())
}

#[allow(clippy::too_many_arguments)]
fn apply(
    cfg: &mut RunConfig,
    dim: Option<usize>,
    effective_dim: Option<usize>,
    quad_order: Option<usize>,
    tol: Option<f64>,
    out_dir: Option<PathBuf>,
    seed: Option<u64>,
    expr: Option<String>,
    steps: Option<usize>,
) {
    if let Some(v) = dim {
        cfg.dim = v;
    }
    if let Some(v) = effective_dim {
        cfg.effective_dim = Some(v);
    }
    if let Some(v) = quad_order {
        cfg.quad_order = v;
    }
    if let Some(v) = tol {
        cfg.tol = v;
    }
    if let Some(v) = out_dir {
        cfg.out_dir = v;
    }
    if let Some(v) = seed {
        cfg.seed = v;
    }
    if let Some(v) = expr {
        cfg.expr = Some(v);
    }
    if let Some(v) = steps {
        cfg.steps = v;
    }
}

/// Reads and parses a TOML config file.
pub fn load_file_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
}
