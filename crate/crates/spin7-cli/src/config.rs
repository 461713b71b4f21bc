use std::path::{Path, PathBuf};

use serde::Deserialize;
use spin7::gradient_flow::FlowVariant;
use spin7::metric_families::Family;

use crate::cli::Common;
use crate::error::CliError;

/// Optional TOML file; keys mirror the long flag names.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigFile {
    pub family: Option<String>,
    pub k: Option<f64>,
    pub kappa: Option<f64>,
    pub scale: Option<f64>,
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub json: Option<bool>,
    pub n: Option<usize>,
    pub t_end: Option<f64>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }
}

/// Flags merged over the config file, validated.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub family: Option<Family>,
    pub k: Option<f64>,
    pub kappa: Option<f64>,
    pub scale: Option<f64>,
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub tol: f64,
    pub out: Option<PathBuf>,
    pub json: bool,
    pub n: Option<usize>,
    pub t_end: Option<f64>,
    pub variant: FlowVariant,
}

pub const DEFAULT_TOL: f64 = 1e-8;

impl RunConfig {
    pub fn resolve(flags: &Common, t_end: Option<f64>, out_dir: Option<&Path>) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let family = match flags.family.clone().or(file.family) {
            Some(name) => Some(Family::from_name(&name).ok_or_else(|| CliError::Usage(format!("unknown family {name:?}")))?),
            None => None,
        };
        let out = flags.out.clone().or(file.out).map(|p| match out_dir {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p,
        });
        let cfg = RunConfig {
            family,
            k: flags.k.or(file.k),
            kappa: flags.kappa.or(file.kappa),
            scale: flags.scale.or(file.scale),
            r_min: flags.r_min.or(file.r_min),
            r_max: flags.r_max.or(file.r_max),
            tol: flags.tol.or(file.tol).unwrap_or(DEFAULT_TOL),
            out,
            json: flags.json || file.json.unwrap_or(false),
            n: flags.n.or(file.n),
            t_end: t_end.or(file.t_end),
            variant: if flags.sign_flip { FlowVariant::SignFlipped } else { FlowVariant::Standard },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Usage(m));
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad(format!("--tol must be positive, got {}", self.tol));
        }
        if let Some(s) = self.scale {
            if !(s > 0.0 && s.is_finite()) {
                return bad(format!("--scale must be positive, got {s}"));
            }
        }
        if let (Some(lo), Some(hi)) = (self.r_min, self.r_max) {
            if !(lo < hi) {
                return bad(format!("empty radial range [{lo}, {hi}]"));
            }
        }
        if self.k.is_some() && self.kappa.is_some() {
            return bad("give --k or --kappa, not both".into());
        }
        if let Some(n) = self.n {
            if n < 2 {
                return bad(format!("--n must be at least 2, got {n}"));
            }
        }
        if let Some(t) = self.t_end {
            if !(t > 0.0 && t.is_finite()) {
                return bad(format!("--t-end must be positive, got {t}"));
            }
        }
        Ok(())
    }
}
