use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::density1d::Density1D;
use crate::error::{Error, Result};
use crate::harness::ChainParams;
use crate::numerics::ConvolutionOptions;
use crate::sphere::SphereDensity;

/// Environment variable that overrides the output directory of the config file.
pub const OUT_ENV: &str = "KACLAB_OUT";
pub const DEFAULT_OUT: &str = "kaclab-out";
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FamilySpec {
    Uniform,
    Bump { r: f64 },
    Gaussian { var: f64 },
    File { path: PathBuf },
}

impl Default for FamilySpec {
    fn default() -> Self {
        FamilySpec::Bump { r: 1.0 }
    }
}

impl FamilySpec {
    /// Base density of a conditioned tensorization; `None` for the uniform family.
    pub fn base(&self) -> Result<Option<Density1D>> {
        Ok(match self {
            FamilySpec::Uniform => None,
            FamilySpec::Bump { r } => Some(Density1D::bump(*r)?),
            FamilySpec::Gaussian { var } => Some(Density1D::gaussian(*var)?),
            FamilySpec::File { path } => Some(Density1D::from_csv(path)?),
        })
    }

    pub fn sphere(&self, n: usize, opts: &ConvolutionOptions) -> Result<SphereDensity> {
        match self.base()? {
            None => SphereDensity::uniform(n),
            Some(f) => SphereDensity::conditioned_with(f, n, opts.clone()),
        }
    }
}

/// Spectral grid settings exposed in the config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridConfig {
    pub window_sds: f64,
    pub min_points: usize,
    pub tail_tol: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        let o = ConvolutionOptions::default();
        Self { window_sds: o.window_sds, min_points: o.min_points, tail_tol: o.tail_tol }
    }
}

impl GridConfig {
    pub fn options(&self) -> ConvolutionOptions {
        ConvolutionOptions { window_sds: self.window_sds, min_points: self.min_points, tail_tol: self.tail_tol, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub family: FamilySpec,
    pub ns: Vec<usize>,
    pub params: ChainParams,
    pub grid: GridConfig,
    pub out_dir: Option<PathBuf>,
    pub seed: u64,
    pub holder_cases: usize,
    pub pointwise_cases: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            family: FamilySpec::default(),
            ns: vec![16, 32, 64, 128, 256],
            params: ChainParams::default(),
            grid: GridConfig::default(),
            out_dir: None,
            seed: DEFAULT_SEED,
            holder_cases: 1000,
            pointwise_cases: 100_000,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// Flag value, then `KACLAB_OUT`, then the config file, then the default.
    pub fn resolve_out_dir(&self, flag: Option<&Path>) -> PathBuf {
        if let Some(p) = flag {
            return p.to_path_buf();
        }
        if let Some(p) = std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()) {
            return PathBuf::from(p);
        }
        self.out_dir.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections() {
        let c = RunConfig::from_toml_str(
            "ns = [8, 16]\nseed = 7\n[family]\nkind = \"gaussian\"\nvar = 1.0\n[params]\nk = 4.0\nq = 3.0\np = 1.5\nbeta = 0.25\n",
        )
        .unwrap();
        assert_eq!(c.ns, vec![8, 16]);
        assert_eq!(c.family, FamilySpec::Gaussian { var: 1.0 });
        assert_eq!(c.params.beta, 0.25);
        assert_eq!(c.seed, 7);
        assert_eq!(c.grid, GridConfig::default());
    }

    #[test]
    fn rejects_unknown_family() {
        assert!(RunConfig::from_toml_str("[family]\nkind = \"cauchy\"\n").is_err());
    }
}
