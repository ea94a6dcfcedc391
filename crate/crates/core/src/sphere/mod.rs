//! Densities on Kac's sphere `S^{N-1}(√N)` and their line marginals.

pub mod conditions;
pub mod entropy;
pub mod fisher;
pub mod marginal;
pub mod zcurve;

use std::sync::OnceLock;

use crate::density1d::Density1D;
use crate::error::{invalid, Error, Result};
use crate::numerics::ConvolutionOptions;

pub use conditions::{condition_report, condition_row, ConditionReport, ConditionRow};
pub use entropy::{marginal_entropy_paths, partial_entropy_sum, spherical_entropy, EntropyPaths};
pub use fisher::{spherical_fisher_full, spherical_fisher_marginal, SphericalFisher};
pub use marginal::{
    line_from_sphere_marginal, marginal1, marginal2, sphere_marginal_from_line, uniform_marginal_weight, Marginal2,
    SphereLineFunction,
};
pub use zcurve::{build_zcurve, CurvePoint, NormalizationCurve, SquareLaw};

/// Tolerance on the second moment of a conditioned base density.
const M2_TOL: f64 = 1e-6;

/// A density on `S^{N-1}(√N)` relative to the uniform probability measure.
#[derive(Debug)]
pub struct SphereDensity {
    n: usize,
    family: Family,
    marginal1: OnceLock<Density1D>,
}

#[derive(Debug)]
pub enum Family {
    Uniform,
    Conditioned(Box<Conditioned>),
}

/// `f^{⊗N} / Z_N(f, √N)` restricted to the sphere.
#[derive(Debug)]
pub struct Conditioned {
    base: Density1D,
    opts: ConvolutionOptions,
    curve_n: NormalizationCurve,
    curve_n1: NormalizationCurve,
    curve_n2: OnceLock<NormalizationCurve>,
}

impl Conditioned {
    pub fn base(&self) -> &Density1D {
        &self.base
    }

    /// Curve for `N` summands.
    pub fn curve(&self) -> &NormalizationCurve {
        &self.curve_n
    }

    /// Curve for `N - 1` summands.
    pub fn curve_minus_one(&self) -> &NormalizationCurve {
        &self.curve_n1
    }

    /// Curve for `N - 2` summands, built on first use.
    pub fn curve_minus_two(&self) -> Result<&NormalizationCurve> {
        if let Some(c) = self.curve_n2.get() {
            return Ok(c);
        }
        let c = build_zcurve(&self.base, self.curve_n.n() - 2, &self.opts)?;
        Ok(self.curve_n2.get_or_init(|| c))
    }
}

impl SphereDensity {
    pub fn uniform(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(invalid(format!("sphere dimension N must be >= 3, got {n}")));
        }
        Ok(Self { n, family: Family::Uniform, marginal1: OnceLock::new() })
    }

    pub fn conditioned(f: Density1D, n: usize) -> Result<Self> {
        Self::conditioned_with(f, n, ConvolutionOptions::default())
    }

    pub fn conditioned_with(f: Density1D, n: usize, opts: ConvolutionOptions) -> Result<Self> {
        if n < 3 {
            return Err(invalid(format!("sphere dimension N must be >= 3, got {n}")));
        }
        let m2 = f.moment(2.0);
        if (m2 - 1.0).abs() > M2_TOL {
            return Err(Error::InvalidDensity {
                label: f.label().to_string(),
                reason: format!("second moment {m2} must equal 1"),
            });
        }
        if !f.moment(4.0).is_finite() {
            return Err(Error::InvalidDensity { label: f.label().to_string(), reason: "infinite fourth moment".into() });
        }
        let (curve_n, curve_n1) = rayon::join(|| build_zcurve(&f, n, &opts), || build_zcurve(&f, n - 1, &opts));
        let cond = Conditioned { base: f, opts, curve_n: curve_n?, curve_n1: curve_n1?, curve_n2: OnceLock::new() };
        Ok(Self { n, family: Family::Conditioned(Box::new(cond)), marginal1: OnceLock::new() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn conditioned_parts(&self) -> Option<&Conditioned> {
        match &self.family {
            Family::Conditioned(c) => Some(c),
            Family::Uniform => None,
        }
    }

    pub fn label(&self) -> String {
        match &self.family {
            Family::Uniform => "uniform".to_string(),
            Family::Conditioned(c) => c.base.label().to_string(),
        }
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self.family, Family::Uniform)
    }

    /// First line marginal `Π_1(F_N)`, computed once.
    pub fn marginal1(&self) -> Result<&Density1D> {
        if let Some(m) = self.marginal1.get() {
            return Ok(m);
        }
        let m = marginal::compute_marginal1(self)?;
        Ok(self.marginal1.get_or_init(|| m))
    }
}
