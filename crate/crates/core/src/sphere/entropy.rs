//! Spherical entropy and the entropy of the first marginal on the sphere.

use super::marginal::{ln_uniform_weight, ln_weight_constant};
use super::{Family, SphereDensity};
use crate::density1d::ATOM_FLOOR;
use crate::error::{Error, Result};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
/// Required agreement of the two evaluation paths.
pub const PATH_TOL: f64 = 1e-6;

/// `H_N(F_N)`, the entropy relative to the uniform measure.
///
/// For a conditioned tensorization this is `N ∫ log f Π_1 - log Z_N(f, √N)`.
pub fn spherical_entropy(sphere: &SphereDensity) -> Result<f64> {
    match sphere.family() {
        Family::Uniform => Ok(0.0),
        Family::Conditioned(c) => {
            let m1 = sphere.marginal1()?;
            let f = &c.base;
            let mut acc = 0.0;
            for ((&v, &w), &p) in m1.grid().points().iter().zip(m1.grid().weights()).zip(m1.values()) {
                if p < ATOM_FLOOR {
                    continue;
                }
                let fv = f.pdf(v);
                if fv <= ATOM_FLOOR {
                    return Ok(f64::INFINITY);
                }
                acc += w * p * fv.ln();
            }
            let nf = sphere.n() as f64;
            Ok(nf * acc - c.curve().log_z(nf))
        }
    }
}

/// `∫ F_1 log F_1 dσ^N` by two routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyPaths {
    /// `∫ Π_1 log(Π_1 / w_N)` with the uniform weight `w_N` evaluated in log form.
    pub direct: f64,
    /// Sum of the four terms below.
    pub identity: f64,
    /// `H(Π_1 | γ)`.
    pub relative_entropy_gaussian: f64,
    /// `log(|S^{N-2}| √(2π) / (|S^{N-1}| √N))`.
    pub log_surface_ratio: f64,
    /// `½ M_2(Π_1)`.
    pub half_second_moment: f64,
    /// `((N-3)/2) ∫ Π_1 log(1 - v²/N)`.
    pub pole_log_term: f64,
}

impl EntropyPaths {
    pub fn discrepancy(&self) -> f64 {
        (self.direct - self.identity).abs()
    }
}

pub fn marginal_entropy_paths(sphere: &SphereDensity) -> Result<EntropyPaths> {
    let n = sphere.n();
    let nf = n as f64;
    let m1 = sphere.marginal1()?;
    let mut direct = 0.0;
    let mut pole = 0.0;
    for ((&v, &w), &p) in m1.grid().points().iter().zip(m1.grid().weights()).zip(m1.values()) {
        if p < ATOM_FLOOR {
            continue;
        }
        let lw = ln_uniform_weight(n, v);
        if lw == f64::NEG_INFINITY {
            return Ok(diverged());
        }
        direct += w * p * (p.ln() - lw);
        pole += w * p * (-v * v / nf).ln_1p();
    }
    let rel = m1.relative_entropy_gaussian();
    let log_surface_ratio = ln_weight_constant(n) + HALF_LN_2PI;
    let half_second_moment = 0.5 * m1.moment(2.0);
    let pole_log_term = 0.5 * (nf - 3.0) * pole;
    let identity = rel - log_surface_ratio - half_second_moment - pole_log_term;
    Ok(EntropyPaths { direct, identity, relative_entropy_gaussian: rel, log_surface_ratio, half_second_moment, pole_log_term })
}

fn diverged() -> EntropyPaths {
    let inf = f64::INFINITY;
    EntropyPaths {
        direct: inf,
        identity: inf,
        relative_entropy_gaussian: inf,
        log_surface_ratio: 0.0,
        half_second_moment: 0.0,
        pole_log_term: -inf,
    }
}

/// `Σ_j ∫ F_j log F_j dσ^N = N ∫ F_1 log F_1 dσ^N`.
///
/// Fails when the direct and identity routes differ by more than [`PATH_TOL`].
pub fn partial_entropy_sum(sphere: &SphereDensity) -> Result<f64> {
    let paths = marginal_entropy_paths(sphere)?;
    if paths.identity.is_finite() && paths.discrepancy() > PATH_TOL {
        return Err(Error::Numerical(format!(
            "first-marginal entropy paths disagree by {:e} (N = {})",
            paths.discrepancy(),
            sphere.n()
        )));
    }
    Ok(sphere.n() as f64 * paths.identity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density1d::Density1D;

    #[test]
    fn uniform_terms_cancel() {
        for n in [4usize, 16, 64, 256] {
            let s = SphereDensity::uniform(n).unwrap();
            let p = marginal_entropy_paths(&s).unwrap();
            assert!(p.direct.abs() < 1e-9, "N={n}: {}", p.direct);
            assert!(p.identity.abs() < 1e-6, "N={n}: {}", p.identity);
            assert!(p.half_second_moment > 0.4 && p.pole_log_term < -0.1 && p.relative_entropy_gaussian > 0.0);
            assert_eq!(spherical_entropy(&s).unwrap(), 0.0);
        }
    }

    #[test]
    fn gaussian_tensorization_is_flat() {
        let s = SphereDensity::conditioned(Density1D::standard_gaussian(), 16).unwrap();
        assert!(spherical_entropy(&s).unwrap().abs() < 1e-6);
        assert!(partial_entropy_sum(&s).unwrap().abs() < 1e-6);
    }
}
