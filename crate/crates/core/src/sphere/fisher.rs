//! Fisher information on the sphere.

use super::marginal::marginal2;
use super::{Family, SphereDensity};
use crate::density1d::ATOM_FLOOR;
use crate::error::{Error, Result};

/// `I_N(F_1^{(N)})` with its two integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalFisher {
    /// `T_1 - 2(N-3)/N + ((N-3)/N)² T_3`.
    pub value: f64,
    /// `T_1 = ∫ (1 - v²/N) |(log Π_1)'|² Π_1`.
    pub damped_fisher: f64,
    /// `T_3 = ∫ v² Π_1 / (1 - v²/N)`.
    pub pole_term: f64,
}

pub fn spherical_fisher_marginal(sphere: &SphereDensity) -> Result<SphericalFisher> {
    let n = sphere.n();
    let nf = n as f64;
    let m1 = sphere.marginal1()?;
    let der = m1.derivative_values().ok_or_else(|| Error::MissingDerivative(m1.label().to_string()))?;
    let mut t1 = 0.0;
    let mut t3 = 0.0;
    for (((&v, &w), &p), &dp) in m1.grid().points().iter().zip(m1.grid().weights()).zip(m1.values()).zip(der) {
        if p <= ATOM_FLOOR {
            continue;
        }
        let damp = 1.0 - v * v / nf;
        if damp <= 0.0 {
            t3 = f64::INFINITY;
            continue;
        }
        t1 += w * damp * dp * dp / p;
        t3 += w * v * v * p / damp;
    }
    let r = (nf - 3.0) / nf;
    let value = if n == 3 { t1 } else { t1 - 2.0 * r + r * r * t3 };
    Ok(SphericalFisher { value, damped_fisher: t1, pole_term: t3 })
}

/// `I_N(F_N) = (N-1)[E(v_1² g(v_2)²) - E(v_1 g(v_1) v_2 g(v_2))]` with `g = (log f)'`,
/// expectations under the second marginal.
pub fn spherical_fisher_full(sphere: &SphereDensity) -> Result<f64> {
    let c = match sphere.family() {
        Family::Uniform => return Ok(0.0),
        Family::Conditioned(c) => c,
    };
    let f = c.base();
    if f.derivative_values().is_none() {
        return Err(Error::MissingDerivative(f.label().to_string()));
    }
    let m2 = marginal2(sphere)?;
    let score = |v: f64| {
        let fv = f.pdf(v);
        if fv > ATOM_FLOOR {
            f.dpdf(v).unwrap_or(0.0) / fv
        } else {
            0.0
        }
    };
    let a = m2.integrate(|v1, v2, p| {
        let g = score(v2);
        p * v1 * v1 * g * g
    });
    let b = m2.integrate(|v1, v2, p| p * v1 * score(v1) * v2 * score(v2));
    Ok((sphere.n() as f64 - 1.0) * (a - b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density1d::Density1D;

    #[test]
    fn uniform_cancellation() {
        for n in [8usize, 9, 10, 16, 33, 100, 257, 1024] {
            let s = SphereDensity::uniform(n).unwrap();
            let fi = spherical_fisher_marginal(&s).unwrap();
            assert!(fi.value.abs() < 1e-6, "N={n}: {:e}", fi.value);
            assert!(fi.damped_fisher > 0.5);
        }
        assert_eq!(spherical_fisher_full(&SphereDensity::uniform(8).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_tensorization_vanishes() {
        let s = SphereDensity::conditioned(Density1D::standard_gaussian(), 12).unwrap();
        assert!(spherical_fisher_marginal(&s).unwrap().value.abs() < 1e-6);
        assert!(spherical_fisher_full(&s).unwrap().abs() < 1e-5);
    }
}
