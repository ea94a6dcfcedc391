use crate::error::Result;
use crate::sphere::{marginal_entropy_paths, EntropyPaths, SphereDensity};

/// Required agreement between the two routes to `∫ F_1 log F_1 dσ^N`.
pub const IDENTITY_TOL: f64 = 1e-6;

/// Both sides of the exact identity linking `∫ F_1 log F_1 dσ^N` to `H(Π_1|γ)`.
///
/// A divergent pole logarithm shows up as infinite `direct` and `identity`.
pub fn entropy_identity(sphere: &SphereDensity) -> Result<EntropyPaths> {
    marginal_entropy_paths(sphere)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density1d::Density1D;

    #[test]
    fn uniform_and_gaussian_vanish() {
        for s in [SphereDensity::uniform(16).unwrap(), SphereDensity::conditioned(Density1D::standard_gaussian(), 16).unwrap()] {
            let p = entropy_identity(&s).unwrap();
            assert!(p.direct.abs() < 1e-6 && p.identity.abs() < 1e-6, "{p:?}");
            assert!(p.half_second_moment > 0.4 && p.log_surface_ratio.abs() > 1e-3);
        }
    }

    #[test]
    fn bump_paths_agree() {
        let s = SphereDensity::conditioned(Density1D::bump(1.0).unwrap(), 64).unwrap();
        let p = entropy_identity(&s).unwrap();
        assert!(p.discrepancy() < IDENTITY_TOL);
        assert!(p.direct > 0.0);
    }
}
