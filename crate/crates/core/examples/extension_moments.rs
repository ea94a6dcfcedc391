//! The Gaussian extension of a sphere density and its moment identity.
//!
//! `cargo run --release --example extension_moments`

use kacsphere::density1d::Density1D;
use kacsphere::extension::{extension_entropy_consistency, extension_marginal1, extension_moment_identity_check};
use kacsphere::sphere::SphereDensity;

fn main() -> kacsphere::Result<()> {
    println!("{:>4} {:>3} {:>14} {:>14} {:>10} {:>10}", "N", "k", "M_k(ext)", "M_k(pi_1)", "factor", "slack");
    for n in [8usize, 32, 128, 512] {
        let s = SphereDensity::conditioned(Density1D::bump(1.0)?, n)?;
        let e = extension_marginal1(&s)?;
        for k in [2.0, 4.0, 6.0] {
            let m = extension_moment_identity_check(&s, &e, k)?;
            println!("{n:>4} {k:>3} {:>14.10} {:>14.10} {:>10.6} {:>10.1e}", m.extension_moment, m.sphere_moment, m.factor, m.slack);
        }
        let c = extension_entropy_consistency(&s)?;
        println!("     H(ext|gamma_N)={:.10}  H_N={:.10}", c.extension_entropy, c.spherical_entropy);
    }
    Ok(())
}
