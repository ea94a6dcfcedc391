//! Fisher information on the sphere: the uniform cancellation and the
//! comparison between first marginal and full density.
//!
//! `cargo run --release --example fisher`

use kacsphere::density1d::Density1D;
use kacsphere::sphere::{spherical_fisher_full, spherical_fisher_marginal, SphereDensity};

fn main() -> kacsphere::Result<()> {
    for n in [8usize, 64, 1024] {
        let f = spherical_fisher_marginal(&SphereDensity::uniform(n)?)?;
        println!("uniform N={n:>4}  I_N(F_1)={:+.2e}  T_1={:.8}  T_3={:.8}", f.value, f.damped_fisher, f.pole_term);
    }
    for n in [16usize, 64] {
        let s = SphereDensity::conditioned(Density1D::bump(1.0)?, n)?;
        let m = spherical_fisher_marginal(&s)?;
        let full = spherical_fisher_full(&s)?;
        println!("bump N={n:>3}  N I_N(F_1)={:.6}  2 I_N(F_N)={:.6}", n as f64 * m.value, 2.0 * full);
    }
    Ok(())
}
