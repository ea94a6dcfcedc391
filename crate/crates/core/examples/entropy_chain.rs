//! The full inequality chain and the measured constant `ε̂(N)`.
//!
//! `cargo run --release --example entropy_chain`

use kacsphere::density1d::Density1D;
use kacsphere::harness::{entropy_identity, verify_chain, ChainParams};
use kacsphere::sphere::SphereDensity;

fn main() -> kacsphere::Result<()> {
    let params = ChainParams::default();
    for n in [16usize, 64, 256] {
        let s = SphereDensity::conditioned(Density1D::bump(1.0)?, n)?;
        let paths = entropy_identity(&s)?;
        let r = verify_chain(&s, &params)?;
        println!(
            "N={n:>3}  H_N={:.6}  partial={:.6}  eps_hat={:.5}  identity paths differ by {:.1e}",
            r.spherical_entropy,
            r.partial_entropy_sum,
            r.epsilon_hat.unwrap_or(f64::NAN),
            paths.discrepancy()
        );
        for st in &r.steps {
            println!("    {:<18} slack {:+.4e}  {:?}", st.name, st.slack(), st.status);
        }
    }
    Ok(())
}
