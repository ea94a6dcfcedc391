//! Exact Wasserstein distances between the sphere and extension marginals,
//! against the transport bounds.
//!
//! `cargo run --release --example transport_bounds`

use kacsphere::density1d::Density1D;
use kacsphere::extension::extension_marginal1;
use kacsphere::sphere::SphereDensity;
use kacsphere::transport::{distorted_hwi_check, hm_lift_bound, hwi_check, w1_sphere_bound, wasserstein_exact};

fn main() -> kacsphere::Result<()> {
    for n in [16usize, 64, 256] {
        let s = SphereDensity::conditioned(Density1D::bump(1.0)?, n)?;
        let e = extension_marginal1(&s)?;
        let p1 = s.marginal1()?;
        let w1 = w1_sphere_bound(&s, &e)?;
        println!("N={n}");
        println!("  W1={:.4e}  B1={:.4e}  tau_hat={:.3e}", w1.exact, w1.bounds[0].1, w1.diagnostic("tau_hat").unwrap_or(f64::NAN));
        for q in [2.0, 3.0] {
            let r = hm_lift_bound(p1, &e.density, q, 4.0)?;
            println!("  W{q}={:.4e}  moment lift bound={:.4e}", r.exact, r.bounds[0].1);
        }
        let h = hwi_check(p1, &e.density)?;
        println!("  HWI: {:.4e} <= {:.4e}", h.lhs, h.rhs);
        let d = distorted_hwi_check(&s, &e, 3.0)?;
        println!("  distorted HWI (q=3): {:.4e} <= {:.4e}", d.check.lhs, d.check.rhs);
    }
    let a = Density1D::gaussian(1.0)?;
    let b = Density1D::gaussian(4.0)?;
    println!("W2(N(0,1), N(0,4)) = {:.10} (exact 1)", wasserstein_exact(&a, &b, 2.0)?);
    Ok(())
}
