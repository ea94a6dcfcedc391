//! Normalization curves `log Z_N(f, √u)` and the deviation `λ_N`.
//!
//! `cargo run --release --example zcurve`

use std::f64::consts::PI;

use kacsphere::density1d::Density1D;
use kacsphere::numerics::ConvolutionOptions;
use kacsphere::sphere::build_zcurve;

fn main() -> kacsphere::Result<()> {
    let opts = ConvolutionOptions::default();

    let g = Density1D::standard_gaussian();
    for n in [8usize, 32, 128] {
        let c = build_zcurve(&g, n, &opts)?;
        let nf = n as f64;
        println!("gaussian N={n}");
        for u in [0.5 * nf, nf, 2.0 * nf] {
            let closed = -0.5 * nf * (2.0 * PI).ln() - 0.5 * u;
            println!("  u={u:>6}  log Z={:.10}  closed form={closed:.10}", c.log_z(u));
        }
    }

    let bump = Density1D::bump(1.0)?;
    for n in [16usize, 64, 256] {
        let c = build_zcurve(&bump, n, &opts)?;
        println!("bump N={n:>3}  Sigma^2={:.4}  sup|lambda|={:.4e}  lambda(N)={:.4e}", c.sigma_sq(), c.sup_abs_lambda(), c.lambda(n as f64));
    }
    Ok(())
}
