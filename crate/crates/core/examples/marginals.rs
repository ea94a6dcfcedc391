//! First and second marginals of uniform and conditioned sphere densities.
//!
//! `cargo run --release --example marginals`

use kacsphere::density1d::Density1D;
use kacsphere::sphere::{line_from_sphere_marginal, marginal2, sphere_marginal_from_line, SphereDensity};

fn main() -> kacsphere::Result<()> {
    for n in [3usize, 10, 1000] {
        let s = SphereDensity::uniform(n)?;
        let m = s.marginal1()?;
        println!("uniform N={n:>4}  pi_1(0)={:.8}  mass={:.12}", m.pdf(0.0), m.mass());
    }

    let s = SphereDensity::conditioned(Density1D::bump(1.0)?, 16)?;
    let m1 = s.marginal1()?;
    println!("bump N=16  pi_1(0)={:.8}  M_2={:.10}  M_4={:.6}", m1.pdf(0.0), m1.moment(2.0), m1.moment(4.0));

    let m2 = marginal2(&s)?;
    let worst = m2.row_marginal().iter().map(|&(v, p)| (p - m1.pdf(v)).abs()).fold(0.0, f64::max);
    println!("second marginal: mass={:.10}  sup |int pi_2 dv2 - pi_1|={worst:.2e}", m2.mass());

    let on_sphere = sphere_marginal_from_line(m1, 16)?;
    let back = line_from_sphere_marginal(&on_sphere, 16)?;
    let round = back.values().iter().zip(m1.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("sphere <-> line round trip: sup error {round:.2e}");
    Ok(())
}
