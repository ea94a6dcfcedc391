//! The Euclidean extension `F̃_N(v) = F_N(√N v/|v|) γ_N(v)` and its identities.
//!
//! Under `F̃_N` a point is `Y Θ / √N` with `Θ ~ F_N dσ^N` and an independent
//! radius `Y ~ χ_N`, which gives the line marginal as a one-dimensional mixture.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::density1d::{Density1D, ATOM_FLOOR};
use crate::error::{Error, Result};
use crate::numerics::special::ln_area;
use crate::numerics::{gamma_ratio_factor, GaussLegendre, Grid1D};
use crate::sphere::{spherical_entropy, SphereDensity};

const ORDER: usize = 16;
const V_PANEL: f64 = 0.25;
const Y_PANEL: f64 = 0.5;
const RADIAL_SPAN: f64 = 12.0;
const EDGE_GRADING: usize = 12;

/// `Π_1(F̃_N)` with the discrepancy between its two evaluation routes.
#[derive(Debug, Clone)]
pub struct ExtensionMarginal {
    pub density: Density1D,
    /// Largest `|route A - route B|` over the checked nodes.
    pub route_discrepancy: f64,
    pub n: usize,
}

/// `log c_N` for the `χ_N` density `c_N y^{N-1} e^{-y²/2}`.
fn ln_chi_constant(n: usize) -> f64 {
    ln_area(n) - 0.5 * n as f64 * (2.0 * PI).ln()
}

/// Support of the radius `Y ~ χ_N` kept in quadratures.
fn radial_range(n: usize) -> (f64, f64) {
    let c = (n as f64 - 1.0).sqrt();
    ((c - RADIAL_SPAN).max(0.0), c + RADIAL_SPAN)
}

/// Sorted panel breaks on `[lo, hi]` containing `extra` and of width at most `width`.
fn breaks_with(lo: f64, hi: f64, extra: impl IntoIterator<Item = f64>, width: f64) -> Vec<f64> {
    let mut knots: Vec<f64> = extra.into_iter().filter(|&b| b > lo && b < hi).collect();
    knots.push(lo);
    knots.push(hi);
    knots.sort_by(f64::total_cmp);
    knots.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let mut out = vec![knots[0]];
    for w in knots.windows(2) {
        let m = ((w[1] - w[0]) / width).ceil().max(1.0) as usize;
        for j in 1..=m {
            out.push(w[0] + (w[1] - w[0]) * j as f64 / m as f64);
        }
    }
    out
}

struct Kernel<'a> {
    n: usize,
    p1: &'a Density1D,
    knots: Vec<f64>,
    ln_c: f64,
    rule: GaussLegendre,
    y_range: (f64, f64),
}

impl<'a> Kernel<'a> {
    fn new(sphere: &'a SphereDensity) -> Result<Self> {
        let n = sphere.n();
        let p1 = sphere.marginal1()?;
        let knots = p1.grid().breaks().iter().copied().filter(|b| b.abs() > 1e-12).map(f64::abs).collect();
        Ok(Self { n, p1, knots, ln_c: ln_chi_constant(n), rule: GaussLegendre::new(ORDER), y_range: radial_range(n) })
    }

    /// Breaks in `y` where `√N v / y` crosses a knot of `Π_1`.
    fn y_breaks(&self, v: f64) -> Vec<f64> {
        let s = (self.n as f64).sqrt() * v.abs();
        let (lo, hi) = self.y_range;
        breaks_with(lo, hi, self.knots.iter().map(|&x| s / x), Y_PANEL)
    }

    /// Route B: `∫ χ_N(y) (√N/y) Π_1(√N v/y) dy`.
    fn route_b(&self, v: f64) -> f64 {
        let nf = self.n as f64;
        let rn = nf.sqrt();
        let mut acc = 0.0;
        for w in self.y_breaks(v).windows(2) {
            acc += self.rule.integrate(w[0], w[1], |y| {
                if y <= 0.0 {
                    return 0.0;
                }
                let p = self.p1.pdf(rn * v / y);
                if p <= 0.0 {
                    return 0.0;
                }
                (self.ln_c + (nf - 1.0) * y.ln() - 0.5 * y * y).exp() * rn / y * p
            });
        }
        acc
    }

    /// Route A: the same integral written in `x = √N v / y` with the
    /// prefactor `|S^{N-1}| N^{N/2} (2π)^{-N/2}` and kernel `|v|^{N-1} x^{-N} e^{-N v²/(2x²)}`.
    fn route_a(&self, v: f64) -> f64 {
        let nf = self.n as f64;
        let a = v.abs();
        let sign = v.signum();
        let ln_pref = ln_area(self.n) + 0.5 * nf * nf.ln() - 0.5 * nf * (2.0 * PI).ln();
        let rn = nf.sqrt();
        let mut xs: Vec<f64> = self.y_breaks(v).iter().filter(|&&y| y > 0.0).map(|&y| rn * a / y).collect();
        xs.reverse();
        let mut acc = 0.0;
        for w in xs.windows(2) {
            acc += self.rule.integrate(w[0], w[1], |x| {
                let p = self.p1.pdf(sign * x);
                if p <= 0.0 || x <= 0.0 {
                    return 0.0;
                }
                (ln_pref + (nf - 1.0) * a.ln() - nf * x.ln() - nf * a * a / (2.0 * x * x)).exp() * p
            });
        }
        acc
    }
}

/// Line marginal of the Euclidean extension on `[-v_cut, v_cut]`.
pub fn extension_marginal1(sphere: &SphereDensity) -> Result<ExtensionMarginal> {
    let n = sphere.n();
    let nf = n as f64;
    let kernel = Kernel::new(sphere)?;
    let (xa, xb) = kernel.p1.support();
    let xmax = xa.abs().max(xb.abs());
    let v_cut = (nf.sqrt() + RADIAL_SPAN).min(xmax * kernel.y_range.1 / nf.sqrt());
    let grid = Grid1D::from_knots(&[-v_cut, 0.0, v_cut], V_PANEL, ORDER, 0)?;
    let values: Vec<f64> = grid.points().par_iter().map(|&v| kernel.route_b(v)).collect();

    let check: Vec<usize> = (0..grid.len()).step_by(7).filter(|&i| grid.points()[i].abs() > 1e-3).collect();
    let route_discrepancy = check
        .par_iter()
        .map(|&i| (kernel.route_a(grid.points()[i]) - values[i]).abs())
        .reduce(|| 0.0, f64::max);

    // drop outer panels on which the marginal underflows
    let np = grid.n_panels();
    let live = |i: usize| values[grid.panel_nodes(i)].iter().any(|&x| x > 1e-300);
    let first = (0..np).find(|&i| live(i)).ok_or_else(|| Error::Numerical("extension marginal vanishes".into()))?;
    let last = (0..np).rev().find(|&i| live(i)).unwrap();
    let breaks = grid.breaks()[first..=last + 1].to_vec();
    let kept = values[grid.panel_nodes(first).start..grid.panel_nodes(last).end].to_vec();
    let grid = Grid1D::from_breaks(breaks, ORDER)?;
    let density = Density1D::new(grid, kept, None, format!("extension marginal1({}, N={n})", sphere.label()))?;
    Ok(ExtensionMarginal { density, route_discrepancy, n })
}

/// Outcome of the moment identity `M_k(Π_1(F̃)) = G(N,k) M_k(Π_1(F))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentIdentity {
    pub k: f64,
    pub extension_moment: f64,
    pub sphere_moment: f64,
    pub factor: f64,
    /// Relative slack `|M_k(ext) - G M_k(Π_1)| / M_k(Π_1)`.
    pub slack: f64,
}

pub fn extension_moment_identity_check(sphere: &SphereDensity, ext: &ExtensionMarginal, k: f64) -> Result<MomentIdentity> {
    let m1 = sphere.marginal1()?;
    let sphere_moment = m1.moment(k);
    let extension_moment = ext.density.moment(k);
    let factor = gamma_ratio_factor(sphere.n(), k);
    let slack = (extension_moment - factor * sphere_moment).abs() / sphere_moment;
    Ok(MomentIdentity { k, extension_moment, sphere_moment, factor, slack })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyConsistency {
    /// `H(F̃_N | γ_N)` from a quadrature of the joint law of `(v_1, |v_{2..N}|)`.
    pub extension_entropy: f64,
    /// `H_N(F_N)`.
    pub spherical_entropy: f64,
    /// Mass of the joint law seen by the quadrature.
    pub joint_mass: f64,
    pub slack: f64,
}

/// `H(F̃_N|γ_N)` against `H_N(F_N)`.
///
/// The extension side integrates `N log f(√N v/ρ)` against the joint density
/// `p(v, r) = |S^{N-1}| √N Π_1(√N v/ρ) r ρ^{N-3} e^{-ρ²/2} (2π)^{-N/2}`, `ρ² = v² + r²`,
/// on a `(v, r)` grid unrelated to the sphere quadrature.
pub fn extension_entropy_consistency(sphere: &SphereDensity) -> Result<EntropyConsistency> {
    let h_n = spherical_entropy(sphere)?;
    let c = match sphere.conditioned_parts() {
        None => {
            return Ok(EntropyConsistency { extension_entropy: 0.0, spherical_entropy: h_n, joint_mass: 1.0, slack: h_n.abs() })
        }
        Some(c) => c,
    };
    let n = sphere.n();
    let nf = n as f64;
    let rn = nf.sqrt();
    let f = c.base();
    let p1 = sphere.marginal1()?;
    let knots: Vec<f64> = p1.grid().breaks().iter().map(|b| b.abs()).filter(|&b| b > 1e-12).collect();
    let (xa, xb) = p1.support();
    let xmax = xa.abs().max(xb.abs());
    let (rho_lo, rho_hi) = radial_range(n);
    let v_cut = xmax * rho_hi / rn;
    let ln_pref = ln_area(n) + 0.5 * nf.ln() - 0.5 * nf * (2.0 * PI).ln();
    let rule = GaussLegendre::new(ORDER);
    let vgrid = Grid1D::from_knots(&[-v_cut, 0.0, v_cut], V_PANEL, ORDER, 0)?;

    let column = |v: f64| -> (f64, f64) {
        let r_lo = (rho_lo * rho_lo - v * v).max(0.0).sqrt();
        let r_hi = (rho_hi * rho_hi - v * v).max(0.0).sqrt();
        if r_hi <= r_lo {
            return (0.0, 0.0);
        }
        // r at which |√N v/ρ| equals a knot x_b
        let r_of = |x: f64| if x >= rn { 0.0 } else { v.abs() * (nf / (x * x) - 1.0).sqrt() };
        let edge = r_of(xmax).max(r_lo);
        let mut br = breaks_with(r_lo, r_hi, knots.iter().map(|&x| r_of(x)), Y_PANEL);
        // geometric refinement next to the support edge of f
        if edge > r_lo && edge < r_hi {
            let i = br.partition_point(|&b| b <= edge);
            let next = br.get(i).copied().unwrap_or(r_hi);
            for j in 1..=EDGE_GRADING {
                br.push(edge + (next - edge) * 0.5f64.powi(j as i32));
            }
            br.sort_by(f64::total_cmp);
        }
        let mut mass = 0.0;
        let mut ent = 0.0;
        for w in br.windows(2) {
            let half = 0.5 * (w[1] - w[0]);
            let mid = 0.5 * (w[1] + w[0]);
            for (&t, &wt) in rule.nodes().iter().zip(rule.weights()) {
                let r = mid + half * t;
                let rho = (v * v + r * r).sqrt();
                let x = rn * v / rho;
                let p = p1.pdf(x);
                if p <= ATOM_FLOOR {
                    continue;
                }
                let dens = p * (ln_pref + r.ln() + (nf - 3.0) * rho.ln() - 0.5 * rho * rho).exp();
                let fx = f.pdf(x);
                mass += half * wt * dens;
                if fx > ATOM_FLOOR {
                    ent += half * wt * dens * fx.ln();
                }
            }
        }
        (mass, ent)
    };
    let cols: Vec<(f64, f64)> = vgrid.points().par_iter().map(|&v| column(v)).collect();
    let joint_mass: f64 = cols.iter().zip(vgrid.weights()).map(|(c, w)| w * c.0).sum();
    let e_log_f: f64 = cols.iter().zip(vgrid.weights()).map(|(c, w)| w * c.1).sum();
    let extension_entropy = nf * e_log_f - c.curve().log_z(nf);
    Ok(EntropyConsistency {
        extension_entropy,
        spherical_entropy: h_n,
        joint_mass,
        slack: (extension_entropy - h_n).abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Superadditivity {
    pub spherical_entropy: f64,
    /// `N H(Π_1(F̃_N) | γ)`.
    pub marginal_sum: f64,
    pub slack: f64,
}

/// `H_N(F_N) - N H(Π_1(F̃_N)|γ) >= 0`.
pub fn euclidean_superadditivity_check(sphere: &SphereDensity, ext: &ExtensionMarginal) -> Result<Superadditivity> {
    let h_n = spherical_entropy(sphere)?;
    let marginal_sum = sphere.n() as f64 * ext.density.relative_entropy_gaussian();
    Ok(Superadditivity { spherical_entropy: h_n, marginal_sum, slack: h_n - marginal_sum })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_extension_is_gaussian() {
        for n in [8usize, 40] {
            let s = SphereDensity::uniform(n).unwrap();
            let e = extension_marginal1(&s).unwrap();
            let worst = e
                .density
                .grid()
                .points()
                .iter()
                .zip(e.density.values())
                .map(|(&v, &p)| (p - (-0.5 * v * v).exp() / (2.0 * PI).sqrt()).abs())
                .fold(0.0, f64::max);
            assert!(worst < 1e-6, "N={n}: {worst:e}");
            assert!((1.0 / e.density.renormalization() - 1.0).abs() < 1e-6);
            assert!(e.route_discrepancy < 1e-6);
        }
    }

    #[test]
    fn uniform_fourth_moment_identity() {
        let s = SphereDensity::uniform(8).unwrap();
        let e = extension_marginal1(&s).unwrap();
        let id = extension_moment_identity_check(&s, &e, 4.0).unwrap();
        // quadrature of the sphere marginal, not the hand value 3N/(N+2)
        assert!((id.sphere_moment - 2.4).abs() < 1e-8);
        assert!((id.extension_moment - 3.0).abs() < 1e-7);
        assert!((id.factor - 1.25).abs() < 1e-12);
        assert!(id.slack < 1e-6);
    }

    #[test]
    fn superadditivity_uniform() {
        let s = SphereDensity::uniform(16).unwrap();
        let e = extension_marginal1(&s).unwrap();
        let sa = euclidean_superadditivity_check(&s, &e).unwrap();
        assert!(sa.slack.abs() < 1e-8);
        let ec = extension_entropy_consistency(&s).unwrap();
        assert_eq!(ec.slack, 0.0);
    }

    #[test]
    fn bump_entropy_consistency() {
        let s = SphereDensity::conditioned(crate::density1d::Density1D::bump(1.0).unwrap(), 32).unwrap();
        let ec = extension_entropy_consistency(&s).unwrap();
        assert!(ec.slack < 1e-7, "{ec:?}");
        assert!((ec.joint_mass - 1.0).abs() < 1e-8);
    }
}
