use crate::error::{invalid, Error, Result};
use crate::numerics::{graded_breaks, GaussLegendre};
use crate::sphere::{spherical_fisher_marginal, SphereDensity};

/// Which Fisher information controls the polar region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Line Fisher information of `Π_1`, through `sup Π_1 <= I(Π_1)^{1/2}`.
    I,
    /// Spherical Fisher information of the first marginal on the sphere.
    II,
}

impl Variant {
    pub fn tag(self) -> &'static str {
        match self {
            Variant::I => "i",
            Variant::II => "ii",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectionConstants {
    pub p: f64,
    /// `(∫_{|x|<1} |log(1-x²)|^{p/(p-1)} dx)^{(p-1)/p}`.
    pub c_p: f64,
    pub beta: f64,
    /// `ε_N = N^{-β}`.
    pub epsilon: f64,
    /// `(sup_{[0, ε_N]} x (log x)²)^{1/2}`.
    pub l_n: f64,
}

/// `∫_0^1 |log(1-x²)|^r dx` after `x = 1 - e^{-s}`.
fn half_log_integral(r: f64) -> f64 {
    let upper = 80.0 + 8.0 * r;
    let gl = GaussLegendre::new(20);
    let breaks = graded_breaks(0.0, upper, (4.0 * upper) as usize, 30, 0);
    breaks
        .windows(2)
        .map(|w| {
            gl.integrate(w[0], w[1], |s| {
                let e = (-s).exp();
                // log(1 - x²) = log((1-x)(1+x)) = -s + log(2 - e^{-s})
                let l = -s + (2.0 - e).ln();
                l.abs().powf(r) * e
            })
        })
        .sum()
}

pub fn correction_constants(p: f64, n: usize, beta: f64) -> Result<CorrectionConstants> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(invalid(format!("correction constants need p>1, got p={p}")));
    }
    if !(beta > 0.0) {
        return Err(invalid(format!("correction constants need beta>0, got beta={beta}")));
    }
    let r = p / (p - 1.0);
    let c_p = (2.0 * half_log_integral(r)).powf(1.0 / r);
    let epsilon = (n as f64).powf(-beta);
    // x (log x)² increases on [0, e^{-2}] and peaks there at 4e^{-2}
    let l_sq = if epsilon <= (-2.0f64).exp() { epsilon * epsilon.ln().powi(2) } else { 4.0 * (-2.0f64).exp() };
    Ok(CorrectionConstants { p, c_p, beta, epsilon, l_n: l_sq.sqrt() })
}

/// `-½ M_2(Π_1) - ((N-3)/2) ∫ Π_1 log(1-v²/N)` against its explicit bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectionCheck {
    pub variant: Variant,
    pub lhs: f64,
    pub rhs: f64,
    /// `M_k / (2 N^{k/2-1} ε_N)`, the bulk part of the bound.
    pub bulk: f64,
    /// The polar part of the bound.
    pub polar: f64,
    pub constants: CorrectionConstants,
}

impl CorrectionCheck {
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

pub fn correction_bound_check(sphere: &SphereDensity, k: f64, beta: f64, p: f64, variant: Variant) -> Result<CorrectionCheck> {
    let n = sphere.n();
    let nf = n as f64;
    let m1 = sphere.marginal1()?;
    let constants = correction_constants(p, n, beta)?;
    let eps = constants.epsilon;
    if eps >= 1.0 {
        return Err(invalid(format!("epsilon_N = {eps} must be below 1")));
    }
    let mk = m1.moment(k);
    let lhs = -0.5 * m1.moment(2.0) - 0.5 * (nf - 3.0) * m1.expect(|v| (-v * v / nf).ln_1p());
    let bulk = mk / (2.0 * nf.powf(0.5 * k - 1.0) * eps);
    let polar = match variant {
        Variant::I => {
            let fisher = m1.fisher_information()?;
            if !fisher.is_finite() {
                return Err(Error::Numerical(format!("line Fisher information of {} is infinite", m1.label())));
            }
            fisher.powf((p - 1.0) / (2.0 * p)) * mk.powf(1.0 / p) * constants.c_p
                / (2.0 * (1.0 - eps).powf(k / (2.0 * p)) * nf.powf(0.5 * ((k + 1.0) / p - 3.0)))
        }
        Variant::II => {
            if n <= 3 {
                return Err(invalid("the spherical correction bound needs N>3"));
            }
            let i_n = spherical_fisher_marginal(sphere)?.value;
            if !i_n.is_finite() {
                return Err(Error::Numerical(format!("spherical Fisher information of {} is infinite", sphere.label())));
            }
            nf / (2.0 * (nf - 3.0) * (1.0 - eps).powf(0.25 * k + 0.5))
                * (i_n + 2.0 * (nf - 3.0) / nf).max(0.0).sqrt()
                * constants.l_n
                / nf.powf(0.25 * k - 0.5)
                * mk.sqrt()
        }
    };
    Ok(CorrectionCheck { variant, lhs, rhs: bulk + polar, bulk, polar, constants })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density1d::Density1D;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn c2_closed_form() {
        // ∫_0^1 log²(1-x²) = 8 - π²/3 - 8 ln 2 + 4 ln² 2
        let l2 = 2f64.ln();
        let half = 8.0 - PI * PI / 3.0 - 8.0 * l2 + 4.0 * l2 * l2;
        let c = correction_constants(2.0, 10, 1.0).unwrap();
        assert_abs_diff_eq!(c.c_p, (2.0 * half).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn c_p_against_fine_midpoint_rule() {
        // x = sin θ turns log(1-x²) into 2 log cos θ; plain midpoint rule on (0, π/2)
        for p in [1.5f64, 3.0] {
            let r = p / (p - 1.0);
            let m = 2_000_000;
            let h = 0.5 * PI / m as f64;
            let half: f64 = (0..m)
                .map(|i| {
                    let th = (i as f64 + 0.5) * h;
                    (2.0 * th.cos().ln()).abs().powf(r) * th.cos() * h
                })
                .sum();
            let c = correction_constants(p, 10, 1.0).unwrap();
            assert_abs_diff_eq!(c.c_p, (2.0 * half).powf(1.0 / r), epsilon = 1e-8);
        }
    }

    #[test]
    fn l_n_branches() {
        let c = correction_constants(1.5, 100, 1.0).unwrap();
        assert_abs_diff_eq!(c.epsilon, 0.01, epsilon = 1e-15);
        assert_abs_diff_eq!(c.l_n * c.l_n, 0.01 * 100f64.ln().powi(2), epsilon = 1e-14);
        assert_abs_diff_eq!(c.l_n, 0.4606, epsilon = 1e-4);
        let c = correction_constants(1.5, 100, 0.1).unwrap();
        assert_abs_diff_eq!(c.l_n * c.l_n, 4.0 * (-2.0f64).exp(), epsilon = 1e-15);
        assert!(correction_constants(1.0, 100, 0.5).is_err());
    }

    #[test]
    fn bounds_hold() {
        let g = SphereDensity::conditioned(Density1D::standard_gaussian(), 64).unwrap();
        let u = SphereDensity::uniform(32).unwrap();
        let b = SphereDensity::conditioned(Density1D::bump(1.0).unwrap(), 16).unwrap();
        for s in [&g, &u, &b] {
            for v in [Variant::I, Variant::II] {
                let c = correction_bound_check(s, 4.0, 0.5, 1.5, v).unwrap();
                assert!(c.slack() >= -1e-8, "{} {v:?}: {c:?}", s.label());
            }
        }
    }
}
