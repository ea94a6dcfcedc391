//! One-dimensional optimal transport and the transport-side bounds.
//!
//! On the line the quantile coupling is optimal, so
//! `W_q(f, g) = (∫_0^1 |F^{-1}(t) - G^{-1}(t)|^q dt)^{1/q}`.

use std::sync::{Arc, Mutex};

use crate::density1d::{pole_control, relative_fisher_gaussian, Density1D};
use crate::error::{invalid, Error, Result};
use crate::extension::ExtensionMarginal;
use crate::numerics::special::ln_area;
use crate::numerics::GaussLegendre;
use crate::sphere::{spherical_fisher_marginal, SphereDensity};

/// Nodes of the first quantile rule; the check uses twice as many.
pub const BASE_RESOLUTION: usize = 1 << 16;
/// Largest `t`-rule tried before giving up on refinement.
pub const MAX_RESOLUTION: usize = 1 << 20;
pub const REFINE_TOL: f64 = 1e-6;
/// Tolerance for transport bounds that are exact inequalities.
pub const BOUND_TOL: f64 = 1e-9;
/// Tolerance for the HWI comparisons.
pub const HWI_TOL: f64 = 1e-8;

const T_ORDER: usize = 8;
const END_LEVELS: usize = 40;

/// A named inequality `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
}

impl BoundCheck {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self { name: name.into(), lhs, rhs }
    }

    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.slack() >= -tol
    }
}

/// An exact `W_q` value with the bounds it was checked against.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportReport {
    pub q: f64,
    pub exact: f64,
    pub bounds: Vec<(String, f64)>,
    /// Derived quantities reported alongside, such as the measured `τ̂_N`.
    pub diagnostics: Vec<(String, f64)>,
}

impl TransportReport {
    pub fn slacks(&self) -> impl Iterator<Item = (&str, f64)> + '_ {
        self.bounds.iter().map(move |(n, b)| (n.as_str(), b - self.exact))
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.slacks().all(|(_, s)| s >= -tol)
    }

    pub fn diagnostic(&self, name: &str) -> Option<f64> {
        self.diagnostics.iter().find(|(n, _)| n == name).map(|&(_, v)| v)
    }
}

/// Gauss–Legendre nodes on `(0, 1)` with `panels` uniform panels whose end
/// panels are split geometrically toward `0` and `1`; nodes ascending.
fn build_t_rule(panels: usize) -> TRule {
    let gl = GaussLegendre::new(T_ORDER);
    let h = 1.0 / panels as f64;
    let mut breaks = Vec::with_capacity(panels + 2 * END_LEVELS + 1);
    breaks.push(0.0);
    for j in (1..=END_LEVELS).rev() {
        breaks.push(h * 0.5f64.powi(j as i32));
    }
    for i in 1..panels {
        breaks.push(i as f64 * h);
    }
    for j in 0..=END_LEVELS {
        breaks.push(1.0 - h * 0.5f64.powi(j as i32));
    }
    breaks.push(1.0);
    breaks.dedup();
    let mut pairs = Vec::with_capacity(breaks.len() * T_ORDER);
    for w in breaks.windows(2) {
        let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
        for (&x, &wt) in gl.nodes().iter().zip(gl.weights()) {
            pairs.push((mid + half * x, half * wt));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (ts, ws) = pairs.into_iter().unzip();
    TRule { ts: Arc::new(ts), ws }
}

struct TRule {
    ts: Arc<Vec<f64>>,
    ws: Vec<f64>,
}

fn t_rule(nodes: usize) -> Arc<TRule> {
    static RULES: Mutex<Vec<(usize, Arc<TRule>)>> = Mutex::new(Vec::new());
    let mut rules = RULES.lock().unwrap();
    if let Some((_, r)) = rules.iter().find(|(n, _)| *n == nodes) {
        return r.clone();
    }
    let r = Arc::new(build_t_rule((nodes / T_ORDER).max(1)));
    rules.push((nodes, r.clone()));
    r
}

fn wq_at(f: &Density1D, g: &Density1D, q: f64, nodes: usize) -> f64 {
    let rule = t_rule(nodes);
    let qf = f.cached_quantiles(nodes, || rule.ts.clone());
    let qg = g.cached_quantiles(nodes, || rule.ts.clone());
    let sum: f64 = rule.ws.iter().zip(qf.iter().zip(qg.iter())).map(|(w, (a, b))| w * (a - b).abs().powf(q)).sum();
    sum.max(0.0).powf(1.0 / q)
}

/// `W_q(f, g)` by the quantile coupling, refined until two resolutions agree.
pub fn wasserstein_exact(f: &Density1D, g: &Density1D, q: f64) -> Result<f64> {
    if !(q >= 1.0) || !q.is_finite() {
        return Err(invalid(format!("Wasserstein order must satisfy q >= 1, got {q}")));
    }
    let mut n = BASE_RESOLUTION;
    let mut coarse = wq_at(f, g, q, n);
    loop {
        let fine = wq_at(f, g, q, 2 * n);
        if (fine - coarse).abs() <= REFINE_TOL {
            return Ok(fine);
        }
        n *= 2;
        if 2 * n > MAX_RESOLUTION {
            return Err(Error::Numerical(format!(
                "W_{q} between {} and {} not stable under refinement ({coarse} vs {fine})",
                f.label(),
                g.label()
            )));
        }
        coarse = fine;
    }
}

/// `B_1 = (2 M_2)^{1/2} (1 - √(2π/N) |S^{N-1}|/|S^N|)^{1/2}` for the marginal pair.
///
/// Reports `tau_hat = B_1 √(2N/M_2) - 1` as a diagnostic.
pub fn w1_sphere_bound(sphere: &SphereDensity, ext: &ExtensionMarginal) -> Result<TransportReport> {
    let n = sphere.n();
    let nf = n as f64;
    let p1 = sphere.marginal1()?;
    let m2 = p1.moment(2.0);
    // ln of √(2π/N) |S^{N-1}| / |S^N| with |S^{d-1}| the area of the unit sphere in R^d
    let ln_ratio = 0.5 * (2.0 * std::f64::consts::PI / nf).ln() + ln_area(n) - ln_area(n + 1);
    let gap = -ln_ratio.exp_m1();
    let b1 = (2.0 * m2 * gap).sqrt();
    let exact = wasserstein_exact(p1, &ext.density, 1.0)?;
    Ok(TransportReport {
        q: 1.0,
        exact,
        bounds: vec![("w1_sphere".into(), b1)],
        diagnostics: vec![("tau_hat".into(), b1 * (2.0 * nf / m2).sqrt() - 1.0), ("m2".into(), m2)],
    })
}

/// `2^{1+1/q} ℳ_k^{1/k} W_1^{1/q-1/k}` with `ℳ_k = ∫(1+v²)^{k/2}(f + g)`.
pub fn hm_lift_value(f: &Density1D, g: &Density1D, q: f64, k: f64, w1: f64) -> f64 {
    let mk = f.expect(|v| (1.0 + v * v).powf(0.5 * k)) + g.expect(|v| (1.0 + v * v).powf(0.5 * k));
    2f64.powf(1.0 + 1.0 / q) * mk.powf(1.0 / k) * w1.powf(1.0 / q - 1.0 / k)
}

/// Bounds `W_q(f, g)` by the lift of `W_1` under `k`-th moment control.
pub fn hm_lift_bound(f: &Density1D, g: &Density1D, q: f64, k: f64) -> Result<TransportReport> {
    if !(q >= 2.0 && q < k) {
        return Err(invalid(format!("moment lift needs 2<=q<k, got q={q}, k={k}")));
    }
    let w1 = wasserstein_exact(f, g, 1.0)?;
    let exact = wasserstein_exact(f, g, q)?;
    Ok(TransportReport {
        q,
        exact,
        bounds: vec![("hm_lift".into(), hm_lift_value(f, g, q, k, w1))],
        diagnostics: vec![("w1".into(), w1)],
    })
}

/// `R^q min(|x-y|, 1) + 2^k R^{q-k}(|x|^k + |y|^k) - |x-y|^q`.
pub fn pointwise_wq_inequality_check(x: f64, y: f64, r: f64, q: f64, k: f64) -> f64 {
    let d = (x - y).abs();
    r.powf(q) * d.min(1.0) + 2f64.powf(k) * r.powf(q - k) * (x.abs().powf(k) + y.abs().powf(k)) - d.powf(q)
}

/// `H(f|γ) <= H(g|γ) + √I(f|γ) W_2(f, g)`.
pub fn hwi_check(f: &Density1D, g: &Density1D) -> Result<BoundCheck> {
    let fisher = relative_fisher_gaussian(f)?;
    if !fisher.is_finite() {
        return Err(Error::Numerical(format!("relative Fisher information of {} is infinite", f.label())));
    }
    let w2 = wasserstein_exact(f, g, 2.0)?;
    Ok(BoundCheck::new(
        "hwi",
        f.relative_entropy_gaussian(),
        g.relative_entropy_gaussian() + fisher.max(0.0).sqrt() * w2,
    ))
}

/// The Hölder form of HWI for the marginal pair of a sphere density.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortedHwi {
    pub q: f64,
    /// `H(Π_1|γ) <= H(Π_1(F̃)|γ) + 2^{1/q} bracket^{(q-1)/q} W_q`.
    pub check: BoundCheck,
    /// `(T_1)^{q/(2(q-1))} P_q^{(q-2)/(2(q-1))} + 1 + M_2`.
    pub bracket: f64,
    pub pole_control: f64,
    pub wq: f64,
    /// `T_1 <= I_N(F_1^{(N)}) + 2(N-3)/N`.
    pub fisher_comparison: BoundCheck,
}

pub fn distorted_hwi_value(t1: f64, pole: f64, m2: f64, q: f64, wq: f64) -> f64 {
    let bracket = t1.powf(q / (2.0 * (q - 1.0))) * pole.powf((q - 2.0) / (2.0 * (q - 1.0))) + 1.0 + m2;
    2f64.powf(1.0 / q) * bracket.powf((q - 1.0) / q) * wq
}

pub fn distorted_hwi_check(sphere: &SphereDensity, ext: &ExtensionMarginal, q: f64) -> Result<DistortedHwi> {
    if !(q > 2.0) {
        return Err(invalid(format!("distorted HWI needs q > 2, got {q}")));
    }
    let n = sphere.n();
    let nf = n as f64;
    let p1 = sphere.marginal1()?;
    let pole = pole_control(p1, n, q)?;
    if !pole.is_finite() {
        return Err(Error::Numerical(format!("pole control P_{q} diverges for {}", sphere.label())));
    }
    let sf = spherical_fisher_marginal(sphere)?;
    if !sf.value.is_finite() || !sf.damped_fisher.is_finite() {
        return Err(Error::Numerical(format!("spherical Fisher information of {} is infinite", sphere.label())));
    }
    let m2 = p1.moment(2.0);
    let wq = wasserstein_exact(p1, &ext.density, q)?;
    let t1 = sf.damped_fisher;
    let bracket = t1.powf(q / (2.0 * (q - 1.0))) * pole.powf((q - 2.0) / (2.0 * (q - 1.0))) + 1.0 + m2;
    let rhs = ext.density.relative_entropy_gaussian() + distorted_hwi_value(t1, pole, m2, q, wq);
    Ok(DistortedHwi {
        q,
        check: BoundCheck::new("distorted_hwi", p1.relative_entropy_gaussian(), rhs),
        bracket,
        pole_control: pole,
        wq,
        fisher_comparison: BoundCheck::new("damped_fisher", t1, sf.value + 2.0 * (nf - 3.0) / nf),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identical_densities() {
        let b = Density1D::bump(1.0).unwrap();
        assert_eq!(wasserstein_exact(&b, &b, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn shifted_uniforms() {
        let u = Density1D::uniform(0.0, 1.0).unwrap();
        let s = Density1D::uniform(0.3, 1.3).unwrap();
        for q in [1.0, 2.0, 3.5] {
            assert_abs_diff_eq!(wasserstein_exact(&u, &s, q).unwrap(), 0.3, epsilon = 1e-10);
        }
    }

    #[test]
    fn gaussian_scaling() {
        let g = Density1D::standard_gaussian();
        for var in [0.5f64, 2.0] {
            let h = Density1D::gaussian(var).unwrap();
            assert_abs_diff_eq!(wasserstein_exact(&g, &h, 2.0).unwrap(), (var.sqrt() - 1.0).abs(), epsilon = 1e-6);
            // W_1 of a scaling is |σ-1| E|Z|
            let e_abs = (2.0 / std::f64::consts::PI).sqrt();
            assert_abs_diff_eq!(wasserstein_exact(&g, &h, 1.0).unwrap(), (var.sqrt() - 1.0).abs() * e_abs, epsilon = 1e-6);
        }
    }

    #[test]
    fn rejects_small_order() {
        let g = Density1D::standard_gaussian();
        assert!(wasserstein_exact(&g, &g, 0.5).is_err());
        assert!(hm_lift_bound(&g, &g, 4.0, 4.0).is_err());
    }

    #[test]
    fn hm_lift_shifted_uniform() {
        let u = Density1D::uniform(0.0, 1.0).unwrap();
        let s = Density1D::uniform(0.1, 1.1).unwrap();
        let r = hm_lift_bound(&u, &s, 2.0, 4.0).unwrap();
        assert_abs_diff_eq!(r.exact, 0.1, epsilon = 1e-10);
        // ∫_a^{a+1} (1+v²)² dv in closed form
        let prim = |v: f64| v + 2.0 * v.powi(3) / 3.0 + v.powi(5) / 5.0;
        let mk = prim(1.0) - prim(0.0) + prim(1.1) - prim(0.1);
        let expect = 2f64.powf(1.5) * mk.powf(0.25) * 0.1f64.powf(0.25);
        assert_abs_diff_eq!(r.bounds[0].1, expect, epsilon = 1e-9);
        assert!(r.holds(BOUND_TOL));
    }

    #[test]
    fn pointwise_inequality_cases() {
        assert!(pointwise_wq_inequality_check(0.3, 0.9, 2.0, 3.0, 5.0) >= 0.0);
        let x: f64 = 1.7;
        let same = pointwise_wq_inequality_check(x, x, 3.0, 2.0, 4.0);
        assert_abs_diff_eq!(same, 16.0 * 3f64.powf(-2.0) * 2.0 * x.powi(4), epsilon = 1e-12);
    }

    #[test]
    fn hwi_gaussian_pair() {
        let f = Density1D::gaussian(2.0).unwrap();
        let g = Density1D::standard_gaussian();
        let c = hwi_check(&f, &g).unwrap();
        // H(f|γ) = (σ² - 1 - ln σ²)/2, I(f|γ) = (σ² - 1)²/σ², W_2 = σ - 1
        let s2: f64 = 2.0;
        assert_abs_diff_eq!(c.lhs, 0.5 * (s2 - 1.0 - s2.ln()), epsilon = 1e-8);
        assert_abs_diff_eq!(c.rhs, (s2 - 1.0) / s2.sqrt() * (s2.sqrt() - 1.0), epsilon = 1e-6);
        assert!(c.holds(HWI_TOL));
        let same = hwi_check(&f, &f).unwrap();
        assert_abs_diff_eq!(same.slack(), 0.0, epsilon = 1e-12);
    }
}
