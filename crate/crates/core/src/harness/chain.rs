use serde::{Deserialize, Serialize};

use super::corrections::{correction_bound_check, Variant};
use super::identities::{entropy_identity, IDENTITY_TOL};
use crate::density1d::relative_fisher_gaussian;
use crate::error::{invalid, Result};
use crate::extension::{euclidean_superadditivity_check, extension_marginal1};
use crate::sphere::{
    condition_row, partial_entropy_sum, spherical_entropy, spherical_fisher_marginal, ConditionRow, SphereDensity,
};
use crate::transport::{
    distorted_hwi_check, distorted_hwi_value, hm_lift_bound, hm_lift_value, hwi_check, w1_sphere_bound, BOUND_TOL, HWI_TOL,
};

/// Tolerance for the inequalities between entropies.
pub const ENTROPY_TOL: f64 = 1e-8;
/// Below this `H_N` the ratio is left undefined.
pub const RATIO_FLOOR: f64 = 1e-12;

/// Moment order `k`, Wasserstein order `q`, Hölder exponent `p` and `ε_N = N^{-β}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    pub k: f64,
    pub q: f64,
    pub p: f64,
    pub beta: f64,
}

impl Default for ChainParams {
    fn default() -> Self {
        Self { k: 4.0, q: 3.0, p: 1.5, beta: 0.5 }
    }
}

impl ChainParams {
    /// Checks `0<β<k/2-1`, `1<p<min((k+1)/3, k/2)` and `2<q<k`.
    pub fn validate(&self) -> Result<()> {
        let ChainParams { k, q, p, beta } = *self;
        if !(k > 2.0) || !k.is_finite() {
            return Err(invalid(format!("k={k} violates k>2")));
        }
        if !(q > 2.0 && q < k) {
            return Err(invalid(format!("q={q} violates 2<q<k with k={k}")));
        }
        let p_max = ((k + 1.0) / 3.0).min(k / 2.0);
        if !(p > 1.0 && p < p_max) {
            return Err(invalid(format!("p={p} violates 1<p<min((k+1)/3,k/2)={p_max}")));
        }
        if !(beta > 0.0 && beta < k / 2.0 - 1.0) {
            return Err(invalid(format!("beta={beta} violates 0<beta<k/2-1={}", k / 2.0 - 1.0)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    /// `lhs <= rhs`.
    Inequality,
    /// `lhs = rhs`.
    Identity,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepStatus {
    Pass,
    Fail,
    Skipped(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub name: String,
    pub kind: StepKind,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
    pub status: StepStatus,
}

impl StepRecord {
    fn evaluated(name: &str, kind: StepKind, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let mut r = Self { name: name.into(), kind, lhs, rhs, tolerance, status: StepStatus::Pass };
        if !(r.slack() >= -tolerance) {
            r.status = StepStatus::Fail;
        }
        r
    }

    fn skipped(name: &str, kind: StepKind, reason: String) -> Self {
        Self { name: name.into(), kind, lhs: f64::NAN, rhs: f64::NAN, tolerance: 0.0, status: StepStatus::Skipped(reason) }
    }

    /// `rhs - lhs` for inequalities, `-|rhs - lhs|` for identities.
    pub fn slack(&self) -> f64 {
        match self.kind {
            StepKind::Inequality => self.rhs - self.lhs,
            StepKind::Identity => -(self.rhs - self.lhs).abs(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == StepStatus::Pass
    }

    pub fn is_skipped(&self) -> bool {
        matches!(self.status, StepStatus::Skipped(_))
    }
}

#[derive(Debug, Clone)]
pub struct InequalityReport {
    pub n: usize,
    pub family: String,
    pub params: ChainParams,
    pub steps: Vec<StepRecord>,
    /// `Σ_j ∫ F_j log F_j dσ^N`.
    pub partial_entropy_sum: f64,
    /// `H_N(F_N)`.
    pub spherical_entropy: f64,
    pub ratio: Option<f64>,
    pub epsilon_hat: Option<f64>,
    pub conditions: Option<ConditionRow>,
}

impl InequalityReport {
    /// True when no evaluated step failed.
    pub fn all_pass(&self) -> bool {
        self.steps.iter().all(|s| s.status != StepStatus::Fail)
    }

    pub fn step(&self, name: &str) -> Option<&StepRecord> {
        self.steps.iter().find(|s| s.name == name)
    }

    pub fn failed_steps(&self) -> impl Iterator<Item = &StepRecord> {
        self.steps.iter().filter(|s| s.status == StepStatus::Fail)
    }
}

fn step_from(name: &str, kind: StepKind, tol: f64, r: Result<(f64, f64)>) -> StepRecord {
    match r {
        Ok((lhs, rhs)) => StepRecord::evaluated(name, kind, lhs, rhs, tol),
        Err(e) => StepRecord::skipped(name, kind, e.to_string()),
    }
}

/// Runs every step of the chain for one sphere density.
///
/// Invalid parameters are an error; a step whose preconditions fail is
/// recorded as skipped and the remaining steps still run.
pub fn verify_chain(sphere: &SphereDensity, params: &ChainParams) -> Result<InequalityReport> {
    params.validate()?;
    let ChainParams { k, q, p, beta } = *params;
    let n = sphere.n();
    let nf = n as f64;
    let h_n = spherical_entropy(sphere)?;
    let partial = partial_entropy_sum(sphere)?;
    let p1 = sphere.marginal1()?;
    let ext = extension_marginal1(sphere)?;
    let paths = entropy_identity(sphere)?;
    use StepKind::*;
    let mut steps = Vec::new();

    steps.push(StepRecord::evaluated("cll", Inequality, partial, 2.0 * h_n, ENTROPY_TOL));
    steps.push(step_from(
        "superadditivity",
        Inequality,
        ENTROPY_TOL,
        euclidean_superadditivity_check(sphere, &ext).map(|s| (s.marginal_sum, s.spherical_entropy)),
    ));
    let hwi = hwi_check(p1, &ext.density);
    steps.push(step_from("hwi", Inequality, HWI_TOL, hwi.as_ref().map(|c| (c.lhs, c.rhs)).map_err(Clone::clone)));
    let dhwi = distorted_hwi_check(sphere, &ext, q);
    steps.push(step_from("distorted_hwi", Inequality, HWI_TOL, dhwi.as_ref().map(|d| (d.check.lhs, d.check.rhs)).map_err(Clone::clone)));
    steps.push(step_from(
        "damped_fisher",
        Inequality,
        ENTROPY_TOL,
        dhwi.as_ref().map(|d| (d.fisher_comparison.lhs, d.fisher_comparison.rhs)).map_err(Clone::clone),
    ));
    let w1 = w1_sphere_bound(sphere, &ext);
    steps.push(step_from("w1_sphere", Inequality, BOUND_TOL, w1.as_ref().map(|r| (r.exact, r.bounds[0].1)).map_err(Clone::clone)));
    for qq in [2.0, q] {
        let name = format!("hm_lift_q{qq}");
        let r = hm_lift_bound(p1, &ext.density, qq, k).map(|r| (r.exact, r.bounds[0].1));
        steps.push(step_from(&name, Inequality, BOUND_TOL, r));
    }
    steps.push(StepRecord::evaluated("entropy_identity", Identity, paths.direct, paths.identity, IDENTITY_TOL));
    let corrections: Vec<_> = [Variant::I, Variant::II]
        .into_iter()
        .map(|v| (v, correction_bound_check(sphere, k, beta, p, v)))
        .collect();
    for (v, c) in &corrections {
        let name = format!("correction_{}", v.tag());
        steps.push(step_from(&name, Inequality, ENTROPY_TOL, c.as_ref().map(|c| (c.lhs, c.rhs)).map_err(Clone::clone)));
    }

    // End-to-end: Σ_j ∫F_j log F_j <= H_N + N [transport term - log surface ratio + correction bound],
    // with W_q replaced by the moment lift of the explicit W_1 bound.
    let b1 = w1.as_ref().map(|r| r.bounds[0].1).map_err(Clone::clone);
    for (v, c) in &corrections {
        let name = format!("composed_{}", v.tag());
        let transport = b1.clone().and_then(|b1| match v {
            Variant::I => {
                let fisher = relative_fisher_gaussian(p1)?;
                Ok(fisher.max(0.0).sqrt() * hm_lift_value(p1, &ext.density, 2.0, k, b1))
            }
            Variant::II => {
                let d = dhwi.as_ref().map_err(Clone::clone)?;
                let sf = spherical_fisher_marginal(sphere)?;
                Ok(distorted_hwi_value(sf.damped_fisher, d.pole_control, p1.moment(2.0), q, hm_lift_value(p1, &ext.density, q, k, b1)))
            }
        });
        let r = c
            .as_ref()
            .map_err(Clone::clone)
            .and_then(|c| Ok((partial, h_n + nf * (transport? - paths.log_surface_ratio + c.rhs))));
        steps.push(step_from(&name, Inequality, ENTROPY_TOL, r));
    }

    let ratio = (h_n > RATIO_FLOOR).then(|| partial / h_n);
    Ok(InequalityReport {
        n,
        family: sphere.label(),
        params: *params,
        steps,
        partial_entropy_sum: partial,
        spherical_entropy: h_n,
        ratio,
        epsilon_hat: ratio.map(|r| r - 1.0),
        conditions: condition_row(sphere, k, q).ok(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density1d::Density1D;

    #[test]
    fn parameter_ranges() {
        assert!(ChainParams::default().validate().is_ok());
        let e = ChainParams { q: 5.0, ..Default::default() }.validate().unwrap_err().to_string();
        assert!(e.contains("2<q<k"), "{e}");
        let e = ChainParams { p: 1.8, ..Default::default() }.validate().unwrap_err().to_string();
        assert!(e.contains("1<p<min((k+1)/3,k/2)"), "{e}");
        let e = ChainParams { beta: 1.0, ..Default::default() }.validate().unwrap_err().to_string();
        assert!(e.contains("0<beta<k/2-1"), "{e}");
    }

    #[test]
    fn uniform_chain_has_no_ratio() {
        let s = SphereDensity::uniform(8).unwrap();
        let r = verify_chain(&s, &ChainParams::default()).unwrap();
        assert!(r.ratio.is_none() && r.epsilon_hat.is_none());
        assert!(r.all_pass(), "{:?}", r.failed_steps().collect::<Vec<_>>());
    }

    #[test]
    fn bump_chain_passes() {
        let s = SphereDensity::conditioned(Density1D::bump(1.0).unwrap(), 64).unwrap();
        let r = verify_chain(&s, &ChainParams::default()).unwrap();
        assert!(r.all_pass(), "{:?}", r.failed_steps().collect::<Vec<_>>());
        assert!(r.steps.iter().all(|s| !s.is_skipped()), "{:?}", r.steps);
        let eps = r.epsilon_hat.unwrap();
        assert!(eps > 0.0 && eps < 1.0);
    }
}
