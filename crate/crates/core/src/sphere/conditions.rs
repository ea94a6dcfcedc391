//! Per-N values of the hypotheses on moments, Fisher information, pole
//! control and entropy of a family of sphere densities.

use std::f64::consts::PI;

use super::entropy::spherical_entropy;
use super::fisher::spherical_fisher_full;
use super::SphereDensity;
use crate::density1d::{pole_control, Density1D};
use crate::error::Result;

/// Entropy per particle below this is treated as zero.
pub const ENTROPY_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionRow {
    pub n: usize,
    /// `M_k(Π_1)`.
    pub moment_k: f64,
    /// `I(Π_1)`.
    pub fisher_line: f64,
    /// `P_q(Π_1)`.
    pub pole: f64,
    /// `H_N(F_N)/N`.
    pub entropy_per_n: f64,
    /// `I_N(F_N)/N`.
    pub fisher_per_n: f64,
    /// Upper bound on `M_k(Π_1)` through the normalization curves, when the family is conditioned.
    pub moment_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub k: f64,
    pub q: f64,
    pub rows: Vec<ConditionRow>,
}

impl ConditionReport {
    pub fn sup_moment(&self) -> f64 {
        self.rows.iter().map(|r| r.moment_k).fold(0.0, f64::max)
    }

    pub fn sup_fisher_line(&self) -> f64 {
        self.rows.iter().map(|r| r.fisher_line).fold(0.0, f64::max)
    }

    pub fn sup_pole(&self) -> f64 {
        self.rows.iter().map(|r| r.pole).fold(0.0, f64::max)
    }

    pub fn inf_entropy_per_n(&self) -> f64 {
        self.rows.iter().map(|r| r.entropy_per_n).fold(f64::INFINITY, f64::min)
    }

    pub fn sup_fisher_per_n(&self) -> f64 {
        self.rows.iter().map(|r| r.fisher_per_n).fold(0.0, f64::max)
    }

    /// Whether `inf_N H_N/N` stays away from zero.
    pub fn entropy_condition_holds(&self) -> bool {
        self.inf_entropy_per_n() > ENTROPY_FLOOR
    }

    pub fn all_finite(&self) -> bool {
        self.rows.iter().all(|r| {
            [r.moment_k, r.fisher_line, r.pole, r.entropy_per_n, r.fisher_per_n].iter().all(|x| x.is_finite())
        })
    }
}

fn moment_bound(sphere: &SphereDensity, f: &Density1D, k: f64) -> Option<f64> {
    let c = sphere.conditioned_parts()?;
    let nf = sphere.n() as f64;
    let s2pi = (2.0 * PI).sqrt();
    let num = 1.0 + s2pi * c.curve_minus_one().sup_abs_lambda();
    let den = 1.0 + s2pi * c.curve().lambda(nf);
    Some(num / den * (nf / (nf - 1.0)).sqrt() * f.moment(k))
}

pub fn condition_row(sphere: &SphereDensity, k: f64, q: f64) -> Result<ConditionRow> {
    let n = sphere.n();
    let m1 = sphere.marginal1()?;
    let nf = n as f64;
    Ok(ConditionRow {
        n,
        moment_k: m1.moment(k),
        fisher_line: m1.fisher_information()?,
        pole: pole_control(m1, n, q)?,
        entropy_per_n: spherical_entropy(sphere)? / nf,
        fisher_per_n: spherical_fisher_full(sphere)? / nf,
        moment_bound: sphere.conditioned_parts().and_then(|c| moment_bound(sphere, c.base(), k)),
    })
}

/// Condition values for each sphere density of a sweep.
pub fn condition_report(spheres: &[SphereDensity], k: f64, q: f64) -> Result<ConditionReport> {
    let rows = spheres.iter().map(|s| condition_row(s, k, q)).collect::<Result<_>>()?;
    Ok(ConditionReport { k, q, rows })
}
