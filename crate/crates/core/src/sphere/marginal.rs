//! First and second line marginals of sphere densities.

use rayon::prelude::*;

use super::{Family, SphereDensity};
use crate::density1d::Density1D;
use crate::error::{invalid, Error, Result};
use crate::numerics::special::ln_area;
use crate::numerics::Grid1D;

const ORDER: usize = 16;
const PANEL: f64 = 0.25;
const POLE_GRADING: usize = 12;
/// Largest tolerated mass drift of a marginal before renormalization.
pub const MASS_DRIFT_TOL: f64 = 1e-5;

/// `ln` of `|S^{N-2}| / (|S^{N-1}| √N)`.
pub(crate) fn ln_weight_constant(n: usize) -> f64 {
    ln_area(n - 1) - ln_area(n) - 0.5 * (n as f64).ln()
}

/// `(|S^{N-2}| / (|S^{N-1}| √N)) (1 - v²/N)_+^{(N-3)/2}`, the law of one
/// coordinate under the uniform measure.
pub fn uniform_marginal_weight(n: usize, v: f64) -> f64 {
    ln_uniform_weight(n, v).exp()
}

pub(crate) fn ln_uniform_weight(n: usize, v: f64) -> f64 {
    let nf = n as f64;
    let x = v * v / nf;
    if x >= 1.0 {
        return if n == 3 && x == 1.0 { ln_weight_constant(n) } else { f64::NEG_INFINITY };
    }
    ln_weight_constant(n) + 0.5 * (nf - 3.0) * (-x).ln_1p()
}

fn check_drift(d: &Density1D) -> Result<()> {
    let mass = 1.0 / d.renormalization();
    if (mass - 1.0).abs() > MASS_DRIFT_TOL {
        return Err(Error::Numerical(format!("{}: mass {mass} before renormalization", d.label())));
    }
    Ok(())
}

/// Knots of `base` restricted to `[lo, hi]`.
fn knots_within(base: &Density1D, lo: f64, hi: f64) -> Vec<f64> {
    let mut k = vec![lo];
    k.extend(base.grid().breaks().iter().copied().filter(|&b| b > lo + 1e-12 && b < hi - 1e-12));
    k.push(hi);
    k
}

pub(crate) fn compute_marginal1(sphere: &SphereDensity) -> Result<Density1D> {
    let n = sphere.n();
    let nf = n as f64;
    let root = nf.sqrt();
    let d = match sphere.family() {
        Family::Uniform => {
            let grid = Grid1D::from_knots(&[-root, 0.0, root], PANEL, ORDER, POLE_GRADING)?;
            let vals: Vec<f64> = grid.points().iter().map(|&v| uniform_marginal_weight(n, v)).collect();
            let der = grid
                .points()
                .iter()
                .zip(&vals)
                .map(|(&v, &w)| -w * (nf - 3.0) * v / (nf - v * v))
                .collect();
            Density1D::new(grid, vals, Some(der), format!("marginal1(uniform, N={n})"))?
        }
        Family::Conditioned(c) => {
            let f = &c.base;
            let (a, b) = f.support();
            let (lo, hi) = (a.max(-root), b.min(root));
            if !(hi > lo) {
                return Err(invalid("base density has no mass inside the sphere"));
            }
            let gl = if lo <= -root + 1e-12 { POLE_GRADING } else { 0 };
            let gr = if hi >= root - 1e-12 { POLE_GRADING } else { 0 };
            let grid = Grid1D::from_knots_graded(&knots_within(f, lo, hi), PANEL, ORDER, gl, gr)?;
            let hn = c.curve_n.density(nf);
            if !(hn > 0.0) {
                return Err(Error::Numerical(format!("h_N(N) = {hn} is not positive at N = {n}")));
            }
            let h1 = &c.curve_n1;
            let mut vals = Vec::with_capacity(grid.len());
            let mut der = Vec::with_capacity(grid.len());
            let mut lost = 0.0;
            for (&v, &w) in grid.points().iter().zip(grid.weights()) {
                let u = nf - v * v;
                let fv = f.pdf(v);
                let hu = h1.density(u);
                let dfv = f.dpdf(v).unwrap_or(0.0);
                if hu <= 0.0 {
                    lost += w * fv;
                    vals.push(0.0);
                    der.push(0.0);
                    continue;
                }
                vals.push(fv * hu / hn);
                der.push((dfv * hu - 2.0 * v * fv * h1.density_derivative(u)) / hn);
            }
            if lost > 0.0 {
                log::debug!("marginal1: h_(N-1) vanishes on a set of f-mass {lost:e} (N = {n})");
            }
            let der = f.derivative_values().map(|_| der);
            Density1D::new(grid, vals, der, format!("marginal1({}, N={n})", f.label()))?
        }
    };
    check_drift(&d)?;
    Ok(d)
}

/// `Π_1(F_N)`.
pub fn marginal1(sphere: &SphereDensity) -> Result<&Density1D> {
    sphere.marginal1()
}

/// A function of one coordinate on the sphere, tabulated on a line grid.
#[derive(Debug, Clone)]
pub struct SphereLineFunction {
    pub grid: Grid1D,
    pub values: Vec<f64>,
    /// `false` where the uniform weight underflowed and the value is meaningless.
    pub valid: Vec<bool>,
}

/// `F_j^{(N)} = Π_1 / w_N`, the first marginal relative to the uniform measure.
pub fn sphere_marginal_from_line(p: &Density1D, n: usize) -> Result<SphereLineFunction> {
    if n < 3 {
        return Err(invalid("sphere dimension N must be >= 3"));
    }
    let root = (n as f64).sqrt();
    let (a, b) = p.support();
    if a < -root - 1e-12 || b > root + 1e-12 {
        return Err(invalid(format!("line density support [{a}, {b}] exceeds [-√N, √N]")));
    }
    let mut values = Vec::with_capacity(p.values().len());
    let mut valid = Vec::with_capacity(values.capacity());
    for (&v, &pv) in p.grid().points().iter().zip(p.values()) {
        let lw = ln_uniform_weight(n, v);
        let ok = lw > (1e-12f64).ln();
        valid.push(ok);
        values.push(if ok { pv * (-lw).exp() } else { 0.0 });
    }
    Ok(SphereLineFunction { grid: p.grid().clone(), values, valid })
}

/// Inverse of [`sphere_marginal_from_line`].
pub fn line_from_sphere_marginal(g: &SphereLineFunction, n: usize) -> Result<Density1D> {
    let values = g
        .grid
        .points()
        .iter()
        .zip(&g.values)
        .zip(&g.valid)
        .map(|((&v, &x), &ok)| if ok { x * ln_uniform_weight(n, v).exp() } else { 0.0 })
        .collect();
    Density1D::new(g.grid.clone(), values, None, format!("line marginal (N={n})"))
}

/// One `v_1` node of a second marginal with its `v_2` quadrature.
#[derive(Debug, Clone)]
pub struct Row {
    pub v1: f64,
    pub w1: f64,
    pub v2: Vec<f64>,
    pub w2: Vec<f64>,
    pub p: Vec<f64>,
}

/// The joint law of `(v_1, v_2)`, stored row by row on `{v_1² + v_2² <= N}`.
#[derive(Debug, Clone)]
pub struct Marginal2 {
    n: usize,
    rows: Vec<Row>,
    mass_before: f64,
}

impl Marginal2 {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    /// Mass before renormalization.
    pub fn mass_before(&self) -> f64 {
        self.mass_before
    }

    /// `∫∫ g(v_1, v_2, p(v_1, v_2)) dv_1 dv_2`.
    pub fn integrate<G: Fn(f64, f64, f64) -> f64 + Sync>(&self, g: G) -> f64 {
        self.rows
            .par_iter()
            .map(|r| {
                r.w1 * r.v2.iter().zip(&r.w2).zip(&r.p).map(|((&v2, &w2), &p)| w2 * g(r.v1, v2, p)).sum::<f64>()
            })
            .sum()
    }

    pub fn mass(&self) -> f64 {
        self.integrate(|_, _, p| p)
    }

    /// `(v_1, ∫ p(v_1, v_2) dv_2)` for every row.
    pub fn row_marginal(&self) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.v1, r.w2.iter().zip(&r.p).map(|(w, p)| w * p).sum())).collect()
    }
}

/// Second marginal `Π_2(F_N)`; requires `N >= 4`.
pub fn marginal2(sphere: &SphereDensity) -> Result<Marginal2> {
    let n = sphere.n();
    if n < 4 {
        return Err(invalid("second marginal needs N >= 4"));
    }
    let nf = n as f64;
    let m1 = sphere.marginal1()?;
    let g1 = m1.grid();
    let nodes: Vec<(f64, f64)> = g1.points().iter().copied().zip(g1.weights().iter().copied()).collect();

    let build_row = |&(v1, w1): &(f64, f64)| -> Result<Row> {
        let chord = (nf - v1 * v1).max(0.0).sqrt();
        let (lo, hi, knots, base_f): (f64, f64, Vec<f64>, Option<&Density1D>) = match sphere.family() {
            Family::Uniform => (-chord, chord, vec![-chord, 0.0, chord], None),
            Family::Conditioned(c) => {
                let (a, b) = c.base.support();
                let (lo, hi) = (a.max(-chord), b.min(chord));
                (lo, hi, if hi > lo { knots_within(&c.base, lo, hi) } else { vec![] }, Some(&c.base))
            }
        };
        if !(hi - lo > 1e-12) {
            return Ok(Row { v1, w1, v2: vec![], w2: vec![], p: vec![] });
        }
        let gl = if lo <= -chord + 1e-12 { POLE_GRADING } else { 0 };
        let gr = if hi >= chord - 1e-12 { POLE_GRADING } else { 0 };
        let grid = Grid1D::from_knots_graded(&knots, PANEL, ORDER, gl, gr)?;
        let p = match (sphere.family(), base_f) {
            (Family::Conditioned(c), Some(f)) => {
                let h2 = c.curve_minus_two()?;
                let hn = c.curve_n.density(nf);
                let f1 = f.pdf(v1);
                grid.points().iter().map(|&v2| f1 * f.pdf(v2) * h2.density(nf - v1 * v1 - v2 * v2).max(0.0) / hn).collect()
            }
            _ => {
                let lc = ln_area(n - 2) - ln_area(n) - nf.ln();
                grid.points()
                    .iter()
                    .map(|&v2| {
                        let x = (v1 * v1 + v2 * v2) / nf;
                        if x >= 1.0 {
                            0.0
                        } else {
                            (lc + 0.5 * (nf - 4.0) * (-x).ln_1p()).exp()
                        }
                    })
                    .collect()
            }
        };
        Ok(Row { v1, w1, v2: grid.points().to_vec(), w2: grid.weights().to_vec(), p })
    };

    if let Some(c) = sphere.conditioned_parts() {
        c.curve_minus_two()?;
    }
    let rows: Vec<Row> = nodes.par_iter().map(build_row).collect::<Result<_>>()?;
    let mut m = Marginal2 { n, rows, mass_before: 1.0 };
    let mass = m.mass();
    if (mass - 1.0).abs() > MASS_DRIFT_TOL {
        return Err(Error::Numerical(format!("second marginal mass {mass} before renormalization (N = {n})")));
    }
    for r in &mut m.rows {
        r.p.iter_mut().for_each(|p| *p /= mass);
    }
    m.mass_before = mass;
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn uniform_n3_is_flat() {
        let s = SphereDensity::uniform(3).unwrap();
        let m = s.marginal1().unwrap();
        let want = 1.0 / (2.0 * 3f64.sqrt());
        assert!(m.values().iter().all(|v| (v - want).abs() < 1e-12));
        assert!((m.renormalization() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_large_n_is_gaussian() {
        let s = SphereDensity::uniform(10_000).unwrap();
        let m = s.marginal1().unwrap();
        let g = |v: f64| (-0.5 * v * v).exp() / (2.0 * PI).sqrt();
        let worst = m.grid().points().iter().zip(m.values()).map(|(&v, &p)| (p - g(v)).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-3, "{worst:e}");
    }

    #[test]
    fn weight_constant_expansion() {
        let n = 1000;
        let want = (1.0 - 3.0 / (4.0 * n as f64)) / (2.0 * PI).sqrt();
        assert!((uniform_marginal_weight(n, 0.0) - want).abs() < 1e-4);
    }

    #[test]
    fn line_sphere_round_trip() {
        let s = SphereDensity::uniform(12).unwrap();
        let p = s.marginal1().unwrap();
        let fj = sphere_marginal_from_line(p, 12).unwrap();
        for (v, ok) in fj.values.iter().zip(&fj.valid) {
            if *ok {
                assert!((v - 1.0).abs() < 1e-9);
            }
        }
        let back = line_from_sphere_marginal(&fj, 12).unwrap();
        for ((a, b), ok) in back.values().iter().zip(p.values()).zip(&fj.valid) {
            if *ok {
                assert!((a - b).abs() < 1e-9);
            }
        }
        let wide = Density1D::uniform(-4.0, 4.0).unwrap();
        assert!(sphere_marginal_from_line(&wide, 12).is_err());
    }

    #[test]
    fn uniform_second_marginal() {
        let s = SphereDensity::uniform(4).unwrap();
        let m = marginal2(&s).unwrap();
        assert!((m.mass_before() - 1.0).abs() < 1e-6);
        let p0 = m.rows()[m.rows().len() / 2].p[3];
        assert!((p0 - 1.0 / (4.0 * PI)).abs() < 1e-6);
        let s = SphereDensity::uniform(10).unwrap();
        let m = marginal2(&s).unwrap();
        let m1 = s.marginal1().unwrap();
        for ((_, row), p) in m.row_marginal().iter().zip(m1.values()) {
            assert!((row - p).abs() < 1e-5);
        }
    }
}
