//! Tabulated inverse distribution functions.

use crate::density1d::Density1D;
use crate::error::{invalid, Result};

/// Monotone table `t ↦ F^{-1}(t)` on equally spaced levels.
///
/// Between levels the inverse is a quintic Hermite piece built from
/// `x' = 1/f(x)` and `x'' = -f'(x)/f(x)³`. Next to a zero of the density the
/// piece drops to a cubic with slopes capped at three times the secant.
#[derive(Debug, Clone)]
pub struct QuantileTable {
    x: Vec<f64>,
    slope: Vec<f64>,
    curvature: Vec<f64>,
}

impl QuantileTable {
    pub fn resolution(&self) -> usize {
        self.x.len() - 1
    }

    pub fn nodes(&self) -> &[f64] {
        &self.x
    }

    /// `F^{-1}(t)` for `t ∈ [0, 1]`.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.resolution();
        let h = 1.0 / n as f64;
        let s = (t.clamp(0.0, 1.0) * n as f64).min(n as f64 - 1e-12);
        let i = (s.floor() as usize).min(n - 1);
        let s = s - i as f64;
        let (x0, x1) = (self.x[i], self.x[i + 1]);
        let (d0, d1) = (self.slope[i], self.slope[i + 1]);
        let s2 = s * s;
        let s3 = s2 * s;
        let y = if d0.is_finite() && d1.is_finite() {
            let s4 = s3 * s;
            let s5 = s4 * s;
            let (c0, c1) = (self.curvature[i] * h * h, self.curvature[i + 1] * h * h);
            (1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5) * x0
                + (s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5) * d0 * h
                + (0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5) * c0
                + (0.5 * s3 - s4 + 0.5 * s5) * c1
                + (-4.0 * s3 + 7.0 * s4 - 3.0 * s5) * d1 * h
                + (10.0 * s3 - 15.0 * s4 + 6.0 * s5) * x1
        } else {
            let secant = (x1 - x0) / h;
            let m0 = d0.min(3.0 * secant) * h;
            let m1 = d1.min(3.0 * secant) * h;
            (2.0 * s3 - 3.0 * s2 + 1.0) * x0 + (s3 - 2.0 * s2 + s) * m0 + (-2.0 * s3 + 3.0 * s2) * x1 + (s3 - s2) * m1
        };
        y.clamp(x0, x1)
    }
}

/// Quantile table with `resolution` intervals in `t`.
pub fn quantile_table(f: &Density1D, resolution: usize) -> Result<QuantileTable> {
    if resolution < 2 {
        return Err(invalid("quantile table needs at least two intervals"));
    }
    let ts: Vec<f64> = (0..=resolution).map(|i| i as f64 / resolution as f64).collect();
    let mut x = f.quantiles(&ts);
    x[0] = f.support().0;
    for i in 1..x.len() {
        x[i] = x[i].max(x[i - 1]);
    }
    let (lo, hi) = f.support();
    let step = 1e-6 * (hi - lo);
    let mut slope = Vec::with_capacity(x.len());
    let mut curvature = Vec::with_capacity(x.len());
    for &xi in &x {
        let d = f.pdf(xi);
        if d > 0.0 {
            let dd = f.dpdf(xi).unwrap_or_else(|| (f.pdf(xi + step) - f.pdf(xi - step)) / (2.0 * step));
            slope.push(1.0 / d);
            curvature.push(-dd / (d * d * d));
        } else {
            slope.push(f64::INFINITY);
            curvature.push(0.0);
        }
    }
    Ok(QuantileTable { x, slope, curvature })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let u = Density1D::uniform(0.0, 1.0).unwrap();
        let q = quantile_table(&u, 4096).unwrap();
        assert!((q.eval(0.5) - 0.5).abs() < 1e-14);
        let g = Density1D::standard_gaussian();
        let q = quantile_table(&g, 4096).unwrap();
        assert!(q.eval(0.5).abs() < 1e-12);
        assert!((q.eval(0.841345) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn cdf_of_quantile_is_identity() {
        for f in [Density1D::standard_gaussian(), Density1D::bump(1.0).unwrap(), Density1D::gaussian(0.3).unwrap()] {
            let q = quantile_table(&f, 4096).unwrap();
            assert!(q.nodes().windows(2).all(|w| w[1] >= w[0]));
            let mut worst: f64 = 0.0;
            let mut prev = f64::NEG_INFINITY;
            for i in 0..=99_800 {
                let t = 0.001 + i as f64 * 1e-5;
                let x = q.eval(t);
                assert!(x >= prev);
                prev = x;
                worst = worst.max((f.cdf(x) - t).abs());
            }
            assert!(worst < 1e-8, "{}: {worst:e}", f.label());
        }
    }
}
