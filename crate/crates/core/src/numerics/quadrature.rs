//! Gauss–Legendre rules and composite panel grids.

use std::sync::Arc;

use crate::error::{invalid, Result};

/// An `n`-point Gauss–Legendre rule on `[-1, 1]`, with barycentric weights for
/// interpolation through its nodes.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    bary: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        let bary = (0..n)
            .map(|j| {
                let s = ((1.0 - nodes[j] * nodes[j]) * weights[j]).sqrt();
                if j % 2 == 0 {
                    s
                } else {
                    -s
                }
            })
            .collect();
        Self { nodes, weights, bary }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫_a^b f` with this rule.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let s: f64 = self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(mid + half * x)).sum();
        s * half
    }

    /// Barycentric interpolation at `s ∈ [-1, 1]` of values given at the nodes.
    pub fn interpolate(&self, values: &[f64], s: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for ((&x, &b), &v) in self.nodes.iter().zip(&self.bary).zip(values) {
            let d = s - x;
            if d == 0.0 {
                return v;
            }
            let c = b / d;
            num += c * v;
            den += c;
        }
        num / den
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre integration of `f` over `[a, b]` with `panels` equal panels.
pub fn integrate_composite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let rule = GaussLegendre::new(order);
    let h = (b - a) / panels as f64;
    (0..panels).map(|i| rule.integrate(a + i as f64 * h, a + (i + 1) as f64 * h, &f)).sum()
}

/// Panel breakpoints on `[a, b]` refined geometrically toward the ends that are flagged.
///
/// `levels` extra panels of halving width are inserted next to each graded end.
pub fn graded_breaks(a: f64, b: f64, panels: usize, grade_left: usize, grade_right: usize) -> Vec<f64> {
    let h = (b - a) / panels as f64;
    let mut out = vec![a];
    for j in (1..=grade_left).rev() {
        out.push(a + h * 0.5f64.powi(j as i32));
    }
    for i in 1..panels {
        out.push(a + i as f64 * h);
    }
    for j in 1..=grade_right {
        out.push(b - h * 0.5f64.powi(j as i32));
    }
    out.push(b);
    out
}

/// Tabulated quadrature grid made of Gauss–Legendre panels.
///
/// Panel ends are the `breaks`; every panel carries `order` interior nodes.
#[derive(Debug, Clone)]
pub struct Grid1D {
    breaks: Vec<f64>,
    rule: Arc<GaussLegendre>,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl Grid1D {
    /// Grid with the given panel boundaries.
    pub fn from_breaks(breaks: Vec<f64>, order: usize) -> Result<Self> {
        if breaks.len() < 2 {
            return Err(invalid("a grid needs at least one panel"));
        }
        if breaks.iter().any(|b| !b.is_finite()) || breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("panel breaks must be finite and strictly increasing"));
        }
        if order == 0 {
            return Err(invalid("quadrature order must be positive"));
        }
        let rule = Arc::new(GaussLegendre::new(order));
        let mut points = Vec::with_capacity((breaks.len() - 1) * order);
        let mut weights = Vec::with_capacity(points.capacity());
        for w in breaks.windows(2) {
            let half = 0.5 * (w[1] - w[0]);
            let mid = 0.5 * (w[1] + w[0]);
            for (&x, &wt) in rule.nodes().iter().zip(rule.weights()) {
                points.push(mid + half * x);
                weights.push(half * wt);
            }
        }
        Ok(Self { breaks, rule, points, weights })
    }

    /// Panels no wider than `max_width` between consecutive `knots`, with
    /// `grading` geometric levels at both ends of the whole support.
    pub fn from_knots(knots: &[f64], max_width: f64, order: usize, grading: usize) -> Result<Self> {
        Self::from_knots_graded(knots, max_width, order, grading, grading)
    }

    pub fn from_knots_graded(
        knots: &[f64],
        max_width: f64,
        order: usize,
        grade_left: usize,
        grade_right: usize,
    ) -> Result<Self> {
        if knots.len() < 2 || !(max_width > 0.0) {
            return Err(invalid("need at least two knots and a positive panel width"));
        }
        let last = knots.len() - 2;
        let mut breaks = vec![knots[0]];
        for (i, w) in knots.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(invalid("knots must be strictly increasing"));
            }
            let panels = ((w[1] - w[0]) / max_width).ceil().max(1.0) as usize;
            let gl = if i == 0 { grade_left } else { 0 };
            let gr = if i == last { grade_right } else { 0 };
            breaks.extend_from_slice(&graded_breaks(w[0], w[1], panels, gl, gr)[1..]);
        }
        Self::from_breaks(breaks, order)
    }

    pub fn uniform(a: f64, b: f64, panels: usize, order: usize) -> Result<Self> {
        if !(b > a) || panels == 0 {
            return Err(invalid("uniform grid needs a < b and at least one panel"));
        }
        Self::from_breaks(graded_breaks(a, b, panels, 0, 0), order)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn order(&self) -> usize {
        self.rule.order()
    }

    pub fn rule(&self) -> &GaussLegendre {
        &self.rule
    }

    pub fn n_panels(&self) -> usize {
        self.breaks.len() - 1
    }

    pub fn support(&self) -> (f64, f64) {
        (self.breaks[0], *self.breaks.last().unwrap())
    }

    /// Index range of the nodes belonging to panel `i`.
    pub fn panel_nodes(&self, i: usize) -> std::ops::Range<usize> {
        let n = self.order();
        i * n..(i + 1) * n
    }

    /// Panel containing `x`, or `None` outside the support.
    pub fn panel_of(&self, x: f64) -> Option<usize> {
        let (a, b) = self.support();
        if !(x >= a && x <= b) {
            return None;
        }
        let idx = self.breaks.partition_point(|&t| t <= x);
        Some(idx.saturating_sub(1).min(self.n_panels() - 1))
    }

    /// Quadrature of tabulated node values.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.points.len());
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// Quadrature of a function evaluated at the nodes.
    pub fn integrate_fn<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Polynomial interpolant of node values at `x`; zero outside the support.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        match self.panel_of(x) {
            None => 0.0,
            Some(i) => {
                let (a, b) = (self.breaks[i], self.breaks[i + 1]);
                let s = (2.0 * x - a - b) / (b - a);
                self.rule.interpolate(&values[self.panel_nodes(i)], s)
            }
        }
    }

    /// Integral of each panel's interpolant.
    pub fn panel_integrals(&self, values: &[f64]) -> Vec<f64> {
        (0..self.n_panels())
            .map(|i| {
                let r = self.panel_nodes(i);
                self.weights[r.clone()].iter().zip(&values[r]).map(|(w, v)| w * v).sum()
            })
            .collect()
    }

    /// `∫_{a_i}^{x}` of panel `i`'s interpolant, exact for the interpolating polynomial.
    pub fn partial_panel_integral(&self, values: &[f64], i: usize, x: f64) -> f64 {
        let (a, b) = (self.breaks[i], self.breaks[i + 1]);
        let x = x.clamp(a, b);
        if x == a {
            return 0.0;
        }
        let vals = &values[self.panel_nodes(i)];
        let half = 0.5 * (x - a);
        let mid = 0.5 * (x + a);
        let mut s = 0.0;
        for (&t, &w) in self.rule.nodes().iter().zip(self.rule.weights()) {
            let y = mid + half * t;
            let u = (2.0 * y - a - b) / (b - a);
            s += w * self.rule.interpolate(vals, u);
        }
        s * half
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 8, 16, 24] {
            let rule = GaussLegendre::new(n);
            let wsum: f64 = rule.weights().iter().sum();
            assert!((wsum - 2.0).abs() < 1e-14, "n={n}");
            for deg in 0..(2 * n) {
                let got = rule.integrate(-1.0, 1.0, |x| x.powi(deg as i32));
                let want = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
                assert!((got - want).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn interpolation_reproduces_polynomials() {
        let g = Grid1D::uniform(-2.0, 3.0, 4, 8).unwrap();
        let p = |x: f64| 1.0 - 2.0 * x + 0.5 * x.powi(5) - 0.1 * x.powi(7);
        let vals: Vec<f64> = g.points().iter().map(|&x| p(x)).collect();
        for &x in &[-2.0, -1.3, 0.0, 0.25, 1.75, 3.0] {
            assert!((g.interpolate(&vals, x) - p(x)).abs() < 1e-10 * p(x).abs().max(1.0));
        }
        assert_eq!(g.interpolate(&vals, 3.5), 0.0);
    }

    #[test]
    fn grid_weights_sum_to_length() {
        let g = Grid1D::from_knots(&[-3.0, -1.0, 1.0, 3.0], 0.3, 16, 6).unwrap();
        let (a, b) = g.support();
        assert!((g.weights().iter().sum::<f64>() - (b - a)).abs() < 1e-12 * (b - a));
        assert!(g.points().windows(2).all(|w| w[1] > w[0]));
        assert!(g.points().iter().all(|&x| x > a && x < b));
        assert!(g.breaks().contains(&-1.0) && g.breaks().contains(&1.0));
    }

    #[test]
    fn partial_integral_matches_antiderivative() {
        let g = Grid1D::uniform(0.0, 1.0, 3, 6).unwrap();
        let vals: Vec<f64> = g.points().iter().map(|&x| 3.0 * x * x).collect();
        let i = g.panel_of(0.5).unwrap();
        let a = g.breaks()[i];
        let got = g.partial_panel_integral(&vals, i, 0.5);
        assert!((got - (0.125 - a.powi(3))).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_breaks() {
        assert!(Grid1D::from_breaks(vec![0.0], 4).is_err());
        assert!(Grid1D::from_breaks(vec![0.0, 1.0, 1.0], 4).is_err());
        assert!(Grid1D::uniform(1.0, 0.0, 3, 4).is_err());
    }
}
