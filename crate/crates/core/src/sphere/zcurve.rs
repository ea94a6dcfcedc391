//! Normalization curves `Z_N(f, √u)` through the law of `Σ v_i²`.
//!
//! If `X_1..X_N` are i.i.d. with density `f`, the density of `U = Σ X_i²` is
//! `h_N(u) = (|S^{N-1}|/2) u^{(N-2)/2} Z_N(f, √u)`, so the curve is read off a
//! spectral N-fold convolution of the law of `X²`.

use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::density1d::Density1D;
use crate::error::{invalid, Result};
use crate::numerics::special::ln_area;
use crate::numerics::{fft_convolve_power, BaseLaw, ConvolutionOptions, ConvolutionPower, EdgeBehaviour, GaussLegendre};

const MAX_PANEL_PHASE: f64 = 16.0;
const NODE_FLOOR: f64 = 1e-22;
const BLOCK: usize = 2048;

/// The pushforward of a line density under `v ↦ v²`, known through
/// `φ(t) = ∫ f(v) e^{itv²} dv`.
pub struct SquareLaw<'a> {
    f: &'a Density1D,
    tilt: f64,
    log_mgf: f64,
    mean: f64,
    variance: f64,
    support: (f64, f64),
    levels: Mutex<Vec<Arc<Level>>>,
}

struct Level {
    s: Vec<f64>,
    w: Vec<f64>,
    width: f64,
}

impl<'a> SquareLaw<'a> {
    pub fn new(f: &'a Density1D) -> Self {
        let m2 = f.moment(2.0);
        let m4 = f.moment(4.0);
        let (a, b) = f.support();
        let hi = a.abs().max(b.abs()).powi(2);
        let lo = if a <= 0.0 && b >= 0.0 { 0.0 } else { a.abs().min(b.abs()).powi(2) };
        Self {
            f,
            tilt: 0.0,
            log_mgf: 0.0,
            mean: m2,
            variance: m4 - m2 * m2,
            support: (lo, hi),
            levels: Mutex::new(Vec::new()),
        }
    }

    /// The law reweighted by `e^{θs} / M(θ)`, `M(θ) = ∫ f(v) e^{θv²} dv`.
    pub fn tilted(f: &'a Density1D, theta: f64) -> Self {
        let nodes = TiltNodes::new(f);
        let (log_mgf, mean, variance) = nodes.moments(theta);
        Self { tilt: theta, log_mgf, mean, variance, ..Self::new(f) }
    }

    /// `log M(θ)`.
    pub fn log_mgf(&self) -> f64 {
        self.log_mgf
    }

    fn level(&self, l: usize) -> Arc<Level> {
        let mut levels = self.levels.lock().expect("level cache poisoned");
        while levels.len() <= l {
            let k = levels.len();
            levels.push(Arc::new(self.build_level(k)));
        }
        levels[l].clone()
    }

    fn build_level(&self, l: usize) -> Level {
        let grid = self.f.grid();
        let rule = GaussLegendre::new(grid.order());
        let parts = 1usize << l;
        let mut s = Vec::new();
        let mut w = Vec::new();
        let mut width: f64 = 0.0;
        for p in grid.breaks().windows(2) {
            let h = (p[1] - p[0]) / parts as f64;
            width = width.max(h);
            for j in 0..parts {
                let a = p[0] + j as f64 * h;
                for (&x, &wt) in rule.nodes().iter().zip(rule.weights()) {
                    let v = a + 0.5 * h * (x + 1.0);
                    let fw = 0.5 * h * wt * self.f.pdf(v) * (self.tilt * v * v - self.log_mgf).exp();
                    if fw > NODE_FLOOR {
                        s.push(v * v);
                        w.push(fw);
                    }
                }
            }
        }
        Level { s, w, width }
    }

    /// Finest level needed so that the phase `t v²` turns by at most
    /// `MAX_PANEL_PHASE` across any panel.
    fn level_for(&self, t: f64) -> usize {
        let vmax = self.support.1.sqrt();
        let base = self.level(0).width;
        let mut l = 0;
        while 2.0 * t * vmax * base / (1u64 << l) as f64 > MAX_PANEL_PHASE && l < 30 {
            l += 1;
        }
        l
    }
}

impl BaseLaw for SquareLaw<'_> {
    fn char_fn(&self, t: f64) -> Complex64 {
        let lvl = self.level(self.level_for(t.abs()));
        lvl.s.iter().zip(&lvl.w).map(|(&s, &w)| Complex64::from_polar(w, t * s)).sum()
    }

    fn char_fn_range(&self, dt: f64, start: usize, count: usize) -> Vec<Complex64> {
        let t_max = (start + count).saturating_sub(1) as f64 * dt;
        let lvl = self.level(self.level_for(t_max));
        let t0 = start as f64 * dt;
        lvl.s
            .par_chunks(BLOCK)
            .zip(lvl.w.par_chunks(BLOCK))
            .map(|(ss, ws)| {
                let mut z: Vec<Complex64> = ss.iter().zip(ws).map(|(&s, &w)| Complex64::from_polar(w, t0 * s)).collect();
                let r: Vec<Complex64> = ss.iter().map(|&s| Complex64::from_polar(1.0, dt * s)).collect();
                let mut acc = vec![Complex64::new(0.0, 0.0); count];
                for a in acc.iter_mut() {
                    let mut sum = Complex64::new(0.0, 0.0);
                    for (zj, rj) in z.iter_mut().zip(&r) {
                        sum += *zj;
                        *zj *= rj;
                    }
                    *a = sum;
                }
                acc
            })
            .reduce(
                || vec![Complex64::new(0.0, 0.0); count],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            )
    }

    fn support(&self) -> (f64, f64) {
        self.support
    }

    fn mean(&self) -> f64 {
        self.mean
    }

    fn variance(&self) -> f64 {
        self.variance
    }

    fn lower_edge(&self) -> Option<EdgeBehaviour> {
        let (a, b) = self.f.support();
        let f0 = self.f.pdf(0.0);
        (a < 0.0 && b > 0.0 && f0 > 0.0).then_some(EdgeBehaviour { coefficient: f0 * (-self.log_mgf).exp(), exponent: -0.5 })
    }
}

/// Quadrature nodes of `f` in the form `(v², log weight)`, used to evaluate
/// `M(θ)` and the tilted moments.
#[derive(Debug)]
struct TiltNodes {
    s: Vec<f64>,
    lnw: Vec<f64>,
    lnf: Vec<f64>,
    edges: [(f64, f64); 2],
    max_width: f64,
}

impl TiltNodes {
    fn new(f: &Density1D) -> Self {
        let grid = f.grid();
        let rule = GaussLegendre::new(grid.order());
        let (mut s, mut lnw, mut lnf) = (Vec::new(), Vec::new(), Vec::new());
        let mut max_width: f64 = 0.0;
        for p in grid.breaks().windows(2) {
            let h = p[1] - p[0];
            max_width = max_width.max(h);
            for (&x, &wt) in rule.nodes().iter().zip(rule.weights()) {
                let v = p[0] + 0.5 * h * (x + 1.0);
                let fv = f.pdf(v);
                if fv > 0.0 {
                    s.push(v * v);
                    lnw.push((0.5 * h * wt * fv).ln());
                    lnf.push(fv.ln());
                }
            }
        }
        let (a, b) = f.support();
        let edges = [(a * a, f.pdf(a).ln()), (b * b, f.pdf(b).ln())];
        Self { s, lnw, lnf, edges, max_width }
    }

    /// `(log M(θ), mean, variance)` of the tilted law of `v²`.
    fn moments(&self, theta: f64) -> (f64, f64, f64) {
        let top = self.s.iter().zip(&self.lnw).map(|(&s, &l)| l + theta * s).fold(f64::NEG_INFINITY, f64::max);
        let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
        for (&s, &l) in self.s.iter().zip(&self.lnw) {
            let e = (l + theta * s - top).exp();
            s0 += e;
            s1 += e * s;
            s2 += e * s * s;
        }
        let mean = s1 / s0;
        (top + s0.ln(), mean, (s2 / s0 - mean * mean).max(0.0))
    }

    /// Tilts for which the quadrature still resolves the reweighted density and
    /// the truncation edges stay negligible.
    fn range(&self) -> (f64, f64) {
        let cap = 2.0 / (self.max_width * self.max_width);
        let edge_ok = |theta: f64| {
            let top = self.s.iter().zip(&self.lnf).map(|(&s, &l)| l + theta * s).fold(f64::NEG_INFINITY, f64::max);
            self.edges.iter().all(|&(s, l)| !(l + theta * s > top - EDGE_LOG_RATIO))
        };
        let hi = if edge_ok(cap) {
            cap
        } else {
            let (mut lo, mut hi) = (0.0, cap);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if edge_ok(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        };
        let floor = MIN_MEAN_RATIO * self.moments(0.0).1;
        (self.solve(floor, (-cap, 0.0)), hi)
    }

    /// The tilt in `[lo, hi]` whose tilted mean of `v²` is `target`, clamped to the ends.
    fn solve(&self, target: f64, (mut lo, mut hi): (f64, f64)) -> f64 {
        if self.moments(hi).1 <= target {
            return hi;
        }
        if self.moments(lo).1 >= target {
            return lo;
        }
        let mut theta = 0.0f64.clamp(lo, hi);
        for _ in 0..100 {
            let (_, m, v) = self.moments(theta);
            if (m - target).abs() <= 1e-13 * target {
                break;
            }
            if m < target {
                lo = theta;
            } else {
                hi = theta;
            }
            let next = theta + (target - m) / v;
            theta = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
        }
        theta
    }
}

/// Log-ratio to the peak below which a tilted edge value counts as negligible.
const EDGE_LOG_RATIO: f64 = 34.0;
/// Fraction of the peak scale above which the untilted table is trusted for `log Z`.
const TRUST: f64 = 1e-3;
/// Spacing of the tilt ladder in `log(u/N)`, in units of the coefficient of
/// variation of `Σ v_i²`.
const TILT_STEP: f64 = 4.0;
const TILT_LEVELS: u32 = 4;
/// Smallest tilted mean of `v²`, relative to the untilted one.
const MIN_MEAN_RATIO: f64 = 0.125;

#[derive(Debug)]
struct TiltTable {
    theta: f64,
    log_mgf: f64,
    peak: f64,
    h: ConvolutionPower,
}

type TiltKey = (u32, i64);

#[derive(Debug)]
struct Tilts {
    f: Density1D,
    opts: ConvolutionOptions,
    nodes: TiltNodes,
    range: (f64, f64),
    step: f64,
    /// Keyed by `(level, rung)`; `None` marks a rung that cannot be reached.
    tables: Mutex<Vec<(TiltKey, Option<Arc<TiltTable>>)>>,
}

impl Tilts {
    fn table(&self, n: usize, level: u32, k: i64) -> Option<Arc<TiltTable>> {
        let mut tables = self.tables.lock().expect("tilt cache poisoned");
        if let Some((_, t)) = tables.iter().find(|(key, _)| *key == (level, k)) {
            return t.clone();
        }
        let step = self.step / (1u32 << level) as f64;
        let target = (k as f64 * step).exp();
        let theta = self.nodes.solve(target, self.range);
        let reached = (self.nodes.moments(theta).1 / target - 1.0).abs() < 1e-9;
        let t = (theta != 0.0 && reached)
            .then(|| {
                let law = SquareLaw::tilted(&self.f, theta);
                let h = fft_convolve_power(&law, n, &self.opts).ok()?;
                let peak = 1.0 / ((n as f64 * law.variance()).sqrt() * (2.0 * PI).sqrt());
                Some(Arc::new(TiltTable { theta, log_mgf: law.log_mgf(), peak, h }))
            })
            .flatten();
        tables.push(((level, k), t.clone()));
        t
    }
}

/// `log Z_N(f, √u)` and the deviation `λ_N(u)` from the Gaussian approximation.
///
/// Far from the centre `log Z` is read from exponentially tilted convolutions,
/// `h_N(u) = M(θ)^N e^{-θu} h_N^θ(u)`, so that it keeps relative accuracy.
#[derive(Debug, Clone)]
pub struct NormalizationCurve {
    n: usize,
    h: ConvolutionPower,
    sigma_sq: f64,
    log_area: f64,
    peak: f64,
    tilts: Arc<Tilts>,
}

/// One row of a normalization curve export.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub u: f64,
    pub log_z: f64,
    pub lambda: f64,
}

/// Tabulates `h_N` for the base density `f`.
pub fn build_zcurve(f: &Density1D, n: usize, opts: &ConvolutionOptions) -> Result<NormalizationCurve> {
    if n < 1 {
        return Err(invalid("normalization curve needs N >= 1"));
    }
    let law = SquareLaw::new(f);
    let h = fft_convolve_power(&law, n, opts)?;
    let m4 = f.moment(4.0);
    let nf = n as f64;
    let peak = 1.0 / ((nf * law.variance()).sqrt() * (2.0 * PI).sqrt());
    let nodes = TiltNodes::new(f);
    let tilts = Tilts {
        f: f.clone(),
        opts: opts.clone(),
        range: nodes.range(),
        step: TILT_STEP * law.variance().sqrt() / (law.mean() * nf.sqrt()),
        nodes,
        tables: Mutex::new(Vec::new()),
    };
    Ok(NormalizationCurve { n, h, sigma_sq: m4 - 1.0, log_area: ln_area(n), peak, tilts: Arc::new(tilts) })
}

impl NormalizationCurve {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `Σ² = M_4(f) - 1`.
    pub fn sigma_sq(&self) -> f64 {
        self.sigma_sq
    }

    pub fn convolution(&self) -> &ConvolutionPower {
        &self.h
    }

    /// Density `h_N(u)` of `Σ v_i²`.
    pub fn density(&self, u: f64) -> f64 {
        self.h.density(u)
    }

    pub fn density_derivative(&self, u: f64) -> f64 {
        self.h.derivative(u)
    }

    /// `log Z_N(f, √u)`; `-∞` where no table resolves the density.
    pub fn log_z(&self, u: f64) -> f64 {
        if !(u > 0.0) {
            return f64::NEG_INFINITY;
        }
        let h = self.h.density(u);
        let log_h = if h > TRUST * self.peak {
            h.ln()
        } else {
            match self.tilted_log_density(u) {
                Some(l) => l,
                None if h > 0.0 => h.ln(),
                None => return f64::NEG_INFINITY,
            }
        };
        2f64.ln() + log_h - self.log_area - 0.5 * (self.n as f64 - 2.0) * u.ln()
    }

    /// `log h_N(u)` from the tilt ladder; rungs sit at tilted means `e^{kδ}`
    /// and are refined when `u` falls outside the bulk of the nearest one.
    fn tilted_log_density(&self, u: f64) -> Option<f64> {
        let nf = self.n as f64;
        let x = (u / nf).ln();
        for level in 0..TILT_LEVELS {
            let step = self.tilts.step / (1u32 << level) as f64;
            let k = (x / step).round() as i64;
            let Some(table) = self.tilts.table(self.n, level, k) else { continue };
            let ht = table.h.density(u);
            if ht > TRUST * table.peak {
                return Some(nf * table.log_mgf - table.theta * u + ht.ln());
            }
        }
        None
    }

    /// `λ_N(u) = √N Σ h_N(u) - e^{-(u-N)²/(2NΣ²)}/√(2π)`.
    pub fn lambda(&self, u: f64) -> f64 {
        let nf = self.n as f64;
        let sigma = self.sigma_sq.sqrt();
        let gauss = (-(u - nf).powi(2) / (2.0 * nf * self.sigma_sq)).exp() / (2.0 * PI).sqrt();
        nf.sqrt() * sigma * self.h.density(u) - gauss
    }

    /// Curve values on the tabulation grid, restricted to `h_N > 0`.
    pub fn points(&self) -> Vec<CurvePoint> {
        self.h
            .table()
            .into_iter()
            .filter(|&(u, h)| u > 0.0 && h > 0.0)
            .map(|(u, _)| CurvePoint { u, log_z: self.log_z(u), lambda: self.lambda(u) })
            .collect()
    }

    /// `sup_u |λ_N(u)|` over the tabulation grid.
    pub fn sup_abs_lambda(&self) -> f64 {
        let (lo, hi) = self.h.window();
        let du = self.h.spacing();
        let m = ((hi - lo) / du).floor() as usize;
        (0..=m).map(|i| self.lambda(lo + i as f64 * du).abs()).fold(0.0, f64::max)
    }
}
