//! Density of a sum of i.i.d. copies by inverting the N-th power of a
//! characteristic function on an FFT grid.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::logscaled::LogPolar;
use super::special::ln_gamma;
use crate::error::{Error, Result};

/// A law on the line known through its characteristic function `E e^{itX}`.
pub trait BaseLaw: Sync {
    fn char_fn(&self, t: f64) -> Complex64;

    /// `φ(k·dt)` for `k = start .. start + count`.
    fn char_fn_range(&self, dt: f64, start: usize, count: usize) -> Vec<Complex64> {
        (start..start + count).map(|k| self.char_fn(k as f64 * dt)).collect()
    }

    /// Smallest closed interval carrying the law; the upper end may be infinite.
    fn support(&self) -> (f64, f64);

    fn mean(&self) -> f64;

    fn variance(&self) -> f64;

    /// Leading behaviour `c·(u - a)^e` of the density at the lower support end `a`, if known.
    fn lower_edge(&self) -> Option<EdgeBehaviour> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeBehaviour {
    pub coefficient: f64,
    pub exponent: f64,
}

/// Piecewise-constant density on equal cells of `[lo, hi]`.
#[derive(Debug, Clone)]
pub struct StepDensity {
    lo: f64,
    width: f64,
    values: Vec<f64>,
}

impl StepDensity {
    pub fn new(lo: f64, hi: f64, values: Vec<f64>) -> Result<Self> {
        if !(hi > lo) || values.is_empty() || values.iter().any(|v| !(*v >= 0.0)) {
            return Err(crate::error::invalid("step density needs lo < hi and nonnegative values"));
        }
        let width = (hi - lo) / values.len() as f64;
        let mass: f64 = values.iter().sum::<f64>() * width;
        if (mass - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidDensity {
                label: "step".into(),
                reason: format!("integrates to {mass}, expected 1"),
            });
        }
        Ok(Self { lo, width, values })
    }

    fn moment(&self, p: i32) -> f64 {
        let w = self.width;
        self.values
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let a = self.lo + j as f64 * w;
                v * ((a + w).powi(p + 1) - a.powi(p + 1)) / f64::from(p + 1)
            })
            .sum()
    }
}

impl BaseLaw for StepDensity {
    fn char_fn(&self, t: f64) -> Complex64 {
        let w = self.width;
        let x = 0.5 * t * w;
        let sinc = if x.abs() < 1e-4 { 1.0 - x * x / 6.0 } else { x.sin() / x };
        self.values
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let c = self.lo + (j as f64 + 0.5) * w;
                Complex64::from_polar(v * w * sinc, t * c)
            })
            .sum()
    }

    fn support(&self) -> (f64, f64) {
        (self.lo, self.lo + self.width * self.values.len() as f64)
    }

    fn mean(&self) -> f64 {
        self.moment(1)
    }

    fn variance(&self) -> f64 {
        let m = self.mean();
        self.moment(2) - m * m
    }

    fn lower_edge(&self) -> Option<EdgeBehaviour> {
        (self.values[0] > 0.0).then_some(EdgeBehaviour { coefficient: self.values[0], exponent: 0.0 })
    }
}

#[derive(Debug, Clone)]
pub struct ConvolutionOptions {
    /// Half-width of the initial window in standard deviations of the sum.
    pub window_sds: f64,
    /// Absolute margin added to the half-width.
    pub window_margin: f64,
    /// Target truncation error relative to the peak scale `1/(σ√(2πN))`.
    pub tail_tol: f64,
    pub min_points: usize,
    pub max_terms: usize,
    pub max_attempts: usize,
    /// Aliasing threshold on the mass in the outer 1% of a cut window.
    pub alias_mass: f64,
}

impl Default for ConvolutionOptions {
    fn default() -> Self {
        Self {
            window_sds: 14.0,
            window_margin: 4.0,
            tail_tol: 1e-11,
            min_points: 4096,
            max_terms: 1 << 18,
            max_attempts: 4,
            alias_mass: 1e-10,
        }
    }
}

/// Analytic part `C (u - o)^α e^{-κ(u - o)}` removed before the FFT.
#[derive(Debug, Clone, Copy)]
struct EdgeTerm {
    origin: f64,
    log_c: f64,
    alpha: f64,
    kappa: f64,
}

impl EdgeTerm {
    fn value(&self, u: f64) -> f64 {
        let x = u - self.origin;
        if x <= 0.0 {
            return 0.0;
        }
        (self.log_c + self.alpha * x.ln() - self.kappa * x).exp()
    }

    fn derivative(&self, u: f64) -> f64 {
        let x = u - self.origin;
        if x <= 0.0 {
            return 0.0;
        }
        self.value(u) * (self.alpha / x - self.kappa)
    }

    fn transform(&self, t: f64) -> Complex64 {
        let z = Complex64::new(self.kappa, -t);
        let l = Complex64::new(self.log_c + ln_gamma(self.alpha + 1.0), t * self.origin) - (self.alpha + 1.0) * z.ln();
        l.exp()
    }
}

/// Tabulated density `h_N` of `X_1 + … + X_N`, with first and second derivatives.
#[derive(Debug, Clone)]
pub struct ConvolutionPower {
    n: usize,
    lo: f64,
    hi: f64,
    du: f64,
    dt: f64,
    values: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
    spectrum: Vec<Complex64>,
    edge: Option<EdgeTerm>,
    stages: Vec<(u64, f64)>,
    mass_drift: f64,
    truncation: f64,
    attempts: usize,
}

impl ConvolutionPower {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Interval outside of which the density is treated as zero.
    pub fn window(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn spacing(&self) -> f64 {
        self.du
    }

    /// Number of retained frequencies.
    pub fn terms(&self) -> usize {
        self.spectrum.len()
    }

    /// `(power, mass)` after each squaring stage, before renormalization.
    pub fn stages(&self) -> &[(u64, f64)] {
        &self.stages
    }

    /// `|φ(0)^N - 1|` removed by renormalization.
    pub fn mass_drift(&self) -> f64 {
        self.mass_drift
    }

    /// Estimated truncation error in the frequency domain.
    pub fn truncation_estimate(&self) -> f64 {
        self.truncation
    }

    pub fn attempts(&self) -> usize {
        self.attempts
    }

    /// Grid abscissas and density values inside the window.
    pub fn table(&self) -> Vec<(f64, f64)> {
        let m = ((self.hi - self.lo) / self.du).floor() as usize;
        (0..=m)
            .map(|i| {
                let u = self.lo + i as f64 * self.du;
                (u, self.density(u))
            })
            .collect()
    }

    fn hermite(&self, vals: &[f64], ders: &[f64], u: f64) -> f64 {
        let x = (u - self.lo) / self.du;
        let i = (x.floor() as usize).min(vals.len() - 2);
        let s = x - i as f64;
        let (p0, p1) = (vals[i], vals[i + 1]);
        let (m0, m1) = (ders[i] * self.du, ders[i + 1] * self.du);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * p0 + (s3 - 2.0 * s2 + s) * m0 + (-2.0 * s3 + 3.0 * s2) * p1 + (s3 - s2) * m1
    }

    fn inside(&self, u: f64) -> bool {
        u >= self.lo && u <= self.hi
    }

    /// `h_N(u)`; zero outside the window.
    pub fn density(&self, u: f64) -> f64 {
        if !self.inside(u) {
            return 0.0;
        }
        let edge = self.edge.map_or(0.0, |e| e.value(u));
        edge + self.hermite(&self.values, &self.d1, u)
    }

    /// `h_N'(u)`; zero outside the window.
    pub fn derivative(&self, u: f64) -> f64 {
        if !self.inside(u) {
            return 0.0;
        }
        let edge = self.edge.map_or(0.0, |e| e.derivative(u));
        edge + self.hermite(&self.d1, &self.d2, u)
    }

    /// `h_N(u)` by direct summation of the retained Fourier series.
    pub fn density_exact(&self, u: f64) -> f64 {
        if !self.inside(u) {
            return 0.0;
        }
        let mut s = 0.5 * self.spectrum[0].re;
        for (k, psi) in self.spectrum.iter().enumerate().skip(1) {
            s += (psi * Complex64::from_polar(1.0, -(k as f64) * self.dt * u)).re;
        }
        let edge = self.edge.map_or(0.0, |e| e.value(u));
        edge + s * self.dt / PI
    }

    /// `∫ h_N` over the window by the trapezoid rule on the grid.
    pub fn mass(&self) -> f64 {
        self.table().iter().map(|p| p.1).sum::<f64>() * self.du
    }
}

const CHUNK: usize = 256;

/// Density of the sum of `n` i.i.d. copies of `base`.
///
/// The window `[lo, hi]` is centred at `n·mean` and widened when more than
/// `alias_mass` sits in its outer 1%.
pub fn fft_convolve_power(base: &dyn BaseLaw, n: usize, opts: &ConvolutionOptions) -> Result<ConvolutionPower> {
    if n == 0 {
        return Err(crate::error::invalid("number of summands must be >= 1"));
    }
    let phi0 = base.char_fn(0.0);
    let base_mass = phi0.re;
    if (base_mass - 1.0).abs() > 1e-8 || phi0.im.abs() > 1e-8 {
        return Err(Error::InvalidDensity {
            label: "base law".into(),
            reason: format!("total mass {base_mass} differs from 1 by more than 1e-8"),
        });
    }
    let nf = n as f64;
    let (a, b) = base.support();
    let sd = (nf * base.variance()).sqrt();
    let center = nf * base.mean();
    let h_scale = 1.0 / (sd.max(1e-300) * (2.0 * PI).sqrt());
    let mut half = opts.window_sds * sd + opts.window_margin;

    let mut stages = Vec::new();
    LogPolar::from_complex(phi0).pow(n as u64, |p, lm| stages.push((p, lm.exp())));
    stages.push((n as u64, (nf * base_mass.ln()).exp()));
    if let Some(bad) = stages.iter().find(|s| (s.1 - 1.0).abs() > 1e-6) {
        return Err(Error::Numerical(format!("mass {} at convolution stage {} drifts beyond 1e-6", bad.1, bad.0)));
    }
    let mass_drift = ((nf * base_mass.ln()).exp() - 1.0).abs();

    for attempt in 1..=opts.max_attempts {
        let lo = (center - half).max(nf * a);
        let hi = (center + half).min(nf * b);
        let cut_lo = lo > nf * a;
        let cut_hi = hi < nf * b;
        let width = hi - lo;
        let period = 1.25 * width;
        let dt = 2.0 * PI / period;

        let edge = if cut_lo {
            None
        } else {
            base.lower_edge().filter(|e| e.coefficient > 0.0 && e.exponent > -1.0).map(|e| {
                let alpha = nf * (e.exponent + 1.0) - 1.0;
                let log_c = nf * (e.coefficient.ln() + ln_gamma(e.exponent + 1.0)) - ln_gamma(alpha + 1.0);
                let kappa = (37.0 + alpha.max(0.0) * width.max(1.0).ln() + log_c.max(0.0)) / width;
                EdgeTerm { origin: nf * a, log_c, alpha, kappa }
            })
        };

        let mut spectrum = vec![Complex64::new(1.0 - edge.map_or(0.0, |e| e.transform(0.0).re), 0.0)];
        let tol = opts.tail_tol * h_scale;
        let mut truncation = f64::INFINITY;
        let mut k = 1;
        while k < opts.max_terms {
            let count = CHUNK.min(opts.max_terms - k);
            let phis = base.char_fn_range(dt, k, count);
            let mut chunk_max: f64 = 0.0;
            for (j, phi) in phis.into_iter().enumerate() {
                let t = (k + j) as f64 * dt;
                let mut psi = LogPolar::from_complex(phi / base_mass).pow(n as u64, |_, _| {}).to_complex();
                if let Some(e) = edge {
                    psi -= e.transform(t);
                }
                chunk_max = chunk_max.max(psi.norm() * t / PI);
                spectrum.push(psi);
            }
            k += count;
            truncation = chunk_max;
            if chunk_max < tol {
                break;
            }
        }
        while spectrum.len() > 1 && spectrum.last().is_some_and(|z| z.norm() == 0.0) {
            spectrum.pop();
        }
        let terms = spectrum.len();
        let du_target = sd.min(1.0) / 128.0;
        let m = opts
            .min_points
            .max(2 * terms + 2)
            .max((period / du_target).ceil() as usize)
            .next_power_of_two();
        let du = period / m as f64;

        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_forward(m);
        let scale = dt / (2.0 * PI);
        let synth = |factor: &dyn Fn(f64) -> Complex64| -> Vec<f64> {
            let mut buf = vec![Complex64::new(0.0, 0.0); m];
            for (kk, psi) in spectrum.iter().enumerate() {
                let t = kk as f64 * dt;
                let z = psi * factor(t) * Complex64::from_polar(1.0, -t * lo);
                buf[kk] += z;
                if kk > 0 {
                    buf[m - kk] += z.conj();
                }
            }
            fft.process(&mut buf);
            buf.iter().map(|z| z.re * scale).collect()
        };
        let values = synth(&|_| Complex64::new(1.0, 0.0));
        let d1 = synth(&|t| Complex64::new(0.0, -t));
        let d2 = synth(&|t| Complex64::new(-t * t, 0.0));

        let full = |i: usize| values[i] + edge.map_or(0.0, |e| e.value(lo + i as f64 * du));
        let band = ((0.01 * period / du).ceil() as usize).max(1);
        let n_in = (width / du).floor() as usize;
        let mut outer = 0.0;
        if cut_lo {
            outer += (0..band).map(|i| full(i).abs()).sum::<f64>() * du;
        }
        if cut_hi {
            outer += (n_in.saturating_sub(band)..m).map(|i| full(i).abs()).sum::<f64>() * du;
        }
        if outer > opts.alias_mass {
            if (cut_lo || cut_hi) && attempt < opts.max_attempts {
                log::debug!("aliasing mass {outer:e} on [{lo}, {hi}], widening window");
                half *= 2.0;
                continue;
            }
            return Err(Error::Aliasing { mass: outer, lo, hi });
        }
        return Ok(ConvolutionPower {
            n,
            lo,
            hi,
            du,
            dt,
            values,
            d1,
            d2,
            spectrum,
            edge,
            stages,
            mass_drift,
            truncation,
            attempts: attempt,
        });
    }
    unreachable!("loop returns on its last attempt")
}

#[cfg(test)]
mod tests {
    use super::*;

    struct ChiSquareOne;

    impl BaseLaw for ChiSquareOne {
        fn char_fn(&self, t: f64) -> Complex64 {
            Complex64::new(1.0, -2.0 * t).powf(-0.5)
        }
        fn support(&self) -> (f64, f64) {
            (0.0, f64::INFINITY)
        }
        fn mean(&self) -> f64 {
            1.0
        }
        fn variance(&self) -> f64 {
            2.0
        }
        fn lower_edge(&self) -> Option<EdgeBehaviour> {
            Some(EdgeBehaviour { coefficient: 1.0 / (2.0 * PI).sqrt(), exponent: -0.5 })
        }
    }

    struct Normal;

    impl BaseLaw for Normal {
        fn char_fn(&self, t: f64) -> Complex64 {
            Complex64::from_polar((-0.5 * t * t).exp(), 0.3 * t)
        }
        fn support(&self) -> (f64, f64) {
            (f64::NEG_INFINITY, f64::INFINITY)
        }
        fn mean(&self) -> f64 {
            0.3
        }
        fn variance(&self) -> f64 {
            1.0
        }
    }

    #[test]
    fn chi_square_four_from_one() {
        let h = fft_convolve_power(&ChiSquareOne, 4, &ConvolutionOptions::default()).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..=6000 {
            let u = i as f64 * 0.01;
            let want = 0.25 * u * (-0.5 * u).exp();
            worst = worst.max((h.density(u) - want).abs());
        }
        assert!(worst < 1e-8, "sup error {worst:e}");
        assert!(h.stages().iter().all(|s| (s.1 - 1.0).abs() < 1e-6));
    }

    #[test]
    fn single_summand_is_identity() {
        let h = fft_convolve_power(&Normal, 1, &ConvolutionOptions::default()).unwrap();
        for &u in &[-3.0, -0.5, 0.3, 1.7, 4.0] {
            let want = (-(u - 0.3f64).powi(2) / 2.0).exp() / (2.0 * PI).sqrt();
            assert!((h.density(u) - want).abs() < 1e-10, "u={u}");
            assert!((h.density_exact(u) - want).abs() < 1e-10, "u={u}");
        }
    }

    #[test]
    fn uniform_pair_gives_triangle() {
        let uni = StepDensity::new(0.0, 1.0, vec![1.0]).unwrap();
        let h = fft_convolve_power(&uni, 2, &ConvolutionOptions::default()).unwrap();
        for i in 1..40 {
            let u = i as f64 * 0.05;
            let want = if u <= 1.0 { u } else { 2.0 - u };
            assert!((h.density(u) - want).abs() < 1e-3, "u={u}");
        }
        assert!((h.mass() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_unnormalized_base() {
        assert!(StepDensity::new(0.0, 1.0, vec![0.5]).is_err());
        assert!(fft_convolve_power(&Normal, 0, &ConvolutionOptions::default()).is_err());
    }

    #[test]
    fn too_few_attempts_reports_aliasing() {
        let opts = ConvolutionOptions { window_sds: 1.0, window_margin: 0.0, max_attempts: 1, ..Default::default() };
        match fft_convolve_power(&Normal, 4, &opts) {
            Err(Error::Aliasing { mass, .. }) => assert!(mass > 1e-10),
            other => panic!("expected aliasing error, got {other:?}"),
        }
    }

    #[test]
    fn gaussian_sum_and_derivative() {
        let h = fft_convolve_power(&Normal, 9, &ConvolutionOptions::default()).unwrap();
        let (m, s2): (f64, f64) = (2.7, 9.0);
        for &u in &[-4.0, 0.0, 2.7, 5.5, 10.0] {
            let g = (-(u - m) * (u - m) / (2.0 * s2)).exp() / (2.0 * PI * s2).sqrt();
            assert!((h.density(u) - g).abs() < 1e-11, "u={u}");
            assert!((h.derivative(u) + g * (u - m) / s2).abs() < 1e-10, "u={u}");
        }
    }
}
