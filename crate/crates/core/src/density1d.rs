//! Densities on the line and their scalar functionals.

use std::f64::consts::PI;
use std::path::Path;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::numerics::Grid1D;

/// Values below this are treated as zero inside logarithms.
pub const ATOM_FLOOR: f64 = 1e-300;

/// Mass that may be discarded when it falls outside a reference support.
pub const NEGLIGIBLE_MASS: f64 = 1e-12;

const DEFAULT_ORDER: usize = 16;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// A probability density tabulated on a Gauss–Legendre grid.
///
/// Values between nodes come from the panel interpolant; the cumulative
/// distribution integrates that interpolant exactly.
#[derive(Debug, Clone)]
pub struct Density1D {
    grid: Grid1D,
    values: Vec<f64>,
    derivative: Option<Vec<f64>>,
    label: String,
    renormalization: f64,
    cumulative: Vec<f64>,
    /// Legendre coefficients of each panel interpolant, `order` per panel.
    legendre: Vec<f64>,
    quantile_cache: QuantileCache,
}

/// Quantile vectors on fixed level sets, keyed by the caller; not cloned.
#[derive(Debug, Default)]
struct QuantileCache(Mutex<Vec<(usize, Arc<Vec<f64>>)>>);

impl Clone for QuantileCache {
    fn clone(&self) -> Self {
        Self::default()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub k: f64,
    pub value: f64,
    pub label: String,
}

impl Density1D {
    /// Builds a density from node values, rescaling it to unit mass.
    ///
    /// The applied factor is kept in [`Density1D::renormalization`].
    pub fn new(grid: Grid1D, mut values: Vec<f64>, mut derivative: Option<Vec<f64>>, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        if values.len() != grid.len() || derivative.as_ref().is_some_and(|d| d.len() != grid.len()) {
            return Err(invalid(format!("{label}: value table does not match grid size")));
        }
        let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for v in &mut values {
            if !v.is_finite() {
                return Err(Error::InvalidDensity { label, reason: "non-finite value".into() });
            }
            if *v < 0.0 {
                if *v < -1e-12 * peak {
                    return Err(Error::InvalidDensity { label, reason: format!("negative value {v}") });
                }
                *v = 0.0;
            }
        }
        let mass = grid.integrate(&values);
        if !(mass > 0.0) {
            return Err(Error::InvalidDensity { label, reason: "zero total mass".into() });
        }
        let factor = 1.0 / mass;
        values.iter_mut().for_each(|v| *v *= factor);
        if let Some(d) = derivative.as_mut() {
            d.iter_mut().for_each(|v| *v *= factor);
        }
        let mut cumulative = vec![0.0];
        for m in grid.panel_integrals(&values) {
            cumulative.push(cumulative.last().unwrap() + m);
        }
        let legendre = legendre_coefficients(&grid, &values);
        Ok(Self { grid, values, derivative, label, renormalization: factor, cumulative, legendre, quantile_cache: QuantileCache::default() })
    }

    /// Samples `pdf` (and optionally its derivative) on `grid`.
    pub fn from_fn(
        grid: Grid1D,
        pdf: impl Fn(f64) -> f64,
        dpdf: Option<&dyn Fn(f64) -> f64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let values = grid.points().iter().map(|&x| pdf(x)).collect();
        let derivative = dpdf.map(|d| grid.points().iter().map(|&x| d(x)).collect());
        Self::new(grid, values, derivative, label)
    }

    /// Gaussian with mean zero and variance `var`, truncated at ±12σ.
    pub fn gaussian(var: f64) -> Result<Self> {
        if !(var > 0.0 && var.is_finite()) {
            return Err(invalid("Gaussian variance must be positive"));
        }
        let s = var.sqrt();
        let grid = Grid1D::from_knots(&[-12.0 * s, 12.0 * s], 0.25 * s, DEFAULT_ORDER, 0)?;
        let c = 1.0 / (2.0 * PI * var).sqrt();
        let pdf = move |x: f64| c * (-0.5 * x * x / var).exp();
        let dpdf = move |x: f64| -x / var * pdf(x);
        Self::from_fn(grid, pdf, Some(&dpdf as &dyn Fn(f64) -> f64), format!("gaussian(var={var})"))
    }

    pub fn standard_gaussian() -> Self {
        Self::gaussian(1.0).expect("unit variance is valid")
    }

    /// Uniform density on `[a, b]`; it has no derivative table.
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        if !(b > a) {
            return Err(invalid("uniform density needs a < b"));
        }
        let grid = Grid1D::from_knots(&[a, b], (0.25f64).min((b - a) / 4.0), DEFAULT_ORDER, 0)?;
        let h = 1.0 / (b - a);
        Self::from_fn(grid, |_| h, None, format!("uniform[{a},{b}]"))
    }

    /// Quadratic B-spline bump on `[-R, R]`, dilated to unit second moment.
    ///
    /// After the dilation the law no longer depends on `R`: it lives on
    /// `[-3, 3]`, equals `3/8 - v²/8` on `[-1, 1]` and `(3 - |v|)²/16` outside.
    pub fn bump(r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(invalid("bump radius R must be positive"));
        }
        let grid = Grid1D::from_knots(&[-3.0, -1.0, 1.0, 3.0], 0.25, DEFAULT_ORDER, 0)?;
        Self::from_fn(grid, bump_pdf, Some(&bump_dpdf as &dyn Fn(f64) -> f64), format!("bump(R={r})"))
    }

    /// Reads a two-column `v,f` CSV with a header and strictly increasing `v`.
    ///
    /// The samples are joined by cubic Hermite pieces whose slopes come from
    /// fourth-order central differences.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_path(path)?;
        let mut xs = Vec::new();
        let mut fs = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            if rec.len() < 2 {
                return Err(Error::Parse(format!("{}: expected two columns v,f", path.display())));
            }
            let parse = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("{}: {e}: {s:?}", path.display())));
            xs.push(parse(&rec[0])?);
            fs.push(parse(&rec[1])?);
        }
        Self::from_samples(&xs, &fs, format!("file:{}", path.display()))
    }

    /// Density through sampled values, see [`Density1D::from_csv`].
    pub fn from_samples(xs: &[f64], fs: &[f64], label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        if xs.len() < 5 || xs.len() != fs.len() {
            return Err(Error::Parse(format!("{label}: need at least five (v, f) rows")));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parse(format!("{label}: v column must be strictly increasing")));
        }
        if fs.iter().any(|f| !(*f >= 0.0)) {
            return Err(Error::InvalidDensity { label, reason: "negative or missing f value".into() });
        }
        let slopes = fourth_order_slopes(xs, fs);
        let grid = Grid1D::from_breaks(xs.to_vec(), 8)?;
        let mut values = Vec::with_capacity(grid.len());
        let mut derivative = Vec::with_capacity(grid.len());
        for &x in grid.points() {
            let i = xs.partition_point(|&t| t <= x).clamp(1, xs.len() - 1) - 1;
            let h = xs[i + 1] - xs[i];
            let s = (x - xs[i]) / h;
            let (f0, f1, m0, m1) = (fs[i], fs[i + 1], slopes[i] * h, slopes[i + 1] * h);
            let s2 = s * s;
            let s3 = s2 * s;
            let v = (2.0 * s3 - 3.0 * s2 + 1.0) * f0 + (s3 - 2.0 * s2 + s) * m0 + (-2.0 * s3 + 3.0 * s2) * f1 + (s3 - s2) * m1;
            let d = ((6.0 * s2 - 6.0 * s) * f0 + (3.0 * s2 - 4.0 * s + 1.0) * m0 + (-6.0 * s2 + 6.0 * s) * f1 + (3.0 * s2 - 2.0 * s) * m1) / h;
            values.push(v.max(0.0));
            derivative.push(d);
        }
        Self::new(grid, values, Some(derivative), label)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn derivative_values(&self) -> Option<&[f64]> {
        self.derivative.as_deref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Factor applied to the input values to reach unit mass.
    pub fn renormalization(&self) -> f64 {
        self.renormalization
    }

    pub fn support(&self) -> (f64, f64) {
        self.grid.support()
    }

    /// Density at `x`; zero outside the support.
    pub fn pdf(&self, x: f64) -> f64 {
        self.grid.interpolate(&self.values, x).max(0.0)
    }

    /// Derivative at `x`, when a derivative table is present.
    pub fn dpdf(&self, x: f64) -> Option<f64> {
        self.derivative.as_ref().map(|d| self.grid.interpolate(d, x))
    }

    /// `Σ w_i f(x_i) g(x_i)`, the expectation of `g` under this density.
    pub fn expect(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.grid
            .points()
            .iter()
            .zip(self.grid.weights())
            .zip(&self.values)
            .map(|((&x, &w), &f)| if f > 0.0 { w * f * g(x) } else { 0.0 })
            .sum()
    }

    pub fn mass(&self) -> f64 {
        self.grid.integrate(&self.values)
    }

    pub fn mean(&self) -> f64 {
        self.expect(|x| x)
    }

    pub fn moment(&self, k: f64) -> f64 {
        self.expect(|x| x.abs().powf(k))
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().fold(0.0, |m: f64, v| m.max(*v))
    }

    /// `∫ f log f`.
    pub fn neg_entropy(&self) -> f64 {
        self.expect_on_support(|_, f| f.ln())
    }

    fn expect_on_support(&self, g: impl Fn(f64, f64) -> f64) -> f64 {
        self.grid
            .points()
            .iter()
            .zip(self.grid.weights())
            .zip(&self.values)
            .map(|((&x, &w), &f)| if f >= ATOM_FLOOR { w * f * g(x, f) } else { 0.0 })
            .sum()
    }

    /// `H(f|γ) = ∫ f log f + ½ log 2π + ½ M_2`, the relative entropy to the standard Gaussian.
    pub fn relative_entropy_gaussian(&self) -> f64 {
        self.neg_entropy() + HALF_LN_2PI + 0.5 * self.moment(2.0)
    }

    fn derivative_or_err(&self) -> Result<&[f64]> {
        self.derivative.as_deref().ok_or_else(|| Error::MissingDerivative(self.label.clone()))
    }

    /// `∫ (f'/f)² f` over `{f > ATOM_FLOOR}`.
    pub fn fisher_information(&self) -> Result<f64> {
        let d = self.derivative_or_err()?;
        Ok(self
            .grid
            .weights()
            .iter()
            .zip(&self.values)
            .zip(d)
            .map(|((&w, &f), &df)| if f > ATOM_FLOOR { w * df * df / f } else { 0.0 })
            .sum())
    }

    /// `∫ |(log(f/γ))'|² f` evaluated directly.
    pub fn relative_fisher_gaussian_direct(&self) -> Result<f64> {
        let d = self.derivative_or_err()?;
        Ok(self
            .grid
            .points()
            .iter()
            .zip(self.grid.weights())
            .zip(self.values.iter().zip(d))
            .map(|((&x, &w), (&f, &df))| {
                if f > ATOM_FLOOR {
                    let s = df / f + x;
                    w * s * s * f
                } else {
                    0.0
                }
            })
            .sum())
    }

    /// Cumulative distribution function.
    pub fn cdf(&self, x: f64) -> f64 {
        let (a, b) = self.support();
        if x <= a {
            return 0.0;
        }
        if x >= b {
            return 1.0;
        }
        let i = self.grid.panel_of(x).expect("inside support");
        (self.cumulative[i] + self.grid.partial_panel_integral(&self.values, i, x)).clamp(0.0, 1.0)
    }

    /// Left-continuous inverse `inf { x : F(x) >= t }`.
    pub fn quantile(&self, t: f64) -> f64 {
        self.sweep_quantiles(&[t])[0]
    }

    /// Quantiles at many levels, in parallel.
    pub fn quantiles(&self, ts: &[f64]) -> Vec<f64> {
        if ts.windows(2).all(|w| w[0] <= w[1]) {
            return self.quantiles_sorted(ts);
        }
        ts.par_iter().map(|&t| self.quantile(t)).collect()
    }

    /// Quantiles at nondecreasing levels; each root seeds the next.
    pub fn quantiles_sorted(&self, ts: &[f64]) -> Vec<f64> {
        ts.par_chunks(4096).flat_map_iter(|c| self.sweep_quantiles(c)).collect()
    }

    /// Quantiles at the sorted levels `ts()`, memoized under `key`.
    pub(crate) fn cached_quantiles(&self, key: usize, ts: impl FnOnce() -> Arc<Vec<f64>>) -> Arc<Vec<f64>> {
        if let Some((_, v)) = self.quantile_cache.0.lock().unwrap().iter().find(|(k, _)| *k == key) {
            return v.clone();
        }
        let v = Arc::new(self.quantiles_sorted(&ts()));
        let mut cache = self.quantile_cache.0.lock().unwrap();
        if !cache.iter().any(|(k, _)| *k == key) {
            cache.push((key, v.clone()));
        }
        v
    }

    /// `(∫_{a_i}^x f, f(x))` on panel `i` from its Legendre expansion.
    fn panel_cdf_pdf(&self, i: usize, x: f64) -> (f64, f64) {
        let (a, b) = (self.grid.breaks()[i], self.grid.breaks()[i + 1]);
        let n = self.grid.order();
        let c = &self.legendre[i * n..(i + 1) * n];
        let s = ((2.0 * x - a - b) / (b - a)).clamp(-1.0, 1.0);
        // P_{j-1}, P_j, running antiderivative ∫_{-1}^s P_j = (P_{j+1} - P_{j-1})/(2j+1)
        let (mut pm, mut pj) = (1.0, s);
        let mut dens = c[0];
        let mut cum = c[0] * (s + 1.0);
        for (j, &cj) in c.iter().enumerate().skip(1) {
            let jf = j as f64;
            let pn = ((2.0 * jf + 1.0) * s * pj - jf * pm) / (jf + 1.0);
            dens += cj * pj;
            cum += cj * (pn - pm) / (2.0 * jf + 1.0);
            pm = pj;
            pj = pn;
        }
        (0.5 * (b - a) * cum, dens)
    }

    fn sweep_quantiles(&self, ts: &[f64]) -> Vec<f64> {
        let (a, _) = self.support();
        let np = self.grid.n_panels();
        let total = *self.cumulative.last().unwrap();
        let mut out = Vec::with_capacity(ts.len());
        let mut last: Option<(usize, f64, f64, f64)> = None;
        for &t in ts {
            if t <= 0.0 {
                out.push(a);
                continue;
            }
            let t = t.min(total);
            let i = match last {
                Some((p, ..)) if self.cumulative[p] < t && self.cumulative[p + 1] >= t => p,
                _ => self.cumulative[1..].partition_point(|&c| c < t).min(np - 1),
            };
            let target = t - self.cumulative[i];
            let (mut lo, mut hi) = (self.grid.breaks()[i], self.grid.breaks()[i + 1]);
            let pm = self.cumulative[i + 1] - self.cumulative[i];
            if pm <= 0.0 {
                out.push(lo);
                continue;
            }
            let mut x = match last {
                Some((p, xp, fp, cp)) if p == i && fp > 0.0 => xp + (target - cp) / fp,
                _ => lo + (hi - lo) * (target / pm),
            };
            if !(x > lo && x < hi) {
                x = lo + (hi - lo) * (target / pm).clamp(0.0, 1.0);
            }
            let (mut fx, mut cx) = (0.0, 0.0);
            for _ in 0..200 {
                let (cum, dens) = self.panel_cdf_pdf(i, x);
                fx = dens;
                cx = cum;
                let g = cum - target;
                if g == 0.0 {
                    break;
                }
                if g > 0.0 {
                    hi = x;
                } else {
                    lo = x;
                }
                if hi - lo <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
                    break;
                }
                let step = if dens > 0.0 { g / dens } else { f64::NAN };
                if step.abs() <= 1e-15 * x.abs().max(1.0) {
                    x = (x - step).clamp(lo, hi);
                    break;
                }
                let newton = x - step;
                if newton > lo && newton < hi {
                    x = newton;
                } else {
                    x = 0.5 * (lo + hi);
                }
            }
            last = Some((i, x, fx, cx));
            let x = x.clamp(self.grid.breaks()[i], self.grid.breaks()[i + 1]);
            out.push(x);
        }
        out
    }
}

/// Legendre coefficients of each panel's interpolating polynomial.
fn legendre_coefficients(grid: &Grid1D, values: &[f64]) -> Vec<f64> {
    let rule = grid.rule();
    let n = grid.order();
    // basis[j][m] = (2j+1)/2 w_m P_j(x_m)
    let mut basis = vec![0.0; n * n];
    for (m, (&x, &w)) in rule.nodes().iter().zip(rule.weights()).enumerate() {
        let (mut pm, mut pj) = (1.0, x);
        basis[m] = 0.5 * w;
        for j in 1..n {
            let jf = j as f64;
            basis[j * n + m] = (2.0 * jf + 1.0) * 0.5 * w * pj;
            let pn = ((2.0 * jf + 1.0) * x * pj - jf * pm) / (jf + 1.0);
            pm = pj;
            pj = pn;
        }
    }
    let mut out = Vec::with_capacity(values.len());
    for vals in values.chunks(n) {
        for j in 0..n {
            out.push(basis[j * n..(j + 1) * n].iter().zip(vals).map(|(b, v)| b * v).sum());
        }
    }
    out
}

fn bump_pdf(v: f64) -> f64 {
    let a = v.abs();
    if a <= 1.0 {
        0.375 - 0.125 * v * v
    } else if a < 3.0 {
        (3.0 - a).powi(2) / 16.0
    } else {
        0.0
    }
}

fn bump_dpdf(v: f64) -> f64 {
    let a = v.abs();
    if a <= 1.0 {
        -0.25 * v
    } else if a < 3.0 {
        -v.signum() * (3.0 - a) / 8.0
    } else {
        0.0
    }
}

/// Fourth-order finite-difference slopes on a possibly nonuniform mesh, via
/// the derivative of the local five-point interpolating polynomial.
fn fourth_order_slopes(xs: &[f64], fs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    (0..n)
        .map(|i| {
            let s = i.saturating_sub(2).min(n - 5);
            let idx: Vec<usize> = (s..s + 5).collect();
            let x0 = xs[i];
            let mut d = 0.0;
            for &j in &idx {
                // derivative of the Lagrange basis polynomial L_j at x0
                let mut lj = 0.0;
                for &m in &idx {
                    if m == j {
                        continue;
                    }
                    let mut term = 1.0 / (xs[j] - xs[m]);
                    for &l in &idx {
                        if l != j && l != m {
                            term *= (x0 - xs[l]) / (xs[j] - xs[l]);
                        }
                    }
                    lj += term;
                }
                d += fs[j] * lj;
            }
            d
        })
        .collect()
}

/// `∫ |v|^k f`.
pub fn moment(f: &Density1D, k: f64) -> f64 {
    f.moment(k)
}

pub fn moment_report(f: &Density1D, k: f64) -> MomentReport {
    MomentReport { k, value: f.moment(k), label: f.label().to_string() }
}

/// `∫ f log(f/g)` on the grid of `f`; `+∞` when `f` charges a set where `g` vanishes.
///
/// Mass of `f` below [`NEGLIGIBLE_MASS`] outside the support of `g` (truncated tails) is ignored.
pub fn relative_entropy(f: &Density1D, g: &Density1D) -> f64 {
    let mut acc = 0.0;
    let mut lost = 0.0;
    for ((&x, &w), &fx) in f.grid.points().iter().zip(f.grid.weights()).zip(&f.values) {
        if fx < ATOM_FLOOR {
            continue;
        }
        let gx = g.pdf(x);
        if gx <= ATOM_FLOOR {
            lost += w * fx;
            continue;
        }
        acc += w * fx * (fx / gx).ln();
    }
    if lost > NEGLIGIBLE_MASS {
        log::warn!("relative_entropy: {} puts mass {lost:e} where {} vanishes", f.label, g.label);
        return f64::INFINITY;
    }
    acc
}

pub fn fisher_information(f: &Density1D) -> Result<f64> {
    f.fisher_information()
}

/// `I(f|γ) = I(f) + M_2(f) - 2`.
pub fn relative_fisher_gaussian(f: &Density1D) -> Result<f64> {
    Ok(f.fisher_information()? + f.moment(2.0) - 2.0)
}

/// `∫ f(v) (1 - v²/N)^{-q/(q-2)} dv`, or `+∞` when mass sits on the poles `±√N`.
pub fn pole_control(f: &Density1D, n: usize, q: f64) -> Result<f64> {
    if !(q > 2.0) {
        return Err(invalid(format!("pole control needs q > 2, got {q}")));
    }
    let nf = n as f64;
    let root = nf.sqrt();
    let near_pole = f.cdf(-root + 1e-6) + (1.0 - f.cdf(root - 1e-6));
    if near_pole > 1e-12 {
        return Ok(f64::INFINITY);
    }
    let e = -q / (q - 2.0);
    // A density vanishing like d^a at a pole gives a finite integral iff a + e > -1.
    let (lo, hi) = f.support();
    for (end, pole, dir) in [(hi, root, -1.0), (lo, -root, 1.0)] {
        if (end - pole).abs() > 1e-9 * root {
            continue;
        }
        let (f1, f2) = (f.pdf(pole + dir * 1e-3), f.pdf(pole + dir * 1e-4));
        if f1 > ATOM_FLOOR && f2 > ATOM_FLOOR && (f1 / f2).log10() + e <= -1.0 + 1e-2 {
            return Ok(f64::INFINITY);
        }
    }
    let mut acc = 0.0;
    for ((&x, &w), &fx) in f.grid.points().iter().zip(f.grid.weights()).zip(&f.values) {
        if fx <= 0.0 {
            continue;
        }
        let base = 1.0 - x * x / nf;
        if base <= 0.0 {
            return Ok(f64::INFINITY);
        }
        acc += w * fx * base.powf(e);
    }
    Ok(acc)
}

/// `I(f)^{1/2}`, an upper bound for `sup f`.
pub fn supnorm_via_fisher(f: &Density1D) -> Result<f64> {
    Ok(f.fisher_information()?.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gaussian_moments() {
        let g = Density1D::standard_gaussian();
        assert_abs_diff_eq!(g.mass(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(moment(&g, 2.0), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(moment(&g, 4.0), 3.0, epsilon = 1e-8);
        let u = Density1D::uniform(-3f64.sqrt(), 3f64.sqrt()).unwrap();
        assert_abs_diff_eq!(moment(&u, 2.0), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn bump_shape() {
        let b = Density1D::bump(2.5).unwrap();
        assert_abs_diff_eq!(b.mass(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(b.moment(2.0), 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(b.moment(4.0), 2.6, epsilon = 1e-12);
        assert_abs_diff_eq!(b.pdf(0.5), 0.375 - 0.125 * 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(b.pdf(2.0), 1.0 / 16.0, epsilon = 1e-14);
        assert!((b.renormalization() - 1.0).abs() < 1e-13);
        let other = Density1D::bump(0.3).unwrap();
        assert_eq!(b.values(), other.values());
    }

    #[test]
    fn gaussian_relative_entropies() {
        let g = Density1D::standard_gaussian();
        assert_abs_diff_eq!(relative_entropy(&g, &g), 0.0, epsilon = 1e-14);
        let g2 = Density1D::gaussian(2.0).unwrap();
        assert_abs_diff_eq!(relative_entropy(&g2, &g), (1.0 - 2f64.ln()) / 2.0, epsilon = 1e-7);
        let a = 3f64.sqrt();
        let u = Density1D::uniform(-a, a).unwrap();
        let want = -(2.0 * a).ln() + 0.5 * (2.0 * PI).ln() + 0.5;
        assert_abs_diff_eq!(relative_entropy(&u, &g), want, epsilon = 1e-7);
        assert_abs_diff_eq!(u.relative_entropy_gaussian(), want, epsilon = 1e-12);
        assert_eq!(relative_entropy(&g, &u), f64::INFINITY);
    }

    #[test]
    fn fisher_closed_forms() {
        let g = Density1D::standard_gaussian();
        assert_abs_diff_eq!(fisher_information(&g).unwrap(), 1.0, epsilon = 1e-7);
        assert_abs_diff_eq!(relative_fisher_gaussian(&g).unwrap(), 0.0, epsilon = 1e-7);
        let g4 = Density1D::gaussian(4.0).unwrap();
        assert_abs_diff_eq!(fisher_information(&g4).unwrap(), 0.25, epsilon = 1e-7);
        assert_abs_diff_eq!(supnorm_via_fisher(&g4).unwrap(), 0.5, epsilon = 1e-7);
        let g2 = Density1D::gaussian(2.0).unwrap();
        assert_abs_diff_eq!(relative_fisher_gaussian(&g2).unwrap(), 0.5, epsilon = 1e-6);
        assert_abs_diff_eq!(relative_fisher_gaussian_direct_of(&g2), 0.5, epsilon = 1e-6);
        let u = Density1D::uniform(0.0, 1.0).unwrap();
        assert!(matches!(fisher_information(&u), Err(Error::MissingDerivative(_))));
    }

    fn relative_fisher_gaussian_direct_of(f: &Density1D) -> f64 {
        f.relative_fisher_gaussian_direct().unwrap()
    }

    #[test]
    fn pole_control_against_fine_quadrature() {
        let u = Density1D::uniform(-1.0, 1.0).unwrap();
        assert!(pole_control(&u, 4, 2.0).is_err());
        let got = pole_control(&u, 4, 4.0).unwrap();
        // ten times finer composite rule of lower order as the oracle
        let oracle = crate::numerics::integrate_composite(|v| 0.5 * (1.0 - v * v / 4.0).powi(-2), -1.0, 1.0, 80, 10);
        assert_abs_diff_eq!(got, oracle, epsilon = 1e-12);
        let big = pole_control(&u, 1_000_000, 3.0).unwrap();
        assert_abs_diff_eq!(big, 1.0, epsilon = 1e-5);
        let b = Density1D::bump(1.0).unwrap();
        assert!(pole_control(&b, 16, 3.0).unwrap() <= (1.0f64 - 9.0 / 16.0).powf(-3.0));
        assert_eq!(pole_control(&b, 9, 3.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn quantiles() {
        let u = Density1D::uniform(0.0, 1.0).unwrap();
        assert_abs_diff_eq!(u.quantile(0.5), 0.5, epsilon = 1e-14);
        let g = Density1D::standard_gaussian();
        assert_abs_diff_eq!(g.quantile(0.5), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g.quantile(0.841_344_746_068_543), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(g.quantile(0.841345), 1.0, epsilon = 1e-4);
        for i in 1..1000 {
            let t = i as f64 / 1000.0;
            assert!((g.cdf(g.quantile(t)) - t).abs() < 1e-13);
        }
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        let mut s = String::from("v,f\n");
        for i in 0..=240 {
            let v = -6.0 + i as f64 * 0.05;
            s.push_str(&format!("{v},{}\n", (-0.5 * v * v).exp()));
        }
        std::fs::write(&path, s).unwrap();
        let f = Density1D::from_csv(&path).unwrap();
        assert_abs_diff_eq!(f.renormalization(), 1.0 / (2.0 * PI).sqrt(), epsilon = 1e-8);
        assert_abs_diff_eq!(f.moment(2.0), 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(fisher_information(&f).unwrap(), 1.0, epsilon = 1e-5);
        std::fs::write(&path, "v,f\n0,1\n1,x\n").unwrap();
        assert!(matches!(Density1D::from_csv(&path), Err(Error::Parse(_))));
    }
}
