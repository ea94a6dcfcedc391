//! Log-domain Gamma function and sphere surface areas.

use std::f64::consts::PI;

use crate::error::{invalid, Result};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
const STIRLING_SHIFT: f64 = 15.0;

/// Tail of the Stirling series `ln Γ(z) - [(z - ½) ln z - z + ½ ln 2π]`, valid for `z >= 15`.
fn stirling_tail(z: f64) -> f64 {
    let r = 1.0 / z;
    let r2 = r * r;
    r * (1.0 / 12.0
        + r2 * (-1.0 / 360.0
            + r2 * (1.0 / 1260.0 + r2 * (-1.0 / 1680.0 + r2 * (1.0 / 1188.0 - r2 * 691.0 / 360_360.0)))))
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma requires x > 0, got {x}");
    let mut z = x;
    let mut prod = 1.0;
    while z < STIRLING_SHIFT {
        prod *= z;
        z += 1.0;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + stirling_tail(z) - prod.ln()
}

/// `ln Γ(x + a) - ln Γ(x)` for `x > 0`, `a >= 0`, without forming either Gamma.
///
/// Integer parts of `a` are peeled off as exact products, the fractional part
/// goes through a Stirling difference that has no cancellation for large `x`.
pub fn ln_gamma_ratio(x: f64, a: f64) -> f64 {
    assert!(x > 0.0 && a >= 0.0, "ln_gamma_ratio requires x > 0, a >= 0");
    let whole = a.floor();
    let frac = a - whole;
    let mut acc = 0.0;
    let mut i = 0.0;
    while i < whole {
        acc += (x + frac + i).ln();
        i += 1.0;
    }
    if frac == 0.0 {
        return acc;
    }
    // ln Γ(x + frac) - ln Γ(x), shifting x above the Stirling threshold.
    let mut z = x;
    while z < STIRLING_SHIFT {
        acc -= (frac / z).ln_1p();
        z += 1.0;
    }
    acc + (z - 0.5) * (frac / z).ln_1p() + frac * (z + frac).ln() - frac + stirling_tail(z + frac)
        - stirling_tail(z)
}

/// `ln |S^{n-1}|`, the log surface area of the unit sphere in `R^n`.
pub fn log_sphere_area(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(invalid("sphere dimension n must be >= 1"));
    }
    let half = n as f64 / 2.0;
    Ok(2f64.ln() + half * PI.ln() - ln_gamma(half))
}

/// Same as [`log_sphere_area`] for callers that have already validated `n >= 1`.
pub(crate) fn ln_area(n: usize) -> f64 {
    log_sphere_area(n).expect("sphere dimension must be positive")
}

/// `(2/N)^{k/2} Γ((N+k)/2) / Γ(N/2)`, the factor linking `|v|^k` moments of the
/// extension marginal to those of the sphere marginal.
///
/// For even `k = 2l` this is `Π_{i<l} (1 + 2i/N)`.
pub fn gamma_ratio_factor(n: usize, k: f64) -> f64 {
    assert!(n >= 1 && k >= 0.0);
    let nf = n as f64;
    (0.5 * k * (2.0 / nf).ln() + ln_gamma_ratio(nf / 2.0, k / 2.0)).exp()
}

/// `sup_{2 <= N <= n_max}` of [`gamma_ratio_factor`]; the factor decreases in N,
/// so in practice this is attained at the smallest N.
pub fn gamma_ratio_sup(k: f64, n_max: usize) -> f64 {
    (2..=n_max.max(2)).map(|n| gamma_ratio_factor(n, k)).fold(0.0, f64::max)
}
