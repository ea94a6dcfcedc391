use crate::error::{invalid, Result};

/// `N Π_j (mean_i a_{j,i})^{1/p_j} - Σ_i Π_j a_{j,i}^{1/p_j}`, nonnegative when `Σ 1/p_j <= 1`.
pub fn holder_type_check(a: &[Vec<f64>], p: &[f64]) -> Result<f64> {
    if a.is_empty() || a.len() != p.len() {
        return Err(invalid(format!("need one exponent per row: {} rows, {} exponents", a.len(), p.len())));
    }
    let n = a[0].len();
    if n == 0 || a.iter().any(|row| row.len() != n) {
        return Err(invalid("rows must have equal positive length"));
    }
    if p.iter().any(|&pj| !(pj > 0.0)) {
        return Err(invalid("exponents must be positive"));
    }
    let inv: f64 = p.iter().map(|pj| 1.0 / pj).sum();
    if inv > 1.0 + 1e-12 {
        return Err(invalid(format!("sum of 1/p_j = {inv} exceeds 1")));
    }
    if a.iter().flatten().any(|&x| !(x >= 0.0)) {
        return Err(invalid("entries must be nonnegative"));
    }
    let nf = n as f64;
    let right: f64 = a.iter().zip(p).map(|(row, &pj)| (row.iter().sum::<f64>() / nf).powf(1.0 / pj)).product::<f64>() * nf;
    let left: f64 = (0..n).map(|i| a.iter().zip(p).map(|(row, &pj)| row[i].powf(1.0 / pj)).product::<f64>()).sum();
    Ok(right - left)
}
