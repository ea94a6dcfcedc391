//! Numbers stored as sign and log-magnitude.

use std::ops::{Div, Mul};

use num_complex::Complex64;

/// A real number `sign · exp(log_magnitude)`; zero has `sign == 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogScaled {
    log_magnitude: f64,
    sign: i8,
}

impl LogScaled {
    pub const ZERO: Self = Self { log_magnitude: f64::NEG_INFINITY, sign: 0 };
    pub const ONE: Self = Self { log_magnitude: 0.0, sign: 1 };

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            Self { log_magnitude: x.abs().ln(), sign: if x > 0.0 { 1 } else { -1 } }
        }
    }

    /// Positive number with the given logarithm.
    pub fn from_ln(log_magnitude: f64) -> Self {
        if log_magnitude == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            Self { log_magnitude, sign: 1 }
        }
    }

    pub fn log_magnitude(&self) -> f64 {
        self.log_magnitude
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Back to `f64`; may overflow to infinity or underflow to zero.
    pub fn to_f64(&self) -> f64 {
        f64::from(self.sign) * self.log_magnitude.exp()
    }

    pub fn powf(&self, p: f64) -> Self {
        match self.sign {
            0 => Self::ZERO,
            1 => Self::from_ln(self.log_magnitude * p),
            _ => panic!("fractional power of a negative LogScaled"),
        }
    }

    pub fn powi(&self, n: i32) -> Self {
        let sign = if self.sign < 0 && n % 2 != 0 { -1 } else { self.sign.abs() };
        if self.sign == 0 {
            return Self::ZERO;
        }
        Self { log_magnitude: self.log_magnitude * f64::from(n), sign }
    }

    /// Sum of two values, rescaled to avoid overflow.
    pub fn add(&self, other: &Self) -> Self {
        if self.sign == 0 {
            return *other;
        }
        if other.sign == 0 {
            return *self;
        }
        let m = self.log_magnitude.max(other.log_magnitude);
        let s = f64::from(self.sign) * (self.log_magnitude - m).exp()
            + f64::from(other.sign) * (other.log_magnitude - m).exp();
        let r = Self::from_f64(s);
        if r.sign == 0 {
            r
        } else {
            Self { log_magnitude: r.log_magnitude + m, sign: r.sign }
        }
    }
}

impl Mul for LogScaled {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.sign == 0 || rhs.sign == 0 {
            return Self::ZERO;
        }
        Self { log_magnitude: self.log_magnitude + rhs.log_magnitude, sign: self.sign * rhs.sign }
    }
}

impl Div for LogScaled {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        assert!(rhs.sign != 0, "division by a zero LogScaled");
        if self.sign == 0 {
            return Self::ZERO;
        }
        Self { log_magnitude: self.log_magnitude - rhs.log_magnitude, sign: self.sign * rhs.sign }
    }
}

/// A complex number `exp(log_magnitude + i·phase)`, used to raise characteristic
/// function values to large powers without underflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogPolar {
    pub log_magnitude: f64,
    pub phase: f64,
}

impl LogPolar {
    pub fn from_complex(z: Complex64) -> Self {
        Self { log_magnitude: z.norm().ln(), phase: z.arg() }
    }

    pub fn to_complex(&self) -> Complex64 {
        if self.log_magnitude == f64::NEG_INFINITY {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.log_magnitude.exp(), self.phase)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut phase = self.phase + other.phase;
        phase -= std::f64::consts::TAU * (phase / std::f64::consts::TAU).round();
        Self { log_magnitude: self.log_magnitude + other.log_magnitude, phase }
    }

    /// `z^n` by repeated squaring; `stage` receives the log-magnitude after each squaring.
    pub fn pow(&self, n: u64, mut stage: impl FnMut(u64, f64)) -> Self {
        let mut result = Self { log_magnitude: 0.0, phase: 0.0 };
        let mut base = *self;
        let mut e = n;
        let mut power = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
                power *= 2;
                stage(power, base.log_magnitude);
            }
        }
        result
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_iff_sign_zero() {
        assert!(LogScaled::from_f64(0.0).is_zero());
        assert_eq!(LogScaled::from_f64(-2.5).sign(), -1);
        assert!((LogScaled::from_f64(-2.5).to_f64() + 2.5).abs() < 1e-15);
    }

    #[test]
    fn products_beyond_f64_range() {
        let big = LogScaled::from_ln(800.0);
        let q = (big * big) / (big * LogScaled::from_f64(2.0));
        assert!((q.log_magnitude() - (800.0 - 2f64.ln())).abs() < 1e-12);
        assert_eq!(big.powi(3).sign(), 1);
        assert_eq!(LogScaled::from_f64(-1.0).powi(3).sign(), -1);
        let s = big.add(&LogScaled::from_ln(800.0 + 2f64.ln()));
        assert!((s.log_magnitude() - (800.0 + 3f64.ln())).abs() < 1e-12);
        assert!(big.add(&LogScaled::from_ln(800.0).powi(1).mul(LogScaled::from_f64(-1.0))).is_zero());
    }

    #[test]
    fn polar_power_matches_complex() {
        let z = Complex64::new(0.3, -0.7);
        let mut stages = Vec::new();
        let p = LogPolar::from_complex(z).pow(13, |k, m| stages.push((k, m)));
        let want = z.powi(13);
        assert!((p.to_complex() - want).norm() < 1e-13 * want.norm());
        assert_eq!(stages.iter().map(|s| s.0).collect::<Vec<_>>(), vec![2, 4, 8]);
    }
}
