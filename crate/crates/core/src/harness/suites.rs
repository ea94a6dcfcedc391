//! Seeded randomized suites for the elementary inequalities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::holder::holder_type_check;
use crate::transport::pointwise_wq_inequality_check;

/// Tolerance below which a slack counts as a violation.
pub const SUITE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub seed: u64,
    pub cases: usize,
    pub violations: usize,
    pub min_slack: f64,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn tally(name: &'static str, seed: u64, slacks: impl Iterator<Item = f64>) -> SuiteOutcome {
    let (mut cases, mut violations, mut min_slack) = (0, 0, f64::INFINITY);
    for s in slacks {
        cases += 1;
        if !(s >= -SUITE_TOL) {
            violations += 1;
        }
        min_slack = min_slack.min(s);
    }
    SuiteOutcome { name, seed, cases, violations, min_slack }
}

/// Random nonnegative `m × N` matrices (`m <= 4`, `N <= 50`) with `Σ 1/p_j <= 1`.
pub fn holder_suite(seed: u64, cases: usize) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let slacks: Vec<f64> = (0..cases)
        .map(|_| {
            let m = rng.gen_range(1..=4);
            let n = rng.gen_range(1..=50);
            let total: f64 = rng.gen_range(0.05..=1.0);
            let raw: Vec<f64> = (0..m).map(|_| rng.gen_range(0.1..1.0)).collect();
            let s: f64 = raw.iter().sum();
            let p: Vec<f64> = raw.iter().map(|r| s / (r * total)).collect();
            let a: Vec<Vec<f64>> = (0..m)
                .map(|_| (0..n).map(|_| if rng.gen_bool(0.1) { 0.0 } else { rng.gen_range(0.0..10.0) }).collect())
                .collect();
            holder_type_check(&a, &p).expect("valid instance")
        })
        .collect();
    tally("holder_type", seed, slacks.into_iter())
}

/// Random `(x, y, R, q, k)` with `x, y ∈ [-10, 10]`, `R ∈ [1, 10]`, `q ∈ [1, 4]`, `k ∈ (q, 8]`.
pub fn pointwise_suite(seed: u64, cases: usize) -> SuiteOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let slacks: Vec<f64> = (0..cases)
        .map(|_| {
            let x = rng.gen_range(-10.0..=10.0);
            let y = rng.gen_range(-10.0..=10.0);
            let r = rng.gen_range(1.0..=10.0);
            let q: f64 = rng.gen_range(1.0..=4.0);
            let k = 8.0 - rng.gen_range(0.0..(8.0 - q));
            pointwise_wq_inequality_check(x, y, r, q, k)
        })
        .collect();
    tally("pointwise_wq", seed, slacks.into_iter())
}
