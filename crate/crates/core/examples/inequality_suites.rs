//! Seeded random suites for the elementary inequalities.
//!
//! `cargo run --release --example inequality_suites`

use kacsphere::harness::{holder_suite, holder_type_check, pointwise_suite};

fn main() {
    for s in [holder_suite(42, 1000), pointwise_suite(42, 100_000)] {
        println!("{:<12} seed {} cases {:>6} violations {} min slack {:.3e}", s.name, s.seed, s.cases, s.violations, s.min_slack);
    }
    let a = vec![vec![1.0, 4.0, 9.0], vec![2.0, 0.5, 1.0]];
    println!("single instance slack: {:.6}", holder_type_check(&a, &[2.0, 2.0]).expect("valid instance"));
}
