//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use kacsphere::density1d::Density1D;
use kacsphere::extension::{
    euclidean_superadditivity_check, extension_entropy_consistency, extension_marginal1, extension_moment_identity_check,
    ExtensionMarginal,
};
use kacsphere::harness::{entropy_identity, holder_suite, pointwise_suite, verify_chain, ChainParams, SUITE_TOL};
use kacsphere::numerics::ConvolutionOptions;
use kacsphere::sphere::{
    build_zcurve, partial_entropy_sum, spherical_entropy, spherical_fisher_full, spherical_fisher_marginal, SphereDensity,
};
use kacsphere::transport::{distorted_hwi_check, hm_lift_bound, hwi_check, w1_sphere_bound};
use kacsphere::Result;

const SWEEP: [usize; 7] = [8, 16, 32, 64, 128, 256, 512];
const SPOT: [usize; 3] = [16, 64, 256];

/// Bump spheres and their extension marginals, built on first use.
struct Bumps {
    cache: BTreeMap<usize, (SphereDensity, ExtensionMarginal)>,
}

impl Bumps {
    fn get(&mut self, n: usize) -> Result<&(SphereDensity, ExtensionMarginal)> {
        if let Entry::Vacant(slot) = self.cache.entry(n) {
            let s = SphereDensity::conditioned(Density1D::bump(1.0)?, n)?;
            let e = extension_marginal1(&s)?;
            slot.insert((s, e));
        }
        Ok(&self.cache[&n])
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn moment_identity(b: &mut Bumps) -> Result<Outcome> {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for n in SWEEP {
        let (s, e) = b.get(n)?;
        for k in [2.0, 4.0, 6.0] {
            worst = worst.max(extension_moment_identity_check(s, e, k)?.slack);
        }
    }
    let t = start.elapsed();
    outcome(worst < 1e-6 && t < Duration::from_secs(60), format!("max relative slack {worst:.2e}, {:.1}s", t.as_secs_f64()))
}

fn second_moment_equality(b: &mut Bumps) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut factor_dev: f64 = 0.0;
    for n in SWEEP {
        let (s, e) = b.get(n)?;
        let m = extension_moment_identity_check(s, e, 2.0)?;
        factor_dev = factor_dev.max((m.factor - 1.0).abs());
        worst = worst.max((m.extension_moment - m.sphere_moment).abs());
    }
    outcome(worst < 1e-8 && factor_dev < 1e-8, format!("|factor-1| {factor_dev:.1e}, max |M_2 difference| {worst:.2e}"))
}

fn entropy_consistency(b: &mut Bumps) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for n in SPOT {
        worst = worst.max(extension_entropy_consistency(&b.get(n)?.0)?.slack);
    }
    outcome(worst < 1e-6, format!("max |H(ext) - H_N| {worst:.2e}"))
}

fn identity_paths(b: &mut Bumps) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut uniform_value: f64 = 0.0;
    for n in SPOT {
        let u = entropy_identity(&SphereDensity::uniform(n)?)?;
        uniform_value = uniform_value.max(u.identity.abs()).max(u.direct.abs());
        worst = worst.max(u.discrepancy());
        worst = worst.max(entropy_identity(&b.get(n)?.0)?.discrepancy());
    }
    outcome(
        worst < 1e-6 && uniform_value < 1e-6,
        format!("max path discrepancy {worst:.2e}, uniform |value| {uniform_value:.2e}"),
    )
}

fn cll(b: &mut Bumps) -> Result<Outcome> {
    let mut pass = true;
    let mut worst_slack = f64::INFINITY;
    let mut max_ratio: f64 = 0.0;
    for n in SPOT {
        let g = SphereDensity::conditioned(Density1D::standard_gaussian(), n)?;
        for s in [&SphereDensity::uniform(n)?, &g, &b.get(n)?.0] {
            let partial = partial_entropy_sum(s)?;
            let h = spherical_entropy(s)?;
            let slack = 2.0 * h + 1e-8 - partial;
            pass &= slack >= 0.0;
            worst_slack = worst_slack.min(slack);
        }
        let s = &b.get(n)?.0;
        let ratio = partial_entropy_sum(s)? / spherical_entropy(s)?;
        pass &= ratio < 2.0;
        max_ratio = max_ratio.max(ratio);
    }
    outcome(pass, format!("min slack of 2H_N + 1e-8 - partial {worst_slack:.2e}, max bump ratio {max_ratio:.4}"))
}

fn main_trend() -> Result<Outcome> {
    let start = Instant::now();
    let params = ChainParams::default();
    let mut eps = BTreeMap::new();
    let mut all_steps = true;
    for n in [16usize, 32, 64, 128, 256] {
        let s = SphereDensity::conditioned(Density1D::bump(1.0)?, n)?;
        let r = verify_chain(&s, &params)?;
        all_steps &= r.steps.iter().all(|st| st.passed());
        eps.insert(n, r.epsilon_hat.unwrap_or(f64::NAN));
    }
    let t = start.elapsed();
    let (e16, e256) = (eps[&16], eps[&256]);
    outcome(
        e256 < e16 / 2.0 && all_steps && t < Duration::from_secs(300),
        format!("eps(16) {e16:.4}, eps(256) {e256:.5}, all steps pass: {all_steps}, {:.1}s", t.as_secs_f64()),
    )
}

fn w1_bound(b: &mut Bumps) -> Result<Outcome> {
    let mut pass = true;
    let mut taus = Vec::new();
    for n in SWEEP {
        let (s, e) = b.get(n)?;
        let r = w1_sphere_bound(s, e)?;
        pass &= r.exact <= r.bounds[0].1;
        taus.push(r.diagnostic("tau_hat").unwrap_or(f64::NAN));
    }
    let decreasing = taus.windows(2).all(|w| w[1].abs() < w[0].abs());
    let last = taus[taus.len() - 1];
    outcome(
        pass && decreasing && last.abs() < 0.1,
        format!("W1 <= B1 everywhere: {pass}, tau_hat(8) {:.3e}, tau_hat(512) {last:.3e}", taus[0]),
    )
}

fn hm_and_hwi(b: &mut Bumps) -> Result<Outcome> {
    let mut worst = f64::INFINITY;
    let k = 4.0;
    for n in SPOT {
        let (s, e) = b.get(n)?;
        let p1 = s.marginal1()?;
        for q in [2.0, 3.0] {
            worst = worst.min(hm_lift_bound(p1, &e.density, q, k)?.slacks().map(|x| x.1).fold(f64::INFINITY, f64::min));
        }
        worst = worst.min(hwi_check(p1, &e.density)?.slack());
        worst = worst.min(distorted_hwi_check(s, e, 3.0)?.check.slack());
    }
    outcome(worst >= 0.0, format!("min slack {worst:.3e}"))
}

fn zcurve(_: &mut Bumps) -> Result<Outcome> {
    let opts = ConvolutionOptions::default();
    let g = Density1D::standard_gaussian();
    let mut dev: f64 = 0.0;
    for n in [8usize, 32, 128] {
        let c = build_zcurve(&g, n, &opts)?;
        let nf = n as f64;
        for i in 0..=300 {
            let u = nf / 2.0 + 1.5 * nf * i as f64 / 300.0;
            dev = dev.max((c.log_z(u) + 0.5 * nf * (2.0 * PI).ln() + 0.5 * u).abs());
        }
    }
    let f = Density1D::bump(1.0)?;
    let l16 = build_zcurve(&f, 16, &opts)?.sup_abs_lambda();
    let l256 = build_zcurve(&f, 256, &opts)?.sup_abs_lambda();
    outcome(
        dev < 1e-6 && l256 < l16 / 2.0,
        format!("Gaussian log Z deviation {dev:.2e}, sup|lambda| N=16 {l16:.4e}, N=256 {l256:.4e}"),
    )
}

fn property_suites(b: &mut Bumps) -> Result<Outcome> {
    let h = holder_suite(42, 1000);
    let p = pointwise_suite(42, 100_000);
    let mut min_super = f64::INFINITY;
    for n in SWEEP {
        let (s, e) = b.get(n)?;
        min_super = min_super.min(euclidean_superadditivity_check(s, e)?.slack);
    }
    outcome(
        h.passed() && p.passed() && min_super >= 0.0,
        format!(
            "holder {}/{} violations, pointwise {}/{} violations (tol {SUITE_TOL:e}), min superadditivity slack {min_super:.3e}",
            h.violations, h.cases, p.violations, p.cases
        ),
    )
}

fn fisher(b: &mut Bumps) -> Result<Outcome> {
    let mut uniform: f64 = 0.0;
    for n in 8..=1024 {
        uniform = uniform.max(spherical_fisher_marginal(&SphereDensity::uniform(n)?)?.value.abs());
    }
    let mut bcd = f64::INFINITY;
    for n in [16usize, 64] {
        let s = &b.get(n)?.0;
        let lhs = n as f64 * spherical_fisher_marginal(s)?.value;
        let rhs = 2.0 * spherical_fisher_full(s)?;
        bcd = bcd.min(rhs + 1e-6 - lhs);
    }
    outcome(uniform < 1e-6 && bcd >= 0.0, format!("max uniform |I_N| {uniform:.2e}, min slack 2I_N(F_N) + 1e-6 - N I_N(F_1) {bcd:.3e}"))
}

type Criterion = fn(&mut Bumps) -> Result<Outcome>;

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 11] = [
        ("moment identity k in {2,4,6}", moment_identity),
        ("second moment equality", second_moment_equality),
        ("entropy consistency", entropy_consistency),
        ("entropy identity two paths", identity_paths),
        ("CLL inequality", cll),
        ("epsilon trend and chain", |_| main_trend()),
        ("W1 bound and tau_hat", w1_bound),
        ("HM lift, HWI, distorted HWI", hm_and_hwi),
        ("normalization curves", zcurve),
        ("property suites and superadditivity", property_suites),
        ("Fisher cancellation and BCD", fisher),
    ];
    let mut bumps = Bumps { cache: BTreeMap::new() };
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (pass, detail) = match run(&mut bumps) {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!("{} criterion {:>2} {name}: {detail}", if pass { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
