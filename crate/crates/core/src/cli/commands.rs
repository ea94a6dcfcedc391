use std::fs::File;
use std::io::BufWriter;
use std::f64::consts::PI;
use std::path::Path;

use rayon::prelude::*;

use super::config::{FamilySpec, RunConfig};
use super::svg::{line_plot, Scale, Series};
use crate::error::Error;
use crate::extension::extension_marginal1;
use crate::harness::{holder_suite, pointwise_suite, verify_chain, write_chain_csv, InequalityReport};
use crate::sphere::build_zcurve;
use crate::transport::{distorted_hwi_check, hm_lift_bound, hwi_check, w1_sphere_bound, BOUND_TOL, HWI_TOL};

/// Rows kept per normalization-curve CSV.
const ZCURVE_ROWS: usize = 2000;
/// Agreement required between a Gaussian curve and its closed form.
const CLOSED_FORM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CmdError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Config(_) => 2,
            CmdError::Numerical(_) => 1,
        }
    }
}

impl From<Error> for CmdError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::InvalidDensity { .. } | Error::Parse(_) => CmdError::Config(e.to_string()),
            _ => CmdError::Numerical(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CmdError {
    CmdError::Numerical(format!("{}: {e}", path.display()))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>, CmdError> {
    Ok(csv::Writer::from_writer(BufWriter::new(File::create(path).map_err(|e| io_err(path, e))?)))
}

fn write_text(path: &Path, s: &str) -> Result<(), CmdError> {
    std::fs::write(path, s).map_err(|e| io_err(path, e))
}

fn check_ns(cfg: &RunConfig) -> Result<(), CmdError> {
    if let Some(&n) = cfg.ns.iter().find(|&&n| n < 3) {
        return Err(CmdError::Config(format!("N={n} is below the minimum N=3")));
    }
    Ok(())
}

/// Runs the chain for every `N`; writes `chain.csv`, `epsilon.csv` and `epsilon.svg`.
pub fn cmd_verify(cfg: &RunConfig, out: &Path) -> Result<bool, CmdError> {
    cfg.params.validate()?;
    check_ns(cfg)?;
    let opts = cfg.grid.options();
    let reports: Vec<InequalityReport> = cfg
        .ns
        .par_iter()
        .map(|&n| {
            let sphere = cfg.family.sphere(n, &opts)?;
            verify_chain(&sphere, &cfg.params)
        })
        .collect::<Result<_, Error>>()?;

    let path = out.join("chain.csv");
    write_chain_csv(&reports, BufWriter::new(File::create(&path).map_err(|e| io_err(&path, e))?))?;
    let path = out.join("epsilon.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["N", "epsilon_hat"]).map_err(|e| io_err(&path, e))?;
    for r in &reports {
        let eps = r.epsilon_hat.map_or_else(|| "undefined".to_string(), |e| e.to_string());
        w.write_record([r.n.to_string(), eps]).map_err(|e| io_err(&path, e))?;
    }
    w.flush().map_err(|e| io_err(&path, e))?;
    let series = Series {
        name: reports.first().map_or_else(String::new, |r| r.family.clone()),
        points: reports.iter().filter_map(|r| Some((r.n as f64, r.epsilon_hat?))).collect(),
    };
    write_text(&out.join("epsilon.svg"), &line_plot("measured epsilon_hat(N)", "N", "epsilon_hat", Scale::Log, Scale::Log, &[series]))?;

    let mut ok = true;
    for r in &reports {
        let ratio = r.ratio.map_or_else(|| "undefined (H_N = 0)".to_string(), |x| format!("{x:.6}"));
        println!("N={} {}: ratio {ratio}", r.n, r.family);
        for s in r.failed_steps() {
            ok = false;
            eprintln!("N={}: step {} failed (lhs {}, rhs {}, slack {:e})", r.n, s.name, s.lhs, s.rhs, s.slack());
        }
    }
    Ok(ok)
}

/// Tabulates the normalization curve for every `N`.
pub fn cmd_zcurve(cfg: &RunConfig, out: &Path) -> Result<bool, CmdError> {
    check_ns(cfg)?;
    let f = cfg
        .family
        .base()?
        .ok_or_else(|| CmdError::Config("zcurve needs a base density (bump, gaussian or file)".into()))?;
    let opts = cfg.grid.options();
    let curves = cfg.ns.par_iter().map(|&n| build_zcurve(&f, n, &opts)).collect::<Result<Vec<_>, Error>>()?;
    let sup_path = out.join("zcurve_sup.csv");
    let mut sup = csv_writer(&sup_path)?;
    sup.write_record(["N", "sup_abs_lambda"]).map_err(|e| io_err(&sup_path, e))?;
    let mut series = Vec::new();
    let gaussian_var = match cfg.family {
        FamilySpec::Gaussian { var } => Some(var),
        _ => None,
    };
    let mut ok = true;
    for c in &curves {
        let pts = c.points();
        let stride = pts.len().div_ceil(ZCURVE_ROWS).max(1);
        let path = out.join(format!("zcurve_N{}.csv", c.n()));
        let mut w = csv_writer(&path)?;
        w.write_record(["u", "log_z", "lambda"]).map_err(|e| io_err(&path, e))?;
        let kept: Vec<_> = pts.iter().step_by(stride).collect();
        for p in &kept {
            w.write_record([p.u.to_string(), p.log_z.to_string(), p.lambda.to_string()]).map_err(|e| io_err(&path, e))?;
        }
        w.flush().map_err(|e| io_err(&path, e))?;
        let sup_l = c.sup_abs_lambda();
        sup.write_record([c.n().to_string(), sup_l.to_string()]).map_err(|e| io_err(&sup_path, e))?;
        println!("N={}: sup |lambda_N| = {sup_l:.6e}", c.n());
        let nf = c.n() as f64;
        let points = match gaussian_var {
            // log Z_N(γ_σ, √u) = -(N/2) log(2πσ²) - u/(2σ²)
            Some(var) => {
                let closed = |u: f64| -0.5 * nf * (2.0 * PI * var).ln() - 0.5 * u / var;
                let dev = (0..=200)
                    .map(|i| nf / 2.0 + 1.5 * nf * i as f64 / 200.0)
                    .map(|u| (c.log_z(u) - closed(u)).abs())
                    .fold(0.0, f64::max);
                println!("N={}: max |log Z_N - closed form| on [N/2, 2N] = {dev:.3e}", c.n());
                ok &= dev < CLOSED_FORM_TOL;
                kept.iter().map(|p| (p.u / nf, p.log_z - closed(p.u))).collect()
            }
            None => kept.iter().map(|p| (p.u / nf, p.lambda)).collect(),
        };
        series.push(Series { name: format!("N={}", c.n()), points });
    }
    sup.flush().map_err(|e| io_err(&sup_path, e))?;
    let (title, y) = if gaussian_var.is_some() { ("log Z_N minus closed form", "deviation") } else { ("lambda_N(u)", "lambda_N") };
    write_text(&out.join("zcurve.svg"), &line_plot(title, "u / N", y, Scale::Linear, Scale::Linear, &series))?;
    Ok(ok)
}

struct TransportRow {
    n: usize,
    q: f64,
    bound: String,
    outcome: Result<(f64, f64), String>,
    tol: f64,
}

/// Exact distances of `(Π_1(F_N), Π_1(F̃_N))` and every transport-side bound.
pub fn cmd_transport(cfg: &RunConfig, out: &Path) -> Result<bool, CmdError> {
    cfg.params.validate()?;
    check_ns(cfg)?;
    let opts = cfg.grid.options();
    let (k, q) = (cfg.params.k, cfg.params.q);
    let mut orders = vec![2.0];
    if q != 2.0 {
        orders.push(q);
    }
    let per_n = cfg
        .ns
        .par_iter()
        .map(|&n| -> Result<_, Error> {
            let sphere = cfg.family.sphere(n, &opts)?;
            let ext = extension_marginal1(&sphere)?;
            let p1 = sphere.marginal1()?;
            let w1 = w1_sphere_bound(&sphere, &ext)?;
            let mut rows = vec![TransportRow { n, q: 1.0, bound: "w1_sphere".into(), outcome: Ok((w1.exact, w1.bounds[0].1)), tol: BOUND_TOL }];
            for &qq in &orders {
                let r = hm_lift_bound(p1, &ext.density, qq, k).map(|r| (r.exact, r.bounds[0].1)).map_err(|e| e.to_string());
                rows.push(TransportRow { n, q: qq, bound: "hm_lift".into(), outcome: r, tol: BOUND_TOL });
            }
            let h = hwi_check(p1, &ext.density).map(|c| (c.lhs, c.rhs)).map_err(|e| e.to_string());
            rows.push(TransportRow { n, q: 2.0, bound: "hwi".into(), outcome: h, tol: HWI_TOL });
            if q > 2.0 {
                let d = distorted_hwi_check(&sphere, &ext, q).map(|d| (d.check.lhs, d.check.rhs)).map_err(|e| e.to_string());
                rows.push(TransportRow { n, q, bound: "distorted_hwi".into(), outcome: d, tol: HWI_TOL });
            }
            let tau = (n, w1.diagnostic("m2").unwrap_or(f64::NAN), w1.bounds[0].1, w1.exact, w1.diagnostic("tau_hat").unwrap_or(f64::NAN));
            Ok((rows, tau))
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let family = cfg.family.base()?.map_or_else(|| "uniform".to_string(), |f| f.label().to_string());
    let path = out.join("transport.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["family", "N", "q", "bound", "lhs", "rhs", "slack", "pass"]).map_err(|e| io_err(&path, e))?;
    let mut ok = true;
    for row in per_n.iter().flat_map(|(rows, _)| rows) {
        let (lhs, rhs, slack, pass) = match &row.outcome {
            Ok((l, r)) => {
                let pass = r - l >= -row.tol;
                if !pass {
                    ok = false;
                    eprintln!("N={}: {} (q={}) failed: {l} > {r}", row.n, row.bound, row.q);
                }
                (l.to_string(), r.to_string(), (r - l).to_string(), pass.to_string())
            }
            Err(e) => {
                eprintln!("N={}: {} (q={}) skipped: {e}", row.n, row.bound, row.q);
                ("NaN".into(), "NaN".into(), "NaN".into(), "skipped".into())
            }
        };
        w.write_record([family.clone(), row.n.to_string(), row.q.to_string(), row.bound.clone(), lhs, rhs, slack, pass])
            .map_err(|e| io_err(&path, e))?;
    }
    w.flush().map_err(|e| io_err(&path, e))?;
    let path = out.join("tau.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["N", "m2", "b1", "w1", "tau_hat"]).map_err(|e| io_err(&path, e))?;
    for (_, (n, m2, b1, w1, tau)) in &per_n {
        w.write_record([n.to_string(), m2.to_string(), b1.to_string(), w1.to_string(), tau.to_string()]).map_err(|e| io_err(&path, e))?;
        println!("N={n}: W1 = {w1:.6e} <= B1 = {b1:.6e}, tau_hat = {tau:.3e}");
    }
    w.flush().map_err(|e| io_err(&path, e))?;
    Ok(ok)
}

/// Seeded randomized suites; fails on any violation.
pub fn cmd_proptest(cfg: &RunConfig, out: &Path) -> Result<bool, CmdError> {
    let suites = [holder_suite(cfg.seed, cfg.holder_cases), pointwise_suite(cfg.seed, cfg.pointwise_cases)];
    let path = out.join("proptest.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["suite", "seed", "cases", "violations", "min_slack"]).map_err(|e| io_err(&path, e))?;
    for s in &suites {
        w.write_record([s.name.to_string(), s.seed.to_string(), s.cases.to_string(), s.violations.to_string(), s.min_slack.to_string()])
            .map_err(|e| io_err(&path, e))?;
        println!("{}: {} cases, {} violations, min slack {:e}", s.name, s.cases, s.violations, s.min_slack);
    }
    w.flush().map_err(|e| io_err(&path, e))?;
    Ok(suites.iter().all(|s| s.passed()))
}
