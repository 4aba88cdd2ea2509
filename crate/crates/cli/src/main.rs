//! Command-line front end: run verification suites, integrate trajectories
//! with invariant monitoring, and dump full point reports.
//!
//! Exit codes: 0 success (for `verify`: all checks passed), 1 check
//! failure, 2 usage error, 3 runtime error.

use qbh_core::charts::{ChartId, PhasePoint};
use qbh_core::error::QbhError;
use qbh_core::flow::{integrate, IntegratorConfig, Method};
use qbh_core::verify::{run_suite, Suite, SuiteConfig};
use qbh_core::{kepler_parabolic as parab, kepler_polar as polar};
use serde_json::json;
use std::fs;
use std::io::Write;
use std::process::ExitCode;

const USAGE: &str = "\
qbh - numerical verification of the planar Kepler problem's
      quasi-bi-Hamiltonian structure

USAGE:
  qbh verify [--suite polar|parabolic|flow|calculus|all] [--samples N]
             [--seed N] [--tol-exact X] [--tol-fd X] [--json PATH|-]
  qbh trajectory --chart polar|parabolic --at q1,q2,p1,p2 [--g G] [--h H]
             [--steps N] [--method implicit-midpoint|rk4] [--out PATH|-]
  qbh point-report --chart polar|parabolic --at q1,q2,p1,p2 [--g G]
             [--alpha0 A] [--json PATH|-]

DEFAULTS:
  --suite all   --seed 42   --g 1   --alpha0 1   --h 0.001   --steps 1000
  --method implicit-midpoint   output to stdout (\"-\")

OUTPUT:
  verify        JSON suite report (schema_version 1); exit 0 iff all pass
  trajectory    CSV: t,q1,q2,p1,p2 plus one column per conserved monitor
  point-report  JSON document with every observable, form, kernel basis,
                recursion spectrum and audit residual at the point
";

#[derive(Debug, Clone)]
enum Command {
    Verify {
        suite: Suite,
        samples: Option<usize>,
        seed: u64,
        tol_exact: f64,
        tol_fd: f64,
        out: String,
    },
    Trajectory {
        chart: ChartId,
        at: [f64; 4],
        g: f64,
        h: f64,
        steps: usize,
        method: Method,
        out: String,
    },
    PointReport {
        chart: ChartId,
        at: [f64; 4],
        g: f64,
        alpha0: f64,
        out: String,
    },
}

#[derive(Debug, Clone)]
struct CliConfig {
    command: Command,
}

fn parse_args(argv: &[String]) -> Result<CliConfig, String> {
    let mut it = argv.iter();
    let cmd = it
        .next()
        .ok_or("missing command (verify | trajectory | point-report)")?;

    let mut suite = Suite::All;
    let mut samples: Option<usize> = None;
    let mut seed: u64 = 42;
    let mut tol_exact = 1e-10;
    let mut tol_fd = 1e-6;
    let mut chart: Option<ChartId> = None;
    let mut at: Option<[f64; 4]> = None;
    let mut g = 1.0f64;
    let mut alpha0 = 1.0f64;
    let mut h = 1e-3f64;
    let mut steps = 1000usize;
    let mut method = Method::ImplicitMidpoint;
    let mut out = "-".to_string();

    fn next_value(flag: &str, it: &mut std::slice::Iter<String>) -> Result<String, String> {
        it.next()
            .map(|s| s.to_string())
            .ok_or_else(|| format!("flag {flag} requires a value"))
    }

    while let Some(flag) = it.next() {
        match flag.as_str() {
            "--suite" => {
                let v = next_value("--suite", &mut it)?;
                suite = v.parse().map_err(|e| format!("--suite: {e}"))?;
            }
            "--samples" => {
                let v = next_value("--samples", &mut it)?;
                let n: usize = v
                    .parse()
                    .map_err(|_| format!("--samples: '{v}' is not a count"))?;
                if n == 0 {
                    return Err("--samples: must be at least 1".into());
                }
                samples = Some(n);
            }
            "--seed" => {
                let v = next_value("--seed", &mut it)?;
                seed = v
                    .parse()
                    .map_err(|_| format!("--seed: '{v}' is not a u64"))?;
            }
            "--tol-exact" => {
                let v = next_value("--tol-exact", &mut it)?;
                tol_exact = parse_positive("--tol-exact", &v)?;
            }
            "--tol-fd" => {
                let v = next_value("--tol-fd", &mut it)?;
                tol_fd = parse_positive("--tol-fd", &v)?;
            }
            "--chart" => {
                let v = next_value("--chart", &mut it)?;
                let c: ChartId = v.parse().map_err(|e| format!("--chart: {e}"))?;
                if c == ChartId::Cartesian {
                    return Err("--chart: use polar or parabolic".into());
                }
                chart = Some(c);
            }
            "--at" => {
                let v = next_value("--at", &mut it)?;
                let parts: Vec<&str> = v.split(',').collect();
                if parts.len() != 4 {
                    return Err(format!("--at: expected q1,q2,p1,p2, got '{v}'"));
                }
                let mut coords = [0.0f64; 4];
                for (k, p) in parts.iter().enumerate() {
                    coords[k] = p
                        .trim()
                        .parse()
                        .map_err(|_| format!("--at: '{p}' is not a number"))?;
                }
                at = Some(coords);
            }
            "--g" => {
                let v = next_value("--g", &mut it)?;
                g = parse_positive("--g", &v)?;
            }
            "--alpha0" => {
                let v = next_value("--alpha0", &mut it)?;
                alpha0 = parse_positive("--alpha0", &v)?;
            }
            "--h" => {
                let v = next_value("--h", &mut it)?;
                h = v
                    .parse()
                    .map_err(|_| format!("--h: '{v}' is not a number"))?;
                if !h.is_finite() || h <= 0.0 {
                    return Err("--h: must be positive and finite".into());
                }
            }
            "--steps" => {
                let v = next_value("--steps", &mut it)?;
                steps = v
                    .parse()
                    .map_err(|_| format!("--steps: '{v}' is not a count"))?;
            }
            "--method" => {
                let v = next_value("--method", &mut it)?;
                method = v.parse().map_err(|e| format!("--method: {e}"))?;
            }
            "--json" | "--out" => {
                out = next_value(flag, &mut it)?;
            }
            "--help" | "-h" => return Err(String::new()),
            other => return Err(format!("unknown flag {other}")),
        }
    }

    let command = match cmd.as_str() {
        "verify" => Command::Verify {
            suite,
            samples,
            seed,
            tol_exact,
            tol_fd,
            out,
        },
        "trajectory" => Command::Trajectory {
            chart: chart.ok_or("trajectory requires --chart")?,
            at: at.ok_or("trajectory requires --at q1,q2,p1,p2")?,
            g,
            h,
            steps,
            method,
            out,
        },
        "point-report" => Command::PointReport {
            chart: chart.ok_or("point-report requires --chart")?,
            at: at.ok_or("point-report requires --at q1,q2,p1,p2")?,
            g,
            alpha0,
            out,
        },
        other => return Err(format!("unknown command '{other}'")),
    };
    Ok(CliConfig { command })
}

fn parse_positive(flag: &str, v: &str) -> Result<f64, String> {
    let x: f64 = v
        .parse()
        .map_err(|_| format!("{flag}: '{v}' is not a number"))?;
    if !x.is_finite() || x <= 0.0 {
        return Err(format!("{flag}: must be positive and finite"));
    }
    Ok(x)
}

fn write_output(target: &str, contents: &str) -> Result<(), String> {
    if target == "-" {
        let mut stdout = std::io::stdout().lock();
        stdout
            .write_all(contents.as_bytes())
            .map_err(|e| format!("writing to stdout: {e}"))?;
        Ok(())
    } else {
        fs::write(target, contents).map_err(|e| format!("writing {target}: {e}"))
    }
}

fn execute(cfg: CliConfig) -> u8 {
    match cfg.command {
        Command::Verify {
            suite,
            samples,
            seed,
            tol_exact,
            tol_fd,
            out,
        } => {
            let scfg = SuiteConfig {
                samples_override: samples,
                tol_exact,
                tol_fd,
                ..Default::default()
            };
            let report = run_suite(suite, seed, &scfg);
            for c in &report.checks {
                eprintln!(
                    "{} {} (residual {:e}, tolerance {:e})",
                    if c.pass { "ok  " } else { "FAIL" },
                    c.id,
                    c.max_abs_residual,
                    c.tolerance
                );
            }
            eprintln!(
                "{}: {} checks, {} passed, {} failed ({:.3} s)",
                report.suite,
                report.summary.total,
                report.summary.passed,
                report.summary.failed,
                report.wall_time_s
            );
            let json = match serde_json::to_string_pretty(&report) {
                Ok(j) => j,
                Err(e) => {
                    eprintln!("error: serializing report: {e}");
                    return 3;
                }
            };
            if let Err(e) = write_output(&out, &(json + "\n")) {
                eprintln!("error: {e}");
                return 3;
            }
            if report.all_pass() {
                0
            } else {
                1
            }
        }
        Command::Trajectory {
            chart,
            at,
            g,
            h,
            steps,
            method,
            out,
        } => match run_trajectory(chart, at, g, h, steps, method) {
            Ok(csv) => {
                if let Err(e) = write_output(&out, &csv) {
                    eprintln!("error: {e}");
                    return 3;
                }
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                3
            }
        },
        Command::PointReport {
            chart,
            at,
            g,
            alpha0,
            out,
        } => match point_report(chart, at, g, alpha0) {
            Ok(doc) => {
                let json = serde_json::to_string_pretty(&doc).expect("valid json value");
                if let Err(e) = write_output(&out, &(json + "\n")) {
                    eprintln!("error: {e}");
                    return 3;
                }
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                3
            }
        },
    }
}

fn run_trajectory(
    chart: ChartId,
    at: [f64; 4],
    g: f64,
    h: f64,
    steps: usize,
    method: Method,
) -> Result<String, QbhError> {
    let g = qbh_core::charts::CouplingConstants::new(g, 1.0)?.g();
    let pt0 = PhasePoint::new(chart, at)?;
    let (hamiltonian, monitors) = match chart {
        ChartId::Polar => (
            polar::hamiltonian(g),
            vec![
                polar::hamiltonian(g),
                polar::angular_momentum(),
                polar::j3(g),
                polar::j4(g),
            ],
        ),
        ChartId::Parabolic => (
            parab::hamiltonian(g),
            vec![
                parab::hamiltonian(g),
                parab::j_field(),
                parab::k3(g).with_name("K3"),
                parab::k4(g).with_name("K4"),
                parab::r_x(g),
            ],
        ),
        ChartId::Cartesian => {
            return Err(QbhError::Domain(
                "trajectory charts are polar or parabolic".into(),
            ))
        }
    };
    let icfg = IntegratorConfig {
        method,
        step: h,
        steps,
        ..Default::default()
    };
    let traj = integrate(&hamiltonian, &pt0, &icfg, &monitors)?;

    let mut csv = String::from("t,q1,q2,p1,p2");
    for m in &traj.monitors {
        csv.push(',');
        csv.push_str(&m.name);
    }
    csv.push('\n');
    for (n, (t, state)) in traj.times.iter().zip(&traj.states).enumerate() {
        let c = state.coords();
        csv.push_str(&format!("{t},{},{},{},{}", c[0], c[1], c[2], c[3]));
        for m in &traj.monitors {
            csv.push_str(&format!(",{}", m.values[n]));
        }
        csv.push('\n');
    }
    Ok(csv)
}

fn complex_json(z: qbh_core::complex::Complex) -> serde_json::Value {
    json!({ "re": z.re, "im": z.im })
}

fn cvec_json(v: &qbh_core::calculus::CVec4) -> serde_json::Value {
    json!(v.iter().map(|z| complex_json(*z)).collect::<Vec<_>>())
}

fn cmat_json(m: &[[qbh_core::complex::Complex; 4]; 4]) -> serde_json::Value {
    json!(m
        .iter()
        .map(|row| row.iter().map(|z| complex_json(*z)).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn spectrum_json(s: &polar::SpectrumSummary) -> serde_json::Value {
    json!({
        "e1": complex_json(s.e[0]),
        "e2": complex_json(s.e[1]),
        "e3": complex_json(s.e[2]),
        "e4": complex_json(s.e[3]),
        "det": complex_json(s.det),
        "eigenvalues": s.eigenvalues.iter().map(|z| complex_json(*z)).collect::<Vec<_>>(),
    })
}

fn point_report(
    chart: ChartId,
    at: [f64; 4],
    g: f64,
    alpha0: f64,
) -> Result<serde_json::Value, QbhError> {
    let coupling = qbh_core::charts::CouplingConstants::new(g, alpha0)?;
    let (g, alpha0) = (coupling.g(), coupling.alpha0());
    let pt = PhasePoint::new(chart, at)?;
    match chart {
        ChartId::Polar => {
            let o = polar::observables(&pt, g)?;
            let f = polar::forms(&pt, g)?;
            let yf = polar::y_fields(&pt, g)?;
            let rec = polar::recursions(&pt, g)?;
            let osc = polar::oscillator_observables(&pt, alpha0)?;
            let kernel = match polar::kernel(&pt, g) {
                Ok((z1, z2)) => {
                    let m = f.omega.matrix();
                    let basis = qbh_core::linalg::kernel_basis(&m, 1e-9);
                    json!({
                        "Z1": cvec_json(&z1),
                        "Z2": cvec_json(&z2),
                        "numerical_basis": basis.iter().map(cvec_json).collect::<Vec<_>>(),
                        "dimension": basis.len(),
                    })
                }
                Err(e) => json!({ "error": e.to_string() }),
            };
            Ok(json!({
                "chart": "polar",
                "g": g,
                "alpha0": alpha0,
                "point": { "q1": pt.q1, "q2": pt.q2, "p1": pt.p1, "p2": pt.p2 },
                "observables": {
                    "H": o.h,
                    "lambda": o.lambda,
                    "M_r": complex_json(o.m_r),
                    "N_phi": complex_json(o.n_phi),
                    "J2": o.j2,
                    "J34": complex_json(o.j34),
                    "J3": o.j3,
                    "J4": o.j4,
                    "mod_M2": o.mod_m2,
                },
                "gamma": polar::gamma_at(&pt, g)?,
                "fields": {
                    "Y_r": cvec_json(&yf.y_r),
                    "Y_phi": cvec_json(&yf.y_phi),
                    "Y": cvec_json(&yf.y),
                    "Y_prime": cvec_json(&yf.y_prime),
                    "Y34": cvec_json(&yf.y34),
                    "audit_residual": yf.audit_residual,
                },
                "forms": {
                    "omega1_coeffs": f.omega1.coeffs.iter().map(|z| z.re).collect::<Vec<_>>(),
                    "omega2_coeffs": f.omega2.coeffs.iter().map(|z| z.re).collect::<Vec<_>>(),
                    "omega_matrix": cmat_json(&f.omega.matrix()),
                    "audit_residual": f.audit_residual,
                },
                "kernel": kernel,
                "recursions": {
                    "R1": { "matrix": cmat_json(&rec.r1.m), "spectrum": spectrum_json(&rec.spectrum1) },
                    "R2": { "matrix": cmat_json(&rec.r2.m), "spectrum": spectrum_json(&rec.spectrum2) },
                    "audit_residual": rec.audit_residual,
                },
                "oscillator": {
                    "H": osc.h,
                    "M": complex_json(osc.m),
                    "F": complex_json(osc.fradkin),
                },
            }))
        }
        ChartId::Parabolic => {
            let o = parab::observables(&pt, g)?;
            let f = parab::forms(&pt, g)?;
            let zf = parab::z_fields(&pt, g)?;
            let kernel = {
                let m = f.omega_ab.matrix();
                let basis = qbh_core::linalg::kernel_basis(&m, 1e-9);
                json!({
                    "numerical_basis": basis.iter().map(cvec_json).collect::<Vec<_>>(),
                    "dimension": basis.len(),
                })
            };
            let recursions = match parab::recursions(&pt, g) {
                Ok(rec) => json!({
                    "R_ab1": { "matrix": cmat_json(&rec.r_ab1.m), "spectrum": spectrum_json(&rec.spectrum1) },
                    "R_ab2": { "matrix": cmat_json(&rec.r_ab2.m), "spectrum": spectrum_json(&rec.spectrum2) },
                }),
                Err(e) => json!({ "error": e.to_string() }),
            };
            Ok(json!({
                "chart": "parabolic",
                "g": g,
                "point": { "q1": pt.q1, "q2": pt.q2, "p1": pt.p1, "p2": pt.p2 },
                "observables": {
                    "H": o.h,
                    "lambda": o.lambda,
                    "J": o.j,
                    "P_x": o.px,
                    "P_y": o.py,
                    "R_x": o.rx,
                    "M_a": complex_json(o.m_a),
                    "M_b": complex_json(o.m_b),
                    "K34": complex_json(o.k34),
                    "K3": o.k3,
                    "K4": o.k4,
                    "K3_lrl": o.k3_lrl,
                    "mod_A2": o.mod_a2,
                    "mod_B2": o.mod_b2,
                },
                "gamma": parab::gamma_at(&pt, g)?,
                "fields": {
                    "Z_a": cvec_json(&zf.z_a),
                    "Z_b": cvec_json(&zf.z_b),
                    "Z": cvec_json(&zf.z),
                    "Z_prime": cvec_json(&zf.z_prime),
                    "Z34": cvec_json(&zf.z34),
                    "audit_residual": zf.audit_residual,
                },
                "forms": {
                    "omega_ab_matrix": cmat_json(&f.omega_ab.matrix()),
                    "omega_ab1_coeffs": f.omega_ab1.coeffs.iter().map(|z| z.re).collect::<Vec<_>>(),
                    "omega_ab2_coeffs": f.omega_ab2.coeffs.iter().map(|z| z.re).collect::<Vec<_>>(),
                    "tabulated_omega_ab1_coeffs": f.tabulated_omega_ab1.coeffs.iter().map(|z| z.re).collect::<Vec<_>>(),
                    "tabulated_omega_ab2_coeffs": f.tabulated_omega_ab2.coeffs.iter().map(|z| z.re).collect::<Vec<_>>(),
                    "audit": f.audits.iter().map(|a| json!({
                        "slot": a.slot,
                        "tabulated": a.tabulated,
                        "ground_truth": a.truth,
                        "residual": a.residual,
                    })).collect::<Vec<_>>(),
                },
                "kernel": kernel,
                "recursions": recursions,
            }))
        }
        ChartId::Cartesian => Err(QbhError::Domain(
            "point-report charts are polar or parabolic".into(),
        )),
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match parse_args(&argv) {
        Ok(cfg) => ExitCode::from(execute(cfg)),
        Err(msg) if msg.is_empty() => {
            println!("{USAGE}");
            ExitCode::SUCCESS
        }
        Err(msg) => {
            eprintln!("usage error: {msg}\n\n{USAGE}");
            ExitCode::from(2)
        }
    }
}
