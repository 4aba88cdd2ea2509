//! The check registry: every verified identity of the library, bound to a
//! residual function, a sample domain or trajectory, and a tolerance.
//!
//! Ids are hierarchical (`<suite>.<group>.<name>`); [`build`] returns the
//! checks in a fixed order, and [`proposition_coverage`] exports which
//! checks stand behind each structural claim.

use super::{
    AuditSlot, CheckBody, CheckKind, CheckSpec, CustomOutcome, SampleDomain, Suite, SuiteConfig,
};
use crate::calculus::{
    c4_add, c4_from_real, c4_norm, c4_scale, c4_sub, exterior_derivative, fd_grad, fd_step,
    lie_bracket, lie_derivative_2form, nijenhuis_torsion, poisson_bracket, recursion_from_value,
    validate_gradient, CVec4, ScalarField, TensorField, TwoFormField, TwoFormValue,
    VectorFieldOnChart,
};
use crate::charts::{self, ChartId, PhasePoint};
use crate::complex::{Complex, I};
use crate::error::Result;
use crate::flow::{implicit_midpoint_step, integrate, propagate_raw, rk4_step, IntegratorConfig};
use crate::kepler_parabolic as parab;
use crate::kepler_polar as polar;
use crate::linalg::{kernel_basis, kernel_project, MixedTensor};
use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

/// Required lower bound for the Nijenhuis-torsion witness.
pub const NIJENHUIS_BOUND: f64 = 1e-3;

/// Tolerance for closed-form record identities (modulus relations etc.).
const TOL_IDENTITY: f64 = 1e-12;
/// Tolerance for tabulated-expression audits against ground truth.
const TOL_AUDIT: f64 = 1e-8;
/// Scaled determinant tolerance for the singular recursion operators.
const TOL_DET: f64 = 1e-9;
/// Tolerance for the spectrum-pattern diagnostics.
const TOL_SPECTRUM: f64 = 1e-8;
/// Tolerance for identities that hold bit-exactly by construction.
const TOL_EXACT_ZERO: f64 = 1e-15;
/// Slack for witness shortfalls.
const TOL_WITNESS: f64 = 1e-9;

#[allow(clippy::too_many_arguments)]
fn pointwise(
    id: &'static str,
    paper_ref: &'static str,
    suite: Suite,
    domain: SampleDomain,
    samples: usize,
    tolerance: f64,
    integrating_factor: Option<&'static str>,
    f: impl Fn(&PhasePoint) -> f64 + Send + Sync + 'static,
) -> CheckSpec {
    CheckSpec {
        id,
        paper_ref,
        kind: CheckKind::Pointwise,
        suite,
        domain: Some(domain),
        samples,
        tolerance,
        integrating_factor,
        body: CheckBody::Pointwise(Arc::new(f)),
    }
}

fn custom(
    id: &'static str,
    paper_ref: &'static str,
    kind: CheckKind,
    suite: Suite,
    tolerance: f64,
    f: impl Fn(u64) -> Result<CustomOutcome> + Send + Sync + 'static,
) -> CheckSpec {
    CheckSpec {
        id,
        paper_ref,
        kind,
        suite,
        domain: None,
        samples: 1,
        tolerance,
        integrating_factor: None,
        body: CheckBody::Custom(Arc::new(f)),
    }
}

fn audit(
    id: &'static str,
    paper_ref: &'static str,
    suite: Suite,
    domain: SampleDomain,
    samples: usize,
    adjudicated: bool,
    slots: Vec<AuditSlot>,
) -> CheckSpec {
    CheckSpec {
        id,
        paper_ref,
        kind: CheckKind::Audit,
        suite,
        domain: Some(domain),
        samples,
        tolerance: TOL_AUDIT,
        integrating_factor: None,
        body: CheckBody::Audit { slots, adjudicated },
    }
}

fn slot(
    name: &'static str,
    f: impl Fn(&PhasePoint) -> (f64, f64, f64) + Send + Sync + 'static,
) -> AuditSlot {
    AuditSlot {
        name,
        eval: Arc::new(f),
    }
}

fn dot_real(v: &CVec4, g: &[f64; 4]) -> Complex {
    let mut acc = Complex::real(0.0);
    for k in 0..4 {
        acc += v[k].scale(g[k]);
    }
    acc
}

fn canonical_matrix() -> [[f64; 4]; 4] {
    [
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
    ]
}

pub fn build(cfg: &SuiteConfig) -> Vec<CheckSpec> {
    let mut checks = Vec::with_capacity(64);
    charts_checks(cfg, &mut checks);
    calculus_checks(cfg, &mut checks);
    polar_checks(cfg, &mut checks);
    parabolic_checks(cfg, &mut checks);
    flow_checks(cfg, &mut checks);
    checks
}

// ---------------------------------------------------------------------------
// charts
// ---------------------------------------------------------------------------

fn charts_checks(cfg: &SuiteConfig, out: &mut Vec<CheckSpec>) {
    let g = cfg.g;

    for (id, domain, chart) in [
        (
            "charts.roundtrip.polar",
            SampleDomain::polar(),
            ChartId::Polar,
        ),
        (
            "charts.roundtrip.parabolic",
            SampleDomain::parabolic(),
            ChartId::Parabolic,
        ),
    ] {
        out.push(pointwise(
            id,
            "transport to Cartesian and back is the identity on the chart image",
            Suite::Calculus,
            domain,
            1000,
            TOL_IDENTITY,
            None,
            move |pt| {
                let x = charts::to_cartesian(pt).expect("guarded sample");
                let y = charts::to_cartesian(
                    &charts::from_cartesian(&x, chart).expect("guarded sample"),
                )
                .expect("guarded sample");
                x.coords()
                    .iter()
                    .zip(y.coords())
                    .map(|(a, b)| (a - b).abs() / (1.0 + a.abs()))
                    .fold(0.0, f64::max)
            },
        ));
    }

    for (id, domain) in [
        ("charts.lift.symplectic.polar", SampleDomain::polar()),
        (
            "charts.lift.symplectic.parabolic",
            SampleDomain::parabolic(),
        ),
    ] {
        let chart = domain.chart;
        out.push(pointwise(
            id,
            "the cotangent lift is a canonical transformation: J^T omega0 J = omega0",
            Suite::Calculus,
            domain,
            100,
            1e-8,
            None,
            move |pt| {
                // finite-difference Jacobian of the full phase-space transport
                let map = |c: [f64; 4]| -> [f64; 4] {
                    charts::to_cartesian(&PhasePoint::raw(chart, c))
                        .expect("guarded sample")
                        .coords()
                };
                let x0 = pt.coords();
                let mut jac = [[0.0f64; 4]; 4];
                for k in 0..4 {
                    let h = fd_step(x0[k]);
                    let mut xp = x0;
                    let mut xm = x0;
                    xp[k] += h;
                    xm[k] -= h;
                    let (fp, fm) = (map(xp), map(xm));
                    for i in 0..4 {
                        jac[i][k] = (fp[i] - fm[i]) / (xp[k] - xm[k]);
                    }
                }
                let w = canonical_matrix();
                let mut worst = 0.0f64;
                for i in 0..4 {
                    for j in 0..4 {
                        let mut s = 0.0;
                        for a in 0..4 {
                            for b in 0..4 {
                                s += jac[a][i] * w[a][b] * jac[b][j];
                            }
                        }
                        worst = worst.max((s - w[i][j]).abs());
                    }
                }
                worst
            },
        ));
    }

    out.push(pointwise(
        "charts.hamiltonian.consistency",
        "Hamiltonian values agree across charts once the coupling is mapped",
        Suite::Calculus,
        SampleDomain::polar(),
        1000,
        TOL_IDENTITY,
        None,
        move |pt| {
            let hp = polar::hamiltonian(g).eval(pt);
            let q = charts::transport(pt, ChartId::Parabolic).expect("guarded sample");
            let gq = charts::map_coupling(g, ChartId::Polar, ChartId::Parabolic);
            let hq = parab::hamiltonian(gq).eval(&q);
            (hp - hq).abs() / (1.0 + hp.abs())
        },
    ));

    out.push(pointwise(
        "charts.crosschart.consistency",
        "transported points satisfy H-agreement and J = 2 p_phi",
        Suite::Calculus,
        SampleDomain::polar(),
        100,
        TOL_IDENTITY,
        None,
        move |pt| {
            let q = charts::transport(pt, ChartId::Parabolic).expect("guarded sample");
            let gq = charts::map_coupling(g, ChartId::Polar, ChartId::Parabolic);
            let dh = (polar::hamiltonian(g).eval(pt) - parab::hamiltonian(gq).eval(&q)).abs()
                / (1.0 + polar::hamiltonian(g).eval(pt).abs());
            let j = q.q1 * q.p2 - q.q2 * q.p1;
            let dj = (j - 2.0 * pt.p2).abs() / (1.0 + 2.0 * pt.p2.abs());
            dh.max(dj)
        },
    ));
}

// ---------------------------------------------------------------------------
// calculus
// ---------------------------------------------------------------------------

fn calculus_checks(cfg: &SuiteConfig, out: &mut Vec<CheckSpec>) {
    let g = cfg.g;
    let alpha0 = cfg.alpha0;

    out.push(pointwise(
        "calculus.bracket.antisymmetry",
        "{f, g} + {g, f} = 0 bit-exactly",
        Suite::Calculus,
        SampleDomain::polar(),
        1000,
        TOL_EXACT_ZERO,
        None,
        move |pt| {
            let f = polar::hamiltonian(g);
            let h = polar::j3(g);
            let a = poisson_bracket(&f, &h, pt).expect("shared chart");
            let b = poisson_bracket(&h, &f, pt).expect("shared chart");
            (a + b).abs()
        },
    ));

    out.push(pointwise(
        "calculus.bracket.jacobi",
        "Jacobi identity for (H, J3, p_phi), outer brackets by finite differences",
        Suite::Calculus,
        SampleDomain::polar(),
        100,
        cfg.tol_fd,
        None,
        move |pt| {
            let h = polar::hamiltonian(g);
            let j3 = polar::j3(g);
            let pphi = polar::angular_momentum();
            let inner = |a: &ScalarField, b: &ScalarField| {
                let (a, b) = (a.clone(), b.clone());
                move |q: &PhasePoint| poisson_bracket(&a, &b, q).expect("shared chart")
            };
            // {a, inner} with the inner bracket differentiated numerically
            let outer = |a: &ScalarField, innerf: &dyn Fn(&PhasePoint) -> f64| {
                let ga = a.grad(pt);
                let gb = fd_grad(innerf, pt);
                (ga[0] * gb[2] - ga[2] * gb[0]) + (ga[1] * gb[3] - ga[3] * gb[1])
            };
            let t1 = outer(&h, &inner(&j3, &pphi));
            let t2 = outer(&j3, &inner(&pphi, &h));
            let t3 = outer(&pphi, &inner(&h, &j3));
            (t1 + t2 + t3).abs()
        },
    ));

    out.push(pointwise(
        "calculus.bracket.leibniz",
        "{fg, h} = f{g, h} + g{f, h} for polynomial fields",
        Suite::Calculus,
        SampleDomain::polar(),
        1000,
        1e-10,
        None,
        move |pt| {
            let q1 = ScalarField::coordinate(ChartId::Polar, 0);
            let p1 = ScalarField::coordinate(ChartId::Polar, 2);
            let p2 = ScalarField::coordinate(ChartId::Polar, 3);
            let f = q1.mul(&p1).expect("shared chart");
            let gfield = p2.mul(&p2).expect("shared chart");
            let h = ScalarField::new(
                "r^2+p_r*p_phi",
                ChartId::Polar,
                |q| q.q1 * q.q1 + q.p1 * q.p2,
                |q| [2.0 * q.q1, 0.0, q.p2, q.p1],
            );
            let fg = f.mul(&gfield).expect("shared chart");
            let lhs = poisson_bracket(&fg, &h, pt).expect("shared chart");
            let rhs = f.eval(pt) * poisson_bracket(&gfield, &h, pt).expect("shared chart")
                + gfield.eval(pt) * poisson_bracket(&f, &h, pt).expect("shared chart");
            (lhs - rhs).abs()
        },
    ));

    out.push(pointwise(
        "calculus.hamiltonian.identity",
        "i(X_f) omega0 = df bit-exactly for every registered field",
        Suite::Calculus,
        SampleDomain::polar(),
        100,
        TOL_EXACT_ZERO,
        None,
        move |pt| {
            let w0 = TwoFormValue::canonical();
            let mut worst = 0.0f64;
            for f in polar::registered_fields(g, alpha0) {
                let x = crate::calculus::hamiltonian_vf(&f);
                let iv = w0.interior(&x.eval(pt));
                let df = f.grad(pt);
                for k in 0..4 {
                    worst = worst.max((iv[k].re - df[k]).abs()).max(iv[k].im.abs());
                }
            }
            worst
        },
    ));

    out.push(pointwise(
        "calculus.form.antisymmetry",
        "evaluated 2-form matrices satisfy A + A^T = 0 bit-exactly",
        Suite::Calculus,
        SampleDomain::parabolic(),
        100,
        TOL_EXACT_ZERO,
        None,
        move |pt| {
            let m = parab::omega_ab_truth(g).value(pt).matrix();
            let mut worst = 0.0f64;
            for i in 0..4 {
                for j in 0..4 {
                    worst = worst.max((m[i][j] + m[j][i]).abs());
                }
            }
            worst
        },
    ));

    out.push(pointwise(
        "calculus.wedge.symmetry",
        "wedge22(W1, W2) = wedge22(W2, W1) bit-exactly",
        Suite::Calculus,
        SampleDomain::polar(),
        1000,
        TOL_EXACT_ZERO,
        None,
        move |pt| {
            let w1 = polar::omega1_field().value(pt);
            let w2 = polar::omega2_field().value(pt);
            (w1.wedge22(&w2) - w2.wedge22(&w1)).abs()
        },
    ));

    out.push(pointwise(
        "calculus.recursion.identity",
        "recursion_from_forms(omega0) is the identity bit-exactly",
        Suite::Calculus,
        SampleDomain::polar(),
        100,
        TOL_EXACT_ZERO,
        None,
        move |pt| {
            let r = recursion_from_value(&TwoFormValue::canonical(), pt);
            let mut worst = 0.0f64;
            for i in 0..4 {
                for j in 0..4 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((r.m[i][j] - Complex::real(want)).abs());
                }
            }
            worst
        },
    ));

    out.push(pointwise(
        "calculus.extder.closed",
        "d omega0 = 0 and d Omega1 = 0 (Omega1 is a sum of wedges of exact forms)",
        Suite::Calculus,
        SampleDomain::polar(),
        100,
        cfg.tol_fd,
        None,
        move |pt| {
            let d0 = exterior_derivative(&TwoFormField::canonical(ChartId::Polar), pt)
                .expect("guarded sample");
            let d1 = exterior_derivative(&polar::omega1_field(), pt).expect("guarded sample");
            d0.iter()
                .chain(d1.iter())
                .map(|z| z.abs())
                .fold(0.0, f64::max)
        },
    ));

    out.push(pointwise(
        "calculus.gradients.polar",
        "analytic gradients match central finite differences (polar fields)",
        Suite::Calculus,
        SampleDomain::polar(),
        100,
        cfg.tol_fd,
        None,
        move |pt| {
            polar::registered_fields(g, alpha0)
                .iter()
                .map(|f| validate_gradient(f, pt).expect("guarded sample"))
                .fold(0.0, f64::max)
        },
    ));

    out.push(pointwise(
        "calculus.gradients.parabolic",
        "analytic gradients match central finite differences (parabolic fields)",
        Suite::Calculus,
        SampleDomain::parabolic(),
        100,
        cfg.tol_fd,
        None,
        move |pt| {
            parab::registered_fields(g)
                .iter()
                .map(|f| validate_gradient(f, pt).expect("guarded sample"))
                .fold(0.0, f64::max)
        },
    ));

    out.push(pointwise(
        "calculus.lieder.gamma",
        "the flow preserves the symplectic form: L_Gamma omega0 = 0",
        Suite::Calculus,
        SampleDomain::polar(),
        100,
        cfg.tol_fd,
        None,
        move |pt| {
            let l = lie_derivative_2form(
                &polar::gamma_field(g),
                &TwoFormField::canonical(ChartId::Polar),
                pt,
            )
            .expect("guarded sample");
            l.norm()
        },
    ));

    out.push(pointwise(
        "calculus.nijenhuis.identity",
        "the Nijenhuis torsion of the identity tensor vanishes",
        Suite::Calculus,
        SampleDomain::polar(),
        100,
        cfg.tol_fd,
        None,
        move |pt| {
            let id = TensorField::identity(ChartId::Polar);
            let x = VectorFieldOnChart::from_real("x", ChartId::Polar, |q| {
                [q.p2, q.q1 * q.q2, q.p1 * q.p1, q.q1]
            });
            let y = VectorFieldOnChart::from_real("y", ChartId::Polar, |q| {
                [q.q2 * q.p1, q.p2, q.q1, q.q2 * q.q2]
            });
            c4_norm(&nijenhuis_torsion(&id, &x, &y, pt).expect("guarded sample"))
        },
    ));
}

// ---------------------------------------------------------------------------
// polar
// ---------------------------------------------------------------------------

fn polar_checks(cfg: &SuiteConfig, out: &mut Vec<CheckSpec>) {
    let g = cfg.g;
    let alpha0 = cfg.alpha0;

    for (id, obs, claim) in [
        ("polar.bracket.Mr", polar::m_r(g), "{M_r, H} = i lambda M_r"),
        (
            "polar.bracket.Nphi",
            polar::n_phi(),
            "{N_phi, H} = i lambda N_phi",
        ),
    ] {
        let h = polar::hamiltonian(g);
        let lam = polar::lambda();
        out.push(pointwise(
            id,
            claim,
            Suite::Polar,
            SampleDomain::polar(),
            1000,
            cfg.tol_exact,
            Some("lambda"),
            move |pt| {
                let b = crate::calculus::poisson_bracket_mixed(&obs, &h, pt).expect("shared chart");
                let v = obs.eval(pt);
                (b - I.scale(lam.eval(pt)) * v).abs() / (1.0 + v.abs())
            },
        ));
    }

    for (id, field, claim) in [
        ("polar.integral.J3", polar::j3(g), "{J3, H} = 0"),
        ("polar.integral.J4", polar::j4(g), "{J4, H} = 0"),
        (
            "polar.integral.pphi",
            polar::angular_momentum(),
            "{p_phi, H} = 0",
        ),
    ] {
        let h = polar::hamiltonian(g);
        out.push(pointwise(
            id,
            claim,
            Suite::Polar,
            SampleDomain::polar(),
            1000,
            cfg.tol_exact,
            None,
            move |pt| poisson_bracket(&field, &h, pt).expect("shared chart").abs(),
        ));
    }

    out.push(pointwise(
        "polar.identity.Nphi_modulus",
        "|N_phi| = 1",
        Suite::Polar,
        SampleDomain::polar(),
        1000,
        TOL_IDENTITY,
        None,
        move |pt| (polar::n_phi().eval(pt).abs() - 1.0).abs(),
    ));

    out.push(pointwise(
        "polar.identity.modulus",
        "|M_r|^2 = 2 p_phi^2 H + g^2",
        Suite::Polar,
        SampleDomain::polar(),
        1000,
        TOL_IDENTITY,
        None,
        move |pt| {
            let o = polar::observables(pt, g).expect("guarded sample");
            (o.mod_m2 - (2.0 * o.j2 * o.j2 * o.h + g * g)).abs()
        },
    ));

    out.push(pointwise(
        "polar.identity.J34_product",
        "the closed-form J3, J4 equal Re and Im of M_r conj(N_phi)",
        Suite::Polar,
        SampleDomain::polar(),
        1000,
        TOL_IDENTITY,
        None,
        move |pt| {
            let o = polar::observables(pt, g).expect("guarded sample");
            let closed = Complex::new(polar::j3(g).eval(pt), polar::j4(g).eval(pt));
            (closed - o.j34).abs()
        },
    ));

    out.push(pointwise(
        "polar.gamma.tabulated",
        "the tabulated flow components equal X_H",
        Suite::Polar,
        SampleDomain::polar(),
        1000,
        TOL_IDENTITY,
        None,
        move |pt| {
            let tabulated = polar::gamma_at(pt, g).expect("guarded sample");
            let xh = polar::gamma_field(g).eval(pt);
            (0..4)
                .map(|k| (xh[k].re - tabulated[k]).abs())
                .fold(0.0, f64::max)
        },
    ));

    out.push(pointwise(
        "polar.prop3.complex",
        "i(Gamma) Omega = i lambda d(M_r conj N_phi) (proposition 3)",
        Suite::Polar,
        SampleDomain::polar(),
        1000,
        cfg.tol_exact,
        Some("lambda"),
        move |pt| {
            let w = polar::omega_field().value(pt);
            let iv = w.interior(&polar::gamma_field(g).eval(pt));
            let lam = polar::lambda().eval(pt);
            let expect = c4_scale(I.scale(lam), &polar::j34(g).grad(pt));
            c4_norm(&c4_sub(&iv, &expect))
        },
    ));

    out.push(pointwise(
        "polar.prop3.real1",
        "i(Gamma) Omega1 = -lambda dJ4 with J4 = Im(J34)",
        Suite::Polar,
        SampleDomain::polar(),
        1000,
        cfg.tol_exact,
        Some("lambda"),
        move |pt| {
            let w = polar::omega1_field().value(pt);
            let iv = w.interior(&polar::gamma_field(g).eval(pt));
            let lam = polar::lambda().eval(pt);
            let dj4 = c4_from_real(polar::j4(g).grad(pt));
            c4_norm(&c4_add(&iv, &c4_scale(Complex::real(lam), &dj4)))
        },
    ));

    out.push(pointwise(
        "polar.prop3.real2",
        "i(Gamma) Omega2 = +lambda dJ3 with J3 = Re(J34)",
        Suite::Polar,
        SampleDomain::polar(),
        1000,
        cfg.tol_exact,
        Some("lambda"),
        move |pt| {
            let w = polar::omega2_field().value(pt);
            let iv = w.interior(&polar::gamma_field(g).eval(pt));
            let lam = polar::lambda().eval(pt);
            let dj3 = c4_from_real(polar::j3(g).grad(pt));
            c4_norm(&c4_sub(&iv, &c4_scale(Complex::real(lam), &dj3)))
        },
    ));

    out.push(pointwise(
        "polar.degeneracy.wedge",
        "Omega1^Omega1 = Omega2^Omega2 = Omega1^Omega2 = Omega^Omega = 0",
        Suite::Polar,
        SampleDomain::polar(),
        100,
        TOL_IDENTITY,
        None,
        move |pt| {
            let w = polar::omega_field().value(pt);
            let w1 = w.re_part();
            let w2 = w.im_part();
            [
                w1.wedge22(&w1),
                w2.wedge22(&w2),
                w1.wedge22(&w2),
                w.wedge22(&w),
            ]
            .iter()
            .map(|z| z.abs())
            .fold(0.0, f64::max)
        },
    ));

    out.push(pointwise(
        "polar.kernel.annihilation",
        "the closed-form Z1, Z2 annihilate Omega",
        Suite::Polar,
        SampleDomain::polar(),
        100,
        cfg.tol_exact,
        None,
        move |pt| {
            let w = polar::omega_field().value(pt);
            let (z1, z2) = polar::kernel(pt, g).expect("sampling excludes p_phi = 0");
            let scale = w.norm().max(f64::MIN_POSITIVE);
            c4_norm(&w.interior(&z1)).max(c4_norm(&w.interior(&z2))) / scale
        },
    ));

    out.push(pointwise(
        "polar.kernel.span",
        "the kernel of Omega is two-dimensional and spanned by Z1, Z2",
        Suite::Polar,
        SampleDomain::polar(),
        100,
        1e-8,
        None,
        move |pt| {
            let w = polar::omega_field().value(pt);
            let m = w.matrix();
            let basis = kernel_basis(&m, 1e-9);
            if basis.len() != 2 {
                return 1.0;
            }
            let (z1, z2) = polar::kernel(pt, g).expect("sampling excludes p_phi = 0");
            let mut worst = 0.0f64;
            for z in [z1, z2] {
                let proj = kernel_project(&m, &z, 1e-9);
                worst = worst.max(c4_norm(&c4_sub(&z, &proj)) / c4_norm(&z).max(1e-300));
            }
            worst
        },
    ));

    out.push(pointwise(
        "polar.recursion.det",
        "det R1 = det R2 = 0 (singular character of Omega1, Omega2)",
        Suite::Polar,
        SampleDomain::polar(),
        100,
        TOL_DET,
        None,
        move |pt| {
            let rec = polar::recursions(pt, g).expect("guarded sample");
            let scale = |r: &MixedTensor| r.norm().powi(4).max(f64::MIN_POSITIVE);
            (rec.spectrum1.det.abs() / scale(&rec.r1)).max(rec.spectrum2.det.abs() / scale(&rec.r2))
        },
    ));

    out.push(pointwise(
        "polar.recursion.spectrum",
        "spectrum pattern {0, 0, mu, mu}: e3 = e4 = 0, e2 = (e1/2)^2",
        Suite::Polar,
        SampleDomain::polar(),
        100,
        TOL_SPECTRUM,
        None,
        move |pt| {
            let rec = polar::recursions(pt, g).expect("guarded sample");
            let mut worst = 0.0f64;
            for (s, r) in [(&rec.spectrum1, &rec.r1), (&rec.spectrum2, &rec.r2)] {
                let n = r.norm();
                worst = worst.max(s.e[2].abs() / (1.0 + n.powi(3)));
                worst = worst.max(s.e[3].abs() / (1.0 + n.powi(4)));
                let pair = s.e[1] - s.e[0].scale(0.5) * s.e[0].scale(0.5);
                worst = worst.max(pair.abs() / (1.0 + s.e[1].abs()));
            }
            worst
        },
    ));

    out.push(audit(
        "polar.audit.alpha_table",
        "tabulated alpha coefficients of Omega1 vs the wedge-product construction",
        Suite::Polar,
        SampleDomain::polar(),
        100,
        false,
        {
            let names = [
                "alpha12",
                "zero:dr^dpr",
                "zero:dr^dpphi",
                "alpha23",
                "alpha24",
                "zero:dpr^dpphi",
            ];
            names
                .iter()
                .enumerate()
                .map(|(k, name)| {
                    let truth = polar::omega_wedge_truth(g);
                    slot(name, move |pt| {
                        let p = polar::omega1_field().value(pt).coeffs[k].re;
                        let t = truth.value(pt).coeffs[k].re;
                        ((p - t).abs(), p, t)
                    })
                })
                .collect()
        },
    ));

    out.push(audit(
        "polar.audit.beta_table",
        "tabulated beta coefficients of Omega2 vs the wedge-product construction",
        Suite::Polar,
        SampleDomain::polar(),
        100,
        false,
        {
            let names = [
                "beta12",
                "zero:dr^dpr",
                "zero:dr^dpphi",
                "beta23",
                "beta24",
                "zero:dpr^dpphi",
            ];
            names
                .iter()
                .enumerate()
                .map(|(k, name)| {
                    let truth = polar::omega_wedge_truth(g);
                    slot(name, move |pt| {
                        let p = polar::omega2_field().value(pt).coeffs[k].re;
                        let t = truth.value(pt).coeffs[k].im;
                        ((p - t).abs(), p, t)
                    })
                })
                .collect()
        },
    ));

    out.push(audit(
        "polar.audit.recursion",
        "tabulated R1, R2 tensor expressions vs recursion_from_forms",
        Suite::Polar,
        SampleDomain::polar(),
        100,
        false,
        vec![
            slot("R1", move |pt| {
                let tabulated = polar::tabulated_r1(pt);
                let truth =
                    recursion_from_value(&polar::omega_wedge_truth(g).value(pt).re_part(), pt);
                (tabulated.distance(&truth), f64::NAN, f64::NAN)
            }),
            slot("R2", move |pt| {
                let tabulated = polar::tabulated_r2(pt);
                let truth =
                    recursion_from_value(&polar::omega_wedge_truth(g).value(pt).im_part(), pt);
                (tabulated.distance(&truth), f64::NAN, f64::NAN)
            }),
        ],
    ));

    out.push(audit(
        "polar.audit.Y_fields",
        "tabulated Y_r, Y_phi vs the Hamiltonian fields of M_r, N_phi",
        Suite::Polar,
        SampleDomain::polar(),
        100,
        false,
        vec![
            slot("Y_r", move |pt| {
                let tabulated = polar::y_r_field().eval(pt);
                let truth = crate::calculus::hamiltonian_vf_complex(&polar::m_r(g)).eval(pt);
                (c4_norm(&c4_sub(&tabulated, &truth)), f64::NAN, f64::NAN)
            }),
            slot("Y_phi", move |pt| {
                let tabulated = polar::y_phi_field().eval(pt);
                let truth = crate::calculus::hamiltonian_vf_complex(&polar::n_phi()).eval(pt);
                (c4_norm(&c4_sub(&tabulated, &truth)), f64::NAN, f64::NAN)
            }),
        ],
    ));

    out.push(pointwise(
        "polar.field.Y34_H",
        "Y34(H) = 0 (Y34 is the Hamiltonian field of the first integral J34)",
        Suite::Polar,
        SampleDomain::polar(),
        100,
        cfg.tol_exact,
        None,
        move |pt| {
            let yf = polar::y_fields(pt, g).expect("guarded sample");
            let dh = polar::hamiltonian(g).grad(pt);
            dot_real(&yf.y34, &dh).abs()
        },
    ));

    out.push(pointwise(
        "polar.prop2.lie",
        "[Gamma, Y] = i J34 X_lambda (proposition 2)",
        Suite::Polar,
        SampleDomain::polar(),
        100,
        cfg.tol_fd,
        Some("lambda"),
        move |pt| {
            let bracket =
                lie_bracket(&polar::gamma_field(g), &polar::y_field(), pt).expect("guarded sample");
            let o = polar::observables(pt, g).expect("guarded sample");
            let xlam = crate::calculus::hamiltonian_vf(&polar::lambda()).eval(pt);
            let expect = c4_scale(I * o.j34, &xlam);
            c4_norm(&c4_sub(&bracket, &expect)) / (1.0 + o.j34.abs())
        },
    ));

    out.push(pointwise(
        "polar.lieder.Y",
        "L_Y omega0 = -Omega",
        Suite::Polar,
        SampleDomain::polar(),
        100,
        cfg.tol_fd,
        None,
        move |pt| {
            let l = lie_derivative_2form(
                &polar::y_field(),
                &TwoFormField::canonical(ChartId::Polar),
                pt,
            )
            .expect("guarded sample");
            l.add(&polar::omega_field().value(pt)).norm()
        },
    ));

    out.push(pointwise(
        "polar.lieder.Yprime",
        "L_Y' omega0 = +Omega",
        Suite::Polar,
        SampleDomain::polar(),
        100,
        cfg.tol_fd,
        None,
        move |pt| {
            let l = lie_derivative_2form(
                &polar::y_prime_field(g),
                &TwoFormField::canonical(ChartId::Polar),
                pt,
            )
            .expect("guarded sample");
            l.sub(&polar::omega_field().value(pt)).norm()
        },
    ));

    // Stated residual: i([Z, Gamma]) Omega = 0. The measurement refutes
    // the strict pointwise form and identifies the obstruction exactly:
    // i([W, Gamma]) Omega = i W(lambda) dJ34 for every section W of the
    // kernel, which vanishes only on the level sets of J34. The check runs
    // the stated residual (and fails); the notes carry the machine-verified
    // obstruction identity.
    out.push(custom(
        "polar.kernel.invariance",
        "the flow preserves the kernel distribution: i([Z, Gamma]) Omega = 0",
        CheckKind::Pointwise,
        Suite::Polar,
        cfg.tol_fd,
        move |seed| {
            let domain = SampleDomain::polar();
            let mut rng = crate::rng::SplitMix64::for_label(seed, "polar.kernel.invariance");
            let pts = domain.sample(100, &mut rng, "polar.kernel.invariance")?;
            let mut worst = super::WorstTracker::new();
            let mut identity_worst = 0.0f64;
            let gamma = polar::gamma_field(g);
            for (i, pt) in pts.iter().enumerate() {
                let w = polar::omega_field().value(pt);
                let dj34 = polar::j34(g).grad(pt);
                let dlam = polar::lambda().grad(pt);
                for z in [polar::z1_field(), polar::z2_field()] {
                    let b = lie_bracket(&z, &gamma, pt)?;
                    let obstruction = w.interior(&b);
                    worst.offer(
                        c4_norm(&obstruction) / w.norm().max(f64::MIN_POSITIVE),
                        i,
                        pt,
                    );
                    let wlam = dot_real(&z.eval(pt), &dlam);
                    let predicted = c4_scale(I * wlam, &dj34);
                    identity_worst = identity_worst.max(
                        c4_norm(&c4_sub(&obstruction, &predicted)) / (1.0 + c4_norm(&predicted)),
                    );
                }
            }
            Ok(CustomOutcome {
                residual: worst.max,
                worst_point: worst.point,
                samples_run: pts.len(),
                notes: vec![format!(
                    "strict invariance fails: the obstruction equals i W(lambda) dJ34 \
                     (max |i([W,Gamma])Omega - i W(lambda) dJ34| = {identity_worst:e}, FD tier), \
                     which vanishes only on the level sets of J34"
                )],
            })
        },
    ));

    out.push(pointwise(
        "polar.orthogonality",
        "Gamma is Omega1-orthogonal to X_J4 and Omega2-orthogonal to X_J3",
        Suite::Polar,
        SampleDomain::polar(),
        1000,
        cfg.tol_exact,
        None,
        move |pt| {
            let gamma = polar::gamma_field(g).eval(pt);
            let y3 = crate::calculus::hamiltonian_vf(&polar::j3(g)).eval(pt);
            let y4 = crate::calculus::hamiltonian_vf(&polar::j4(g)).eval(pt);
            let w1 = polar::omega1_field().value(pt);
            let w2 = polar::omega2_field().value(pt);
            w1.apply(&y4, &gamma).abs().max(w2.apply(&y3, &gamma).abs())
        },
    ));

    out.push(pointwise(
        "polar.oscillator.bracket",
        "oscillator variant: {M, H} = 2 i lambda M (double rotation rate)",
        Suite::Polar,
        SampleDomain::polar(),
        1000,
        cfg.tol_exact,
        Some("lambda"),
        move |pt| {
            let h = polar::oscillator_hamiltonian(alpha0);
            let m = polar::oscillator_m(alpha0);
            let b = crate::calculus::poisson_bracket_mixed(&m, &h, pt).expect("shared chart");
            let v = m.eval(pt);
            (b - I.scale(2.0 * polar::lambda().eval(pt)) * v).abs() / (1.0 + v.abs())
        },
    ));

    out.push(custom(
        "polar.witness.nijenhuis",
        "the Nijenhuis torsion of R1 does not vanish (weak structure witness)",
        CheckKind::Witness,
        Suite::Polar,
        TOL_WITNESS,
        move |_seed| {
            let pt = PhasePoint::polar(1.0, FRAC_PI_2, 0.5, 1.0).expect("canonical point");
            let r1 = polar::r1_tensor_field();
            let basis_names = ["d/dr", "d/dphi", "d/dp_r", "d/dp_phi"];
            let mut observed = 0.0f64;
            let mut pairs = 0;
            for i in 0..4 {
                for j in i..4 {
                    let x = unit_field(ChartId::Polar, i, basis_names[i]);
                    let y = unit_field(ChartId::Polar, j, basis_names[j]);
                    let n = nijenhuis_torsion(&r1, &x, &y, &pt)?;
                    observed = observed.max(c4_norm(&n));
                    pairs += 1;
                }
            }
            Ok(CustomOutcome {
                residual: (NIJENHUIS_BOUND - observed).max(0.0),
                worst_point: Some(pt),
                notes: vec![format!(
                    "max |N_R1(X, Y)| over {pairs} coordinate-field pairs = {observed:e}; required >= {NIJENHUIS_BOUND:e}"
                )],
                samples_run: 1,
            })
        },
    ));
}

fn unit_field(chart: ChartId, k: usize, name: &'static str) -> VectorFieldOnChart {
    VectorFieldOnChart::from_real(name, chart, move |_| {
        let mut v = [0.0; 4];
        v[k] = 1.0;
        v
    })
}

// ---------------------------------------------------------------------------
// parabolic
// ---------------------------------------------------------------------------

fn parabolic_checks(cfg: &SuiteConfig, out: &mut Vec<CheckSpec>) {
    let g = cfg.g;

    for (id, obs, claim) in [
        (
            "parabolic.bracket.Ma",
            parab::m_a(g),
            "{M_a, H} = i lambda M_a",
        ),
        (
            "parabolic.bracket.Mb",
            parab::m_b(g),
            "{M_b, H} = i lambda M_b",
        ),
    ] {
        let h = parab::hamiltonian(g);
        let lam = parab::lambda();
        out.push(pointwise(
            id,
            claim,
            Suite::Parabolic,
            SampleDomain::parabolic(),
            1000,
            cfg.tol_exact,
            Some("lambda"),
            move |pt| {
                let b = crate::calculus::poisson_bracket_mixed(&obs, &h, pt).expect("shared chart");
                let v = obs.eval(pt);
                (b - I.scale(lam.eval(pt)) * v).abs() / (1.0 + v.abs())
            },
        ));
    }

    for (id, field, claim) in [
        ("parabolic.integral.K3", parab::k3(g), "{K3, H} = 0"),
        ("parabolic.integral.K4", parab::k4(g), "{K4, H} = 0"),
        ("parabolic.integral.Rx", parab::r_x(g), "{R_x, H} = 0"),
    ] {
        let h = parab::hamiltonian(g);
        out.push(pointwise(
            id,
            claim,
            Suite::Parabolic,
            SampleDomain::parabolic(),
            1000,
            cfg.tol_exact,
            None,
            move |pt| poisson_bracket(&field, &h, pt).expect("shared chart").abs(),
        ));
    }

    out.push(pointwise(
        "parabolic.identity.K4",
        "K4 = Im(K34) = -2 J^2 H",
        Suite::Parabolic,
        SampleDomain::parabolic(),
        1000,
        TOL_IDENTITY,
        None,
        move |pt| {
            let o = parab::observables(pt, g).expect("guarded sample");
            (o.k4 + 2.0 * o.j * o.j * o.h).abs()
        },
    ));

    out.push(pointwise(
        "parabolic.identity.modulus",
        "|M_a|^2 = 2(J^2 H - g R_x + g^2), |M_b|^2 = 2(J^2 H + g R_x + g^2)",
        Suite::Parabolic,
        SampleDomain::parabolic(),
        1000,
        TOL_IDENTITY,
        None,
        move |pt| {
            let o = parab::observables(pt, g).expect("guarded sample");
            let ea =
                (o.mod_a2 - 2.0 * (o.j * o.j * o.h - g * o.rx + g * g)).abs() / (1.0 + o.mod_a2);
            let eb =
                (o.mod_b2 - 2.0 * (o.j * o.j * o.h + g * o.rx + g * g)).abs() / (1.0 + o.mod_b2);
            let es = (o.mod_a2 + o.mod_b2 - 4.0 * (o.j * o.j * o.h + g * g)).abs()
                / (1.0 + o.mod_a2 + o.mod_b2);
            ea.max(eb).max(es)
        },
    ));

    out.push(pointwise(
        "parabolic.gamma.tabulated",
        "the tabulated flow components equal X_H",
        Suite::Parabolic,
        SampleDomain::parabolic(),
        1000,
        TOL_IDENTITY,
        None,
        move |pt| {
            let tabulated = parab::gamma_at(pt, g).expect("guarded sample");
            let xh = parab::gamma_field(g).eval(pt);
            (0..4)
                .map(|k| (xh[k].re - tabulated[k]).abs())
                .fold(0.0, f64::max)
        },
    ));

    out.push(pointwise(
        "parabolic.prop6.complex",
        "i(Gamma) Omega_ab = i lambda d(M_a conj M_b) (proposition 6)",
        Suite::Parabolic,
        SampleDomain::parabolic(),
        1000,
        cfg.tol_exact,
        Some("lambda"),
        move |pt| {
            let w = parab::omega_ab_truth(g).value(pt);
            let iv = w.interior(&parab::gamma_field(g).eval(pt));
            let lam = parab::lambda().eval(pt);
            let expect = c4_scale(I.scale(lam), &parab::k34(g).grad(pt));
            c4_norm(&c4_sub(&iv, &expect))
        },
    ));

    out.push(pointwise(
        "parabolic.prop6.real1",
        "i(Gamma) Omega_ab1 = -lambda dK4 with K4 = Im(K34)",
        Suite::Parabolic,
        SampleDomain::parabolic(),
        1000,
        cfg.tol_exact,
        Some("lambda"),
        move |pt| {
            let w = parab::omega_ab_truth(g).value(pt).re_part();
            let iv = w.interior(&parab::gamma_field(g).eval(pt));
            let lam = parab::lambda().eval(pt);
            let dk4 = c4_from_real(parab::k4(g).grad(pt));
            c4_norm(&c4_add(&iv, &c4_scale(Complex::real(lam), &dk4)))
        },
    ));

    out.push(pointwise(
        "parabolic.prop6.real2",
        "i(Gamma) Omega_ab2 = +lambda dK3 with K3 = Re(K34)",
        Suite::Parabolic,
        SampleDomain::parabolic(),
        1000,
        cfg.tol_exact,
        Some("lambda"),
        move |pt| {
            let w = parab::omega_ab_truth(g).value(pt).im_part();
            let iv = w.interior(&parab::gamma_field(g).eval(pt));
            let lam = parab::lambda().eval(pt);
            let dk3 = c4_from_real(parab::k3(g).grad(pt));
            c4_norm(&c4_sub(&iv, &c4_scale(Complex::real(lam), &dk3)))
        },
    ));

    out.push(pointwise(
        "parabolic.degeneracy.wedge",
        "Omega_ab1^Omega_ab1 = Omega_ab2^Omega_ab2 = Omega_ab1^Omega_ab2 = 0",
        Suite::Parabolic,
        SampleDomain::parabolic(),
        100,
        TOL_IDENTITY,
        None,
        move |pt| {
            let w = parab::omega_ab_truth(g).value(pt);
            let w1 = w.re_part();
            let w2 = w.im_part();
            [
                w1.wedge22(&w1),
                w2.wedge22(&w2),
                w1.wedge22(&w2),
                w.wedge22(&w),
            ]
            .iter()
            .map(|z| z.abs())
            .fold(0.0, f64::max)
        },
    ));

    out.push(pointwise(
        "parabolic.kernel.span",
        "the kernel of Omega_ab is two-dimensional",
        Suite::Parabolic,
        SampleDomain::parabolic(),
        100,
        cfg.tol_exact,
        None,
        move |pt| {
            let m = parab::omega_ab_truth(g).value(pt).matrix();
            let basis = kernel_basis(&m, 1e-9);
            if basis.len() != 2 {
                return 1.0;
            }
            basis
                .iter()
                .map(|v| crate::linalg::kernel_residual(&m, v))
                .fold(0.0, f64::max)
        },
    ));

    out.push(pointwise(
        "parabolic.recursion.det",
        "det R_ab1 = det R_ab2 = 0 (singular character of the real forms)",
        Suite::Parabolic,
        SampleDomain::parabolic(),
        100,
        TOL_DET,
        None,
        move |pt| {
            let rec = parab::recursions(pt, g).expect("sampling keeps |J| >= 0.1");
            let scale = |r: &MixedTensor| r.norm().powi(4).max(f64::MIN_POSITIVE);
            (rec.spectrum1.det.abs() / scale(&rec.r_ab1))
                .max(rec.spectrum2.det.abs() / scale(&rec.r_ab2))
        },
    ));

    out.push(pointwise(
        "parabolic.recursion.spectrum",
        "spectrum pattern {0, 0, mu, mu} for R_ab1, R_ab2",
        Suite::Parabolic,
        SampleDomain::parabolic(),
        100,
        TOL_SPECTRUM,
        None,
        move |pt| {
            let rec = parab::recursions(pt, g).expect("sampling keeps |J| >= 0.1");
            let mut worst = 0.0f64;
            for (s, r) in [(&rec.spectrum1, &rec.r_ab1), (&rec.spectrum2, &rec.r_ab2)] {
                let n = r.norm();
                worst = worst.max(s.e[2].abs() / (1.0 + n.powi(3)));
                worst = worst.max(s.e[3].abs() / (1.0 + n.powi(4)));
                let pair = s.e[1] - s.e[0].scale(0.5) * s.e[0].scale(0.5);
                worst = worst.max(pair.abs() / (1.0 + s.e[1].abs()));
            }
            worst
        },
    ));

    out.push(audit(
        "parabolic.audit.alpha_table",
        "tabulated alpha coefficients of Omega_ab1 vs the wedge-product construction",
        Suite::Parabolic,
        SampleDomain::parabolic(),
        100,
        true,
        {
            let names = [
                "zero:da^db",
                "alpha13",
                "alpha14",
                "alpha23",
                "alpha24",
                "alpha34",
            ];
            names
                .iter()
                .enumerate()
                .map(|(k, name)| {
                    let truth = parab::omega_ab_truth(g);
                    slot(name, move |pt| {
                        let p = parab::tabulated_omega_ab1_field(g).value(pt).coeffs[k].re;
                        let t = truth.value(pt).coeffs[k].re;
                        ((p - t).abs(), p, t)
                    })
                })
                .collect()
        },
    ));

    out.push(audit(
        "parabolic.audit.beta_table",
        "tabulated beta coefficients of Omega_ab2 vs the wedge-product construction",
        Suite::Parabolic,
        SampleDomain::parabolic(),
        100,
        true,
        {
            let names = [
                "zero:da^db",
                "beta13",
                "beta14",
                "beta23",
                "beta24",
                "zero:dpa^dpb",
            ];
            names
                .iter()
                .enumerate()
                .map(|(k, name)| {
                    let truth = parab::omega_ab_truth(g);
                    slot(name, move |pt| {
                        let p = parab::tabulated_omega_ab2_field(g).value(pt).coeffs[k].re;
                        let t = truth.value(pt).coeffs[k].im;
                        ((p - t).abs(), p, t)
                    })
                })
                .collect()
        },
    ));

    out.push(audit(
        "parabolic.audit.Z_fields",
        "tabulated Z_a, Z_b vs the Hamiltonian fields of M_a, M_b",
        Suite::Parabolic,
        SampleDomain::parabolic(),
        100,
        true,
        vec![
            slot("Z_a", move |pt| {
                let tabulated = parab::tabulated_z_a_field(g).eval(pt);
                let truth = crate::calculus::hamiltonian_vf_complex(&parab::m_a(g)).eval(pt);
                (c4_norm(&c4_sub(&tabulated, &truth)), f64::NAN, f64::NAN)
            }),
            slot("Z_b", move |pt| {
                let tabulated = parab::tabulated_z_b_field(g).eval(pt);
                let truth = crate::calculus::hamiltonian_vf_complex(&parab::m_b(g)).eval(pt);
                (c4_norm(&c4_sub(&tabulated, &truth)), f64::NAN, f64::NAN)
            }),
        ],
    ));

    out.push(pointwise(
        "parabolic.field.Z34_H",
        "Z34(H) = 0 (Z34 is the Hamiltonian field of the first integral K34)",
        Suite::Parabolic,
        SampleDomain::parabolic(),
        100,
        cfg.tol_exact,
        None,
        move |pt| {
            let zf = parab::z_fields(pt, g).expect("guarded sample");
            let dh = parab::hamiltonian(g).grad(pt);
            dot_real(&zf.z34, &dh).abs()
        },
    ));

    out.push(pointwise(
        "parabolic.prop5.lie",
        "[Gamma, Z] = i K34 X_lambda (proposition 5)",
        Suite::Parabolic,
        SampleDomain::parabolic(),
        100,
        cfg.tol_fd,
        Some("lambda"),
        move |pt| {
            let bracket = lie_bracket(&parab::gamma_field(g), &parab::z_field(g), pt)
                .expect("guarded sample");
            let o = parab::observables(pt, g).expect("guarded sample");
            let xlam = crate::calculus::hamiltonian_vf(&parab::lambda()).eval(pt);
            let expect = c4_scale(I * o.k34, &xlam);
            c4_norm(&c4_sub(&bracket, &expect)) / (1.0 + o.k34.abs())
        },
    ));

    out.push(pointwise(
        "parabolic.lieder.Z",
        "L_Z omega0 = -Omega_ab",
        Suite::Parabolic,
        SampleDomain::parabolic(),
        100,
        cfg.tol_fd,
        None,
        move |pt| {
            let l = lie_derivative_2form(
                &parab::z_field(g),
                &TwoFormField::canonical(ChartId::Parabolic),
                pt,
            )
            .expect("guarded sample");
            let w = parab::omega_ab_truth(g).value(pt);
            l.add(&w).norm()
        },
    ));

    out.push(pointwise(
        "parabolic.lieder.Zprime",
        "L_Z' omega0 = +Omega_ab",
        Suite::Parabolic,
        SampleDomain::parabolic(),
        100,
        cfg.tol_fd,
        None,
        move |pt| {
            let l = lie_derivative_2form(
                &parab::z_prime_field(g),
                &TwoFormField::canonical(ChartId::Parabolic),
                pt,
            )
            .expect("guarded sample");
            let w = parab::omega_ab_truth(g).value(pt);
            l.sub(&w).norm()
        },
    ));

    // As in the polar chart, the strict statement fails; the obstruction is
    // i W(lambda) dK34 exactly. Stated residual kept, analysis in notes.
    out.push(custom(
        "parabolic.kernel.invariance",
        "the flow preserves the kernel distribution of Omega_ab",
        CheckKind::Pointwise,
        Suite::Parabolic,
        cfg.tol_fd,
        move |seed| {
            let domain = SampleDomain::parabolic();
            let mut rng =
                crate::rng::SplitMix64::for_label(seed, "parabolic.kernel.invariance");
            let pts = domain.sample(100, &mut rng, "parabolic.kernel.invariance")?;
            let mut worst = super::WorstTracker::new();
            let mut identity_worst = 0.0f64;
            let omega = parab::omega_ab_truth(g);
            let gamma = parab::gamma_field(g);
            for (i, pt) in pts.iter().enumerate() {
                let w = omega.value(pt);
                let basis = kernel_basis(&w.matrix(), 1e-9);
                if basis.len() != 2 {
                    worst.offer(1.0, i, pt);
                    continue;
                }
                let dk34 = parab::k34(g).grad(pt);
                let dlam = parab::lambda().grad(pt);
                for v0 in basis {
                    // smooth kernel field near pt: project the frozen kernel
                    // vector onto ker Omega_ab(q); the projector is
                    // basis-independent, hence smooth where the rank is
                    // locally constant
                    let omega_inner = omega.clone();
                    let field = VectorFieldOnChart::new("ker", ChartId::Parabolic, move |q| {
                        kernel_project(&omega_inner.value(q).matrix(), &v0, 1e-9)
                    });
                    let b = lie_bracket(&field, &gamma, pt)?;
                    let obstruction = w.interior(&b);
                    worst.offer(c4_norm(&obstruction) / w.norm().max(f64::MIN_POSITIVE), i, pt);
                    let wlam = dot_real(&field.eval(pt), &dlam);
                    let predicted = c4_scale(I * wlam, &dk34);
                    identity_worst = identity_worst
                        .max(c4_norm(&c4_sub(&obstruction, &predicted)) / (1.0 + c4_norm(&predicted)));
                }
            }
            Ok(CustomOutcome {
                residual: worst.max,
                worst_point: worst.point,
                samples_run: pts.len(),
                notes: vec![format!(
                    "strict invariance fails: the obstruction equals i W(lambda) dK34 \
                     (max |i([W,Gamma])Omega_ab - i W(lambda) dK34| = {identity_worst:e}, FD tier), \
                     which vanishes only on the level sets of K34"
                )],
            })
        },
    ));

    out.push(pointwise(
        "parabolic.orthogonality",
        "Gamma is Omega_ab1-orthogonal to X_K4 and Omega_ab2-orthogonal to X_K3",
        Suite::Parabolic,
        SampleDomain::parabolic(),
        1000,
        cfg.tol_exact,
        None,
        move |pt| {
            let gamma = parab::gamma_field(g).eval(pt);
            let xk3 = crate::calculus::hamiltonian_vf(&parab::k3(g)).eval(pt);
            let xk4 = crate::calculus::hamiltonian_vf(&parab::k4(g)).eval(pt);
            let w = parab::omega_ab_truth(g).value(pt);
            let w1 = w.re_part();
            let w2 = w.im_part();
            w1.apply(&xk4, &gamma)
                .abs()
                .max(w2.apply(&xk3, &gamma).abs())
        },
    ));

    out.push(pointwise(
        "parabolic.separable.J2",
        "the separable second integral reduces to R_x for the Kepler split and is conserved",
        Suite::Parabolic,
        SampleDomain::parabolic(),
        100,
        cfg.tol_fd,
        None,
        move |pt| {
            let j2 = parab::kepler_j2_field(g);
            let rx = parab::r_x(g).eval(pt);
            let reduction = (j2(pt) - rx).abs() / (1.0 + rx.abs());
            // conservation via the finite-difference bracket oracle
            let dj2 = fd_grad(&j2, pt);
            let dh = parab::hamiltonian(g).grad(pt);
            let bracket = (dj2[0] * dh[2] - dj2[2] * dh[0]) + (dj2[1] * dh[3] - dj2[3] * dh[1]);
            reduction.max(bracket.abs())
        },
    ));
}

// ---------------------------------------------------------------------------
// flow
// ---------------------------------------------------------------------------

fn flow_checks(cfg: &SuiteConfig, out: &mut Vec<CheckSpec>) {
    let g = cfg.g;
    let alpha0 = cfg.alpha0;

    out.push(custom(
        "flow.polar.energy",
        "implicit midpoint conserves H to O(h^2) along the bound polar orbit",
        CheckKind::Trajectory,
        Suite::Flow,
        1e-8,
        move |_seed| {
            let pt0 = PhasePoint::polar(1.0, 0.0, 0.0, 1.2)?;
            let icfg = IntegratorConfig {
                step: 1e-3,
                steps: 50_000,
                ..Default::default()
            };
            let traj = integrate(
                &polar::hamiltonian(g),
                &pt0,
                &icfg,
                &[polar::hamiltonian(g)],
            )?;
            let drift = traj.monitors[0].max_drift;
            Ok(CustomOutcome {
                residual: drift,
                worst_point: Some(pt0),
                notes: vec![format!(
                    "H drift over {} steps of h = {:e}: {drift:e} (relative to 1+|H(0)|)",
                    icfg.steps, icfg.step
                )],
                samples_run: 1,
            })
        },
    ));

    out.push(custom(
        "flow.polar.invariants",
        "J3, J4, p_phi are conserved along the polar flow (proposition 1)",
        CheckKind::Trajectory,
        Suite::Flow,
        1e-6,
        move |_seed| {
            let pt0 = PhasePoint::polar(1.0, 0.0, 0.0, 1.2)?;
            let icfg = IntegratorConfig {
                step: 1e-3,
                steps: 50_000,
                ..Default::default()
            };
            let traj = integrate(
                &polar::hamiltonian(g),
                &pt0,
                &icfg,
                &[polar::j3(g), polar::j4(g), polar::angular_momentum()],
            )?;
            let notes = traj
                .monitors
                .iter()
                .map(|m| format!("{} drift: {:e}", m.name, m.max_drift))
                .collect();
            Ok(CustomOutcome {
                residual: traj
                    .monitors
                    .iter()
                    .map(|m| m.max_drift)
                    .fold(0.0, f64::max),
                worst_point: Some(pt0),
                notes,
                samples_run: 1,
            })
        },
    ));

    out.push(custom(
        "flow.parabolic.invariants",
        "K3, K4, R_x are conserved along the parabolic flow (proposition 4)",
        CheckKind::Trajectory,
        Suite::Flow,
        1e-6,
        move |_seed| {
            let pt0 = PhasePoint::parabolic(1.0, 1.0, 1.0, 0.0)?;
            let icfg = IntegratorConfig {
                step: 1e-3,
                steps: 20_000,
                ..Default::default()
            };
            let traj = integrate(
                &parab::hamiltonian(g),
                &pt0,
                &icfg,
                &[
                    parab::k3(g).with_name("K3"),
                    parab::k4(g).with_name("K4"),
                    parab::r_x(g),
                ],
            )?;
            let notes = traj
                .monitors
                .iter()
                .map(|m| format!("{} drift: {:e}", m.name, m.max_drift))
                .collect();
            Ok(CustomOutcome {
                residual: traj
                    .monitors
                    .iter()
                    .map(|m| m.max_drift)
                    .fold(0.0, f64::max),
                worst_point: Some(pt0),
                notes,
                samples_run: 1,
            })
        },
    ));

    out.push(custom(
        "flow.oscillator.fradkin",
        "the Fradkin components F = M (conj N_phi)^2 are conserved along the oscillator flow",
        CheckKind::Trajectory,
        Suite::Flow,
        1e-6,
        move |_seed| {
            let pt0 = PhasePoint::polar(1.0, 0.0, 1.0, 1.0)?;
            let icfg = IntegratorConfig {
                step: 2.5e-4,
                steps: 10_000,
                ..Default::default()
            };
            let f = polar::fradkin(alpha0);
            let traj = integrate(
                &polar::oscillator_hamiltonian(alpha0),
                &pt0,
                &icfg,
                &[f.re.with_name("F_re"), f.im.with_name("F_im")],
            )?;
            let notes = traj
                .monitors
                .iter()
                .map(|m| format!("{} drift: {:e}", m.name, m.max_drift))
                .collect();
            Ok(CustomOutcome {
                residual: traj
                    .monitors
                    .iter()
                    .map(|m| m.max_drift)
                    .fold(0.0, f64::max),
                worst_point: Some(pt0),
                notes,
                samples_run: 1,
            })
        },
    ));

    out.push(custom(
        "flow.circular.fixed_radius",
        "the circular orbit is a radial equilibrium of the midpoint map",
        CheckKind::Trajectory,
        Suite::Flow,
        1e-12,
        move |_seed| {
            let pphi = g.sqrt();
            let pt0 = PhasePoint::polar(1.0, 0.0, 0.0, pphi)?;
            let h = polar::hamiltonian(g);
            let mut x = pt0.coords();
            let icfg = IntegratorConfig {
                step: 1e-2,
                steps: 1,
                ..Default::default()
            };
            let mut worst = 0.0f64;
            for _ in 0..100 {
                x = propagate_raw(&h, ChartId::Polar, x, &icfg)?;
                worst = worst.max((x[0] - 1.0).abs()).max(x[2].abs());
            }
            Ok(CustomOutcome {
                residual: worst,
                worst_point: Some(pt0),
                notes: vec![format!("max |r - 1| and |p_r| over 100 steps: {worst:e}")],
                samples_run: 1,
            })
        },
    ));

    out.push(pointwise(
        "flow.midpoint.reversibility",
        "stepping +h then -h returns to the start",
        Suite::Flow,
        SampleDomain::polar(),
        100,
        1e-10,
        None,
        move |pt| {
            let h = polar::hamiltonian(g);
            let fwd = implicit_midpoint_step(&h, pt, 1e-2).expect("guarded sample");
            let back = implicit_midpoint_step(&h, &fwd, -1e-2).expect("guarded sample");
            pt.coords()
                .iter()
                .zip(back.coords())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        },
    ));

    out.push(pointwise(
        "flow.midpoint.symplectic",
        "the 100-step midpoint flow map has a symplectic Jacobian",
        Suite::Flow,
        SampleDomain::polar(),
        10,
        cfg.tol_fd,
        None,
        move |pt| {
            let h = polar::hamiltonian(g);
            let icfg = IntegratorConfig {
                step: 1e-3,
                steps: 100,
                ..Default::default()
            };
            let map = |c: [f64; 4]| -> [f64; 4] {
                propagate_raw(&h, ChartId::Polar, c, &icfg).expect("guarded sample")
            };
            let x0 = pt.coords();
            let mut jac = [[0.0f64; 4]; 4];
            for k in 0..4 {
                let step = fd_step(x0[k]);
                let mut xp = x0;
                let mut xm = x0;
                xp[k] += step;
                xm[k] -= step;
                let (fp, fm) = (map(xp), map(xm));
                for i in 0..4 {
                    jac[i][k] = (fp[i] - fm[i]) / (xp[k] - xm[k]);
                }
            }
            let w = canonical_matrix();
            let mut worst = 0.0f64;
            for i in 0..4 {
                for j in 0..4 {
                    let mut s = 0.0;
                    for a in 0..4 {
                        for b in 0..4 {
                            s += jac[a][i] * w[a][b] * jac[b][j];
                        }
                    }
                    worst = worst.max((s - w[i][j]).abs());
                }
            }
            worst
        },
    ));

    out.push(custom(
        "flow.midpoint.order",
        "H drift scales as O(h^2): halving h reduces drift by a factor in [3, 5]",
        CheckKind::Trajectory,
        Suite::Flow,
        TOL_WITNESS,
        move |_seed| {
            let pt0 = PhasePoint::polar(1.0, 0.0, 0.0, 1.2)?;
            let h = polar::hamiltonian(g);
            let run = |step: f64, steps: usize| -> Result<f64> {
                let icfg = IntegratorConfig {
                    step,
                    steps,
                    ..Default::default()
                };
                Ok(integrate(&h, &pt0, &icfg, &[polar::hamiltonian(g)])?.monitors[0].max_drift)
            };
            let d1 = run(1e-3, 10_000)?;
            let d2 = run(5e-4, 20_000)?;
            let ratio = d1 / d2;
            let residual = (3.0 - ratio).max(ratio - 5.0).max(0.0);
            Ok(CustomOutcome {
                residual,
                worst_point: Some(pt0),
                notes: vec![format!(
                    "drift(h) = {d1:e}, drift(h/2) = {d2:e}, ratio = {ratio}"
                )],
                samples_run: 1,
            })
        },
    ));

    out.push(custom(
        "flow.rk4.agreement",
        "implicit midpoint and RK4 agree on the short-time flow",
        CheckKind::Trajectory,
        Suite::Flow,
        1e-9,
        move |_seed| {
            let h = polar::hamiltonian(g);
            let mut a = PhasePoint::polar(1.0, FRAC_PI_2, 0.5, 1.0)?;
            let mut b = a;
            for _ in 0..10 {
                a = implicit_midpoint_step(&h, &a, 1e-3)?;
                b = rk4_step(&h, &b, 1e-3)?;
            }
            let gap = a
                .coords()
                .iter()
                .zip(b.coords())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            Ok(CustomOutcome {
                residual: gap,
                worst_point: Some(a),
                notes: vec![format!("max state gap after 10 steps of h = 1e-3: {gap:e}")],
                samples_run: 1,
            })
        },
    ));
}

/// Which registered checks stand behind each structural claim. Every
/// claim verified by the library maps to at least one check id.
pub fn proposition_coverage() -> &'static [(&'static str, &'static [&'static str])] {
    &[
        (
            "proposition 1: J34 = M_r conj(N_phi) is a complex first integral",
            &[
                "polar.integral.J3",
                "polar.integral.J4",
                "polar.identity.J34_product",
                "flow.polar.invariants",
            ],
        ),
        (
            "proposition 2: [Gamma, Y] = i J34 X_lambda",
            &["polar.prop2.lie"],
        ),
        (
            "proposition 3: i(Gamma) Omega = i lambda d(M_r conj N_phi)",
            &[
                "polar.prop3.complex",
                "polar.prop3.real1",
                "polar.prop3.real2",
            ],
        ),
        (
            "proposition 4: K34 = M_a conj(M_b) is a complex first integral",
            &[
                "parabolic.integral.K3",
                "parabolic.integral.K4",
                "flow.parabolic.invariants",
            ],
        ),
        (
            "proposition 5: [Gamma, Z] = i K34 X_lambda",
            &["parabolic.prop5.lie"],
        ),
        (
            "proposition 6: i(Gamma) Omega_ab = i lambda d(M_a conj M_b)",
            &[
                "parabolic.prop6.complex",
                "parabolic.prop6.real1",
                "parabolic.prop6.real2",
            ],
        ),
        (
            "bracket rotation {M, H} = i lambda M",
            &[
                "polar.bracket.Mr",
                "polar.bracket.Nphi",
                "parabolic.bracket.Ma",
                "parabolic.bracket.Mb",
            ],
        ),
        (
            "modulus identities of M_r, M_a, M_b",
            &[
                "polar.identity.modulus",
                "polar.identity.Nphi_modulus",
                "parabolic.identity.modulus",
                "parabolic.identity.K4",
            ],
        ),
        (
            "degenerate structures: all wedge squares vanish and det R = 0",
            &[
                "polar.degeneracy.wedge",
                "parabolic.degeneracy.wedge",
                "polar.recursion.det",
                "parabolic.recursion.det",
            ],
        ),
        (
            "two-dimensional kernel distribution, preserved by the flow",
            &[
                "polar.kernel.annihilation",
                "polar.kernel.span",
                "polar.kernel.invariance",
                "parabolic.kernel.span",
                "parabolic.kernel.invariance",
            ],
        ),
        (
            "Lie derivatives: L_Y omega0 = -Omega, L_Y' omega0 = +Omega and parabolic analogues",
            &[
                "polar.lieder.Y",
                "polar.lieder.Yprime",
                "parabolic.lieder.Z",
                "parabolic.lieder.Zprime",
            ],
        ),
        (
            "recursion spectrum {0, 0, mu, mu}",
            &["polar.recursion.spectrum", "parabolic.recursion.spectrum"],
        ),
        (
            "orthogonality relations i(Gamma) i(X_J4) Omega1 = 0 etc.",
            &["polar.orthogonality", "parabolic.orthogonality"],
        ),
        (
            "tabulated closed-form expressions match the wedge-product construction",
            &[
                "polar.audit.alpha_table",
                "polar.audit.beta_table",
                "polar.audit.recursion",
                "polar.audit.Y_fields",
                "parabolic.audit.alpha_table",
                "parabolic.audit.beta_table",
                "parabolic.audit.Z_fields",
            ],
        ),
        (
            "second constant of motion of separable parabolic potentials",
            &["parabolic.separable.J2"],
        ),
        (
            "oscillator variant: double rotation rate and conserved Fradkin components",
            &["polar.oscillator.bracket", "flow.oscillator.fradkin"],
        ),
        (
            "nonvanishing Nijenhuis torsion (weak, not strong, structure)",
            &["polar.witness.nijenhuis"],
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_ids_are_unique() {
        let checks = build(&SuiteConfig::default());
        let mut ids: Vec<&str> = checks.iter().map(|c| c.id).collect();
        let n = ids.len();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), n, "duplicate check ids");
    }

    #[test]
    fn coverage_refers_to_registered_checks() {
        let checks = build(&SuiteConfig::default());
        let ids: Vec<&str> = checks.iter().map(|c| c.id).collect();
        for (claim, check_ids) in proposition_coverage() {
            assert!(!check_ids.is_empty(), "claim '{claim}' has no checks");
            for id in *check_ids {
                assert!(
                    ids.contains(id),
                    "claim '{claim}' refers to unknown check '{id}'"
                );
            }
        }
        // every numbered structural claim is present
        for n in 1..=6 {
            assert!(
                proposition_coverage()
                    .iter()
                    .any(|(claim, _)| claim.starts_with(&format!("proposition {n}"))),
                "proposition {n} missing from coverage"
            );
        }
    }

    #[test]
    fn every_check_carries_positive_tolerance_and_samples() {
        for c in build(&SuiteConfig::default()) {
            assert!(c.tolerance > 0.0, "{}", c.id);
            assert!(c.samples >= 1, "{}", c.id);
        }
    }
}
