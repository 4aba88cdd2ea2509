//! The Kepler problem in the polar chart `(r, phi, p_r, p_phi)`.
//!
//! The chart carries the Hamiltonian `H = (p_r^2 + p_phi^2/r^2)/2 - g/r`,
//! the rotation rate `lambda = p_phi/r^2`, and the two complex observables
//!
//! ```text
//!   M_r   = p_r p_phi + i (g - p_phi^2 / r),
//!   N_phi = cos(phi)  + i sin(phi),
//! ```
//!
//! both of which rotate under the flow: `{M_r, H} = i lambda M_r` and
//! `{N_phi, H} = i lambda N_phi`. Their combination `J34 = M_r conj(N_phi)`
//! is a complex first integral whose real and imaginary parts are the two
//! components of the Laplace-Runge-Lenz vector.
//!
//! From the pair `(M_r, N_phi)` the chart inherits a complex 2-form
//! `Omega = dM_r ^ d(conj N_phi)` with real and imaginary parts `Omega1`,
//! `Omega2` given by closed-form coefficient tables; the flow is
//! quasi-Hamiltonian for `Omega` with integrating factor `lambda`:
//! `i(Gamma) Omega = i lambda d(M_r conj(N_phi))`. Both real forms are
//! degenerate, their kernels are spanned by closed-form fields `Z1`, `Z2`,
//! and the induced recursion operators `R1`, `R2` have spectrum
//! `{0, 0, mu, mu}`.
//!
//! Sign convention: this module defines `J4 := Im(J34)`, i.e.
//! `J4 = (g - p_phi^2/r) cos(phi) - p_r p_phi sin(phi)`, which is the
//! convention under which the real split `i(Gamma) Omega1 = -lambda dJ4`,
//! `i(Gamma) Omega2 = +lambda dJ3` holds identically.

use crate::calculus::{
    build_wedge_form, hamiltonian_vf, hamiltonian_vf_complex, recursion_from_value, CVec4,
    ComplexObservable, ScalarField, TensorField, TwoFormField, TwoFormValue, Vec4,
    VectorFieldOnChart,
};
use crate::charts::{ChartId, PhasePoint};
use crate::complex::Complex;
use crate::error::{QbhError, Result};
use crate::linalg::MixedTensor;

const CHART: ChartId = ChartId::Polar;

fn check(pt: &PhasePoint) -> Result<()> {
    if pt.chart != CHART {
        return Err(QbhError::ChartMismatch {
            expected: CHART,
            got: pt.chart,
        });
    }
    if !pt.in_guarded_domain() {
        return Err(QbhError::Domain(format!("polar r = {} below guard", pt.q1)));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// scalar fields
// ---------------------------------------------------------------------------

/// Kepler Hamiltonian `H = (p_r^2 + p_phi^2/r^2)/2 - g/r`.
pub fn hamiltonian(g: f64) -> ScalarField {
    ScalarField::new(
        "H",
        CHART,
        move |pt| {
            let (r, pr, pphi) = (pt.q1, pt.p1, pt.p2);
            0.5 * (pr * pr + (pphi * pphi) / (r * r)) - g / r
        },
        move |pt| {
            let (r, pr, pphi) = (pt.q1, pt.p1, pt.p2);
            [
                -(pphi * pphi) / (r * r * r) + g / (r * r),
                0.0,
                pr,
                pphi / (r * r),
            ]
        },
    )
}

/// Integrating factor `lambda = p_phi / r^2`, the common rotation rate.
pub fn lambda() -> ScalarField {
    ScalarField::new(
        "lambda",
        CHART,
        |pt| pt.p2 / (pt.q1 * pt.q1),
        |pt| {
            let (r, pphi) = (pt.q1, pt.p2);
            [-2.0 * pphi / (r * r * r), 0.0, 0.0, 1.0 / (r * r)]
        },
    )
}

/// Angular momentum `J2 = p_phi`.
pub fn angular_momentum() -> ScalarField {
    ScalarField::new("J2", CHART, |pt| pt.p2, |_| [0.0, 0.0, 0.0, 1.0])
}

/// Radial complex observable `M_r = p_r p_phi + i (g - p_phi^2/r)`.
pub fn m_r(g: f64) -> ComplexObservable {
    let re = ScalarField::new(
        "M_r1",
        CHART,
        |pt| pt.p1 * pt.p2,
        |pt| [0.0, 0.0, pt.p2, pt.p1],
    );
    let im = ScalarField::new(
        "M_r2",
        CHART,
        move |pt| g - (pt.p2 * pt.p2) / pt.q1,
        move |pt| {
            let (r, pphi) = (pt.q1, pt.p2);
            [(pphi * pphi) / (r * r), 0.0, 0.0, -2.0 * pphi / r]
        },
    );
    ComplexObservable { re, im }
}

/// Angular complex observable `N_phi = cos(phi) + i sin(phi)`, of unit modulus.
pub fn n_phi() -> ComplexObservable {
    let re = ScalarField::new(
        "N_phi1",
        CHART,
        |pt| pt.q2.cos(),
        |pt| [0.0, -pt.q2.sin(), 0.0, 0.0],
    );
    let im = ScalarField::new(
        "N_phi2",
        CHART,
        |pt| pt.q2.sin(),
        |pt| [0.0, pt.q2.cos(), 0.0, 0.0],
    );
    ComplexObservable { re, im }
}

/// The complex first integral `J34 = M_r conj(N_phi)` with exact
/// product-rule gradients.
pub fn j34(g: f64) -> ComplexObservable {
    m_r(g).mul(&n_phi().conj()).expect("shared chart")
}

/// First Laplace-Runge-Lenz component
/// `J3 = Re(J34) = p_r p_phi cos(phi) - (p_phi^2/r) sin(phi) + g sin(phi)`.
pub fn j3(g: f64) -> ScalarField {
    ScalarField::new(
        "J3",
        CHART,
        move |pt| {
            let (r, phi, pr, pphi) = (pt.q1, pt.q2, pt.p1, pt.p2);
            let (sin, cos) = phi.sin_cos();
            pr * pphi * cos - (pphi * pphi / r) * sin + g * sin
        },
        move |pt| {
            let (r, phi, pr, pphi) = (pt.q1, pt.q2, pt.p1, pt.p2);
            let (sin, cos) = phi.sin_cos();
            [
                (pphi * pphi / (r * r)) * sin,
                -pr * pphi * sin - (pphi * pphi / r) * cos + g * cos,
                pphi * cos,
                pr * cos - 2.0 * (pphi / r) * sin,
            ]
        },
    )
}

/// Second Laplace-Runge-Lenz component
/// `J4 = Im(J34) = (g - p_phi^2/r) cos(phi) - p_r p_phi sin(phi)`.
pub fn j4(g: f64) -> ScalarField {
    ScalarField::new(
        "J4",
        CHART,
        move |pt| {
            let (r, phi, pr, pphi) = (pt.q1, pt.q2, pt.p1, pt.p2);
            let (sin, cos) = phi.sin_cos();
            (g - pphi * pphi / r) * cos - pr * pphi * sin
        },
        move |pt| {
            let (r, phi, pr, pphi) = (pt.q1, pt.q2, pt.p1, pt.p2);
            let (sin, cos) = phi.sin_cos();
            [
                (pphi * pphi / (r * r)) * cos,
                -(g - pphi * pphi / r) * sin - pr * pphi * cos,
                -pphi * sin,
                -2.0 * (pphi / r) * cos - pr * sin,
            ]
        },
    )
}

/// Every scalar field of the chart with an exact analytic gradient, for
/// gradient-validation sweeps.
pub fn registered_fields(g: f64, alpha0: f64) -> Vec<ScalarField> {
    let osc = oscillator_m(alpha0);
    let frad = fradkin(alpha0);
    vec![
        hamiltonian(g),
        lambda(),
        angular_momentum(),
        m_r(g).re,
        m_r(g).im,
        n_phi().re,
        n_phi().im,
        j3(g),
        j4(g),
        j34(g).re,
        j34(g).im,
        oscillator_hamiltonian(alpha0),
        osc.re,
        osc.im,
        frad.re,
        frad.im,
    ]
}

// ---------------------------------------------------------------------------
// observables record
// ---------------------------------------------------------------------------

/// All scalar observables of the polar chart evaluated at one point.
#[derive(Debug, Clone, Copy)]
pub struct PolarObservables {
    pub h: f64,
    pub lambda: f64,
    pub m_r: Complex,
    pub n_phi: Complex,
    pub j2: f64,
    pub j34: Complex,
    pub j3: f64,
    pub j4: f64,
    /// `|M_r|^2`, equal to `2 p_phi^2 H + g^2`.
    pub mod_m2: f64,
}

pub fn observables(pt: &PhasePoint, g: f64) -> Result<PolarObservables> {
    check(pt)?;
    let m = m_r(g).eval(pt);
    let n = n_phi().eval(pt);
    let j = m * n.conj();
    Ok(PolarObservables {
        h: hamiltonian(g).eval(pt),
        lambda: lambda().eval(pt),
        m_r: m,
        n_phi: n,
        j2: pt.p2,
        j34: j,
        j3: j.re,
        j4: j.im,
        mod_m2: m.abs_sq(),
    })
}

// ---------------------------------------------------------------------------
// vector fields
// ---------------------------------------------------------------------------

/// The Kepler flow field `Gamma = X_H`.
pub fn gamma_field(g: f64) -> VectorFieldOnChart {
    hamiltonian_vf(&hamiltonian(g))
}

/// `Gamma` evaluated at a point: `(p_r, p_phi/r^2, p_phi^2/r^3 - g/r^2, 0)`.
pub fn gamma_at(pt: &PhasePoint, g: f64) -> Result<Vec4> {
    check(pt)?;
    let (r, pr, pphi) = (pt.q1, pt.p1, pt.p2);
    Ok([
        pr,
        pphi / (r * r),
        (pphi * pphi) / (r * r * r) - g / (r * r),
        0.0,
    ])
}

/// Closed-form Hamiltonian field of `M_r`:
/// `Y_r = p_phi d/dr + (p_r - 2i p_phi/r) d/dphi - i (p_phi^2/r^2) d/dp_r`.
pub fn y_r_field() -> VectorFieldOnChart {
    VectorFieldOnChart::new("Y_r", CHART, |pt| {
        let (r, pr, pphi) = (pt.q1, pt.p1, pt.p2);
        [
            Complex::real(pphi),
            Complex::new(pr, -2.0 * pphi / r),
            Complex::new(0.0, -(pphi * pphi) / (r * r)),
            Complex::real(0.0),
        ]
    })
}

/// Closed-form Hamiltonian field of `N_phi`:
/// `Y_phi = (sin(phi) - i cos(phi)) d/dp_phi`.
pub fn y_phi_field() -> VectorFieldOnChart {
    VectorFieldOnChart::new("Y_phi", CHART, |pt| {
        let (sin, cos) = pt.q2.sin_cos();
        [
            Complex::real(0.0),
            Complex::real(0.0),
            Complex::real(0.0),
            Complex::new(sin, -cos),
        ]
    })
}

/// `Y = conj(N_phi) Y_r`.
pub fn y_field() -> VectorFieldOnChart {
    let n = n_phi();
    y_r_field().scaled_by("Y", move |pt| n.eval(pt).conj())
}

/// `Y' = M_r conj(Y_phi)`.
pub fn y_prime_field(g: f64) -> VectorFieldOnChart {
    let m = m_r(g);
    y_phi_field().conj().scaled_by("Y'", move |pt| m.eval(pt))
}

/// The tabulated kernel and symmetry fields of the chart at one point.
#[derive(Debug, Clone, Copy)]
pub struct PolarYFields {
    pub y_r: CVec4,
    pub y_phi: CVec4,
    pub y: CVec4,
    pub y_prime: CVec4,
    pub y34: CVec4,
    pub y3: Vec4,
    pub y4: Vec4,
    /// Max deviation of the closed-form `Y_r`, `Y_phi` from the Hamiltonian
    /// fields of `M_r`, `N_phi`.
    pub audit_residual: f64,
}

pub fn y_fields(pt: &PhasePoint, g: f64) -> Result<PolarYFields> {
    check(pt)?;
    let y_r = y_r_field().eval(pt);
    let y_phi = y_phi_field().eval(pt);
    let y = y_field().eval(pt);
    let y_prime = y_prime_field(g).eval(pt);
    let y34 = crate::calculus::c4_add(&y, &y_prime);
    let y3 = {
        let v = hamiltonian_vf(&j3(g)).eval(pt);
        [v[0].re, v[1].re, v[2].re, v[3].re]
    };
    let y4 = {
        let v = hamiltonian_vf(&j4(g)).eval(pt);
        [v[0].re, v[1].re, v[2].re, v[3].re]
    };
    let xm = hamiltonian_vf_complex(&m_r(g)).eval(pt);
    let xn = hamiltonian_vf_complex(&n_phi()).eval(pt);
    let mut audit: f64 = 0.0;
    for k in 0..4 {
        audit = audit.max((y_r[k] - xm[k]).abs());
        audit = audit.max((y_phi[k] - xn[k]).abs());
    }
    Ok(PolarYFields {
        y_r,
        y_phi,
        y,
        y_prime,
        y34,
        y3,
        y4,
        audit_residual: audit,
    })
}

// ---------------------------------------------------------------------------
// 2-forms
// ---------------------------------------------------------------------------

/// Closed-form coefficients `(alpha_12, alpha_23, alpha_24)` of `Omega1` on
/// `dr^dphi, dphi^dp_r, dphi^dp_phi`.
pub fn alpha_coeffs(pt: &PhasePoint) -> [f64; 3] {
    let (r, phi, pr, pphi) = (pt.q1, pt.q2, pt.p1, pt.p2);
    let (sin, cos) = phi.sin_cos();
    [
        (pphi * pphi / (r * r)) * cos,
        pphi * sin,
        pr * sin + 2.0 * (pphi / r) * cos,
    ]
}

/// Closed-form coefficients `(beta_12, beta_23, beta_24)` of `Omega2`.
pub fn beta_coeffs(pt: &PhasePoint) -> [f64; 3] {
    let (r, phi, pr, pphi) = (pt.q1, pt.q2, pt.p1, pt.p2);
    let (sin, cos) = phi.sin_cos();
    [
        -(pphi * pphi / (r * r)) * sin,
        pphi * cos,
        pr * cos - 2.0 * (pphi / r) * sin,
    ]
}

fn table_form(name: &str, coeffs: fn(&PhasePoint) -> [f64; 3]) -> TwoFormField {
    TwoFormField::new(name, CHART, move |pt| {
        let [c12, c23, c24] = coeffs(pt);
        // slots: q1q2, q1p1, q1p2, q2p1, q2p2, p1p2
        [
            Complex::real(c12),
            Complex::real(0.0),
            Complex::real(0.0),
            Complex::real(c23),
            Complex::real(c24),
            Complex::real(0.0),
        ]
    })
}

/// `Omega1` assembled from the closed-form alpha table.
pub fn omega1_field() -> TwoFormField {
    table_form("Omega1", alpha_coeffs)
}

/// `Omega2` assembled from the closed-form beta table.
pub fn omega2_field() -> TwoFormField {
    table_form("Omega2", beta_coeffs)
}

/// The complex 2-form `Omega = Omega1 + i Omega2` from the tables.
pub fn omega_field() -> TwoFormField {
    TwoFormField::new("Omega", CHART, |pt| {
        let a = alpha_coeffs(pt);
        let b = beta_coeffs(pt);
        [
            Complex::new(a[0], b[0]),
            Complex::real(0.0),
            Complex::real(0.0),
            Complex::new(a[1], b[1]),
            Complex::new(a[2], b[2]),
            Complex::real(0.0),
        ]
    })
}

/// Ground truth `Omega = dM_r ^ d(conj N_phi)` built from exact gradients.
pub fn omega_wedge_truth(g: f64) -> TwoFormField {
    build_wedge_form(&m_r(g), &n_phi(), true).expect("shared chart")
}

#[derive(Debug, Clone, Copy)]
pub struct PolarForms {
    pub omega: TwoFormValue,
    pub omega1: TwoFormValue,
    pub omega2: TwoFormValue,
    /// Max coefficient deviation of the table-assembled `Omega` from the
    /// wedge-product ground truth.
    pub audit_residual: f64,
}

pub fn forms(pt: &PhasePoint, g: f64) -> Result<PolarForms> {
    check(pt)?;
    let omega = omega_field().value(pt);
    let truth = omega_wedge_truth(g).value(pt);
    Ok(PolarForms {
        omega,
        omega1: omega.re_part(),
        omega2: omega.im_part(),
        audit_residual: omega.sub(&truth).norm(),
    })
}

// ---------------------------------------------------------------------------
// kernel fields
// ---------------------------------------------------------------------------

/// Closed-form kernel fields of `Omega`:
/// `Z1 = (alpha_23 + i beta_23) d/dr + (alpha_12 + i beta_12) d/dp_r`,
/// `Z2 = (alpha_24 + i beta_24) d/dr + (alpha_12 + i beta_12) d/dp_phi`.
pub fn z1_field() -> VectorFieldOnChart {
    VectorFieldOnChart::new("Z1", CHART, |pt| {
        let a = alpha_coeffs(pt);
        let b = beta_coeffs(pt);
        [
            Complex::new(a[1], b[1]),
            Complex::real(0.0),
            Complex::new(a[0], b[0]),
            Complex::real(0.0),
        ]
    })
}

pub fn z2_field() -> VectorFieldOnChart {
    VectorFieldOnChart::new("Z2", CHART, |pt| {
        let a = alpha_coeffs(pt);
        let b = beta_coeffs(pt);
        [
            Complex::new(a[2], b[2]),
            Complex::real(0.0),
            Complex::real(0.0),
            Complex::new(a[0], b[0]),
        ]
    })
}

/// The two closed-form kernel vectors of `Omega` at a point. Errors on the
/// degenerate locus `p_phi = 0`, where the kernel jumps in dimension.
pub fn kernel(pt: &PhasePoint, g: f64) -> Result<(CVec4, CVec4)> {
    check(pt)?;
    let _ = g;
    if pt.p2.abs() < 1e-9 {
        return Err(QbhError::DegenerateLocus(
            "p_phi = 0: Omega drops rank".into(),
        ));
    }
    Ok((z1_field().eval(pt), z2_field().eval(pt)))
}

// ---------------------------------------------------------------------------
// recursion operators
// ---------------------------------------------------------------------------

fn printed_recursion(c: [f64; 3], pt: &PhasePoint) -> MixedTensor {
    let [c12, c23, c24] = c;
    let z = Complex::real(0.0);
    // rows: coefficients of d/dr, d/dphi, d/dp_r, d/dp_phi
    let m = [
        [z, Complex::real(c23), z, z],
        [z, Complex::real(c24), z, z],
        [z, Complex::real(c12), z, z],
        [
            Complex::real(-c12),
            z,
            Complex::real(c23),
            Complex::real(c24),
        ],
    ];
    MixedTensor::new(m, *pt)
}

/// Closed-form `R1` (tensor-product expression in the alpha coefficients).
pub fn tabulated_r1(pt: &PhasePoint) -> MixedTensor {
    printed_recursion(alpha_coeffs(pt), pt)
}

/// Closed-form `R2` (beta coefficients).
pub fn tabulated_r2(pt: &PhasePoint) -> MixedTensor {
    printed_recursion(beta_coeffs(pt), pt)
}

/// `R1` as a tensor field, for torsion evaluation.
pub fn r1_tensor_field() -> TensorField {
    TensorField::from_two_form(&omega1_field())
}

#[derive(Debug, Clone)]
pub struct PolarRecursions {
    pub r1: MixedTensor,
    pub r2: MixedTensor,
    pub spectrum1: SpectrumSummary,
    pub spectrum2: SpectrumSummary,
    /// Max deviation of the closed-form tensors from
    /// `recursion_from_forms(Omega1/Omega2)`.
    pub audit_residual: f64,
}

/// Elementary symmetric functions and eigenvalue estimates of a recursion
/// operator.
#[derive(Debug, Clone)]
pub struct SpectrumSummary {
    pub e: [Complex; 4],
    pub eigenvalues: [Complex; 4],
    pub det: Complex,
}

pub fn spectrum_summary(t: &MixedTensor) -> SpectrumSummary {
    let p = t.char_poly();
    SpectrumSummary {
        e: p.e,
        eigenvalues: p.roots(),
        det: p.e[3],
    }
}

pub fn recursions(pt: &PhasePoint, g: f64) -> Result<PolarRecursions> {
    check(pt)?;
    let _ = g;
    let r1 = tabulated_r1(pt);
    let r2 = tabulated_r2(pt);
    let truth1 = recursion_from_value(&omega1_field().value(pt), pt);
    let truth2 = recursion_from_value(&omega2_field().value(pt), pt);
    let audit = r1.distance(&truth1).max(r2.distance(&truth2));
    Ok(PolarRecursions {
        spectrum1: spectrum_summary(&r1),
        spectrum2: spectrum_summary(&r2),
        r1,
        r2,
        audit_residual: audit,
    })
}

// ---------------------------------------------------------------------------
// isotropic oscillator variant
// ---------------------------------------------------------------------------

/// Isotropic-oscillator Hamiltonian
/// `H = (p_r^2 + p_phi^2/r^2)/2 + alpha0^2 r^2 / 2`.
pub fn oscillator_hamiltonian(alpha0: f64) -> ScalarField {
    ScalarField::new(
        "H_HO",
        CHART,
        move |pt| {
            let (r, pr, pphi) = (pt.q1, pt.p1, pt.p2);
            0.5 * (pr * pr + (pphi * pphi) / (r * r)) + 0.5 * alpha0 * alpha0 * r * r
        },
        move |pt| {
            let (r, pr, pphi) = (pt.q1, pt.p1, pt.p2);
            [
                -(pphi * pphi) / (r * r * r) + alpha0 * alpha0 * r,
                0.0,
                pr,
                pphi / (r * r),
            ]
        },
    )
}

/// Oscillator analogue of the radial observable:
/// `M = 2 p_r p_phi / r + i (p_r^2 - p_phi^2/r^2 + alpha0^2 r^2)`.
/// It rotates at twice the rate: `{M, H_HO} = 2 i lambda M`.
pub fn oscillator_m(alpha0: f64) -> ComplexObservable {
    let re = ScalarField::new(
        "M_HO1",
        CHART,
        |pt| 2.0 * pt.p1 * pt.p2 / pt.q1,
        |pt| {
            let (r, pr, pphi) = (pt.q1, pt.p1, pt.p2);
            [
                -2.0 * pr * pphi / (r * r),
                0.0,
                2.0 * pphi / r,
                2.0 * pr / r,
            ]
        },
    );
    let im = ScalarField::new(
        "M_HO2",
        CHART,
        move |pt| {
            let (r, pr, pphi) = (pt.q1, pt.p1, pt.p2);
            pr * pr - (pphi * pphi) / (r * r) + alpha0 * alpha0 * r * r
        },
        move |pt| {
            let (r, pr, pphi) = (pt.q1, pt.p1, pt.p2);
            [
                2.0 * (pphi * pphi) / (r * r * r) + 2.0 * alpha0 * alpha0 * r,
                0.0,
                2.0 * pr,
                -2.0 * pphi / (r * r),
            ]
        },
    );
    ComplexObservable { re, im }
}

/// The conserved combination `F = M (conj N_phi)^2`, whose real and
/// imaginary parts are components of the Fradkin tensor.
pub fn fradkin(alpha0: f64) -> ComplexObservable {
    let n_conj = n_phi().conj();
    let n2 = n_conj.mul(&n_conj).expect("shared chart");
    oscillator_m(alpha0).mul(&n2).expect("shared chart")
}

#[derive(Debug, Clone, Copy)]
pub struct OscillatorObservables {
    pub h: f64,
    pub m: Complex,
    pub fradkin: Complex,
}

pub fn oscillator_observables(pt: &PhasePoint, alpha0: f64) -> Result<OscillatorObservables> {
    check(pt)?;
    Ok(OscillatorObservables {
        h: oscillator_hamiltonian(alpha0).eval(pt),
        m: oscillator_m(alpha0).eval(pt),
        fradkin: fradkin(alpha0).eval(pt),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{
        c4_norm, c4_scale, c4_sub, interior_product, lie_bracket, poisson_bracket,
        poisson_bracket_mixed, validate_gradient, wedge22,
    };
    use crate::complex::{I, ZERO};
    use crate::linalg::{kernel_basis, kernel_residual};
    use std::f64::consts::FRAC_PI_2;

    fn canonical_pt() -> PhasePoint {
        PhasePoint::polar(1.0, FRAC_PI_2, 0.5, 1.0).unwrap()
    }

    #[test]
    fn observables_on_circular_orbit() {
        let pt = PhasePoint::polar(1.0, 0.0, 0.0, 1.0).unwrap();
        let o = observables(&pt, 1.0).unwrap();
        assert!((o.h + 0.5).abs() < 1e-15);
        assert!(o.m_r.abs() < 1e-15);
        assert!(o.j3.abs() < 1e-15 && o.j4.abs() < 1e-15);
        assert!(o.mod_m2.abs() < 1e-15);
    }

    #[test]
    fn observables_at_canonical_point() {
        let o = observables(&canonical_pt(), 1.0).unwrap();
        assert!((o.h + 0.375).abs() < 1e-15);
        assert!((o.lambda - 1.0).abs() < 1e-15);
        assert!((o.m_r - Complex::real(0.5)).abs() < 1e-15);
        assert!((o.n_phi - I).abs() < 1e-15);
        assert!((o.j34 - Complex::new(0.0, -0.5)).abs() < 1e-15);
        assert!(o.j3.abs() < 1e-15);
        assert!((o.j4 + 0.5).abs() < 1e-15);
        assert!((o.mod_m2 - 0.25).abs() < 1e-15);
    }

    #[test]
    fn modulus_identity_on_unbound_orbit() {
        let pt = PhasePoint::polar(1.0, 0.0, 1.0, 1.0).unwrap();
        let o = observables(&pt, 1.0).unwrap();
        assert!(o.h.abs() < 1e-15);
        assert!((o.m_r - Complex::real(1.0)).abs() < 1e-15);
        assert!((o.n_phi - Complex::real(1.0)).abs() < 1e-15);
        assert!((o.j3 - 1.0).abs() < 1e-15);
        assert!(o.j4.abs() < 1e-15);
        assert!((o.mod_m2 - (2.0 * o.j2 * o.j2 * o.h + 1.0)).abs() < 1e-14);
    }

    #[test]
    fn first_integral_brackets_vanish() {
        let g = 1.0;
        let pt = canonical_pt();
        let h = hamiltonian(g);
        assert!(poisson_bracket(&j3(g), &h, &pt).unwrap().abs() < 1e-14);
        assert!(poisson_bracket(&j4(g), &h, &pt).unwrap().abs() < 1e-14);
        assert!(poisson_bracket(&angular_momentum(), &h, &pt).unwrap().abs() < 1e-15);
    }

    #[test]
    fn bracket_rotation() {
        let g = 1.0;
        let pt = canonical_pt();
        let h = hamiltonian(g);
        let lam = lambda().eval(&pt);
        let m = m_r(g);
        let bm = poisson_bracket_mixed(&m, &h, &pt).unwrap();
        assert!((bm - I.scale(lam) * m.eval(&pt)).abs() < 1e-14);
        let n = n_phi();
        let bn = poisson_bracket_mixed(&n, &h, &pt).unwrap();
        assert!((bn - I.scale(lam) * n.eval(&pt)).abs() < 1e-14);
    }

    #[test]
    fn gamma_matches_printed_components() {
        let pt = canonical_pt();
        let v = gamma_at(&pt, 1.0).unwrap();
        assert_eq!(v, [0.5, 1.0, 0.0, 0.0]);
        let circ = PhasePoint::polar(1.0, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(gamma_at(&circ, 1.0).unwrap(), [0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn hamiltonian_field_of_lambda() {
        // X_lambda at (1, 0, 0, 1): (0, 1/r^2, 2 p_phi/r^3, 0) = (0, 1, 2, 0)
        let pt = PhasePoint::polar(1.0, 0.0, 0.0, 1.0).unwrap();
        let x = hamiltonian_vf(&lambda()).eval(&pt);
        let want = [0.0, 1.0, 2.0, 0.0];
        for (v, w) in x.iter().zip(want) {
            assert!((v.re - w).abs() < 1e-15 && v.im == 0.0, "{x:?}");
        }
    }

    #[test]
    fn hamiltonian_fields_of_commuting_integrals_commute() {
        // [X_f, X_g] = -X_{{f,g}}; with {J3, H} = 0 the bracket field vanishes
        let g = 1.0;
        let pt = canonical_pt();
        let b = lie_bracket(&hamiltonian_vf(&j3(g)), &gamma_field(g), &pt).unwrap();
        assert!(c4_norm(&b) < 1e-6, "norm {}", c4_norm(&b));
    }

    #[test]
    fn gamma_defining_identity_exact() {
        let g = 1.0;
        let pt = canonical_pt();
        let w0 = TwoFormField::canonical(CHART);
        let iv = interior_product(&gamma_field(g), &w0, &pt).unwrap();
        let dh = hamiltonian(g).grad(&pt);
        for k in 0..4 {
            assert_eq!(iv[k].re, dh[k]);
            assert_eq!(iv[k].im, 0.0);
        }
    }

    #[test]
    fn y_fields_printed_expressions() {
        let pt = canonical_pt();
        let yf = y_fields(&pt, 1.0).unwrap();
        // Y_phi at phi = pi/2 is (1 - 0i) d/dp_phi
        assert!((yf.y_phi[3] - Complex::real(1.0)).abs() < 1e-15);
        // Y_r = (1, 0.5 - 2i, -i, 0)
        assert!((yf.y_r[0] - Complex::real(1.0)).abs() < 1e-15);
        assert!((yf.y_r[1] - Complex::new(0.5, -2.0)).abs() < 1e-15);
        assert!((yf.y_r[2] + I).abs() < 1e-15);
        assert_eq!(yf.y_r[3], ZERO);
        // tabulated fields agree with the Hamiltonian-field construction
        assert!(yf.audit_residual < 1e-14);
    }

    #[test]
    fn forms_at_example_points() {
        let f = forms(&canonical_pt(), 1.0).unwrap();
        // (alpha12, alpha23, alpha24) = (0, 1, 0.5)
        assert!(f.omega1.coeffs[0].abs() < 1e-15);
        assert!((f.omega1.coeffs[3] - Complex::real(1.0)).abs() < 1e-15);
        assert!((f.omega1.coeffs[4] - Complex::real(0.5)).abs() < 1e-15);
        assert!(f.audit_residual < 1e-14);

        let pt0 = PhasePoint::polar(1.0, 0.0, 0.5, 1.0).unwrap();
        let f0 = forms(&pt0, 1.0).unwrap();
        // (beta12, beta23, beta24) = (0, 1, 0.5) at phi = 0
        assert!(f0.omega2.coeffs[0].abs() < 1e-15);
        assert!((f0.omega2.coeffs[3] - Complex::real(1.0)).abs() < 1e-15);
        assert!((f0.omega2.coeffs[4] - Complex::real(0.5)).abs() < 1e-15);
    }

    #[test]
    fn omega_wedge_omega_vanishes() {
        let pt = canonical_pt();
        let w = omega_field();
        assert!(wedge22(&w, &w, &pt).unwrap().abs() < 1e-15);
        let w1 = omega1_field();
        let w2 = omega2_field();
        assert!(wedge22(&w1, &w1, &pt).unwrap().abs() < 1e-15);
        assert!(wedge22(&w2, &w2, &pt).unwrap().abs() < 1e-15);
        assert!(wedge22(&w1, &w2, &pt).unwrap().abs() < 1e-15);
    }

    #[test]
    fn kernel_fields_annihilate_omega() {
        let pt = canonical_pt();
        let (z1, z2) = kernel(&pt, 1.0).unwrap();
        // Z1 at the canonical point: (1, 0, -i, 0)
        assert!((z1[0] - Complex::real(1.0)).abs() < 1e-15);
        assert!((z1[2] + I).abs() < 1e-15);
        let w = omega_field().value(&pt);
        assert!(c4_norm(&w.interior(&z1)) < 1e-14 * w.norm().max(1.0));
        assert!(c4_norm(&w.interior(&z2)) < 1e-14 * w.norm().max(1.0));
        // the numerical null space has the same dimension and contains them
        let basis = kernel_basis(&w.matrix(), 1e-9);
        assert_eq!(basis.len(), 2);
        for v in &basis {
            assert!(kernel_residual(&w.matrix(), v) < 1e-12);
        }
    }

    #[test]
    fn kernel_degenerate_locus_rejected() {
        let pt = PhasePoint::polar(1.0, 0.3, 0.5, 0.0).unwrap();
        assert!(matches!(
            kernel(&pt, 1.0),
            Err(QbhError::DegenerateLocus(_))
        ));
    }

    #[test]
    fn recursion_spectrum_pattern() {
        let rec = recursions(&canonical_pt(), 1.0).unwrap();
        assert!(rec.audit_residual < 1e-14);
        // eigenvalues {0, 0, 0.5, 0.5}: e1 = 1, e2 = 0.25, e3 = e4 = 0
        let e = rec.spectrum1.e;
        assert!((e[0] - Complex::real(1.0)).abs() < 1e-14);
        assert!((e[1] - Complex::real(0.25)).abs() < 1e-14);
        assert!(e[2].abs() < 1e-14 && e[3].abs() < 1e-14);
        assert!(rec.spectrum1.det.abs() < 1e-14);
        // double-pair identity e2 = (e1/2)^2
        let d = e[1] - (e[0].scale(0.5)) * (e[0].scale(0.5));
        assert!(d.abs() < 1e-14);
        // eigenvalue estimates cluster on {0, 0.5}
        for z in rec.spectrum1.eigenvalues {
            let d0 = z.abs();
            let d5 = (z - Complex::real(0.5)).abs();
            assert!(d0.min(d5) < 1e-6, "eigenvalue {z:?}");
        }
    }

    #[test]
    fn oscillator_examples() {
        let alpha0 = 1.0;
        let circ = PhasePoint::polar(1.0, 0.0, 0.0, 1.0).unwrap();
        let o = oscillator_observables(&circ, alpha0).unwrap();
        assert!(o.m.abs() < 1e-15);
        assert!(o.fradkin.abs() < 1e-15);

        let pt = PhasePoint::polar(1.0, 0.0, 1.0, 1.0).unwrap();
        let o2 = oscillator_observables(&pt, alpha0).unwrap();
        assert!((o2.m - Complex::new(2.0, 1.0)).abs() < 1e-15);
        assert!((o2.h - 1.5).abs() < 1e-15);
    }

    #[test]
    fn oscillator_double_rotation_rate() {
        let alpha0 = 1.0;
        let pt = canonical_pt();
        let h = oscillator_hamiltonian(alpha0);
        let m = oscillator_m(alpha0);
        let lam = lambda().eval(&pt);
        let b = poisson_bracket_mixed(&m, &h, &pt).unwrap();
        let expect = I.scale(2.0 * lam) * m.eval(&pt);
        assert!((b - expect).abs() < 1e-13);
        // F is conserved
        let f = fradkin(alpha0);
        let bf = Complex::new(
            poisson_bracket(&f.re, &h, &pt).unwrap(),
            poisson_bracket(&f.im, &h, &pt).unwrap(),
        );
        assert!(bf.abs() < 1e-13);
    }

    #[test]
    fn all_gradients_validate() {
        let pt = PhasePoint::polar(2.0, 1.0, 0.3, 0.8).unwrap();
        for f in registered_fields(1.0, 1.0) {
            let res = validate_gradient(&f, &pt).unwrap();
            assert!(res < 1e-6, "{}: {res}", f.name());
        }
    }

    #[test]
    fn j4_sign_convention_consistent_with_split() {
        // i(Gamma) Omega1 = -lambda dJ4 must hold with J4 = Im(J34).
        let g = 1.0;
        let pt = canonical_pt();
        let w1 = omega1_field();
        let iv = interior_product(&gamma_field(g), &w1, &pt).unwrap();
        let lam = lambda().eval(&pt);
        let dj4 = c4_from_real_grad(j4(g).grad(&pt));
        let resid = c4_norm(&c4_sub(&iv, &c4_scale(Complex::real(-lam), &dj4)));
        assert!(resid < 1e-14, "residual {resid}");
    }

    fn c4_from_real_grad(v: Vec4) -> CVec4 {
        crate::calculus::c4_from_real(v)
    }
}
