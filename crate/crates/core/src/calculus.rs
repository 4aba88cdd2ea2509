//! Exterior and Poisson calculus on a 4-dimensional phase-space chart.
//!
//! Everything is specialized to 4-D with the fixed coordinate ordering
//! `(q1, q2, p1, p2)` and orientation `dq1 ^ dq2 ^ dp1 ^ dp2`. Scalar and
//! vector fields carry exact analytic gradients/components; finite
//! differences appear only as a validator ([`validate_gradient`]) and where
//! derivatives of composite objects are needed (Jacobians of vector fields,
//! exterior derivatives of form coefficients, the Cartan formula).
//!
//! The finite-difference scheme is central differences with step
//! `eps^(1/3) * (1 + |x|)`, second order and branch-free.

use crate::charts::{ChartId, PhasePoint};
use crate::complex::{Complex, ONE, ZERO};
use crate::error::{QbhError, Result};
use crate::linalg::MixedTensor;
use std::sync::Arc;

pub type Vec4 = [f64; 4];
pub type CVec4 = [Complex; 4];

/// Index pairs of the six basis 2-forms, in storage order:
/// `dq1^dq2, dq1^dp1, dq1^dp2, dq2^dp1, dq2^dp2, dp1^dp2`.
pub const BASIS_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Index triples of the four basis 3-forms, in storage order.
pub const BASIS_TRIPLES: [(usize, usize, usize); 4] = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)];

fn pair_slot(i: usize, j: usize) -> usize {
    BASIS_PAIRS
        .iter()
        .position(|&(a, b)| (a, b) == (i, j))
        .expect("i < j required")
}

pub(crate) fn fd_step(x: f64) -> f64 {
    f64::EPSILON.cbrt() * (1.0 + x.abs())
}

fn guard(pt: &PhasePoint) -> Result<()> {
    if pt.in_guarded_domain() {
        Ok(())
    } else {
        Err(QbhError::Domain(format!(
            "point {:?} outside guarded domain of {:?}",
            pt.coords(),
            pt.chart
        )))
    }
}

fn same_chart(expected: ChartId, got: ChartId) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(QbhError::ChartMismatch { expected, got })
    }
}

// ---------------------------------------------------------------------------
// small vector helpers
// ---------------------------------------------------------------------------

pub fn c4_zero() -> CVec4 {
    [ZERO; 4]
}

pub fn c4_from_real(v: Vec4) -> CVec4 {
    [
        Complex::real(v[0]),
        Complex::real(v[1]),
        Complex::real(v[2]),
        Complex::real(v[3]),
    ]
}

pub fn c4_add(a: &CVec4, b: &CVec4) -> CVec4 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

pub fn c4_sub(a: &CVec4, b: &CVec4) -> CVec4 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

pub fn c4_scale(s: Complex, a: &CVec4) -> CVec4 {
    [s * a[0], s * a[1], s * a[2], s * a[3]]
}

/// Max-modulus norm.
pub fn c4_norm(a: &CVec4) -> f64 {
    a.iter().map(|z| z.abs()).fold(0.0, f64::max)
}

pub fn c4_conj(a: &CVec4) -> CVec4 {
    [a[0].conj(), a[1].conj(), a[2].conj(), a[3].conj()]
}

// ---------------------------------------------------------------------------
// fields
// ---------------------------------------------------------------------------

type ScalarFn = Arc<dyn Fn(&PhasePoint) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&PhasePoint) -> Vec4 + Send + Sync>;

/// A named scalar function on a chart with an exact analytic gradient.
#[derive(Clone)]
pub struct ScalarField {
    name: String,
    chart: ChartId,
    eval: ScalarFn,
    grad: GradFn,
}

impl ScalarField {
    pub fn new(
        name: impl Into<String>,
        chart: ChartId,
        eval: impl Fn(&PhasePoint) -> f64 + Send + Sync + 'static,
        grad: impl Fn(&PhasePoint) -> Vec4 + Send + Sync + 'static,
    ) -> Self {
        ScalarField {
            name: name.into(),
            chart,
            eval: Arc::new(eval),
            grad: Arc::new(grad),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn chart(&self) -> ChartId {
        self.chart
    }

    pub fn eval(&self, pt: &PhasePoint) -> f64 {
        (self.eval)(pt)
    }

    pub fn grad(&self, pt: &PhasePoint) -> Vec4 {
        (self.grad)(pt)
    }

    pub fn constant(chart: ChartId, value: f64) -> Self {
        ScalarField::new(format!("{value}"), chart, move |_| value, |_| [0.0; 4])
    }

    /// Same field under a different display name (monitor columns, reports).
    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// The k-th coordinate function.
    pub fn coordinate(chart: ChartId, k: usize) -> Self {
        let names = ["q1", "q2", "p1", "p2"];
        ScalarField::new(
            names[k],
            chart,
            move |pt| pt.coords()[k],
            move |_| {
                let mut g = [0.0; 4];
                g[k] = 1.0;
                g
            },
        )
    }

    pub fn neg(&self) -> Self {
        let e = self.eval.clone();
        let g = self.grad.clone();
        ScalarField::new(
            format!("-{}", self.name),
            self.chart,
            move |pt| -e(pt),
            move |pt| {
                let v = g(pt);
                [-v[0], -v[1], -v[2], -v[3]]
            },
        )
    }

    /// Pointwise product with exact product-rule gradient.
    pub fn mul(&self, other: &ScalarField) -> Result<Self> {
        same_chart(self.chart, other.chart)?;
        let (ea, ga) = (self.eval.clone(), self.grad.clone());
        let (eb, gb) = (other.eval.clone(), other.grad.clone());
        let (ea2, eb2) = (ea.clone(), eb.clone());
        Ok(ScalarField::new(
            format!("({})*({})", self.name, other.name),
            self.chart,
            move |pt| ea2(pt) * eb2(pt),
            move |pt| {
                let (a, b) = (ea(pt), eb(pt));
                let (da, db) = (ga(pt), gb(pt));
                [
                    a * db[0] + b * da[0],
                    a * db[1] + b * da[1],
                    a * db[2] + b * da[2],
                    a * db[3] + b * da[3],
                ]
            },
        ))
    }
}

/// A complex observable: a pair of scalar fields on the same chart.
#[derive(Clone)]
pub struct ComplexObservable {
    pub re: ScalarField,
    pub im: ScalarField,
}

impl ComplexObservable {
    pub fn from_parts(re: ScalarField, im: ScalarField) -> Result<Self> {
        same_chart(re.chart(), im.chart())?;
        Ok(ComplexObservable { re, im })
    }

    pub fn from_real(f: ScalarField) -> Self {
        let im = ScalarField::constant(f.chart(), 0.0);
        ComplexObservable { re: f, im }
    }

    pub fn chart(&self) -> ChartId {
        self.re.chart()
    }

    pub fn name(&self) -> String {
        format!("{}+i*{}", self.re.name(), self.im.name())
    }

    pub fn eval(&self, pt: &PhasePoint) -> Complex {
        Complex::new(self.re.eval(pt), self.im.eval(pt))
    }

    pub fn grad(&self, pt: &PhasePoint) -> CVec4 {
        let gr = self.re.grad(pt);
        let gi = self.im.grad(pt);
        [
            Complex::new(gr[0], gi[0]),
            Complex::new(gr[1], gi[1]),
            Complex::new(gr[2], gi[2]),
            Complex::new(gr[3], gi[3]),
        ]
    }

    pub fn conj(&self) -> Self {
        ComplexObservable {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    /// Complex product with product-rule gradients.
    pub fn mul(&self, other: &ComplexObservable) -> Result<Self> {
        same_chart(self.chart(), other.chart())?;
        let a = self.clone();
        let b = other.clone();
        let chart = self.chart();
        let prod = move |pt: &PhasePoint| a.eval(pt) * b.eval(pt);
        let a2 = self.clone();
        let b2 = other.clone();
        let dprod = move |pt: &PhasePoint| {
            let (fa, fb) = (a2.eval(pt), b2.eval(pt));
            let (da, db) = (a2.grad(pt), b2.grad(pt));
            [
                fa * db[0] + fb * da[0],
                fa * db[1] + fb * da[1],
                fa * db[2] + fb * da[2],
                fa * db[3] + fb * da[3],
            ]
        };
        let prod2 = prod.clone();
        let dprod2 = dprod.clone();
        let name = format!("({})*({})", self.name(), other.name());
        Ok(ComplexObservable {
            re: ScalarField::new(
                format!("Re{name}"),
                chart,
                move |pt| prod(pt).re,
                move |pt| {
                    let d = dprod(pt);
                    [d[0].re, d[1].re, d[2].re, d[3].re]
                },
            ),
            im: ScalarField::new(
                format!("Im{name}"),
                chart,
                move |pt| prod2(pt).im,
                move |pt| {
                    let d = dprod2(pt);
                    [d[0].im, d[1].im, d[2].im, d[3].im]
                },
            ),
        })
    }
}

type FieldFn = Arc<dyn Fn(&PhasePoint) -> CVec4 + Send + Sync>;

/// A (possibly complex) vector field on a chart. Components are on the basis
/// `d/dq1, d/dq2, d/dp1, d/dp2`; real fields simply have vanishing imaginary
/// parts.
#[derive(Clone)]
pub struct VectorFieldOnChart {
    name: String,
    chart: ChartId,
    eval: FieldFn,
}

impl VectorFieldOnChart {
    pub fn new(
        name: impl Into<String>,
        chart: ChartId,
        eval: impl Fn(&PhasePoint) -> CVec4 + Send + Sync + 'static,
    ) -> Self {
        VectorFieldOnChart {
            name: name.into(),
            chart,
            eval: Arc::new(eval),
        }
    }

    pub fn from_real(
        name: impl Into<String>,
        chart: ChartId,
        eval: impl Fn(&PhasePoint) -> Vec4 + Send + Sync + 'static,
    ) -> Self {
        VectorFieldOnChart::new(name, chart, move |pt| c4_from_real(eval(pt)))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn chart(&self) -> ChartId {
        self.chart
    }

    pub fn eval(&self, pt: &PhasePoint) -> CVec4 {
        (self.eval)(pt)
    }

    /// Pointwise multiplication by a complex-valued function.
    pub fn scaled_by(
        &self,
        name: impl Into<String>,
        factor: impl Fn(&PhasePoint) -> Complex + Send + Sync + 'static,
    ) -> Self {
        let inner = self.eval.clone();
        VectorFieldOnChart::new(name, self.chart, move |pt| c4_scale(factor(pt), &inner(pt)))
    }

    pub fn add(&self, other: &VectorFieldOnChart) -> Result<Self> {
        same_chart(self.chart, other.chart)?;
        let (a, b) = (self.eval.clone(), other.eval.clone());
        Ok(VectorFieldOnChart::new(
            format!("{}+{}", self.name, other.name),
            self.chart,
            move |pt| c4_add(&a(pt), &b(pt)),
        ))
    }

    /// Complex conjugate of the component functions.
    pub fn conj(&self) -> Self {
        let inner = self.eval.clone();
        VectorFieldOnChart::new(format!("conj({})", self.name), self.chart, move |pt| {
            c4_conj(&inner(pt))
        })
    }
}

type CoeffFn = Arc<dyn Fn(&PhasePoint) -> [Complex; 6] + Send + Sync>;

/// A 2-form on a chart, stored as six coefficient functions on the basis
/// 2-forms listed in [`BASIS_PAIRS`].
#[derive(Clone)]
pub struct TwoFormField {
    name: String,
    chart: ChartId,
    coeffs: CoeffFn,
}

impl TwoFormField {
    pub fn new(
        name: impl Into<String>,
        chart: ChartId,
        coeffs: impl Fn(&PhasePoint) -> [Complex; 6] + Send + Sync + 'static,
    ) -> Self {
        TwoFormField {
            name: name.into(),
            chart,
            coeffs: Arc::new(coeffs),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn chart(&self) -> ChartId {
        self.chart
    }

    pub fn value(&self, pt: &PhasePoint) -> TwoFormValue {
        TwoFormValue {
            coeffs: (self.coeffs)(pt),
        }
    }

    /// The canonical symplectic form `dq1^dp1 + dq2^dp2`.
    pub fn canonical(chart: ChartId) -> Self {
        TwoFormField::new("omega0", chart, |_| [ZERO, ONE, ZERO, ZERO, ONE, ZERO])
    }

    pub fn re(&self) -> Self {
        let c = self.coeffs.clone();
        TwoFormField::new(format!("Re({})", self.name), self.chart, move |pt| {
            c(pt).map(|z| Complex::real(z.re))
        })
    }

    pub fn im(&self) -> Self {
        let c = self.coeffs.clone();
        TwoFormField::new(format!("Im({})", self.name), self.chart, move |pt| {
            c(pt).map(|z| Complex::real(z.im))
        })
    }
}

/// A 2-form evaluated at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoFormValue {
    pub coeffs: [Complex; 6],
}

impl TwoFormValue {
    pub fn zero() -> Self {
        TwoFormValue { coeffs: [ZERO; 6] }
    }

    pub fn canonical() -> Self {
        TwoFormValue {
            coeffs: [ZERO, ONE, ZERO, ZERO, ONE, ZERO],
        }
    }

    pub fn from_coeffs(coeffs: [Complex; 6]) -> Self {
        TwoFormValue { coeffs }
    }

    /// The antisymmetric matrix `A` with `W(X, Y) = X^T A Y`.
    pub fn matrix(&self) -> [[Complex; 4]; 4] {
        let mut m = [[ZERO; 4]; 4];
        for (slot, &(i, j)) in BASIS_PAIRS.iter().enumerate() {
            m[i][j] = self.coeffs[slot];
            m[j][i] = -self.coeffs[slot];
        }
        m
    }

    pub fn from_matrix(m: &[[Complex; 4]; 4]) -> Self {
        let mut coeffs = [ZERO; 6];
        for (slot, &(i, j)) in BASIS_PAIRS.iter().enumerate() {
            coeffs[slot] = m[i][j];
        }
        TwoFormValue { coeffs }
    }

    /// Interior product: the covector `v -> W(x, v)`.
    pub fn interior(&self, x: &CVec4) -> CVec4 {
        let m = self.matrix();
        let mut out = c4_zero();
        for (j, o) in out.iter_mut().enumerate() {
            for i in 0..4 {
                *o += x[i] * m[i][j];
            }
        }
        out
    }

    /// Evaluate `W(x, y)`.
    pub fn apply(&self, x: &CVec4, y: &CVec4) -> Complex {
        let ix = self.interior(x);
        ix[0] * y[0] + ix[1] * y[1] + ix[2] * y[2] + ix[3] * y[3]
    }

    /// Coefficient of `W1 ^ W2` on the orientation `dq1^dq2^dp1^dp2`.
    ///
    /// Terms are paired symmetrically so the exchange `W1 <-> W2` is exact
    /// at the floating-point level.
    pub fn wedge22(&self, other: &TwoFormValue) -> Complex {
        let a = &self.coeffs;
        let b = &other.coeffs;
        // complementary pairs: (q1q2, p1p2) +, (q1p1, q2p2) -, (q1p2, q2p1) +
        let t1 = a[0] * b[5] + a[5] * b[0];
        let t2 = a[1] * b[4] + a[4] * b[1];
        let t3 = a[2] * b[3] + a[3] * b[2];
        t1 - t2 + t3
    }

    /// Max coefficient modulus.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|z| z.abs()).fold(0.0, f64::max)
    }

    pub fn add(&self, other: &TwoFormValue) -> TwoFormValue {
        let mut coeffs = [ZERO; 6];
        for (k, c) in coeffs.iter_mut().enumerate() {
            *c = self.coeffs[k] + other.coeffs[k];
        }
        TwoFormValue { coeffs }
    }

    pub fn sub(&self, other: &TwoFormValue) -> TwoFormValue {
        let mut coeffs = [ZERO; 6];
        for (k, c) in coeffs.iter_mut().enumerate() {
            *c = self.coeffs[k] - other.coeffs[k];
        }
        TwoFormValue { coeffs }
    }

    pub fn scale(&self, s: Complex) -> TwoFormValue {
        TwoFormValue {
            coeffs: self.coeffs.map(|c| s * c),
        }
    }

    pub fn re_part(&self) -> TwoFormValue {
        TwoFormValue {
            coeffs: self.coeffs.map(|c| Complex::real(c.re)),
        }
    }

    pub fn im_part(&self) -> TwoFormValue {
        TwoFormValue {
            coeffs: self.coeffs.map(|c| Complex::real(c.im)),
        }
    }
}

// ---------------------------------------------------------------------------
// finite differences
// ---------------------------------------------------------------------------

/// Central finite-difference partial derivative of a scalar function.
pub fn fd_partial_scalar(f: &dyn Fn(&PhasePoint) -> f64, pt: &PhasePoint, k: usize) -> f64 {
    let x = pt.coords()[k];
    let h = fd_step(x);
    let (xp, xm) = (x + h, x - h);
    (f(&pt.with_coord(k, xp)) - f(&pt.with_coord(k, xm))) / (xp - xm)
}

/// Finite-difference gradient of a scalar function.
pub fn fd_grad(f: &dyn Fn(&PhasePoint) -> f64, pt: &PhasePoint) -> Vec4 {
    [
        fd_partial_scalar(f, pt, 0),
        fd_partial_scalar(f, pt, 1),
        fd_partial_scalar(f, pt, 2),
        fd_partial_scalar(f, pt, 3),
    ]
}

fn fd_partial_cvec(f: &dyn Fn(&PhasePoint) -> CVec4, pt: &PhasePoint, k: usize) -> CVec4 {
    let x = pt.coords()[k];
    let h = fd_step(x);
    let (xp, xm) = (x + h, x - h);
    let denom = Complex::real(xp - xm);
    let fp = f(&pt.with_coord(k, xp));
    let fm = f(&pt.with_coord(k, xm));
    [
        (fp[0] - fm[0]) / denom,
        (fp[1] - fm[1]) / denom,
        (fp[2] - fm[2]) / denom,
        (fp[3] - fm[3]) / denom,
    ]
}

/// Jacobian `D[i][k] = d X_i / d x_k` of a vector field, by central differences.
pub fn fd_jacobian(x: &VectorFieldOnChart, pt: &PhasePoint) -> [[Complex; 4]; 4] {
    let mut jac = [[ZERO; 4]; 4];
    for k in 0..4 {
        let col = fd_partial_cvec(&|q| x.eval(q), pt, k);
        for i in 0..4 {
            jac[i][k] = col[i];
        }
    }
    jac
}

// ---------------------------------------------------------------------------
// operations
// ---------------------------------------------------------------------------

/// Canonical Poisson bracket from exact gradients:
/// `{f, g} = sum_j (df/dq_j dg/dp_j - df/dp_j dg/dq_j)`.
pub fn poisson_bracket(f: &ScalarField, g: &ScalarField, pt: &PhasePoint) -> Result<f64> {
    same_chart(f.chart(), g.chart())?;
    same_chart(f.chart(), pt.chart)?;
    let a = f.grad(pt);
    let b = g.grad(pt);
    Ok((a[0] * b[2] - a[2] * b[0]) + (a[1] * b[3] - a[3] * b[1]))
}

/// Bilinear extension of the bracket to complex observables.
pub fn poisson_bracket_complex(
    f: &ComplexObservable,
    g: &ComplexObservable,
    pt: &PhasePoint,
) -> Result<Complex> {
    same_chart(f.chart(), g.chart())?;
    same_chart(f.chart(), pt.chart)?;
    let a = f.grad(pt);
    let b = g.grad(pt);
    Ok((a[0] * b[2] - a[2] * b[0]) + (a[1] * b[3] - a[3] * b[1]))
}

/// Bracket of a complex observable with a real scalar field.
pub fn poisson_bracket_mixed(
    f: &ComplexObservable,
    g: &ScalarField,
    pt: &PhasePoint,
) -> Result<Complex> {
    Ok(Complex::new(
        poisson_bracket(&f.re, g, pt)?,
        poisson_bracket(&f.im, g, pt)?,
    ))
}

/// The Hamiltonian vector field `X_f` with `i(X_f) omega0 = df`:
/// components `(df/dp1, df/dp2, -df/dq1, -df/dq2)`.
pub fn hamiltonian_vf(f: &ScalarField) -> VectorFieldOnChart {
    let g = f.clone();
    VectorFieldOnChart::from_real(format!("X_{}", f.name()), f.chart(), move |pt| {
        let d = g.grad(pt);
        [d[2], d[3], -d[0], -d[1]]
    })
}

/// Hamiltonian vector field of a complex observable (componentwise).
pub fn hamiltonian_vf_complex(f: &ComplexObservable) -> VectorFieldOnChart {
    let g = f.clone();
    VectorFieldOnChart::new(format!("X_{}", f.name()), f.chart(), move |pt| {
        let d = g.grad(pt);
        [d[2], d[3], -d[0], -d[1]]
    })
}

/// The 2-form `dF ^ dG*` (or `dF ^ dG` with `conjugate_second = false`),
/// with coefficients computed from exact gradients. This is the ground-truth
/// constructor against which closed-form coefficient tables are audited.
pub fn build_wedge_form(
    f: &ComplexObservable,
    g: &ComplexObservable,
    conjugate_second: bool,
) -> Result<TwoFormField> {
    same_chart(f.chart(), g.chart())?;
    let f = f.clone();
    let g = if conjugate_second {
        g.conj()
    } else {
        g.clone()
    };
    let name = format!("d({}) ^ d({})", f.name(), g.name());
    let chart = f.chart();
    Ok(TwoFormField::new(name, chart, move |pt| {
        let df = f.grad(pt);
        let dg = g.grad(pt);
        let mut coeffs = [ZERO; 6];
        for (slot, &(i, j)) in BASIS_PAIRS.iter().enumerate() {
            coeffs[slot] = df[i] * dg[j] - df[j] * dg[i];
        }
        coeffs
    }))
}

/// Interior product `i(X) W` at a point, as a 4-covector.
pub fn interior_product(
    x: &VectorFieldOnChart,
    w: &TwoFormField,
    pt: &PhasePoint,
) -> Result<CVec4> {
    same_chart(x.chart(), w.chart())?;
    same_chart(x.chart(), pt.chart)?;
    Ok(w.value(pt).interior(&x.eval(pt)))
}

/// Exterior derivative of a 2-form at a point: the four components of `dW`
/// on the basis 3-forms of [`BASIS_TRIPLES`], using central differences of
/// the six coefficients.
pub fn exterior_derivative(w: &TwoFormField, pt: &PhasePoint) -> Result<[Complex; 4]> {
    same_chart(w.chart(), pt.chart)?;
    guard(pt)?;
    // partials[k][slot] = d coeff_slot / d x_k
    let mut partials = [[ZERO; 6]; 4];
    for (k, row) in partials.iter_mut().enumerate() {
        let x = pt.coords()[k];
        let h = fd_step(x);
        let (xp, xm) = (x + h, x - h);
        let cp = w.value(&pt.with_coord(k, xp)).coeffs;
        let cm = w.value(&pt.with_coord(k, xm)).coeffs;
        let denom = Complex::real(xp - xm);
        for slot in 0..6 {
            row[slot] = (cp[slot] - cm[slot]) / denom;
        }
    }
    let mut out = [ZERO; 4];
    for (t, &(a, b, c)) in BASIS_TRIPLES.iter().enumerate() {
        out[t] = partials[a][pair_slot(b, c)] - partials[b][pair_slot(a, c)]
            + partials[c][pair_slot(a, b)];
    }
    Ok(out)
}

/// Coefficient of `W1 ^ W2` on the fixed orientation, at a point.
pub fn wedge22(w1: &TwoFormField, w2: &TwoFormField, pt: &PhasePoint) -> Result<Complex> {
    same_chart(w1.chart(), w2.chart())?;
    same_chart(w1.chart(), pt.chart)?;
    Ok(w1.value(pt).wedge22(&w2.value(pt)))
}

/// Lie bracket `[X, Y] = (DY) X - (DX) Y` with finite-difference Jacobians.
pub fn lie_bracket(
    x: &VectorFieldOnChart,
    y: &VectorFieldOnChart,
    pt: &PhasePoint,
) -> Result<CVec4> {
    same_chart(x.chart(), y.chart())?;
    same_chart(x.chart(), pt.chart)?;
    guard(pt)?;
    let dx = fd_jacobian(x, pt);
    let dy = fd_jacobian(y, pt);
    let xv = x.eval(pt);
    let yv = y.eval(pt);
    let mut out = c4_zero();
    for (i, o) in out.iter_mut().enumerate() {
        for k in 0..4 {
            *o += dy[i][k] * xv[k] - dx[i][k] * yv[k];
        }
    }
    Ok(out)
}

/// Interior product of a vector with a 3-form given by its components on
/// [`BASIS_TRIPLES`]; the result is a 2-form value.
fn interior_3form(x: &CVec4, t: &[Complex; 4]) -> TwoFormValue {
    let mut coeffs = [ZERO; 6];
    for (ti, &(a, b, c)) in BASIS_TRIPLES.iter().enumerate() {
        coeffs[pair_slot(b, c)] += x[a] * t[ti];
        coeffs[pair_slot(a, c)] += -x[b] * t[ti];
        coeffs[pair_slot(a, b)] += x[c] * t[ti];
    }
    TwoFormValue { coeffs }
}

/// Lie derivative of a 2-form along a vector field by the Cartan formula
/// `L_X W = i_X(dW) + d(i_X W)`; the outer `d` of the contracted 1-form is
/// evaluated by finite differences.
pub fn lie_derivative_2form(
    x: &VectorFieldOnChart,
    w: &TwoFormField,
    pt: &PhasePoint,
) -> Result<TwoFormValue> {
    same_chart(x.chart(), w.chart())?;
    same_chart(x.chart(), pt.chart)?;
    guard(pt)?;
    let dw = exterior_derivative(w, pt)?;
    let term1 = interior_3form(&x.eval(pt), &dw);

    // theta = i_X W as a covector field; d theta by central differences.
    let theta = |q: &PhasePoint| w.value(q).interior(&x.eval(q));
    let mut dtheta = [[ZERO; 4]; 4]; // dtheta[k][j] = d theta_j / d x_k
    for (k, row) in dtheta.iter_mut().enumerate() {
        *row = fd_partial_cvec(&theta, pt, k);
    }
    let mut coeffs = [ZERO; 6];
    for (slot, &(i, j)) in BASIS_PAIRS.iter().enumerate() {
        coeffs[slot] = dtheta[i][j] - dtheta[j][i];
    }
    Ok(term1.add(&TwoFormValue { coeffs }))
}

/// The (1,1) tensor `R = omega0_hat^{-1} o W_hat`, satisfying
/// `W(X, Y) = omega0(R X, Y)` for all `X, Y`.
pub fn recursion_from_forms(w: &TwoFormField, pt: &PhasePoint) -> Result<MixedTensor> {
    same_chart(w.chart(), pt.chart)?;
    Ok(recursion_from_value(&w.value(pt), pt))
}

/// As [`recursion_from_forms`], from an already-evaluated 2-form.
pub fn recursion_from_value(w: &TwoFormValue, pt: &PhasePoint) -> MixedTensor {
    // With A0 the canonical matrix, A0^{-1} = -A0, so R = -A0 * A_W: rows
    // (0,1,2,3) of R are rows (-2, -3, +0, +1) of A_W.
    let a = w.matrix();
    let mut m = [[ZERO; 4]; 4];
    for j in 0..4 {
        m[0][j] = -a[2][j];
        m[1][j] = -a[3][j];
        m[2][j] = a[0][j];
        m[3][j] = a[1][j];
    }
    MixedTensor { m, point: *pt }
}

/// A point-dependent (1,1) tensor, e.g. a recursion operator as a field.
type TensorFn = Arc<dyn Fn(&PhasePoint) -> [[Complex; 4]; 4] + Send + Sync>;

#[derive(Clone)]
pub struct TensorField {
    name: String,
    chart: ChartId,
    eval: TensorFn,
}

impl TensorField {
    pub fn new(
        name: impl Into<String>,
        chart: ChartId,
        eval: impl Fn(&PhasePoint) -> [[Complex; 4]; 4] + Send + Sync + 'static,
    ) -> Self {
        TensorField {
            name: name.into(),
            chart,
            eval: Arc::new(eval),
        }
    }

    /// Tensor field evaluating a 2-form field through `recursion_from_value`.
    pub fn from_two_form(w: &TwoFormField) -> Self {
        let w2 = w.clone();
        TensorField::new(format!("R[{}]", w.name()), w.chart(), move |pt| {
            recursion_from_value(&w2.value(pt), pt).m
        })
    }

    pub fn identity(chart: ChartId) -> Self {
        TensorField::new("id", chart, |_| {
            let mut m = [[ZERO; 4]; 4];
            for (i, row) in m.iter_mut().enumerate() {
                row[i] = ONE;
            }
            m
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn chart(&self) -> ChartId {
        self.chart
    }

    pub fn eval(&self, pt: &PhasePoint) -> [[Complex; 4]; 4] {
        (self.eval)(pt)
    }

    /// The vector field `pt -> R(pt) X(pt)`.
    pub fn apply_field(&self, x: &VectorFieldOnChart) -> VectorFieldOnChart {
        let r = self.clone();
        let xf = x.clone();
        VectorFieldOnChart::new(
            format!("{}({})", self.name, x.name()),
            self.chart,
            move |pt| mat_vec(&r.eval(pt), &xf.eval(pt)),
        )
    }
}

pub(crate) fn mat_vec(m: &[[Complex; 4]; 4], v: &CVec4) -> CVec4 {
    let mut out = c4_zero();
    for (i, o) in out.iter_mut().enumerate() {
        for k in 0..4 {
            *o += m[i][k] * v[k];
        }
    }
    out
}

/// Nijenhuis torsion of a tensor field:
/// `N_R(X,Y) = R^2 [X,Y] + [RX, RY] - R [RX, Y] - R [X, RY]`,
/// with all four brackets evaluated by [`lie_bracket`].
pub fn nijenhuis_torsion(
    r: &TensorField,
    x: &VectorFieldOnChart,
    y: &VectorFieldOnChart,
    pt: &PhasePoint,
) -> Result<CVec4> {
    same_chart(r.chart(), x.chart())?;
    same_chart(r.chart(), y.chart())?;
    same_chart(r.chart(), pt.chart)?;
    guard(pt)?;
    let rx = r.apply_field(x);
    let ry = r.apply_field(y);
    let b_xy = lie_bracket(x, y, pt)?;
    let b_rxry = lie_bracket(&rx, &ry, pt)?;
    let b_rxy = lie_bracket(&rx, y, pt)?;
    let b_xry = lie_bracket(x, &ry, pt)?;
    let rm = r.eval(pt);
    let term1 = mat_vec(&rm, &mat_vec(&rm, &b_xy));
    let term3 = mat_vec(&rm, &b_rxy);
    let term4 = mat_vec(&rm, &b_xry);
    Ok(c4_sub(&c4_sub(&c4_add(&term1, &b_rxry), &term3), &term4))
}

/// Max relative deviation between the analytic gradient and the
/// finite-difference gradient of a scalar field.
pub fn validate_gradient(f: &ScalarField, pt: &PhasePoint) -> Result<f64> {
    same_chart(f.chart(), pt.chart)?;
    guard(pt)?;
    let analytic = f.grad(pt);
    let numeric = fd_grad(&|q| f.eval(q), pt);
    let mut worst = 0.0f64;
    for k in 0..4 {
        let denom = 1.0 + analytic[k].abs();
        worst = worst.max((analytic[k] - numeric[k]).abs() / denom);
    }
    Ok(worst)
}
