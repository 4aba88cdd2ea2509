//! Numerical geometric mechanics for the planar Kepler problem.
//!
//! The library implements, at machine precision, the structures that make
//! the two-dimensional Kepler problem superintegrable and quasi-bi-
//! Hamiltonian: complex observables that rotate uniformly under the flow,
//! the complex 2-forms built from their wedge products, the degenerate
//! recursion operators those forms induce, and the kernel distributions of
//! the forms — in both the polar and the parabolic chart.
//!
//! Every identity is verified two ways wherever possible: closed-form
//! tabulated expressions are evaluated verbatim and audited against an
//! independent construction from exact analytic gradients (wedge products,
//! Hamiltonian vector fields, `recursion_from_forms`). Where the two routes
//! disagree, the audit reports the discrepancy rather than correcting it;
//! the adjudication record is part of the library's output.
//!
//! Module map:
//! - [`charts`]: coordinate charts, cotangent lifts, point transport and
//!   the coupling-constant convention map.
//! - [`calculus`]: exterior and Poisson calculus specialized to 4-D phase
//!   space; exact gradients everywhere, finite differences only as a
//!   validator and for derivatives of composite objects.
//! - [`linalg`]: 4x4 complex kernels — characteristic polynomials
//!   (Faddeev-LeVerrier), eigenvalue estimates, null spaces.
//! - [`kepler_polar`], [`kepler_parabolic`]: the chart-specific
//!   observables, fields, forms and recursion operators, plus the
//!   isotropic-oscillator variant on the polar chart.
//! - [`flow`]: implicit-midpoint (symplectic) and RK4 integration with
//!   invariant monitoring.
//! - [`verify`]: the deterministic, seeded property-suite engine and the
//!   registry of every verified identity.

// Index loops over fixed 4x4 matrices are kept explicit throughout.
#![allow(clippy::needless_range_loop)]

pub mod calculus;
pub mod charts;
pub mod complex;
pub mod error;
pub mod flow;
pub mod kepler_parabolic;
pub mod kepler_polar;
pub mod linalg;
pub mod rng;
pub mod verify;
