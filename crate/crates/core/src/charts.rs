//! Coordinate charts on the plane, their cotangent lifts, and point transport.
//!
//! Three charts are supported: Cartesian `(x, y)`, polar `(r, phi)` and
//! parabolic `(a, b)` with `x = (a^2 - b^2)/2`, `y = a*b`. Momenta transform
//! by the cotangent lift, so transport is a canonical transformation and all
//! Poisson-bracket structure is preserved exactly.
//!
//! The two curvilinear charts carry independent Kepler coupling conventions:
//! the potential is `-g/r` in polar and `-g/(a^2+b^2)` in parabolic. Since
//! `r = (a^2+b^2)/2`, the same physical system has `g_parabolic = 2*g_polar`;
//! [`map_coupling`] is the only place this factor appears.

use crate::error::{QbhError, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Radial guard: points with `r` (polar) or `a^2+b^2` (parabolic) below this
/// are rejected, since the potential and the integrating factor blow up there.
pub const DOMAIN_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChartId {
    Cartesian,
    Polar,
    Parabolic,
}

impl ChartId {
    pub fn name(self) -> &'static str {
        match self {
            ChartId::Cartesian => "cartesian",
            ChartId::Polar => "polar",
            ChartId::Parabolic => "parabolic",
        }
    }
}

impl std::str::FromStr for ChartId {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "cartesian" => Ok(ChartId::Cartesian),
            "polar" => Ok(ChartId::Polar),
            "parabolic" => Ok(ChartId::Parabolic),
            other => Err(format!("unknown chart '{other}'")),
        }
    }
}

/// A point of phase space: a chart tag plus canonical coordinates
/// `(q1, q2, p1, p2)` in the fixed ordering used everywhere in the library.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub chart: ChartId,
    pub q1: f64,
    pub q2: f64,
    pub p1: f64,
    pub p2: f64,
}

/// Validated coupling constants: the Kepler coupling `g` in the active
/// chart's convention, and the oscillator frequency `alpha0` used only by
/// the isotropic-oscillator variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingConstants {
    g: f64,
    alpha0: f64,
}

impl CouplingConstants {
    pub fn new(g: f64, alpha0: f64) -> Result<Self> {
        if !(g.is_finite() && g > 0.0) {
            return Err(QbhError::Domain(format!(
                "coupling g = {g} must be positive"
            )));
        }
        if !(alpha0.is_finite() && alpha0 > 0.0) {
            return Err(QbhError::Domain(format!(
                "oscillator frequency alpha0 = {alpha0} must be positive"
            )));
        }
        Ok(CouplingConstants { g, alpha0 })
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    /// The same physical system expressed in another chart's convention.
    pub fn in_chart(&self, from: ChartId, to: ChartId) -> Self {
        CouplingConstants {
            g: map_coupling(self.g, from, to),
            alpha0: self.alpha0,
        }
    }
}

impl PhasePoint {
    /// Validating constructor. Normalizes polar `phi` into `[0, 2pi)` and
    /// enforces finiteness and the radial guard.
    pub fn new(chart: ChartId, coords: [f64; 4]) -> Result<Self> {
        let [q1, q2, p1, p2] = coords;
        if !coords.iter().all(|c| c.is_finite()) {
            return Err(QbhError::Domain(format!(
                "non-finite coordinates {coords:?}"
            )));
        }
        match chart {
            ChartId::Cartesian => Ok(PhasePoint {
                chart,
                q1,
                q2,
                p1,
                p2,
            }),
            ChartId::Polar => {
                if q1 < DOMAIN_GUARD {
                    return Err(QbhError::Domain(format!("polar r = {q1} below guard")));
                }
                Ok(PhasePoint {
                    chart,
                    q1,
                    q2: normalize_angle(q2),
                    p1,
                    p2,
                })
            }
            ChartId::Parabolic => {
                if q1 * q1 + q2 * q2 < DOMAIN_GUARD {
                    return Err(QbhError::Domain(format!(
                        "parabolic a^2+b^2 = {} below guard",
                        q1 * q1 + q2 * q2
                    )));
                }
                Ok(PhasePoint {
                    chart,
                    q1,
                    q2,
                    p1,
                    p2,
                })
            }
        }
    }

    pub fn cartesian(x: f64, y: f64, px: f64, py: f64) -> Self {
        PhasePoint {
            chart: ChartId::Cartesian,
            q1: x,
            q2: y,
            p1: px,
            p2: py,
        }
    }

    pub fn polar(r: f64, phi: f64, pr: f64, pphi: f64) -> Result<Self> {
        PhasePoint::new(ChartId::Polar, [r, phi, pr, pphi])
    }

    pub fn parabolic(a: f64, b: f64, pa: f64, pb: f64) -> Result<Self> {
        PhasePoint::new(ChartId::Parabolic, [a, b, pa, pb])
    }

    /// Raw constructor bypassing angle normalization; used internally for
    /// finite-difference stencils and integrator stages, where coordinates
    /// must vary smoothly. All observables are periodic in polar `phi`, so
    /// evaluation agrees with the normalized representative.
    pub(crate) fn raw(chart: ChartId, coords: [f64; 4]) -> Self {
        let [q1, q2, p1, p2] = coords;
        PhasePoint {
            chart,
            q1,
            q2,
            p1,
            p2,
        }
    }

    pub fn coords(&self) -> [f64; 4] {
        [self.q1, self.q2, self.p1, self.p2]
    }

    pub(crate) fn with_coord(&self, k: usize, value: f64) -> Self {
        let mut c = self.coords();
        c[k] = value;
        PhasePoint::raw(self.chart, c)
    }

    /// True when the point satisfies its chart's guard.
    pub fn in_guarded_domain(&self) -> bool {
        match self.chart {
            ChartId::Cartesian => true,
            ChartId::Polar => self.q1 >= DOMAIN_GUARD,
            ChartId::Parabolic => self.q1 * self.q1 + self.q2 * self.q2 >= DOMAIN_GUARD,
        }
    }

    fn guard_check(&self) -> Result<()> {
        if self.in_guarded_domain() {
            Ok(())
        } else {
            Err(QbhError::Domain(format!(
                "point {:?} outside guarded domain",
                self.coords()
            )))
        }
    }
}

fn normalize_angle(phi: f64) -> f64 {
    let mut a = phi % TAU;
    if a < 0.0 {
        a += TAU;
    }
    // `a` can round back to TAU for tiny negatives.
    if a >= TAU {
        a = 0.0;
    }
    a
}

/// Transport a point to the Cartesian chart. Base coordinates follow the
/// chart map; momenta follow the cotangent lift.
pub fn to_cartesian(pt: &PhasePoint) -> Result<PhasePoint> {
    pt.guard_check()?;
    match pt.chart {
        ChartId::Cartesian => Ok(*pt),
        ChartId::Polar => {
            let (r, phi, pr, pphi) = (pt.q1, pt.q2, pt.p1, pt.p2);
            let (sin, cos) = phi.sin_cos();
            let px = pr * cos - (pphi / r) * sin;
            let py = pr * sin + (pphi / r) * cos;
            Ok(PhasePoint::cartesian(r * cos, r * sin, px, py))
        }
        ChartId::Parabolic => {
            let (a, b, pa, pb) = (pt.q1, pt.q2, pt.p1, pt.p2);
            let d = a * a + b * b;
            let px = (a * pa - b * pb) / d;
            let py = (b * pa + a * pb) / d;
            Ok(PhasePoint::cartesian(0.5 * (a * a - b * b), a * b, px, py))
        }
    }
}

/// Transport a Cartesian point into `target`, picking the canonical branch:
/// polar `phi` in `[0, 2pi)`; parabolic `a >= 0` (and `b >= 0` when `a = 0`).
pub fn from_cartesian(pt: &PhasePoint, target: ChartId) -> Result<PhasePoint> {
    if pt.chart != ChartId::Cartesian {
        return Err(QbhError::ChartMismatch {
            expected: ChartId::Cartesian,
            got: pt.chart,
        });
    }
    let (x, y, px, py) = (pt.q1, pt.q2, pt.p1, pt.p2);
    let r = x.hypot(y);
    if r * r < DOMAIN_GUARD * DOMAIN_GUARD {
        return Err(QbhError::Domain("x = y = 0 is outside both charts".into()));
    }
    match target {
        ChartId::Cartesian => Ok(*pt),
        ChartId::Polar => {
            let phi = y.atan2(x);
            let pr = px * phi.cos() + py * phi.sin();
            let pphi = r * (-px * phi.sin() + py * phi.cos());
            PhasePoint::polar(r, phi, pr, pphi)
        }
        ChartId::Parabolic => {
            // a^2 + b^2 = 2r, a^2 - b^2 = 2x, ab = y.
            let a = (r + x).max(0.0).sqrt();
            let b = if a > 0.0 {
                // sign(b) = sign(y) on the a > 0 branch
                let m = (r - x).max(0.0).sqrt();
                if y < 0.0 {
                    -m
                } else {
                    m
                }
            } else {
                (r - x).max(0.0).sqrt()
            };
            let pa = a * px + b * py;
            let pb = -b * px + a * py;
            PhasePoint::parabolic(a, b, pa, pb)
        }
    }
}

/// Transport between arbitrary charts through the Cartesian chart.
pub fn transport(pt: &PhasePoint, target: ChartId) -> Result<PhasePoint> {
    from_cartesian(&to_cartesian(pt)?, target)
}

/// Map the Kepler coupling between chart conventions so that Hamiltonian
/// values agree at transported points.
pub fn map_coupling(g: f64, from: ChartId, to: ChartId) -> f64 {
    // Convention weight: potential is -g/r in polar and Cartesian,
    // -g/(a^2+b^2) = -g/(2r) in parabolic.
    let weight = |c: ChartId| match c {
        ChartId::Cartesian | ChartId::Polar => 1.0,
        ChartId::Parabolic => 2.0,
    };
    g * weight(to) / weight(from)
}
