//! Time integration of Hamiltonian flows with invariant monitoring.
//!
//! The workhorse is the implicit midpoint rule, which is symplectic for
//! arbitrary (non-separable) Hamiltonians; neither chart's Kepler
//! Hamiltonian splits as `T(p) + V(q)`, so splitting methods are out.
//! Classical RK4 is provided as a non-symplectic cross-check.
//!
//! The implicit step solves `x' = x + h X_H((x + x')/2)` by fixed-point
//! iteration from the explicit-Euler predictor; step sizes used here keep
//! the iteration contractive. Steps operate on raw coordinates (no angle
//! renormalization) so the iteration sees a smooth map; stored states are
//! normalized on construction.

use crate::calculus::ScalarField;
use crate::charts::{ChartId, PhasePoint};
use crate::error::{QbhError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ImplicitMidpoint,
    Rk4,
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "implicit-midpoint" | "midpoint" => Ok(Method::ImplicitMidpoint),
            "rk4" => Ok(Method::Rk4),
            other => Err(format!("unknown method '{other}'")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct IntegratorConfig {
    pub method: Method,
    pub step: f64,
    pub steps: usize,
    pub fixed_point_tol: f64,
    pub fixed_point_max_iter: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            method: Method::ImplicitMidpoint,
            step: 1e-3,
            steps: 1000,
            fixed_point_tol: 1e-13,
            fixed_point_max_iter: 50,
        }
    }
}

fn xh(h: &ScalarField, chart: ChartId, coords: [f64; 4]) -> Result<[f64; 4]> {
    let pt = PhasePoint::raw(chart, coords);
    if !pt.in_guarded_domain() {
        return Err(QbhError::Domain(format!(
            "integrator stage left the guarded domain at {coords:?}"
        )));
    }
    let d = h.grad(&pt);
    Ok([d[2], d[3], -d[0], -d[1]])
}

fn step_raw(
    h: &ScalarField,
    chart: ChartId,
    x: [f64; 4],
    dt: f64,
    cfg: &IntegratorConfig,
    step_index: usize,
) -> Result<[f64; 4]> {
    match cfg.method {
        Method::Rk4 => {
            let k1 = xh(h, chart, x)?;
            let k2 = xh(h, chart, advance(x, &k1, dt / 2.0))?;
            let k3 = xh(h, chart, advance(x, &k2, dt / 2.0))?;
            let k4 = xh(h, chart, advance(x, &k3, dt))?;
            let mut out = x;
            for i in 0..4 {
                out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            Ok(out)
        }
        Method::ImplicitMidpoint => {
            // explicit-Euler predictor
            let f0 = xh(h, chart, x)?;
            let mut y = advance(x, &f0, dt);
            for _ in 0..cfg.fixed_point_max_iter {
                let mid = [
                    0.5 * (x[0] + y[0]),
                    0.5 * (x[1] + y[1]),
                    0.5 * (x[2] + y[2]),
                    0.5 * (x[3] + y[3]),
                ];
                let f = xh(h, chart, mid)?;
                let next = advance(x, &f, dt);
                let delta = (0..4).map(|i| (next[i] - y[i]).abs()).fold(0.0, f64::max);
                y = next;
                if delta < cfg.fixed_point_tol {
                    return Ok(y);
                }
            }
            Err(QbhError::NoConvergence {
                iterations: cfg.fixed_point_max_iter,
                step_index,
            })
        }
    }
}

fn advance(x: [f64; 4], f: &[f64; 4], dt: f64) -> [f64; 4] {
    [
        x[0] + dt * f[0],
        x[1] + dt * f[1],
        x[2] + dt * f[2],
        x[3] + dt * f[3],
    ]
}

/// Propagate raw coordinates through `cfg.steps` steps without per-step
/// angle normalization; used where the flow map must stay smooth in its
/// initial conditions (flow-map Jacobian diagnostics).
pub fn propagate_raw(
    h: &ScalarField,
    chart: ChartId,
    x0: [f64; 4],
    cfg: &IntegratorConfig,
) -> Result<[f64; 4]> {
    let mut x = x0;
    for n in 0..cfg.steps {
        x = step_raw(h, chart, x, cfg.step, cfg, n)?;
    }
    Ok(x)
}

/// One implicit-midpoint step.
pub fn implicit_midpoint_step(h: &ScalarField, pt: &PhasePoint, dt: f64) -> Result<PhasePoint> {
    let cfg = IntegratorConfig {
        method: Method::ImplicitMidpoint,
        ..Default::default()
    };
    let x = step_raw(h, pt.chart, pt.coords(), dt, &cfg, 0)?;
    PhasePoint::new(pt.chart, x)
}

/// One classical RK4 step.
pub fn rk4_step(h: &ScalarField, pt: &PhasePoint, dt: f64) -> Result<PhasePoint> {
    let cfg = IntegratorConfig {
        method: Method::Rk4,
        ..Default::default()
    };
    let x = step_raw(h, pt.chart, pt.coords(), dt, &cfg, 0)?;
    PhasePoint::new(pt.chart, x)
}

/// A named invariant series recorded along a trajectory.
#[derive(Debug, Clone)]
pub struct MonitorSeries {
    pub name: String,
    pub values: Vec<f64>,
    /// `max_n |m_n - m_0| / (1 + |m_0|)`.
    pub max_drift: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub chart: ChartId,
    pub times: Vec<f64>,
    pub states: Vec<PhasePoint>,
    pub monitors: Vec<MonitorSeries>,
}

impl Trajectory {
    pub fn monitor(&self, name: &str) -> Option<&MonitorSeries> {
        self.monitors.iter().find(|m| m.name == name)
    }
}

/// Integrate `n` fixed steps, recording states and invariant monitors.
/// Monitor drift is reported relative to `1 + |initial value|`.
pub fn integrate(
    h: &ScalarField,
    pt0: &PhasePoint,
    cfg: &IntegratorConfig,
    monitors: &[ScalarField],
) -> Result<Trajectory> {
    for m in monitors {
        if m.chart() != pt0.chart {
            return Err(QbhError::ChartMismatch {
                expected: pt0.chart,
                got: m.chart(),
            });
        }
    }
    let mut times = Vec::with_capacity(cfg.steps + 1);
    let mut states = Vec::with_capacity(cfg.steps + 1);
    let mut series: Vec<Vec<f64>> = monitors
        .iter()
        .map(|_| Vec::with_capacity(cfg.steps + 1))
        .collect();

    let mut x = pt0.coords();
    for n in 0..=cfg.steps {
        let pt = PhasePoint::raw(pt0.chart, x);
        times.push(n as f64 * cfg.step);
        states.push(pt);
        for (m, s) in monitors.iter().zip(series.iter_mut()) {
            s.push(m.eval(&pt));
        }
        if n < cfg.steps {
            x = step_raw(h, pt0.chart, x, cfg.step, cfg, n)?;
        }
    }

    let monitors = monitors
        .iter()
        .zip(series)
        .map(|(m, values)| {
            let m0 = values[0];
            let scale = 1.0 + m0.abs();
            let max_drift = values
                .iter()
                .map(|v| (v - m0).abs() / scale)
                .fold(0.0, f64::max);
            MonitorSeries {
                name: m.name().to_string(),
                values,
                max_drift,
            }
        })
        .collect();

    Ok(Trajectory {
        chart: pt0.chart,
        times,
        states,
        monitors,
    })
}
