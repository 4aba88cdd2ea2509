//! The property-suite engine: a registry of named checks, each binding a
//! reference to the claim it verifies, a residual function, a sample domain
//! or trajectory, and a tolerance. Checks run deterministically from a seed
//! and produce machine-diffable reports.
//!
//! Two tolerance tiers are used throughout: `1e-10` for identities evaluated
//! through exact analytic gradients, and `1e-6` for identities that pass
//! through finite differences (Lie brackets, Lie derivatives, exterior
//! derivatives) or integration drift. These match the error floors of the
//! two evaluation paths.
//!
//! Sampling uses SplitMix64 (see [`crate::rng`]) with one independent
//! stream per check id, so results do not depend on registry order or on
//! which subset of checks runs. Within a check, the worst-residual reduction
//! is order-insensitive (max with index tie-break), so samples could be
//! evaluated in parallel without changing any report field.

pub mod registry;

use crate::charts::{ChartId, PhasePoint};
use crate::error::{QbhError, Result};
use crate::rng::SplitMix64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::sync::Arc;
use std::time::Instant;

/// Effective suite configuration; echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    /// Kepler coupling in each chart's own convention.
    pub g: f64,
    /// Oscillator frequency for the isotropic-oscillator checks.
    pub alpha0: f64,
    /// Replaces the per-check default sample counts of pointwise and audit
    /// checks when set.
    pub samples_override: Option<usize>,
    /// Tolerance for exact-gradient identities.
    pub tol_exact: f64,
    /// Tolerance for finite-difference-assisted identities and drift.
    pub tol_fd: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            g: 1.0,
            alpha0: 1.0,
            samples_override: None,
            tol_exact: 1e-10,
            tol_fd: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Polar,
    Parabolic,
    Flow,
    Calculus,
    All,
}

impl Suite {
    pub fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Polar => "polar",
            Suite::Parabolic => "parabolic",
            Suite::Flow => "flow",
            Suite::Calculus => "calculus",
            Suite::All => "all",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "polar" => Ok(Suite::Polar),
            "parabolic" => Ok(Suite::Parabolic),
            "flow" => Ok(Suite::Flow),
            "calculus" => Ok(Suite::Calculus),
            "all" => Ok(Suite::All),
            other => Err(format!("unknown suite '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Pointwise,
    Trajectory,
    Audit,
    Witness,
}

/// A rejection-sampled box domain on one chart.
type ExclusionFn = Arc<dyn Fn(&PhasePoint) -> bool + Send + Sync>;

#[derive(Clone)]
pub struct SampleDomain {
    pub chart: ChartId,
    pub ranges: [(f64, f64); 4],
    exclusion: Option<ExclusionFn>,
}

impl SampleDomain {
    /// Polar box: `r in [0.5, 3]`, `phi in [0, 2pi)`, `p_r in [-2, 2]`,
    /// `p_phi in [-2, 2]` excluding `|p_phi| < 0.3` (the degenerate locus of
    /// the chart's 2-forms).
    pub fn polar() -> Self {
        SampleDomain {
            chart: ChartId::Polar,
            ranges: [(0.5, 3.0), (0.0, TAU), (-2.0, 2.0), (-2.0, 2.0)],
            exclusion: Some(Arc::new(|pt| pt.p2.abs() < 0.3)),
        }
    }

    /// Parabolic box: `a, b in +-[0.5, 2]`, `p_a, p_b in [-2, 2]`,
    /// rejection-sampled to `|J| >= 0.1`.
    pub fn parabolic() -> Self {
        SampleDomain {
            chart: ChartId::Parabolic,
            ranges: [(-2.0, 2.0), (-2.0, 2.0), (-2.0, 2.0), (-2.0, 2.0)],
            exclusion: Some(Arc::new(|pt| {
                pt.q1.abs() < 0.5
                    || pt.q2.abs() < 0.5
                    || (pt.q1 * pt.p2 - pt.q2 * pt.p1).abs() < 0.1
            })),
        }
    }

    fn draw(&self, rng: &mut SplitMix64) -> PhasePoint {
        let mut c = [0.0; 4];
        for (k, (lo, hi)) in self.ranges.iter().enumerate() {
            c[k] = rng.uniform(*lo, *hi);
        }
        PhasePoint::raw(self.chart, c)
    }

    fn admissible(&self, pt: &PhasePoint) -> bool {
        pt.in_guarded_domain() && !self.exclusion.as_ref().is_some_and(|f| f(pt))
    }

    /// Draw `n` admissible points; errors once the rejection rate passes 99%.
    pub fn sample(&self, n: usize, rng: &mut SplitMix64, id: &str) -> Result<Vec<PhasePoint>> {
        let mut out = Vec::with_capacity(n);
        let mut attempts = 0usize;
        while out.len() < n {
            attempts += 1;
            if attempts > 100 * n.max(1) {
                return Err(QbhError::DomainExhausted(id.to_string()));
            }
            let pt = self.draw(rng);
            if self.admissible(&pt) {
                out.push(pt);
            }
        }
        Ok(out)
    }
}

type PointwiseFn = Arc<dyn Fn(&PhasePoint) -> f64 + Send + Sync>;
type AuditFn = Arc<dyn Fn(&PhasePoint) -> (f64, f64, f64) + Send + Sync>;
type CustomFn = Arc<dyn Fn(u64) -> Result<CustomOutcome> + Send + Sync>;

/// One audited coefficient or object slot.
pub struct AuditSlot {
    pub name: &'static str,
    /// Returns `(residual, tabulated value, ground-truth value)`; the value
    /// pair is `NaN` for whole-object audits where a scalar pair is
    /// meaningless.
    pub eval: AuditFn,
}

/// Result of a trajectory, witness, or self-sampling evaluation.
pub struct CustomOutcome {
    pub residual: f64,
    pub worst_point: Option<PhasePoint>,
    pub notes: Vec<String>,
    pub samples_run: usize,
}

pub enum CheckBody {
    Pointwise(PointwiseFn),
    Audit {
        slots: Vec<AuditSlot>,
        /// Strict audits fail on any slot above tolerance; adjudicating
        /// audits enumerate such slots in the notes instead (the
        /// adjudication record is the deliverable, and a flagged
        /// discrepancy is an acceptable outcome).
        adjudicated: bool,
    },
    Custom(CustomFn),
}

pub struct CheckSpec {
    pub id: &'static str,
    /// The verified claim, stated as the identity it checks.
    pub paper_ref: &'static str,
    pub kind: CheckKind,
    pub suite: Suite,
    pub domain: Option<SampleDomain>,
    pub samples: usize,
    pub tolerance: f64,
    /// Name of the scalar field playing the integrating-factor role in the
    /// checked identity, when there is one (always `lambda` here).
    pub integrating_factor: Option<&'static str>,
    pub body: CheckBody,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: String,
    pub paper_ref: String,
    pub kind: CheckKind,
    pub samples_run: usize,
    pub max_abs_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub worst_point: Option<PhasePoint>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub suite: String,
    pub seed: u64,
    pub config: SuiteConfig,
    pub checks: Vec<CheckReport>,
    pub summary: SuiteSummary,
    /// Excluded from the determinism contract.
    pub wall_time_s: f64,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }
}

/// Order-insensitive worst-sample tracker: max residual with deterministic
/// tie-break on the lowest sample index, so any evaluation order (including
/// parallel reductions) yields the same report.
#[derive(Debug, Clone, Copy)]
pub(crate) struct WorstTracker {
    pub max: f64,
    pub index: usize,
    pub point: Option<PhasePoint>,
}

impl WorstTracker {
    pub fn new() -> Self {
        WorstTracker {
            max: 0.0,
            index: usize::MAX,
            point: None,
        }
    }

    pub fn offer(&mut self, residual: f64, index: usize, point: &PhasePoint) {
        if residual > self.max || (residual == self.max && index < self.index) {
            self.max = residual;
            self.index = index;
            self.point = Some(*point);
        }
    }
}

fn effective_samples(spec: &CheckSpec, cfg: &SuiteConfig) -> usize {
    match spec.body {
        CheckBody::Custom(_) => spec.samples,
        _ => cfg.samples_override.unwrap_or(spec.samples),
    }
}

fn run_spec(spec: &CheckSpec, seed: u64, cfg: &SuiteConfig) -> Result<CheckReport> {
    let mut rng = SplitMix64::for_label(seed, spec.id);
    let samples = effective_samples(spec, cfg);
    match &spec.body {
        CheckBody::Pointwise(f) => {
            let domain = spec
                .domain
                .as_ref()
                .expect("pointwise checks carry a domain");
            let pts = domain.sample(samples, &mut rng, spec.id)?;
            let mut worst = WorstTracker::new();
            for (i, pt) in pts.iter().enumerate() {
                worst.offer(f(pt), i, pt);
            }
            Ok(CheckReport {
                id: spec.id.to_string(),
                paper_ref: spec.paper_ref.to_string(),
                kind: spec.kind,
                samples_run: samples,
                max_abs_residual: worst.max,
                tolerance: spec.tolerance,
                pass: worst.max < spec.tolerance,
                worst_point: worst.point,
                notes: Vec::new(),
            })
        }
        CheckBody::Audit { slots, adjudicated } => {
            let domain = spec.domain.as_ref().expect("audit checks carry a domain");
            let pts = domain.sample(samples, &mut rng, spec.id)?;
            // track the worst sample per slot
            let mut per_slot: Vec<(WorstTracker, f64, f64)> = slots
                .iter()
                .map(|_| (WorstTracker::new(), f64::NAN, f64::NAN))
                .collect();
            for (i, pt) in pts.iter().enumerate() {
                for (slot, acc) in slots.iter().zip(per_slot.iter_mut()) {
                    let (r, tabulated, truth) = (slot.eval)(pt);
                    let before = acc.0.max;
                    acc.0.offer(r, i, pt);
                    if acc.0.max > before || acc.1.is_nan() {
                        acc.1 = tabulated;
                        acc.2 = truth;
                    }
                }
            }
            let mut notes = Vec::new();
            let mut agree_max = 0.0f64;
            let mut agree_worst: Option<PhasePoint> = None;
            let mut strict_worst = WorstTracker::new();
            let mut discrepancies = 0usize;
            for (slot, (tracker, tabulated, truth)) in slots.iter().zip(&per_slot) {
                strict_worst.offer(
                    tracker.max,
                    tracker.index,
                    &tracker.point.unwrap_or_else(|| pts[0]),
                );
                if tracker.max >= spec.tolerance {
                    discrepancies += 1;
                    let detail = if tabulated.is_nan() {
                        String::new()
                    } else {
                        format!(" (tabulated {tabulated:e}, ground truth {truth:e} at worst point)")
                    };
                    notes.push(format!(
                        "slot {}: tabulated-expression discrepancy, max |tabulated - truth| = {:e}{}",
                        slot.name, tracker.max, detail
                    ));
                } else if tracker.max > agree_max {
                    agree_max = tracker.max;
                    agree_worst = tracker.point;
                }
            }
            if *adjudicated {
                notes.push(format!(
                    "{} of {} slots agree with the wedge-product ground truth below {:e}",
                    slots.len() - discrepancies,
                    slots.len(),
                    spec.tolerance
                ));
                Ok(CheckReport {
                    id: spec.id.to_string(),
                    paper_ref: spec.paper_ref.to_string(),
                    kind: spec.kind,
                    samples_run: samples,
                    max_abs_residual: agree_max,
                    tolerance: spec.tolerance,
                    pass: agree_max < spec.tolerance,
                    worst_point: agree_worst,
                    notes,
                })
            } else {
                Ok(CheckReport {
                    id: spec.id.to_string(),
                    paper_ref: spec.paper_ref.to_string(),
                    kind: spec.kind,
                    samples_run: samples,
                    max_abs_residual: strict_worst.max,
                    tolerance: spec.tolerance,
                    pass: strict_worst.max < spec.tolerance,
                    worst_point: strict_worst.point,
                    notes,
                })
            }
        }
        CheckBody::Custom(f) => {
            let outcome = f(seed)?;
            Ok(CheckReport {
                id: spec.id.to_string(),
                paper_ref: spec.paper_ref.to_string(),
                kind: spec.kind,
                samples_run: outcome.samples_run,
                max_abs_residual: outcome.residual,
                tolerance: spec.tolerance,
                pass: outcome.residual < spec.tolerance,
                worst_point: outcome.worst_point,
                notes: outcome.notes,
            })
        }
    }
}

/// Run one registered check by id.
pub fn run_check(id: &str, seed: u64, cfg: &SuiteConfig) -> Result<CheckReport> {
    let checks = registry::build(cfg);
    let spec = checks
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| QbhError::UnknownCheck(id.to_string()))?;
    run_spec(spec, seed, cfg)
}

/// Run every check of a suite, in registry order. A check whose engine
/// errors (e.g. domain exhaustion) is reported as failed with the error in
/// its notes rather than aborting the suite.
pub fn run_suite(suite: Suite, seed: u64, cfg: &SuiteConfig) -> SuiteReport {
    let start = Instant::now();
    let checks = registry::build(cfg);
    let mut reports = Vec::new();
    for spec in checks.iter().filter(|c| suite.includes(c.suite)) {
        let report = run_spec(spec, seed, cfg).unwrap_or_else(|err| CheckReport {
            id: spec.id.to_string(),
            paper_ref: spec.paper_ref.to_string(),
            kind: spec.kind,
            samples_run: 0,
            max_abs_residual: f64::INFINITY,
            tolerance: spec.tolerance,
            pass: false,
            worst_point: None,
            notes: vec![format!("engine error: {err}")],
        });
        reports.push(report);
    }
    let passed = reports.iter().filter(|r| r.pass).count();
    SuiteReport {
        schema_version: 1,
        suite: suite.name().to_string(),
        seed,
        config: cfg.clone(),
        summary: SuiteSummary {
            total: reports.len(),
            passed,
            failed: reports.len() - passed,
        },
        checks: reports,
        wall_time_s: start.elapsed().as_secs_f64(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_check_is_an_error() {
        let cfg = SuiteConfig::default();
        assert!(matches!(
            run_check("nonexistent", 0, &cfg),
            Err(QbhError::UnknownCheck(_))
        ));
    }

    #[test]
    fn sampling_is_deterministic_and_respects_exclusions() {
        let domain = SampleDomain::polar();
        let mut rng1 = SplitMix64::for_label(42, "t");
        let mut rng2 = SplitMix64::for_label(42, "t");
        let a = domain.sample(200, &mut rng1, "t").unwrap();
        let b = domain.sample(200, &mut rng2, "t").unwrap();
        assert_eq!(a, b);
        for pt in &a {
            assert!(pt.q1 >= 0.5 && pt.q1 < 3.0);
            assert!(pt.p2.abs() >= 0.3);
        }
        let pdomain = SampleDomain::parabolic();
        let mut rng3 = SplitMix64::for_label(7, "p");
        for pt in pdomain.sample(200, &mut rng3, "p").unwrap() {
            assert!(pt.q1.abs() >= 0.5 && pt.q2.abs() >= 0.5);
            assert!((pt.q1 * pt.p2 - pt.q2 * pt.p1).abs() >= 0.1);
        }
    }

    #[test]
    fn domain_exhaustion_detected() {
        let domain = SampleDomain {
            chart: ChartId::Polar,
            ranges: [(0.5, 3.0), (0.0, TAU), (-2.0, 2.0), (-2.0, 2.0)],
            exclusion: Some(Arc::new(|_| true)),
        };
        let mut rng = SplitMix64::new(1);
        assert!(matches!(
            domain.sample(10, &mut rng, "x"),
            Err(QbhError::DomainExhausted(_))
        ));
    }

    #[test]
    fn worst_tracker_is_order_insensitive() {
        let pts: Vec<PhasePoint> = (0..50)
            .map(|i| PhasePoint::polar(1.0 + i as f64 * 0.01, 0.0, 0.0, 1.0).unwrap())
            .collect();
        // duplicate maxima at indices 10 and 30
        let residual = |i: usize| -> f64 {
            match i {
                10 | 30 => 5.0,
                _ => (i % 4) as f64,
            }
        };
        let mut fwd = WorstTracker::new();
        for i in 0..50 {
            fwd.offer(residual(i), i, &pts[i]);
        }
        let mut rev = WorstTracker::new();
        for i in (0..50).rev() {
            rev.offer(residual(i), i, &pts[i]);
        }
        assert_eq!(fwd.max, rev.max);
        assert_eq!(fwd.index, rev.index);
        assert_eq!(fwd.index, 10);
        assert_eq!(fwd.point, rev.point);
    }
}
