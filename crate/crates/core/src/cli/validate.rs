//! The `validate` identity suite: every cross-check the library offers, run
//! at seeded random points.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::calculus::{fd_oracle, jet, Order, Point, ScalarField};
use crate::coordinates::{self, LiteralSystem};
use crate::error::Error;
use crate::forms::{compact_kahler_matrix, metric_compatibility, MetricTensor};
use crate::mechanics::{identity_deviation, solve_semispray_detailed};
use crate::structure::{verify_relations, ChartDim, StructureKind, StructureOperator};

pub const FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub max_violation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub skipped: bool,
    /// First error met while running the check, if any.
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub points_requested: usize,
    pub points_used: usize,
    pub points_outside_domain: usize,
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.checks.iter().find(|c| !c.passed)
    }
}

struct Tally {
    name: &'static str,
    tolerance: f64,
    worst: f64,
    note: Option<String>,
    skipped: bool,
}

impl Tally {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Tally {
            name,
            tolerance,
            worst: 0.0,
            note: None,
            skipped: false,
        }
    }

    fn record(&mut self, v: f64) {
        // NaN must register as a failure
        if v.is_nan() || v > self.worst {
            self.worst = if v.is_nan() { f64::INFINITY } else { v };
        }
    }

    fn fail(&mut self, e: &Error) {
        self.worst = f64::INFINITY;
        if self.note.is_none() {
            self.note = Some(e.to_string());
        }
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name,
            max_violation: self.worst,
            tolerance: self.tolerance,
            passed: self.skipped || self.worst <= self.tolerance,
            skipped: self.skipped,
            note: self.note,
        }
    }
}

/// Runs the suite for `field` under structure `kind`. `tolerance` replaces
/// every per-check tolerance when given.
pub fn run_suite(
    field: &dyn ScalarField,
    kind: StructureKind,
    dim: ChartDim,
    samples: usize,
    seed: u64,
    tolerance: Option<f64>,
) -> ValidationReport {
    let tol = |default: f64| tolerance.unwrap_or(default);
    let op = StructureOperator::build(kind, dim);
    let total = dim.total();

    let mut relations = Tally::new("quaternion relations", tol(0.0));
    let report = verify_relations(dim);
    relations.record(report.failures().count() as f64);

    let mut metric = Tally::new("metric compatibility (g = I)", tol(1e-12));
    let identity = MetricTensor::euclidean(dim);
    for k in StructureKind::ALL {
        match metric_compatibility(&identity, &StructureOperator::build(k, dim)) {
            Ok(c) => metric.record(c.max_violation),
            Err(e) => metric.fail(&e),
        }
    }

    let mut wedge = Tally::new("wedge vs compact form", tol(1e-10));
    let mut dynamics = Tally::new("dynamics identity", tol(1e-9));
    let mut ad_fd = Tally::new("AD vs finite differences", tol(1e-6));
    let mut literal = Tally::new("literal vs compact EL system", tol(1e-10));
    literal.skipped = dim.n() > 2;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut used = 0;
    let mut outside = 0;
    let mut attempts = 0;
    while used < samples && attempts < samples.saturating_mul(10).max(10) {
        attempts += 1;
        let coords: Vec<f64> = (0..total).map(|_| rng.random_range(-2.0..2.0)).collect();
        let velocity = DVector::from_iterator(total, (0..total).map(|_| rng.random_range(-1.0..1.0)));
        let p = Point::from_slice(&coords).expect("finite by construction");
        let j = match jet(field, &p, Order::Hessian) {
            Ok(j) => j,
            Err(Error::Domain { .. }) => {
                outside += 1;
                continue;
            }
            Err(e) => {
                wedge.fail(&e);
                break;
            }
        };
        used += 1;
        let h_scale = j.hessian.amax().max(1.0);

        let compact = compact_kahler_matrix(&op, &j.hessian);
        let literal_phi = coordinates::wedge_matrix(kind, dim, &j.hessian);
        wedge.record((compact - literal_phi).amax() / h_scale);

        match solve_semispray_detailed(field, &p, &op) {
            Ok(d) => match identity_deviation(&op, &d.jet, &d.semispray) {
                Ok(dev) => dynamics.record(dev / (1.0 + d.cond)),
                Err(e) => dynamics.fail(&e),
            },
            Err(e) => dynamics.fail(&e),
        }

        match fd_oracle(field, &p, FD_STEP) {
            Ok(fd) => {
                let g = (&j.gradient - &fd.gradient).amax() / (1.0 + j.gradient.amax());
                let h = (&j.hessian - &fd.hessian).amax() / (1.0 + j.hessian.amax());
                ad_fd.record(g.max(h));
            }
            Err(e) => ad_fd.fail(&e),
        }

        if !literal.skipped {
            let rhs = op.apply(&j.gradient).expect("dimensions match");
            let system = LiteralSystem::assemble(kind, dim, &j.gradient, &j.hessian);
            let scale = h_scale.max(j.gradient.amax());
            literal.record(system.deviation_from_compact(&j.hessian, &rhs) / scale);
            let el = coordinates::el_residual(kind, dim, &j.gradient, &j.hessian, &velocity);
            let el_compact = &j.hessian * &velocity - &rhs;
            let el_scale = scale * (1.0 + velocity.amax());
            literal.record((el - el_compact).amax() / el_scale);
        }
    }
    if used == 0 {
        let e = Error::domain("no sampled point lies in the field's domain");
        for t in [&mut wedge, &mut dynamics, &mut ad_fd] {
            t.fail(&e);
        }
    }

    ValidationReport {
        points_requested: samples,
        points_used: used,
        points_outside_domain: outside,
        checks: vec![
            relations.finish(),
            metric.finish(),
            wedge.finish(),
            dynamics.finish(),
            ad_fd.finish(),
            literal.finish(),
        ],
    }
}
