//! CSV and JSON writers for trajectories, reduced runs and metrics.
//!
//! Every CSV file starts with a `# schema: <version>` comment line followed
//! by a header row; every JSON document carries a top-level `schema` key.

use std::io::Write;

use serde::Serialize;

use crate::bloch::{ExcitationBudget, Trajectory, TrajectoryMetrics};
use crate::error::Result;
use crate::feasibility::FeasibilityReport;
use crate::polariton::ReducedRun;
use crate::validation::CheckOutcome;

pub const TRAJECTORY_CSV_SCHEMA: &str = "lightstore.trajectory.v1";
pub const BOUNDARY_CSV_SCHEMA: &str = "lightstore.boundary.v1";
pub const REDUCED_CSV_SCHEMA: &str = "lightstore.reduced.v1";
pub const METRICS_JSON_SCHEMA: &str = "lightstore.metrics.v1";
pub const REDUCED_JSON_SCHEMA: &str = "lightstore.reduced-metrics.v1";
pub const FEASIBILITY_CSV_SCHEMA: &str = "lightstore.feasibility.v1";
pub const FEASIBILITY_JSON_SCHEMA: &str = "lightstore.feasibility-report.v1";
pub const VALIDATION_CSV_SCHEMA: &str = "lightstore.validation.v1";
pub const VALIDATION_JSON_SCHEMA: &str = "lightstore.validation-report.v1";

pub const TRAJECTORY_COLUMNS: [&str; 7] = ["t", "z", "re_e", "im_e", "abs_sigma12", "abs_sigma13", "sigma33"];
pub const BOUNDARY_COLUMNS: [&str; 5] = ["tau", "re_e_in", "im_e_in", "re_e_out", "im_e_out"];
pub const REDUCED_COLUMNS: [&str; 7] = ["t", "z", "re_psi", "im_psi", "re_phi", "im_phi", "theta"];
pub const FEASIBILITY_COLUMNS: [&str; 8] = ["name", "formula", "lhs", "rhs", "margin", "threshold", "pass", "required"];
pub const VALIDATION_COLUMNS: [&str; 3] = ["name", "passed", "detail"];

fn csv_writer<W: Write>(mut out: W, schema: &str, columns: &[&str]) -> Result<csv::Writer<W>> {
    writeln!(out, "# schema: {schema}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(columns)?;
    Ok(w)
}

/// One row per snapshot time per cell.
pub fn write_trajectory_csv<W: Write>(t: &Trajectory, out: W) -> Result<()> {
    let mut w = csv_writer(out, TRAJECTORY_CSV_SCHEMA, &TRAJECTORY_COLUMNS)?;
    for s in &t.snapshots {
        for (j, z) in t.z.iter().enumerate() {
            let e = s.field[j];
            w.serialize((s.time, z, e.re, e.im, s.sigma12[j].norm(), s.sigma13[j].norm(), s.sigma33[j]))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Entrance and exit envelopes against retarded time.
pub fn write_boundary_csv<W: Write>(t: &Trajectory, out: W) -> Result<()> {
    let mut w = csv_writer(out, BOUNDARY_CSV_SCHEMA, &BOUNDARY_COLUMNS)?;
    for ((tau, a), b) in t.tau.iter().zip(&t.input).zip(&t.output) {
        w.serialize((tau, a.re, a.im, b.re, b.im))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_reduced_csv<W: Write>(run: &ReducedRun, out: W) -> Result<()> {
    let mut w = csv_writer(out, REDUCED_CSV_SCHEMA, &REDUCED_COLUMNS)?;
    for (k, t) in run.times.iter().enumerate() {
        for (j, z) in run.z.iter().enumerate() {
            let (psi, phi) = (run.psi[k][j], run.phi[k][j]);
            w.serialize((t, z, psi.re, psi.im, phi.re, phi.im, run.theta[k]))?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct SnapshotSummary {
    pub time: f64,
    pub pulse_energy: f64,
    pub spin_energy: f64,
    pub dark_energy: f64,
    pub bright_energy: f64,
}

/// JSON summary of a full run.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsDocument<'a> {
    pub schema: &'static str,
    pub material: &'a str,
    pub g2n: f64,
    pub light_speed: f64,
    pub metrics: TrajectoryMetrics,
    /// Reduced-model efficiency over the measured dwell window, when one exists.
    pub reduced_prediction: Option<f64>,
    pub excitation: ExcitationBudget,
    pub snapshots: Vec<SnapshotSummary>,
}

impl<'a> MetricsDocument<'a> {
    pub fn new(t: &'a Trajectory, metrics: TrajectoryMetrics) -> Self {
        let reduced_prediction = metrics
            .dwell
            .map(|(from, to)| crate::polariton::predicted_efficiency(&t.medium, &t.drive, from, to));
        Self {
            schema: METRICS_JSON_SCHEMA,
            material: &t.medium.material.name,
            g2n: t.medium.g2n,
            light_speed: t.medium.light_speed,
            metrics,
            reduced_prediction,
            excitation: t.excitation,
            snapshots: t
                .snapshots
                .iter()
                .map(|s| SnapshotSummary {
                    time: s.time,
                    pulse_energy: s.pulse_energy,
                    spin_energy: s.spin_energy,
                    dark_energy: s.dark_energy,
                    bright_energy: s.bright_energy,
                })
                .collect(),
        }
    }
}

pub fn write_metrics_json<W: Write>(doc: &MetricsDocument<'_>, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, doc)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct ReducedDocument<'a> {
    pub schema: &'static str,
    pub material: &'a str,
    pub method: crate::polariton::ReducedMethod,
    pub efficiency: f64,
    pub norms: &'a [f64],
    pub times: &'a [f64],
    pub validity: &'a crate::polariton::ReducedValidity,
}

impl<'a> ReducedDocument<'a> {
    pub fn new(run: &'a ReducedRun, material: &'a str) -> Self {
        Self {
            schema: REDUCED_JSON_SCHEMA,
            material,
            method: run.method,
            efficiency: run.efficiency,
            norms: &run.norms,
            times: &run.times,
            validity: &run.validity,
        }
    }
}

pub fn write_reduced_json<W: Write>(doc: &ReducedDocument<'_>, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, doc)?;
    writeln!(out)?;
    Ok(())
}

/// One row per condition; non-finite values are written as `inf`/`NaN`.
pub fn write_feasibility_csv<W: Write>(report: &FeasibilityReport, out: W) -> Result<()> {
    let mut w = csv_writer(out, FEASIBILITY_CSV_SCHEMA, &FEASIBILITY_COLUMNS)?;
    for c in &report.conditions {
        w.serialize((&c.name, &c.formula, c.lhs, c.rhs, c.margin, c.threshold, c.pass, c.required))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityDocument<'a> {
    pub schema: &'static str,
    #[serde(flatten)]
    pub report: &'a FeasibilityReport,
}

pub fn write_feasibility_json<W: Write>(report: &FeasibilityReport, mut out: W) -> Result<()> {
    let doc = FeasibilityDocument { schema: FEASIBILITY_JSON_SCHEMA, report };
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    Ok(())
}

pub fn write_validation_csv<W: Write>(checks: &[CheckOutcome], out: W) -> Result<()> {
    let mut w = csv_writer(out, VALIDATION_CSV_SCHEMA, &VALIDATION_COLUMNS)?;
    for c in checks {
        w.serialize((c.name, c.passed, &c.detail))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationDocument<'a> {
    pub schema: &'static str,
    pub passed: bool,
    pub checks: &'a [CheckOutcome],
}

pub fn write_validation_json<W: Write>(checks: &[CheckOutcome], mut out: W) -> Result<()> {
    let doc = ValidationDocument { schema: VALIDATION_JSON_SCHEMA, passed: checks.iter().all(|c| c.passed), checks };
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    Ok(())
}
