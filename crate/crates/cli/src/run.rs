//! Mode dispatch and output files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use lightstore::bloch::{analyze_trajectory, run_storage_protocol};
use lightstore::export::{self, MetricsDocument, ReducedDocument};
use lightstore::feasibility::{feasibility_report, Protocol};
use lightstore::polariton::evolve_reduced;
use lightstore::validation::run_builtin_checks;
use num_complex::Complex64;
use serde::Serialize;

use crate::config::{Mode, RunConfig};
use crate::error::{exit, CliError, Result};

pub const METADATA_SCHEMA: &str = "lightstore.run-metadata.v1";

/// Files written so far; removed again if the run fails.
struct Outputs {
    dir: PathBuf,
    created_dir: bool,
    files: Vec<PathBuf>,
}

impl Outputs {
    fn open(dir: &Path) -> Result<Self> {
        let created_dir = !dir.exists();
        std::fs::create_dir_all(dir).map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
        Ok(Self { dir: dir.to_path_buf(), created_dir, files: Vec::new() })
    }

    fn write(&mut self, name: &str, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let file = File::create(&path).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
        self.files.push(path.clone());
        let mut w = BufWriter::new(file);
        f(&mut w)?;
        w.flush()?;
        Ok(path)
    }

    fn discard(self) {
        for f in &self.files {
            let _ = std::fs::remove_file(f);
        }
        if self.created_dir {
            let _ = std::fs::remove_dir(&self.dir);
        }
    }
}

#[derive(Serialize)]
struct Metadata<'a> {
    schema: &'static str,
    version: &'static str,
    mode: Mode,
    created: String,
    config: Option<String>,
    material: &'a str,
    preset: Option<&'a str>,
    g2n: f64,
    light_speed: f64,
    coupling: f64,
    workers: usize,
    files: Vec<String>,
    exit_code: u8,
}

/// Runs the configured mode. Returns the exit code on success, which is
/// non-zero only when validation checks fail.
pub fn run(config: &RunConfig) -> Result<u8> {
    let mut out = Outputs::open(&config.output)?;
    match execute(config, &mut out) {
        Ok(code) => match write_metadata(config, &mut out, code) {
            Ok(()) => Ok(code),
            Err(e) => {
                out.discard();
                Err(e)
            }
        },
        Err(e) => {
            out.discard();
            Err(e)
        }
    }
}

fn execute(config: &RunConfig, out: &mut Outputs) -> Result<u8> {
    match config.mode {
        Mode::SimulateFull => simulate_full(config, out),
        Mode::SimulateReduced => simulate_reduced(config, out),
        Mode::Feasibility => feasibility(config, out),
        Mode::Validate => validate(config, out),
    }
}

fn simulate_full(config: &RunConfig, out: &mut Outputs) -> Result<u8> {
    let grid = config.grid.as_ref().ok_or_else(|| CliError::invalid("grid", "section is required"))?;
    let trajectory = run_storage_protocol(&config.medium, &config.drive, &config.probe, grid)?;
    let metrics = analyze_trajectory(&trajectory)?;
    if metrics.insufficient_stopping_distance {
        log::warn!(
            "{:.1}% of the pulse left the medium before the write ramp ended",
            100.0 * metrics.leak_fraction
        );
    }
    println!(
        "efficiency {:.6}  transmission {:.6}  group velocity {}",
        metrics.efficiency,
        metrics.transmission,
        metrics.group_velocity.map_or("n/a".into(), |v| format!("{v:.6e}"))
    );
    if config.formats.csv {
        out.write("trajectory.csv", |w| Ok(export::write_trajectory_csv(&trajectory, w)?))?;
        out.write("boundary.csv", |w| Ok(export::write_boundary_csv(&trajectory, w)?))?;
    }
    if config.formats.json {
        let doc = MetricsDocument::new(&trajectory, metrics);
        out.write("metrics.json", |w| Ok(export::write_metrics_json(&doc, w)?))?;
    }
    Ok(exit::OK)
}

fn simulate_reduced(config: &RunConfig, out: &mut Outputs) -> Result<u8> {
    let grid = config.grid.as_ref().ok_or_else(|| CliError::invalid("grid", "section is required"))?;
    let length = grid.length();
    let center = config.reduced.center.unwrap_or(grid.z_min + 0.25 * length);
    let width = config.reduced.width.unwrap_or(length / 20.0);
    let initial: Vec<Complex64> =
        grid.cell_centers().iter().map(|&z| Complex64::from((-((z - center) / width).powi(2)).exp())).collect();
    let run = evolve_reduced(&initial, &config.medium, &config.drive, grid, config.reduced.method)?;
    println!("efficiency {:.6}", run.efficiency);
    if config.formats.csv {
        out.write("reduced.csv", |w| Ok(export::write_reduced_csv(&run, w)?))?;
    }
    if config.formats.json {
        let doc = ReducedDocument::new(&run, &config.material.name);
        out.write("reduced.json", |w| Ok(export::write_reduced_json(&doc, w)?))?;
    }
    Ok(exit::OK)
}

fn feasibility(config: &RunConfig, out: &mut Outputs) -> Result<u8> {
    let protocol = Protocol {
        drive: &config.drive,
        probe: &config.probe,
        light_speed: config.medium.light_speed,
        medium_length: config.feasibility.medium_length,
    };
    let report = feasibility_report(&config.material, config.medium.g2n, &protocol, &config.feasibility.thresholds)?;
    println!("{report}");
    if config.formats.csv {
        out.write("feasibility.csv", |w| Ok(export::write_feasibility_csv(&report, w)?))?;
    }
    if config.formats.json {
        out.write("feasibility.json", |w| Ok(export::write_feasibility_json(&report, w)?))?;
    }
    Ok(exit::OK)
}

fn validate(config: &RunConfig, out: &mut Outputs) -> Result<u8> {
    let checks = run_builtin_checks();
    for c in &checks {
        println!("{:<24} {}  {}", c.name, if c.passed { "pass" } else { "FAIL" }, c.detail);
    }
    let passed = checks.iter().all(|c| c.passed);
    println!("validate: {}", if passed { "all checks passed" } else { "some checks failed" });
    if config.formats.csv {
        out.write("validation.csv", |w| Ok(export::write_validation_csv(&checks, w)?))?;
    }
    if config.formats.json {
        out.write("validation.json", |w| Ok(export::write_validation_json(&checks, w)?))?;
    }
    Ok(if passed { exit::OK } else { exit::CHECKS_FAILED })
}

fn write_metadata(config: &RunConfig, out: &mut Outputs, code: u8) -> Result<()> {
    let files = out
        .files
        .iter()
        .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .collect();
    let meta = Metadata {
        schema: METADATA_SCHEMA,
        version: env!("CARGO_PKG_VERSION"),
        mode: config.mode,
        created: chrono::Utc::now().to_rfc3339(),
        config: config.source.as_ref().map(|p| p.display().to_string()),
        material: &config.material.name,
        preset: config.preset.as_deref(),
        g2n: config.medium.g2n,
        light_speed: config.medium.light_speed,
        coupling: config.medium.coupling,
        workers: rayon::current_num_threads(),
        files,
        exit_code: code,
    };
    out.write("metadata.json", |w| {
        serde_json::to_writer_pretty(&mut *w, &meta).map_err(|e| CliError::Output(e.to_string()))?;
        writeln!(w)?;
        Ok(())
    })?;
    Ok(())
}
