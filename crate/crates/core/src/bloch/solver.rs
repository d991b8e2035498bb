//! Coupled atom/field integration in the retarded frame.
//!
//! With τ = t − (z − z_min)/c the propagation equation becomes
//! `c ∂z e = i g²N σ̄13` at fixed τ, where `e = g·E` is the probe Rabi
//! frequency. Each τ step first advances the atoms of a cell (RK4, probe
//! interpolated between the two time levels at the cell centre) and then
//! carries the field across that cell with an upwind update, sweeping from
//! the entrance to the exit. The centre field at the new time level needs
//! the cell's σ̄13 at that level, which is extrapolated linearly from the two
//! previous levels; the face update itself uses the computed σ̄13. This makes
//! the z update a midpoint rule, so a purely dispersive medium does not
//! amplify the probe.

use num_complex::Complex64;
use rayon::prelude::*;

use super::equations::{rk4_step, AtomState, ClassRates};
use crate::drive::{DriveSchedule, ProbeSpec};
use crate::ensemble::DetuningGrid;
use crate::error::{Error, Result};
use crate::grid::SimGrid;
use crate::material::Medium;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Classes per parallel work item. Fixed so the reduction order never
/// depends on the thread count.
const CHUNK: usize = 128;

/// Largest allowed `dt` times the fastest atomic rate.
pub const MAX_PHASE_PER_STEP: f64 = 0.1;

/// Ensemble-averaged quantities of one cell.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CellAverages {
    pub sigma12: Complex64,
    pub sigma13: Complex64,
    pub sigma22: f64,
    pub sigma33: f64,
}

/// Full state of the discretized medium at one retarded time.
#[derive(Debug, Clone)]
pub struct EnsembleState {
    medium: Medium,
    drive: DriveSchedule,
    probe: ProbeSpec,
    z_min: f64,
    dz: f64,
    n_z: usize,
    dt: f64,
    rates: Vec<ClassRates>,
    weights: Vec<f64>,
    /// Cell-major: `atoms[j * n_classes + c]`.
    atoms: Vec<AtomState>,
    /// Probe Rabi frequency g·E on the `n_z + 1` cell faces.
    faces: Vec<Complex64>,
    /// σ̄13 per cell at the current and previous time levels.
    coherence: Vec<Complex64>,
    coherence_prev: Vec<Complex64>,
    tau: f64,
    steps: usize,
}

impl EnsembleState {
    /// Medium in the ground state with the probe face values at τ = 0.
    pub fn new(medium: &Medium, drive: &DriveSchedule, probe: &ProbeSpec, grid: &SimGrid) -> Result<Self> {
        grid.validate()?;
        drive.validate()?;
        probe.validate()?;
        medium.material.validate()?;
        let classes = DetuningGrid::for_material(
            &medium.material,
            grid.n_detuning12,
            grid.n_detuning13,
            grid.lorentz_cutoff,
            grid.scheme,
        )?;
        let (rates, weights): (Vec<_>, Vec<_>) = classes
            .joint()
            .map(|c| (ClassRates::new(&medium.material, c.detuning12, c.detuning13), c.weight))
            .unzip();

        let fastest = rates.iter().map(ClassRates::fastest).fold(drive.max_omega(), f64::max);
        if grid.dt * fastest > MAX_PHASE_PER_STEP {
            return Err(Error::Domain(format!(
                "dt = {} does not resolve the fastest atomic rate {fastest:.4e} (need dt <= {:.4e})",
                grid.dt,
                MAX_PHASE_PER_STEP / fastest
            )));
        }
        let line = medium.material.w13 + medium.material.gamma13;
        if line > 0.0 {
            let od_cell = medium.g2n * grid.dz() / (medium.light_speed * line);
            if od_cell > 1.0 {
                log::warn!("optical depth per cell is {od_cell:.2}; the upwind field update may be inaccurate");
            }
        }

        let n_classes = rates.len();
        let mut faces = vec![Complex64::ZERO; grid.n_z + 1];
        faces[0] = Complex64::from(medium.coupling * probe.amplitude(0.0));
        Ok(Self {
            medium: medium.clone(),
            drive: drive.clone(),
            probe: *probe,
            z_min: grid.z_min,
            dz: grid.dz(),
            n_z: grid.n_z,
            dt: grid.dt,
            rates,
            weights,
            atoms: vec![AtomState::ground(); grid.n_z * n_classes],
            faces,
            coherence: vec![Complex64::ZERO; grid.n_z],
            coherence_prev: vec![Complex64::ZERO; grid.n_z],
            tau: 0.0,
            steps: 0,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn n_cells(&self) -> usize {
        self.n_z
    }

    pub fn n_classes(&self) -> usize {
        self.rates.len()
    }

    pub fn dz(&self) -> f64 {
        self.dz
    }

    pub fn medium(&self) -> &Medium {
        &self.medium
    }

    /// Lab time of cell `j`'s centre at the current retarded time.
    pub fn lab_time(&self, j: usize) -> f64 {
        self.tau + (j as f64 + 0.5) * self.dz / self.medium.light_speed
    }

    pub fn cell_center(&self, j: usize) -> f64 {
        self.z_min + (j as f64 + 0.5) * self.dz
    }

    /// Probe Rabi frequency on the entrance face.
    pub fn entrance(&self) -> Complex64 {
        self.faces[0]
    }

    /// Probe Rabi frequency on the exit face.
    pub fn exit(&self) -> Complex64 {
        self.faces[self.n_z]
    }

    /// Probe Rabi frequency at the centre of cell `j`.
    pub fn center_field(&self, j: usize) -> Complex64 {
        (self.faces[j] + self.faces[j + 1]) * 0.5
    }

    pub fn cell_atoms(&self, j: usize) -> &[AtomState] {
        let n = self.n_classes();
        &self.atoms[j * n..(j + 1) * n]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weighted class averages in cell `j`, summed in a fixed order.
    pub fn cell_averages(&self, j: usize) -> CellAverages {
        self.cell_atoms(j).iter().zip(&self.weights).fold(CellAverages::default(), |acc, (s, &w)| CellAverages {
            sigma12: acc.sigma12 + s.s12 * w,
            sigma13: acc.sigma13 + s.s13 * w,
            sigma22: acc.sigma22 + s.p2 * w,
            sigma33: acc.sigma33 + s.p3 * w,
        })
    }

    /// g²N·∫(σ̄22 + σ̄33)dz: excitation held by the atoms, in the units of
    /// c·∫|g·E|²dτ.
    pub fn atomic_excitation(&self) -> f64 {
        (0..self.n_z)
            .map(|j| {
                let a = self.cell_averages(j);
                a.sigma22 + a.sigma33
            })
            .sum::<f64>()
            * self.medium.g2n
            * self.dz
    }

    /// Advances every cell by one retarded-time step.
    pub fn step(&mut self) -> Result<()> {
        let dt = self.dt;
        let tau1 = self.tau + dt;
        let g = self.medium.coupling;
        let kappa = self.medium.g2n * self.dz / self.medium.light_speed;
        let n_classes = self.rates.len();
        let mut inflow_new = Complex64::from(g * self.probe.amplitude(tau1));
        let mut next_faces = Vec::with_capacity(self.n_z + 1);
        next_faces.push(inflow_new);

        for j in 0..self.n_z {
            let t0 = self.lab_time(j);
            let omega = [t0, t0 + 0.5 * dt, t0 + dt].map(|t| Complex64::from(self.drive.omega(t)));
            let center_old = self.center_field(j);
            let predicted = self.coherence[j] * 2.0 - self.coherence_prev[j];
            let center_new = inflow_new + I * (0.5 * kappa) * predicted;
            let cell = &mut self.atoms[j * n_classes..(j + 1) * n_classes];
            let partials: Vec<Complex64> = cell
                .par_chunks_mut(CHUNK)
                .zip(self.rates.par_chunks(CHUNK))
                .zip(self.weights.par_chunks(CHUNK))
                .map(|((atoms, rates), weights)| {
                    let mut acc = Complex64::ZERO;
                    for ((s, r), &w) in atoms.iter_mut().zip(rates).zip(weights) {
                        *s = rk4_step(s, center_old, center_new, omega, r, dt);
                        acc += s.s13 * w;
                    }
                    acc
                })
                .collect();
            let sigma13: Complex64 = partials.into_iter().sum();
            let out = inflow_new + I * kappa * sigma13;
            if !(out.re.is_finite() && out.im.is_finite()) {
                return Err(Error::Divergence { time: tau1, cell: j, what: "probe field".into() });
            }
            next_faces.push(out);
            inflow_new = out;
            self.coherence_prev[j] = self.coherence[j];
            self.coherence[j] = sigma13;
        }
        self.faces = next_faces;
        self.tau = tau1;
        self.steps += 1;
        Ok(())
    }

    pub fn steps_taken(&self) -> usize {
        self.steps
    }
}

/// Advances `state` by one step. Thin wrapper kept for callers that prefer
/// a value-in, value-out interface.
pub fn step_system(mut state: EnsembleState) -> Result<EnsembleState> {
    state.step()?;
    Ok(state)
}
