//! Space/time discretization shared by the full and reduced solvers.

use serde::{Deserialize, Serialize};

use crate::ensemble::QuadratureScheme;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimGrid {
    pub z_min: f64,
    pub z_max: f64,
    pub n_z: usize,
    pub dt: f64,
    pub t_max: f64,
    pub n_detuning12: usize,
    pub n_detuning13: usize,
    /// Lorentzian truncation in units of the line width.
    pub lorentz_cutoff: f64,
    pub scheme: QuadratureScheme,
    /// Number of field snapshots kept in a trajectory (0 keeps only the boundary series).
    pub n_snapshots: usize,
}

impl Default for SimGrid {
    fn default() -> Self {
        Self {
            z_min: 0.0,
            z_max: 1.0,
            n_z: 256,
            dt: 1e-3,
            t_max: 1.0,
            n_detuning12: 64,
            n_detuning13: 64,
            lorentz_cutoff: 30.0,
            scheme: QuadratureScheme::MidpointEqualProb,
            n_snapshots: 16,
        }
    }
}

impl SimGrid {
    pub fn validate(&self) -> Result<()> {
        if self.n_z < 2 {
            return Err(Error::invalid("grid.n_z", format!("need at least 2 cells, got {}", self.n_z)));
        }
        if !(self.z_max > self.z_min) || !self.z_min.is_finite() || !self.z_max.is_finite() {
            return Err(Error::invalid("grid.z_max", "need finite z_max > z_min"));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::invalid("grid.dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.t_max >= self.dt) || !self.t_max.is_finite() {
            return Err(Error::invalid("grid.t_max", "must be finite and at least one step"));
        }
        if self.n_detuning12 == 0 || self.n_detuning13 == 0 {
            return Err(Error::invalid("grid.n_detuning", "class counts must be at least 1"));
        }
        if !(self.lorentz_cutoff >= 3.0) {
            return Err(Error::invalid("grid.lorentz_cutoff", format!("must be >= 3, got {}", self.lorentz_cutoff)));
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        self.z_max - self.z_min
    }

    pub fn dz(&self) -> f64 {
        self.length() / self.n_z as f64
    }

    /// Cell centres.
    pub fn cell_centers(&self) -> Vec<f64> {
        let dz = self.dz();
        (0..self.n_z).map(|j| self.z_min + (j as f64 + 0.5) * dz).collect()
    }

    pub fn n_steps(&self) -> usize {
        (self.t_max / self.dt).round() as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry() {
        let g = SimGrid { z_min: 1.0, z_max: 3.0, n_z: 4, ..SimGrid::default() };
        g.validate().unwrap();
        assert_eq!(g.dz(), 0.5);
        assert_eq!(g.cell_centers(), vec![1.25, 1.75, 2.25, 2.75]);
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(SimGrid { n_z: 1, ..SimGrid::default() }.validate().is_err());
        assert!(SimGrid { dt: 0.0, ..SimGrid::default() }.validate().is_err());
        assert!(SimGrid { n_detuning13: 0, ..SimGrid::default() }.validate().is_err());
        assert!(SimGrid { lorentz_cutoff: 2.0, ..SimGrid::default() }.validate().is_err());
    }
}
