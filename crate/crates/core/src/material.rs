//! Medium parameters and the scalar coupling relations built on them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::constants::{angular_frequency, EPSILON_0, HBAR, SPEED_OF_LIGHT};
use crate::error::{Error, Result};

/// Smallest W13/W12 ratio accepted by the reduced polariton model.
pub const MIN_WIDTH_RATIO: f64 = 10.0;

/// Below this W13/W12 ratio the reduced model is accepted with a warning.
pub const COMFORTABLE_WIDTH_RATIO: f64 = 100.0;

/// Parameters of a doped solid. All rates are angular frequencies (rad/s).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialSpec {
    pub name: String,
    /// Inhomogeneous width of the |1⟩–|2⟩ spin transition.
    pub w12: f64,
    /// Inhomogeneous width of the |1⟩–|3⟩ optical transition.
    pub w13: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub gamma12: f64,
    pub gamma13: f64,
    pub gamma23: f64,
    /// Dipole moment of the |1⟩–|3⟩ transition (C·m).
    pub d13: f64,
    /// Dopant number density (m⁻³).
    pub density: f64,
    /// Probe vacuum wavelength (m).
    pub wavelength: f64,
}

/// Non-fatal findings from [`MaterialSpec::validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum MaterialWarning {
    /// W13/W12 is accepted but below the comfortable ratio.
    NarrowWidthRatio { ratio: f64 },
    /// Spin dephasing exceeds the spin inhomogeneous width.
    DephasingExceedsWidth { gamma12: f64, w12: f64 },
}

impl fmt::Display for MaterialWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaterialWarning::NarrowWidthRatio { ratio } => write!(
                f,
                "W13/W12 = {ratio:.3} is below {COMFORTABLE_WIDTH_RATIO}; the reduced model drops terms of order W12/W13"
            ),
            MaterialWarning::DephasingExceedsWidth { gamma12, w12 } => {
                write!(f, "gamma12 = {gamma12:e} exceeds W12 = {w12:e}")
            }
        }
    }
}

impl MaterialSpec {
    /// Checks the field invariants.
    ///
    /// Widths and decay rates may be zero (the homogeneous gas limit), never
    /// negative. Density and wavelength must be strictly positive.
    pub fn validate(&self) -> Result<Vec<MaterialWarning>> {
        let rates = [
            ("w12", self.w12),
            ("w13", self.w13),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("gamma3", self.gamma3),
            ("gamma12", self.gamma12),
            ("gamma13", self.gamma13),
            ("gamma23", self.gamma23),
            ("d13", self.d13),
        ];
        for (name, v) in rates {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(name, format!("must be finite and non-negative, got {v}")));
            }
        }
        for (name, v) in [("density", self.density), ("wavelength", self.wavelength)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::invalid(name, format!("must be strictly positive, got {v}")));
            }
        }
        let mut warnings = Vec::new();
        if self.w12 > 0.0 && self.gamma12 > self.w12 {
            warnings.push(MaterialWarning::DephasingExceedsWidth { gamma12: self.gamma12, w12: self.w12 });
        }
        Ok(warnings)
    }

    /// Validation for the reduced polariton model, which assumes W12 ≪ W13.
    pub fn validate_for_reduced_model(&self) -> Result<Vec<MaterialWarning>> {
        let mut warnings = self.validate()?;
        if self.w12 > 0.0 {
            let ratio = self.w13 / self.w12;
            if ratio < MIN_WIDTH_RATIO {
                return Err(Error::invalid(
                    "w13/w12",
                    format!("reduced model needs W13/W12 >= {MIN_WIDTH_RATIO}, got {ratio:.3} (w12 = {:e}, w13 = {:e})", self.w12, self.w13),
                ));
            }
            if ratio < COMFORTABLE_WIDTH_RATIO {
                warnings.push(MaterialWarning::NarrowWidthRatio { ratio });
            }
        }
        Ok(warnings)
    }

    /// Product of the two inhomogeneous widths, W12·W13.
    #[inline]
    pub fn width_product(&self) -> f64 {
        self.w12 * self.w13
    }

    /// Storage-time scales `(1/W12, 1/γ12)`.
    pub fn storage_times(&self) -> (f64, f64) {
        (1.0 / self.w12, 1.0 / self.gamma12)
    }
}

/// Single-atom coupling `g = d13·sqrt(ν / (2ħε₀V))` with ν the angular
/// optical frequency.
pub fn coupling_constant(material: &MaterialSpec, volume: f64) -> Result<f64> {
    if !(volume > 0.0) || !volume.is_finite() {
        return Err(Error::Domain(format!("interaction volume must be positive, got {volume}")));
    }
    let nu = angular_frequency(material.wavelength);
    Ok(material.d13 * (nu / (2.0 * HBAR * EPSILON_0 * volume)).sqrt())
}

/// Collective coupling g²N. The interaction volume cancels, leaving the
/// dopant density.
pub fn collective_cooperativity(material: &MaterialSpec) -> f64 {
    let nu = angular_frequency(material.wavelength);
    material.density * material.d13 * material.d13 * nu / (2.0 * HBAR * EPSILON_0)
}

/// Intensity (W/m²) of a field with Rabi frequency `omega` on a transition
/// with dipole moment `d13`.
pub fn rabi_to_intensity(omega: f64, d13: f64) -> Result<f64> {
    if !(d13 > 0.0) {
        return Err(Error::Domain(format!("dipole moment must be positive, got {d13}")));
    }
    Ok(omega * omega * HBAR * HBAR * SPEED_OF_LIGHT * EPSILON_0 / (2.0 * d13 * d13))
}

/// Inverse of [`rabi_to_intensity`]; returns the non-negative Rabi frequency.
pub fn intensity_to_rabi(intensity: f64, d13: f64) -> Result<f64> {
    if !(d13 > 0.0) {
        return Err(Error::Domain(format!("dipole moment must be positive, got {d13}")));
    }
    if intensity < 0.0 {
        return Err(Error::Domain(format!("intensity must be non-negative, got {intensity}")));
    }
    Ok((2.0 * d13 * d13 * intensity / (HBAR * HBAR * SPEED_OF_LIGHT * EPSILON_0)).sqrt())
}

/// A material placed in a simulation: the collective coupling, the
/// single-atom coupling used to express probe amplitudes, and the speed of
/// light in the chosen unit system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Medium {
    pub material: MaterialSpec,
    /// Collective coupling g²N, (rad/s)².
    pub g2n: f64,
    /// Single-atom coupling g, rad/s. Probe envelopes are converted to Rabi
    /// units as g·E.
    pub coupling: f64,
    /// Propagation speed of the bare probe (m/s, or 1 in scaled units).
    pub light_speed: f64,
}

impl Medium {
    /// SI medium: g²N from the dopant density, g from the interaction volume.
    pub fn physical(material: MaterialSpec, volume: f64) -> Result<Self> {
        material.validate()?;
        let coupling = coupling_constant(&material, volume)?;
        let g2n = collective_cooperativity(&material);
        Ok(Self { material, g2n, coupling, light_speed: SPEED_OF_LIGHT })
    }

    /// Medium in arbitrary units with g²N and c chosen directly; g = 1.
    pub fn scaled(material: MaterialSpec, g2n: f64, light_speed: f64) -> Result<Self> {
        material.validate()?;
        if !(g2n > 0.0) || !g2n.is_finite() {
            return Err(Error::invalid("g2n", format!("must be positive, got {g2n}")));
        }
        if !(light_speed > 0.0) || !light_speed.is_finite() {
            return Err(Error::invalid("light_speed", format!("must be positive, got {light_speed}")));
        }
        Ok(Self { material, g2n, coupling: 1.0, light_speed })
    }

    /// Number of atoms N implied by g²N and g.
    pub fn atom_number(&self) -> f64 {
        self.g2n / (self.coupling * self.coupling)
    }
}
