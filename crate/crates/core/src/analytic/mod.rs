//! First-order (in g·E/Ω) coherences of a single atom and their Lorentzian
//! ensemble averages.
//!
//! Time derivatives enter through [`Jet`]s: callers provide E, Ė, Ë and
//! Ω, Ω̇, Ω̈, and every `∂t` in an expression is applied by the jet
//! arithmetic. Nested operators such as `(1/Ω)(∂t − Γ)(1/Ω)(∂t − Γ′) f` are
//! applied right to left, innermost first.

mod jet;

pub use jet::Jet;

use num_complex::Complex64;

use crate::drive::{DriveSample, DriveSchedule, ProbeSpec};
use crate::error::{Error, Result};
use crate::material::MaterialSpec;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Ratio γ/W above which the averaged closed forms are flagged.
pub const AVERAGING_RATIO_LIMIT: f64 = 0.1;

/// Probe and control amplitudes with their derivatives at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceInputs {
    /// Probe envelope E.
    pub field: Jet,
    /// Control Rabi frequency Ω.
    pub omega: Jet,
    /// Single-atom coupling g.
    pub coupling: f64,
}

impl CoherenceInputs {
    /// Static fields: all derivatives zero.
    pub fn stationary(field: Complex64, omega: f64, coupling: f64) -> Self {
        Self { field: Jet::constant(field), omega: Jet::constant(omega.into()), coupling }
    }

    /// Inputs sampled from a parametric probe and drive at time `t`.
    pub fn from_schedule(probe: &ProbeSpec, drive: &DriveSchedule, coupling: f64, t: f64) -> Self {
        let (e, de, dde) = probe.sample(t);
        let DriveSample { omega, omega_dot, omega_ddot } = drive.sample(t);
        Self { field: Jet::real(e, de, dde), omega: Jet::real(omega, omega_dot, omega_ddot), coupling }
    }

    fn check(&self) -> Result<()> {
        if self.omega.value == Complex64::ZERO {
            return Err(Error::Singular("control field Ω = 0; the expansion is in g·E/Ω".into()));
        }
        Ok(())
    }
}

/// Complex decay constants `(Γ12, Γ13)` of an atom detuned by
/// `(Δω12, Δω13)` from line centre with resonant lasers.
pub fn class_rates(material: &MaterialSpec, detuning12: f64, detuning13: f64) -> (Complex64, Complex64) {
    (
        Complex64::new(-material.gamma12, -detuning12),
        Complex64::new(-material.gamma13, -detuning13),
    )
}

/// First-order single-atom coherences `(σ12, σ13)` for the given Γ12, Γ13.
pub fn first_order_coherences(
    inputs: &CoherenceInputs,
    gamma12: Complex64,
    gamma13: Complex64,
) -> Result<(Complex64, Complex64)> {
    inputs.check()?;
    let g = inputs.coupling;
    let e = inputs.field;
    let om = inputs.omega;
    let inv_om = om.recip();
    let denom_inv = (om * om + gamma12 * gamma13).recip();

    let driven = e * om * denom_inv;
    let inner = driven.dt_minus(gamma12) * inv_om;
    let sigma12 = (-(e * inv_om) + inner.dt_minus(gamma13) * inv_om) * g;

    let bracket = driven
        + (driven.dt() * inv_om * inv_om).scale(gamma13)
        + ((e * denom_inv).dt() * inv_om).scale(gamma12);
    let sigma13 = (bracket.dt_minus(gamma12) * inv_om).scale(I * g);

    Ok((sigma12.value, sigma13.value))
}

/// Lorentzian-averaged coherences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragedCoherences {
    pub sigma12: Complex64,
    /// Full six-term σ̄13.
    pub sigma13: Complex64,
    /// Contribution of the two second-derivative terms, already included in
    /// `sigma13`. The polariton reduction omits them.
    pub sigma13_curvature: Complex64,
    /// False when γ12/W12 or γ13/W13 exceeds [`AVERAGING_RATIO_LIMIT`].
    pub within_assumptions: bool,
}

/// On-resonance closed forms of the double-Lorentzian averages, as printed:
/// three terms for σ̄12 and six for σ̄13.
pub fn averaged_coherences(inputs: &CoherenceInputs, material: &MaterialSpec) -> Result<AveragedCoherences> {
    inputs.check()?;
    let g = inputs.coupling;
    let (w12, w13) = (material.w12, material.w13);
    let (g12, g13) = (material.gamma12, material.gamma13);
    let within_assumptions = [(g12, w12), (g13, w13)]
        .iter()
        .all(|&(gamma, w)| w > 0.0 && gamma / w <= AVERAGING_RATIO_LIMIT);
    if !within_assumptions {
        log::warn!("averaged coherences used outside γ ≪ W (γ12/W12 = {}, γ13/W13 = {})", g12 / w12, g13 / w13);
    }

    let e = inputs.field;
    let om = inputs.omega;
    let om2 = om * om;
    let inv_om = om.recip();
    let inv_om2 = inv_om * inv_om;
    let product = w12 * w13;
    let denom_inv = (om2 + product).recip();
    let denom2_inv = denom_inv * denom_inv;

    // −γ13Ω² + γ12W13² and −γ12Ω² + γ13W12²
    let spin_mix = om2 * (-g13) + g12 * w13 * w13;
    let optical_mix = om2 * (-g12) + g13 * w12 * w12;

    let sigma12 = -(e * om * denom_inv) * g
        - ((e * om * spin_mix * denom2_inv).dt() * inv_om2) * g
        - ((e * optical_mix * denom2_inv).dt() * inv_om) * g;

    let ig = I * g;
    let first_order = (e * optical_mix * denom2_inv).scale(-ig)
        - ((e * om * denom_inv * product).dt() * inv_om2 * inv_om).scale(ig)
        - ((e * denom_inv * (w12 * w12)).dt() * inv_om2).scale(ig)
        + ((e * om * denom_inv).dt() * inv_om).scale(ig);
    let curvature = (((e * optical_mix * denom2_inv).dt() * inv_om).dt() * inv_om).scale(ig)
        + (((e * om * spin_mix * denom2_inv).dt() * inv_om2).dt() * inv_om).scale(ig);

    Ok(AveragedCoherences {
        sigma12: sigma12.value,
        sigma13: first_order.value + curvature.value,
        sigma13_curvature: curvature.value,
        within_assumptions,
    })
}

/// Exact double-Lorentzian average of the static single-atom coherences.
///
/// The static σ12 and σ13 are analytic in each detuning on the half plane
/// away from the Lorentzian pole that closes the contour, so the average
/// replaces `Γ12 → −(W12 + γ12)` and `Γ13 → −(W13 + γ13)`:
/// σ̄12 = −gEΩ/(Ω² + W′12W′13), σ̄13 = igW′12E/(Ω² + W′12W′13).
pub fn stationary_lorentzian_average(
    field: Complex64,
    omega: f64,
    coupling: f64,
    material: &MaterialSpec,
) -> (Complex64, Complex64) {
    let w12 = material.w12 + material.gamma12;
    let w13 = material.w13 + material.gamma13;
    let denom = omega * omega + w12 * w13;
    (-field * coupling * omega / denom, I * field * coupling * w12 / denom)
}
