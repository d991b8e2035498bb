//! Dark/bright polariton picture of the averaged medium and the reduced
//! equation of motion for the dark-state polariton Ψ.

mod reduced;

pub use reduced::{evolve_reduced, predicted_efficiency, ReducedMethod, ReducedRun, ReducedValidity};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::material::MaterialSpec;

/// Rotation angle between probe field and spin coherence,
/// `tan θ = g√N / Ω`, in `[0, π/2]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct MixingAngle(f64);

impl MixingAngle {
    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn cos(self) -> f64 {
        self.0.cos()
    }

    pub fn sin(self) -> f64 {
        self.0.sin()
    }

    pub fn tan(self) -> f64 {
        self.0.tan()
    }

    pub fn from_radians(theta: f64) -> Self {
        Self(theta)
    }
}

pub fn mixing_angle(omega: f64, g2n: f64) -> MixingAngle {
    MixingAngle(g2n.sqrt().atan2(omega))
}

/// dθ/dt from Ω and dΩ/dt.
pub fn mixing_angle_rate(omega: f64, omega_dot: f64, g2n: f64) -> f64 {
    -g2n.sqrt() * omega_dot / (omega * omega + g2n)
}

/// `(Ψ, Φ)` from the probe envelope and the averaged spin coherence of
/// `atoms` dopants.
pub fn polariton_transform(
    field: Complex64,
    sigma12: Complex64,
    atoms: f64,
    theta: MixingAngle,
) -> (Complex64, Complex64) {
    let spin = sigma12 * atoms.sqrt();
    let (s, c) = theta.0.sin_cos();
    (field * c - spin * s, field * s + spin * c)
}

/// `(E, σ̄12)` from the polariton amplitudes.
pub fn inverse_polariton_transform(
    psi: Complex64,
    phi: Complex64,
    atoms: f64,
    theta: MixingAngle,
) -> (Complex64, Complex64) {
    let (s, c) = theta.0.sin_cos();
    (psi * c + phi * s, (-psi * s + phi * c) / atoms.sqrt())
}

/// Dark-polariton loss rate `Ω²(Ω²γ12 − W12²γ13)/(Ω² + W12W13)²`.
pub fn gamma_psi(omega: f64, material: &MaterialSpec) -> f64 {
    let om2 = omega * omega;
    let denom = om2 + material.width_product();
    if denom == 0.0 {
        // Ω → 0 on a homogeneous spin line.
        return material.gamma12;
    }
    om2 * (om2 * material.gamma12 - material.w12 * material.w12 * material.gamma13) / (denom * denom)
}

/// Power condition `Ω² ≥ 3·W12W13` that keeps the bright polariton empty.
pub fn satisfies_power_condition(omega: f64, material: &MaterialSpec) -> bool {
    omega * omega >= 3.0 * material.width_product()
}

/// Slowest polariton speed `c·W12W13/(W12W13 + g²N)`, reached at
/// Ω² ≈ W12W13.
pub fn min_group_velocity(material: &MaterialSpec, g2n: f64, light_speed: f64) -> f64 {
    let p = material.width_product();
    if p + g2n == 0.0 {
        return light_speed;
    }
    light_speed * p / (p + g2n)
}

/// Loss, velocity and spreading coefficients of the reduced equation at one
/// instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientSet {
    pub theta: f64,
    pub theta_dot: f64,
    /// Kernel coefficients α, β (s).
    pub alpha: f64,
    pub beta: f64,
    /// `sin²θ·W12W13/(Ω² + W12W13)`.
    pub gamma_c: f64,
    /// `W12W13(Ω² − W12W13)/(Ω² + W12W13)²`.
    pub delta_c: f64,
    /// Amplitude loss rate (1/s).
    pub a: f64,
    /// Velocity correction in units of c.
    pub b: f64,
    /// Spreading coefficient (s), multiplies c²∂z².
    pub c: f64,
    pub gamma_psi: f64,
}

fn kernel_alpha(om2: f64, m: &MaterialSpec) -> f64 {
    let p = m.width_product();
    (m.gamma13 * om2 * (3.0 * p - om2) + m.gamma12 * m.w13 * m.w13 * (3.0 * om2 - p)) / (om2 + p).powi(3)
}

fn kernel_beta(om2: f64, sin2: f64, m: &MaterialSpec) -> f64 {
    let p = m.width_product();
    sin2 * ((m.gamma12 + m.gamma13) * om2 - m.gamma12 * m.w13 * m.w13 - m.gamma13 * m.w12 * m.w12)
        / (om2 + p).powi(2)
}

/// Coefficients A, B, C of the near-adiabatic polariton equation
/// `(∂t + c cos²θ ∂z)Ψ = −AΨ + Bc∂zΨ + Cc²∂z²Ψ`.
///
/// One term of A carries a stray factor g²N, which would give A the units of
/// s⁻³; it is evaluated as `−2γ²cotθ csc²θ` so every term is a rate.
pub fn nonadiabatic_coefficients(
    omega: f64,
    omega_dot: f64,
    material: &MaterialSpec,
    g2n: f64,
) -> CoefficientSet {
    let om2 = omega * omega;
    let p = material.width_product();
    let theta = mixing_angle(omega, g2n);
    let (sin, cos) = theta.0.sin_cos();
    let (sin2, cos2) = (sin * sin, cos * cos);
    let tan = sin / cos;
    let cot = cos / sin;
    let theta_dot = mixing_angle_rate(omega, omega_dot, g2n);

    let alpha = kernel_alpha(om2, material);
    let beta = kernel_beta(om2, sin2, material);
    let gamma_c = sin2 * p / (om2 + p);
    let delta_c = p * (om2 - p) / (om2 + p).powi(2);
    let gp = gamma_psi(omega, material);
    let ab = alpha + beta;
    let g2 = gamma_c * gamma_c;

    let first_order = gamma_c * cot + gamma_c * tan
        - ab * tan * sin2 * gp
        - (1.0 + gamma_c) * delta_c * tan
        - 2.0 * g2 * cot
        + g2 * tan
        - 2.0 * g2 * cot / sin2;
    let a = (1.0 + gamma_c) * sin2 * gp + theta_dot * first_order
        - theta_dot * theta_dot * ab * (1.0 - gamma_c - delta_c * tan * tan);
    let b = -2.0 * gamma_c * cos2 - beta * gp * sin2 * cos2
        + theta_dot * sin * cos * (alpha + beta * (1.0 + cot * cot - delta_c - gamma_c * cot * cot));
    let c = beta * cos2 * cos2;

    CoefficientSet { theta: theta.0, theta_dot, alpha, beta, gamma_c, delta_c, a, b, c, gamma_psi: gp }
}

/// Bright polariton slaved to Ψ.
///
/// With `adiabatic_only` set, returns `W12W13 sinθ cosθ/(Ω² + W12W13)·Ψ`;
/// otherwise adds the `−(α+β)θ̇Ψ` and `β cotθ Ψ̇` corrections.
pub fn bright_state_amplitude(
    psi: Complex64,
    psi_dot: Complex64,
    omega: f64,
    theta_dot: f64,
    material: &MaterialSpec,
    g2n: f64,
    adiabatic_only: bool,
) -> Result<Complex64> {
    if !satisfies_power_condition(omega, material) {
        log::warn!("bright-state estimate outside the power condition Ω² ≳ 3·W12W13");
    }
    let om2 = omega * omega;
    let p = material.width_product();
    let theta = mixing_angle(omega, g2n);
    let (sin, cos) = theta.0.sin_cos();
    let mixing = p * sin * cos / (om2 + p);
    if adiabatic_only {
        return Ok(psi * mixing);
    }
    let alpha = kernel_alpha(om2, material);
    let beta = kernel_beta(om2, sin * sin, material);
    let mut phi = psi * (mixing - (alpha + beta) * theta_dot);
    if psi_dot != Complex64::ZERO {
        if sin == 0.0 {
            return Err(Error::Singular("θ = 0 with the cot θ·Ψ̇ term requested".into()));
        }
        phi += psi_dot * (beta * cos / sin);
    }
    Ok(phi)
}
