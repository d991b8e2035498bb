//! Single-atom equations of motion of the Λ system.

use num_complex::Complex64;
use std::ops::{Add, Mul};

use crate::material::MaterialSpec;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Density-matrix elements of one atom. The lower triangle is implied by
/// Hermiticity (σ21 = σ12*, σ31 = σ13*, σ32 = σ23*).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AtomState {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub s12: Complex64,
    pub s13: Complex64,
    pub s23: Complex64,
}

impl AtomState {
    /// All population in |1⟩.
    pub fn ground() -> Self {
        Self { p1: 1.0, ..Self::default() }
    }

    pub fn trace(&self) -> f64 {
        self.p1 + self.p2 + self.p3
    }

    pub fn is_finite(&self) -> bool {
        [self.p1, self.p2, self.p3, self.s12.re, self.s12.im, self.s13.re, self.s13.im, self.s23.re, self.s23.im]
            .iter()
            .all(|v| v.is_finite())
    }
}

impl Add for AtomState {
    type Output = AtomState;
    fn add(self, o: AtomState) -> AtomState {
        AtomState {
            p1: self.p1 + o.p1,
            p2: self.p2 + o.p2,
            p3: self.p3 + o.p3,
            s12: self.s12 + o.s12,
            s13: self.s13 + o.s13,
            s23: self.s23 + o.s23,
        }
    }
}

impl Mul<f64> for AtomState {
    type Output = AtomState;
    fn mul(self, h: f64) -> AtomState {
        AtomState { p1: self.p1 * h, p2: self.p2 * h, p3: self.p3 * h, s12: self.s12 * h, s13: self.s13 * h, s23: self.s23 * h }
    }
}

/// Decay constants of one detuning class: `Γ′ij = −iΔij − γij` with both
/// lasers on resonance, so Δ12 = Δω12, Δ13 = Δω13, Δ23 = Δω13 − Δω12.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassRates {
    pub gamma12: Complex64,
    pub gamma13: Complex64,
    pub gamma23: Complex64,
    pub decay1: f64,
    pub decay2: f64,
    pub decay3: f64,
}

impl ClassRates {
    pub fn new(material: &MaterialSpec, detuning12: f64, detuning13: f64) -> Self {
        Self {
            gamma12: Complex64::new(-material.gamma12, -detuning12),
            gamma13: Complex64::new(-material.gamma13, -detuning13),
            gamma23: Complex64::new(-material.gamma23, -(detuning13 - detuning12)),
            decay1: material.gamma1,
            decay2: material.gamma2,
            decay3: material.gamma3,
        }
    }

    /// Largest magnitude among the rates, used for step-size checks.
    pub fn fastest(&self) -> f64 {
        [self.gamma12.norm(), self.gamma13.norm(), self.gamma23.norm(), self.decay1, self.decay2, self.decay3]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Time derivative of one atom driven by the probe Rabi frequency
/// `probe = g·E` and the control Rabi frequency `omega`. Noise terms omitted.
#[inline]
pub fn atom_derivatives(s: &AtomState, probe: Complex64, omega: Complex64, r: &ClassRates) -> AtomState {
    let probe_pump = (probe.conj() * s.s13).im;
    let control_pump = (omega.conj() * s.s23).im;
    AtomState {
        p1: -r.decay1 * s.p1 - 2.0 * probe_pump,
        p2: -r.decay2 * s.p2 - 2.0 * control_pump,
        p3: -r.decay3 * s.p3 + 2.0 * probe_pump + 2.0 * control_pump,
        s13: r.gamma13 * s.s13 + I * (probe * (s.p1 - s.p3) + omega * s.s12),
        s23: r.gamma23 * s.s23 + I * (s.s12.conj() * probe + omega * (s.p2 - s.p3)),
        s12: r.gamma12 * s.s12 + I * (omega.conj() * s.s13 - probe * s.s23.conj()),
    }
}

/// One classical RK4 step with the probe interpolated linearly between
/// `probe0` (start) and `probe1` (end) and the control sampled at the three
/// stage times.
#[inline]
pub fn rk4_step(
    s: &AtomState,
    probe0: Complex64,
    probe1: Complex64,
    omega: [Complex64; 3],
    r: &ClassRates,
    dt: f64,
) -> AtomState {
    let probe_mid = (probe0 + probe1) * 0.5;
    let k1 = atom_derivatives(s, probe0, omega[0], r);
    let k2 = atom_derivatives(&(*s + k1 * (0.5 * dt)), probe_mid, omega[1], r);
    let k3 = atom_derivatives(&(*s + k2 * (0.5 * dt)), probe_mid, omega[1], r);
    let k4 = atom_derivatives(&(*s + k3 * dt), probe1, omega[2], r);
    *s + (k1 + (k2 + k3) * 2.0 + k4) * (dt / 6.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn material() -> MaterialSpec {
        MaterialSpec {
            name: "t".into(),
            w12: 0.0,
            w13: 0.0,
            gamma1: 0.0,
            gamma2: 0.0,
            gamma3: 0.0,
            gamma12: 0.0,
            gamma13: 0.0,
            gamma23: 0.0,
            d13: 1e-30,
            density: 1.0,
            wavelength: 1e-6,
        }
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn dark_vacuum_is_stationary() {
        let r = ClassRates::new(&material(), 0.0, 0.0);
        let d = atom_derivatives(&AtomState::ground(), Complex64::ZERO, Complex64::ZERO, &r);
        assert_eq!(d, AtomState::default());
    }

    #[test]
    fn trace_conserved_without_decay() {
        let r = ClassRates::new(&material(), 0.3, -1.2);
        let s = AtomState { p1: 0.5, p2: 0.3, p3: 0.2, s12: c(0.1, 0.2), s13: c(-0.05, 0.1), s23: c(0.02, -0.07) };
        let d = atom_derivatives(&s, c(0.4, -0.3), c(1.5, 0.2), &r);
        assert!(d.trace().abs() < 1e-16);
    }

    #[test]
    fn constant_fields_relax_to_perturbative_steady_state() {
        let mut m = material();
        m.gamma12 = 0.05;
        m.gamma13 = 1.0;
        m.gamma23 = 1.0;
        let r = ClassRates::new(&m, 0.2, -0.7);
        let (probe, omega) = (c(1e-3, 0.0), c(2.0, 0.0));
        let mut s = AtomState::ground();
        let dt = 0.01;
        for _ in 0..40_000 {
            s = rk4_step(&s, probe, probe, [omega; 3], &r, dt);
        }
        let d = omega * omega + r.gamma12 * r.gamma13;
        let s12 = -probe * omega / d;
        let s13 = -I * r.gamma12 * probe / d;
        assert!((s.s12 - s12).norm() < 1e-3 * s12.norm(), "{} vs {s12}", s.s12);
        assert!((s.s13 - s13).norm() < 1e-3 * s13.norm(), "{} vs {s13}", s.s13);
    }
}
