//! Storage conditions and design quantities for a material and protocol.

mod presets;

pub use presets::{preset, presets, MaterialPreset, PRESET_NAMES};

use std::fmt;

use serde::Serialize;

use crate::drive::{DriveSchedule, ProbeSpec};
use crate::error::{Error, Result};
use crate::material::{rabi_to_intensity, MaterialSpec};
use crate::polariton::min_group_velocity;

/// Ratios used to decide strong (`≫`) and weak (`≳`) inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub much_greater: f64,
    pub at_least: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { much_greater: 100.0, at_least: 1.0 }
    }
}

/// One evaluated inequality `lhs ≥ threshold·rhs`, reported as
/// `margin = lhs/rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionEntry {
    pub name: String,
    pub formula: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub threshold: f64,
    pub pass: bool,
    /// Whether the entry takes part in the overall verdict.
    pub required: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ConditionEntry {
    fn ratio(name: &str, formula: &str, lhs: f64, rhs: f64, threshold: f64, required: bool) -> Self {
        let margin = if rhs == 0.0 {
            if lhs > 0.0 { f64::INFINITY } else { 0.0 }
        } else {
            lhs / rhs
        };
        Self {
            name: name.into(),
            formula: formula.into(),
            lhs,
            rhs,
            margin,
            threshold,
            // relative slack so that boundary cases built from square roots still pass
            pass: margin >= threshold * (1.0 - 1e-12),
            required,
            note: None,
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Power condition, collective-coupling condition and slow-entry regime.
pub fn evaluate_conditions(
    material: &MaterialSpec,
    g2n: f64,
    omega0: f64,
    omega_tau: f64,
    thresholds: &Thresholds,
) -> Vec<ConditionEntry> {
    let p = material.width_product();
    let om0_2 = omega0 * omega0;
    vec![
        ConditionEntry::ratio(
            "power-condition",
            "Omega(tau)^2 >= 3 W12 W13",
            omega_tau * omega_tau,
            3.0 * p,
            thresholds.at_least,
            true,
        ),
        ConditionEntry::ratio("collective-coupling", "g2N >> W12 W13", g2n, p, thresholds.much_greater, true),
        ConditionEntry::ratio(
            "slow-entry-broadening",
            "W12 W13 <= Omega0^2 / 10",
            om0_2 / 10.0,
            p,
            thresholds.at_least,
            false,
        ),
        ConditionEntry::ratio("slow-entry-coupling", "Omega0^2 <= g2N / 10", g2n / 10.0, om0_2, thresholds.at_least, false),
    ]
}

/// EIT transparency window `Ω²/W13` (rad/s).
pub fn transparency_window(omega: f64, w13: f64) -> Result<f64> {
    if !(w13 > 0.0) {
        return Err(Error::Domain(format!("W13 must be positive, got {w13}")));
    }
    Ok(omega * omega / w13)
}

/// Pulse bandwidth `1/duration` against the transparency window.
pub fn bandwidth_condition(duration: f64, window: f64, thresholds: &Thresholds) -> ConditionEntry {
    ConditionEntry::ratio("bandwidth", "1/duration <= Omega0^2 / W13", window, 1.0 / duration, thresholds.at_least, true)
}

/// Exponent of [`suppression_factor`].
pub fn suppression_exponent(field_ratio_k: f64) -> Result<f64> {
    if !(field_ratio_k > 0.0) {
        return Err(Error::Domain(format!("field ratio k must be positive, got {field_ratio_k}")));
    }
    let k2 = field_ratio_k * field_ratio_k;
    Ok((3.0 + 2.0 * k2) / (1.0 + k2).powi(2) + 2.0 * (k2 / (1.0 + k2)).ln())
}

/// Loss factor η from the θ̇-linear part of the nonadiabatic losses.
pub fn suppression_factor(field_ratio_k: f64) -> Result<f64> {
    suppression_exponent(field_ratio_k).map(f64::exp)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonadiabaticBounds {
    /// Lower bound on the ramp time τ.
    pub tau_min: f64,
    /// `g²N/(γ13 L_p²)`, as printed. Its units are not a length; kept for
    /// reference next to the bandwidth check.
    pub printed_length_bound: f64,
    /// k lies outside `(1, 10]`.
    pub extrapolated: bool,
}

/// Ramp-time bound `γ13Ω0/(k⁷(W12W13)^{3/2})` for a linear ramp.
pub fn nonadiabatic_bounds(
    material: &MaterialSpec,
    g2n: f64,
    omega0: f64,
    field_ratio_k: f64,
    pulse_length: f64,
) -> Result<NonadiabaticBounds> {
    if !(field_ratio_k > 1.0) {
        return Err(Error::Domain(format!("ramp-time bound needs k > 1, got {field_ratio_k}")));
    }
    if !(pulse_length > 0.0) {
        return Err(Error::Domain(format!("pulse length must be positive, got {pulse_length}")));
    }
    let p = material.width_product();
    Ok(NonadiabaticBounds {
        tau_min: material.gamma13 * omega0 / (field_ratio_k.powi(7) * p.powf(1.5)),
        printed_length_bound: g2n / (material.gamma13 * pulse_length * pulse_length),
        extrapolated: field_ratio_k > 10.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StoppingRegime {
    /// Pulse enters at c and is slowed by the ramp: z ≈ cτ.
    Naive,
    /// Pulse is already slow on entry: z = Ω0²cτ/(3g²N).
    SlowEntry,
}

pub fn stopping_distance(omega0: f64, g2n: f64, tau: f64, regime: StoppingRegime, light_speed: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::Domain(format!("ramp time must be positive, got {tau}")));
    }
    Ok(match regime {
        StoppingRegime::Naive => light_speed * tau,
        StoppingRegime::SlowEntry => omega0 * omega0 * light_speed * tau / (3.0 * g2n),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StorageTimes {
    pub inhomogeneous: f64,
    pub homogeneous: f64,
    pub practical: f64,
}

/// Storage-time scales `1/W12` and `1/γ12`; the practical limit is the shorter.
pub fn storage_time_limit(material: &MaterialSpec) -> StorageTimes {
    let (tw, tg) = material.storage_times();
    StorageTimes { inhomogeneous: tw, homogeneous: tg, practical: tw.min(tg) }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivedQuantities {
    pub v_g_min: f64,
    pub gamma_eit: f64,
    pub field_ratio_k: f64,
    pub eta: Option<f64>,
    pub eta_exponent: Option<f64>,
    pub intensity0: f64,
    pub intensity_tau: f64,
    pub ramp_time: f64,
    pub z_stop_naive: f64,
    pub z_stop_slow_entry: f64,
    pub tau_min: Option<f64>,
    pub printed_length_bound: Option<f64>,
    pub storage_time_w12: f64,
    pub storage_time_gamma12: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub material: String,
    pub g2n: f64,
    pub verdict: bool,
    pub conditions: Vec<ConditionEntry>,
    pub derived: DerivedQuantities,
}

/// Protocol inputs of a feasibility evaluation.
#[derive(Debug, Clone)]
pub struct Protocol<'a> {
    pub drive: &'a DriveSchedule,
    pub probe: &'a ProbeSpec,
    pub light_speed: f64,
    /// Physical medium length, if known.
    pub medium_length: Option<f64>,
}

pub fn feasibility_report(
    material: &MaterialSpec,
    g2n: f64,
    protocol: &Protocol<'_>,
    thresholds: &Thresholds,
) -> Result<FeasibilityReport> {
    material.validate()?;
    protocol.drive.validate()?;
    protocol.probe.validate()?;
    let drive = protocol.drive;
    let (omega0, omega_tau) = (drive.omega0, drive.omega_tau);
    let tau = drive.ramp_duration();
    let p = material.width_product();
    let c = protocol.light_speed;

    let mut conditions = evaluate_conditions(material, g2n, omega0, omega_tau, thresholds);
    let gamma_eit = transparency_window(omega0, material.w13)?;
    conditions.push(bandwidth_condition(protocol.probe.duration, gamma_eit, thresholds));

    let k = if p > 0.0 { omega_tau / p.sqrt() } else { f64::INFINITY };
    let eta_exponent = if k.is_finite() { suppression_exponent(k).ok() } else { Some(0.0) };
    let pulse_length = c * protocol.probe.duration;
    let bounds = if k > 1.0 && k.is_finite() {
        Some(nonadiabatic_bounds(material, g2n, omega0, k, pulse_length)?)
    } else {
        None
    };
    let mut ramp = match &bounds {
        Some(b) => ConditionEntry::ratio("adiabatic-ramp", "tau >> gamma13 Omega0 / (k^7 (W12 W13)^1.5)", tau, b.tau_min, thresholds.much_greater, true),
        None => ConditionEntry {
            name: "adiabatic-ramp".into(),
            formula: "tau >> gamma13 Omega0 / (k^7 (W12 W13)^1.5)".into(),
            lhs: tau,
            rhs: f64::NAN,
            margin: 0.0,
            threshold: thresholds.much_greater,
            pass: k.is_infinite(),
            required: true,
            note: None,
        },
    };
    if let Some(b) = &bounds {
        if b.extrapolated {
            ramp = ramp.with_note("k > 10: outside the range where the bound was derived");
        }
    } else if k.is_finite() {
        ramp = ramp.with_note("k <= 1: the ramp-time bound is not defined");
    } else {
        ramp = ramp.with_note("no inhomogeneous broadening: bound does not apply");
    }
    conditions.push(ramp);

    let storage = storage_time_limit(material);
    conditions.push(ConditionEntry::ratio("ramp-within-coherence", "tau <= 1/gamma12", storage.homogeneous, tau, thresholds.at_least, true));
    conditions.push(
        ConditionEntry::ratio("ramp-within-inhomogeneous-dephasing", "tau <= 1/W12", storage.inhomogeneous, tau, thresholds.at_least, false)
            .with_note("spin inhomogeneity dephases the stored coherence after ~1/W12"),
    );
    let field_ratio_range = ConditionEntry::ratio("field-ratio-range", "1 < k <= 10", 10.0, k, thresholds.at_least, false);
    conditions.push(if k > 1.0 { field_ratio_range } else { ConditionEntry { pass: false, ..field_ratio_range } });

    let z_slow = stopping_distance(omega0, g2n, tau, StoppingRegime::SlowEntry, c)?;
    if let Some(length) = protocol.medium_length {
        conditions.push(ConditionEntry::ratio("stopping-distance", "z_stop <= medium length", length, z_slow, thresholds.at_least, false));
    }
    if let Some(b) = &bounds {
        conditions.push(
            ConditionEntry::ratio("printed-length-bound", "z << g2N / (gamma13 Lp^2)", b.printed_length_bound, z_slow, thresholds.much_greater, false)
                .with_note("dimensionally inconsistent as printed; the bandwidth entry is the normative form"),
        );
    }

    let verdict = conditions.iter().filter(|c| c.required).all(|c| c.pass);
    let derived = DerivedQuantities {
        v_g_min: min_group_velocity(material, g2n, c),
        gamma_eit,
        field_ratio_k: k,
        eta: eta_exponent.map(f64::exp),
        eta_exponent,
        intensity0: rabi_to_intensity(omega0, material.d13)?,
        intensity_tau: rabi_to_intensity(omega_tau, material.d13)?,
        ramp_time: tau,
        z_stop_naive: stopping_distance(omega0, g2n, tau, StoppingRegime::Naive, c)?,
        z_stop_slow_entry: z_slow,
        tau_min: bounds.map(|b| b.tau_min),
        printed_length_bound: bounds.map(|b| b.printed_length_bound),
        storage_time_w12: storage.inhomogeneous,
        storage_time_gamma12: storage.homogeneous,
    };
    Ok(FeasibilityReport { material: material.name.clone(), g2n, verdict, conditions, derived })
}

impl FeasibilityReport {
    /// Pretty JSON; field order follows the struct definitions.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

impl fmt::Display for FeasibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "material: {}   g2N = {:.3e} (rad/s)^2", self.material, self.g2n)?;
        writeln!(f, "{:<36} {:>12} {:>12} {:>12}  {}", "condition", "lhs", "rhs", "margin", "result")?;
        for c in &self.conditions {
            let status = match (c.pass, c.required) {
                (true, _) => "pass",
                (false, true) => "FAIL",
                (false, false) => "fail (info)",
            };
            writeln!(f, "{:<36} {:>12.4e} {:>12.4e} {:>12.4e}  {status}", c.name, c.lhs, c.rhs, c.margin)?;
            if let Some(note) = &c.note {
                writeln!(f, "    note: {note}")?;
            }
        }
        let d = &self.derived;
        writeln!(f, "v_g,min = {:.4e} m/s   Gamma_EIT = {:.4e} rad/s   k = {:.4}", d.v_g_min, d.gamma_eit, d.field_ratio_k)?;
        match d.eta_exponent {
            Some(x) => writeln!(f, "eta = exp[{x:.6}]")?,
            None => writeln!(f, "eta = n/a")?,
        }
        writeln!(
            f,
            "I(0) = {:.4e} W/cm^2   I(tau) = {:.4e} W/cm^2",
            d.intensity0 * 1e-4,
            d.intensity_tau * 1e-4
        )?;
        writeln!(f, "z_stop naive = {:.4e} m   slow entry = {:.4e} m", d.z_stop_naive, d.z_stop_slow_entry)?;
        writeln!(f, "storage limits: 1/W12 = {:.4e} s   1/gamma12 = {:.4e} s", d.storage_time_w12, d.storage_time_gamma12)?;
        write!(f, "verdict: {}", if self.verdict { "PASS" } else { "FAIL" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::SPEED_OF_LIGHT;
    use crate::material::collective_cooperativity;

    fn broadened(product: f64, gamma13: f64) -> MaterialSpec {
        let w13 = 1e10;
        MaterialSpec {
            name: "t".into(),
            w12: product / w13,
            w13,
            gamma1: 0.0,
            gamma2: 0.0,
            gamma3: 0.0,
            gamma12: 1e3,
            gamma13,
            gamma23: gamma13,
            d13: 1e-30,
            density: 1e24,
            wavelength: 1e-6,
        }
    }

    #[test]
    fn collective_coupling_margin() {
        let m = broadened(1e15, 1e7);
        let c = evaluate_conditions(&m, 1e23, 1e9, 1e9, &Thresholds::default());
        let cc = c.iter().find(|c| c.name == "collective-coupling").unwrap();
        assert!(cc.pass);
        assert!((cc.margin / 1e8 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn power_condition_boundary() {
        let m = broadened(1e15, 1e7);
        let om_tau = (3e15f64).sqrt();
        let c = evaluate_conditions(&m, 1e23, 1e9, om_tau, &Thresholds::default());
        let pc = &c[0];
        assert!(pc.pass);
        assert!((pc.margin - 1.0).abs() < 1e-12);
        let slow = evaluate_conditions(&m, 1e20, 1e10, om_tau, &Thresholds::default());
        assert!(!slow.iter().find(|c| c.name == "slow-entry-coupling").unwrap().pass);
    }

    #[test]
    fn transparency() {
        let w = transparency_window(1e17f64.sqrt(), std::f64::consts::TAU * 1e9).unwrap();
        assert!((1e6..=1e8).contains(&w) && (w / 1.59e7 - 1.0).abs() < 0.01);
        let w2 = transparency_window(2.0 * 1e17f64.sqrt(), 6.3e9).unwrap();
        assert!((w2 / transparency_window(1e17f64.sqrt(), 6.3e9).unwrap() - 4.0).abs() < 1e-12);
        let bw = bandwidth_condition(1e-3, 1e7, &Thresholds::default());
        assert!(bw.pass && (bw.margin - 1e4).abs() < 1e-6);
    }

    #[test]
    fn suppression_values() {
        let x3 = suppression_exponent(3.0).unwrap();
        assert!((x3 - (0.21 + 2.0 * 0.9f64.ln())).abs() < 1e-15);
        assert!((x3 + 0.0007).abs() < 1e-4);
        assert!((suppression_exponent(1.0).unwrap() - (1.25 + 2.0 * 0.5f64.ln())).abs() < 1e-15);
        assert!(suppression_exponent(1e4).unwrap().abs() < 1e-12);
        assert!(suppression_factor(0.0).is_err());
        let mut prev = 0.0;
        for i in 0..=900 {
            let eta = suppression_factor(1.0 + i as f64 * 0.01).unwrap();
            assert!(eta > prev && eta < 1.0);
            prev = eta;
        }
    }

    #[test]
    fn ramp_time_bound() {
        let m = broadened(1e15, 1e7);
        let b = nonadiabatic_bounds(&m, 1e23, 1e17f64.sqrt(), 1.0 + 1e-9, 1e-3).unwrap();
        assert!((b.tau_min / 1e-7 - 1.0).abs() < 1e-6);
        let b2 = nonadiabatic_bounds(&m, 1e23, 1e17f64.sqrt(), 2.0 * (1.0 + 1e-9), 1e-3).unwrap();
        assert!((b.tau_min / b2.tau_min - 128.0).abs() < 1e-9);
        assert!(b.tau_min * 100.0 < 1.0 / m.gamma12);
        assert!(nonadiabatic_bounds(&m, 1e23, 1.0, 1.0, 1.0).is_err());
        assert!(nonadiabatic_bounds(&m, 1e23, 1.0, 12.0, 1.0).unwrap().extrapolated);
    }

    #[test]
    fn stopping_distances() {
        let c = SPEED_OF_LIGHT;
        assert!((stopping_distance(1.0, 1.0, 1e-6, StoppingRegime::Naive, c).unwrap() - 299.792458).abs() < 1e-9);
        let z = stopping_distance(1e17f64.sqrt(), 1e21, 1e-6, StoppingRegime::SlowEntry, c).unwrap();
        assert!((z - 1e-4 / 3.0 * c * 1e-6).abs() < 1e-15);
        assert!(stopping_distance(1.0, 1e300, 1.0, StoppingRegime::SlowEntry, c).unwrap() < 1e-290);
        assert!(stopping_distance(1.0, 1.0, 0.0, StoppingRegime::Naive, c).is_err());
    }

    #[test]
    fn storage_times() {
        let mut m = broadened(1e15, 1e7);
        m.w12 = std::f64::consts::TAU * 1e4;
        let s = storage_time_limit(&m);
        assert!((s.inhomogeneous - 1.59e-5).abs() < 1e-7);
        assert_eq!(s.practical, s.inhomogeneous);
        m.gamma12 = m.w12;
        let s = storage_time_limit(&m);
        assert_eq!(s.inhomogeneous, s.homogeneous);
    }

    fn typical_report(omega_tau_factor: f64) -> FeasibilityReport {
        let m = preset("rare-earth-crystal-typical").unwrap().material;
        let p = m.width_product();
        let drive = DriveSchedule::linear(1e17f64.sqrt(), omega_tau_factor * p.sqrt(), 0.0, 1e-5);
        let probe = ProbeSpec::gaussian(1.0, 1e-6, 0.0);
        let protocol = Protocol { drive: &drive, probe: &probe, light_speed: SPEED_OF_LIGHT, medium_length: None };
        feasibility_report(&m, collective_cooperativity(&m), &protocol, &Thresholds::default()).unwrap()
    }

    #[test]
    fn typical_preset_passes() {
        let r = typical_report(3.0);
        assert!(r.verdict, "{r}");
        let i_w_cm2 = r.derived.intensity0 * 1e-4;
        assert!((50.0..=500.0).contains(&i_w_cm2), "{i_w_cm2}");
        assert!((r.derived.eta_exponent.unwrap() + 0.0007).abs() < 1e-4);
        assert_eq!(r.to_json().unwrap(), typical_report(3.0).to_json().unwrap());
    }

    #[test]
    fn zero_final_field_fails_power_condition() {
        let r = typical_report(0.0);
        assert!(!r.verdict);
        assert!(!r.conditions.iter().find(|c| c.name == "power-condition").unwrap().pass);
        assert_eq!(r.derived.eta, None);
    }

    #[test]
    fn inflated_fiber_fails_collective_coupling() {
        let mut m = preset("doped-fiber-indicative").unwrap().material;
        let g2n = collective_cooperativity(&m);
        m.w12 *= 1e3;
        m.w13 *= 1e3;
        let drive = DriveSchedule::linear(1e30f64.sqrt(), 3.0 * m.width_product().sqrt(), 0.0, 1e-6);
        let probe = ProbeSpec::gaussian(1.0, 1e-6, 0.0);
        let protocol = Protocol { drive: &drive, probe: &probe, light_speed: SPEED_OF_LIGHT, medium_length: None };
        let r = feasibility_report(&m, g2n, &protocol, &Thresholds::default()).unwrap();
        assert!(!r.verdict);
        assert!(!r.conditions.iter().find(|c| c.name == "collective-coupling").unwrap().pass);
    }
}
