//! Control-field schedules and probe envelopes.
//!
//! Every schedule returns Ω(t) together with its first two time derivatives
//! in closed form, so downstream code never differences a sampled drive.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Threshold on ε = g·E/Ω(0) above which the weak-probe regime is doubted.
pub const WEAK_PROBE_LIMIT: f64 = 1e-2;

/// Shape of the write ramp (and, mirrored, of the read ramp).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum RampShape {
    /// Ω(t) = Ω0 at all times.
    Constant,
    /// Straight line from Ω0 to Ω(τ).
    LinearRamp,
    /// Smooth step `(tanh 3 − tanh(6u − 3)) / (2 tanh 3)` over the window.
    TanhRamp,
    /// Linear interpolation between `(t, Ω)` knots, clamped at both ends.
    Piecewise { knots: Vec<(f64, f64)> },
}

/// Read-out ramp started after the hold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalRamp {
    pub duration: f64,
    pub omega_final: f64,
}

/// Control field Rabi frequency as a function of time (rad/s).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriveSchedule {
    pub shape: RampShape,
    pub omega0: f64,
    pub omega_tau: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub hold_duration: f64,
    pub retrieval: Option<RetrievalRamp>,
}

/// Ω and its first two derivatives at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSample {
    pub omega: f64,
    pub omega_dot: f64,
    pub omega_ddot: f64,
}

const TANH_EDGE: f64 = 3.0;

/// Unit step falling from 1 at u = 0 to 0 at u = 1, with d/du and d²/du².
fn tanh_step(u: f64) -> (f64, f64, f64) {
    let norm = 2.0 * TANH_EDGE.tanh();
    let th = (2.0 * TANH_EDGE * u - TANH_EDGE).tanh();
    let sech2 = 1.0 - th * th;
    let k = 2.0 * TANH_EDGE;
    let value = (TANH_EDGE.tanh() - th) / norm;
    let d1 = -k * sech2 / norm;
    let d2 = 2.0 * k * k * th * sech2 / norm;
    (value, d1, d2)
}

/// Ramp `from → to` over `[t0, t0 + width]` with the given profile.
fn ramp(shape: &RampShape, from: f64, to: f64, t0: f64, width: f64, t: f64) -> DriveSample {
    let u = (t - t0) / width;
    if u <= 0.0 {
        return DriveSample { omega: from, omega_dot: 0.0, omega_ddot: 0.0 };
    }
    if u >= 1.0 {
        return DriveSample { omega: to, omega_dot: 0.0, omega_ddot: 0.0 };
    }
    match shape {
        RampShape::TanhRamp => {
            let (s, ds, dds) = tanh_step(u);
            let span = from - to;
            DriveSample {
                omega: to + span * s,
                omega_dot: span * ds / width,
                omega_ddot: span * dds / (width * width),
            }
        }
        _ => DriveSample {
            omega: from + (to - from) * u,
            omega_dot: (to - from) / width,
            omega_ddot: 0.0,
        },
    }
}

impl DriveSchedule {
    /// Constant control field.
    pub fn constant(omega: f64) -> Self {
        Self {
            shape: RampShape::Constant,
            omega0: omega,
            omega_tau: omega,
            t_start: 0.0,
            t_end: 1.0,
            hold_duration: 0.0,
            retrieval: None,
        }
    }

    /// Linear write ramp `omega0 → omega_tau` over `[t_start, t_end]`.
    pub fn linear(omega0: f64, omega_tau: f64, t_start: f64, t_end: f64) -> Self {
        Self {
            shape: RampShape::LinearRamp,
            omega0,
            omega_tau,
            t_start,
            t_end,
            hold_duration: 0.0,
            retrieval: None,
        }
    }

    pub fn with_hold(mut self, hold: f64) -> Self {
        self.hold_duration = hold;
        self
    }

    pub fn with_retrieval(mut self, duration: f64, omega_final: f64) -> Self {
        self.retrieval = Some(RetrievalRamp { duration, omega_final });
        self
    }

    pub fn with_shape(mut self, shape: RampShape) -> Self {
        self.shape = shape;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("omega0", self.omega0), ("omega_tau", self.omega_tau)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(name, format!("must be finite and non-negative, got {v}")));
            }
        }
        if let RampShape::Piecewise { knots } = &self.shape {
            if knots.is_empty() {
                return Err(Error::invalid("drive.knots", "at least one knot required"));
            }
            if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
                return Err(Error::invalid("drive.knots", "knot times must be strictly increasing"));
            }
            if knots.iter().any(|&(t, w)| !t.is_finite() || !w.is_finite() || w < 0.0) {
                return Err(Error::invalid("drive.knots", "knots must be finite with non-negative Ω"));
            }
            return Ok(());
        }
        if self.shape == RampShape::Constant {
            return Ok(());
        }
        if !(self.t_end > self.t_start) {
            return Err(Error::invalid(
                "t_end",
                format!("ramp window must have t_end > t_start, got [{}, {}]", self.t_start, self.t_end),
            ));
        }
        if self.omega0 < self.omega_tau {
            return Err(Error::invalid(
                "omega_tau",
                format!("storage ramp needs omega0 >= omega_tau, got {} < {}", self.omega0, self.omega_tau),
            ));
        }
        if !(self.hold_duration >= 0.0) {
            return Err(Error::invalid("hold_duration", "must be non-negative"));
        }
        if let Some(r) = &self.retrieval {
            if !(r.duration > 0.0) {
                return Err(Error::invalid("retrieval.duration", "must be positive"));
            }
            if !(r.omega_final >= 0.0) {
                return Err(Error::invalid("retrieval.omega_final", "must be non-negative"));
            }
        }
        Ok(())
    }

    /// Length of the write ramp τ.
    pub fn ramp_duration(&self) -> f64 {
        self.t_end - self.t_start
    }

    /// Time at which the read ramp starts.
    pub fn retrieval_start(&self) -> f64 {
        self.t_end + self.hold_duration
    }

    /// Time after which Ω no longer changes.
    pub fn settled_time(&self) -> f64 {
        match (&self.shape, &self.retrieval) {
            (RampShape::Constant, _) => self.t_start,
            (RampShape::Piecewise { knots }, _) => knots.last().map_or(0.0, |k| k.0),
            (_, Some(r)) => self.retrieval_start() + r.duration,
            (_, None) => self.t_end,
        }
    }

    /// Smallest Ω reached by the schedule.
    pub fn min_omega(&self) -> f64 {
        match &self.shape {
            RampShape::Constant => self.omega0,
            RampShape::Piecewise { knots } => knots.iter().map(|k| k.1).fold(f64::INFINITY, f64::min),
            _ => self.omega_tau,
        }
    }

    /// Largest Ω reached by the schedule.
    pub fn max_omega(&self) -> f64 {
        match &self.shape {
            RampShape::Constant => self.omega0,
            RampShape::Piecewise { knots } => knots.iter().map(|k| k.1).fold(0.0, f64::max),
            _ => {
                let read = self.retrieval.as_ref().map_or(0.0, |r| r.omega_final);
                self.omega0.max(read)
            }
        }
    }

    pub fn omega(&self, t: f64) -> f64 {
        self.sample(t).omega
    }

    pub fn omega_dot(&self, t: f64) -> f64 {
        self.sample(t).omega_dot
    }

    /// Ω, Ω̇ and Ω̈ at time `t`.
    pub fn sample(&self, t: f64) -> DriveSample {
        match &self.shape {
            RampShape::Constant => DriveSample { omega: self.omega0, omega_dot: 0.0, omega_ddot: 0.0 },
            RampShape::Piecewise { knots } => piecewise(knots, t),
            shape => {
                if t < self.retrieval_start() {
                    ramp(shape, self.omega0, self.omega_tau, self.t_start, self.ramp_duration(), t)
                } else if let Some(r) = &self.retrieval {
                    ramp(shape, self.omega_tau, r.omega_final, self.retrieval_start(), r.duration, t)
                } else {
                    DriveSample { omega: self.omega_tau, omega_dot: 0.0, omega_ddot: 0.0 }
                }
            }
        }
    }
}

fn piecewise(knots: &[(f64, f64)], t: f64) -> DriveSample {
    let flat = |omega| DriveSample { omega, omega_dot: 0.0, omega_ddot: 0.0 };
    let (first, last) = (knots[0], knots[knots.len() - 1]);
    if t <= first.0 {
        return flat(first.1);
    }
    if t >= last.0 {
        return flat(last.1);
    }
    let i = knots.partition_point(|k| k.0 <= t) - 1;
    let (a, b) = (knots[i], knots[i + 1]);
    let slope = (b.1 - a.1) / (b.0 - a.0);
    DriveSample { omega: a.1 + slope * (t - a.0), omega_dot: slope, omega_ddot: 0.0 }
}

/// Probe envelope shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Envelope {
    Gaussian,
    Sech,
}

/// Weak probe pulse injected at the medium entrance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeSpec {
    pub envelope: Envelope,
    /// Envelope amplitude E at the peak; the atoms see g·E.
    pub peak_amplitude: f64,
    /// 1/e half-width of the amplitude (s).
    pub duration: f64,
    pub arrival_time: f64,
}

impl ProbeSpec {
    pub fn gaussian(peak_amplitude: f64, duration: f64, arrival_time: f64) -> Self {
        Self { envelope: Envelope::Gaussian, peak_amplitude, duration, arrival_time }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.peak_amplitude.is_finite() || self.peak_amplitude < 0.0 {
            return Err(Error::invalid("probe.peak_amplitude", "must be finite and non-negative"));
        }
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            return Err(Error::invalid("probe.duration", format!("must be positive, got {}", self.duration)));
        }
        if !self.arrival_time.is_finite() {
            return Err(Error::invalid("probe.arrival_time", "must be finite"));
        }
        Ok(())
    }

    /// Expansion parameter ε = g·E/Ω(0).
    pub fn weak_probe_parameter(&self, coupling: f64, omega0: f64) -> f64 {
        coupling * self.peak_amplitude / omega0
    }

    /// Envelope value and its first two time derivatives.
    pub fn sample(&self, t: f64) -> (f64, f64, f64) {
        let a = self.peak_amplitude;
        match self.envelope {
            Envelope::Gaussian => {
                let x = (t - self.arrival_time) / self.duration;
                let f = a * (-x * x).exp();
                let d1 = -2.0 * x / self.duration * f;
                let d2 = (4.0 * x * x - 2.0) / (self.duration * self.duration) * f;
                (f, d1, d2)
            }
            Envelope::Sech => {
                // Scale so that the amplitude falls to 1/e at |t - t0| = duration.
                let k = std::f64::consts::E.acosh() / self.duration;
                let x = k * (t - self.arrival_time);
                let sech = 1.0 / x.cosh();
                let th = x.tanh();
                let f = a * sech;
                (f, -k * th * f, k * k * (th * th - sech * sech) * f)
            }
        }
    }

    pub fn amplitude(&self, t: f64) -> f64 {
        self.sample(t).0
    }

    /// ∫|E(t)|² dt over the whole pulse.
    pub fn energy(&self) -> f64 {
        let a2 = self.peak_amplitude * self.peak_amplitude;
        match self.envelope {
            Envelope::Gaussian => a2 * self.duration * (std::f64::consts::PI / 2.0).sqrt(),
            Envelope::Sech => 2.0 * a2 * self.duration / std::f64::consts::E.acosh(),
        }
    }
}
