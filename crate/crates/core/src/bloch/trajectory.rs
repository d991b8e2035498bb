//! Storage/retrieval runs and their diagnostics.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use super::solver::EnsembleState;
use crate::drive::{DriveSchedule, ProbeSpec, RampShape};
use crate::error::{Error, Result};
use crate::grid::SimGrid;
use crate::material::Medium;
use crate::polariton::{mixing_angle, polariton_transform};

/// Output leaking before the write ramp ends, as a fraction of the input,
/// above which a run is flagged.
pub const LEAK_LIMIT: f64 = 0.05;

/// Medium profile at one lab time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Snapshot {
    pub time: f64,
    /// Probe envelope at the cell centres (same units as the probe amplitude).
    pub field: Vec<Complex64>,
    pub sigma12: Vec<Complex64>,
    pub sigma13: Vec<Complex64>,
    pub sigma33: Vec<f64>,
    /// ∫|E|²dz.
    pub pulse_energy: f64,
    /// N·∫|σ̄12|²dz.
    pub spin_energy: f64,
    /// ∫|Ψ|²dz and ∫|Φ|²dz with θ taken from Ω at this time.
    pub dark_energy: f64,
    pub bright_energy: f64,
}

/// Excitation bookkeeping in units of c·∫|E|²dτ. Without decay,
/// `injected = emitted + stored` up to discretization error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExcitationBudget {
    pub injected: f64,
    pub emitted: f64,
    /// N·∫(σ̄22 + σ̄33)dz at the end of the run.
    pub stored: f64,
}

impl ExcitationBudget {
    /// `(injected − emitted − stored)/injected`, or `None` without input.
    pub fn relative_residual(&self) -> Option<f64> {
        (self.injected > 0.0).then(|| (self.injected - self.emitted - self.stored) / self.injected)
    }
}

/// Result of a full run.
#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub medium: Medium,
    pub drive: DriveSchedule,
    pub probe: ProbeSpec,
    pub z: Vec<f64>,
    pub dz: f64,
    pub length: f64,
    /// Retarded time of the boundary series.
    pub tau: Vec<f64>,
    /// Probe envelope entering at z_min and leaving at z_max, indexed by τ.
    pub input: Vec<Complex64>,
    pub output: Vec<Complex64>,
    pub snapshots: Vec<Snapshot>,
    pub excitation: ExcitationBudget,
}

/// Scalar diagnostics of a trajectory. `None` marks a metric that could not
/// be measured (no pulse, flat field, pulse never inside the medium).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryMetrics {
    /// Released over input pulse energy.
    pub efficiency: f64,
    /// All output over input pulse energy.
    pub transmission: f64,
    /// Output leaving before the write ramp ends, over input energy.
    pub leak_fraction: f64,
    pub insufficient_stopping_distance: bool,
    /// Peak-to-peak lab-frame transit time.
    pub transit_time: Option<f64>,
    /// Lab times at which the input peak enters and the released peak leaves.
    pub dwell: Option<(f64, f64)>,
    pub group_velocity: Option<f64>,
    /// Spatial rms length inside the medium over the free-space length c·(rms duration).
    pub compression_ratio: Option<f64>,
    pub peak_bright_fraction: Option<f64>,
    /// Best time-shifted overlap |⟨E_out|E_in⟩|² of the released and input envelopes.
    pub fidelity: Option<f64>,
    pub excitation_residual: Option<f64>,
}

fn snapshot_times(grid: &SimGrid) -> Vec<f64> {
    match grid.n_snapshots {
        0 => Vec::new(),
        1 => vec![grid.t_max],
        n => (0..n).map(|k| grid.t_max * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Snapshot under construction: cells are filled as the retarded time
/// passes `time − (z − z_min)/c`, exit side first.
struct PendingSnapshot {
    time: f64,
    /// Lowest cell index already captured.
    filled_from: usize,
    field: Vec<Complex64>,
    sigma12: Vec<Complex64>,
    sigma13: Vec<Complex64>,
    sigma33: Vec<f64>,
}

impl PendingSnapshot {
    fn new(time: f64, n: usize) -> Self {
        Self {
            time,
            filled_from: n,
            field: vec![Complex64::ZERO; n],
            sigma12: vec![Complex64::ZERO; n],
            sigma13: vec![Complex64::ZERO; n],
            sigma33: vec![0.0; n],
        }
    }

    fn capture(&mut self, state: &EnsembleState, force: bool) {
        let c = state.medium().light_speed;
        let g = state.medium().coupling;
        while self.filled_from > 0 {
            let j = self.filled_from - 1;
            let due = self.time - (j as f64 + 0.5) * state.dz() / c;
            if !force && due > state.tau() + 1e-12 * state.tau().abs().max(1.0) {
                break;
            }
            let avg = state.cell_averages(j);
            self.field[j] = state.center_field(j) / g;
            self.sigma12[j] = avg.sigma12;
            self.sigma13[j] = avg.sigma13;
            self.sigma33[j] = avg.sigma33;
            self.filled_from = j;
        }
    }

    fn finish(self, medium: &Medium, drive: &DriveSchedule, dz: f64) -> Snapshot {
        let atoms = medium.atom_number();
        let theta = mixing_angle(drive.omega(self.time), medium.g2n);
        let (mut dark, mut bright) = (0.0, 0.0);
        for (e, s) in self.field.iter().zip(&self.sigma12) {
            let (psi, phi) = polariton_transform(*e, *s, atoms, theta);
            dark += psi.norm_sqr();
            bright += phi.norm_sqr();
        }
        Snapshot {
            time: self.time,
            pulse_energy: self.field.iter().map(|v| v.norm_sqr()).sum::<f64>() * dz,
            spin_energy: atoms * self.sigma12.iter().map(|v| v.norm_sqr()).sum::<f64>() * dz,
            dark_energy: dark * dz,
            bright_energy: bright * dz,
            field: self.field,
            sigma12: self.sigma12,
            sigma13: self.sigma13,
            sigma33: self.sigma33,
        }
    }
}

/// Runs inject → write ramp → hold → read ramp → release on the full
/// ensemble model over `[0, grid.t_max]`.
pub fn run_storage_protocol(
    medium: &Medium,
    drive: &DriveSchedule,
    probe: &ProbeSpec,
    grid: &SimGrid,
) -> Result<Trajectory> {
    let mut state = EnsembleState::new(medium, drive, probe, grid)?;
    let g = medium.coupling;
    let n_steps = grid.n_steps();
    let mut tau = Vec::with_capacity(n_steps + 1);
    let mut input = Vec::with_capacity(n_steps + 1);
    let mut output = Vec::with_capacity(n_steps + 1);
    let mut pending: Vec<PendingSnapshot> =
        snapshot_times(grid).into_iter().map(|t| PendingSnapshot::new(t, grid.n_z)).collect();

    let record = |state: &EnsembleState, tau: &mut Vec<f64>, input: &mut Vec<_>, output: &mut Vec<_>| {
        tau.push(state.tau());
        input.push(state.entrance() / g);
        output.push(state.exit() / g);
    };
    record(&state, &mut tau, &mut input, &mut output);
    pending.iter_mut().for_each(|p| p.capture(&state, false));
    for _ in 0..n_steps {
        state.step()?;
        record(&state, &mut tau, &mut input, &mut output);
        pending.iter_mut().for_each(|p| p.capture(&state, false));
    }
    pending.iter_mut().for_each(|p| p.capture(&state, true));

    let flux = |series: &[Complex64]| medium.light_speed * trapezoid(series, grid.dt);
    let excitation = ExcitationBudget {
        injected: flux(&input),
        emitted: flux(&output),
        stored: state.atomic_excitation() / (g * g),
    };
    let dz = grid.dz();
    Ok(Trajectory {
        medium: medium.clone(),
        drive: drive.clone(),
        probe: *probe,
        z: grid.cell_centers(),
        dz,
        length: grid.length(),
        tau,
        input,
        output,
        snapshots: pending.into_iter().map(|p| p.finish(medium, drive, dz)).collect(),
        excitation,
    })
}

fn trapezoid(series: &[Complex64], dt: f64) -> f64 {
    let n = series.len();
    if n < 2 {
        return 0.0;
    }
    let inner: f64 = series.iter().map(|v| v.norm_sqr()).sum();
    (inner - 0.5 * (series[0].norm_sqr() + series[n - 1].norm_sqr())) * dt
}

/// Peak position of |series| by a parabola through the largest sample and
/// its neighbours. `None` when the maximum sits on either end of the window
/// or the series is zero.
fn peak_time(times: &[f64], series: &[f64]) -> Option<f64> {
    let (i, &max) = series.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    if max <= 0.0 || i == 0 || i + 1 == series.len() {
        return None;
    }
    let (a, b, c) = (series[i - 1], max, series[i + 1]);
    let curv = a - 2.0 * b + c;
    let shift = if curv < 0.0 { 0.5 * (a - c) / curv } else { 0.0 };
    Some(times[i] + shift * (times[i + 1] - times[i]))
}

/// rms width of a non-negative profile on uniform spacing `h`.
fn rms_width(profile: &[f64], h: f64) -> Option<f64> {
    let total: f64 = profile.iter().sum();
    if total <= 0.0 {
        return None;
    }
    let mean = profile.iter().enumerate().map(|(i, p)| i as f64 * p).sum::<f64>() / total;
    let var = profile.iter().enumerate().map(|(i, p)| (i as f64 - mean).powi(2) * p).sum::<f64>() / total;
    Some(var.sqrt() * h)
}

/// max over shifts of |Σ a*(τ) b(τ − s)|² / (Σ|a|² Σ|b|²).
fn shifted_overlap(a: &[Complex64], b: &[Complex64]) -> Option<f64> {
    let na: f64 = a.iter().map(|v| v.norm_sqr()).sum();
    let nb: f64 = b.iter().map(|v| v.norm_sqr()).sum();
    if na <= 0.0 || nb <= 0.0 {
        return None;
    }
    let n = (a.len() + b.len()).next_power_of_two();
    let mut fa: Vec<Complex64> = a.iter().copied().chain(std::iter::repeat(Complex64::ZERO)).take(n).collect();
    let mut fb: Vec<Complex64> = b.iter().copied().chain(std::iter::repeat(Complex64::ZERO)).take(n).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut fa);
    planner.plan_fft_forward(n).process(&mut fb);
    let mut cross: Vec<Complex64> = fa.iter().zip(&fb).map(|(x, y)| x.conj() * y).collect();
    planner.plan_fft_inverse(n).process(&mut cross);
    let scale = 1.0 / n as f64;
    let best = cross.iter().map(|v| (v * scale).norm_sqr()).fold(0.0, f64::max);
    Some((best / (na * nb)).min(1.0))
}

/// Lab time after which output counts as released.
fn release_start(drive: &DriveSchedule) -> f64 {
    match (&drive.shape, &drive.retrieval) {
        (RampShape::Constant, _) => f64::NEG_INFINITY,
        (_, Some(_)) => drive.retrieval_start(),
        (_, None) => drive.t_end,
    }
}

/// Lab time before which output counts as leaked, if the drive stores at all.
fn leak_end(drive: &DriveSchedule) -> Option<f64> {
    match drive.shape {
        RampShape::Constant => None,
        _ => Some(drive.t_end),
    }
}

pub fn analyze_trajectory(t: &Trajectory) -> Result<TrajectoryMetrics> {
    if t.tau.is_empty() {
        return Err(Error::Domain("empty trajectory".into()));
    }
    let dt = if t.tau.len() > 1 { t.tau[1] - t.tau[0] } else { 0.0 };
    let transit_light = t.length / t.medium.light_speed;
    let exit_lab = |tau: f64| tau + transit_light;
    let input_energy = trapezoid(&t.input, dt);

    let release_from = release_start(&t.drive);
    let released: Vec<Complex64> = t
        .tau
        .iter()
        .zip(&t.output)
        .map(|(&tau, &e)| if exit_lab(tau) >= release_from { e } else { Complex64::ZERO })
        .collect();
    let leaked: Vec<Complex64> = match leak_end(&t.drive) {
        Some(end) => {
            t.tau.iter().zip(&t.output).map(|(&tau, &e)| if exit_lab(tau) < end { e } else { Complex64::ZERO }).collect()
        }
        None => Vec::new(),
    };
    let ratio = |x: f64| if input_energy > 0.0 { x / input_energy } else { 0.0 };
    let efficiency = ratio(trapezoid(&released, dt));
    let transmission = ratio(trapezoid(&t.output, dt));
    let leak_fraction = ratio(trapezoid(&leaked, dt));

    let abs = |s: &[Complex64]| s.iter().map(|v| v.norm()).collect::<Vec<_>>();
    let dwell = match (peak_time(&t.tau, &abs(&t.input)), peak_time(&t.tau, &abs(&released))) {
        (Some(a), Some(b)) => Some((a, exit_lab(b))),
        _ => None,
    };
    let transit_time = dwell.map(|(a, b)| b - a);
    let group_velocity = transit_time.filter(|&d| d > 0.0).map(|d| t.length / d);

    let compression_ratio = rms_width(&t.input.iter().map(|v| v.norm_sqr()).collect::<Vec<_>>(), dt)
        .filter(|&w| w > 0.0)
        .and_then(|duration| {
            t.snapshots
                .iter()
                .filter(|s| contained(&s.field))
                .max_by(|a, b| a.pulse_energy.total_cmp(&b.pulse_energy))
                .and_then(|s| rms_width(&s.field.iter().map(|v| v.norm_sqr()).collect::<Vec<_>>(), t.dz))
                .map(|w| w / (t.medium.light_speed * duration))
        });

    let total = |s: &Snapshot| s.dark_energy + s.bright_energy;
    let largest = t.snapshots.iter().map(total).fold(0.0, f64::max);
    let peak_bright_fraction = t
        .snapshots
        .iter()
        .filter(|s| largest > 0.0 && total(s) > 1e-6 * largest)
        .map(|s| s.bright_energy / total(s))
        .reduce(f64::max);

    Ok(TrajectoryMetrics {
        efficiency,
        transmission,
        leak_fraction,
        insufficient_stopping_distance: leak_fraction > LEAK_LIMIT,
        transit_time,
        dwell,
        group_velocity,
        compression_ratio,
        peak_bright_fraction,
        fidelity: shifted_overlap(&released, &t.input),
        excitation_residual: t.excitation.relative_residual(),
    })
}

/// The pulse has a peak away from both medium faces, where it has fallen
/// below 10 % of the peak amplitude.
fn contained(field: &[Complex64]) -> bool {
    let abs: Vec<f64> = field.iter().map(|v| v.norm()).collect();
    let max = abs.iter().copied().fold(0.0, f64::max);
    match (abs.first(), abs.last()) {
        (Some(&a), Some(&b)) => max > 0.0 && a < 0.1 * max && b < 0.1 * max,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlap_is_shift_invariant() {
        let pulse = |t0: f64| (0..200).map(|i| Complex64::from((-((i as f64 - t0) / 10.0).powi(2)).exp())).collect::<Vec<_>>();
        let f = shifted_overlap(&pulse(60.0), &pulse(120.0)).unwrap();
        assert!((f - 1.0).abs() < 1e-9, "{f}");
        assert_eq!(shifted_overlap(&[Complex64::ZERO; 4], &pulse(3.0)), None);
    }

    #[test]
    fn parabolic_peak_recovers_offset_maximum() {
        let times: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let series: Vec<f64> = times.iter().map(|t| 1.0 - (t - 2.34).powi(2)).collect();
        assert!((peak_time(&times, &series).unwrap() - 2.34).abs() < 1e-12);
        assert_eq!(peak_time(&times, &times), None);
    }
}
