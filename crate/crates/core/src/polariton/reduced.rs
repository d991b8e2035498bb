//! Solvers for the reduced polariton equation
//! `∂tΨ = −AΨ − (c cos²θ − cB)∂zΨ + Cc²∂z²Ψ` on a periodic, zero-padded
//! domain.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use super::{bright_state_amplitude, nonadiabatic_coefficients, satisfies_power_condition, CoefficientSet};
use crate::drive::DriveSchedule;
use crate::error::{Error, Result};
use crate::feasibility::suppression_factor;
use crate::grid::SimGrid;
use crate::material::{Medium, MIN_WIDTH_RATIO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReducedMethod {
    /// Exact propagation of each spatial Fourier mode.
    Fourier,
    /// Fourth-order central differences with RK4 time stepping.
    Direct,
}

impl std::str::FromStr for ReducedMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fourier" => Ok(Self::Fourier),
            "direct" => Ok(Self::Direct),
            other => Err(Error::invalid("method", format!("unknown reduced solver `{other}`"))),
        }
    }
}

/// Model-validity flags gathered along the drive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducedValidity {
    /// Ω² ≥ 3·W12W13 at every sampled instant.
    pub power_condition: bool,
    /// W13/W12 ≥ 10.
    pub width_ratio: bool,
    /// A ≥ 0 and C ≥ 0 at every sampled instant.
    pub losses_nonnegative: bool,
    /// Largest relative step-to-step growth of ∫|Ψ|²dz (0 when the norm never grows).
    pub max_norm_growth: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReducedRun {
    pub method: ReducedMethod,
    /// Cell centres of the physical window.
    pub z: Vec<f64>,
    pub times: Vec<f64>,
    /// Ψ on the physical window at each sample time.
    pub psi: Vec<Vec<Complex64>>,
    /// Slaved bright polariton Φ at each sample time.
    pub phi: Vec<Vec<Complex64>>,
    pub theta: Vec<f64>,
    /// ∫|Ψ|²dz over the padded domain at each sample time.
    pub norms: Vec<f64>,
    /// Final over initial ∫|Ψ|²dz.
    pub efficiency: f64,
    pub validity: ReducedValidity,
}

/// Amplitude-loss exponent combined into an energy efficiency:
/// `exp(−2∫sin²θ·Γ_Ψ dt) · η(k)²` over `[from, to]`, the interval the
/// excitation spends inside the medium, with `k = Ω(τ)/√(W12W13)`.
pub fn predicted_efficiency(medium: &Medium, drive: &DriveSchedule, from: f64, to: f64) -> f64 {
    let m = &medium.material;
    let steps = 4000;
    let h = (to - from) / steps as f64;
    let rate = |t: f64| {
        let om = drive.omega(t);
        let sin2 = medium.g2n / (om * om + medium.g2n);
        sin2 * super::gamma_psi(om, m)
    };
    // composite Simpson
    let mut integral = rate(from) + rate(to);
    for i in 1..steps {
        integral += rate(from + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    integral *= h / 3.0;
    let p = m.width_product();
    let eta = if p > 0.0 && drive.omega_tau > 0.0 {
        suppression_factor(drive.omega_tau / p.sqrt()).unwrap_or(1.0)
    } else {
        1.0
    };
    (-2.0 * integral).exp() * eta * eta
}

struct Coefficients {
    velocity: f64,
    a: f64,
    diffusion: f64,
    set: CoefficientSet,
    omega: f64,
}

fn coefficients_at(medium: &Medium, drive: &DriveSchedule, t: f64) -> Coefficients {
    let s = drive.sample(t);
    let set = nonadiabatic_coefficients(s.omega, s.omega_dot, &medium.material, medium.g2n);
    let c = medium.light_speed;
    let cos2 = set.theta.cos().powi(2);
    Coefficients { velocity: c * cos2 - c * set.b, a: set.a, diffusion: set.c * c * c, set, omega: s.omega }
}

/// Right-hand side with periodic fourth-order central differences.
fn rhs(psi: &[Complex64], dz: f64, k: &Coefficients, out: &mut [Complex64]) {
    let n = psi.len();
    let d1 = 1.0 / (12.0 * dz);
    let d2 = 1.0 / (12.0 * dz * dz);
    out.par_iter_mut().enumerate().with_min_len(256).for_each(|(j, o)| {
        let at = |off: isize| psi[(j as isize + off).rem_euclid(n as isize) as usize];
        let (m2, m1, p1, p2) = (at(-2), at(-1), at(1), at(2));
        let grad = (m2 - m1 * 8.0 + p1 * 8.0 - p2) * d1;
        let lap = (-m2 + m1 * 16.0 - psi[j] * 30.0 + p1 * 16.0 - p2) * d2;
        *o = -psi[j] * k.a - grad * k.velocity + lap * k.diffusion;
    });
}

fn norm2(psi: &[Complex64], dz: f64) -> f64 {
    psi.iter().map(|v| v.norm_sqr()).sum::<f64>() * dz
}

/// Number of extra cells appended so the periodic domain holds at least four
/// pulse widths of empty space.
fn padding_cells(initial: &[Complex64]) -> usize {
    let total: f64 = initial.iter().map(|v| v.norm_sqr()).sum();
    if total == 0.0 {
        return initial.len();
    }
    let mean: f64 = initial.iter().enumerate().map(|(j, v)| j as f64 * v.norm_sqr()).sum::<f64>() / total;
    let var: f64 =
        initial.iter().enumerate().map(|(j, v)| (j as f64 - mean).powi(2) * v.norm_sqr()).sum::<f64>() / total;
    let width = 2.0 * var.sqrt().max(1.0);
    (4.0 * width).ceil() as usize
}

/// Evolves an initial polariton profile through the drive.
///
/// `initial` holds Ψ at the cell centres of `grid`. Snapshots are taken at
/// `grid.n_snapshots` evenly spaced times including both ends.
pub fn evolve_reduced(
    initial: &[Complex64],
    medium: &Medium,
    drive: &DriveSchedule,
    grid: &SimGrid,
    method: ReducedMethod,
) -> Result<ReducedRun> {
    grid.validate()?;
    drive.validate()?;
    if initial.len() != grid.n_z {
        return Err(Error::Domain(format!("initial profile has {} cells, grid has {}", initial.len(), grid.n_z)));
    }
    let m = &medium.material;
    let width_ratio = m.w12 == 0.0 || m.w13 / m.w12 >= MIN_WIDTH_RATIO;
    if !width_ratio {
        log::warn!("reduced model used with W13/W12 < {MIN_WIDTH_RATIO}");
    }

    let dz = grid.dz();
    let n_window = grid.n_z;
    let n = n_window + padding_cells(initial);
    let mut psi = initial.to_vec();
    psi.resize(n, Complex64::ZERO);

    let n_steps = grid.n_steps().max(1);
    let dt = grid.t_max / n_steps as f64;
    let n_samples = grid.n_snapshots.max(2);
    let sample_steps: Vec<usize> =
        (0..n_samples).map(|i| (i * n_steps + (n_samples - 1) / 2) / (n_samples - 1)).collect();

    let mut validity = ReducedValidity {
        power_condition: true,
        width_ratio,
        losses_nonnegative: true,
        max_norm_growth: 0.0,
    };
    let mut run = ReducedRun {
        method,
        z: grid.cell_centers(),
        times: Vec::new(),
        psi: Vec::new(),
        phi: Vec::new(),
        theta: Vec::new(),
        norms: Vec::new(),
        efficiency: 0.0,
        validity: validity.clone(),
    };

    let record = |psi: &[Complex64], t: f64, run: &mut ReducedRun| -> Result<()> {
        let k = coefficients_at(medium, drive, t);
        let mut dpsi = vec![Complex64::ZERO; psi.len()];
        rhs(psi, dz, &k, &mut dpsi);
        let phi = psi[..n_window]
            .iter()
            .zip(&dpsi)
            .map(|(&p, &d)| bright_state_amplitude(p, d, k.omega, k.set.theta_dot, m, medium.g2n, false))
            .collect::<Result<Vec<_>>>()?;
        run.times.push(t);
        run.psi.push(psi[..n_window].to_vec());
        run.phi.push(phi);
        run.theta.push(k.set.theta);
        run.norms.push(norm2(psi, dz));
        Ok(())
    };

    let check = |k: &Coefficients, validity: &mut ReducedValidity| {
        if !satisfies_power_condition(k.omega, m) {
            validity.power_condition = false;
        }
        if k.a < 0.0 || k.set.c < 0.0 {
            validity.losses_nonnegative = false;
        }
    };

    let mut next_sample = 0;
    if sample_steps[0] == 0 {
        record(&psi, 0.0, &mut run)?;
        next_sample = 1;
    }

    match method {
        ReducedMethod::Direct => {
            let mut k1 = vec![Complex64::ZERO; n];
            let mut k2 = k1.clone();
            let mut k3 = k1.clone();
            let mut k4 = k1.clone();
            let mut tmp = k1.clone();
            let mut prev_norm = norm2(&psi, dz);
            for step in 0..n_steps {
                let t = step as f64 * dt;
                let c0 = coefficients_at(medium, drive, t);
                let ch = coefficients_at(medium, drive, t + 0.5 * dt);
                let c1 = coefficients_at(medium, drive, t + dt);
                for c in [&c0, &ch, &c1] {
                    check(c, &mut validity);
                    let advect = c.velocity.abs() * dt / dz;
                    let diffuse = c.diffusion.abs() * dt / (dz * dz);
                    if advect > 1.0 || diffuse > 0.25 {
                        return Err(Error::Domain(format!(
                            "direct solver unstable at t = {t:e}: |v|dt/dz = {advect:.3} (limit 1), |C|c²dt/dz² = {diffuse:.3} (limit 0.25); reduce dt"
                        )));
                    }
                }
                rhs(&psi, dz, &c0, &mut k1);
                axpy(&mut tmp, &psi, &k1, 0.5 * dt);
                rhs(&tmp, dz, &ch, &mut k2);
                axpy(&mut tmp, &psi, &k2, 0.5 * dt);
                rhs(&tmp, dz, &ch, &mut k3);
                axpy(&mut tmp, &psi, &k3, dt);
                rhs(&tmp, dz, &c1, &mut k4);
                for j in 0..n {
                    psi[j] += (k1[j] + (k2[j] + k3[j]) * 2.0 + k4[j]) * (dt / 6.0);
                }
                if psi.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                    return Err(Error::Divergence { time: t + dt, cell: 0, what: "non-finite Ψ".into() });
                }
                let now = norm2(&psi, dz);
                if prev_norm > 0.0 {
                    validity.max_norm_growth = validity.max_norm_growth.max(now / prev_norm - 1.0);
                }
                prev_norm = now;
                while next_sample < n_samples && sample_steps[next_sample] == step + 1 {
                    record(&psi, (step + 1) as f64 * dt, &mut run)?;
                    next_sample += 1;
                }
            }
        }
        ReducedMethod::Fourier => {
            let mut planner = FftPlanner::<f64>::new();
            let forward = planner.plan_fft_forward(n);
            let inverse = planner.plan_fft_inverse(n);
            let mut spectrum = psi.clone();
            forward.process(&mut spectrum);
            let wavenumbers: Vec<f64> = (0..n)
                .map(|i| {
                    let i = if i <= n / 2 { i as f64 } else { i as f64 - n as f64 };
                    std::f64::consts::TAU * i / (n as f64 * dz)
                })
                .collect();
            // Running integrals of v, A and Cc² (Simpson per step).
            let (mut shift, mut loss, mut spread) = (0.0, 0.0, 0.0);
            let mut prev_loss = 0.0;
            for step in 0..n_steps {
                let t = step as f64 * dt;
                let c0 = coefficients_at(medium, drive, t);
                let ch = coefficients_at(medium, drive, t + 0.5 * dt);
                let c1 = coefficients_at(medium, drive, t + dt);
                for c in [&c0, &ch, &c1] {
                    check(c, &mut validity);
                }
                let simpson = |f: fn(&Coefficients) -> f64| dt / 6.0 * (f(&c0) + 4.0 * f(&ch) + f(&c1));
                shift += simpson(|c| c.velocity);
                loss += simpson(|c| c.a);
                spread += simpson(|c| c.diffusion);
                let growth = -2.0 * (loss - prev_loss);
                validity.max_norm_growth = validity.max_norm_growth.max(growth.exp_m1().max(0.0));
                prev_loss = loss;
                while next_sample < n_samples && sample_steps[next_sample] == step + 1 {
                    let mut field: Vec<Complex64> = spectrum
                        .iter()
                        .zip(&wavenumbers)
                        .map(|(&s, &kw)| {
                            let phase = Complex64::new(-loss - kw * kw * spread, -kw * shift);
                            s * phase.exp() / n as f64
                        })
                        .collect();
                    inverse.process(&mut field);
                    record(&field, (step + 1) as f64 * dt, &mut run)?;
                    next_sample += 1;
                }
            }
        }
    }

    run.efficiency = match (run.norms.first(), run.norms.last()) {
        (Some(&a), Some(&b)) if a > 0.0 => b / a,
        _ => 0.0,
    };
    run.validity = validity;
    Ok(run)
}

fn axpy(out: &mut [Complex64], base: &[Complex64], slope: &[Complex64], h: f64) {
    for ((o, b), s) in out.iter_mut().zip(base).zip(slope) {
        *o = b + s * h;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::MaterialSpec;

    fn material(w12: f64, w13: f64, g12: f64, g13: f64) -> MaterialSpec {
        MaterialSpec {
            name: "t".into(),
            w12,
            w13,
            gamma1: 0.0,
            gamma2: 0.0,
            gamma3: 0.0,
            gamma12: g12,
            gamma13: g13,
            gamma23: 0.0,
            d13: 1e-30,
            density: 1.0,
            wavelength: 1e-6,
        }
    }

    fn gaussian(grid: &SimGrid, centre: f64, width: f64) -> Vec<Complex64> {
        grid.cell_centers().iter().map(|&z| Complex64::new((-((z - centre) / width).powi(2)).exp(), 0.0)).collect()
    }

    fn grid() -> SimGrid {
        SimGrid { z_min: 0.0, z_max: 10.0, n_z: 400, dt: 0.01, t_max: 4.0, n_snapshots: 5, ..SimGrid::default() }
    }

    #[test]
    fn ideal_polariton_translates_rigidly() {
        let medium = Medium::scaled(material(0.0, 0.0, 0.0, 0.0), 3.0, 1.0).unwrap();
        let drive = DriveSchedule::constant(1.0);
        let g = grid();
        let init = gaussian(&g, 2.0, 0.5);
        for method in [ReducedMethod::Fourier, ReducedMethod::Direct] {
            let run = evolve_reduced(&init, &medium, &drive, &g, method).unwrap();
            // v = c cos²θ = 1/4, so after t = 4 the pulse sits at z = 3.
            let expect = gaussian(&g, 3.0, 0.5);
            let last = run.psi.last().unwrap();
            let err: f64 = last.iter().zip(&expect).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            let scale: f64 = expect.iter().map(|b| b.norm_sqr()).sum::<f64>().sqrt();
            assert!(err / scale < 1e-3, "{method:?}: {}", err / scale);
            assert!((run.efficiency - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn constant_drive_decays_at_gamma_psi() {
        let m = material(0.0, 0.0, 0.05, 0.0);
        let medium = Medium::scaled(m.clone(), 3.0, 1.0).unwrap();
        let drive = DriveSchedule::constant(1.0);
        // A wide pulse keeps the C-term spreading loss below 0.1 %.
        let g = SimGrid { z_max: 40.0, n_z: 400, dt: 0.02, ..grid() };
        let run = evolve_reduced(&gaussian(&g, 10.0, 3.0), &medium, &drive, &g, ReducedMethod::Direct).unwrap();
        let s2 = 0.75;
        let expect = (-s2 * super::super::gamma_psi(1.0, &m) * 4.0).exp();
        let amp = (run.efficiency).sqrt();
        assert!((amp / expect - 1.0).abs() < 0.01, "{amp} vs {expect}");
    }

    #[test]
    fn direct_solver_reports_instability() {
        let medium = Medium::scaled(material(0.0, 0.0, 0.0, 0.0), 1e-6, 1.0).unwrap();
        let g = SimGrid { dt: 0.1, ..grid() };
        let r = evolve_reduced(&gaussian(&g, 2.0, 0.5), &medium, &DriveSchedule::constant(1.0), &g, ReducedMethod::Direct);
        assert!(matches!(r, Err(Error::Domain(_))));
    }
}
