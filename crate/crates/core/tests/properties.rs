use num_complex::Complex64;
use proptest::prelude::*;

use lightstore::constants::SPEED_OF_LIGHT;
use lightstore::drive::{DriveSchedule, ProbeSpec};
use lightstore::ensemble::{ensemble_average, DetuningGrid, QuadratureScheme};
use lightstore::feasibility::{evaluate_conditions, feasibility_report, suppression_factor, Protocol, Thresholds};
use lightstore::grid::SimGrid;
use lightstore::material::{MaterialSpec, Medium};
use lightstore::polariton::{
    evolve_reduced, gamma_psi, inverse_polariton_transform, mixing_angle, polariton_transform, ReducedMethod,
};

fn material(w12: f64, w13: f64, gamma12: f64, gamma13: f64) -> MaterialSpec {
    MaterialSpec {
        name: "prop".into(),
        w12,
        w13,
        gamma1: 0.0,
        gamma2: 0.0,
        gamma3: 0.0,
        gamma12,
        gamma13,
        gamma23: gamma13,
        d13: 1e-30,
        density: 1e24,
        wavelength: 1e-6,
    }
}

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.log10()..hi.log10()).prop_map(|e| 10f64.powf(e))
}

proptest! {
    #[test]
    fn rotation_preserves_excitation(
        re in -1.0..1.0f64, im in -1.0..1.0f64,
        sre in -1.0..1.0f64, sim in -1.0..1.0f64,
        atoms in log_uniform(1e2, 1e12),
        omega in log_uniform(1e-3, 1e3), g2n in log_uniform(1e-3, 1e6),
    ) {
        let e = Complex64::new(re, im);
        let s = Complex64::new(sre, sim) / atoms.sqrt();
        let theta = mixing_angle(omega, g2n);
        let (psi, phi) = polariton_transform(e, s, atoms, theta);
        let total = e.norm_sqr() + atoms * s.norm_sqr();
        prop_assert!((psi.norm_sqr() + phi.norm_sqr() - total).abs() <= 1e-13 * total.max(1e-300));
        let (e2, s2) = inverse_polariton_transform(psi, phi, atoms, theta);
        prop_assert!((e2 - e).norm() <= 1e-12 * (1.0 + e.norm()));
        prop_assert!((s2 - s).norm() <= 1e-12 * (1.0 + s.norm()));
    }

    #[test]
    fn polariton_loss_never_exceeds_spin_dephasing(
        w12 in log_uniform(1e-3, 1e6),
        ratio in log_uniform(1.0, 1e6),
        g12 in log_uniform(1e-6, 1.0),
        g13 in log_uniform(1e-6, 1.0),
        excess in log_uniform(1.0, 1e6),
    ) {
        let w13 = w12 * ratio;
        let m = material(w12, w13, g12 * w12, g13 * w13);
        let omega = (3.0 * w12 * w13 * excess).sqrt();
        prop_assert!(gamma_psi(omega, &m) <= m.gamma12 * (1.0 + 1e-12));
    }

    #[test]
    fn ensemble_average_is_linear(
        a in -5.0..5.0f64, b in -5.0..5.0f64,
        w12 in log_uniform(1e-2, 1e2), w13 in log_uniform(1e-2, 1e2),
        n12 in 1usize..12, n13 in 1usize..12,
    ) {
        let grid = DetuningGrid::new(w12, n12, w13, n13, 30.0, QuadratureScheme::MidpointEqualProb).unwrap();
        let f: Vec<Complex64> = grid.joint().map(|c| Complex64::new(c.detuning12.cos(), c.detuning13)).collect();
        let g: Vec<Complex64> = grid.joint().map(|c| Complex64::new(1.0 / (1.0 + c.detuning13.powi(2)), c.detuning12)).collect();
        let mix: Vec<Complex64> = f.iter().zip(&g).map(|(x, y)| x * a + y * b).collect();
        let lhs = ensemble_average(&mix, &grid).unwrap();
        let rhs = ensemble_average(&f, &grid).unwrap() * a + ensemble_average(&g, &grid).unwrap() * b;
        let scale = 1.0 + a.abs() * 30.0 * w13 + b.abs() * 30.0 * w12;
        prop_assert!((lhs - rhs).norm() <= 1e-13 * scale);
    }

    #[test]
    fn more_coupling_never_breaks_a_passing_condition(
        p in log_uniform(1e10, 1e20),
        g2n in log_uniform(1e12, 1e26),
        boost in log_uniform(1.0, 1e6),
        omega0_2 in log_uniform(1e12, 1e22),
        k in 0.5..10.0f64,
    ) {
        let m = material(p.sqrt() / 100.0, p.sqrt() * 100.0, 1.0, 1.0);
        let omega0 = omega0_2.sqrt();
        let omega_tau = (k * p.sqrt()).min(omega0);
        let t = Thresholds::default();
        let before = evaluate_conditions(&m, g2n, omega0, omega_tau, &t);
        let after = evaluate_conditions(&m, g2n * boost, omega0, omega_tau, &t);
        for (x, y) in before.iter().zip(&after) {
            prop_assert!(!x.pass || y.pass, "{} flipped", x.name);
        }
    }

    #[test]
    fn wider_lines_never_rescue_power_or_coupling(
        p in log_uniform(1e10, 1e20),
        g2n in log_uniform(1e12, 1e26),
        widen in log_uniform(1.0, 1e6),
        omega_tau_2 in log_uniform(1e10, 1e22),
    ) {
        let t = Thresholds::default();
        let narrow = material(p.sqrt() / 100.0, p.sqrt() * 100.0, 1.0, 1.0);
        let wide = material(narrow.w12 * widen.sqrt(), narrow.w13 * widen.sqrt(), 1.0, 1.0);
        let omega = omega_tau_2.sqrt();
        let before = evaluate_conditions(&narrow, g2n, omega * 10.0, omega, &t);
        let after = evaluate_conditions(&wide, g2n, omega * 10.0, omega, &t);
        for name in ["power-condition", "collective-coupling"] {
            let x = before.iter().find(|c| c.name == name).unwrap();
            let y = after.iter().find(|c| c.name == name).unwrap();
            prop_assert!(x.pass || !y.pass, "{name} flipped to pass");
        }
    }

    #[test]
    fn norm_never_grows_while_losses_are_nonnegative(
        gamma12 in 0.0..0.05f64,
        omega_tau in 2.0..10.0f64,
        ramp in 0.5..4.0f64,
    ) {
        // W12W13 = 1, so Ω ≥ 2 keeps the power condition
        let m = material(0.1, 10.0, gamma12, 0.5);
        let medium = Medium::scaled(m, 100.0, 1.0).unwrap();
        let drive = DriveSchedule::linear(10.0, omega_tau, 0.5, 0.5 + ramp);
        let grid = SimGrid { z_min: 0.0, z_max: 10.0, n_z: 256, dt: 0.005, t_max: 1.0 + ramp, n_snapshots: 6, ..SimGrid::default() };
        let init: Vec<Complex64> =
            grid.cell_centers().iter().map(|&z| Complex64::from((-((z - 3.0) / 0.8).powi(2)).exp())).collect();
        let run = evolve_reduced(&init, &medium, &drive, &grid, ReducedMethod::Fourier).unwrap();
        if run.validity.losses_nonnegative {
            for w in run.norms.windows(2) {
                prop_assert!(w[1] <= w[0] * (1.0 + 1e-12));
            }
        } else {
            prop_assert!(run.validity.max_norm_growth >= 0.0);
        }
    }
}

#[test]
fn suppression_factor_rises_toward_one() {
    let mut prev = suppression_factor(1.0).unwrap();
    for i in 1..=900 {
        let k = 1.0 + i as f64 * 0.01;
        let eta = suppression_factor(k).unwrap();
        assert!(eta > prev && eta < 1.0, "k = {k}: {eta} after {prev}");
        prev = eta;
    }
}

#[test]
fn constant_drive_with_dominant_spin_dephasing_only_loses() {
    // Ω²γ12 = 0.04 > W12²γ13 = 0.005
    let medium = Medium::scaled(material(0.1, 10.0, 0.01, 0.5), 100.0, 1.0).unwrap();
    let grid = SimGrid { z_min: 0.0, z_max: 10.0, n_z: 256, dt: 0.005, t_max: 3.0, n_snapshots: 6, ..SimGrid::default() };
    let init: Vec<Complex64> =
        grid.cell_centers().iter().map(|&z| Complex64::from((-((z - 3.0) / 0.8).powi(2)).exp())).collect();
    let run = evolve_reduced(&init, &medium, &DriveSchedule::constant(2.0), &grid, ReducedMethod::Direct).unwrap();
    assert!(run.validity.losses_nonnegative && run.validity.power_condition);
    assert!(run.norms.windows(2).all(|w| w[1] <= w[0]));
    assert!(run.efficiency < 1.0);
}

#[test]
fn report_is_deterministic() {
    let m = material(1e4, 1e9, 1e3, 1e7);
    let drive = DriveSchedule::linear(1e17f64.sqrt(), 3.0 * 1e13f64.sqrt(), 0.0, 1e-5);
    let probe = ProbeSpec::gaussian(1.0, 1e-6, 0.0);
    let protocol = Protocol { drive: &drive, probe: &probe, light_speed: SPEED_OF_LIGHT, medium_length: Some(0.05) };
    let a = feasibility_report(&m, 1e23, &protocol, &Thresholds::default()).unwrap().to_json().unwrap();
    let b = feasibility_report(&m, 1e23, &protocol, &Thresholds::default()).unwrap().to_json().unwrap();
    assert_eq!(a, b);
}
