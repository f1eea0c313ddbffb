use std::sync::Arc;

use gyroled::field::{
    cfl_limit, source_potential, AxisymmetricFieldGrid, GridSpec, Kirchhoff, OmegaHistory, ShellBump, StaticStream,
    WavePulse, WaveTorque,
};
use gyroled::{Error, Execution, KernelTable, RadialProfile, Vec3};

fn free_grid(h: f64, half: f64, pulse: &WavePulse) -> AxisymmetricFieldGrid {
    let mut grid = AxisymmetricFieldGrid::new(GridSpec::square(h, half).unwrap(), None, Execution::Parallel).unwrap();
    grid.init_scattering(pulse, 0.0);
    grid
}

fn evolve(grid: &mut AxisymmetricFieldGrid, t: f64) {
    let dt = 0.5 * grid.h;
    let n = (t / dt).round() as usize;
    for _ in 0..n {
        grid.step_psi(0.0, dt).unwrap();
    }
}

fn sample(grid: &AxisymmetricFieldGrid, zeta: f64, z: f64) -> f64 {
    let i = (zeta / grid.h).round() as usize;
    let j = ((z + grid.l_z) / grid.h).round() as usize;
    grid.psi[grid.index(i, j)]
}

#[test]
fn kirchhoff_agrees_with_source_free_grid() {
    let pulse = WavePulse::bump(1.0, 3.0, 4.0, 1.0).unwrap();
    let kirchhoff = Kirchhoff::default();
    let t = 2.0;
    let points = [(2.0, 0.5), (1.0, -1.0), (4.5, 2.0), (0.5, 0.0)];
    let mut errors = Vec::new();
    for h in [1.0 / 16.0, 1.0 / 32.0] {
        let mut grid = free_grid(h, 8.0, &pulse);
        evolve(&mut grid, t);
        let err = points
            .iter()
            .map(|&(zeta, z)| (sample(&grid, zeta, z) - kirchhoff.psi(&pulse, zeta, z, t).unwrap()).abs())
            .fold(0.0, f64::max);
        errors.push(err);
    }
    let scale = points.iter().map(|&(zeta, z)| kirchhoff.psi(&pulse, zeta, z, t).unwrap().abs()).fold(0.0, f64::max);
    assert!(scale > 1e-3);
    assert!(errors[1] < 1e-2 * scale, "{errors:?} vs {scale}");
    let order = (errors[0] / errors[1]).log2();
    println!("errors {errors:?} scale {scale}");
    assert!(order > 1.6, "order {order}, errors {errors:?}");
}

#[test]
fn kirchhoff_reproduces_initial_data() {
    let pulse = WavePulse::bump(0.7, 3.0, 4.0, 1.0).unwrap();
    let k = Kirchhoff::default();
    for (zeta, z) in [(3.2, 0.4), (2.0, -2.6), (0.3, 3.5)] {
        let t0 = k.psi(&pulse, zeta, z, 0.0).unwrap();
        assert!((t0 - pulse.psi(zeta, z)).abs() < 1e-15);
        let small = k.psi(&pulse, zeta, z, 1e-4).unwrap();
        assert!((small - t0).abs() < 1e-6 * t0.abs().max(1e-3));
    }
}

#[test]
fn wave_torque_vanishes_outside_causal_window() {
    let pulse = WavePulse::bump(1.0, 3.0, 4.0, 1.0).unwrap();
    let charge = RadialProfile::shell(-1.0, 1.0).unwrap();
    let torque = WaveTorque::for_profile(&charge);
    assert_eq!(torque.eval(&pulse, 1.9).unwrap(), 0.0);
    assert_eq!(torque.eval(&pulse, 5.1).unwrap(), 0.0);
    assert!(torque.eval(&pulse, 3.0).unwrap().abs() > 0.0);
    let par = torque.series(&pulse, 1.0 / 32.0, 200, Execution::Parallel).unwrap();
    let seq = torque.series(&pulse, 1.0 / 32.0, 200, Execution::Sequential).unwrap();
    assert_eq!(par, seq);
}

#[test]
fn tilted_pulse_torque_stays_on_axis_only_when_symmetric() {
    let charge = RadialProfile::shell(-1.0, 1.0).unwrap();
    let torque = WaveTorque::for_profile(&charge);
    let sym = WavePulse::bump(1.0, 3.0, 4.0, 1.0).unwrap();
    let v = torque.eval_vector(&sym, 3.0, 16).unwrap();
    assert!(v.x().abs() + v.y().abs() < 1e-12 * v.z().abs());
}

#[test]
fn retarded_potential_of_steady_rotation_is_static_stream() {
    let charge = RadialProfile::shell(-1.0, 1.0).unwrap();
    let stream = StaticStream::new(&charge);
    let omega0 = 0.3;
    let history = OmegaHistory::constant(omega0, 0.01, 5.0, 1.0).unwrap();
    for (zeta, z) in [(2.0, 0.5), (0.5, 0.3), (1.5, -1.0)] {
        let a = source_potential(&charge, &history, Vec3::new(zeta, 0.0, z), 4.0).unwrap();
        // on the x axis the azimuthal direction is ŷ
        let want = omega0 * stream.sigma(zeta, z) / zeta;
        assert!((a.y() - want).abs() < 1e-6 * want.abs(), "({zeta}, {z}): {} vs {want}", a.y());
        assert!(a.x().abs() < 1e-12 && a.z().abs() < 1e-12);
    }
}

#[test]
fn omega_history_rejects_gaps() {
    let history = OmegaHistory::new(Vec3::Z, 0.1, vec![0.3, 0.31, 0.32], 0.3, 1.0).unwrap();
    assert_eq!(history.at(-1.0).unwrap(), 0.3);
    assert!((history.at(0.15).unwrap() - 0.315).abs() < 1e-15);
    assert!(matches!(history.at(0.5), Err(Error::HistoryGap(_))));
}

#[test]
fn static_stream_average_equals_kernel_integral() {
    for charge in [RadialProfile::shell(-1.0, 1.0).unwrap(), RadialProfile::ball(-1.3, 0.8).unwrap()] {
        let kappa = KernelTable::build(&charge, 1024, Execution::Sequential).kappa;
        let avg = StaticStream::new(&charge).profile_average();
        assert!((avg - kappa).abs() < 1e-8 * kappa, "{} : {avg} vs {kappa}", charge.kind_name());
    }
}

#[test]
fn static_stream_is_a_steady_state_away_from_the_shell() {
    let charge = RadialProfile::shell(-1.0, 1.0).unwrap();
    let h = 1.0 / 16.0;
    let mut grid =
        AxisymmetricFieldGrid::new(GridSpec::square(h, 6.0).unwrap(), Some(&charge), Execution::Sequential).unwrap();
    grid.init_scattering(&WavePulse::zero(), 0.5);
    // ψ − ωΣ vanishes identically, so the field never moves
    let start = grid.psi.clone();
    for _ in 0..20 {
        grid.step_psi(0.5, 0.5 * h).unwrap();
    }
    assert_eq!(grid.psi, start);
    assert!(grid.psi_dot.iter().all(|&v| v == 0.0));
}

#[test]
fn leapfrog_reverses_exactly() {
    let pulse = WavePulse::bump(1.0, 3.0, 4.0, 1.0).unwrap();
    let mut grid = free_grid(1.0 / 8.0, 7.0, &pulse);
    let start = grid.psi.clone();
    let dt = 1.0 / 16.0;
    for _ in 0..40 {
        grid.step_psi(0.0, dt).unwrap();
    }
    for _ in 0..40 {
        grid.step_psi(0.0, -dt).unwrap();
    }
    let err = grid.psi.iter().zip(&start).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err < 1e-12, "{err}");
    assert!(grid.time.abs() < 1e-12);
}

#[test]
fn cfl_violation_is_reported() {
    let mut grid = free_grid(0.1, 2.0, &WavePulse::zero());
    let limit = cfl_limit(0.1, 1.0);
    assert!(matches!(grid.step_psi(0.0, 1.01 * limit), Err(Error::Cfl { .. })));
    assert!(grid.step_psi(0.0, 0.99 * limit).is_ok());
}

#[test]
fn pulse_support_must_clear_particle() {
    assert!(WavePulse::bump(1.0, 0.9, 2.0, 1.0).is_err());
    let shape = ShellBump { amplitude: 1.0, r_min: 3.0, r_max: 4.0, rate: 0.0, tilt: 0.5 };
    assert!(WavePulse::new(Arc::new(shape), 1.0).is_ok());
}

#[test]
fn time_reversal_flips_only_the_rate() {
    let shape = ShellBump { amplitude: 1.0, r_min: 3.0, r_max: 4.0, rate: 2.0, tilt: 0.0 };
    let p = WavePulse::new(Arc::new(shape), 1.0).unwrap();
    let q = p.time_reversed();
    assert_eq!(p.psi(2.0, 2.5), q.psi(2.0, 2.5));
    assert_eq!(p.psi_dot(2.0, 2.5), -q.psi_dot(2.0, 2.5));
    assert!(p.psi_dot(2.0, 2.5) != 0.0);
}
