use std::sync::Arc;

use gyroled::audit::*;
use gyroled::field::{FieldProbe, ShellBump, WavePulse};
use gyroled::{Error, Execution};

fn quick(h: f64, t_end: f64) -> CosimConfig {
    CosimConfig { h, t_end, stride: 2, ..CosimConfig::default() }
}

fn tilted(amplitude: f64, tilt: f64) -> Scenario {
    let shape = ShellBump { amplitude, r_min: 3.0, r_max: 4.0, rate: 0.0, tilt };
    Scenario { pulse: WavePulse::new(Arc::new(shape), 1.0).unwrap(), ..Scenario::shell_soliton() }
}

#[test]
fn soliton_stays_put() {
    let sc = Scenario::shell_soliton();
    let (traj, report) = cosimulate(&sc, &quick(1.0 / 8.0, 4.0)).unwrap();
    let s0 = traj.values[0];
    assert!(traj.values.iter().all(|&v| v == s0));
    assert_eq!(report.drift.energy, 0.0);
    assert_eq!(report.drift.angular_momentum, 0.0);
    assert_eq!(report.drift.sigma, 0.0);
    assert!(report.max_power_residual < 1e-14);
    assert!(report.all_finite());
}

#[test]
fn coulomb_field_without_spin_has_constant_energy() {
    let sc = Scenario { omega0: 0.0, ..Scenario::shell_soliton() };
    let (traj, report) = cosimulate(&sc, &quick(1.0 / 8.0, 2.0)).unwrap();
    assert!(traj.values.iter().all(|&v| v == 0.0));
    let w0 = report.samples[0].energy;
    // W_C + m_b
    assert!((w0 - 1.5).abs() < 1e-15);
    assert!(report.samples.iter().all(|s| s.energy == w0));
}

#[test]
fn coupled_step_reverses() {
    let sc = Scenario::shell_scatter(0.006).unwrap();
    let config = quick(1.0 / 8.0, 6.0);
    let mut sim = CoSim::new(&sc, &config).unwrap();
    let (psi0, s0) = (sim.grid.psi.clone(), sim.s_b);
    let dt = config.dt();
    for _ in 0..48 {
        sim.step(dt).unwrap();
    }
    assert!((sim.s_b - s0).abs() > 1e-6);
    for _ in 0..48 {
        sim.step(-dt).unwrap();
    }
    assert!((sim.s_b - s0).abs() < 1e-13);
    let err = sim.grid.psi.iter().zip(&psi0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err < 1e-12, "{err}");
}

#[test]
fn torque_matches_spin_rate() {
    let sc = Scenario::shell_scatter(0.006).unwrap();
    let mut errors = Vec::new();
    for h in [1.0 / 8.0, 1.0 / 16.0] {
        let config = quick(h, 4.0);
        let dt = config.dt();
        let mut sim = CoSim::new(&sc, &config).unwrap();
        let mut prev = sim.s_b;
        let mut worst = 0.0f64;
        let mut peak = 0.0f64;
        let steps = (config.t_end / dt).round() as usize;
        for _ in 0..steps {
            sim.step(dt).unwrap();
            let tau = sim.torque();
            let s = sim.s_b;
            let mut ahead = sim.clone();
            ahead.step(dt).unwrap();
            let rate = (ahead.s_b - prev) / (2.0 * dt);
            worst = worst.max((rate - tau).abs());
            peak = peak.max(tau.abs());
            prev = s;
        }
        assert!(peak > 1e-4);
        errors.push(worst / peak);
    }
    assert!(errors[1] < 0.05 && errors[0] / errors[1] > 3.0, "{errors:?}");
}

#[test]
fn asymmetric_pulse_breaks_momentum_balance() {
    let config = quick(1.0 / 8.0, 6.0);
    let (_, sym) = cosimulate(&tilted(0.006, 0.0), &config).unwrap();
    let (_, asym) = cosimulate(&tilted(0.006, 0.8), &config).unwrap();
    assert!(sym.max_linear_momentum < 1e-14 && sym.max_spin_orbit < 1e-14);
    assert!(asym.max_linear_momentum > 1e-7, "{}", asym.max_linear_momentum);
    assert!(asym.max_spin_orbit > 1e-9, "{}", asym.max_spin_orbit);
}

#[test]
fn gauss_residual_shrinks_unless_initial_data_violate_it() {
    let sc = Scenario::shell_soliton();
    let charge = sc.charge_profile().unwrap();
    let mut clean = Vec::new();
    for h in [1.0 / 8.0, 1.0 / 16.0] {
        let (_, report) = cosimulate(&sc, &quick(h, 1.0)).unwrap();
        clean.push(report.divergence_residual);
        let sim = CoSim::new(&sc, &quick(h, 1.0)).unwrap();
        let bad = FieldProbe::with_spurious_charge(&sim.grid, &charge, 4, 0.1);
        assert!((bad.divergence_residual(&sim.grid) - 0.1).abs() < 0.01);
    }
    assert!(clean[1] < clean[0] / 3.0, "{clean:?}");
}

#[test]
fn execution_paths_agree_bitwise() {
    let sc = Scenario::shell_scatter(0.006).unwrap();
    let par = CosimConfig { exec: Execution::Parallel, ..quick(1.0 / 8.0, 5.0) };
    let seq = CosimConfig { exec: Execution::Sequential, ..par };
    let (a, ra) = cosimulate(&sc, &par).unwrap();
    let (b, rb) = cosimulate(&sc, &seq).unwrap();
    assert_eq!(a.values, b.values);
    assert_eq!(ra.samples, rb.samples);
}

#[test]
fn time_step_beyond_cfl_is_rejected() {
    let sc = Scenario::shell_soliton();
    let config = CosimConfig { dt: Some(0.1), ..quick(1.0 / 8.0, 1.0) };
    assert!(matches!(cosimulate(&sc, &config), Err(Error::Cfl { .. })));
}

#[test]
fn domain_sizing_rules() {
    let base = CosimConfig { t_end: 10.0, h: 0.125, margin: 4, ..CosimConfig::default() };
    let audit = base.half_width(1.0, 4.0);
    let particle = CosimConfig { sizing: DomainSizing::ParticleOnly, ..base }.half_width(1.0, 4.0);
    assert!((audit - 16.5).abs() < 1e-12);
    assert!((particle - 8.5).abs() < 1e-12);
    assert_eq!(CosimConfig { sizing: DomainSizing::Fixed(3.0), ..base }.half_width(1.0, 4.0), 3.0);
}
