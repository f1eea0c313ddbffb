use gyroled::quadrature::GaussLegendre;
use gyroled::rotor::{inertia_shape, inertia_shape_derivative};
use gyroled::{magnetic_moment, Error, RadialProfile, RotorModel, UnitSystem, Vec3};
use gyroled::ProfileKind;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn shell_rotor() -> RotorModel {
    RotorModel::new(&RadialProfile::shell(1.0, 1.0).unwrap()).unwrap()
}

// Bare spin of a rigidly rotating shell summed over its mass elements:
// each carries γ m v r⊥ with v = ω R sinθ.
fn shell_spin_oracle(m: f64, r: f64, w: f64) -> f64 {
    GaussLegendre::new(64).integrate(-1.0, 1.0, |c| {
        let s2 = 1.0 - c * c;
        let v2 = w * w * r * r * s2;
        0.5 * m * r * r * s2 * w / (1.0 - v2).sqrt()
    })
}

fn shell_mass_oracle(m: f64, r: f64, w: f64) -> f64 {
    GaussLegendre::new(64).integrate(-1.0, 1.0, |c| 0.5 * m / (1.0 - w * w * r * r * (1.0 - c * c)).sqrt())
}

#[test]
fn rest_inertia_of_shell_and_ball() {
    for (m, r) in [(1.0, 1.0), (2.5, 0.4), (0.3, 3.0)] {
        let shell = RotorModel::new(&RadialProfile::shell(m, r).unwrap()).unwrap();
        assert!((shell.iota0() - 2.0 / 3.0 * m * r * r).abs() < 1e-10 * m * r * r);
        let ball = RotorModel::new(&RadialProfile::ball(m, r).unwrap()).unwrap();
        assert!((ball.iota0() - 0.4 * m * r * r).abs() < 1e-10 * m * r * r);
    }
}

#[test]
fn shell_spin_and_mass_match_element_sums() {
    let rotor = shell_rotor();
    for w in [0.01, 0.2, 0.5, 0.8, 0.95] {
        let s = rotor.bare_spin(w).unwrap();
        assert!((s - shell_spin_oracle(1.0, 1.0, w)).abs() < 1e-9 * s, "w = {w}");
        let m = rotor.gyration_mass(w).unwrap();
        assert!((m - shell_mass_oracle(1.0, 1.0, w)).abs() < 1e-9, "w = {w}");
    }
}

#[test]
fn shape_derivative_matches_difference_quotient() {
    for a in [0.05, 0.19, 0.21, 0.5, 0.9] {
        let d = (inertia_shape(a + 1e-6) - inertia_shape(a - 1e-6)) / 2e-6;
        assert!((inertia_shape_derivative(a) - d).abs() < 1e-7 * d.abs().max(1.0), "a = {a}");
    }
}

#[test]
fn energy_identity_dm_equals_omega_ds() {
    for kind in [ProfileKind::Shell, ProfileKind::Ball] {
        let rotor = RotorModel::new(&UnitSystem::default().mass(kind).unwrap()).unwrap();
        for w in [0.1, 0.4, 0.7, 0.9] {
            let eps = 1e-5;
            let dm = (rotor.gyration_mass(w + eps).unwrap() - rotor.gyration_mass(w - eps).unwrap()) / (2.0 * eps);
            let ds = rotor.spin_slope(w);
            assert!((dm - w * ds).abs() < 1e-6 * ds, "{kind:?} w = {w}: {dm} vs {}", w * ds);
        }
    }
}

#[test]
fn lipschitz_quotients_stay_below_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for kind in [ProfileKind::Shell, ProfileKind::Ball] {
        let rotor = RotorModel::new(&UnitSystem::default().mass(kind).unwrap()).unwrap();
        let (l1, l2) = rotor.lipschitz_bounds();
        let scale = 3.0 * rotor.iota0();
        let mut v = || Vec3::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale), rng.gen_range(-scale..scale));
        for _ in 0..10_000 {
            let (u1, u2, v1, v2) = (v(), v(), v(), v());
            let w = |s| rotor.omega_vector(s);
            let q1 = (w(u1) - w(u2)).norm() / (u1 - u2).norm();
            assert!(q1 <= l1 * (1.0 + 1e-9), "{kind:?}: {q1} > {l1}");
            let q2 = (w(u1).cross(w(v1)) - w(u2).cross(w(v2))).norm() / ((u1 - u2).norm() + (v1 - v2).norm());
            assert!(q2 <= l2 * (1.0 + 1e-9), "{kind:?}: {q2} > {l2}");
        }
    }
}

#[test]
fn superluminal_rotation_rejected() {
    let rotor = shell_rotor();
    assert!(matches!(rotor.inertia_scalar(1.0), Err(Error::Superluminal(_))));
    assert!(matches!(rotor.bare_spin(-1.2), Err(Error::Superluminal(_))));
    assert!(rotor.spin_cap().is_infinite());
    // huge spins still map below the speed of light
    assert!(rotor.omega_from_spin(1e6) < 1.0);
}

#[test]
fn ball_spin_cap_is_finite_and_extension_saturates() {
    let rotor = RotorModel::new(&RadialProfile::ball(1.0, 1.0).unwrap()).unwrap();
    let cap = rotor.spin_cap();
    assert!(cap.is_finite() && cap > rotor.bare_spin(0.99).unwrap());
    assert_eq!(rotor.omega_from_spin(2.0 * cap), 1.0);
    assert_eq!(rotor.omega_from_spin(-2.0 * cap), -1.0);
}

#[test]
fn magnetic_moment_of_spinning_shell() {
    let charge = RadialProfile::shell(-1.0, 2.0).unwrap();
    let mu = magnetic_moment(&charge, Vec3::new(0.0, 0.1, 0.2)).unwrap();
    let want = Vec3::new(0.0, 0.1, 0.2) * (-4.0 / 3.0);
    assert!((mu - want).norm() < 1e-14);
}

proptest! {
    #[test]
    fn spin_round_trip(w in 0.0f64..0.999, ball in any::<bool>()) {
        let p = if ball { RadialProfile::ball(1.0, 1.0) } else { RadialProfile::shell(1.0, 1.0) }.unwrap();
        let rotor = RotorModel::new(&p).unwrap();
        let s = rotor.bare_spin(w).unwrap();
        let back = rotor.omega_from_spin(s);
        prop_assert!((back - w).abs() <= 1e-10 * w.max(1e-300));
        prop_assert_eq!(rotor.omega_from_spin(-s), -back);
    }
}
