use std::f64::consts::PI;

use gyroled::quadrature::GaussLegendre;
use gyroled::{kernel_eval, Execution, KernelTable, RadialProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn shell_formula(e: f64, r: f64, t: f64) -> f64 {
    e * e / 3.0 * (1.0 - 0.5 * t * t / (r * r))
}

// Put y = x + t n in the six-dimensional definition; for a uniform ball the
// angle between x and n integrates in closed form, leaving one radial integral.
fn ball_oracle(q: f64, big_r: f64, t: f64) -> f64 {
    if t <= 0.0 || t >= 2.0 * big_r {
        return 0.0;
    }
    let rho = q * 3.0 / (4.0 * PI * big_r.powi(3));
    let rule = GaussLegendre::new(40);
    let r_lo = (t - big_r).max(0.0);
    // c_max hits 1 at r = R − t
    let mut cuts = vec![r_lo, big_r];
    if big_r - t > r_lo {
        cuts.insert(1, big_r - t);
    }
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += rule.composite(w[0], w[1], 8, |r| {
            let c_max = ((big_r * big_r - r * r - t * t) / (2.0 * r * t)).min(1.0);
            if c_max <= -1.0 {
                return 0.0;
            }
            let inner = r * r * (c_max + 1.0) + r * t * (c_max * c_max - 1.0) / 2.0;
            4.0 * PI * r * r * 2.0 * PI * inner
        });
    }
    2.0 / 3.0 * t * rho * rho * total
}

#[test]
fn shell_kernel_matches_closed_form_at_random_times() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let e = rng.gen_range(0.2..3.0);
        let r = rng.gen_range(0.3..4.0);
        let t = rng.gen_range(0.0..2.0 * r);
        let p = RadialProfile::shell(-e, r).unwrap();
        assert!((kernel_eval(&p, t) - shell_formula(e, r, t)).abs() <= 1e-12);
    }
}

#[test]
fn kernel_vanishes_outside_support() {
    let p = RadialProfile::ball(-1.0, 1.5).unwrap();
    assert_eq!(kernel_eval(&p, -0.1), 0.0);
    assert_eq!(kernel_eval(&p, 3.01), 0.0);
}

#[test]
fn ball_kernel_matches_independent_quadrature() {
    let p = RadialProfile::ball(-1.0, 1.0).unwrap();
    for k in 1..40 {
        let t = k as f64 * 0.05;
        let got = kernel_eval(&p, t);
        let want = ball_oracle(-1.0, 1.0, t);
        assert!((got - want).abs() < 1e-9, "t = {t}: {got} vs {want}");
    }
}

#[test]
fn shell_norms_match_analytic_values() {
    for (e, r) in [(1.0, 1.0), (1.3, 0.7), (0.5, 2.0)] {
        let p = RadialProfile::shell(-e, r).unwrap();
        let n = KernelTable::build(&p, 4096, Execution::Sequential).norms();
        let scale = e * e * r;
        assert!((n.norm_1 / scale - 2.0 * (2.0 * 2f64.sqrt() - 1.0) / 9.0).abs() < 1e-10);
        assert!((n.kappa / scale - 2.0 / 9.0).abs() < 1e-10);
        assert!((n.norm_inf / (e * e) - 1.0 / 3.0).abs() < 1e-12);
    }
}

#[test]
fn ball_norms_match_oracle_integrals() {
    let p = RadialProfile::ball(-1.0, 1.0).unwrap();
    let n = KernelTable::build(&p, 1024, Execution::Parallel).norms();
    let rule = GaussLegendre::new(20);
    let mut kappa = 0.0;
    let mut norm_1 = 0.0;
    let mut peak = 0.0f64;
    for i in 0..64 {
        let (a, b) = (i as f64 / 32.0, (i + 1) as f64 / 32.0);
        let part = rule.integrate(a, b, |t| ball_oracle(-1.0, 1.0, t));
        kappa += part;
        norm_1 += rule.integrate(a, b, |t| ball_oracle(-1.0, 1.0, t).abs());
        for k in 0..8 {
            peak = peak.max(ball_oracle(-1.0, 1.0, a + (b - a) * k as f64 / 8.0).abs());
        }
    }
    assert!((n.kappa - kappa).abs() < 1e-7, "{} vs {kappa}", n.kappa);
    assert!((n.norm_1 - norm_1).abs() < 1e-6, "{} vs {norm_1}", n.norm_1);
    assert!(n.norm_inf >= peak - 1e-9 && n.norm_inf < peak * 1.001);
}

#[test]
fn resample_ends_on_left_limit() {
    let p = RadialProfile::shell(-1.0, 1.0).unwrap();
    let table = KernelTable::build(&p, 256, Execution::Sequential);
    let k = table.resample(2.0 / 64.0);
    assert_eq!(k.len(), 65);
    assert!((k[0] - 1.0 / 3.0).abs() < 1e-15);
    assert!((k[64] + 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn table_is_identical_on_both_execution_paths() {
    let p = RadialProfile::ball(-1.0, 1.0).unwrap();
    let a = KernelTable::build(&p, 512, Execution::Sequential);
    let b = KernelTable::build(&p, 512, Execution::Parallel);
    assert_eq!(a.samples, b.samples);
    assert_eq!(a.norms(), b.norms());
}
