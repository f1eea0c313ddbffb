//! Retarded self-interaction kernel
//! `K(t) = (8π²/3) ∬ Θ(t−|r−s|) Θ(r+s−t) (r²+s²−t²) r s f(r) f(s) dr ds`,
//! supported on [0, 2R].

use serde::Serialize;

use crate::exec::{self, Execution};
use crate::profile::RadialProfile;
use crate::quadrature::GaussLegendre;

/// `e² (1/3)(1 − t²/(2R²))` on [0, 2R], zero elsewhere.
pub fn kernel_shell_closed_form(e: f64, r: f64, t: f64) -> f64 {
    if !(0.0..=2.0 * r).contains(&t) {
        return 0.0;
    }
    e * e * (1.0 - t * t / (2.0 * r * r)) / 3.0
}

/// Kernel of a charge profile at time `t`; zero outside [0, 2R].
pub fn kernel_eval(profile: &RadialProfile, t: f64) -> f64 {
    let big_r = profile.radius();
    if !(0.0..=2.0 * big_r).contains(&t) {
        return 0.0;
    }
    if profile.is_shell() {
        let q = profile.total();
        return q * q * (2.0 * big_r * big_r - t * t) / (6.0 * big_r * big_r);
    }
    let rule = GaussLegendre::new(20);
    kernel_quadrature(profile, t, &rule, 4)
}

/// Smooth-profile kernel with the Θ constraints turned into integration
/// limits: s runs over (|r − t|, min(r + t, R)), and r is split where either
/// limit changes form (r = t and r = R − t).
fn kernel_quadrature(profile: &RadialProfile, t: f64, rule: &GaussLegendre, panels: usize) -> f64 {
    let big_r = profile.radius();
    let f = |r: f64| profile.density(r).unwrap_or(0.0);
    let r_lo = (t - big_r).max(0.0);
    let mut cuts = vec![r_lo, big_r];
    for c in [t, big_r - t] {
        if c > r_lo && c < big_r {
            cuts.push(c);
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        total += rule.composite(a, b, panels, |r| {
            let s_lo = (r - t).abs();
            let s_hi = (r + t).min(big_r);
            if s_hi <= s_lo {
                return 0.0;
            }
            let inner = rule.composite(s_lo, s_hi, panels, |s| (r * r + s * s - t * t) * s * f(s));
            inner * r * f(r)
        });
    }
    8.0 * std::f64::consts::PI.powi(2) / 3.0 * total
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct KernelNorms {
    pub norm_1: f64,
    pub norm_inf: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone)]
pub struct KernelTable {
    profile: RadialProfile,
    /// K at `t_i = i * step`, i = 0..=n, over [0, 2R].
    pub samples: Vec<f64>,
    pub step: f64,
    pub closed_form: bool,
    pub norm_1: f64,
    pub norm_inf: f64,
    pub kappa: f64,
}

pub const DEFAULT_SAMPLES: usize = 4096;

impl KernelTable {
    pub fn build(profile: &RadialProfile, intervals: usize, exec: Execution) -> Self {
        let intervals = intervals.max(2);
        let step = 2.0 * profile.radius() / intervals as f64;
        let mut samples = vec![0.0; intervals + 1];
        exec::fill(exec, &mut samples, |i| kernel_eval(profile, i as f64 * step));
        let mut table = KernelTable {
            profile: profile.clone(),
            samples,
            step,
            closed_form: profile.is_shell(),
            norm_1: 0.0,
            norm_inf: 0.0,
            kappa: 0.0,
        };
        let norms = kernel_norms(&table);
        table.norm_1 = norms.norm_1;
        table.norm_inf = norms.norm_inf;
        table.kappa = norms.kappa;
        table
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    pub fn support(&self) -> f64 {
        2.0 * self.profile.radius()
    }

    pub fn eval(&self, t: f64) -> f64 {
        kernel_eval(&self.profile, t)
    }

    /// Kernel samples on a grid of spacing `h` that divides 2R, using the
    /// closed support so the last node is the left limit K(2R⁻).
    pub fn resample(&self, h: f64) -> Vec<f64> {
        let m = (self.support() / h).round() as usize;
        (0..=m).map(|j| self.eval((j as f64 * h).min(self.support()))).collect()
    }

    pub fn norms(&self) -> KernelNorms {
        KernelNorms { norm_1: self.norm_1, norm_inf: self.norm_inf, kappa: self.kappa }
    }
}

/// ‖K‖₁, ‖K‖∞ and κ = ∫K. The L¹ integral is split at sign changes located
/// on the sample table and refined by bisection.
pub fn kernel_norms(table: &KernelTable) -> KernelNorms {
    let k = |t: f64| table.eval(t);
    let two_r = table.support();
    let mut breaks = vec![0.0];
    for (i, w) in table.samples.windows(2).enumerate() {
        if w[0] == 0.0 && i > 0 {
            breaks.push(i as f64 * table.step);
        } else if w[0] * w[1] < 0.0 {
            let (mut a, mut b) = (i as f64 * table.step, (i + 1) as f64 * table.step);
            let fa = k(a);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                if k(m) * fa > 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            breaks.push(0.5 * (a + b));
        }
    }
    breaks.push(two_r);
    breaks.dedup();

    let (rule, panels) = if table.closed_form {
        (GaussLegendre::new(8), 1)
    } else {
        (GaussLegendre::new(12), 16)
    };
    let mut norm_1 = 0.0;
    let mut kappa = 0.0;
    for w in breaks.windows(2) {
        let part = rule.composite(w[0], w[1], panels, k);
        norm_1 += part.abs();
        kappa += part;
    }

    let mut norm_inf = table.samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    norm_inf = norm_inf.max(k(0.0).abs()).max(k(two_r).abs());
    if let Some((imax, _)) = table
        .samples
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
    {
        // golden-section polish of |K| around the largest sample
        let lo = (imax as f64 - 1.0).max(0.0) * table.step;
        let hi = ((imax + 1) as f64 * table.step).min(two_r);
        let (mut a, mut b) = (lo, hi);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if k(c).abs() > k(d).abs() {
                b = d;
            } else {
                a = c;
            }
        }
        norm_inf = norm_inf.max(k(0.5 * (a + b)).abs());
    }
    KernelNorms { norm_1, norm_inf, kappa }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        assert!((kernel_shell_closed_form(1.0, 1.0, 0.0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((kernel_shell_closed_form(1.0, 1.0, 1.0) - 1.0 / 6.0).abs() < 1e-15);
        assert!((kernel_shell_closed_form(2.0, 1.0, 0.0) - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(kernel_shell_closed_form(1.0, 1.0, 2.5), 0.0);
        assert_eq!(kernel_shell_closed_form(1.0, 1.0, -0.1), 0.0);
    }

    #[test]
    fn shell_eval_endpoints() {
        let p = RadialProfile::shell(-1.0, 1.0).unwrap();
        assert!((kernel_eval(&p, 0.0) - 1.0 / 3.0).abs() < 1e-15);
        assert!(kernel_eval(&p, 2f64.sqrt()).abs() < 1e-15);
        assert!((kernel_eval(&p, 2.0) + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn ball_kernel_vanishes_at_ends() {
        let p = RadialProfile::ball(-1.0, 1.0).unwrap();
        assert!(kernel_eval(&p, 0.0).abs() < 1e-14);
        assert!(kernel_eval(&p, 2.0).abs() < 1e-14);
        assert!(kernel_eval(&p, 0.5) > 0.0);
    }
}
