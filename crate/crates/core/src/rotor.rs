//! Relativistic rigid rotor: moment of inertia ι(|ω|), gyrational mass
//! m(|ω|), the spin map ω ↦ ι(|ω|)ω and its inverse 𝒲.

use serde::Serialize;

use crate::error::{require, Error, Result};
use crate::profile::RadialProfile;
use crate::quadrature::GaussLegendre;
use crate::vec3::Vec3;

/// Largest argument fed to Artanh.
pub const ATANH_GUARD: f64 = 1.0 - 1e-12;

fn guarded_atanh(a: f64) -> f64 {
    a.min(ATANH_GUARD).atanh()
}

/// h(a) = ((a² + 1) Artanh a − a) / a³, with h(0) = 4/3.
pub fn inertia_shape(a: f64) -> f64 {
    let a = a.abs();
    if a < 0.2 {
        // Σ_{k≥1} (1/(2k+1) + 1/(2k−1)) a^{2k−2}
        let a2 = a * a;
        let mut term = 1.0;
        let mut acc = 0.0;
        for k in 1..=24 {
            let k = k as f64;
            acc += (1.0 / (2.0 * k + 1.0) + 1.0 / (2.0 * k - 1.0)) * term;
            term *= a2;
        }
        return acc;
    }
    let at = guarded_atanh(a);
    ((a * a + 1.0) * at - a) / (a * a * a)
}

/// d/da of [`inertia_shape`].
pub fn inertia_shape_derivative(a: f64) -> f64 {
    let sign = a.signum();
    let a = a.abs();
    if a < 0.2 {
        let a2 = a * a;
        let mut pow = a; // a^{2k−3} for k = 2
        let mut acc = 0.0;
        for k in 2..=24 {
            let kf = k as f64;
            acc += (2.0 * kf - 2.0) * (1.0 / (2.0 * kf + 1.0) + 1.0 / (2.0 * kf - 1.0)) * pow;
            pow *= a2;
        }
        return sign * acc;
    }
    let a_c = a.min(ATANH_GUARD);
    let at = guarded_atanh(a);
    let num = -(a * a + 3.0) * at + 2.0 * a * a * a / (1.0 - a_c * a_c) + 3.0 * a;
    sign * num / a.powi(4)
}

/// Artanh(a)/a with limit 1 at a = 0.
fn mass_shape(a: f64) -> f64 {
    let a = a.abs();
    if a < 1e-4 {
        return 1.0 + a * a / 3.0;
    }
    guarded_atanh(a) / a
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinStateAxial {
    pub axis: Vec3,
    pub s_b: f64,
    pub omega: f64,
}

#[derive(Debug, Clone)]
pub struct RotorModel {
    mass: RadialProfile,
    radius: f64,
    iota0: f64,
    /// Largest admissible |ω|.
    omega_max: f64,
    spin_cap: f64,
    /// (|ω|, s_b(|ω|)) at Chebyshev nodes on [0, 0.999/R].
    table: Vec<(f64, f64)>,
    rule: GaussLegendre,
}

const TABLE_NODES: usize = 96;
const GRADING_DEPTH: usize = 48;

impl RotorModel {
    pub fn new(mass: &RadialProfile) -> Result<Self> {
        require(mass.total() > 0.0, "mass profile", "total mass must be positive")?;
        let radius = mass.radius();
        let omega_max = if mass.is_shell() { ATANH_GUARD / radius } else { 1.0 / radius };
        let mut model = RotorModel {
            mass: mass.clone(),
            radius,
            iota0: 0.0,
            omega_max,
            spin_cap: f64::INFINITY,
            table: Vec::new(),
            rule: GaussLegendre::new(16),
        };
        model.iota0 = model.iota(0.0);
        let top = 0.999 / radius;
        model.table = (0..TABLE_NODES)
            .map(|k| {
                let x = 0.5 * (1.0 - (std::f64::consts::PI * k as f64 / (TABLE_NODES - 1) as f64).cos());
                let w = top * x;
                (w, w * model.iota(w))
            })
            .collect();
        model.spin_cap = model.compute_spin_cap(GRADING_DEPTH);
        Ok(model)
    }

    pub fn mass_profile(&self) -> &RadialProfile {
        &self.mass
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn iota0(&self) -> f64 {
        self.iota0
    }

    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }

    /// `4π ∫ g f_m r² dr`, graded toward r = R for smooth profiles so the
    /// logarithmic Artanh singularity at |ω|R = 1 is integrated accurately.
    fn moment<G: Fn(f64) -> f64>(&self, g: G, depth: usize) -> f64 {
        if self.mass.is_shell() {
            return self.mass.total() * g(self.radius);
        }
        let big_r = self.radius;
        let mut acc = 0.0;
        let mut lo = 0.0;
        for j in 1..=depth + 1 {
            let hi = if j == depth + 1 { big_r } else { big_r * (1.0 - 0.5f64.powi(j as i32)) };
            acc += self.rule.integrate(lo, hi, |r| {
                let f = self.mass.density(r).unwrap_or(0.0);
                g(r) * f * r * r
            });
            lo = hi;
        }
        4.0 * std::f64::consts::PI * acc
    }

    fn iota(&self, w: f64) -> f64 {
        0.5 * self.moment(|r| r * r * inertia_shape(w * r), GRADING_DEPTH)
    }

    fn check_omega(&self, omega_abs: f64) -> Result<()> {
        if !omega_abs.is_finite() {
            return Err(Error::NonFinite("omega"));
        }
        if omega_abs.abs() > self.omega_max {
            return Err(Error::Superluminal(omega_abs.abs() * self.radius));
        }
        Ok(())
    }

    /// ι(|ω|).
    pub fn inertia_scalar(&self, omega_abs: f64) -> Result<f64> {
        self.check_omega(omega_abs)?;
        Ok(self.iota(omega_abs.abs()))
    }

    /// d s_b / dω = ι + |ω| ι'.
    pub fn spin_slope(&self, omega_abs: f64) -> f64 {
        let w = omega_abs.abs();
        0.5 * self.moment(
            |r| {
                let a = w * r;
                r * r * (inertia_shape(a) + a * inertia_shape_derivative(a))
            },
            GRADING_DEPTH,
        )
    }

    /// m(|ω|); equals m_b at rest.
    pub fn gyration_mass(&self, omega_abs: f64) -> Result<f64> {
        self.check_omega(omega_abs)?;
        let w = omega_abs.abs();
        Ok(self.moment(|r| mass_shape(w * r), GRADING_DEPTH))
    }

    /// Signed bare spin ι(|ω|) ω.
    pub fn bare_spin(&self, omega: f64) -> Result<f64> {
        Ok(self.inertia_scalar(omega)? * omega)
    }

    pub fn state_from_omega(&self, axis: Vec3, omega: f64) -> Result<SpinStateAxial> {
        Ok(SpinStateAxial { axis, s_b: self.bare_spin(omega)?, omega })
    }

    pub fn state_from_spin(&self, axis: Vec3, s_b: f64) -> SpinStateAxial {
        SpinStateAxial { axis, s_b, omega: self.omega_from_spin(s_b) }
    }

    /// 𝒲(s_b): inverse of the spin map, extended by sign(s_b)/R beyond the cap.
    pub fn omega_from_spin(&self, s_b: f64) -> f64 {
        if s_b == 0.0 || !s_b.is_finite() {
            return if s_b.is_nan() { f64::NAN } else if s_b == 0.0 { 0.0 } else { s_b.signum() / self.radius };
        }
        let target = s_b.abs();
        if target >= self.spin_cap {
            return s_b.signum() / self.radius;
        }
        let spin = |w: f64| w * self.iota(w);
        let (last_w, last_s) = *self.table.last().unwrap();
        let (mut lo, mut hi, mut w) = if target <= last_s {
            let k = self.table.partition_point(|&(_, s)| s < target).max(1);
            let (w0, s0) = self.table[k - 1];
            let (w1, s1) = self.table[k];
            let w = w0 + (w1 - w0) * (target - s0) / (s1 - s0);
            (w0, w1, w)
        } else {
            (last_w, self.omega_max, 0.5 * (last_w + self.omega_max))
        };
        for _ in 0..200 {
            let f = spin(w) - target;
            if f == 0.0 {
                break;
            }
            if f > 0.0 {
                hi = w;
            } else {
                lo = w;
            }
            let mut next = w - f / self.spin_slope(w);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - w).abs() <= 4.0 * f64::EPSILON * w {
                w = next;
                break;
            }
            w = next;
        }
        s_b.signum() * w
    }

    /// Vector form: 𝒲 applied along the direction of `s`.
    pub fn omega_vector(&self, s: Vec3) -> Vec3 {
        match s.normalized() {
            Some(dir) => dir * self.omega_from_spin(s.norm()),
            None => Vec3::ZERO,
        }
    }

    /// s_b♯ = lim_{|ω|R→1} |ω| ι(|ω|), +∞ when it diverges.
    pub fn spin_cap(&self) -> f64 {
        self.spin_cap
    }

    /// Cap evaluated with a given grading depth; used to check convergence.
    pub fn spin_cap_at_depth(&self, depth: usize) -> f64 {
        self.compute_spin_cap(depth)
    }

    fn compute_spin_cap(&self, depth: usize) -> f64 {
        if self.mass.is_shell() {
            // log divergence check: increments per decade in 1 − |ω|R
            let s = |k: i32| {
                let w = (1.0 - 10f64.powi(-k)) / self.radius;
                w * self.iota(w)
            };
            let first = s(4) - s(3);
            let last = s(12) - s(11);
            if last > 0.5 * first {
                return f64::INFINITY;
            }
            return s(12);
        }
        let w = 1.0 / self.radius;
        w * 0.5 * self.moment(|r| r * r * inertia_shape(w * r), depth)
    }

    /// Lipschitz constants (1/ι(0), 1/(ι(0) R)) of 𝒲 and of (u, v) ↦ 𝒲(u)×𝒲(v).
    pub fn lipschitz_bounds(&self) -> (f64, f64) {
        (1.0 / self.iota0, 1.0 / (self.iota0 * self.radius))
    }
}

/// Magnetic moment ½ ∫ x × (ω₀ × x) f_e d³x = ω₀ (4π/3) ∫ f_e r⁴ dr.
pub fn magnetic_moment(charge: &RadialProfile, omega0: Vec3) -> Result<Vec3> {
    require(omega0.norm() * charge.radius() <= 1.0, "omega0", "must satisfy |omega0| R <= 1")?;
    Ok(omega0 * (charge.radial_moment(|r| r * r)? / 3.0))
}
