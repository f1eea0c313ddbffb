//! Fields generated by the particle itself: the Coulomb potential, the
//! retarded vector potential of a rotating charge, and the static stream
//! function Σ of uniform rotation at unit angular velocity.

use crate::error::{require, Error, Result};
use crate::profile::RadialProfile;
use crate::quadrature::GaussLegendre;
use crate::vec3::Vec3;

/// Static Coulomb potential of the charge profile at radius `r`.
pub fn coulomb_potential(charge: &RadialProfile, r: f64) -> f64 {
    charge.coulomb_potential(r)
}

/// Axis-aligned angular velocity history on `t_i = i h`.
#[derive(Debug, Clone)]
pub struct OmegaHistory {
    pub axis: Vec3,
    pub h: f64,
    pub samples: Vec<f64>,
    pub omega0: f64,
}

impl OmegaHistory {
    pub fn new(axis: Vec3, h: f64, samples: Vec<f64>, omega0: f64, radius: f64) -> Result<Self> {
        require(h > 0.0 && h.is_finite(), "h", "must be positive")?;
        require(!samples.is_empty(), "samples", "history is empty")?;
        let axis = axis.normalized().ok_or_else(|| crate::error::invalid("axis", "zero vector"))?;
        for &w in samples.iter().chain(std::iter::once(&omega0)) {
            if !w.is_finite() {
                return Err(Error::NonFinite("omega history"));
            }
            if w.abs() * radius > 1.0 {
                return Err(Error::Superluminal(w.abs() * radius));
            }
        }
        Ok(OmegaHistory { axis, h, samples, omega0 })
    }

    pub fn constant(omega0: f64, h: f64, t_end: f64, radius: f64) -> Result<Self> {
        let n = (t_end / h).ceil() as usize + 1;
        Self::new(Vec3::Z, h, vec![omega0; n], omega0, radius)
    }

    pub fn end(&self) -> f64 {
        (self.samples.len() - 1) as f64 * self.h
    }

    /// ω at time `t` by linear interpolation; ω₀ for t < 0.
    pub fn at(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Ok(self.omega0);
        }
        let x = t / self.h;
        let last = self.samples.len() - 1;
        if x > last as f64 + 1e-9 {
            return Err(Error::HistoryGap(t));
        }
        let i = (x.floor() as usize).min(last.saturating_sub(1));
        if last == 0 {
            return Ok(self.samples[0]);
        }
        let s = (x - i as f64).clamp(0.0, 1.0);
        Ok(self.samples[i] * (1.0 - s) + self.samples[i + 1] * s)
    }
}

/// Retarded vector potential
/// `∫ (ω₀ + Θ(t−|x−y|)(ω(t−|x−y|) − ω₀)) a × y / |x−y| f_e(|y|) d³y`.
pub fn source_potential(charge: &RadialProfile, history: &OmegaHistory, x: Vec3, t: f64) -> Result<Vec3> {
    source_potential_with(charge, history, x, t, 48, 96)
}

pub fn source_potential_with(
    charge: &RadialProfile,
    history: &OmegaHistory,
    x: Vec3,
    t: f64,
    polar: usize,
    azimuth: usize,
) -> Result<Vec3> {
    let rule = GaussLegendre::new(polar);
    let a = history.axis;
    let helper = if a.x().abs() < 0.9 { Vec3::new(1.0, 0.0, 0.0) } else { Vec3::new(0.0, 1.0, 0.0) };
    let e1 = helper.cross(a).normalized().unwrap();
    let e2 = a.cross(e1);
    let dphi = std::f64::consts::TAU / azimuth as f64;
    let mut acc = Vec3::ZERO;
    for (r, w) in charge.nodes() {
        let mut mean = Vec3::ZERO;
        for (u, wu) in rule.mapped(-1.0, 1.0) {
            let s = (1.0 - u * u).sqrt();
            for k in 0..azimuth {
                let phi = (k as f64 + 0.5) * dphi;
                let y = (a * u + (e1 * phi.cos() + e2 * phi.sin()) * s) * r;
                let dist = (x - y).norm();
                let tr = t - dist;
                let omega = if tr >= 0.0 { history.at(tr)? } else { history.omega0 };
                mean = mean + a.cross(y) * (omega / dist * wu * 0.5 / azimuth as f64);
            }
        }
        acc = acc + mean * w;
    }
    if !acc.is_finite() {
        return Err(Error::NonFinite("source potential"));
    }
    Ok(acc)
}

/// Stream function Σ(ζ, z) = ζ² q(r) of the stationary field for ω = 1,
/// solving `∂ζζΣ − ζ⁻¹∂ζΣ + ∂zzΣ = −4π ζ² f_e`.
///
/// With A(r) = 4π∫_{s≤r} s⁴ f and B(r) = 4π∫_{s>r} s f:
/// q = (A/r³ + B)/3 and q' = −A/r⁴.
#[derive(Debug, Clone)]
pub struct StaticStream {
    charge: RadialProfile,
    /// 4π∫ s⁴ f over the whole profile.
    a_total: f64,
}

impl StaticStream {
    pub fn new(charge: &RadialProfile) -> Self {
        let a_total = charge.radial_moment(|r| r * r).expect("finite moment");
        StaticStream { charge: charge.clone(), a_total }
    }

    pub fn radius(&self) -> f64 {
        self.charge.radius()
    }

    fn a_b(&self, r: f64, outside: bool) -> (f64, f64) {
        let big_r = self.charge.radius();
        if r > big_r || (outside && r >= big_r) {
            return (self.a_total, 0.0);
        }
        if self.charge.is_shell() {
            return (0.0, self.charge.total() / big_r);
        }
        let a = self.charge.moment_between(|s| s * s, 0.0, r).unwrap_or(0.0);
        let b = self.charge.moment_between(|s| 1.0 / s, r, big_r).unwrap_or(0.0);
        (a, b)
    }

    /// (q, q') at radius r; at a shell radius `outside` selects the limit.
    pub fn q(&self, r: f64, outside: bool) -> (f64, f64) {
        let (a, b) = self.a_b(r, outside);
        if r <= 0.0 {
            return (b / 3.0, 0.0);
        }
        let r3 = r * r * r;
        ((a / r3 + b) / 3.0, -a / (r3 * r))
    }

    /// F(r) = r² q(r) and F'(r) = 2 r q + r² q'.
    pub fn radial(&self, r: f64, outside: bool) -> (f64, f64) {
        let (q, dq) = self.q(r, outside);
        (r * r * q, 2.0 * r * q + r * r * dq)
    }

    pub fn sigma(&self, zeta: f64, z: f64) -> f64 {
        zeta * zeta * self.q(zeta.hypot(z), true).0
    }

    /// (∂ζΣ, ∂zΣ).
    pub fn gradient(&self, zeta: f64, z: f64, outside: bool) -> (f64, f64) {
        let r = zeta.hypot(z);
        let (q, dq) = self.q(r, outside);
        if r == 0.0 {
            return (0.0, 0.0);
        }
        (2.0 * zeta * q + zeta * zeta * dq * zeta / r, zeta * zeta * dq * z / r)
    }

    /// Profile average ∫ Σ f_e dV = (2/3) 4π∫ F f r² dr.
    pub fn profile_average(&self) -> f64 {
        let big_r = self.charge.radius();
        self.charge
            .radial_moment(|r| {
                // the shell sees the continuous value at R
                let outside = r >= big_r;
                2.0 / 3.0 * self.radial(r, outside).0
            })
            .unwrap_or(f64::NAN)
    }

    /// Magnetic dipole coefficient: Σ → D ζ²/r³ outside the particle.
    pub fn dipole(&self) -> f64 {
        self.a_total / 3.0
    }
}
