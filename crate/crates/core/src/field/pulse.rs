//! Initial data of a localized, axisymmetric radiation pulse.
//!
//! A pulse is described by χ = ψ/ζ², so that 𝒜 = ψ∇θ = χ (ẑ × x) is regular
//! on the axis. ℰ′₀ = −∂tψ∇θ = −χ̇ (ẑ × x).

use std::fmt::Debug;
use std::sync::Arc;

use crate::error::{require, Result};
use crate::vec3::Vec3;

pub trait PulseShape: Debug + Send + Sync {
    /// (χ, ∂ζχ, ∂zχ) at t = 0.
    fn chi(&self, zeta: f64, z: f64) -> (f64, f64, f64);
    /// ∂tχ at t = 0.
    fn chi_dot(&self, zeta: f64, z: f64) -> f64;
    /// Spherical radii bounding the support.
    fn support(&self) -> (f64, f64);
}

/// Radial bump (1 − s²)⁴, s = (r − r_c)/w, and its derivative.
fn bump(r: f64, center: f64, width: f64) -> (f64, f64) {
    let s = (r - center) / width;
    if s.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let q = 1.0 - s * s;
    (q.powi(4), -8.0 * s * q.powi(3) / width)
}

/// χ = amp·b(r)·(1 + tilt·z/r), χ̇ = rate·amp·b(r). `tilt ≠ 0` breaks the
/// z-reflection symmetry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellBump {
    pub amplitude: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub rate: f64,
    pub tilt: f64,
}

impl ShellBump {
    fn center_width(&self) -> (f64, f64) {
        (0.5 * (self.r_min + self.r_max), 0.5 * (self.r_max - self.r_min))
    }
}

impl PulseShape for ShellBump {
    fn chi(&self, zeta: f64, z: f64) -> (f64, f64, f64) {
        let r = zeta.hypot(z);
        let (c, w) = self.center_width();
        let (b, db) = bump(r, c, w);
        if b == 0.0 && db == 0.0 {
            return (0.0, 0.0, 0.0);
        }
        let a = self.amplitude;
        if self.tilt == 0.0 {
            return (a * b, a * db * zeta / r, a * db * z / r);
        }
        let m = 1.0 + self.tilt * z / r;
        // ∂(z/r)/∂ζ = −zζ/r³, ∂(z/r)/∂z = ζ²/r³
        let r3 = r * r * r;
        let dm_dzeta = -self.tilt * z * zeta / r3;
        let dm_dz = self.tilt * zeta * zeta / r3;
        (
            a * b * m,
            a * (db * zeta / r * m + b * dm_dzeta),
            a * (db * z / r * m + b * dm_dz),
        )
    }

    fn chi_dot(&self, zeta: f64, z: f64) -> f64 {
        if self.rate == 0.0 {
            return 0.0;
        }
        let (c, w) = self.center_width();
        self.rate * self.amplitude * bump(zeta.hypot(z), c, w).0
    }

    fn support(&self) -> (f64, f64) {
        (self.r_min, self.r_max)
    }
}

#[derive(Debug, Clone)]
pub struct WavePulse {
    shape: Option<Arc<dyn PulseShape>>,
    r_min: f64,
    r_max: f64,
    reversed: bool,
}

impl WavePulse {
    pub fn zero() -> Self {
        WavePulse { shape: None, r_min: f64::INFINITY, r_max: f64::INFINITY, reversed: false }
    }

    /// Pulse whose support must lie outside the particle radius.
    pub fn new(shape: Arc<dyn PulseShape>, particle_radius: f64) -> Result<Self> {
        let (r_min, r_max) = shape.support();
        require(
            r_min.is_finite() && r_max.is_finite() && r_max > r_min,
            "pulse support",
            "annulus must be finite and non-empty",
        )?;
        require(r_min > particle_radius, "pulse support", "inner radius must exceed R")?;
        Ok(WavePulse { shape: Some(shape), r_min, r_max, reversed: false })
    }

    /// Symmetric bump in the annulus `[r_min, r_max]` at rest (∂tψ = 0).
    pub fn bump(amplitude: f64, r_min: f64, r_max: f64, particle_radius: f64) -> Result<Self> {
        let shape = ShellBump { amplitude, r_min, r_max, rate: 0.0, tilt: 0.0 };
        Self::new(Arc::new(shape), particle_radius)
    }

    /// Same data with ∂tψ negated: the initial data of the time-reversed run.
    pub fn time_reversed(&self) -> Self {
        let mut p = self.clone();
        p.reversed = !p.reversed;
        p
    }

    pub fn is_zero(&self) -> bool {
        self.shape.is_none()
    }

    pub fn support(&self) -> (f64, f64) {
        (self.r_min, self.r_max)
    }

    /// Time after which the data have left the ball of radius `radius`.
    pub fn detach_time(&self, radius: f64) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            self.r_max + radius
        }
    }

    pub fn chi(&self, zeta: f64, z: f64) -> (f64, f64, f64) {
        match &self.shape {
            Some(s) => s.chi(zeta, z),
            None => (0.0, 0.0, 0.0),
        }
    }

    pub fn chi_dot(&self, zeta: f64, z: f64) -> f64 {
        match &self.shape {
            Some(s) if self.reversed => -s.chi_dot(zeta, z),
            Some(s) => s.chi_dot(zeta, z),
            None => 0.0,
        }
    }

    pub fn psi(&self, zeta: f64, z: f64) -> f64 {
        zeta * zeta * self.chi(zeta, z).0
    }

    pub fn psi_dot(&self, zeta: f64, z: f64) -> f64 {
        zeta * zeta * self.chi_dot(zeta, z)
    }

    fn inside(&self, r: f64) -> bool {
        r > self.r_min && r < self.r_max
    }

    /// 𝒜′₀(y).
    pub fn potential(&self, y: Vec3) -> Vec3 {
        let zeta = y.x().hypot(y.y());
        if !self.inside(zeta.hypot(y.z())) {
            return Vec3::ZERO;
        }
        let (c, _, _) = self.chi(zeta, y.z());
        Vec3::Z.cross(y) * c
    }

    /// −ℰ′₀(y) = ∂t𝒜 at t = 0.
    pub fn potential_rate(&self, y: Vec3) -> Vec3 {
        let zeta = y.x().hypot(y.y());
        if !self.inside(zeta.hypot(y.z())) {
            return Vec3::ZERO;
        }
        Vec3::Z.cross(y) * self.chi_dot(zeta, y.z())
    }

    /// Directional derivative (n·∇)𝒜′₀ at y.
    pub fn potential_derivative(&self, y: Vec3, n: Vec3) -> Vec3 {
        let zeta = y.x().hypot(y.y());
        if !self.inside(zeta.hypot(y.z())) {
            return Vec3::ZERO;
        }
        let (c, dzeta, dz) = self.chi(zeta, y.z());
        let radial = if zeta > 0.0 { (n.x() * y.x() + n.y() * y.y()) / zeta } else { 0.0 };
        let dchi = dzeta * radial + dz * n.z();
        Vec3::Z.cross(y) * dchi + Vec3::Z.cross(n) * c
    }
}
