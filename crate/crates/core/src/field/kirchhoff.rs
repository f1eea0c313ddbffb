//! Free radiation field from pulse data by Kirchhoff's spherical-mean formula
//! 𝒜(x,t) = t M_t[∂t𝒜′₀] + M_t[𝒜′₀] + t M_t[(n·∇)𝒜′₀].

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::field::pulse::WavePulse;
use crate::profile::RadialProfile;
use crate::quadrature::GaussLegendre;
use crate::vec3::Vec3;

#[derive(Debug, Clone)]
pub struct Kirchhoff {
    rule: GaussLegendre,
    azimuth: usize,
}

impl Default for Kirchhoff {
    fn default() -> Self {
        Kirchhoff::new(32, 64)
    }
}

fn frame(axis: Vec3) -> (Vec3, Vec3) {
    let helper = if axis.x().abs() < 0.9 { Vec3::new(1.0, 0.0, 0.0) } else { Vec3::new(0.0, 1.0, 0.0) };
    let e1 = helper.cross(axis).normalized().unwrap();
    (e1, axis.cross(e1))
}

impl Kirchhoff {
    pub fn new(polar: usize, azimuth: usize) -> Self {
        Kirchhoff { rule: GaussLegendre::new(polar.max(2)), azimuth: azimuth.max(3) }
    }

    /// Field at `x` and time `t ≥ 0`.
    ///
    /// The polar axis of the averaging sphere points along x, so the set of
    /// directions hitting the annulus is an interval in cos γ; the Gauss rule
    /// runs over that interval only.
    pub fn wave(&self, pulse: &WavePulse, x: Vec3, t: f64) -> Result<Vec3> {
        if pulse.is_zero() {
            return Ok(Vec3::ZERO);
        }
        if !(x.is_finite() && t.is_finite()) {
            return Err(Error::NonFinite("Kirchhoff evaluation point"));
        }
        if t == 0.0 {
            return Ok(pulse.potential(x));
        }
        let (r_min, r_max) = pulse.support();
        let d = x.norm();
        let (axis, u_lo, u_hi) = if d > 1e-12 * (r_min + t) {
            let lo = (r_min * r_min - d * d - t * t) / (2.0 * d * t);
            let hi = (r_max * r_max - d * d - t * t) / (2.0 * d * t);
            (x * (1.0 / d), lo.max(-1.0), hi.min(1.0))
        } else if t > r_min && t < r_max {
            (Vec3::Z, -1.0, 1.0)
        } else {
            return Ok(Vec3::ZERO);
        };
        if u_hi <= u_lo {
            return Ok(Vec3::ZERO);
        }
        let (e1, e2) = frame(axis);
        let dphi = std::f64::consts::TAU / self.azimuth as f64;
        let mut acc = Vec3::ZERO;
        for (u, w) in self.rule.mapped(u_lo, u_hi) {
            let sin = (1.0 - u * u).max(0.0).sqrt();
            let mut ring = Vec3::ZERO;
            for k in 0..self.azimuth {
                let phi = (k as f64 + 0.5) * dphi;
                let n = axis * u + (e1 * phi.cos() + e2 * phi.sin()) * sin;
                let y = x + n * t;
                ring = ring
                    + pulse.potential(y)
                    + (pulse.potential_rate(y) + pulse.potential_derivative(y, n)) * t;
            }
            acc = acc + ring * (w / self.azimuth as f64);
        }
        let out = acc * 0.5;
        if !out.is_finite() {
            return Err(Error::NonFinite("pulse data"));
        }
        Ok(out)
    }

    /// ψ of the free field at (ζ, z): 𝒜 · (ẑ × x) evaluated at x = (ζ, 0, z).
    pub fn psi(&self, pulse: &WavePulse, zeta: f64, z: f64, t: f64) -> Result<f64> {
        Ok(zeta * self.wave(pulse, Vec3::new(zeta, 0.0, z), t)?.y())
    }
}

/// Kirchhoff field with the default 32 × 64 sphere rule.
pub fn kirchhoff_wave(pulse: &WavePulse, x: Vec3, t: f64) -> Result<Vec3> {
    Kirchhoff::default().wave(pulse, x, t)
}

/// Axis component of ∫ x × 𝒜_wave(x, t) f_e d³x as a function of t.
///
/// For an axisymmetric pulse the axis component of x × 𝒜 equals ψ and does
/// not depend on the azimuth, so one meridian per radial node suffices.
#[derive(Debug, Clone)]
pub struct WaveTorque {
    kirchhoff: Kirchhoff,
    nodes: Vec<(f64, f64)>,
    polar: GaussLegendre,
    radius: f64,
}

impl WaveTorque {
    pub fn new(charge: &RadialProfile, kirchhoff: Kirchhoff, polar_nodes: usize) -> Self {
        WaveTorque {
            kirchhoff,
            nodes: charge.nodes(),
            polar: GaussLegendre::new(polar_nodes.max(2)),
            radius: charge.radius(),
        }
    }

    pub fn for_profile(charge: &RadialProfile) -> Self {
        WaveTorque::new(charge, Kirchhoff::default(), 32)
    }

    pub fn eval(&self, pulse: &WavePulse, t: f64) -> Result<f64> {
        if pulse.is_zero() {
            return Ok(0.0);
        }
        let (r_min, r_max) = pulse.support();
        if t < r_min - self.radius || t > r_max + self.radius {
            return Ok(0.0);
        }
        let mut acc = 0.0;
        for &(r, w) in &self.nodes {
            let mut mean = 0.0;
            for (u, wu) in self.polar.mapped(-1.0, 1.0) {
                let zeta = r * (1.0 - u * u).sqrt();
                mean += 0.5 * wu * self.kirchhoff.psi(pulse, zeta, r * u, t)?;
            }
            acc += w * mean;
        }
        Ok(acc)
    }

    /// Values at `t_i = i h`, i = 0..n.
    pub fn series(&self, pulse: &WavePulse, h: f64, n: usize, exec: Execution) -> Result<Vec<f64>> {
        exec::map_collect(exec, n + 1, |i| self.eval(pulse, i as f64 * h)).into_iter().collect()
    }

    /// Full vector ∫ x × 𝒜_wave f_e d³x with an explicit azimuthal rule.
    pub fn eval_vector(&self, pulse: &WavePulse, t: f64, azimuth: usize) -> Result<Vec3> {
        let mut acc = Vec3::ZERO;
        let dphi = std::f64::consts::TAU / azimuth as f64;
        for &(r, w) in &self.nodes {
            for (u, wu) in self.polar.mapped(-1.0, 1.0) {
                let s = (1.0 - u * u).sqrt();
                for k in 0..azimuth {
                    let phi = (k as f64 + 0.3) * dphi;
                    let x = Vec3::new(r * s * phi.cos(), r * s * phi.sin(), r * u);
                    let a = self.kirchhoff.wave(pulse, x, t)?;
                    acc = acc + x.cross(a) * (w * 0.5 * wu / azimuth as f64);
                }
            }
        }
        Ok(acc)
    }
}
