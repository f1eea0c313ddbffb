//! Units and SO(3)-invariant radial distributions of charge and bare mass.
//!
//! Profiles are accessed only through moments `4π ∫ g(r) f(r) r² dr`, so the
//! surface measure of a thin shell is handled exactly.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, require, Error, Result};
use crate::quadrature::GaussLegendre;

/// Base units: charge magnitude `e`, bare mass `m_b`, radius `r`; c = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    pub e: f64,
    pub m_b: f64,
    pub r: f64,
}

impl Default for UnitSystem {
    fn default() -> Self {
        UnitSystem { e: 1.0, m_b: 1.0, r: 1.0 }
    }
}

impl UnitSystem {
    pub fn new(e: f64, m_b: f64, r: f64) -> Result<Self> {
        for (name, v) in [("e", e), ("m_b", m_b), ("R", r)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, format!("must be finite and positive, got {v}")));
            }
        }
        Ok(UnitSystem { e, m_b, r })
    }

    /// Charge distribution with total −e.
    pub fn charge(&self, kind: ProfileKind) -> Result<RadialProfile> {
        RadialProfile::of_kind(kind, -self.e, self.r)
    }

    /// Bare-mass distribution with total m_b.
    pub fn mass(&self, kind: ProfileKind) -> Result<RadialProfile> {
        RadialProfile::of_kind(kind, self.m_b, self.r)
    }

    /// Dimensionless coupling e²/(m_b R).
    pub fn coupling(&self) -> f64 {
        self.e * self.e / (self.m_b * self.r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Shell,
    Ball,
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Shell,
    Ball,
    /// Unnormalized density samples on a uniform grid over [0, R].
    Tabulated(Vec<f64>),
}

#[derive(Debug, Clone)]
pub struct RadialProfile {
    shape: Shape,
    total: f64,
    radius: f64,
    /// Density = `scale * shape(r)`; 3/(4πR³) for a ball.
    scale: f64,
    rule: GaussLegendre,
    panels: usize,
}

const DEFAULT_ORDER: usize = 16;
const DEFAULT_PANELS: usize = 8;

impl RadialProfile {
    pub fn shell(total: f64, radius: f64) -> Result<Self> {
        check_total_radius(total, radius)?;
        Ok(Self::build(Shape::Shell, total, radius, 1.0))
    }

    pub fn ball(total: f64, radius: f64) -> Result<Self> {
        check_total_radius(total, radius)?;
        let scale = total * 3.0 / (4.0 * PI * radius.powi(3));
        Ok(Self::build(Shape::Ball, total, radius, scale))
    }

    /// Smooth profile from density samples at `r_i = i R / (n − 1)`; the
    /// samples are renormalized so the total moment equals `total`.
    pub fn tabulated(total: f64, radius: f64, samples: Vec<f64>) -> Result<Self> {
        check_total_radius(total, radius)?;
        require(samples.len() >= 4, "table", "needs at least 4 samples")?;
        require(samples.iter().all(|v| v.is_finite()), "table", "samples must be finite")?;
        let mut p = Self::build(Shape::Tabulated(samples), total, radius, 1.0);
        let raw = p.moment_raw(|_| 1.0, 0.0, radius);
        require(raw.abs() > 0.0, "table", "samples integrate to zero")?;
        p.scale = total / raw;
        Ok(p)
    }

    pub fn of_kind(kind: ProfileKind, total: f64, radius: f64) -> Result<Self> {
        match kind {
            ProfileKind::Shell => Self::shell(total, radius),
            ProfileKind::Ball => Self::ball(total, radius),
        }
    }

    fn build(shape: Shape, total: f64, radius: f64, scale: f64) -> Self {
        RadialProfile {
            shape,
            total,
            radius,
            scale,
            rule: GaussLegendre::new(DEFAULT_ORDER),
            panels: DEFAULT_PANELS,
        }
    }

    /// Same profile with a different quadrature order and panel count.
    pub fn with_quadrature(mut self, order: usize, panels: usize) -> Self {
        self.rule = GaussLegendre::new(order.max(2));
        self.panels = panels.max(1);
        if let Shape::Tabulated(_) = self.shape {
            let raw = self.moment_raw(|_| 1.0, 0.0, self.radius) / self.scale;
            self.scale = self.total / raw;
        }
        self
    }

    /// Profile multiplied by `alpha` (charge or mass rescaling).
    pub fn scaled(&self, alpha: f64) -> Self {
        let mut p = self.clone();
        p.total *= alpha;
        p.scale *= alpha;
        p
    }

    pub fn is_shell(&self) -> bool {
        self.shape == Shape::Shell
    }

    pub fn kind_name(&self) -> &'static str {
        match self.shape {
            Shape::Shell => "shell",
            Shape::Ball => "ball",
            Shape::Tabulated(_) => "tabulated",
        }
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Pointwise density; `None` for the shell, which is a surface measure.
    pub fn density(&self, r: f64) -> Option<f64> {
        if !(0.0..=self.radius).contains(&r) {
            return match self.shape {
                Shape::Shell => None,
                _ => Some(0.0),
            };
        }
        match &self.shape {
            Shape::Shell => None,
            Shape::Ball => Some(self.scale),
            Shape::Tabulated(t) => Some(self.scale * interp_table(t, r / self.radius)),
        }
    }

    /// `4π ∫₀^R g(r) f(r) r² dr`.
    pub fn radial_moment<G: FnMut(f64) -> f64>(&self, g: G) -> Result<f64> {
        self.moment_between(g, 0.0, self.radius)
    }

    /// Moment restricted to radii in `[a, b]`; a shell at `R` counts when
    /// `a ≤ R ≤ b`.
    pub fn moment_between<G: FnMut(f64) -> f64>(&self, mut g: G, a: f64, b: f64) -> Result<f64> {
        let mut bad = false;
        let mut checked = |r: f64| {
            let v = g(r);
            if !v.is_finite() {
                bad = true;
            }
            v
        };
        let v = match self.shape {
            Shape::Shell => {
                if a <= self.radius && self.radius <= b {
                    self.total * checked(self.radius)
                } else {
                    0.0
                }
            }
            _ => self.moment_raw(&mut checked, a, b),
        };
        if bad || !v.is_finite() {
            return Err(Error::NonFinite("radial moment integrand"));
        }
        Ok(v)
    }

    fn moment_raw<G: FnMut(f64) -> f64>(&self, mut g: G, a: f64, b: f64) -> f64 {
        let lo = a.max(0.0);
        let hi = b.min(self.radius);
        if hi <= lo {
            return 0.0;
        }
        let cells = match &self.shape {
            Shape::Tabulated(t) => (t.len() - 1).max(self.panels),
            _ => self.panels,
        };
        let width = self.radius / cells as f64;
        let first = ((lo / width).floor() as usize).min(cells - 1);
        let mut acc = 0.0;
        for c in first..cells {
            let c0 = (c as f64 * width).max(lo);
            if c0 >= hi {
                break;
            }
            let c1 = ((c + 1) as f64 * width).min(hi);
            if c1 > c0 {
                acc += self.rule.integrate(c0, c1, |r| {
                    let f = match &self.shape {
                        Shape::Tabulated(t) => interp_table(t, r / self.radius),
                        _ => 1.0,
                    };
                    g(r) * f * r * r
                });
            }
        }
        4.0 * PI * self.scale * acc
    }

    /// Quadrature nodes `(r_k, w_k)` with `Σ w_k g(r_k) = radial_moment(g)`.
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        match &self.shape {
            Shape::Shell => vec![(self.radius, self.total)],
            shape => {
                let cells = match shape {
                    Shape::Tabulated(t) => (t.len() - 1).max(self.panels),
                    _ => self.panels,
                };
                let width = self.radius / cells as f64;
                let mut out = Vec::with_capacity(cells * self.rule.len());
                for c in 0..cells {
                    for (r, w) in self.rule.mapped(c as f64 * width, (c + 1) as f64 * width) {
                        let f = self.density(r).unwrap_or(0.0);
                        out.push((r, 4.0 * PI * w * f * r * r));
                    }
                }
                out
            }
        }
    }

    /// Potential of the distribution at radius `r`:
    /// `4π [ r⁻¹ ∫_{s≤r} f s² ds + ∫_{s>r} f s ds ]`.
    pub fn coulomb_potential(&self, r: f64) -> f64 {
        let inner = if r > 0.0 {
            self.moment_between(|_| 1.0, 0.0, r).unwrap_or(0.0) / r
        } else {
            0.0
        };
        let outer = if r < self.radius {
            match self.shape {
                // the closed endpoint at R belongs to the inner part only when r ≥ R
                Shape::Shell => self.total / self.radius,
                _ => self.moment_raw(|s| 1.0 / s, r, self.radius),
            }
        } else {
            0.0
        };
        inner + outer
    }

    /// `½ ∬ f(x) f(y) / |x − y|`.
    pub fn coulomb_energy(&self) -> f64 {
        match self.shape {
            Shape::Shell => 0.5 * self.total * self.total / self.radius,
            _ => 0.5 * self.moment_raw(|r| self.coulomb_potential(r), 0.0, self.radius),
        }
    }
}

fn check_total_radius(total: f64, radius: f64) -> Result<()> {
    require(total.is_finite() && total != 0.0, "total", "must be finite and nonzero")?;
    require(radius.is_finite() && radius > 0.0, "radius", "must be finite and positive")
}

/// Cubic Hermite interpolation of uniform samples at `u ∈ [0, 1]`, with
/// centered-difference slopes.
fn interp_table(t: &[f64], u: f64) -> f64 {
    let n = t.len() - 1;
    let x = (u.clamp(0.0, 1.0)) * n as f64;
    let i = (x.floor() as usize).min(n - 1);
    let s = x - i as f64;
    let slope = |k: usize| {
        if k == 0 {
            t[1] - t[0]
        } else if k == n {
            t[n] - t[n - 1]
        } else {
            0.5 * (t[k + 1] - t[k - 1])
        }
    };
    let (p0, p1, m0, m1) = (t[i], t[i + 1], slope(i), slope(i + 1));
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * p0
        + (s3 - 2.0 * s2 + s) * m0
        + (-2.0 * s3 + 3.0 * s2) * p1
        + (s3 - s2) * m1
}
