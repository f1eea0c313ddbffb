//! Field functionals on the axisymmetric grid: field spin, torque, power,
//! force, spin–orbit term, energy, angular and linear momentum, Gauss law.
//!
//! Integrals against the particle use cubic interpolation of the smooth part
//! ψ − ωΣ; the Σ part is integrated exactly. Volume integrals run over an
//! audit box V that stays clear of the outer boundary.

use std::f64::consts::PI;

use crate::field::grid::{AxisymmetricFieldGrid, LinearFunctional};
use crate::field::source::StaticStream;
use crate::profile::RadialProfile;
use crate::quadrature::GaussLegendre;

#[derive(Debug, Clone)]
pub struct FieldProbe {
    charge_total: f64,
    value: LinearFunctional,
    z_value: LinearFunctional,
    z_slope: LinearFunctional,
    /// ∫ Σ f_e dV, exact.
    sigma_average: f64,
    /// Interpolation defect ∫Σ f_e − J[Σ_grid].
    sigma_defect: f64,
    /// Audit box: 1 ≤ i ≤ iv, jl ≤ j ≤ jh.
    iv: usize,
    jl: usize,
    jh: usize,
    /// ∫_V |∇Σ|² ζ⁻², ∫_V Σ² ζ⁻², ∫_V ∇φ_C·∇Σ.
    g_static: f64,
    h_static: f64,
    c_static: f64,
    /// ∮_{∂V} φ ζ⁻² ∂nΣ dS as a functional of φ.
    boundary_flux: LinearFunctional,
    coulomb: Vec<f64>,
    coulomb_energy: f64,
    spurious_charge: f64,
    radius: f64,
}

/// Breakdown of the field energy in the audit box.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FieldEnergy {
    pub coulomb: f64,
    pub kinetic: f64,
    pub gradient: f64,
}

impl FieldEnergy {
    pub fn total(&self) -> f64 {
        self.coulomb + self.kinetic + self.gradient
    }
}

impl FieldProbe {
    /// Probe with an audit box `margin` cells inside the outer boundary.
    pub fn new(grid: &AxisymmetricFieldGrid, charge: &RadialProfile, margin: usize) -> Self {
        Self::with_spurious_charge(grid, charge, margin, 0.0)
    }

    /// As [`FieldProbe::new`], with an extra static point-charge field that no
    /// charge density backs (initial data violating Gauss's law).
    pub fn with_spurious_charge(
        grid: &AxisymmetricFieldGrid,
        charge: &RadialProfile,
        margin: usize,
        spurious_charge: f64,
    ) -> Self {
        let h = grid.h;
        let big_r = charge.radius();
        let polar_nodes = ((8.0 * big_r / h).ceil() as usize).max(64);
        let polar = GaussLegendre::new(polar_nodes);
        let mut value = Vec::new();
        let mut z_value = Vec::new();
        let mut z_slope = Vec::new();
        for (r, w) in charge.nodes() {
            for (u, wu) in polar.mapped(-1.0, 1.0) {
                let zeta = r * (1.0 - u * u).max(0.0).sqrt();
                let z = r * u;
                let weight = 0.5 * w * wu;
                for (k, s) in grid.stencil(zeta, z, false) {
                    value.push((k, weight * s));
                    z_value.push((k, weight * z * s));
                }
                for (k, s) in grid.stencil(zeta, z, true) {
                    z_slope.push((k, weight * s));
                }
            }
        }
        let value = LinearFunctional::from_terms(value);
        let stream = StaticStream::new(charge);
        let sigma_average = stream.profile_average();
        let sigma_defect = sigma_average - value.apply(&grid.sigma);

        let jc = grid.n_z / 2;
        let half = (grid.n_z / 2).saturating_sub(margin).min(grid.n_zeta.saturating_sub(margin));
        let (iv, jl, jh) = (grid.n_zeta - margin, jc - half, jc + half);
        let zeta_max = grid.zeta(iv);
        let z_max = grid.z(jh);
        let (g_static, h_static, c_static) = static_integrals(&stream, charge, zeta_max, z_max);

        let mut flux = Vec::new();
        // top and bottom faces: 2π ∫ φ ∂zΣ / ζ dζ with outward normals ±z
        for (j, sign) in [(jh, 1.0), (jl, -1.0)] {
            let z = grid.z(j);
            for i in 1..=iv {
                let zeta = grid.zeta(i);
                let w = if i == iv { 0.5 } else { 1.0 };
                let (_, dz) = stream.gradient(zeta, z, true);
                flux.push((grid.index(i, j), sign * 2.0 * PI * dz / zeta * w * h));
            }
        }
        for j in jl..=jh {
            let w = if j == jl || j == jh { 0.5 } else { 1.0 };
            let (dzeta, _) = stream.gradient(zeta_max, grid.z(j), true);
            flux.push((grid.index(iv, j), 2.0 * PI / zeta_max * dzeta * w * h));
        }

        let mut coulomb = vec![0.0; grid.psi.len()];
        for j in 0..=grid.n_z {
            for i in 0..=grid.n_zeta {
                coulomb[grid.index(i, j)] = charge.coulomb_potential(grid.zeta(i).hypot(grid.z(j)));
            }
        }

        FieldProbe {
            charge_total: charge.total(),
            value,
            z_value: LinearFunctional::from_terms(z_value),
            z_slope: LinearFunctional::from_terms(z_slope),
            sigma_average,
            sigma_defect,
            iv,
            jl,
            jh,
            g_static,
            h_static,
            c_static,
            boundary_flux: LinearFunctional::from_terms(flux),
            coulomb,
            coulomb_energy: charge.coulomb_energy(),
            spurious_charge,
            radius: big_r,
        }
    }

    /// ∫ Σ f_e dV.
    pub fn sigma_average(&self) -> f64 {
        self.sigma_average
    }

    /// Interpolation defect of Σ at the particle, used by the spin update.
    pub fn sigma_defect(&self) -> f64 {
        self.sigma_defect
    }

    /// ∫ g f_e dV for grid data g, without the Σ correction.
    pub fn particle_average(&self, values: &[f64]) -> f64 {
        self.value.apply(values)
    }

    /// Axis component of ∫ x × 𝒜 f_e dV = ∫ ψ f_e dV.
    pub fn field_spin(&self, grid: &AxisymmetricFieldGrid) -> f64 {
        self.value.apply(&grid.psi) + grid.omega * self.sigma_defect
    }

    /// Axis torque −∫ ∂tψ f_e dV, with ∂tω taken from the grid.
    pub fn torque(&self, grid: &AxisymmetricFieldGrid) -> f64 {
        -(self.value.apply(&grid.psi_dot) + grid.omega_rate * self.sigma_defect)
    }

    /// Torque when ∂tω is itself fixed by the spin law dω/dt = τ / s_b'(ω).
    pub fn torque_with_slope(&self, grid: &AxisymmetricFieldGrid, spin_slope: f64) -> f64 {
        -self.value.apply(&grid.psi_dot) / (1.0 + self.sigma_defect / spin_slope)
    }

    /// (P, f_z): power ω·τ and the axial force ω ∫ ∂zψ f_e dV.
    pub fn power_and_force(&self, grid: &AxisymmetricFieldGrid) -> (f64, f64) {
        let omega = grid.omega;
        let p = omega * self.torque(grid);
        let phi_z = self.z_slope.apply(&grid.psi) - omega * self.z_slope.apply(&grid.sigma);
        (p, omega * phi_z)
    }

    /// Axis component of N_e·ω = −ω ∫ z ∂tψ f_e dV (Σ is even in z, so its
    /// exact contribution vanishes).
    pub fn spin_orbit(&self, grid: &AxisymmetricFieldGrid) -> f64 {
        let rate = self.z_value.apply(&grid.psi_dot) - grid.omega_rate * self.z_value.apply(&grid.sigma);
        -grid.omega * rate
    }

    fn box_weight(&self, i: usize, j: usize) -> f64 {
        let wi = if i == self.iv { 0.5 } else { 1.0 };
        let wj = if j == self.jl || j == self.jh { 0.5 } else { 1.0 };
        wi * wj
    }

    /// Field energy (1/8π)∫(|ℰ|² + |ℬ|²) in the audit box.
    pub fn field_energy(&self, grid: &AxisymmetricFieldGrid) -> FieldEnergy {
        let (omega, rate, h) = (grid.omega, grid.omega_rate, grid.h);
        let cols = grid.cols();
        let phi = |k: usize| grid.psi[k] - omega * grid.sigma[k];
        let mut kinetic = 0.0;
        let mut gradient = 0.0;
        for j in self.jl..=self.jh {
            let wj = if j == self.jl || j == self.jh { 0.5 } else { 1.0 };
            for i in 0..=self.iv {
                let k = j * cols + i;
                if i >= 1 {
                    let zeta = grid.zeta(i);
                    let pd = grid.psi_dot[k] - rate * grid.sigma[k];
                    kinetic += self.box_weight(i, j) * h * h * (pd * pd + 2.0 * rate * grid.sigma[k] * pd) / zeta;
                    if j < self.jh {
                        let wi = if i == self.iv { 0.5 } else { 1.0 };
                        let d = phi(k + cols) - phi(k);
                        gradient += wi * d * d / zeta;
                    }
                }
                if i < self.iv {
                    let d = phi(k + 1) - phi(k);
                    gradient += wj * d * d / (grid.zeta(i) + 0.5 * h);
                }
            }
        }
        let cross = 4.0 * PI * (self.value.apply(&grid.psi) - omega * self.value.apply(&grid.sigma))
            + self.boundary_flux.apply(&grid.psi)
            - omega * self.boundary_flux.apply(&grid.sigma);
        let eighth = 1.0 / (8.0 * PI);
        FieldEnergy {
            coulomb: self.coulomb_energy,
            kinetic: 0.25 * kinetic + eighth * rate * rate * self.h_static,
            gradient: 0.25 * gradient + eighth * (2.0 * omega * cross + omega * omega * self.g_static),
        }
    }

    /// Axis component of (1/4π)∫ x × (ℰ × ℬ) dV = (1/4π)∫ ∇φ_C·∇ψ dV.
    pub fn field_angular_momentum(&self, grid: &AxisymmetricFieldGrid) -> f64 {
        let omega = grid.omega;
        let h = grid.h;
        let cols = grid.cols();
        let phi = |k: usize| grid.psi[k] - omega * grid.sigma[k];
        let c = &self.coulomb;
        let mut acc = 0.0;
        for j in self.jl..=self.jh {
            let wj = if j == self.jl || j == self.jh { 0.5 } else { 1.0 };
            for i in 0..=self.iv {
                let k = j * cols + i;
                if i < self.iv {
                    acc += wj * (c[k + 1] - c[k]) * (phi(k + 1) - phi(k)) * (grid.zeta(i) + 0.5 * h);
                }
                if i >= 1 && j < self.jh {
                    let wi = if i == self.iv { 0.5 } else { 1.0 };
                    acc += wi * (c[k + cols] - c[k]) * (phi(k + cols) - phi(k)) * grid.zeta(i);
                }
            }
        }
        (2.0 * PI * acc + omega * self.c_static) / (4.0 * PI)
    }

    /// Axis component of (1/4π)∫ ℰ × ℬ dV = −(1/4π)∫ ∂tψ ∂zψ ζ⁻² dV; the
    /// transverse components vanish by axisymmetry.
    pub fn field_linear_momentum(&self, grid: &AxisymmetricFieldGrid) -> f64 {
        let cols = grid.cols();
        let h = grid.h;
        let mut acc = 0.0;
        for j in self.jl..=self.jh {
            for i in 1..=self.iv {
                let k = j * cols + i;
                let dz = (grid.psi[k + cols] - grid.psi[k - cols]) / (2.0 * h);
                acc += self.box_weight(i, j) * grid.psi_dot[k] * dz / grid.zeta(i);
            }
        }
        -0.5 * h * h * acc
    }

    /// Relative Gauss-law residual |∮ℰ·n − 4πQ| / (4π|Q|) on a box of
    /// half-width ≈ 2R around the particle, from grid differences of φ_C.
    pub fn divergence_residual(&self, grid: &AxisymmetricFieldGrid) -> f64 {
        let h = grid.h;
        let ib = ((2.0 * self.radius / h).ceil() as usize).max(2);
        let jc = grid.n_z / 2;
        let q_s = self.spurious_charge;
        let pot = |i: usize, j: usize| {
            let r = grid.zeta(i).hypot(grid.z(j));
            self.coulomb[grid.index(i, j)] + if q_s != 0.0 { q_s / r } else { 0.0 }
        };
        let b = grid.zeta(ib);
        let mut flux = 0.0;
        for i in 0..=ib {
            let w = if i == 0 || i == ib { 0.5 } else { 1.0 };
            let zeta = grid.zeta(i);
            let ez_top = -(pot(i, jc + ib + 1) - pot(i, jc + ib - 1)) / (2.0 * h);
            let ez_bot = -(pot(i, jc - ib + 1) - pot(i, jc - ib - 1)) / (2.0 * h);
            flux += w * 2.0 * PI * zeta * h * (ez_top - ez_bot);
        }
        for j in jc - ib..=jc + ib {
            let w = if j == jc - ib || j == jc + ib { 0.5 } else { 1.0 };
            let ezeta = -(pot(ib + 1, j) - pot(ib - 1, j)) / (2.0 * h);
            flux += w * 2.0 * PI * b * h * ezeta;
        }
        let q = self.charge_total;
        (flux - 4.0 * PI * q).abs() / (4.0 * PI * q.abs())
    }
}

/// (∫_V |∇Σ|² ζ⁻², ∫_V Σ² ζ⁻², ∫_V ∇φ_C·∇Σ) over the cylinder ζ ≤ ζ_max,
/// |z| ≤ z_max, by spherical quadrature split at r = R and at the corner.
fn static_integrals(stream: &StaticStream, charge: &RadialProfile, zeta_max: f64, z_max: f64) -> (f64, f64, f64) {
    let big_r = charge.radius();
    let rule = GaussLegendre::new(24);
    let q = charge.total();
    let d = stream.dipole();

    let (mut f2_in, mut c_in) = (0.0, 0.0);
    let (mut fp2, mut f2r2) = (0.0, 0.0);
    let panels = 8;
    let nodes: Vec<(f64, f64)> = (0..panels)
        .flat_map(|k| {
            let step = big_r / panels as f64;
            rule.mapped(k as f64 * step, (k + 1) as f64 * step).collect::<Vec<_>>()
        })
        .collect();
    for (r, w) in nodes {
        let (f, fp) = stream.radial(r, false);
        let enclosed = charge.moment_between(|_| 1.0, 0.0, r).unwrap_or(0.0);
        let dphi = if charge.is_shell() { 0.0 } else { -enclosed / (r * r) };
        fp2 += w * fp * fp;
        f2r2 += w * f * f / (r * r);
        f2_in += w * f * f;
        c_in += w * dphi * fp;
    }
    let g_in = 2.0 * PI * (4.0 / 3.0 * fp2 + 2.0 / 3.0 * 4.0 * f2r2);
    let h_in = 2.0 * PI * 4.0 / 3.0 * f2_in;
    let c_in = 2.0 * PI * 4.0 / 3.0 * c_in;

    let corner = zeta_max.atan2(z_max);
    let angular = GaussLegendre::new(32);
    let (mut g_out, mut h_out, mut c_out) = (0.0, 0.0, 0.0);
    for (a, b) in [(0.0, corner), (corner, PI - corner), (PI - corner, PI)] {
        let pieces = 16;
        let step = (b - a) / pieces as f64;
        for p in 0..pieces {
            for (th, w) in angular.mapped(a + p as f64 * step, a + (p + 1) as f64 * step) {
                let (s, c) = th.sin_cos();
                let rb = (zeta_max / s.max(1e-300)).min(z_max / c.abs().max(1e-300));
                let inv3 = (big_r.powi(-3) - rb.powi(-3)) / 3.0;
                let inv1 = 1.0 / big_r - 1.0 / rb;
                g_out += w * 2.0 * PI * s * d * d * (s * s + 4.0 * c * c) * inv3;
                h_out += w * 2.0 * PI * s * s * s * d * d * inv1;
                c_out += w * 2.0 * PI * s * s * s * q * d * inv1;
            }
        }
    }
    (g_in + g_out, h_in + h_out, c_in + c_out)
}
