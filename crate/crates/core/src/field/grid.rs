//! Finite-difference evolution of the stream function ψ(ζ, z) of 𝒜 = ψ∇θ.
//!
//! Nodes sit at ζ_i = i h (ψ = 0 on the axis) and z_j = −L_z + j h. The
//! operator is the conservative form of ∂ζζ − ζ⁻¹∂ζ + ∂zz,
//! `ζ_i h⁻² [(ψ_{i+1}−ψ_i)/ζ_{i+½} − (ψ_i−ψ_{i−1})/ζ_{i−½}] + δ_zz ψ`,
//! which is exact on ζ² and ζ⁴ at every node including the first one.
//!
//! The particle source 4πω ζ² f_e is a surface measure for a shell. It enters
//! as `ψ_tt = L_h(ψ − ω Σ)`, Σ being the exact static solution for ω = 1;
//! ψ − ωΣ stays smooth across the shell so the scheme keeps second order.
//! Time stepping is kick–drift–kick leapfrog, exactly reversible under dt → −dt.

use crate::error::{require, Error, Result};
use crate::exec::{self, Execution};
use crate::field::pulse::WavePulse;
use crate::field::source::StaticStream;
use crate::profile::RadialProfile;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Mesh width, same in ζ and z.
    pub h: f64,
    pub l_zeta: f64,
    pub l_z: f64,
}

impl GridSpec {
    pub fn new(h: f64, l_zeta: f64, l_z: f64) -> Result<Self> {
        require(h > 0.0 && h.is_finite(), "h", "must be positive")?;
        require(l_zeta.is_finite() && l_z.is_finite(), "extent", "must be finite")?;
        require(l_zeta >= 4.0 * h && l_z >= 4.0 * h, "extent", "domain must span several cells")?;
        Ok(GridSpec { h, l_zeta: snap(l_zeta, h), l_z: snap(l_z, h) })
    }

    /// Square domain of half-width `l` rounded up to the mesh.
    pub fn square(h: f64, l: f64) -> Result<Self> {
        Self::new(h, l, l)
    }
}

fn snap(l: f64, h: f64) -> f64 {
    (l / h - 1e-9).ceil() * h
}

/// Largest admissible |dt| for a given CFL factor (≤ 1).
pub fn cfl_limit(h: f64, cfl: f64) -> f64 {
    cfl * h / std::f64::consts::SQRT_2
}

#[derive(Debug, Clone)]
pub struct AxisymmetricFieldGrid {
    pub h: f64,
    /// Largest ζ index; nodes are 0..=n_zeta.
    pub n_zeta: usize,
    /// Largest z index; nodes are 0..=n_z.
    pub n_z: usize,
    pub l_z: f64,
    pub psi: Vec<f64>,
    pub psi_dot: Vec<f64>,
    /// Σ at the nodes (zero without a charge).
    pub sigma: Vec<f64>,
    pub time: f64,
    /// ω tied to the Σ content of ψ.
    pub omega: f64,
    /// dω/dt at `time` (zero for prescribed constant ω).
    pub omega_rate: f64,
    coef_p: Vec<f64>,
    coef_m: Vec<f64>,
    exec: Execution,
}

impl AxisymmetricFieldGrid {
    pub fn new(spec: GridSpec, charge: Option<&RadialProfile>, exec: Execution) -> Result<Self> {
        let h = spec.h;
        let n_zeta = (spec.l_zeta / h).round() as usize;
        let n_z = (2.0 * spec.l_z / h).round() as usize;
        let len = (n_zeta + 1) * (n_z + 1);
        let inv = 1.0 / (h * h);
        let coef_p: Vec<f64> = (0..=n_zeta).map(|i| inv * i as f64 / (i as f64 + 0.5)).collect();
        let coef_m: Vec<f64> =
            (0..=n_zeta).map(|i| if i == 0 { 0.0 } else { inv * i as f64 / (i as f64 - 0.5) }).collect();
        let mut grid = AxisymmetricFieldGrid {
            h,
            n_zeta,
            n_z,
            l_z: spec.l_z,
            psi: vec![0.0; len],
            psi_dot: vec![0.0; len],
            sigma: vec![0.0; len],
            time: 0.0,
            omega: 0.0,
            omega_rate: 0.0,
            coef_p,
            coef_m,
            exec,
        };
        if let Some(charge) = charge {
            let stream = StaticStream::new(charge);
            let cols = n_zeta + 1;
            let z0 = -spec.l_z;
            exec::for_rows(exec, &mut grid.sigma, cols, |j, row| {
                let z = z0 + j as f64 * h;
                for (i, v) in row.iter_mut().enumerate() {
                    *v = stream.sigma(i as f64 * h, z);
                }
            });
        }
        Ok(grid)
    }

    pub fn cols(&self) -> usize {
        self.n_zeta + 1
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * (self.n_zeta + 1) + i
    }

    pub fn zeta(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    pub fn z(&self, j: usize) -> f64 {
        -self.l_z + j as f64 * self.h
    }

    pub fn execution(&self) -> Execution {
        self.exec
    }

    pub fn set_execution(&mut self, exec: Execution) {
        self.exec = exec;
    }

    /// Set ψ and ∂tψ from closures of (ζ, z); the axis is forced to zero.
    pub fn fill<P, D>(&mut self, psi: P, psi_dot: D)
    where
        P: Fn(f64, f64) -> f64 + Sync + Send,
        D: Fn(f64, f64) -> f64 + Sync + Send,
    {
        let (h, z0, cols) = (self.h, -self.l_z, self.cols());
        exec::for_rows(self.exec, &mut self.psi, cols, |j, row| {
            let z = z0 + j as f64 * h;
            for (i, v) in row.iter_mut().enumerate() {
                *v = if i == 0 { 0.0 } else { psi(i as f64 * h, z) };
            }
        });
        exec::for_rows(self.exec, &mut self.psi_dot, cols, |j, row| {
            let z = z0 + j as f64 * h;
            for (i, v) in row.iter_mut().enumerate() {
                *v = if i == 0 { 0.0 } else { psi_dot(i as f64 * h, z) };
            }
        });
    }

    /// Soliton field ω₀Σ plus the free pulse data.
    pub fn init_scattering(&mut self, pulse: &WavePulse, omega0: f64) {
        let sigma = std::mem::take(&mut self.sigma);
        let (h, z0, cols) = (self.h, -self.l_z, self.cols());
        exec::for_rows(self.exec, &mut self.psi, cols, |j, row| {
            let z = z0 + j as f64 * h;
            for (i, v) in row.iter_mut().enumerate() {
                *v = if i == 0 { 0.0 } else { pulse.psi(i as f64 * h, z) + omega0 * sigma[j * cols + i] };
            }
        });
        exec::for_rows(self.exec, &mut self.psi_dot, cols, |j, row| {
            let z = z0 + j as f64 * h;
            for (i, v) in row.iter_mut().enumerate() {
                *v = if i == 0 { 0.0 } else { pulse.psi_dot(i as f64 * h, z) };
            }
        });
        self.sigma = sigma;
        self.omega = omega0;
        self.omega_rate = 0.0;
        self.time = 0.0;
    }

    /// L_h(ψ − ωΣ) at interior node (i, j).
    #[inline]
    fn operator_at(&self, i: usize, j: usize, omega: f64) -> f64 {
        let c = self.cols();
        let k = j * c + i;
        let phi = |k: usize| self.psi[k] - omega * self.sigma[k];
        let p = phi(k);
        let inv = 1.0 / (self.h * self.h);
        self.coef_p[i] * (phi(k + 1) - p) - self.coef_m[i] * (p - phi(k - 1))
            + inv * (phi(k + c) - 2.0 * p + phi(k - c))
    }

    /// L_h(ψ − ωΣ) on all nodes (zero on the axis and the outer boundary).
    pub fn apply_operator(&self, omega: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.psi.len()];
        let (nz, nzeta) = (self.n_z, self.n_zeta);
        exec::for_rows(self.exec, &mut out, self.cols(), |j, row| {
            if j == 0 || j == nz {
                return;
            }
            for (i, v) in row.iter_mut().enumerate().take(nzeta).skip(1) {
                *v = self.operator_at(i, j, omega);
            }
        });
        out
    }

    /// ∂tψ += dt · L_h(ψ − ωΣ) on interior nodes.
    pub fn kick(&mut self, omega: f64, dt: f64) -> Result<()> {
        let mut rate = std::mem::take(&mut self.psi_dot);
        let (nz, nzeta, cols) = (self.n_z, self.n_zeta, self.cols());
        let this = &*self;
        let bad = std::sync::atomic::AtomicBool::new(false);
        exec::for_rows(this.exec, &mut rate, cols, |j, row| {
            if j == 0 || j == nz {
                return;
            }
            let mut finite = true;
            for (i, v) in row.iter_mut().enumerate().take(nzeta).skip(1) {
                *v += dt * this.operator_at(i, j, omega);
                finite &= v.is_finite();
            }
            if !finite {
                bad.store(true, std::sync::atomic::Ordering::Relaxed);
            }
        });
        self.psi_dot = rate;
        if bad.into_inner() {
            return Err(Error::Blowup { t: self.time, what: "non-finite field rate".into() });
        }
        Ok(())
    }

    /// ψ += dt · ∂tψ on interior nodes.
    pub fn drift(&mut self, dt: f64) {
        let rate = std::mem::take(&mut self.psi_dot);
        let (nz, nzeta, cols) = (self.n_z, self.n_zeta, self.cols());
        exec::for_rows(self.exec, &mut self.psi, cols, |j, row| {
            if j == 0 || j == nz {
                return;
            }
            let base = j * cols;
            for (i, v) in row.iter_mut().enumerate().take(nzeta).skip(1) {
                *v += dt * rate[base + i];
            }
        });
        self.psi_dot = rate;
    }

    pub fn check_cfl(&self, dt: f64) -> Result<()> {
        let limit = cfl_limit(self.h, 1.0);
        if !(dt.abs() <= limit) {
            return Err(Error::Cfl { dt, limit });
        }
        Ok(())
    }

    /// One leapfrog step with ω held at `omega_now`.
    pub fn step_psi(&mut self, omega_now: f64, dt: f64) -> Result<()> {
        self.check_cfl(dt)?;
        self.omega = omega_now;
        self.omega_rate = 0.0;
        self.kick(omega_now, 0.5 * dt)?;
        self.drift(dt);
        self.kick(omega_now, 0.5 * dt)?;
        self.time += dt;
        Ok(())
    }

    /// Cubic Lagrange weights for the 4 × 4 node block around (ζ, z); ψ is
    /// continued evenly across the axis. With `dz` set, the weights give ∂zψ.
    pub fn stencil(&self, zeta: f64, z: f64, dz: bool) -> Vec<(usize, f64)> {
        let h = self.h;
        let xi = zeta / h;
        let xj = (z + self.l_z) / h;
        let i0 = xi.floor() as i64;
        let j0 = xj.floor() as i64;
        let wi = lagrange4(xi - i0 as f64, false);
        let mut wj = lagrange4(xj - j0 as f64, dz);
        if dz {
            for w in &mut wj {
                *w /= h;
            }
        }
        let mut out = Vec::with_capacity(16);
        for (a, &wa) in wi.iter().enumerate() {
            let i = (i0 - 1 + a as i64).unsigned_abs() as usize;
            let i = i.min(self.n_zeta);
            for (b, &wb) in wj.iter().enumerate() {
                let j = (j0 - 1 + b as i64).clamp(0, self.n_z as i64) as usize;
                out.push((self.index(i, j), wa * wb));
            }
        }
        out
    }
}

/// Weights at offsets −1, 0, 1, 2 for position s ∈ [0, 1), or their
/// s-derivatives.
fn lagrange4(s: f64, derivative: bool) -> [f64; 4] {
    if !derivative {
        [
            -s * (s - 1.0) * (s - 2.0) / 6.0,
            (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
            -(s + 1.0) * s * (s - 2.0) / 2.0,
            (s + 1.0) * s * (s - 1.0) / 6.0,
        ]
    } else {
        [
            -(3.0 * s * s - 6.0 * s + 2.0) / 6.0,
            (3.0 * s * s - 4.0 * s - 1.0) / 2.0,
            -(3.0 * s * s - 2.0 * s - 2.0) / 2.0,
            (3.0 * s * s - 1.0) / 6.0,
        ]
    }
}

/// Sparse linear functional over grid nodes.
#[derive(Debug, Clone, Default)]
pub struct LinearFunctional {
    pub entries: Vec<(usize, f64)>,
}

impl LinearFunctional {
    pub fn from_terms(mut terms: Vec<(usize, f64)>) -> Self {
        terms.sort_by_key(|t| t.0);
        let mut entries: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
        for (k, w) in terms {
            match entries.last_mut() {
                Some(last) if last.0 == k => last.1 += w,
                _ => entries.push((k, w)),
            }
        }
        LinearFunctional { entries }
    }

    pub fn apply(&self, values: &[f64]) -> f64 {
        self.entries.iter().map(|&(k, w)| w * values[k]).sum()
    }
}
