//! Field-grid co-simulation of the spin coupled to ψ, and the conservation
//! audits run along it.
//!
//! Each step is kick–drift–kick for ψ. Between the drift and the second kick
//! the bare spin is advanced so that s_b + s_f is unchanged, s_f being the
//! particle average of ψ; this is the torque law ds_b/dt = −ds_f/dt at the
//! midpoint. The step is symmetric and reverses exactly under dt → −dt.

use serde::Serialize;

use crate::error::{require, Error, Result};
use crate::exec::Execution;
use crate::field::functionals::{FieldEnergy, FieldProbe};
use crate::field::grid::{cfl_limit, AxisymmetricFieldGrid, GridSpec};
use crate::field::pulse::WavePulse;
use crate::kernel::{KernelTable, DEFAULT_SAMPLES};
use crate::profile::{ProfileKind, RadialProfile, UnitSystem};
use crate::rotor::RotorModel;
use crate::solver::SpinTrajectory;
use crate::vec3::Vec3;

/// Physical setup shared by both solvers.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub units: UnitSystem,
    pub charge: ProfileKind,
    pub mass: ProfileKind,
    /// Initial angular velocity along ẑ.
    pub omega0: f64,
    pub pulse: WavePulse,
}

impl Scenario {
    /// Shell particle with e²/(m_b R) = 1, ω₀R = 0.3 and no incoming field.
    pub fn shell_soliton() -> Self {
        Scenario {
            units: UnitSystem::default(),
            charge: ProfileKind::Shell,
            mass: ProfileKind::Shell,
            omega0: 0.3,
            pulse: WavePulse::zero(),
        }
    }

    /// Shell soliton hit by a bump on the annulus [3R, 4R].
    pub fn shell_scatter(amplitude: f64) -> Result<Self> {
        let r = 1.0;
        Ok(Scenario { pulse: WavePulse::bump(amplitude, 3.0 * r, 4.0 * r, r)?, ..Self::shell_soliton() })
    }

    pub fn charge_profile(&self) -> Result<RadialProfile> {
        self.units.charge(self.charge)
    }

    pub fn mass_profile(&self) -> Result<RadialProfile> {
        self.units.mass(self.mass)
    }

    pub fn rotor(&self) -> Result<RotorModel> {
        RotorModel::new(&self.mass_profile()?)
    }

    pub fn kernel(&self, exec: Execution) -> Result<KernelTable> {
        Ok(KernelTable::build(&self.charge_profile()?, DEFAULT_SAMPLES, exec))
    }

    pub fn s_b0(&self, rotor: &RotorModel) -> Result<f64> {
        rotor.bare_spin(self.omega0)
    }
}

/// How far the outer boundary sits from the particle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DomainSizing {
    /// Nothing reflected at the boundary reaches the particle before T.
    ParticleOnly,
    /// Nothing leaves the audit box before T.
    Audit,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CosimConfig {
    pub h: f64,
    /// Time step; `None` selects h/2.
    pub dt: Option<f64>,
    pub t_end: f64,
    /// Audit every `stride` steps (the trajectory keeps every step).
    pub stride: usize,
    pub sizing: DomainSizing,
    /// Cells between the audit box and the outer boundary.
    pub margin: usize,
    pub audit: bool,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for CosimConfig {
    fn default() -> Self {
        CosimConfig {
            h: 1.0 / 16.0,
            dt: None,
            t_end: 12.0,
            stride: 4,
            sizing: DomainSizing::Audit,
            margin: 4,
            audit: true,
            exec: Execution::default(),
        }
    }
}

impl CosimConfig {
    pub fn dt(&self) -> f64 {
        self.dt.unwrap_or(0.5 * self.h)
    }

    /// Half-width of the square domain for a pulse of outer radius `r_max`.
    pub fn half_width(&self, radius: f64, r_max: f64) -> f64 {
        let r_max = r_max.max(radius);
        match self.sizing {
            DomainSizing::ParticleOnly => 0.5 * (self.t_end + r_max + radius) + radius,
            DomainSizing::Audit => r_max + self.t_end + 2.0 * radius + self.margin as f64 * self.h,
            DomainSizing::Fixed(l) => l,
        }
    }
}

/// One audit record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuditSample {
    pub t: f64,
    pub s_b: f64,
    pub omega: f64,
    pub s_f: f64,
    pub torque: f64,
    /// W = W_C + field energy + m(|ω|).
    pub energy: f64,
    pub field_energy: FieldEnergy,
    /// ℒ_axis = field angular momentum + s_b.
    pub angular_momentum: f64,
    /// σ = |s_b + s_f|.
    pub sigma: f64,
    pub linear_momentum: f64,
    pub spin_orbit: f64,
    /// |P_z| + |N_e·ω|.
    pub p_norm: f64,
    /// |Δm/Δt − P̄| over the step ending at t (zero at t = 0).
    pub power_residual: f64,
    pub force: f64,
    pub divergence_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Drift {
    pub energy: f64,
    pub angular_momentum: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub h: f64,
    pub dt: f64,
    pub half_width: f64,
    pub samples: Vec<AuditSample>,
    /// max_t |X(t) − X(0)| / |X(0)|.
    pub drift: Drift,
    pub max_power_residual: f64,
    pub max_linear_momentum: f64,
    pub max_spin_orbit: f64,
    pub divergence_residual: f64,
}

impl AuditReport {
    fn from_samples(h: f64, dt: f64, half_width: f64, samples: Vec<AuditSample>) -> Self {
        let first = samples.first().copied();
        let rel = |f: fn(&AuditSample) -> f64| match first {
            Some(s0) => {
                let base = f(&s0).abs().max(f64::MIN_POSITIVE);
                samples.iter().map(|s| (f(s) - f(&s0)).abs() / base).fold(0.0, f64::max)
            }
            None => 0.0,
        };
        let drift = Drift {
            energy: rel(|s| s.energy),
            angular_momentum: rel(|s| s.angular_momentum),
            sigma: rel(|s| s.sigma),
        };
        let max = |f: fn(&AuditSample) -> f64| samples.iter().map(|s| f(s).abs()).fold(0.0, f64::max);
        AuditReport {
            h,
            dt,
            half_width,
            drift,
            max_power_residual: max(|s| s.power_residual),
            max_linear_momentum: max(|s| s.linear_momentum),
            max_spin_orbit: max(|s| s.spin_orbit),
            divergence_residual: max(|s| s.divergence_residual),
            samples,
        }
    }

    pub fn all_finite(&self) -> bool {
        let d = self.drift;
        [d.energy, d.angular_momentum, d.sigma, self.max_power_residual, self.max_linear_momentum, self.max_spin_orbit]
            .iter()
            .all(|v| v.is_finite())
    }
}

/// Energy pieces at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyAudit {
    pub field: FieldEnergy,
    pub gyration_mass: f64,
    pub total: f64,
}

/// W = field energy + m(|ω|) for the grid state.
pub fn audit_energy(grid: &AxisymmetricFieldGrid, probe: &FieldProbe, rotor: &RotorModel) -> Result<EnergyAudit> {
    let field = probe.field_energy(grid);
    let gyration_mass = rotor.gyration_mass(grid.omega)?;
    Ok(EnergyAudit { field, gyration_mass, total: field.total() + gyration_mass })
}

/// ℒ_axis = (1/4π)∫ x × (ℰ × ℬ) dV + s_b.
pub fn audit_angular_momentum(grid: &AxisymmetricFieldGrid, probe: &FieldProbe, s_b: f64) -> f64 {
    probe.field_angular_momentum(grid) + s_b
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstraintAudit {
    pub linear_momentum: f64,
    pub spin_orbit: f64,
    pub divergence_residual: f64,
}

pub fn audit_constraints(grid: &AxisymmetricFieldGrid, probe: &FieldProbe) -> ConstraintAudit {
    ConstraintAudit {
        linear_momentum: probe.field_linear_momentum(grid),
        spin_orbit: probe.spin_orbit(grid),
        divergence_residual: probe.divergence_residual(grid),
    }
}

/// Stepper for the coupled grid and spin.
#[derive(Debug, Clone)]
pub struct CoSim {
    pub grid: AxisymmetricFieldGrid,
    pub probe: FieldProbe,
    rotor: RotorModel,
    pub s_b: f64,
    pub step_count: i64,
}

impl CoSim {
    pub fn new(scenario: &Scenario, config: &CosimConfig) -> Result<Self> {
        let charge = scenario.charge_profile()?;
        let rotor = scenario.rotor()?;
        let r_max = if scenario.pulse.is_zero() { charge.radius() } else { scenario.pulse.support().1 };
        let half = config.half_width(charge.radius(), r_max);
        let spec = GridSpec::square(config.h, half)?;
        let mut grid = AxisymmetricFieldGrid::new(spec, Some(&charge), config.exec)?;
        let s_b = rotor.bare_spin(scenario.omega0)?;
        // ω = 𝒲(s_b) exactly, so the soliton is a fixed point of the step
        grid.init_scattering(&scenario.pulse, rotor.omega_from_spin(s_b));
        let probe = FieldProbe::new(&grid, &charge, config.margin);
        let mut sim = CoSim { grid, probe, rotor, s_b, step_count: 0 };
        sim.update_rate();
        Ok(sim)
    }

    pub fn rotor(&self) -> &RotorModel {
        &self.rotor
    }

    pub fn time(&self) -> f64 {
        self.grid.time
    }

    pub fn field_spin(&self) -> f64 {
        self.probe.field_spin(&self.grid)
    }

    /// Torque at the current integer time, with dω/dt from the spin law.
    pub fn torque(&self) -> f64 {
        self.probe.torque_with_slope(&self.grid, self.rotor.spin_slope(self.grid.omega))
    }

    fn update_rate(&mut self) {
        let tau = self.torque();
        self.grid.omega_rate = tau / self.rotor.spin_slope(self.grid.omega);
    }

    /// Solve s + c𝒲(s) = target for the new bare spin.
    fn solve_spin(&self, target: f64, guess: f64) -> Result<f64> {
        let c = self.probe.sigma_defect();
        let rotor = &self.rotor;
        let g = |s: f64| (s + c * rotor.omega_from_spin(s)) - target;
        let mut x = guess;
        let mut gx = g(x);
        let mut iter = 0;
        while gx != 0.0 {
            let slope = 1.0 + c / rotor.spin_slope(rotor.omega_from_spin(x));
            if !(slope > 0.0) {
                return Err(Error::SolveFailed { step: self.step_count.unsigned_abs() as usize, reason: "non-monotone spin update".into() });
            }
            let next = x - gx / slope;
            let done = (next - x).abs() <= 2.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE);
            x = next;
            gx = g(x);
            iter += 1;
            if done {
                break;
            }
            if iter > 100 || !x.is_finite() {
                return Err(Error::SolveFailed {
                    step: self.step_count.unsigned_abs() as usize,
                    reason: format!("spin update did not converge (residual {gx:.3e})"),
                });
            }
        }
        Ok(x)
    }

    /// One step of size `dt` (negative to run backward).
    pub fn step(&mut self, dt: f64) -> Result<()> {
        self.grid.check_cfl(dt)?;
        let c = self.probe.sigma_defect();
        let omega = self.grid.omega;
        let before = self.probe.particle_average(&self.grid.psi);
        self.grid.kick(omega, 0.5 * dt)?;
        self.grid.drift(dt);
        let target = (self.s_b + c * omega) + (before - self.probe.particle_average(&self.grid.psi));
        self.s_b = self.solve_spin(target, self.s_b)?;
        let omega = self.rotor.omega_from_spin(self.s_b);
        if omega.abs() >= self.rotor.omega_max() {
            return Err(Error::Superluminal(omega.abs() * self.rotor.radius()));
        }
        self.grid.omega = omega;
        self.grid.kick(omega, 0.5 * dt)?;
        self.grid.time += dt;
        self.step_count += if dt >= 0.0 { 1 } else { -1 };
        self.update_rate();
        Ok(())
    }

    /// Audit record at the current time; `previous` is the (m, P) pair of the
    /// preceding step for the power residual.
    pub fn sample(&self, previous: Option<(f64, f64, f64)>) -> Result<AuditSample> {
        let grid = &self.grid;
        let probe = &self.probe;
        let ((energy, angular), constraints) = crate::exec::join(
            grid.execution(),
            || {
                crate::exec::join(
                    grid.execution(),
                    || audit_energy(grid, probe, &self.rotor),
                    || audit_angular_momentum(grid, probe, self.s_b),
                )
            },
            || audit_constraints(grid, probe),
        );
        let energy = energy?;
        let s_f = self.field_spin();
        let torque = self.torque();
        let (_, force) = probe.power_and_force(grid);
        let power = grid.omega * torque;
        let power_residual = match previous {
            Some((t_prev, m_prev, p_prev)) => {
                let dt = grid.time - t_prev;
                ((energy.gyration_mass - m_prev) / dt - 0.5 * (power + p_prev)).abs()
            }
            None => 0.0,
        };
        Ok(AuditSample {
            t: grid.time,
            s_b: self.s_b,
            omega: grid.omega,
            s_f,
            torque,
            energy: energy.total,
            field_energy: energy.field,
            angular_momentum: angular,
            sigma: (self.s_b + s_f).abs(),
            linear_momentum: constraints.linear_momentum,
            spin_orbit: constraints.spin_orbit,
            p_norm: constraints.linear_momentum.abs() + constraints.spin_orbit.abs(),
            power_residual,
            force,
            divergence_residual: constraints.divergence_residual,
        })
    }
}

/// Run the co-simulation to `t_end`, returning s_b at every step and the
/// audit series.
pub fn cosimulate(scenario: &Scenario, config: &CosimConfig) -> Result<(SpinTrajectory, AuditReport)> {
    require(config.t_end > 0.0, "T", "must be positive")?;
    require(config.stride >= 1, "stride", "must be at least 1")?;
    let dt = config.dt();
    let limit = cfl_limit(config.h, 1.0);
    if !(dt > 0.0 && dt <= limit) {
        return Err(Error::Cfl { dt, limit });
    }
    let n = (config.t_end / dt).round() as usize;
    let mut sim = CoSim::new(scenario, config)?;
    let mut values = Vec::with_capacity(n + 1);
    values.push(sim.s_b);
    let mut samples = Vec::new();
    let mut energy0 = None;
    // (t, m, P) at the previous step, for the power residual
    let mut last = {
        let m = sim.rotor.gyration_mass(sim.grid.omega)?;
        (sim.time(), m, sim.grid.omega * sim.torque())
    };
    if config.audit {
        let s = sim.sample(None)?;
        energy0 = Some(s.energy);
        samples.push(s);
    }
    let mut max_power = 0.0f64;
    for k in 1..=n {
        sim.step(dt)?;
        values.push(sim.s_b);
        let m = sim.rotor.gyration_mass(sim.grid.omega)?;
        let p = sim.grid.omega * sim.torque();
        let residual = ((m - last.1) / dt - 0.5 * (p + last.2)).abs();
        max_power = max_power.max(residual);
        if config.audit && (k % config.stride == 0 || k == n) {
            let mut s = sim.sample(Some(last))?;
            s.power_residual = residual;
            if let Some(w0) = energy0 {
                if !s.energy.is_finite() || (s.energy - w0).abs() > 1e3 * w0.abs().max(1.0) {
                    return Err(Error::Blowup { t: s.t, what: format!("energy {} (initial {w0})", s.energy) });
                }
            }
            samples.push(s);
        }
        last = (sim.time(), m, p);
    }
    let half_width = sim.grid.l_z;
    let mut report = AuditReport::from_samples(config.h, dt, half_width, samples);
    report.max_power_residual = report.max_power_residual.max(max_power);
    let s_b0 = values[0];
    let traj = SpinTrajectory { axis: Vec3::Z, values, h: dt, s_b0, omega0: sim.rotor.omega_from_spin(s_b0) };
    Ok((traj, report))
}
