//! Scenario driver behind the `gyroled` binary: presets, configuration and
//! the pipelines that write CSV and JSON artifacts.

pub mod config;

use std::fs;
use std::path::{Path, PathBuf};

use gyroled::audit::{cosimulate, CoSim, CosimConfig};
use gyroled::solver::{decay_rate, picard_solve, volterra_march, weighted_l1_norm, SpinTrajectory};
use gyroled::{Execution, KernelTable, RotorModel};
use serde::Serialize;
use serde_json::{json, Value};

pub use config::{ScenarioConfig, PRESETS};

#[derive(Debug)]
pub enum CliError {
    /// Bad command line or configuration; exit code 2.
    Config(String),
    Physics(gyroled::Error),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "{m}"),
            CliError::Physics(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<gyroled::Error> for CliError {
    fn from(e: gyroled::Error) -> Self {
        CliError::Physics(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Physics(_) => "physics",
            CliError::Io(_) => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "error": { "kind": self.kind(), "message": self.to_string() } })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pipeline {
    Kernel,
    Rotor,
    Field,
    Scatter,
    Cosim,
    Audit,
    Compare,
    Sweep,
}

impl Pipeline {
    pub fn name(self) -> &'static str {
        match self {
            Pipeline::Kernel => "kernel",
            Pipeline::Rotor => "rotor",
            Pipeline::Field => "field",
            Pipeline::Scatter => "scatter",
            Pipeline::Cosim => "cosim",
            Pipeline::Audit => "audit",
            Pipeline::Compare => "compare",
            Pipeline::Sweep => "sweep",
        }
    }
}

/// Result of one pipeline. `passed` is false when a check failed or an
/// iteration did not converge; the artifacts are written either way.
#[derive(Debug, Clone, Serialize)]
pub struct RunOutcome {
    pub command: &'static str,
    pub passed: bool,
    pub summary: Value,
    pub artifacts: Vec<PathBuf>,
}

struct Artifacts {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Artifacts {
    fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        Ok(Artifacts { dir: dir.to_path_buf(), written: Vec::new() })
    }

    fn csv<R: Serialize>(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = R>) -> Result<(), CliError> {
        let path = self.dir.join(name);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(header)?;
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
        self.written.push(path);
        Ok(())
    }

    fn json(&mut self, name: &str, value: &Value) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, serde_json::to_string_pretty(value).expect("json") + "\n")?;
        self.written.push(path);
        Ok(())
    }

    fn finish(self, command: &'static str, passed: bool, summary: Value) -> RunOutcome {
        RunOutcome { command, passed, summary, artifacts: self.written }
    }
}

pub fn run(pipeline: Pipeline, config: &ScenarioConfig) -> Result<RunOutcome, CliError> {
    config.validate()?;
    let out = Artifacts::new(&config.output.dir)?;
    match pipeline {
        Pipeline::Kernel => kernel(config, out),
        Pipeline::Rotor => rotor(config, out),
        Pipeline::Field => field(config, out),
        Pipeline::Scatter => scatter(config, out),
        Pipeline::Cosim => cosim(config, out),
        Pipeline::Audit => audit(config, out),
        Pipeline::Compare => compare(config, out),
        Pipeline::Sweep => sweep(config, out),
    }
}

fn kernel_and_rotor(config: &ScenarioConfig) -> Result<(KernelTable, RotorModel), CliError> {
    let sc = config.scenario()?;
    Ok((sc.kernel(Execution::Parallel)?, sc.rotor()?))
}

fn kernel(config: &ScenarioConfig, mut out: Artifacts) -> Result<RunOutcome, CliError> {
    let (table, rotor) = kernel_and_rotor(config)?;
    let step = table.step;
    out.csv(
        "kernel.csv",
        &["t", "K"],
        table.samples.iter().enumerate().map(|(i, &k)| (i as f64 * step, k)),
    )?;
    let margin = rotor.iota0() - table.norm_1;
    let summary = json!({
        "norms": table.norms(),
        "iota0": rotor.iota0(),
        "smallness_margin": margin,
        "contraction_factor": table.norm_1 / rotor.iota0(),
        "gamma_bound": if margin > 0.0 { Some((rotor.iota0() / table.norm_1).ln()) } else { None },
    });
    out.json("kernel.json", &summary)?;
    Ok(out.finish("kernel", true, summary))
}

fn rotor(config: &ScenarioConfig, mut out: Artifacts) -> Result<RunOutcome, CliError> {
    let sc = config.scenario()?;
    let rotor = sc.rotor()?;
    let top = 0.99 / rotor.radius();
    let n = 200;
    let mut rows = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let w = top * k as f64 / n as f64;
        rows.push((w, rotor.inertia_scalar(w)?, rotor.gyration_mass(w)?, rotor.bare_spin(w)?));
    }
    out.csv("rotor.csv", &["omega", "iota", "m", "s_b"], rows)?;
    let (l1, l2) = rotor.lipschitz_bounds();
    let cap = rotor.spin_cap();
    let summary = json!({
        "iota0": rotor.iota0(),
        "spin_cap": if cap.is_finite() { Some(cap) } else { None },
        "lipschitz": { "omega_map": l1, "cross_map": l2 },
        "omega0": sc.omega0,
        "s_b0": sc.s_b0(&rotor)?,
    });
    out.json("rotor.json", &summary)?;
    Ok(out.finish("rotor", true, summary))
}

fn field(config: &ScenarioConfig, mut out: Artifacts) -> Result<RunOutcome, CliError> {
    let sc = config.scenario()?;
    let cc = config.cosim_config(config.grid.h);
    let mut sim = CoSim::new(&sc, &cc)?;
    let dt = cc.dt();
    let steps = (cc.t_end / dt).round() as usize;
    for _ in 0..steps {
        sim.step(dt)?;
    }
    let g = &sim.grid;
    let stride = config.output.stride;
    let mut rows = Vec::new();
    for j in (0..=g.n_z).step_by(stride) {
        for i in (0..=g.n_zeta).step_by(stride) {
            let k = g.index(i, j);
            rows.push((g.zeta(i), g.z(j), g.psi[k], g.psi_dot[k]));
        }
    }
    out.csv("field.csv", &["zeta", "z", "psi", "psi_dot"], rows)?;
    let summary = json!({ "t": g.time, "s_b": sim.s_b, "omega": g.omega, "h": g.h, "half_width": g.l_z });
    out.json("field.json", &summary)?;
    Ok(out.finish("field", true, summary))
}

fn write_trajectory(out: &mut Artifacts, name: &str, traj: &SpinTrajectory, rotor: &RotorModel) -> Result<(), CliError> {
    let omegas = traj.omegas(rotor);
    out.csv(
        name,
        &["t", "s_b", "omega"],
        traj.values.iter().zip(omegas).enumerate().map(|(i, (&s, w))| (traj.time(i), s, w)),
    )
}

fn scatter(config: &ScenarioConfig, mut out: Artifacts) -> Result<RunOutcome, CliError> {
    let sc = config.scenario()?;
    let (kernel, rotor) = (sc.kernel(Execution::Parallel)?, sc.rotor()?);
    let s0 = sc.s_b0(&rotor)?;
    let sconf = config.solver_config();
    let (traj, iteration) = match config.solver.method {
        config::Method::Volterra => (volterra_march(&sconf, &kernel, &rotor, &sc.pulse, s0)?, None),
        config::Method::Picard => {
            let (t, r) = picard_solve(&sconf, &kernel, &rotor, &sc.pulse, s0)?;
            (t, Some(r))
        }
    };
    write_trajectory(&mut out, "trajectory.csv", &traj, &rotor)?;
    let converged = iteration.as_ref().is_none_or(|r| r.converged);
    let smallness = rotor.iota0() > kernel.norm_1;
    let (decay, decay_ok) = match decay_rate(&traj, &rotor, &kernel, sc.pulse.detach_time(rotor.radius())) {
        Ok(d) => {
            let ok = !smallness || (d.recursion_holds(0.05) && d.gamma_hat >= d.gamma_bound - 0.05);
            (serde_json::to_value(&d).expect("json"), ok)
        }
        Err(e) => (json!({ "unavailable": e.to_string() }), true),
    };
    let end = traj.values.last().copied().unwrap_or(s0);
    let summary = json!({
        "s_b0": s0,
        "s_b_end": end,
        "max_deviation": traj.values.iter().map(|v| (v - s0).abs()).fold(0.0, f64::max),
        "iteration": iteration,
        "decay": decay,
    });
    out.json("scatter.json", &summary)?;
    Ok(out.finish("scatter", converged && decay_ok, summary))
}

fn cosim(config: &ScenarioConfig, mut out: Artifacts) -> Result<RunOutcome, CliError> {
    let sc = config.scenario()?;
    let rotor = sc.rotor()?;
    let (traj, report) = cosimulate(&sc, &config.cosim_config(config.grid.h))?;
    write_trajectory(&mut out, "cosim_trajectory.csv", &traj, &rotor)?;
    out.csv(
        "cosim_series.csv",
        &["t", "energy", "s_f", "torque", "P", "momentum_norm"],
        report.samples.iter().map(|s| (s.t, s.energy, s.s_f, s.torque, s.omega * s.torque, s.p_norm)),
    )?;
    let summary = json!({
        "h": report.h,
        "dt": report.dt,
        "half_width": report.half_width,
        "s_b0": traj.s_b0,
        "s_b_end": traj.values.last(),
        "drift": report.drift,
    });
    out.json("cosim.json", &summary)?;
    Ok(out.finish("cosim", report.all_finite(), summary))
}

fn audit(config: &ScenarioConfig, mut out: Artifacts) -> Result<RunOutcome, CliError> {
    let sc = config.scenario()?;
    let (_, report) = cosimulate(&sc, &config.cosim_config(config.grid.h))?;
    out.csv(
        "audit.csv",
        &["t", "W", "L_axis", "sigma", "p_norm", "power_residual"],
        report.samples.iter().map(|s| (s.t, s.energy, s.angular_momentum, s.sigma, s.p_norm, s.power_residual)),
    )?;
    let tol = config.grid.energy_tol;
    let d = report.drift;
    let checks = json!({
        "energy": d.energy <= tol,
        "angular_momentum": d.angular_momentum <= tol,
        "sigma": d.sigma <= tol,
        "linear_momentum": report.max_linear_momentum <= config.grid.momentum_tol,
        "spin_orbit": report.max_spin_orbit <= config.grid.momentum_tol,
    });
    let passed = report.all_finite() && checks.as_object().unwrap().values().all(|v| v == &Value::Bool(true));
    let mut value = serde_json::to_value(&report).expect("json");
    value["tolerance"] = json!({ "drift": tol, "momentum": config.grid.momentum_tol });
    value["checks"] = checks.clone();
    out.json("audit.json", &value)?;
    let summary = json!({
        "drift": report.drift,
        "max_power_residual": report.max_power_residual,
        "max_linear_momentum": report.max_linear_momentum,
        "max_spin_orbit": report.max_spin_orbit,
        "divergence_residual": report.divergence_residual,
        "checks": checks,
    });
    Ok(out.finish("audit", passed, summary))
}

fn compare(config: &ScenarioConfig, mut out: Artifacts) -> Result<RunOutcome, CliError> {
    let sc = config.scenario()?;
    let (kernel, rotor) = (sc.kernel(Execution::Parallel)?, sc.rotor()?);
    let s0 = sc.s_b0(&rotor)?;
    let mut cosims = Vec::new();
    let mut kernels = Vec::new();
    for h in [config.grid.h, 0.5 * config.grid.h] {
        let cc = config.cosim_config(h);
        let (traj, _) = cosimulate(&sc, &CosimConfig { audit: false, ..cc })?;
        cosims.push(traj);
        let kc = gyroled::solver::SolverConfig { h: cc.dt(), t_end: cc.t_end, ..config.solver_config() };
        kernels.push(volterra_march(&kc, &kernel, &rotor, &sc.pulse, s0)?);
    }
    let sup: Vec<f64> = (0..2).map(|i| cosims[i].sup_difference(&kernels[i])).collect();
    let lambda = 2.0 * gyroled::solver::lambda_star(&kernel, &rotor, 0.0);
    let lam: Vec<f64> = (0..2)
        .map(|i| {
            let d: Vec<f64> = cosims[i].values.iter().zip(&kernels[i].values).map(|(a, b)| a - b).collect();
            weighted_l1_norm(&d, cosims[i].h, lambda).value
        })
        .collect();
    let delta_c = cosims[0].sup_difference(&cosims[1]) / 3.0;
    let delta_k = kernels[0].sup_difference(&kernels[1]) / 3.0;
    let tol = (1e-4 * s0.abs()).max(4.0 / 3.0 * (delta_c + delta_k));
    let order = if sup[1] > 0.0 { Some((sup[0] / sup[1]).log2()) } else { None };
    let passed = sup[1] <= tol;
    write_trajectory(&mut out, "compare_kernel.csv", &kernels[1], &rotor)?;
    write_trajectory(&mut out, "compare_cosim.csv", &cosims[1], &rotor)?;
    let summary = json!({
        "h": [config.grid.h, 0.5 * config.grid.h],
        "sup_difference": sup,
        "lambda_difference": lam,
        "lambda": lambda,
        "error_estimate": { "cosim": delta_c, "kernel": delta_k },
        "tol_combined": tol,
        "order": order,
        "passed": passed,
    });
    out.json("compare.json", &summary)?;
    Ok(out.finish("compare", passed, summary))
}

fn sweep(config: &ScenarioConfig, mut out: Artifacts) -> Result<RunOutcome, CliError> {
    let (m_b, r) = (config.units.m_b, config.units.r);
    let point = |coupling: f64| -> Result<(f64, f64), CliError> {
        let units = gyroled::UnitSystem::new((coupling * m_b * r).sqrt(), m_b, r)?;
        let table = KernelTable::build(&units.charge(config.profiles.charge)?, 1024, Execution::Parallel);
        let rotor = RotorModel::new(&units.mass(config.profiles.mass)?)?;
        Ok((rotor.iota0(), table.norm_1))
    };
    let s = config.sweep;
    let mut rows = Vec::new();
    for k in 0..=s.steps {
        let c = s.coupling_min + (s.coupling_max - s.coupling_min) * k as f64 / s.steps as f64;
        let (iota0, norm_1) = point(c)?;
        rows.push((c, iota0, norm_1, iota0 - norm_1));
    }
    let mut root = None;
    if let Some(w) = rows.windows(2).find(|w| w[0].3 > 0.0 && w[1].3 <= 0.0) {
        let (mut lo, mut hi) = (w[0].0, w[1].0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let (i, n) = point(mid)?;
            if i - n > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        root = Some(0.5 * (lo + hi));
    }
    out.csv(
        "sweep.csv",
        &["coupling", "iota0", "norm_1", "margin", "gamma_bound"],
        rows.iter().map(|&(c, i, n, m)| (c, i, n, m, if m > 0.0 { (i / n).ln() } else { f64::NAN })),
    )?;
    let summary = json!({ "threshold_coupling": root, "points": rows.len() });
    out.json("sweep.json", &summary)?;
    Ok(out.finish("sweep", root.is_some(), summary))
}
