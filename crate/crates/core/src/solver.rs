//! Bare-spin fixed-point equation
//!
//! s_b(t) = s_b(0) + [s_wave(0) − s_wave(t)] − ∫₀ᵗ (𝒲(s_b(t̃)) − ω₀) K(t − t̃) dt̃ + (cross terms),
//!
//! solved by Picard iteration in the weighted norm ‖u‖_λ = ∫ e^{−λt}|u| dt
//! or by direct Volterra time marching, plus the late-time asymptotics and
//! the damping-rate measurement.

use serde::Serialize;

use crate::error::{invalid, require, Error, Result};
use crate::exec::{self, Execution};
use crate::field::kirchhoff::WaveTorque;
use crate::field::pulse::WavePulse;
use crate::kernel::KernelTable;
use crate::rotor::RotorModel;
use crate::vec3::Vec3;

/// Uniformly sampled axial bare spin s_b(t_i), t_i = i h.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpinTrajectory {
    pub axis: Vec3,
    pub values: Vec<f64>,
    pub h: f64,
    pub s_b0: f64,
    pub omega0: f64,
}

impl SpinTrajectory {
    pub fn constant(s_b0: f64, omega0: f64, h: f64, n: usize) -> Self {
        SpinTrajectory { axis: Vec3::Z, values: vec![s_b0; n + 1], h, s_b0, omega0 }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    pub fn end(&self) -> f64 {
        self.time(self.values.len().saturating_sub(1))
    }

    pub fn omegas(&self, rotor: &RotorModel) -> Vec<f64> {
        self.values.iter().map(|&s| rotor.omega_from_spin(s)).collect()
    }

    /// Every `stride`-th sample, keeping the spacing consistent.
    pub fn subsample(&self, stride: usize) -> Self {
        let stride = stride.max(1);
        SpinTrajectory {
            values: self.values.iter().step_by(stride).copied().collect(),
            h: self.h * stride as f64,
            ..self.clone()
        }
    }

    /// sup |self − other| over common nodes, other sampled at a multiple of
    /// self's step or vice versa.
    pub fn sup_difference(&self, other: &SpinTrajectory) -> f64 {
        let (coarse, fine) = if self.h >= other.h { (self, other) } else { (other, self) };
        let ratio = (coarse.h / fine.h).round() as usize;
        coarse
            .values
            .iter()
            .enumerate()
            .filter_map(|(i, &v)| fine.values.get(i * ratio).map(|&w| (v - w).abs()))
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightedNorm {
    pub value: f64,
    /// e^{−λT} sup|u| / λ: bound on the part of the norm beyond the horizon.
    pub tail_bound: f64,
}

/// Trapezoid approximation of ∫₀^T e^{−λt}|u(t)| dt.
pub fn weighted_l1_norm(values: &[f64], h: f64, lambda: f64) -> WeightedNorm {
    let n = values.len();
    if n == 0 {
        return WeightedNorm { value: 0.0, tail_bound: 0.0 };
    }
    let decay = (-lambda * h).exp();
    let mut weight = 1.0;
    let mut acc = 0.0;
    for (i, v) in values.iter().enumerate() {
        let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        acc += w * weight * v.abs();
        weight *= decay;
    }
    let t_end = (n - 1) as f64 * h;
    let sup = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    WeightedNorm { value: h * acc, tail_bound: (-lambda * t_end).exp() * sup / lambda }
}

/// Weighted norm of a trajectory.
pub fn trajectory_norm(traj: &SpinTrajectory, lambda: f64) -> WeightedNorm {
    weighted_l1_norm(&traj.values, traj.h, lambda)
}

/// L(λ) = (‖s_wave‖∞ + (1 + 1/(λR))‖K‖∞ + (2/R)‖K‖₁) / (λ ι(0)).
pub fn lipschitz_constant(kernel: &KernelTable, rotor: &RotorModel, s_wave_inf: f64, lambda: f64) -> f64 {
    let r = rotor.radius();
    (s_wave_inf + (1.0 + 1.0 / (lambda * r)) * kernel.norm_inf + 2.0 / r * kernel.norm_1)
        / (lambda * rotor.iota0())
}

/// Positive root of L(λ) = 1, by bisection.
pub fn lambda_star(kernel: &KernelTable, rotor: &RotorModel, s_wave_inf: f64) -> f64 {
    let l = |lam: f64| lipschitz_constant(kernel, rotor, s_wave_inf, lam) - 1.0;
    let mut lo = 1e-12;
    let mut hi = 1.0;
    while l(hi) > 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if l(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    /// Norm weight; `None` selects 2λ∗.
    pub lambda: Option<f64>,
    pub h: f64,
    pub t_end: f64,
    /// Stopping tolerance on ‖s⁽ⁿ⁺¹⁾ − s⁽ⁿ⁾‖_λ.
    pub tol: f64,
    /// Additional stopping tolerance on the sup-norm update; the weighted norm
    /// alone cannot see late times on a long horizon.
    pub sup_tol: Option<f64>,
    pub max_iter: usize,
    /// Solve the time-reversed problem (pulse velocity negated): values[i]
    /// then holds s_b(−t_i).
    pub backward: bool,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            lambda: None,
            h: 2.0 / 128.0,
            t_end: 40.0,
            tol: 1e-12,
            sup_tol: Some(1e-13),
            max_iter: 500,
            backward: false,
            exec: Execution::default(),
        }
    }
}

impl SolverConfig {
    fn steps(&self, kernel: &KernelTable) -> Result<(usize, usize)> {
        require(self.h > 0.0 && self.h.is_finite(), "h", "must be positive")?;
        require(self.t_end > 0.0 && self.t_end.is_finite(), "T", "must be positive")?;
        let m = kernel.support() / self.h;
        if (m - m.round()).abs() > 1e-9 * m {
            return Err(invalid("h", format!("2R/h = {m} must be an integer")));
        }
        let n = (self.t_end / self.h).round() as usize;
        Ok((n, m.round() as usize))
    }
}

/// Discretized right-hand side ℱ on the grid t_i = i h.
#[derive(Debug, Clone)]
pub struct FixedPointMap<'a> {
    rotor: &'a RotorModel,
    pub h: f64,
    pub n: usize,
    /// K(j h), j = 0..=M, with K(2R⁻) last.
    pub k: Vec<f64>,
    /// ∫_{jh}^{2R} K, j = 0..=M.
    pub k_tail: Vec<f64>,
    /// s_wave(t_i) along the axis.
    pub s_wave: Vec<f64>,
    pub s_b0: f64,
    pub omega0: f64,
    pub exec: Execution,
}

impl<'a> FixedPointMap<'a> {
    pub fn new(
        config: &SolverConfig,
        kernel: &KernelTable,
        rotor: &'a RotorModel,
        pulse: &WavePulse,
        s_b0: f64,
    ) -> Result<Self> {
        let (n, _) = config.steps(kernel)?;
        let pulse = if config.backward { pulse.time_reversed() } else { pulse.clone() };
        let s_wave = if pulse.is_zero() {
            vec![0.0; n + 1]
        } else {
            WaveTorque::for_profile(kernel.profile()).series(&pulse, config.h, n, config.exec)?
        };
        Self::from_parts(config, kernel, rotor, s_wave, s_b0)
    }

    /// Map with a given wave-spin series (length n + 1).
    pub fn from_parts(
        config: &SolverConfig,
        kernel: &KernelTable,
        rotor: &'a RotorModel,
        s_wave: Vec<f64>,
        s_b0: f64,
    ) -> Result<Self> {
        let (n, _) = config.steps(kernel)?;
        require(s_wave.len() == n + 1, "s_wave", "length must match the time grid")?;
        require(s_b0.is_finite(), "s_b0", "must be finite")?;
        let h = config.h;
        let k = kernel.resample(h);
        let m = k.len() - 1;
        let mut k_tail = vec![0.0; m + 1];
        for j in (0..m).rev() {
            k_tail[j] = k_tail[j + 1] + 0.5 * h * (k[j] + k[j + 1]);
        }
        let omega0 = rotor.omega_from_spin(s_b0);
        Ok(FixedPointMap { rotor, h, n, k, k_tail, s_wave, s_b0, omega0, exec: config.exec })
    }

    pub fn rotor(&self) -> &RotorModel {
        self.rotor
    }

    fn weight(j: usize, m: usize) -> f64 {
        if j == 0 || j == m {
            0.5
        } else {
            1.0
        }
    }

    /// ∫₀^{t_i} g(t̃) K(t_i − t̃) dt̃ by the trapezoid rule on the shared grid.
    fn convolve(&self, g: &[f64], i: usize) -> f64 {
        if i == 0 {
            return 0.0;
        }
        let m = i.min(self.k.len() - 1);
        let mut acc = 0.0;
        for j in 0..=m {
            acc += Self::weight(j, m) * self.k[j] * g[i - j];
        }
        self.h * acc
    }

    /// Axis-reduced ℱ(u): all cross-product terms vanish for axial data.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let dev: Vec<f64> = u.iter().map(|&s| self.rotor.omega_from_spin(s) - self.omega0).collect();
        let mut out = vec![0.0; u.len()];
        let sw0 = self.s_wave[0];
        exec::fill(self.exec, &mut out, |i| {
            self.s_b0 + (sw0 - self.s_wave[i]) - self.convolve(&dev, i)
        });
        out
    }

    /// Full vector ℱ(u) including the 𝒲 × s_wave, ω₀ × 𝒲 tail and 𝒲 × 𝒲
    /// double-convolution terms. The wave spin points along ẑ.
    pub fn apply_vector(&self, u: &[Vec3]) -> Vec<Vec3> {
        let n = u.len();
        let h = self.h;
        let m = self.k.len() - 1;
        let omega0 = Vec3::Z * self.omega0;
        let w: Vec<Vec3> = u.iter().map(|&s| self.rotor.omega_vector(s)).collect();
        let conv = |g: &dyn Fn(usize) -> Vec3, i: usize| -> Vec3 {
            if i == 0 {
                return Vec3::ZERO;
            }
            let mm = i.min(m);
            let mut acc = Vec3::ZERO;
            for j in 0..=mm {
                acc = acc + g(i - j) * (Self::weight(j, mm) * self.k[j]);
            }
            acc * h
        };
        let dev = |i: usize| w[i] - omega0;
        let plain = |i: usize| w[i];
        // integrands of the three cumulative integrals
        let inner: Vec<Vec3> = exec::map_collect(self.exec, n, |i| conv(&plain, i));
        let integrand: Vec<Vec3> = (0..n)
            .map(|i| {
                let tail = if i <= m { self.k_tail[i] } else { 0.0 };
                w[i].cross(Vec3::Z * self.s_wave[i]) - omega0.cross(w[i]) * tail + w[i].cross(inner[i])
            })
            .collect();
        let mut cumulative = vec![Vec3::ZERO; n];
        for i in 1..n {
            cumulative[i] = cumulative[i - 1] + (integrand[i - 1] + integrand[i]) * (0.5 * h);
        }
        let sw0 = self.s_wave[0];
        exec::map_collect(self.exec, n, |i| {
            Vec3::Z * (self.s_b0 + sw0 - self.s_wave[i]) - conv(&dev, i) + cumulative[i]
        })
    }

    pub fn sup_wave(&self) -> f64 {
        self.s_wave.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Axis-reduced ℱ applied to a trajectory.
pub fn fixed_point_map(
    traj: &SpinTrajectory,
    kernel: &KernelTable,
    rotor: &RotorModel,
    pulse: &WavePulse,
) -> Result<SpinTrajectory> {
    let config = SolverConfig { h: traj.h, t_end: traj.end(), ..SolverConfig::default() };
    let map = FixedPointMap::new(&config, kernel, rotor, pulse, traj.s_b0)?;
    Ok(SpinTrajectory { values: map.apply(&traj.values), omega0: map.omega0, ..traj.clone() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub diff_lambda: f64,
    pub diff_sup: f64,
    /// diff_lambda / previous diff_lambda.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationReport {
    pub lambda: f64,
    pub lambda_star: f64,
    pub lipschitz: f64,
    pub s_wave_inf: f64,
    pub converged: bool,
    pub iterations: Vec<IterationRecord>,
    pub max_ratio: f64,
    /// e^{−λT}·diam/λ with diam the sup-norm spread of the iterates.
    pub tail_bound: f64,
    pub tail_within_tolerance: bool,
    pub warnings: Vec<String>,
}

impl IterationReport {
    /// Whether the weighted-norm differences decreased at every iteration.
    pub fn monotone(&self) -> bool {
        self.iterations.windows(2).all(|w| w[1].diff_lambda <= w[0].diff_lambda)
    }
}

/// Picard iteration s⁽ⁿ⁺¹⁾ = ℱ(s⁽ⁿ⁾) from the constant trajectory s_b(0).
pub fn picard_solve(
    config: &SolverConfig,
    kernel: &KernelTable,
    rotor: &RotorModel,
    pulse: &WavePulse,
    s_b0: f64,
) -> Result<(SpinTrajectory, IterationReport)> {
    let map = FixedPointMap::new(config, kernel, rotor, pulse, s_b0)?;
    picard_with_map(config, kernel, &map)
}

pub fn picard_with_map(
    config: &SolverConfig,
    kernel: &KernelTable,
    map: &FixedPointMap<'_>,
) -> Result<(SpinTrajectory, IterationReport)> {
    let rotor = map.rotor();
    let s_wave_inf = map.sup_wave();
    let lam_star = lambda_star(kernel, rotor, s_wave_inf);
    let lambda = config.lambda.unwrap_or(2.0 * lam_star);
    require(lambda > 0.0, "lambda", "must be positive")?;
    let lipschitz = lipschitz_constant(kernel, rotor, s_wave_inf, lambda);
    let mut warnings = Vec::new();
    if lambda <= lam_star {
        warnings.push(format!("lambda = {lambda} does not exceed lambda* = {lam_star}; contraction not guaranteed"));
    }
    let mut current = vec![map.s_b0; map.n + 1];
    let mut records: Vec<IterationRecord> = Vec::new();
    let mut converged = false;
    let mut spread = 0.0f64;
    let mut growth = 0;
    for iteration in 1..=config.max_iter {
        let next = map.apply(&current);
        let diff: Vec<f64> = next.iter().zip(&current).map(|(a, b)| a - b).collect();
        let diff_lambda = weighted_l1_norm(&diff, map.h, lambda).value;
        let diff_sup = diff.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        spread = spread.max(next.iter().map(|v| (v - map.s_b0).abs()).fold(0.0, f64::max));
        let ratio = records.last().and_then(|r| (r.diff_lambda > 0.0).then(|| diff_lambda / r.diff_lambda));
        let sup_grew = records.last().is_some_and(|r| diff_sup >= r.diff_sup);
        records.push(IterationRecord { iteration, diff_lambda, diff_sup, ratio });
        current = next;
        if !diff_sup.is_finite() {
            return Err(Error::Diverged(format!("non-finite iterate at iteration {iteration}")));
        }
        let noise = 1e3 * f64::EPSILON * map.s_b0.abs().max(spread).max(1e-300);
        match ratio {
            // the weighted norm hits its roundoff floor long before the sup norm
            Some(r) if r >= 1.0 && sup_grew && diff_sup > noise => growth += 1,
            _ => growth = 0,
        }
        if growth >= 5 {
            return Err(Error::Diverged(format!(
                "weighted-norm update grew for {growth} consecutive iterations (last ratio {:.3e}, lambda {lambda:.4}, L {lipschitz:.4})",
                ratio.unwrap_or(f64::NAN)
            )));
        }
        let sup_ok = config.sup_tol.is_none_or(|t| diff_sup < t);
        if diff_lambda < config.tol && sup_ok {
            converged = true;
            break;
        }
    }
    let t_end = map.n as f64 * map.h;
    let tail_bound = (-lambda * t_end).exp() * spread.max(f64::MIN_POSITIVE) / lambda;
    let tail_within_tolerance = tail_bound < config.tol / 10.0;
    if !converged {
        warnings.push(format!("no convergence within {} iterations", config.max_iter));
    }
    let max_ratio = records.iter().filter_map(|r| r.ratio).fold(0.0, f64::max);
    let traj = SpinTrajectory { axis: Vec3::Z, values: current, h: map.h, s_b0: map.s_b0, omega0: map.omega0 };
    let report = IterationReport {
        lambda,
        lambda_star: lam_star,
        lipschitz,
        s_wave_inf,
        converged,
        iterations: records,
        max_ratio,
        tail_bound,
        tail_within_tolerance,
        warnings,
    };
    Ok((traj, report))
}

/// Direct time marching of the Volterra form: at each node solve
/// `s + (h K₀/2)(𝒲(s) − ω₀) = rhs` by safeguarded Newton.
pub fn volterra_march(
    config: &SolverConfig,
    kernel: &KernelTable,
    rotor: &RotorModel,
    pulse: &WavePulse,
    s_b0: f64,
) -> Result<SpinTrajectory> {
    let map = FixedPointMap::new(config, kernel, rotor, pulse, s_b0)?;
    march_with_map(&map)
}

pub fn march_with_map(map: &FixedPointMap<'_>) -> Result<SpinTrajectory> {
    let rotor = map.rotor();
    let m = map.k.len() - 1;
    if m < 64 {
        return Err(invalid("h", format!("kernel resolved by only {m} steps; need h <= 2R/64")));
    }
    let h = map.h;
    let c = 0.5 * h * map.k[0];
    let mut s = vec![map.s_b0; map.n + 1];
    let mut dev = vec![0.0; map.n + 1];
    dev[0] = rotor.omega_from_spin(map.s_b0) - map.omega0;
    let sw0 = map.s_wave[0];
    for i in 1..=map.n {
        let mm = i.min(m);
        let mut hist = 0.0;
        for j in 1..=mm {
            hist += FixedPointMap::weight(j, mm) * map.k[j] * dev[i - j];
        }
        let rhs = map.s_b0 + (sw0 - map.s_wave[i]) - h * hist;
        let g = |x: f64| x + c * (rotor.omega_from_spin(x) - map.omega0) - rhs;
        let mut x = s[i - 1];
        let mut gx = g(x);
        let mut iter = 0;
        while gx != 0.0 {
            let w = rotor.omega_from_spin(x);
            let slope = 1.0 + c / rotor.spin_slope(w);
            if !(slope > 0.0) {
                return Err(Error::SolveFailed { step: i, reason: format!("non-monotone node map (slope {slope})") });
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
                return Err(Error::SolveFailed { step: i, reason: format!("Newton did not converge (residual {gx:.3e})") });
            }
        }
        s[i] = x;
        dev[i] = rotor.omega_from_spin(x) - map.omega0;
    }
    Ok(SpinTrajectory { axis: Vec3::Z, values: s, h, s_b0: map.s_b0, omega0: map.omega0 })
}

/// Root of s_b∞ + κ𝒲(s_b∞) = s_b(0) + κω₀.
pub fn asymptotic_spin(kernel: &KernelTable, rotor: &RotorModel, s_b0: f64, omega0: f64) -> Result<f64> {
    let kappa = kernel.kappa;
    let target = s_b0 + kappa * omega0;
    let g = |u: f64| u + kappa * rotor.omega_from_spin(u) - target;
    let mut x = s_b0;
    let mut gx = g(x);
    for _ in 0..200 {
        if gx == 0.0 {
            return Ok(x);
        }
        let slope = 1.0 + kappa / rotor.spin_slope(rotor.omega_from_spin(x));
        if !(slope > 0.0) {
            break;
        }
        let next = x - gx / slope;
        if (next - x).abs() <= 2.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            return Ok(next);
        }
        x = next;
        gx = g(x);
    }
    // bracketing fallback for the monotone map
    let (mut lo, mut hi) = (target - 1.0, target + 1.0);
    while g(lo) > 0.0 {
        lo -= 2.0 * (hi - lo);
    }
    while g(hi) < 0.0 {
        hi += 2.0 * (hi - lo);
    }
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// r(t) = s_b(t) + ∫_{t−2R}^t 𝒲(s_b)K(t−t̃)dt̃ − (s_b(0) + κω₀) for nodes past
/// `t_detach` (and past 2R). Returns (t, r) pairs.
pub fn late_time_residual(
    traj: &SpinTrajectory,
    kernel: &KernelTable,
    rotor: &RotorModel,
    t_detach: f64,
) -> Vec<(f64, f64)> {
    let h = traj.h;
    let k = kernel.resample(h);
    let m = k.len() - 1;
    let w: Vec<f64> = traj.values.iter().map(|&s| rotor.omega_from_spin(s)).collect();
    let target = traj.s_b0 + kernel.kappa * traj.omega0;
    let start = ((t_detach.max(kernel.support()) / h).ceil() as usize).max(m);
    (start..traj.len())
        .map(|i| {
            let mut acc = 0.0;
            for j in 0..=m {
                acc += FixedPointMap::weight(j, m) * k[j] * w[i - j];
            }
            (traj.time(i), traj.values[i] + h * acc - target)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayInterval {
    pub n: usize,
    pub t_start: f64,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub s_b_inf: f64,
    pub intervals: Vec<DecayInterval>,
    /// Fitted rate per 2R interval.
    pub gamma_hat: f64,
    /// ln(ι(0)/‖K‖₁).
    pub gamma_bound: f64,
    /// ‖K‖₁/ι(0).
    pub contraction_factor: f64,
    pub smallness_margin: f64,
    /// Largest M_{n+1}/M_n among intervals above the noise floor.
    pub max_ratio: f64,
    pub noise_floor: f64,
    pub fitted_intervals: usize,
}

impl DecayReport {
    /// Interval recursion M_{n+1} ≤ q M_n with relative slack.
    pub fn recursion_holds(&self, slack: f64) -> bool {
        self.max_ratio <= self.contraction_factor * (1.0 + slack)
    }
}

/// Per-2R maxima of |s_b − s_b∞| after `t_detach`, their log-linear fit,
/// and the theoretical rate.
pub fn decay_rate(
    traj: &SpinTrajectory,
    rotor: &RotorModel,
    kernel: &KernelTable,
    t_detach: f64,
) -> Result<DecayReport> {
    let s_inf = asymptotic_spin(kernel, rotor, traj.s_b0, traj.omega0)?;
    let two_r = kernel.support();
    let per = (two_r / traj.h).round() as usize;
    let first = (t_detach / traj.h).ceil() as usize;
    let mut intervals = Vec::new();
    let mut n = 0;
    loop {
        let a = first + n * per;
        let b = a + per;
        if b >= traj.len() {
            break;
        }
        let max_deviation = traj.values[a..=b].iter().map(|v| (v - s_inf).abs()).fold(0.0, f64::max);
        intervals.push(DecayInterval { n, t_start: traj.time(a), max_deviation });
        n += 1;
    }
    let noise_floor = 1e-12 * traj.s_b0.abs().max(f64::MIN_POSITIVE);
    let usable: Vec<DecayInterval> =
        intervals.iter().take_while(|d| d.max_deviation > noise_floor).cloned().collect();
    if usable.len() < 2 {
        return Err(Error::InsufficientDecay(format!(
            "{} interval(s) above the noise floor {noise_floor:.1e}",
            usable.len()
        )));
    }
    let xs: Vec<f64> = usable.iter().map(|d| d.n as f64).collect();
    let ys: Vec<f64> = usable.iter().map(|d| d.max_deviation.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let max_ratio = usable.windows(2).map(|w| w[1].max_deviation / w[0].max_deviation).fold(0.0, f64::max);
    let q = kernel.norm_1 / rotor.iota0();
    Ok(DecayReport {
        s_b_inf: s_inf,
        intervals,
        gamma_hat: -sxy / sxx,
        gamma_bound: (rotor.iota0() / kernel.norm_1).ln(),
        contraction_factor: q,
        smallness_margin: rotor.iota0() - kernel.norm_1,
        max_ratio,
        noise_floor,
        fitted_intervals: usable.len(),
    })
}
