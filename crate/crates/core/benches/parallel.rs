use std::time::Duration;

use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};
use gyroled::audit::Scenario;
use gyroled::field::{AxisymmetricFieldGrid, GridSpec, WaveTorque};
use gyroled::solver::{FixedPointMap, SolverConfig};
use gyroled::{Execution, KernelTable, RadialProfile};

const PATHS: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn kernel_sampling(c: &mut Criterion) {
    let ball = RadialProfile::ball(-1.0, 1.0).unwrap();
    let mut group = c.benchmark_group("kernel_sampling");
    for (name, exec) in PATHS {
        group.bench_with_input(BenchmarkId::new(name, 256), &exec, |b, &exec| {
            b.iter(|| KernelTable::build(&ball, 256, exec))
        });
    }
    group.finish();
}

fn fixed_point_map(c: &mut Criterion) {
    let sc = Scenario::shell_soliton();
    let kernel = sc.kernel(Execution::Parallel).unwrap();
    let rotor = sc.rotor().unwrap();
    let s0 = sc.s_b0(&rotor).unwrap();
    let mut group = c.benchmark_group("fixed_point_map");
    for (name, exec) in PATHS {
        let config = SolverConfig { h: 2.0 / 128.0, t_end: 40.0, exec, ..SolverConfig::default() };
        let n = 2560;
        let sw: Vec<f64> = (0..=n).map(|i| 1e-3 * (i as f64 * 0.01).sin()).collect();
        let map = FixedPointMap::from_parts(&config, &kernel, &rotor, sw, s0).unwrap();
        let u: Vec<f64> = (0..=n).map(|i| s0 * (1.0 + 0.05 * (i as f64 * 0.02).cos())).collect();
        group.bench_with_input(BenchmarkId::new(name, n), &u, |b, u| b.iter(|| map.apply(u)));
    }
    group.finish();
}

fn grid_stepping(c: &mut Criterion) {
    let sc = Scenario::shell_scatter(0.006).unwrap();
    let charge = sc.charge_profile().unwrap();
    let mut group = c.benchmark_group("grid_stepping");
    let h = 1.0 / 32.0;
    for (name, exec) in PATHS {
        let mut grid = AxisymmetricFieldGrid::new(GridSpec::square(h, 12.0).unwrap(), Some(&charge), exec).unwrap();
        grid.init_scattering(&sc.pulse, 0.3);
        group.bench_function(BenchmarkId::new(name, "384x768"), |b| {
            b.iter_batched_ref(|| grid.clone(), |g| g.step_psi(0.3, 0.5 * h).unwrap(), BatchSize::LargeInput)
        });
    }
    group.finish();
}

fn kirchhoff_sweep(c: &mut Criterion) {
    let sc = Scenario::shell_scatter(0.006).unwrap();
    let charge = sc.charge_profile().unwrap();
    let torque = WaveTorque::for_profile(&charge);
    let mut group = c.benchmark_group("kirchhoff_sweep");
    for (name, exec) in PATHS {
        group.bench_with_input(BenchmarkId::new(name, 256), &exec, |b, &exec| {
            b.iter(|| torque.series(&sc.pulse, 1.0 / 32.0, 256, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10).measurement_time(Duration::from_secs(3));
    targets = kernel_sampling, fixed_point_map, grid_stepping, kirchhoff_sweep
}
criterion_main!(benches);
