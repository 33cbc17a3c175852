use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use dynmirror::dfs::FixedShareState;
use dynmirror::dmd::{DmdConfig, DmdState};
use dynmirror::dynamics::{audit_contraction, shift_family_with, Boundary};
use dynmirror::experiments::{generate_video, LossStream, VideoScenario, VideoStream};
use dynmirror::geometry::{BregmanGeometry, FeasibleSet, StepSchedule};
use dynmirror::Execution;

const MODES: [Execution; 2] = [Execution::Sequential, Execution::Parallel];

fn dfs_rounds(c: &mut Criterion) {
    let scenario = VideoScenario::desk(3);
    let stream = VideoStream::new(scenario.clone(), None).unwrap();
    let shape = scenario.shape();
    let set = FeasibleSet::uniform_box(shape.len(), 0.0, 1.0).unwrap();
    let losses: Vec<_> = (1..=20).map(|t| stream.loss(t).unwrap()).collect();
    let mut group = c.benchmark_group("dfs_20_rounds_32x32");
    for exec in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(exec), &exec, |b, &exec| {
            b.iter(|| {
                let experts = shift_family_with(scenario.rows, scenario.cols, Boundary::Wrap)
                    .unwrap()
                    .into_iter()
                    .map(|m| {
                        let cfg = DmdConfig::new(
                            BregmanGeometry::squared_euclidean(),
                            set.clone(),
                            StepSchedule::Constant(0.2),
                            m,
                        );
                        DmdState::new(cfg, shape).unwrap()
                    })
                    .collect();
                let mut dfs = FixedShareState::new(experts, StepSchedule::Constant(0.5), 0.01)
                    .unwrap()
                    .with_execution(exec);
                for (t, loss) in losses.iter().enumerate() {
                    black_box(dfs.step(loss, t as u64 + 1).unwrap());
                }
            })
        });
    }
    group.finish();
}

fn audits(c: &mut Criterion) {
    let models = shift_family_with(32, 32, Boundary::ZeroFill).unwrap();
    let geom = BregmanGeometry::squared_euclidean();
    let set = FeasibleSet::uniform_box(32 * 32, 0.0, 1.0).unwrap();
    let shape = dynmirror::Shape::Matrix { rows: 32, cols: 32 };
    let mut group = c.benchmark_group("audit_1000_pairs");
    for exec in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(exec), &exec, |b, &exec| {
            b.iter(|| black_box(audit_contraction(&models[1], &geom, &set, shape, 1000, 1, exec).unwrap()))
        });
    }
    group.finish();
}

fn video_generation(c: &mut Criterion) {
    let scenario = VideoScenario::desk(5);
    let mut group = c.benchmark_group("generate_desk_video");
    group.sample_size(10);
    for exec in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(exec), &exec, |b, &exec| {
            b.iter(|| black_box(generate_video(&scenario, exec).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, dfs_rounds, audits, video_generation);
criterion_main!(benches);
