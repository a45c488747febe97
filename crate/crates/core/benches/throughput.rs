//! Criterion suite comparing the data-parallel episode batch against the
//! sequential path, plus micro-benchmarks for the enumeration oracle and the
//! GF(2^8) elimination.
//!
//! Build with default features for the rayon path; `--no-default-features`
//! measures the sequential fallback on both arms.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use uarnc_core::analytics::FairnessSpec;
use uarnc_core::baselines::SchemeKind;
use uarnc_core::channel::{BerModel, Point2D, RadioParams};
use uarnc_core::coding::{decodable_prefix, encode, Generator, StatusMatrix};
use uarnc_core::scenario::{throughput_samples, Rect, Scenario};
use uarnc_core::scheduler::{
    enumerate_exact, simulate_episode, EpisodeParams, ErasureSource, PolicyState, ReceptionModel,
};
use uarnc_core::seed::SeedTree;

fn bench_scenario() -> Scenario {
    let ring: Vec<Point2D> = (0..20)
        .map(|i| {
            let angle = i as f64 / 20.0 * std::f64::consts::TAU;
            Point2D::new(420.0 * angle.cos(), 420.0 * angle.sin())
        })
        .collect();
    Scenario {
        users: ring,
        area: Rect { xmin: -500.0, xmax: 500.0, ymin: -500.0, ymax: 500.0 },
        altitude: 200.0,
        radio: RadioParams {
            beta0: 1e-7,
            pt: 0.002,
            sigma2: 1e-15,
            n_bits: 10,
            ber_model: BerModel::PaperQ2SqrtGamma,
        },
        layers: 4,
        slots: 8,
        fairness: FairnessSpec { l_min: 1, p_th: 0.5 },
        reception: ReceptionModel::Generic,
    }
}

fn episode_batch(c: &mut Criterion) {
    let scenario = bench_scenario();
    let q = Point2D::new(0.0, 0.0);
    let node = SeedTree::from_master(1).child("bench", 0);
    let runs = 2000;

    let mut group = c.benchmark_group("episode_batch_2000");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| {
            let samples =
                throughput_samples(&scenario, q, SchemeKind::Uarnc, runs, &node).unwrap();
            black_box(samples.iter().sum::<f64>())
        })
    });
    group.bench_function("sequential", |b| {
        let pers = scenario.user_pers(&q).unwrap();
        let params = EpisodeParams {
            pers: &pers,
            layers: scenario.layers,
            slots: scenario.slots,
            model: scenario.reception,
        };
        b.iter(|| {
            let mut total = 0.0;
            for r in 0..runs {
                let episode = node.child("episode", r as u64);
                let mut policy = PolicyState::Gst;
                let mut erasure_rng = episode.child("erasure", 0).rng();
                let mut coeff_rng = episode.child("coeffs", 0).rng();
                total += simulate_episode(
                    &params,
                    &mut policy,
                    ErasureSource::Bernoulli(&mut erasure_rng),
                    &mut coeff_rng,
                )
                .throughput;
            }
            black_box(total)
        })
    });
    group.finish();
}

fn enumeration_oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_exact");
    group.sample_size(10);
    group.bench_function("k2_t8_l4", |b| {
        b.iter(|| {
            black_box(enumerate_exact(&[0.3, 0.2], 4, 8, SchemeKind::Uarnc).unwrap())
        })
    });
    group.finish();
}

fn elimination_prefix(c: &mut Criterion) {
    let layers = 8u8;
    let slots = 12;
    let mut rng = SeedTree::from_master(3).child("bench-gf", 0).rng();
    let mut status = StatusMatrix::new(layers as usize, slots);
    for t in 0..slots {
        let l = (t % layers as usize) as u8 + 1;
        let packet = encode(Generator::new(l, layers).unwrap(), t, &mut rng);
        status.record(&packet);
    }
    c.bench_function("decodable_prefix_l8_t12", |b| {
        b.iter(|| black_box(decodable_prefix(black_box(&status))))
    });
}

criterion_group!(benches, episode_batch, enumeration_oracle, elimination_prefix);
criterion_main!(benches);
