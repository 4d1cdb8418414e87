//! Criterion benchmarks for the hot paths: nearest-distance queries, cone
//! estimation, and Grassmannian subspace angles.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use nalgebra::DVector;

use conelab::cones::{estimate_cone, ConeKind, DirectionGrid, ParaParams, ScaleLadder};
use conelab::exterior::{subspace_angle, Subspace};
use conelab::setmodel::{build_example, ExampleParams};

fn bench_dist_query(c: &mut Criterion) {
    let set = build_example(
        "circle",
        &ExampleParams {
            delta: Some(1e-4),
            ..Default::default()
        },
    )
    .unwrap();
    let queries: Vec<Vec<f64>> = (0..256)
        .map(|i| {
            let a = i as f64 * 0.0245;
            vec![1.02 * a.cos(), 1.02 * a.sin()]
        })
        .collect();
    c.bench_function("dist_query/circle-31k", |b| {
        let mut i = 0;
        b.iter(|| {
            i = (i + 1) % queries.len();
            set.dist_query(&queries[i])
        })
    });
}

fn bench_estimate_cone(c: &mut Criterion) {
    let set = build_example(
        "circle",
        &ExampleParams {
            delta: Some(1e-4),
            ..Default::default()
        },
    )
    .unwrap();
    let ladder = ScaleLadder::new(0.03, 0.5, 5).unwrap();
    let grid = DirectionGrid::angular_2d(180);
    let mut para = ParaParams::default();
    para.max_base_points = 60;
    c.bench_function("estimate_cone/upper-tangent-circle", |b| {
        b.iter(|| {
            estimate_cone(
                &set,
                &[1.0, 0.0],
                ConeKind::UpperTangent,
                &ladder,
                &grid,
                0.15,
                &para,
            )
            .unwrap()
        })
    });
    c.bench_function("estimate_cone/upper-paratangent-circle", |b| {
        b.iter(|| {
            estimate_cone(
                &set,
                &[1.0, 0.0],
                ConeKind::UpperParatangent,
                &ladder,
                &grid,
                0.15,
                &para,
            )
            .unwrap()
        })
    });
}

fn bench_subspace_angle(c: &mut Criterion) {
    let n = 8;
    let make = |seed: u64| {
        let vecs: Vec<DVector<f64>> = (0..3)
            .map(|k| {
                DVector::from_fn(n, |i, _| {
                    // Cheap deterministic pseudo-random entries.
                    let x = (seed as f64 + 1.0) * (i as f64 + 1.0) * (k as f64 + 1.3);
                    (x.sin() * 43758.5453).fract()
                })
            })
            .collect();
        Subspace::from_spanning(&vecs, n, 1e-9)
    };
    let v = make(1);
    let w = make(2);
    c.bench_function("subspace_angle/3-in-8", |b| {
        b.iter_batched(
            || (v.clone(), w.clone()),
            |(v, w)| subspace_angle(&v, &w).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, bench_dist_query, bench_estimate_cone, bench_subspace_angle);
criterion_main!(benches);
