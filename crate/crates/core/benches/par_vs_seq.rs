//! Parallel batch APIs against equivalent sequential per-point loops.
//!
//! With the default `parallel` feature the batch functions fan out over
//! rayon; `--no-default-features` makes them sequential, so this suite also
//! measures the fallback against itself.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use mw_hilbert::characterize::{characterize_unit, coupling_sweep};
use mw_hilbert::hilbert::{hilbert_pv_many, hilbert_pv_quadrature, AnalyticPulse};
use mw_hilbert::model::{unit_transfer, CouplerResonatorParams};
use mw_hilbert::{ComplexResponse, FrequencyGrid};

const F0: f64 = 10e9;

fn unit(c: f64) -> CouplerResonatorParams {
    CouplerResonatorParams::with_defaults(c, F0).unwrap()
}

fn transfer_seq(params: &CouplerResonatorParams, grid: &FrequencyGrid) -> ComplexResponse {
    let values = grid.iter().map(|f| params.response_at(f).unwrap()).collect();
    ComplexResponse::new(grid.clone(), values).unwrap()
}

fn bench_unit_transfer(c: &mut Criterion) {
    let params = unit(0.71);
    let mut group = c.benchmark_group("unit_transfer");
    for points in [4_001usize, 65_537] {
        let grid = FrequencyGrid::spanning_snapped(8e9, 12e9, points, F0).unwrap();
        let expected = transfer_seq(&params, &grid);
        assert_eq!(expected.values(), unit_transfer(&params, &grid).unwrap().values());

        group.bench_with_input(BenchmarkId::new("seq", points), &grid, |b, grid| {
            b.iter(|| transfer_seq(black_box(&params), black_box(grid)))
        });
        group.bench_with_input(BenchmarkId::new("batch", points), &grid, |b, grid| {
            b.iter(|| unit_transfer(black_box(&params), black_box(grid)).unwrap())
        });
    }
    group.finish();
}

fn bench_coupling_sweep(c: &mut Criterion) {
    let base = unit(0.5);
    let couplings: Vec<f64> = (0..6).map(|k| 0.2 + 0.6 * k as f64 / 5.0).collect();

    let seq: Vec<_> = couplings
        .iter()
        .map(|&cv| characterize_unit(&base.with_coupling(cv).unwrap(), 0.35).unwrap())
        .collect();
    let batch = coupling_sweep(&couplings, &base, 0.35).unwrap();
    assert_eq!(seq, batch);

    let mut group = c.benchmark_group("coupling_sweep");
    group.sample_size(10);
    group.bench_function("seq", |b| {
        b.iter(|| {
            couplings
                .iter()
                .map(|&cv| characterize_unit(&base.with_coupling(cv).unwrap(), 0.35).unwrap())
                .collect::<Vec<_>>()
        })
    });
    group.bench_function("batch", |b| {
        b.iter(|| coupling_sweep(black_box(&couplings), black_box(&base), 0.35).unwrap())
    });
    group.finish();
}

fn bench_pv_quadrature(c: &mut Criterion) {
    // Symmetric points staying clear of the tri kinks at 0 and +/-1, where
    // a window-straddled kink stalls the extrapolation by design.
    let points: Vec<f64> = (0..24)
        .flat_map(|k| {
            let t = 0.1 + 0.75 * k as f64 / 23.0;
            [t, -t]
        })
        .collect();
    let eps = 0.05;

    let seq: Vec<f64> = points
        .iter()
        .map(|&t| hilbert_pv_quadrature(&AnalyticPulse::Tri, t, eps).unwrap())
        .collect();
    assert_eq!(seq, hilbert_pv_many(&AnalyticPulse::Tri, &points, eps).unwrap());

    let mut group = c.benchmark_group("pv_quadrature");
    group.bench_function("seq", |b| {
        b.iter(|| {
            points
                .iter()
                .map(|&t| hilbert_pv_quadrature(&AnalyticPulse::Tri, black_box(t), eps).unwrap())
                .collect::<Vec<f64>>()
        })
    });
    group.bench_function("batch", |b| {
        b.iter(|| hilbert_pv_many(&AnalyticPulse::Tri, black_box(&points), eps).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_unit_transfer, bench_coupling_sweep, bench_pv_quadrature);
criterion_main!(benches);
