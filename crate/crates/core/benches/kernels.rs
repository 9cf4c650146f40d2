use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use weinstein_core::grid::{BaseGrid, ScaleGrid};
use weinstein_core::localization::{Assembler, SymbolKind};
use weinstein_core::par;
use weinstein_core::samples::random_mixture;
use weinstein_core::transform::TransformPlan;
use weinstein_core::translation::Translator;
use weinstein_core::wavelet::{Window, WaveletBank, WaveletPair, DEFAULT_SWITCH_FACTOR};

const MODES: [(&str, bool); 2] = [("parallel", false), ("sequential", true)];

fn transform_and_translation(c: &mut Criterion) {
    let g = BaseGrid::new(0.5, 1, 12.0, 65, 12.0, 64).unwrap();
    let plan = TransformPlan::new(&g);
    let tr = Translator::with_default_rule(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let f = random_mixture(&g, &mut rng);
    let h = random_mixture(&g, &mut rng);
    let mut group = c.benchmark_group("default_grid");
    group.sample_size(10).measurement_time(Duration::from_secs(10));
    for (name, seq) in MODES {
        par::set_sequential(seq);
        group.bench_function(BenchmarkId::new("forward_transform", name), |b| {
            b.iter(|| plan.forward(black_box(&f)).unwrap())
        });
        group.bench_function(BenchmarkId::new("translate", name), |b| {
            b.iter(|| tr.translate(black_box(&[0.7, 1.3]), &f).unwrap())
        });
        group.bench_function(BenchmarkId::new("convolve", name), |b| {
            b.iter(|| tr.convolve(black_box(&f), &h).unwrap())
        });
    }
    par::set_sequential(false);
    group.finish();
}

fn wavelet_and_localization(c: &mut Criterion) {
    let g = BaseGrid::new(0.5, 1, 6.0, 25, 6.0, 24).unwrap();
    let plan = TransformPlan::new(&g);
    let scales = ScaleGrid::new(&g, 1.0 / 16.0, 16.0, 48).unwrap();
    let pair = WaveletPair::new(&plan, &scales, Window::laguerre_gaussian(1), Window::laguerre_gaussian(2)).unwrap();
    let asm = Assembler::new(&plan, &scales, pair, DEFAULT_SWITCH_FACTOR).unwrap();
    let bank = WaveletBank::new(&plan, &scales, &Window::laguerre_gaussian(1), DEFAULT_SWITCH_FACTOR).unwrap();
    let symbol = SymbolKind::GaussianBump.build(&scales).unwrap();
    let f = random_mixture(&g, &mut ChaCha8Rng::seed_from_u64(7));
    let mut group = c.benchmark_group("operator_grid");
    group.sample_size(10).measurement_time(Duration::from_secs(15));
    for (name, seq) in MODES {
        par::set_sequential(seq);
        group.bench_function(BenchmarkId::new("cwt_analyze", name), |b| {
            b.iter(|| bank.analyze(black_box(&f)).unwrap())
        });
        group.bench_function(BenchmarkId::new("assemble", name), |b| {
            b.iter(|| asm.assemble(black_box(&symbol)).unwrap())
        });
    }
    par::set_sequential(false);
    group.finish();
}

criterion_group!(benches, transform_and_translation, wavelet_and_localization);
criterion_main!(benches);
