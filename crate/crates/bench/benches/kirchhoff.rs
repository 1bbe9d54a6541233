use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nanograting::diffraction::{kirchhoff_pattern, KirchhoffParams, PhaseEvaluation};
use nanograting::vdwfit::{fit_effective_slit, FitOptions};
use nanograting_bench::{fit_setup, preset_setup, target};

fn kirchhoff(c: &mut Criterion) {
    let mut group = c.benchmark_group("kirchhoff_pattern");
    group.sample_size(10);
    for name in ["sinx", "scroll"] {
        let setup = preset_setup(name);
        let params = setup.kirchhoff_params(220.0).unwrap();
        for (label, phase) in [
            ("recurrence", PhaseEvaluation::Recurrence),
            ("exact", PhaseEvaluation::Exact),
        ] {
            let p = KirchhoffParams { phase, ..params };
            group.bench_with_input(BenchmarkId::new(label, name), &p, |b, p| {
                b.iter(|| kirchhoff_pattern(&setup.grating, p, &setup.grid).unwrap())
            });
        }
    }
    group.finish();
}

fn detector_trace(c: &mut Criterion) {
    let setup = preset_setup("sinx");
    let mut group = c.benchmark_group("detector_trace");
    group.sample_size(10);
    group.bench_function("sinx", |b| b.iter(|| setup.detector_trace().unwrap()));
    group.finish();
}

fn fit(c: &mut Criterion) {
    let setup = fit_setup("biphenyl");
    let measured = target(&setup, 28e-9);
    let options = FitOptions::default();
    let mut group = c.benchmark_group("fit_effective_slit");
    group.sample_size(10);
    group.bench_function("biphenyl", |b| {
        b.iter(|| fit_effective_slit(&measured, &setup, &options).unwrap())
    });
    group.finish();
}

criterion_group!(benches, kirchhoff, detector_trace, fit);
criterion_main!(benches);
