use criterion::{criterion_group, criterion_main, Criterion};
use ringscore_bench::frame_pair;
use ringscore_core::imgproc::{bilateral_smooth, canny};
use ringscore_core::raster::to_gray;
use ringscore_core::{
    detect_arrow, detect_target, fit_ellipse, ArrowParams, DetectionParams, Ellipse,
};

fn stages(c: &mut Criterion) {
    let (spec, prev, curr) = frame_pair();
    let gray = to_gray(&prev);
    let params = DetectionParams::default();

    c.bench_function("bilateral 1280x960", |b| {
        b.iter(|| bilateral_smooth(&gray, 3.0, 25.0, 6).unwrap())
    });
    let smooth = bilateral_smooth(&gray, 3.0, 25.0, 6).unwrap();
    c.bench_function("canny 1280x960", |b| {
        b.iter(|| canny(&smooth, 50.0, 150.0).unwrap())
    });

    let e = Ellipse::new((640.0, 480.0), 300.0, 200.0, 0.4).unwrap();
    let (sn, cs) = e.theta.sin_cos();
    let pts: Vec<(f64, f64)> = (0..200)
        .map(|i| {
            let t = i as f64 * std::f64::consts::TAU / 200.0;
            let (u, v) = (e.a * t.cos(), e.b * t.sin());
            (e.cx + u * cs - v * sn, e.cy + u * sn + v * cs)
        })
        .collect();
    c.bench_function("fit_ellipse 200 points", |b| {
        b.iter(|| fit_ellipse(&pts).unwrap())
    });

    c.bench_function("detect_target", |b| {
        b.iter(|| detect_target(&prev, spec.center, &params).unwrap())
    });
    let model = detect_target(&prev, spec.center, &params).unwrap();
    let arrow = ArrowParams::default();
    c.bench_function("detect_arrow", |b| {
        b.iter(|| detect_arrow(&prev, &curr, &model, &arrow).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = stages
}
criterion_main!(benches);
