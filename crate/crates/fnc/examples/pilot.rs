// scratch measurements for tolerance pinning; not part of the deliverable
use std::time::Instant;

use fnc::anneal::AnnealSchedule;
use fnc::ifs::{chaos_game, deterministic_attractor, hamming_distance, hutchinson_step, inverse_search, DistanceMetric, IfsSystem};
use fnc::image::{BinaryImage, Viewport};
use fnc::series::{fit, logistic_orbit, ModelMode, Partition, TimeSeries};
use fnc::train::TrainConfig;

fn main() {
    // --- criterion 1: hertz fit on 1e4-point orbit, min_count 16
    let t0 = Instant::now();
    let orbit = logistic_orbit(0.234567, 10_000);
    let series = TimeSeries::scalar(orbit.clone()).unwrap();
    let mut sorted = orbit.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let partition = Partition::build(&sorted, 16).unwrap();
    println!("partition blocks: {}", partition.len());
    for iters in [0usize, 50, 200] {
        let cfg = TrainConfig::gradient(2e-5, 1e9, iters, 0);
        let t = Instant::now();
        let model = fit(&series, &partition, ModelMode::Linear, &cfg).unwrap();
        let mut sup: f64 = 0.0;
        for i in 0..1000 {
            let x = (i as f64 + 0.5) / 1000.0;
            let g = 4.0 * x * (1.0 - x);
            sup = sup.max((model.eval(x) - g).abs());
        }
        println!(
            "iters {iters}: sup err {sup:.5}, train err {:.6}, {:?}",
            model.training_error(&series).unwrap(),
            t.elapsed()
        );
    }
    println!("criterion 1 total {:?}", t0.elapsed());

    // --- criterion 5: chaos game vs deterministic at 256, 2e5 iterations
    let t0 = Instant::now();
    let sys = IfsSystem::sierpinski();
    let chaos1 = chaos_game(&sys, 200_000, 20, &Viewport::UNIT, 256, 256, 1).unwrap();
    let chaos2 = chaos_game(&sys, 200_000, 20, &Viewport::UNIT, 256, 256, 2).unwrap();
    for det_iters in [12usize, 16, 20, 30] {
        let det = deterministic_attractor(
            &sys,
            &BinaryImage::filled(256, 256).unwrap(),
            &Viewport::UNIT,
            det_iters,
        )
        .unwrap();
        println!(
            "det {det_iters}: vs chaos1 {:.5}, det ones {}, chaos ones {}",
            hamming_distance(&chaos1, &det).unwrap(),
            det.ones(),
            chaos1.ones()
        );
    }
    println!(
        "chaos1 vs chaos2 {:.5}; elapsed {:?}",
        hamming_distance(&chaos1, &chaos2).unwrap(),
        t0.elapsed()
    );

    // --- criterion 6: collage numbers
    let det = deterministic_attractor(&sys, &BinaryImage::filled(256, 256).unwrap(), &Viewport::UNIT, 20).unwrap();
    let stepped = hutchinson_step(&sys, &det, &Viewport::UNIT);
    let eps = hamming_distance(&stepped, &det).unwrap();
    let d_render = hamming_distance(&chaos1, &det).unwrap();
    println!("collage: eps {eps:.5}, bound {:.5}, d(render, L) {d_render:.5}", eps / 0.5);

    // --- criterion 7: cold-start search on 64x64 target, budget timing
    let t0 = Instant::now();
    let target = chaos_game(&sys, 120_000, 20, &Viewport::UNIT, 64, 64, 42).unwrap();
    let schedule = AnnealSchedule::new(1.0, 1.0007, 10_000, 1.0 / 64.0, 7).unwrap();
    let out = inverse_search(&target, 3, &schedule, None, DistanceMetric::Hamming, &Viewport::UNIT).unwrap();
    println!(
        "cold search: best delta {:.4}, accepted {}, elapsed {:?}",
        out.best_delta, out.accepted, t0.elapsed()
    );
    let warm = inverse_search(
        &target,
        3,
        &AnnealSchedule::new(50.0, 1.01, 50, 1.0 / 64.0, 3).unwrap(),
        Some(sys.maps()),
        DistanceMetric::Hamming,
        &Viewport::UNIT,
    )
    .unwrap();
    println!("warm search: best delta {:.4}", warm.best_delta);
}
