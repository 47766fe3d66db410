//! Pipeline behavior on synthetic scenes.

use vitalcfar::cfar::{Backend, CfarParams};
use vitalcfar::pipeline::{self, PipelineConfig};
use vitalcfar::synth::{self, SceneConfig};

fn noise_only(seed: u64) -> SceneConfig {
    SceneConfig {
        wall_amplitude: 0.0,
        target_attenuation: 0.0,
        ..SceneConfig::with_seed(seed)
    }
}

fn strict_pfa() -> PipelineConfig {
    PipelineConfig {
        cfar: CfarParams::new(4, 8, 1e-4).unwrap(),
        ..PipelineConfig::default()
    }
}

fn alarm_counts(trials: u64) -> Vec<usize> {
    let config = strict_pfa();
    (1..=trials)
        .map(|seed| {
            let (frame, _) = synth::generate_scene(&noise_only(seed)).unwrap();
            pipeline::detect(&frame, &config).unwrap().1.len()
        })
        .collect()
}

/// Stated target: at pfa 1e-4 a pure-noise frame is detection-free in at least
/// 90% of trials. With 1024x7 band cells the design mean is 0.72 alarms per
/// frame, so even ideal independent cells give P(no alarm) = exp(-0.72) ~ 49%;
/// per-row normalization spreads the noise floor further. Kept for reference.
#[test]
#[ignore = "unattainable: exp(-n_cells*pfa) ~ 0.49 bounds the zero-alarm fraction"]
fn pure_noise_frames_mostly_detection_free() {
    let counts = alarm_counts(50);
    let clean = counts.iter().filter(|&&c| c == 0).count();
    assert!(clean >= 45, "{clean}/50 frames without detections, counts {counts:?}");
}

#[test]
fn pure_noise_false_alarms_stay_rare() {
    let counts = alarm_counts(20);
    let cells = 1024.0 * 7.0 * counts.len() as f64;
    let rate = counts.iter().sum::<usize>() as f64 / cells;
    // within an order of magnitude of the design rate
    assert!(rate < 1e-3, "per-cell alarm rate {rate:.2e}, counts {counts:?}");
    assert!(counts.iter().all(|&c| c < 30), "{counts:?}");
}

#[test]
fn zero_frame_has_no_detections() {
    let cfg = SceneConfig {
        wall_amplitude: 0.0,
        target_attenuation: 0.0,
        noise_sigma: 0.0,
        ..SceneConfig::default()
    };
    let (frame, _) = synth::generate_scene(&cfg).unwrap();
    let (band, result) = pipeline::detect(&frame, &PipelineConfig::default()).unwrap();
    assert!(result.is_empty());
    assert!(band.power.iter().all(|&v| v == 0.0));
}

#[test]
fn backends_agree_across_scene_corpus() {
    let mut rng_state = 0x5eedu64;
    let mut next = || {
        rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (rng_state >> 33) as f64 / (1u64 << 31) as f64
    };
    for seed in 0..16u64 {
        let scene = SceneConfig {
            n_traces: 300 + (next() * 400.0) as usize,
            target_range_m: 2.0 + next() * 1.5,
            resp_freq_hz: 0.3 + next() * 0.45,
            resp_displacement_m: 0.002 + next() * 0.01,
            noise_sigma: 0.005 + next() * 0.05,
            ..SceneConfig::with_seed(seed)
        };
        let (frame, _) = synth::generate_scene(&scene).unwrap();
        let (g, b) = [(4, 8), (2, 4), (8, 12), (1, 3)][seed as usize % 4];
        let config = PipelineConfig {
            cfar: CfarParams::new(g, b, 10f64.powf(-2.0 - 3.0 * next())).unwrap(),
            ..PipelineConfig::default()
        };
        let band = pipeline::slow_time_stage(&pipeline::fast_time_stage(&frame), &config).unwrap();
        let naive = pipeline::threshold_stage(&band, &config, Backend::Naive).unwrap();
        let ii = pipeline::threshold_stage(&band, &config, Backend::IntegralImage).unwrap();
        let cells = |r: &vitalcfar::cfar::DetectionResult| r.detections.iter().map(|d| (d.row, d.col)).collect::<Vec<_>>();
        assert_eq!(cells(&naive), cells(&ii), "scene seed {seed}");
    }
}

#[test]
fn breathing_rate_tracks_scene() {
    for (seed, rate) in [(21u64, 0.45), (22, 0.6), (23, 0.75)] {
        let scene = SceneConfig {
            resp_freq_hz: rate,
            ..SceneConfig::with_seed(seed)
        };
        let (frame, truth) = synth::generate_scene(&scene).unwrap();
        let (band, result) = pipeline::detect(&frame, &PipelineConfig::default()).unwrap();
        assert!(
            result.detections.iter().any(|d| {
                (band.freq_axis[d.col] - rate).abs() <= band.bin_width_hz && d.row.abs_diff(truth.target_bin) <= 3
            }),
            "rate {rate}: {:?}",
            &result.detections[..result.len().min(5)]
        );
    }
}
