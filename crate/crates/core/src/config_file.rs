//! `key = value` run configuration files.
//!
//! One setting per line, `#` starts a comment, blank lines are ignored.
//! Keys not listed below are rejected, and every error names its line.
//!
//! ```text
//! # scene
//! seed = 7
//! target_range_m = 1.5
//! # pipeline
//! guard_radius = 4
//! background_radius = 8
//! backend = ii
//! # benchmark
//! param_grid = 4:8, 4:12, 8:8, 8:12
//! ```

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::bench::BenchSpec;
use crate::cfar::Backend;
use crate::error::{Error, Result};
use crate::pipeline::PipelineConfig;
use crate::synth::SceneConfig;

/// Scene, pipeline and benchmark settings loaded from one file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub scene: SceneConfig,
    pub pipeline: PipelineConfig,
    pub bench: BenchSpec,
}

pub const KEYS: &[&str] = &[
    "m_samples",
    "n_traces",
    "fast_rate",
    "prf",
    "target_range_m",
    "resp_freq_hz",
    "resp_displacement_m",
    "wall_range_m",
    "wall_amplitude",
    "target_attenuation",
    "noise_sigma",
    "pulse_center_hz",
    "pulse_bandwidth_hz",
    "seed",
    "mean_filter_window",
    "fft_length",
    "band_low_hz",
    "band_high_hz",
    "guard_radius",
    "background_radius",
    "pfa",
    "border_policy",
    "tie_policy",
    "backend",
    "normalization_epsilon",
    "clutter_subtraction",
    "map_rows",
    "map_cols",
    "param_grid",
    "bench_pfa",
    "repetitions",
    "warmup",
];

fn parse<T: FromStr>(value: &str) -> std::result::Result<T, String> {
    value.parse().map_err(|_| format!("cannot parse {value:?}"))
}

fn positive(value: &str) -> std::result::Result<f64, String> {
    let v: f64 = parse(value)?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("expected a positive number, got {value}"))
    }
}

fn non_negative(value: &str) -> std::result::Result<f64, String> {
    let v: f64 = parse(value)?;
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("expected a non-negative number, got {value}"))
    }
}

fn count(value: &str, min: usize) -> std::result::Result<usize, String> {
    let v: usize = parse(value)?;
    if v >= min {
        Ok(v)
    } else {
        Err(format!("expected an integer >= {min}, got {value}"))
    }
}

fn probability(value: &str) -> std::result::Result<f64, String> {
    let v: f64 = parse(value)?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("expected a probability in (0, 1), got {value}"))
    }
}

fn parse_bool(value: &str) -> std::result::Result<bool, String> {
    match value {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(format!("expected true or false, got {value}")),
    }
}

pub fn parse_backend(value: &str) -> std::result::Result<Backend, String> {
    match value {
        "naive" => Ok(Backend::Naive),
        "ii" | "integral" => Ok(Backend::IntegralImage),
        _ => Err(format!("backend must be naive or ii, got {value}")),
    }
}

fn parse_grid(value: &str) -> std::result::Result<Vec<(usize, usize)>, String> {
    let grid = value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|pair| {
            let (g, b) = pair
                .split_once(':')
                .ok_or_else(|| format!("grid entry {pair:?} is not guard:background"))?;
            Ok((count(g.trim(), 0)?, count(b.trim(), 1)?))
        })
        .collect::<std::result::Result<Vec<_>, String>>()?;
    if grid.is_empty() {
        return Err("parameter grid is empty".into());
    }
    Ok(grid)
}

impl RunConfig {
    fn apply(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let scene = &mut self.scene;
        let pipe = &mut self.pipeline;
        let bench = &mut self.bench;
        match key {
            "m_samples" => scene.m_samples = count(value, 2)?,
            "n_traces" => scene.n_traces = count(value, 2)?,
            "fast_rate" => scene.fast_rate = positive(value)?,
            "prf" => scene.prf = positive(value)?,
            "target_range_m" => scene.target_range_m = positive(value)?,
            "resp_freq_hz" => scene.resp_freq_hz = positive(value)?,
            "resp_displacement_m" => scene.resp_displacement_m = non_negative(value)?,
            "wall_range_m" => scene.wall_range_m = positive(value)?,
            "wall_amplitude" => scene.wall_amplitude = non_negative(value)?,
            "target_attenuation" => scene.target_attenuation = non_negative(value)?,
            "noise_sigma" => scene.noise_sigma = non_negative(value)?,
            "pulse_center_hz" => scene.pulse_center_hz = positive(value)?,
            "pulse_bandwidth_hz" => scene.pulse_bandwidth_hz = positive(value)?,
            "seed" => scene.seed = parse(value)?,
            "mean_filter_window" => {
                let w = count(value, 1)?;
                if w % 2 == 0 {
                    return Err(format!("mean filter window must be odd, got {w}"));
                }
                pipe.mean_filter_window = w;
            }
            "fft_length" => {
                pipe.fft_length = if value == "auto" { None } else { Some(count(value, 1)?) };
            }
            "band_low_hz" => pipe.band_low_hz = non_negative(value)?,
            "band_high_hz" => pipe.band_high_hz = positive(value)?,
            "guard_radius" => pipe.cfar.guard_radius = count(value, 0)?,
            "background_radius" => pipe.cfar.background_radius = count(value, 1)?,
            "pfa" => pipe.cfar.pfa = probability(value)?,
            "border_policy" => {
                if value != "clamp" {
                    return Err(format!("only the clamp border policy is supported, got {value}"));
                }
            }
            "tie_policy" => {
                if value != "tie_is_absent" {
                    return Err(format!("only the tie_is_absent tie policy is supported, got {value}"));
                }
            }
            "backend" => pipe.backend = parse_backend(value)?,
            "normalization_epsilon" => pipe.normalization_epsilon = positive(value)?,
            "clutter_subtraction" => pipe.clutter_subtraction = parse_bool(value)?,
            "map_rows" => bench.map_rows = count(value, 1)?,
            "map_cols" => bench.map_cols = count(value, 1)?,
            "param_grid" => bench.param_grid = parse_grid(value)?,
            "bench_pfa" => bench.pfa = probability(value)?,
            "repetitions" => bench.repetitions = count(value, 3)?,
            "warmup" => bench.warmup = count(value, 0)?,
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    /// Parses a config, starting from defaults.
    pub fn parse_str(text: &str) -> Result<RunConfig> {
        let mut config = RunConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::ConfigLine {
                line,
                message: format!("expected key = value, got {content:?}"),
            })?;
            config
                .apply(key.trim(), value.trim())
                .map_err(|message| Error::ConfigLine { line, message })?;
        }
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<RunConfig> {
        RunConfig::parse_str(&std::fs::read_to_string(path)?)
    }

    /// Writes every key, in the order of [`KEYS`].
    pub fn to_text(&self) -> String {
        let s = &self.scene;
        let p = &self.pipeline;
        let b = &self.bench;
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("m_samples", s.m_samples.to_string());
        put("n_traces", s.n_traces.to_string());
        put("fast_rate", s.fast_rate.to_string());
        put("prf", s.prf.to_string());
        put("target_range_m", s.target_range_m.to_string());
        put("resp_freq_hz", s.resp_freq_hz.to_string());
        put("resp_displacement_m", s.resp_displacement_m.to_string());
        put("wall_range_m", s.wall_range_m.to_string());
        put("wall_amplitude", s.wall_amplitude.to_string());
        put("target_attenuation", s.target_attenuation.to_string());
        put("noise_sigma", s.noise_sigma.to_string());
        put("pulse_center_hz", s.pulse_center_hz.to_string());
        put("pulse_bandwidth_hz", s.pulse_bandwidth_hz.to_string());
        put("seed", s.seed.to_string());
        put("mean_filter_window", p.mean_filter_window.to_string());
        put("fft_length", p.fft_length.map_or("auto".into(), |n| n.to_string()));
        put("band_low_hz", p.band_low_hz.to_string());
        put("band_high_hz", p.band_high_hz.to_string());
        put("guard_radius", p.cfar.guard_radius.to_string());
        put("background_radius", p.cfar.background_radius.to_string());
        put("pfa", p.cfar.pfa.to_string());
        put("border_policy", "clamp".into());
        put("tie_policy", "tie_is_absent".into());
        put(
            "backend",
            match p.backend {
                Backend::Naive => "naive",
                Backend::IntegralImage => "ii",
            }
            .into(),
        );
        put("normalization_epsilon", p.normalization_epsilon.to_string());
        put("clutter_subtraction", p.clutter_subtraction.to_string());
        put("map_rows", b.map_rows.to_string());
        put("map_cols", b.map_cols.to_string());
        put(
            "param_grid",
            b.param_grid.iter().map(|(g, bg)| format!("{g}:{bg}")).collect::<Vec<_>>().join(", "),
        );
        put("bench_pfa", b.pfa.to_string());
        put("repetitions", b.repetitions.to_string());
        put("warmup", b.warmup.to_string());
        out
    }
}
