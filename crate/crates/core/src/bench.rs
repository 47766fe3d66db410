//! Timing harness for the two CFAR backends and for the pipeline stages.
//!
//! Every timed configuration runs `warmup` untimed iterations first, then
//! `repetitions` timed ones on a monotonic clock. Integral-image timings
//! include building the summed-area table. A row is only reported after the
//! two backends' masks have been checked against each other on that input.

use std::hint::black_box;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::cfar::{self, Backend, CfarParams, DetectionResult, Execution};
use crate::error::{Error, Result};
use crate::pipeline::{self, PipelineConfig, RadarFrame};
use crate::synth;

pub const STEP_FAST_TIME: &str = "Signal Processing I, Fast Time";
pub const STEP_SLOW_TIME: &str = "Signal Processing II, Slow Time";
pub const STEP_THRESHOLD_NAIVE: &str = "Signal Threshold (CA-CFAR)";
pub const STEP_THRESHOLD_II: &str = "Signal Threshold (II CA-CFAR)";
pub const STEP_TOTAL: &str = "Total";

/// Rows whose std/mean exceeds this are flagged.
pub const NOISY_CV: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSpec {
    pub map_rows: usize,
    pub map_cols: usize,
    /// `(guard_radius, background_radius)` pairs.
    pub param_grid: Vec<(usize, usize)>,
    pub pfa: f64,
    pub repetitions: usize,
    pub warmup: usize,
    pub execution: Execution,
}

impl Default for BenchSpec {
    fn default() -> BenchSpec {
        BenchSpec {
            map_rows: 1024,
            map_cols: 600,
            param_grid: vec![(4, 8), (4, 12), (8, 8), (8, 12)],
            pfa: 1e-3,
            repetitions: 10,
            warmup: 2,
            execution: Execution::Sequential,
        }
    }
}

impl BenchSpec {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions < 3 {
            return Err(Error::Config(format!(
                "benchmark needs at least 3 repetitions, got {}",
                self.repetitions
            )));
        }
        if self.param_grid.is_empty() {
            return Err(Error::Config("benchmark parameter grid is empty".into()));
        }
        if self.map_rows == 0 || self.map_cols == 0 {
            return Err(Error::Config("benchmark map must be non-empty".into()));
        }
        for &(g, b) in &self.param_grid {
            CfarParams::new(g, b, self.pfa)?;
        }
        Ok(())
    }
}

/// Summary of repeated wall-clock measurements, seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingStats {
    pub mean_s: f64,
    /// Sample standard deviation.
    pub std_s: f64,
    pub median_s: f64,
    pub runs: usize,
}

impl TimingStats {
    pub fn from_durations(samples: &[Duration]) -> TimingStats {
        let secs: Vec<f64> = samples.iter().map(Duration::as_secs_f64).collect();
        TimingStats::from_secs(&secs)
    }

    pub fn from_secs(secs: &[f64]) -> TimingStats {
        let n = secs.len();
        assert!(n > 0, "no timing samples");
        let mean = secs.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            secs.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        let mut sorted = secs.to_vec();
        sorted.sort_by(f64::total_cmp);
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        };
        TimingStats {
            mean_s: mean,
            std_s: var.sqrt(),
            median_s: median,
            runs: n,
        }
    }

    pub fn cv(&self) -> f64 {
        if self.mean_s > 0.0 {
            self.std_s / self.mean_s
        } else {
            0.0
        }
    }

    pub fn is_noisy(&self) -> bool {
        self.cv() > NOISY_CV
    }
}

/// Runs `f` `warmup` times untimed, then `reps` times timed; returns the
/// stats and the last output.
pub fn time_runs<T>(warmup: usize, reps: usize, mut f: impl FnMut() -> Result<T>) -> Result<(TimingStats, T)> {
    for _ in 0..warmup {
        black_box(f()?);
    }
    let mut samples = Vec::with_capacity(reps);
    let mut last = None;
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        let out = black_box(f()?);
        samples.push(start.elapsed());
        last = Some(out);
    }
    Ok((TimingStats::from_durations(&samples), last.expect("at least one run")))
}

/// One line of the backend comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct CfarRow {
    pub guard: usize,
    pub background: usize,
    pub naive: TimingStats,
    pub integral: TimingStats,
}

impl CfarRow {
    /// Naive mean over integral-image mean.
    pub fn ratio(&self) -> f64 {
        self.naive.mean_s / self.integral.mean_s
    }

    pub fn train_cells(&self) -> usize {
        let outer = 2 * (self.guard + self.background) + 1;
        let guard = 2 * self.guard + 1;
        outer * outer - guard * guard
    }

    pub fn record(&self) -> CfarRecord {
        CfarRecord {
            guard: self.guard,
            background: self.background,
            naive_mean_s: self.naive.mean_s,
            naive_std_s: self.naive.std_s,
            ii_mean_s: self.integral.mean_s,
            ii_std_s: self.integral.std_s,
            ratio: self.ratio(),
        }
    }
}

/// Flat machine-readable form of a [`CfarRow`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CfarRecord {
    pub guard: usize,
    pub background: usize,
    pub naive_mean_s: f64,
    pub naive_std_s: f64,
    pub ii_mean_s: f64,
    pub ii_std_s: f64,
    pub ratio: f64,
}

/// One line of the per-stage table. Stages shared by both backends carry
/// the same stats in both columns.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRow {
    pub step: String,
    pub naive: Option<TimingStats>,
    pub integral: Option<TimingStats>,
}

impl StepRow {
    pub fn record(&self) -> StepRecord {
        StepRecord {
            step: self.step.clone(),
            naive_mean_s: self.naive.map(|s| s.mean_s),
            naive_std_s: self.naive.map(|s| s.std_s),
            ii_mean_s: self.integral.map(|s| s.mean_s),
            ii_std_s: self.integral.map(|s| s.std_s),
        }
    }

    pub fn is_noisy(&self) -> bool {
        self.naive.is_some_and(|s| s.is_noisy()) || self.integral.is_some_and(|s| s.is_noisy())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: String,
    pub naive_mean_s: Option<f64>,
    pub naive_std_s: Option<f64>,
    pub ii_mean_s: Option<f64>,
    pub ii_std_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchReport {
    pub cfar_rows: Vec<CfarRow>,
    pub steps: Vec<StepRow>,
    pub environment: String,
    pub execution: Execution,
}

fn gate(map: ndarray::ArrayView2<'_, f64>, naive: &DetectionResult, integral: &DetectionResult) -> Result<()> {
    cfar::check_equivalent(map, naive, integral)
}

/// Times both backends over the grid on one seeded exponential map.
pub fn bench_cfar(spec: &BenchSpec, seed: u64) -> Result<Vec<CfarRow>> {
    spec.validate()?;
    let map = synth::exponential_power_map(spec.map_rows, spec.map_cols, seed);
    let mut rows = Vec::with_capacity(spec.param_grid.len());
    for &(g, b) in &spec.param_grid {
        let params = CfarParams::new(g, b, spec.pfa)?;
        let (naive_t, naive) = time_runs(spec.warmup, spec.repetitions, || {
            cfar::cfar2d(map.view(), &params, Backend::Naive, spec.execution)
        })?;
        let (ii_t, integral) = time_runs(spec.warmup, spec.repetitions, || {
            cfar::cfar2d(map.view(), &params, Backend::IntegralImage, spec.execution)
        })?;
        gate(map.view(), &naive, &integral)?;
        rows.push(CfarRow {
            guard: g,
            background: b,
            naive: naive_t,
            integral: ii_t,
        });
    }
    Ok(rows)
}

/// Times each stage group of [`pipeline::detect`] on `frame`.
///
/// Totals are the sums of the stage means (and of the stage standard
/// deviations), one per backend.
pub fn bench_pipeline(frame: &RadarFrame, config: &PipelineConfig, repetitions: usize, warmup: usize) -> Result<Vec<StepRow>> {
    if repetitions < 3 {
        return Err(Error::Config(format!(
            "benchmark needs at least 3 repetitions, got {repetitions}"
        )));
    }
    let (fast_t, fast) = time_runs(warmup, repetitions, || Ok(pipeline::fast_time_stage(frame)))?;
    let (slow_t, band) = time_runs(warmup, repetitions, || pipeline::slow_time_stage(&fast, config))?;
    let (naive_t, naive) = time_runs(warmup, repetitions, || {
        pipeline::threshold_stage(&band, config, Backend::Naive)
    })?;
    let (ii_t, integral) = time_runs(warmup, repetitions, || {
        pipeline::threshold_stage(&band, config, Backend::IntegralImage)
    })?;
    gate(band.power.view(), &naive, &integral)?;

    let total = |thr: TimingStats| TimingStats {
        mean_s: fast_t.mean_s + slow_t.mean_s + thr.mean_s,
        std_s: fast_t.std_s + slow_t.std_s + thr.std_s,
        median_s: fast_t.median_s + slow_t.median_s + thr.median_s,
        runs: repetitions,
    };
    Ok(vec![
        StepRow {
            step: STEP_FAST_TIME.into(),
            naive: Some(fast_t),
            integral: Some(fast_t),
        },
        StepRow {
            step: STEP_SLOW_TIME.into(),
            naive: Some(slow_t),
            integral: Some(slow_t),
        },
        StepRow {
            step: STEP_THRESHOLD_NAIVE.into(),
            naive: Some(naive_t),
            integral: None,
        },
        StepRow {
            step: STEP_THRESHOLD_II.into(),
            naive: None,
            integral: Some(ii_t),
        },
        StepRow {
            step: STEP_TOTAL.into(),
            naive: Some(total(naive_t)),
            integral: Some(total(ii_t)),
        },
    ])
}

/// Best-effort description of the host.
pub fn environment_note() -> String {
    let cpu = std::fs::read_to_string("/proc/cpuinfo")
        .ok()
        .and_then(|s| {
            s.lines()
                .find(|l| l.starts_with("model name"))
                .and_then(|l| l.split(':').nth(1))
                .map(|m| m.trim().to_string())
        })
        .unwrap_or_else(|| "unknown cpu".into());
    let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    format!(
        "{cpu}; {threads} hardware threads; {}-{}",
        std::env::consts::OS,
        std::env::consts::ARCH
    )
}

fn fmt_stats(s: Option<TimingStats>) -> String {
    match s {
        Some(s) => format!("{:.4}±{:.4}", s.mean_s, s.std_s),
        None => "-".into(),
    }
}

impl BenchReport {
    /// Aligned plain-text tables.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mode = match self.execution {
            Execution::Sequential => "sequential",
            Execution::Parallel => "parallel",
        };
        if !self.cfar_rows.is_empty() {
            out.push_str(&format!("CFAR computation time ({mode})\n"));
            out.push_str(&format!(
                "{:>5} {:>10} {:>22} {:>10} {:>22} {:>10} {:>8}\n",
                "guard", "background", "CA-CFAR mean±std (s)", "median", "II CA-CFAR mean±std (s)", "median", "ratio"
            ));
            for r in &self.cfar_rows {
                let flag = if r.naive.is_noisy() || r.integral.is_noisy() { "  noisy" } else { "" };
                out.push_str(&format!(
                    "{:>5} {:>10} {:>22} {:>10.4} {:>22} {:>10.4} {:>6.1}:1{flag}\n",
                    r.guard,
                    r.background,
                    fmt_stats(Some(r.naive)),
                    r.naive.median_s,
                    fmt_stats(Some(r.integral)),
                    r.integral.median_s,
                    r.ratio()
                ));
            }
            out.push_str("II CA-CFAR times include summed-area table construction.\n");
        }
        if !self.steps.is_empty() {
            if !out.is_empty() {
                out.push('\n');
            }
            out.push_str(&format!("Signal processing step time ({mode})\n"));
            out.push_str(&format!("{:<34} {:>20} {:>20}\n", "step", "CA-CFAR (s)", "II CA-CFAR (s)"));
            for s in &self.steps {
                let flag = if s.is_noisy() { "  noisy" } else { "" };
                out.push_str(&format!(
                    "{:<34} {:>20} {:>20}{flag}\n",
                    s.step,
                    fmt_stats(s.naive),
                    fmt_stats(s.integral)
                ));
            }
            out.push_str("Totals sum the stage means and standard deviations; signal recording is not timed.\n");
        }
        if !self.environment.is_empty() {
            out.push_str(&format!("environment: {}\n", self.environment));
        }
        out
    }

    pub fn cfar_records(&self) -> Vec<CfarRecord> {
        self.cfar_rows.iter().map(CfarRow::record).collect()
    }

    pub fn step_records(&self) -> Vec<StepRecord> {
        self.steps.iter().map(StepRow::record).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate_scene, SceneConfig};

    #[test]
    fn stats_known_values() {
        let s = TimingStats::from_secs(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean_s, 2.5);
        assert!((s.std_s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(s.median_s, 2.5);
        assert_eq!(TimingStats::from_secs(&[3.0, 1.0, 2.0]).median_s, 2.0);
        assert!(!s.is_noisy() || s.cv() > NOISY_CV);
    }

    #[test]
    fn spec_validation() {
        assert!(BenchSpec::default().validate().is_ok());
        let few = BenchSpec {
            repetitions: 2,
            ..BenchSpec::default()
        };
        assert!(matches!(few.validate(), Err(Error::Config(_))));
        let empty = BenchSpec {
            param_grid: vec![],
            ..BenchSpec::default()
        };
        assert!(empty.validate().is_err());
    }

    #[test]
    fn small_cfar_bench_has_one_row_per_grid_entry() {
        let spec = BenchSpec {
            map_rows: 64,
            map_cols: 48,
            param_grid: vec![(1, 2), (2, 3)],
            repetitions: 3,
            warmup: 0,
            ..BenchSpec::default()
        };
        let rows = bench_cfar(&spec, 1).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!((rows[1].guard, rows[1].background), (2, 3));
        assert!(rows.iter().all(|r| r.naive.runs == 3 && r.ratio() > 0.0));
        assert_eq!(rows[0].train_cells(), 7 * 7 - 3 * 3);
    }

    #[test]
    fn pipeline_bench_schema() {
        let (frame, _) = generate_scene(&SceneConfig {
            m_samples: 256,
            n_traces: 128,
            target_range_m: 0.9,
            wall_range_m: 0.5,
            ..SceneConfig::default()
        })
        .unwrap();
        let config = PipelineConfig {
            band_low_hz: 0.3,
            band_high_hz: 3.0,
            ..PipelineConfig::default()
        };
        let steps = bench_pipeline(&frame, &config, 3, 0).unwrap();
        let names: Vec<&str> = steps.iter().map(|s| s.step.as_str()).collect();
        assert_eq!(
            names,
            [STEP_FAST_TIME, STEP_SLOW_TIME, STEP_THRESHOLD_NAIVE, STEP_THRESHOLD_II, STEP_TOTAL]
        );
        let total = &steps[4];
        let sum = steps[0].naive.unwrap().mean_s + steps[1].naive.unwrap().mean_s + steps[2].naive.unwrap().mean_s;
        assert!((total.naive.unwrap().mean_s - sum).abs() < 1e-12);
        assert!(steps[2].integral.is_none() && steps[3].naive.is_none());
    }

    #[test]
    fn text_report_mentions_sat_construction() {
        let report = BenchReport {
            cfar_rows: vec![CfarRow {
                guard: 4,
                background: 8,
                naive: TimingStats::from_secs(&[0.2, 0.2, 0.2]),
                integral: TimingStats::from_secs(&[0.02, 0.02, 0.02]),
            }],
            environment: "test".into(),
            ..BenchReport::default()
        };
        let text = report.to_text();
        assert!(text.contains("summed-area table construction"));
        assert!(text.contains("10.0:1"));
    }
}
