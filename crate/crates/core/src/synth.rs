//! Synthetic UWB impulse-radar scenes.
//!
//! Each trace holds a static wall echo, a target echo whose delay breathes
//! sinusoidally, and white Gaussian noise. Echoes are evaluated from the
//! continuous pulse at every sample instant, so sub-sample delay changes
//! survive sampling.

use std::f64::consts::PI;

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::pipeline::{RadarFrame, SPEED_OF_LIGHT};

// Roots of u·e^(1-u) = 0.1, u = (f/f_peak)²: where the monocycle's power
// spectrum falls 10 dB below its peak.
const MINUS_10DB_LOW: f64 = 0.038_221_241_746_799_44;
const MINUS_10DB_HIGH: f64 = 4.889_720_169_867_429;

/// Gaussian first-derivative pulse scaled to unit peak magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monocycle {
    sigma: f64,
}

impl Monocycle {
    /// Picks σ so the pulse's −10 dB band best matches
    /// `[center - bw/2, center + bw/2]` in the least-squares sense.
    pub fn new(center_hz: f64, bandwidth_hz: f64) -> Result<Monocycle> {
        if !(bandwidth_hz.is_finite() && bandwidth_hz > 0.0) {
            return Err(Error::Parameter(format!("pulse bandwidth must be positive, got {bandwidth_hz}")));
        }
        let lo = center_hz - bandwidth_hz / 2.0;
        let hi = center_hz + bandwidth_hz / 2.0;
        if !(center_hz.is_finite() && lo > 0.0) {
            return Err(Error::Parameter(format!(
                "pulse band [{lo}, {hi}] Hz must lie above zero"
            )));
        }
        let (a, b) = (MINUS_10DB_LOW.sqrt(), MINUS_10DB_HIGH.sqrt());
        let peak_hz = (a * lo + b * hi) / (a * a + b * b);
        Ok(Monocycle {
            sigma: 1.0 / (2.0 * PI * peak_hz),
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Frequency of the spectral peak, `1/(2πσ)`.
    pub fn peak_hz(&self) -> f64 {
        1.0 / (2.0 * PI * self.sigma)
    }

    /// Lower and upper −10 dB frequencies.
    pub fn band_10db(&self) -> (f64, f64) {
        let f = self.peak_hz();
        (f * MINUS_10DB_LOW.sqrt(), f * MINUS_10DB_HIGH.sqrt())
    }

    /// `p(t) = -(t/σ)·√e·exp(-t²/2σ²)`, which peaks at ±1 for `t = ∓σ`.
    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        let x = t / self.sigma;
        -x * (0.5 - 0.5 * x * x).exp()
    }
}

/// One-shot evaluation of the monocycle at time `t` (seconds).
pub fn monocycle_pulse(t: f64, center_hz: f64, bandwidth_hz: f64) -> Result<f64> {
    Ok(Monocycle::new(center_hz, bandwidth_hz)?.eval(t))
}

/// Everything that defines a synthetic frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneConfig {
    pub m_samples: usize,
    pub n_traces: usize,
    pub fast_rate: f64,
    pub prf: f64,
    pub target_range_m: f64,
    pub resp_freq_hz: f64,
    /// Peak chest displacement, m.
    pub resp_displacement_m: f64,
    pub wall_range_m: f64,
    pub wall_amplitude: f64,
    /// Target echo amplitude after passing the wall.
    pub target_attenuation: f64,
    pub noise_sigma: f64,
    pub pulse_center_hz: f64,
    pub pulse_bandwidth_hz: f64,
    pub seed: u64,
}

impl Default for SceneConfig {
    fn default() -> SceneConfig {
        SceneConfig {
            m_samples: 1024,
            n_traces: 600,
            fast_rate: 39e9,
            // 600 traces over the 8.74 s recording time
            prf: 68.6,
            target_range_m: 1.5,
            resp_freq_hz: 0.3,
            resp_displacement_m: 0.01,
            wall_range_m: 0.8,
            wall_amplitude: 10.0,
            target_attenuation: 0.3,
            noise_sigma: 0.1,
            pulse_center_hz: 3.75e9,
            pulse_bandwidth_hz: 4.5e9,
            seed: 0,
        }
    }
}

impl SceneConfig {
    pub fn with_seed(seed: u64) -> SceneConfig {
        SceneConfig {
            seed,
            ..SceneConfig::default()
        }
    }

    /// Length of a trace in seconds.
    pub fn fast_window_s(&self) -> f64 {
        self.m_samples as f64 / self.fast_rate
    }

    pub fn wall_delay_s(&self) -> f64 {
        2.0 * self.wall_range_m / SPEED_OF_LIGHT
    }

    /// Round-trip target delay at slow time `t` seconds.
    pub fn target_delay_s(&self, t: f64) -> f64 {
        let range = self.target_range_m + self.resp_displacement_m * (2.0 * PI * self.resp_freq_hz * t).sin();
        2.0 * range / SPEED_OF_LIGHT
    }

    /// Peak deviation of the target delay from its rest value.
    pub fn delay_modulation_peak_s(&self) -> f64 {
        2.0 * self.resp_displacement_m / SPEED_OF_LIGHT
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("fast_rate", self.fast_rate),
            ("prf", self.prf),
            ("target_range_m", self.target_range_m),
            ("resp_freq_hz", self.resp_freq_hz),
            ("wall_range_m", self.wall_range_m),
            ("pulse_center_hz", self.pulse_center_hz),
            ("pulse_bandwidth_hz", self.pulse_bandwidth_hz),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        let non_negative = [
            ("resp_displacement_m", self.resp_displacement_m),
            ("wall_amplitude", self.wall_amplitude),
            ("target_attenuation", self.target_attenuation),
            ("noise_sigma", self.noise_sigma),
        ];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("{name} must be non-negative, got {v}")));
            }
        }
        if self.m_samples < 2 || self.n_traces < 2 {
            return Err(Error::Config(format!(
                "need at least 2 samples and 2 traces, got {}x{}",
                self.m_samples, self.n_traces
            )));
        }
        if self.resp_freq_hz >= self.prf / 2.0 {
            return Err(Error::Config(format!(
                "respiration {} Hz is not below the slow-time Nyquist {} Hz",
                self.resp_freq_hz,
                self.prf / 2.0
            )));
        }
        if self.resp_displacement_m >= self.target_range_m {
            return Err(Error::Config("displacement exceeds target range".into()));
        }
        let window = self.fast_window_s();
        let nearest = 2.0 * (self.target_range_m - self.resp_displacement_m) / SPEED_OF_LIGHT;
        let farthest = 2.0 * (self.target_range_m + self.resp_displacement_m) / SPEED_OF_LIGHT;
        for (name, lo, hi) in [("target", nearest, farthest), ("wall", self.wall_delay_s(), self.wall_delay_s())] {
            if lo < 0.0 || hi >= window {
                return Err(Error::Config(format!(
                    "{name} delay {hi:.3e} s falls outside the {window:.3e} s fast-time window"
                )));
            }
        }
        Monocycle::new(self.pulse_center_hz, self.pulse_bandwidth_hz)?;
        Ok(())
    }
}

/// Where the target really is.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundTruth {
    /// Fast-time bin of the target's rest position.
    pub target_bin: usize,
    pub resp_freq_hz: f64,
    pub wall_bin: usize,
}

/// Renders a frame for `config`.
pub fn generate_scene(config: &SceneConfig) -> Result<(RadarFrame, GroundTruth)> {
    config.validate()?;
    let pulse = Monocycle::new(config.pulse_center_hz, config.pulse_bandwidth_hz)?;
    let (m, n) = (config.m_samples, config.n_traces);
    let noise = Normal::new(0.0, config.noise_sigma).map_err(|e| Error::Config(e.to_string()))?;
    let wall_delay = config.wall_delay_s();
    let target_amp = config.target_attenuation;

    let mut data = Array2::zeros((m, n));
    for (trace, mut col) in data.columns_mut().into_iter().enumerate() {
        let slow_t = trace as f64 / config.prf;
        let target_delay = config.target_delay_s(slow_t);
        // one noise substream per trace
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(trace as u64);
        for (sample, x) in col.iter_mut().enumerate() {
            let t = sample as f64 / config.fast_rate;
            let mut v = config.wall_amplitude * pulse.eval(t - wall_delay) + target_amp * pulse.eval(t - target_delay);
            if config.noise_sigma > 0.0 {
                v += noise.sample(&mut rng);
            }
            *x = v;
        }
    }

    let bin = |delay: f64| (delay * config.fast_rate).round() as usize;
    let truth = GroundTruth {
        target_bin: bin(config.target_delay_s(0.0)),
        resp_freq_hz: config.resp_freq_hz,
        wall_bin: bin(wall_delay),
    };
    Ok((RadarFrame::new(data, config.fast_rate, config.prf)?, truth))
}

/// Independent exponential(1) power map, the CFAR design noise model.
pub fn exponential_power_map(rows: usize, cols: usize, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Array2::from_shape_simple_fn((rows, cols), || rand_distr::Exp1.sample(&mut rng))
}
