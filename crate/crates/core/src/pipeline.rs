//! Frame-to-detections processing chain.
//!
//! A [`RadarFrame`] holds fast-time samples down the rows and slow-time
//! traces across the columns. [`detect`] runs, in order:
//!
//! 1. [`remove_dc`] and [`detrend_linear`] along fast time (each trace),
//! 2. [`mean_filter_slow`] and [`normalize_slow`] along slow time (each range bin),
//! 3. [`slow_time_spectrum`] and [`band_select`] to get the respiration-band
//!    range-frequency power map,
//! 4. 2D CA-CFAR on that map with the configured backend.

use std::sync::Arc;

use ndarray::{Array2, ArrayView2, Axis};
use rustfft::{num_complex::Complex, Fft, FftPlanner};

use crate::cfar::{self, Backend, CfarParams, DetectionResult, Execution};
use crate::error::{Error, Result};

/// Propagation speed used for range axes, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Raw or partially processed radar observation, `M × N`
/// (fast-time samples × slow-time traces).
#[derive(Debug, Clone, PartialEq)]
pub struct RadarFrame {
    data: Array2<f64>,
    fast_rate: f64,
    prf: f64,
}

impl RadarFrame {
    /// Validates shape, rates and finiteness.
    pub fn new(data: Array2<f64>, fast_rate: f64, prf: f64) -> Result<RadarFrame> {
        let (m, n) = data.dim();
        if m < 2 || n < 2 {
            return Err(Error::Dimension(format!(
                "frame needs at least 2 samples and 2 traces, got {m}x{n}"
            )));
        }
        if !(fast_rate.is_finite() && fast_rate > 0.0) || !(prf.is_finite() && prf > 0.0) {
            return Err(Error::Parameter(format!(
                "sampling rates must be positive, got fast_rate={fast_rate} prf={prf}"
            )));
        }
        if let Some(((i, j), v)) = data.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Input(format!("non-finite sample {v} at ({i}, {j})")));
        }
        Ok(RadarFrame { data, fast_rate, prf })
    }

    // stages keep the validated metadata
    fn with_data(&self, data: Array2<f64>) -> RadarFrame {
        RadarFrame {
            data,
            fast_rate: self.fast_rate,
            prf: self.prf,
        }
    }

    pub fn data(&self) -> ArrayView2<'_, f64> {
        self.data.view()
    }

    pub fn into_data(self) -> Array2<f64> {
        self.data
    }

    pub fn samples(&self) -> usize {
        self.data.nrows()
    }

    pub fn traces(&self) -> usize {
        self.data.ncols()
    }

    pub fn fast_rate(&self) -> f64 {
        self.fast_rate
    }

    pub fn prf(&self) -> f64 {
        self.prf
    }

    /// Target distance for each fast-time sample: `c·m / (2·fast_rate)`.
    pub fn range_axis(&self) -> Vec<f64> {
        range_axis(self.samples(), self.fast_rate)
    }
}

fn range_axis(samples: usize, fast_rate: f64) -> Vec<f64> {
    (0..samples)
        .map(|m| SPEED_OF_LIGHT * m as f64 / (2.0 * fast_rate))
        .collect()
}

/// Power over (range bin, slow-time frequency bin).
#[derive(Debug, Clone, PartialEq)]
pub struct RangeFrequencyMap {
    pub power: Array2<f64>,
    /// Centre frequency of every column, Hz, ascending.
    pub freq_axis: Vec<f64>,
    /// FFT bin index of every column.
    pub bins: Vec<usize>,
    /// Distance of every row, m.
    pub range_axis: Vec<f64>,
    pub bin_width_hz: f64,
    pub prf: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Odd moving-average length along slow time.
    pub mean_filter_window: usize,
    /// `None` picks the next power of two at or above the trace count.
    pub fft_length: Option<usize>,
    pub band_low_hz: f64,
    pub band_high_hz: f64,
    pub cfar: CfarParams,
    pub backend: Backend,
    pub normalization_epsilon: f64,
    /// Subtract each range bin's slow-time mean before smoothing.
    pub clutter_subtraction: bool,
    pub execution: Execution,
}

impl Default for PipelineConfig {
    fn default() -> PipelineConfig {
        PipelineConfig {
            mean_filter_window: 5,
            fft_length: None,
            band_low_hz: 0.3,
            band_high_hz: 0.8,
            cfar: CfarParams::default(),
            backend: Backend::IntegralImage,
            normalization_epsilon: 1e-12,
            clutter_subtraction: false,
            execution: Execution::Sequential,
        }
    }
}

impl PipelineConfig {
    pub fn fft_length_for(&self, traces: usize) -> usize {
        self.fft_length.unwrap_or_else(|| traces.next_power_of_two())
    }
}

/// Subtracts each trace's own mean.
pub fn remove_dc(frame: &RadarFrame) -> RadarFrame {
    let mut data = frame.data.clone();
    for mut col in data.axis_iter_mut(Axis(1)) {
        let mean = col.sum() / col.len() as f64;
        col.mapv_inplace(|v| v - mean);
    }
    frame.with_data(data)
}

/// Subtracts the least-squares line `a + b·m` from each trace.
pub fn detrend_linear(frame: &RadarFrame) -> RadarFrame {
    let mut data = frame.data.clone();
    let m = data.nrows();
    // centred abscissa makes the normal equations diagonal
    let mid = (m as f64 - 1.0) / 2.0;
    let u: Vec<f64> = (0..m).map(|i| i as f64 - mid).collect();
    let uu: f64 = u.iter().map(|x| x * x).sum();
    for mut col in data.axis_iter_mut(Axis(1)) {
        let a = col.sum() / m as f64;
        let b = col.iter().zip(&u).map(|(x, u)| x * u).sum::<f64>() / uu;
        col.iter_mut().zip(&u).for_each(|(x, u)| *x -= a + b * u);
    }
    frame.with_data(data)
}

/// Centred moving average along each range bin's slow-time row. Near the
/// edges the window shrinks symmetrically to what is available.
pub fn mean_filter_slow(frame: &RadarFrame, window: usize) -> Result<RadarFrame> {
    let n = frame.traces();
    if window % 2 == 0 || window == 0 || window > n {
        return Err(Error::Parameter(format!(
            "mean filter window must be odd and within 1..={n}, got {window}"
        )));
    }
    let half = window / 2;
    let mut data = frame.data.clone();
    let mut prefix = vec![0.0; n + 1];
    for (src, mut dst) in frame.data.axis_iter(Axis(0)).zip(data.axis_iter_mut(Axis(0))) {
        for (j, v) in src.iter().enumerate() {
            prefix[j + 1] = prefix[j] + v;
        }
        for (j, out) in dst.iter_mut().enumerate() {
            let h = half.min(j).min(n - 1 - j);
            let len = 2 * h + 1;
            *out = if len == 1 {
                src[j]
            } else {
                (prefix[j + h + 1] - prefix[j - h]) / len as f64
            };
        }
    }
    Ok(frame.with_data(data))
}

/// Divides each range bin's row by `max(max|row|, epsilon)`.
pub fn normalize_slow(frame: &RadarFrame, epsilon: f64) -> RadarFrame {
    let mut data = frame.data.clone();
    for mut row in data.axis_iter_mut(Axis(0)) {
        let peak = row.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let scale = peak.max(epsilon);
        row.mapv_inplace(|v| v / scale);
    }
    frame.with_data(data)
}

/// Subtracts each range bin's slow-time mean (static clutter removal).
pub fn subtract_slow_mean(frame: &RadarFrame) -> RadarFrame {
    let mut data = frame.data.clone();
    for mut row in data.axis_iter_mut(Axis(0)) {
        let mean = row.sum() / row.len() as f64;
        row.mapv_inplace(|v| v - mean);
    }
    frame.with_data(data)
}

struct RowSpectrum {
    fft: Arc<dyn Fft<f64>>,
    buf: Vec<Complex<f64>>,
    scratch: Vec<Complex<f64>>,
}

impl RowSpectrum {
    fn new(len: usize) -> RowSpectrum {
        let fft = FftPlanner::new().plan_fft_forward(len);
        let scratch = vec![Complex::default(); fft.get_inplace_scratch_len()];
        RowSpectrum {
            fft,
            buf: vec![Complex::default(); len],
            scratch,
        }
    }

    fn power(&mut self, row: impl Iterator<Item = f64>, out: &mut [f64]) {
        self.buf.fill(Complex::default());
        for (slot, v) in self.buf.iter_mut().zip(row) {
            slot.re = v;
        }
        self.fft.process_with_scratch(&mut self.buf, &mut self.scratch);
        for (o, x) in out.iter_mut().zip(&self.buf) {
            *o = x.norm_sqr();
        }
    }
}

/// Zero-padded DFT of every slow-time row; squared magnitude of bins
/// `0..=fft_length/2`, with bin `k` at `k·prf/fft_length` Hz.
pub fn slow_time_spectrum(frame: &RadarFrame, fft_length: usize) -> Result<RangeFrequencyMap> {
    let n = frame.traces();
    if fft_length < n {
        return Err(Error::Parameter(format!(
            "fft length {fft_length} is shorter than the {n} traces"
        )));
    }
    let half = fft_length / 2 + 1;
    let mut power = Array2::zeros((frame.samples(), half));
    let mut spectrum = RowSpectrum::new(fft_length);
    for (src, mut dst) in frame.data.axis_iter(Axis(0)).zip(power.axis_iter_mut(Axis(0))) {
        let out = dst.as_slice_mut().expect("freshly allocated rows are contiguous");
        spectrum.power(src.iter().copied(), out);
    }
    let bin_width_hz = frame.prf / fft_length as f64;
    Ok(RangeFrequencyMap {
        power,
        freq_axis: (0..half).map(|k| k as f64 * bin_width_hz).collect(),
        bins: (0..half).collect(),
        range_axis: frame.range_axis(),
        bin_width_hz,
        prf: frame.prf,
    })
}

/// Keeps the columns whose centre frequency lies in `[low, high]`.
pub fn band_select(map: &RangeFrequencyMap, band_low_hz: f64, band_high_hz: f64) -> Result<RangeFrequencyMap> {
    let nyquist = map.prf / 2.0;
    if !(band_low_hz >= 0.0 && band_low_hz < band_high_hz && band_high_hz <= nyquist) {
        return Err(Error::Config(format!(
            "band [{band_low_hz}, {band_high_hz}] Hz must satisfy 0 <= low < high <= {nyquist} Hz"
        )));
    }
    let keep: Vec<usize> = map
        .freq_axis
        .iter()
        .enumerate()
        .filter(|(_, &f)| f >= band_low_hz && f <= band_high_hz)
        .map(|(i, _)| i)
        .collect();
    if keep.is_empty() {
        return Err(Error::Config(format!(
            "no frequency bin falls in [{band_low_hz}, {band_high_hz}] Hz at {:.6} Hz bin resolution",
            map.bin_width_hz
        )));
    }
    Ok(RangeFrequencyMap {
        power: map.power.select(Axis(1), &keep),
        freq_axis: keep.iter().map(|&i| map.freq_axis[i]).collect(),
        bins: keep.iter().map(|&i| map.bins[i]).collect(),
        range_axis: map.range_axis.clone(),
        bin_width_hz: map.bin_width_hz,
        prf: map.prf,
    })
}

/// DC removal followed by linear detrending, per trace.
pub fn fast_time_stage(frame: &RadarFrame) -> RadarFrame {
    detrend_linear(&remove_dc(frame))
}

/// Smoothing, normalization, spectrum and band selection, per range bin.
pub fn slow_time_stage(frame: &RadarFrame, config: &PipelineConfig) -> Result<RangeFrequencyMap> {
    let clutter_free;
    let frame = if config.clutter_subtraction {
        clutter_free = subtract_slow_mean(frame);
        &clutter_free
    } else {
        frame
    };
    let smoothed = mean_filter_slow(frame, config.mean_filter_window).map_err(|e| e.in_stage("mean filter"))?;
    let normalized = normalize_slow(&smoothed, config.normalization_epsilon);
    let full = slow_time_spectrum(&normalized, config.fft_length_for(frame.traces()))
        .map_err(|e| e.in_stage("spectrum"))?;
    band_select(&full, config.band_low_hz, config.band_high_hz).map_err(|e| e.in_stage("band select"))
}

/// CA-CFAR on the band map with the given backend.
pub fn threshold_stage(map: &RangeFrequencyMap, config: &PipelineConfig, backend: Backend) -> Result<DetectionResult> {
    cfar::cfar2d(map.power.view(), &config.cfar, backend, config.execution).map_err(|e| e.in_stage("cfar"))
}

/// Runs the whole chain with `config.backend`.
pub fn detect(frame: &RadarFrame, config: &PipelineConfig) -> Result<(RangeFrequencyMap, DetectionResult)> {
    if config.normalization_epsilon.is_nan() || config.normalization_epsilon <= 0.0 {
        return Err(Error::Parameter("normalization epsilon must be positive".into()));
    }
    let fast = fast_time_stage(frame);
    let band = slow_time_stage(&fast, config)?;
    let result = threshold_stage(&band, config, config.backend)?;
    Ok((band, result))
}
