//! Two-dimensional cell-averaging CFAR.
//!
//! Each cell under test (CUT) is compared against `T = α·A`, where `A` is the
//! mean power of the training ring around it: the `(2(g+b)+1)`-square outer
//! window minus the `(2g+1)`-square guard window, both clamped to the map.
//! `α = N·(P_fa^(-1/N) - 1)` is re-evaluated for each clamped training count
//! `N`, so border cells keep the design false-alarm rate.
//!
//! Two backends compute the same thresholds:
//!
//! * [`cfar2d_naive`] sums the ring with explicit loops, `O((g+b)²)` per cell.
//! * [`cfar2d_integral`] builds one [`SummedAreaTable`] and takes each ring sum
//!   as `outer - guard`, eight table reads per cell.

use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sat::{Rect, SummedAreaTable};

/// Relative half-width of the band around a threshold inside which the two
/// backends may legitimately disagree on a cell.
pub const TIE_BAND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BorderPolicy {
    /// Windows are clipped to the map; `N` and `α` follow the clipped ring.
    #[default]
    Clamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TiePolicy {
    /// `CUT == T` is reported as absent.
    #[default]
    TieIsAbsent,
}

/// Window geometry and design false-alarm probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CfarParams {
    /// Guard cells on each side of the CUT, in both dimensions.
    pub guard_radius: usize,
    /// Training cells on each side beyond the guard, in both dimensions.
    pub background_radius: usize,
    pub pfa: f64,
    pub border_policy: BorderPolicy,
    pub tie_policy: TiePolicy,
}

impl CfarParams {
    pub fn new(guard_radius: usize, background_radius: usize, pfa: f64) -> Result<CfarParams> {
        let params = CfarParams {
            guard_radius,
            background_radius,
            pfa,
            border_policy: BorderPolicy::Clamp,
            tie_policy: TiePolicy::TieIsAbsent,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pfa > 0.0 && self.pfa < 1.0) {
            return Err(Error::Parameter(format!("pfa must lie in (0, 1), got {}", self.pfa)));
        }
        if self.background_radius == 0 {
            return Err(Error::Parameter("background radius must be at least 1".into()));
        }
        Ok(())
    }

    /// Training cells around an interior CUT: `(2(g+b)+1)² - (2g+1)²`.
    pub fn interior_train_cells(&self) -> usize {
        let outer = 2 * (self.guard_radius + self.background_radius) + 1;
        let guard = 2 * self.guard_radius + 1;
        outer * outer - guard * guard
    }
}

impl Default for CfarParams {
    fn default() -> CfarParams {
        CfarParams {
            guard_radius: 4,
            background_radius: 8,
            pfa: 1e-3,
            border_policy: BorderPolicy::Clamp,
            tie_policy: TiePolicy::TieIsAbsent,
        }
    }
}

/// CA-CFAR scaling `α = N·(P_fa^(-1/N) - 1)`.
///
/// ```
/// use vitalcfar::cfar::alpha_factor;
///
/// assert_eq!(alpha_factor(1, 0.5).unwrap(), 1.0);
/// assert!(alpha_factor(24, 1e-2).unwrap() < alpha_factor(24, 1e-3).unwrap());
/// ```
pub fn alpha_factor(n_train: usize, pfa: f64) -> Result<f64> {
    if n_train == 0 {
        return Err(Error::Parameter("training cell count must be positive".into()));
    }
    if !(pfa > 0.0 && pfa < 1.0) {
        return Err(Error::Parameter(format!("pfa must lie in (0, 1), got {pfa}")));
    }
    let n = n_train as f64;
    Ok(n * (-pfa.ln() / n).exp_m1())
}

/// Clamped window around one cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrainingWindow {
    pub outer: Rect,
    pub guard: Rect,
    pub n_train: usize,
}

fn clamp_span(center: usize, radius: usize, len: usize) -> (usize, usize) {
    (center.saturating_sub(radius), (center + radius).min(len - 1))
}

#[inline]
fn window_unchecked(g: usize, b: usize, row: usize, col: usize, dims: (usize, usize)) -> TrainingWindow {
    let (or0, or1) = clamp_span(row, g + b, dims.0);
    let (oc0, oc1) = clamp_span(col, g + b, dims.1);
    let (gr0, gr1) = clamp_span(row, g, dims.0);
    let (gc0, gc1) = clamp_span(col, g, dims.1);
    let outer = Rect::new(or0, or1, oc0, oc1);
    let guard = Rect::new(gr0, gr1, gc0, gc1);
    TrainingWindow {
        outer,
        guard,
        n_train: outer.area() - guard.area(),
    }
}

/// Outer and guard rectangles for `cell`, clamped to a `dims` map.
pub fn training_window(params: &CfarParams, cell: (usize, usize), dims: (usize, usize)) -> Result<TrainingWindow> {
    let (row, col) = cell;
    if row >= dims.0 || col >= dims.1 {
        return Err(Error::Bounds(format!(
            "cell ({row}, {col}) outside {}x{} map",
            dims.0, dims.1
        )));
    }
    let w = window_unchecked(params.guard_radius, params.background_radius, row, col, dims);
    if w.n_train == 0 {
        return Err(Error::Config(format!(
            "guard window {0}x{0} covers the whole {1}x{2} map at cell ({row}, {col}); no training cells",
            2 * params.guard_radius + 1,
            dims.0,
            dims.1
        )));
    }
    Ok(w)
}

/// One cell declared present.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub row: usize,
    pub col: usize,
    pub value: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    /// `true` where the cell strictly exceeds its threshold.
    pub mask: Array2<bool>,
    pub threshold_map: Array2<f64>,
    /// Present cells, by descending value (ties by row, then column).
    pub detections: Vec<Detection>,
}

impl DetectionResult {
    pub fn len(&self) -> usize {
        self.detections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detections.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Backend {
    Naive,
    #[default]
    IntegralImage,
}

impl Backend {
    pub fn label(self) -> &'static str {
        match self {
            Backend::Naive => "CA-CFAR",
            Backend::IntegralImage => "II CA-CFAR",
        }
    }
}

/// Whether rows are thresholded on the calling thread or on the rayon pool.
/// Both produce bit-identical output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Sequential,
    Parallel,
}

fn validate_map(map: &ArrayView2<'_, f64>, params: &CfarParams) -> Result<()> {
    params.validate()?;
    let (m, n) = map.dim();
    if m == 0 || n == 0 {
        return Err(Error::Dimension(format!("empty {m}x{n} power map")));
    }
    let span = 2 * params.guard_radius + 1;
    if m <= span && n <= span {
        return Err(Error::Config(format!(
            "{m}x{n} map is too small for guard radius {}: a {span}x{span} guard window leaves no training cells",
            params.guard_radius
        )));
    }
    for ((i, j), &v) in map.indexed_iter() {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::Input(format!("power cell ({i}, {j}) = {v} is not a finite non-negative value")));
        }
    }
    Ok(())
}

/// α for every training count that can occur under these params.
struct AlphaTable(Vec<f64>);

impl AlphaTable {
    fn new(params: &CfarParams) -> Result<AlphaTable> {
        let max_n = params.interior_train_cells();
        let mut alphas = vec![f64::NAN; max_n + 1];
        for (n, a) in alphas.iter_mut().enumerate().skip(1) {
            *a = alpha_factor(n, params.pfa)?;
        }
        Ok(AlphaTable(alphas))
    }

    #[inline]
    fn get(&self, n_train: usize) -> f64 {
        self.0[n_train]
    }
}

fn threshold_rows<F>(dims: (usize, usize), exec: Execution, row_kernel: F) -> Vec<f64>
where
    F: Fn(usize, &mut [f64]) + Sync,
{
    let (m, n) = dims;
    let mut out = vec![0.0; m * n];
    match exec {
        Execution::Sequential => out
            .chunks_mut(n)
            .enumerate()
            .for_each(|(r, row)| row_kernel(r, row)),
        Execution::Parallel => out
            .par_chunks_mut(n)
            .enumerate()
            .for_each(|(r, row)| row_kernel(r, row)),
    }
    out
}

fn finish(map: &ArrayView2<'_, f64>, thresholds: Vec<f64>, params: &CfarParams) -> DetectionResult {
    let dims = map.dim();
    let threshold_map = Array2::from_shape_vec(dims, thresholds).expect("threshold buffer matches map");
    let mut detections = Vec::new();
    let mask = Array2::from_shape_fn(dims, |(i, j)| {
        let cut = map[[i, j]];
        let t = threshold_map[[i, j]];
        let present = match params.tie_policy {
            TiePolicy::TieIsAbsent => cut > t,
        };
        if present {
            detections.push(Detection {
                row: i,
                col: j,
                value: cut,
                threshold: t,
            });
        }
        present
    });
    detections.sort_by(|a, b| {
        b.value
            .total_cmp(&a.value)
            .then(a.row.cmp(&b.row))
            .then(a.col.cmp(&b.col))
    });
    DetectionResult {
        mask,
        threshold_map,
        detections,
    }
}

/// Reference backend: ring sums by explicit loops.
pub fn cfar2d_naive(power_map: ArrayView2<'_, f64>, params: &CfarParams) -> Result<DetectionResult> {
    cfar2d(power_map, params, Backend::Naive, Execution::Sequential)
}

/// Integral-image backend: one table build, then eight reads per cell.
pub fn cfar2d_integral(power_map: ArrayView2<'_, f64>, params: &CfarParams) -> Result<DetectionResult> {
    cfar2d(power_map, params, Backend::IntegralImage, Execution::Sequential)
}

/// Runs the chosen backend.
pub fn cfar2d(
    power_map: ArrayView2<'_, f64>,
    params: &CfarParams,
    backend: Backend,
    exec: Execution,
) -> Result<DetectionResult> {
    validate_map(&power_map, params)?;
    let alphas = AlphaTable::new(params)?;
    let dims = power_map.dim();
    let (g, b) = (params.guard_radius, params.background_radius);

    let thresholds = match backend {
        Backend::Naive => {
            let standard = power_map.as_standard_layout();
            let data = standard.as_slice().expect("standard layout");
            let stride = dims.1;
            threshold_rows(dims, exec, |r, out| {
                for (c, slot) in out.iter_mut().enumerate() {
                    let w = window_unchecked(g, b, r, c, dims);
                    let mut sum = 0.0;
                    for i in w.outer.r0..=w.outer.r1 {
                        let row = &data[i * stride..(i + 1) * stride];
                        if i >= w.guard.r0 && i <= w.guard.r1 {
                            sum += row[w.outer.c0..w.guard.c0].iter().sum::<f64>();
                            sum += row[w.guard.c1 + 1..=w.outer.c1].iter().sum::<f64>();
                        } else {
                            sum += row[w.outer.c0..=w.outer.c1].iter().sum::<f64>();
                        }
                    }
                    *slot = alphas.get(w.n_train) * (sum / w.n_train as f64);
                }
            })
        }
        Backend::IntegralImage => {
            let sat = SummedAreaTable::build(power_map)?;
            threshold_rows(dims, exec, |r, out| {
                for (c, slot) in out.iter_mut().enumerate() {
                    let w = window_unchecked(g, b, r, c, dims);
                    let sum = sat.rect_sum(w.outer) - sat.rect_sum(w.guard);
                    *slot = alphas.get(w.n_train) * (sum / w.n_train as f64);
                }
            })
        }
    };
    Ok(finish(&power_map, thresholds, params))
}

/// `true` when `value` sits within the tie band of `threshold`.
pub fn near_threshold(value: f64, threshold: f64) -> bool {
    (value - threshold).abs() <= TIE_BAND * threshold.abs().max(1.0)
}

/// Checks that two results agree on every cell outside the tie band.
///
/// Returns the first disagreeing cell in row-major order.
pub fn check_equivalent(map: ArrayView2<'_, f64>, naive: &DetectionResult, integral: &DetectionResult) -> Result<()> {
    for ((i, j), &v) in map.indexed_iter() {
        let a = naive.mask[[i, j]];
        let b = integral.mask[[i, j]];
        if a != b && !near_threshold(v, naive.threshold_map[[i, j]]) {
            return Err(Error::BackendMismatch {
                row: i,
                col: j,
                naive: a,
                integral: b,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Exp1};

    fn exp_map(rows: usize, cols: usize, rng: &mut impl Rng) -> Array2<f64> {
        Array2::from_shape_fn((rows, cols), |_| Exp1.sample(rng))
    }

    #[test]
    fn alpha_closed_form_at_one() {
        assert_eq!(alpha_factor(1, 0.5).unwrap(), 1.0);
    }

    #[test]
    fn alpha_24_against_arbitrary_precision() {
        // 24·(1000^(1/24) − 1) evaluated with mpmath at 50 digits
        let want = 8.004_514_371_919_776_616_2;
        let got = alpha_factor(24, 1e-3).unwrap();
        assert!((got - want).abs() / want < 1e-12, "{got}");
    }

    #[test]
    fn alpha_monotone_in_pfa() {
        assert!(alpha_factor(24, 1e-2).unwrap() < alpha_factor(24, 1e-3).unwrap());
    }

    #[test]
    fn alpha_errors() {
        assert!(matches!(alpha_factor(0, 0.1), Err(Error::Parameter(_))));
        assert!(matches!(alpha_factor(4, 0.0), Err(Error::Parameter(_))));
        assert!(matches!(alpha_factor(4, 1.0), Err(Error::Parameter(_))));
        assert!(matches!(alpha_factor(4, f64::NAN), Err(Error::Parameter(_))));
    }

    #[test]
    fn alpha_reproduces_design_pfa() {
        // P_fa = (1 + α/N)^(-N) for exponential cells
        for &n in &[1usize, 5, 16, 544, 1392] {
            for &pfa in &[0.5, 1e-2, 1e-4] {
                let a = alpha_factor(n, pfa).unwrap();
                let back = (1.0 + a / n as f64).powf(-(n as f64));
                assert!((back - pfa).abs() / pfa < 1e-10);
            }
        }
    }

    #[test]
    fn params_validation() {
        assert!(CfarParams::new(0, 1, 0.1).is_ok());
        assert!(CfarParams::new(1, 0, 0.1).is_err());
        assert!(CfarParams::new(1, 1, 1.5).is_err());
        assert_eq!(CfarParams::new(4, 8, 0.1).unwrap().interior_train_cells(), 544);
    }

    #[test]
    fn window_interior() {
        let p = CfarParams::new(1, 1, 1e-3).unwrap();
        let w = training_window(&p, (50, 50), (100, 100)).unwrap();
        assert_eq!(w.outer.area(), 25);
        assert_eq!(w.guard.area(), 9);
        assert_eq!(w.n_train, 16);
    }

    #[test]
    fn window_corner_matches_enumeration() {
        let p = CfarParams::new(1, 1, 1e-3).unwrap();
        let w = training_window(&p, (0, 0), (100, 100)).unwrap();
        assert_eq!(w.outer, Rect::new(0, 2, 0, 2));
        assert_eq!(w.guard, Rect::new(0, 1, 0, 1));
        // hand enumeration: cells within Chebyshev distance 2 but not 1 of (0,0)
        let ring = (0..3i32)
            .flat_map(|i| (0..3i32).map(move |j| (i, j)))
            .filter(|&(i, j)| i.max(j) == 2)
            .count();
        assert_eq!(ring, 5);
        assert_eq!(w.n_train, 5);
    }

    #[test]
    fn window_table_row() {
        let p = CfarParams::new(4, 8, 1e-3).unwrap();
        let w = training_window(&p, (500, 300), (1024, 600)).unwrap();
        assert_eq!(w.n_train, 25 * 25 - 9 * 9);
    }

    #[test]
    fn window_degenerate_is_config_error() {
        let p = CfarParams::new(4, 1, 1e-3).unwrap();
        let err = training_window(&p, (2, 2), (5, 5)).unwrap_err();
        assert!(matches!(err, Error::Config(ref s) if s.contains("5x5")));
        let map = Array2::<f64>::ones((5, 5));
        assert!(matches!(cfar2d_naive(map.view(), &p), Err(Error::Config(_))));
        assert!(matches!(cfar2d_integral(map.view(), &p), Err(Error::Config(_))));
    }

    #[test]
    fn small_map_with_one_long_axis_is_valid() {
        let p = CfarParams::new(4, 8, 1e-3).unwrap();
        let map = Array2::<f64>::ones((64, 7));
        let n = cfar2d_naive(map.view(), &p).unwrap();
        let ii = cfar2d_integral(map.view(), &p).unwrap();
        assert_eq!(n.mask, ii.mask);
    }

    #[test]
    fn zero_map_has_zero_thresholds() {
        let map = Array2::<f64>::zeros((32, 32));
        let p = CfarParams::new(2, 3, 1e-2).unwrap();
        for backend in [Backend::Naive, Backend::IntegralImage] {
            let r = cfar2d(map.view(), &p, backend, Execution::Sequential).unwrap();
            assert!(r.is_empty());
            assert!(r.threshold_map.iter().all(|&t| t == 0.0));
        }
    }

    #[test]
    fn constant_map_has_no_detections() {
        let p = CfarParams::new(1, 2, 1e-3).unwrap();
        // smallest clamped ring (corner) still has α > 1
        let corner = training_window(&p, (0, 0), (32, 32)).unwrap().n_train;
        assert!(alpha_factor(corner, 1e-3).unwrap() > 1.0);
        assert!(alpha_factor(p.interior_train_cells(), 1e-3).unwrap() > 1.0);
        let map = Array2::from_elem((32, 32), 3.25);
        assert!(cfar2d_naive(map.view(), &p).unwrap().is_empty());
        assert!(cfar2d_integral(map.view(), &p).unwrap().is_empty());
    }

    #[test]
    fn bright_cell_is_detected() {
        let mut map = Array2::from_elem((40, 40), 1.0);
        map[[20, 21]] = 500.0;
        let p = CfarParams::new(1, 3, 1e-4).unwrap();
        let r = cfar2d_integral(map.view(), &p).unwrap();
        assert_eq!(r.detections.len(), 1);
        assert_eq!((r.detections[0].row, r.detections[0].col), (20, 21));
    }

    #[test]
    fn tie_is_absent() {
        // N = 1 and pfa = 0.5 gives α = 1, so a cell equal to its only neighbour ties
        let map = ndarray::array![[2.0, 2.0]];
        let p = CfarParams::new(0, 1, 0.5).unwrap();
        let r = cfar2d_naive(map.view(), &p).unwrap();
        assert_eq!(r.threshold_map[[0, 0]], 2.0);
        assert!(r.is_empty());
    }

    #[test]
    fn rejects_bad_cells() {
        let p = CfarParams::new(1, 1, 0.1).unwrap();
        let mut map = Array2::<f64>::ones((8, 8));
        map[[3, 3]] = -1.0;
        assert!(matches!(cfar2d_naive(map.view(), &p), Err(Error::Input(_))));
        map[[3, 3]] = f64::INFINITY;
        assert!(matches!(cfar2d_integral(map.view(), &p), Err(Error::Input(_))));
    }

    #[test]
    fn false_alarm_rate_on_exponential_noise() {
        let p = CfarParams::new(2, 4, 0.01).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let (mut alarms, mut cells) = (0usize, 0usize);
        for _ in 0..100 {
            let map = exp_map(64, 64, &mut rng);
            let r = cfar2d_naive(map.view(), &p).unwrap();
            alarms += r.len();
            cells += 64 * 64;
        }
        let rate = alarms as f64 / cells as f64;
        assert!((rate - 0.01).abs() <= 0.3 * 0.01, "rate {rate}");
    }

    #[test]
    fn default_grid_integer_maps_bit_identical() {
        let mut rng = ChaCha8Rng::seed_from_u64(48);
        let map = Array2::from_shape_fn((48, 48), |_| rng.random_range(0..1000u32) as f64);
        for (g, b) in [(4, 8), (4, 12), (8, 8), (8, 12)] {
            let p = CfarParams::new(g, b, 1e-3).unwrap();
            let n = cfar2d_naive(map.view(), &p).unwrap();
            let ii = cfar2d_integral(map.view(), &p).unwrap();
            assert_eq!(n.mask, ii.mask, "g={g} b={b}");
            assert_eq!(n.threshold_map, ii.threshold_map);
        }
    }

    #[test]
    fn parallel_is_bit_identical() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let map = exp_map(70, 50, &mut rng);
        let p = CfarParams::new(2, 3, 1e-2).unwrap();
        for backend in [Backend::Naive, Backend::IntegralImage] {
            let s = cfar2d(map.view(), &p, backend, Execution::Sequential).unwrap();
            let par = cfar2d(map.view(), &p, backend, Execution::Parallel).unwrap();
            assert!(s
                .threshold_map
                .iter()
                .zip(par.threshold_map.iter())
                .all(|(a, b)| a.to_bits() == b.to_bits()));
            assert_eq!(s.detections, par.detections);
        }
    }

    #[test]
    fn detections_sorted_and_consistent_with_mask() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let map = exp_map(40, 40, &mut rng);
        let r = cfar2d_integral(map.view(), &CfarParams::new(1, 2, 0.05).unwrap()).unwrap();
        assert_eq!(r.len(), r.mask.iter().filter(|&&m| m).count());
        assert!(r.detections.windows(2).all(|w| w[0].value >= w[1].value));
        for d in &r.detections {
            assert!(r.mask[[d.row, d.col]]);
            assert!(d.value > d.threshold);
        }
    }

    fn map_and_params() -> impl Strategy<Value = (Array2<f64>, CfarParams)> {
        (8usize..40, 8usize..40, 0usize..3, 1usize..4, 1e-4f64..0.3, any::<u64>()).prop_map(
            |(r, c, g, b, pfa, seed)| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (exp_map(r, c, &mut rng), CfarParams::new(g, b, pfa).unwrap())
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn backends_agree((map, p) in map_and_params()) {
            let n = cfar2d_naive(map.view(), &p).unwrap();
            let ii = cfar2d_integral(map.view(), &p).unwrap();
            prop_assert!(check_equivalent(map.view(), &n, &ii).is_ok());
            for (a, b) in n.threshold_map.iter().zip(ii.threshold_map.iter()) {
                prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(f64::MIN_POSITIVE));
            }
        }

        #[test]
        fn raising_pfa_never_removes_detections((map, p) in map_and_params(), bump in 1.0f64..3.0) {
            let higher = CfarParams { pfa: (p.pfa * bump).min(0.9), ..p };
            let lo = cfar2d_integral(map.view(), &p).unwrap();
            let hi = cfar2d_integral(map.view(), &higher).unwrap();
            for (a, b) in lo.mask.iter().zip(hi.mask.iter()) {
                prop_assert!(!a || *b);
            }
        }

        #[test]
        fn scaling_map_scales_thresholds((map, p) in map_and_params(), k in prop_oneof![Just(0.25f64), Just(2.0), Just(8.0)]) {
            // powers of two keep every product exact
            let scaled = map.mapv(|v| v * k);
            for backend in [Backend::Naive, Backend::IntegralImage] {
                let a = cfar2d(map.view(), &p, backend, Execution::Sequential).unwrap();
                let b = cfar2d(scaled.view(), &p, backend, Execution::Sequential).unwrap();
                prop_assert_eq!(&a.mask, &b.mask);
                for (x, y) in a.threshold_map.iter().zip(b.threshold_map.iter()) {
                    prop_assert!((x * k - y).abs() <= 1e-12 * y.abs().max(f64::MIN_POSITIVE));
                }
            }
        }
    }
}
