//! Respiration detection for UWB impulse radar with 2D CA-CFAR.
//!
//! The crate turns a fast-time × slow-time radar frame into a
//! range-frequency power map over the breathing band and thresholds it with
//! cell-averaging CFAR. Two interchangeable CFAR backends are provided: a
//! direct sliding-window sum and an integral-image version that reads each
//! training sum from a [`sat::SummedAreaTable`] in constant time.
//!
//! ```
//! use vitalcfar::pipeline::{detect, PipelineConfig};
//! use vitalcfar::synth::{generate_scene, SceneConfig};
//!
//! let (frame, truth) = generate_scene(&SceneConfig::with_seed(1)).unwrap();
//! let (band, result) = detect(&frame, &PipelineConfig::default()).unwrap();
//! assert!(result
//!     .detections
//!     .iter()
//!     .any(|d| d.row.abs_diff(truth.target_bin) <= 3
//!         && (band.freq_axis[d.col] - truth.resp_freq_hz).abs() <= band.bin_width_hz));
//! ```
//!
//! The `book/` directory next to the workspace walks through each stage.

pub mod bench;
pub mod cfar;
pub mod config_file;
pub mod error;
pub mod export;
pub mod frame_file;
pub mod pipeline;
pub mod sat;
pub mod synth;

pub use error::{Error, Result};

// Keeps the guide's snippets compiling and passing under `cargo test`.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/integral_image.md")]
    mod integral_image {}
    #[doc = include_str!("../../../book/src/ca_cfar.md")]
    mod ca_cfar {}
    #[doc = include_str!("../../../book/src/pipeline.md")]
    mod pipeline {}
    #[doc = include_str!("../../../book/src/synthetic_scenes.md")]
    mod synthetic_scenes {}
    #[doc = include_str!("../../../book/src/benchmarks.md")]
    mod benchmarks {}
    #[doc = include_str!("../../../book/src/files_and_cli.md")]
    mod files_and_cli {}
}
