//! Detection CSVs, PGM heatmaps and benchmark CSV/JSON.

use std::io::{Read, Write};

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::bench::{CfarRecord, StepRecord};
use crate::cfar::DetectionResult;
use crate::error::{Error, Result};
use crate::pipeline::RangeFrequencyMap;

pub const DETECTION_HEADER: [&str; 6] = ["row", "col", "range_m", "freq_hz", "power", "threshold"];

/// One detection row per line, highest power first.
///
/// Thresholds are printed to nine significant digits; the power column is
/// the exact cell value.
pub fn write_detections_csv<W: Write>(map: &RangeFrequencyMap, result: &DetectionResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DETECTION_HEADER)?;
    for d in &result.detections {
        w.write_record([
            d.row.to_string(),
            d.col.to_string(),
            map.range_axis[d.row].to_string(),
            map.freq_axis[d.col].to_string(),
            d.value.to_string(),
            format!("{:.8e}", d.threshold),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Parsed detections CSV line.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct DetectionRecord {
    pub row: usize,
    pub col: usize,
    pub range_m: f64,
    pub freq_hz: f64,
    pub power: f64,
    pub threshold: f64,
}

pub fn read_detections_csv<R: Read>(input: R) -> Result<Vec<DetectionRecord>> {
    read_csv(input)
}

/// Binary graymap (`P5`), one pixel per map cell, rows = range bins,
/// columns = frequency bins, linearly scaled so the map maximum is 255.
pub fn write_heatmap_pgm<W: Write>(map: &RangeFrequencyMap, mut out: W) -> Result<()> {
    let (h, w) = map.power.dim();
    let max = map.power.iter().cloned().fold(0.0f64, f64::max);
    write!(out, "P5\n{w} {h}\n255\n")?;
    let pixels: Vec<u8> = map
        .power
        .iter()
        .map(|&v| if max > 0.0 { (255.0 * v / max).round().clamp(0.0, 255.0) as u8 } else { 0 })
        .collect();
    out.write_all(&pixels)?;
    out.flush()?;
    Ok(())
}

/// Detection cell coordinates for overlaying on a heatmap.
pub fn write_marks_csv<W: Write>(result: &DetectionResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["row", "col"])?;
    for d in &result.detections {
        w.write_record([d.row.to_string(), d.col.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn write_csv<W: Write, T: Serialize>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn read_csv<R: Read, T: DeserializeOwned>(input: R) -> Result<Vec<T>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(Error::from)
}

/// `guard,background,naive_mean_s,naive_std_s,ii_mean_s,ii_std_s,ratio`
pub fn write_cfar_csv<W: Write>(rows: &[CfarRecord], out: W) -> Result<()> {
    write_csv(rows, out)
}

pub fn read_cfar_csv<R: Read>(input: R) -> Result<Vec<CfarRecord>> {
    read_csv(input)
}

/// `step,naive_mean_s,naive_std_s,ii_mean_s,ii_std_s`; a blank cell means the
/// step does not apply to that backend.
pub fn write_steps_csv<W: Write>(rows: &[StepRecord], out: W) -> Result<()> {
    write_csv(rows, out)
}

pub fn read_steps_csv<R: Read>(input: R) -> Result<Vec<StepRecord>> {
    read_csv(input)
}

/// JSON document for either benchmark mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchJson<T> {
    pub mode: String,
    pub environment: String,
    pub rows: Vec<T>,
}

pub fn write_json<W: Write, T: Serialize>(doc: &BenchJson<T>, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, doc)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn read_json<R: Read, T: DeserializeOwned>(input: R) -> Result<BenchJson<T>> {
    Ok(serde_json::from_reader(input)?)
}
