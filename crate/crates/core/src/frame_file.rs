//! Binary radar frame files.
//!
//! Layout, all little-endian:
//!
//! | offset | size | field                        |
//! |--------|------|------------------------------|
//! | 0      | 4    | magic `RFRM`                 |
//! | 4      | 2    | format version, `u16` = 1    |
//! | 6      | 4    | samples per trace, `u32`     |
//! | 10     | 4    | trace count, `u32`           |
//! | 14     | 8    | fast-time rate, `f64` Hz     |
//! | 22     | 8    | trace rate (PRF), `f64` Hz   |
//! | 30     | …    | traces, each `samples × f32` |
//!
//! Samples are stored as `f32`; frames are processed in `f64`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::pipeline::RadarFrame;

pub const MAGIC: [u8; 4] = *b"RFRM";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 30;

/// Size in bytes of a file holding `samples × traces`.
pub fn file_len(samples: usize, traces: usize) -> usize {
    HEADER_LEN + samples * traces * 4
}

pub fn write_frame<W: Write>(frame: &RadarFrame, mut out: W) -> Result<()> {
    let (m, n) = (frame.samples(), frame.traces());
    let m32 = u32::try_from(m).map_err(|_| Error::Format(format!("{m} samples exceed u32")))?;
    let n32 = u32::try_from(n).map_err(|_| Error::Format(format!("{n} traces exceed u32")))?;
    let mut header = Vec::with_capacity(HEADER_LEN);
    header.extend_from_slice(&MAGIC);
    header.extend_from_slice(&VERSION.to_le_bytes());
    header.extend_from_slice(&m32.to_le_bytes());
    header.extend_from_slice(&n32.to_le_bytes());
    header.extend_from_slice(&frame.fast_rate().to_le_bytes());
    header.extend_from_slice(&frame.prf().to_le_bytes());
    out.write_all(&header)?;

    let data = frame.data();
    let mut trace = Vec::with_capacity(m * 4);
    for col in data.columns() {
        trace.clear();
        for (i, &v) in col.iter().enumerate() {
            let s = v as f32;
            if !s.is_finite() {
                return Err(Error::Format(format!("sample {v} at ({i}) does not fit in f32")));
            }
            trace.extend_from_slice(&s.to_le_bytes());
        }
        out.write_all(&trace)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_frame<R: Read>(mut input: R) -> Result<RadarFrame> {
    let mut header = [0u8; HEADER_LEN];
    input
        .read_exact(&mut header)
        .map_err(|_| Error::Format("file shorter than the 30-byte header".into()))?;
    if header[0..4] != MAGIC {
        return Err(Error::Format(format!("bad magic {:?}, expected \"RFRM\"", &header[0..4])));
    }
    let version = u16::from_le_bytes([header[4], header[5]]);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}, expected {VERSION}")));
    }
    let m = u32::from_le_bytes(header[6..10].try_into().unwrap()) as usize;
    let n = u32::from_le_bytes(header[10..14].try_into().unwrap()) as usize;
    let fast_rate = f64::from_le_bytes(header[14..22].try_into().unwrap());
    let prf = f64::from_le_bytes(header[22..30].try_into().unwrap());

    let expected = m
        .checked_mul(n)
        .and_then(|c| c.checked_mul(4))
        .ok_or_else(|| Error::Format(format!("{m}x{n} payload size overflows")))?;
    let mut payload = Vec::with_capacity(expected);
    input.read_to_end(&mut payload)?;
    if payload.len() != expected {
        return Err(Error::Format(format!(
            "payload is {} bytes, header implies {m}x{n}x4 = {expected}",
            payload.len()
        )));
    }
    let mut data = Array2::zeros((m, n));
    for (j, trace) in payload.chunks_exact(m.max(1) * 4).enumerate() {
        for (i, bytes) in trace.chunks_exact(4).enumerate() {
            data[[i, j]] = f32::from_le_bytes(bytes.try_into().unwrap()) as f64;
        }
    }
    RadarFrame::new(data, fast_rate, prf).map_err(|e| Error::Format(format!("invalid frame contents: {e}")))
}

pub fn save_frame(frame: &RadarFrame, path: impl AsRef<Path>) -> Result<()> {
    write_frame(frame, BufWriter::new(File::create(path)?))
}

pub fn load_frame(path: impl AsRef<Path>) -> Result<RadarFrame> {
    read_frame(BufReader::new(File::open(path)?))
}
