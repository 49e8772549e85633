//! Field serialization and CSV helpers.
//!
//! Binary layout: one JSON header line (grid fields plus side), then
//! little-endian `f64` pairs `(re, im)` for every sample in storage order.

use std::io::{BufRead, Write};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec, Side};
use crate::scalar::{lit, to_f64, Real};

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    dim_total: usize,
    factors: Vec<usize>,
    samples_per_axis: usize,
    half_width: f64,
    side: Side,
}

pub fn write_field<T: Real, W: Write>(field: &Field<T>, mut w: W) -> Result<()> {
    let spec = field.spec();
    let header = Header {
        dim_total: spec.dim_total(),
        factors: spec.factors().to_vec(),
        samples_per_axis: spec.samples_per_axis(),
        half_width: spec.half_width(),
        side: field.side(),
    };
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    let mut buf = Vec::with_capacity(16 * field.values().len());
    for v in field.values() {
        buf.extend_from_slice(&to_f64(v.re).to_le_bytes());
        buf.extend_from_slice(&to_f64(v.im).to_le_bytes());
    }
    w.write_all(&buf)?;
    w.flush()?;
    Ok(())
}

pub fn read_field<T: Real, R: BufRead>(mut r: R) -> Result<Field<T>> {
    let mut line = String::new();
    r.read_line(&mut line)?;
    let header: Header = serde_json::from_str(line.trim_end())?;
    let spec = GridSpec::new(
        header.dim_total,
        &header.factors,
        header.samples_per_axis,
        header.half_width,
    )?;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != 16 * spec.len() {
        return Err(Error::Contract(format!(
            "field payload has {} bytes, expected {}",
            bytes.len(),
            16 * spec.len()
        )));
    }
    let values = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex::new(lit::<T>(re), lit::<T>(im))
        })
        .collect();
    Field::new(spec, header.side, values)
}

/// Formats with 17 significant digits so every `f64` round-trips.
pub fn fmt17(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    format!("{v:.16e}")
}

/// CSV export: one row per sample with the multi-index columns, then re, im.
pub fn write_field_csv<T: Real, W: Write>(field: &Field<T>, w: W) -> Result<()> {
    let spec = field.spec();
    let n = spec.dim_total();
    let mut out = csv::Writer::from_writer(w);
    let mut header: Vec<String> = (0..n).map(|a| format!("i{a}")).collect();
    header.push("re".into());
    header.push("im".into());
    out.write_record(&header)?;
    let mut idx = vec![0; n];
    let mut row = Vec::with_capacity(n + 2);
    for (flat, v) in field.values().iter().enumerate() {
        spec.unravel(flat, &mut idx);
        row.clear();
        row.extend(idx.iter().map(|i| i.to_string()));
        row.push(fmt17(to_f64(v.re)));
        row.push(fmt17(to_f64(v.im)));
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

/// Writes a header plus numeric rows with [`fmt17`] formatting.
pub fn write_table<W: Write>(w: W, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    for row in rows {
        out.write_record(row.iter().map(|&v| fmt17(v)))?;
    }
    out.flush()?;
    Ok(())
}
