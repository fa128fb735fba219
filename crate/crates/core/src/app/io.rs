use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::synth::{Channel, SpectrumTrace};
use crate::AsdUnit;

use super::AppError;

pub const TRACE_HEADER: [&str; 2] = ["freq_hz", "asd_m_per_sqrt_hz"];

/// Writes through a temporary file in the same directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// CSV with a header row; every value is written in shortest round-trip form.
pub fn csv_bytes(header: &[&str], columns: &[&[f64]]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    let rows = columns.first().map_or(0, |c| c.len());
    for i in 0..rows {
        w.write_record(columns.iter().map(|c| format!("{:e}", c[i])))
            .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn json_bytes<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("serializable report");
    v.push(b'\n');
    v
}

/// Reads a `freq_hz,asd_m_per_sqrt_hz` trace. The bin width is taken from the
/// median frequency spacing.
pub fn read_trace(path: &Path) -> Result<SpectrumTrace, AppError> {
    let text = std::fs::read(path).map_err(|e| AppError::Input(format!("{}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_slice());
    let bad = |msg: String| AppError::Input(format!("{}: {msg}", path.display()));
    let header = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != TRACE_HEADER {
        return Err(bad(format!(
            "expected header `{}`, found `{}`",
            TRACE_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut freq = Vec::new();
    let mut asd = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| -> Result<f64, AppError> {
            let raw = record.get(i).ok_or_else(|| bad(format!("line {line}: missing column {}", TRACE_HEADER[i])))?;
            raw.parse::<f64>()
                .map_err(|_| bad(format!("line {line}: column {}: cannot parse `{raw}`", TRACE_HEADER[i])))
        };
        freq.push(field(0)?);
        asd.push(field(1)?);
    }
    if freq.is_empty() {
        return Err(bad("no data rows".into()));
    }
    let mut gaps: Vec<f64> = freq.windows(2).map(|w| w[1] - w[0]).collect();
    gaps.sort_by(f64::total_cmp);
    let width = gaps.get(gaps.len() / 2).copied().unwrap_or(1.0);
    SpectrumTrace::new(freq, asd, width, AsdUnit::MetrePerRootHz, Channel::Measured)
        .map_err(|e| bad(e.to_string()))
}
