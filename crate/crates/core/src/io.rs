//! File formats: lossless snapshots, trace/sweep/convergence CSV and PGM previews.
//!
//! Snapshot layout:
//!
//! ```text
//! CHF1\n
//! M_s <int>\n
//! N <int>\n
//! time <float>\n
//! <M_s * M_s little-endian f64, row-major>
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::diagnostics::TraceRecord;
use crate::error::{Error, Result};
use crate::grid::{GridSpec, RealField};

pub const SNAPSHOT_MAGIC: &[u8] = b"CHF1\n";
pub const TRACE_HEADER: &str = "step,time,energy,mass,linf,h1_seminorm";
pub const CONVERGENCE_HEADER: &str = "tau,l2_rel_err,l2_ratio,linf_rel_err,linf_ratio";

const MAX_HEADER_LINE: usize = 64;

/// A decoded snapshot.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub field: RealField,
}

impl Snapshot {
    /// The field, provided it was written on `grid`.
    pub fn into_field(self, grid: GridSpec) -> Result<RealField> {
        let found = self.field.grid();
        if found != grid {
            return Err(Error::GridMismatch {
                expected_samples: grid.samples(),
                expected_modes: grid.modes(),
                found_samples: found.samples(),
                found_modes: found.modes(),
            });
        }
        Ok(self.field)
    }
}

pub fn encode_snapshot(field: &RealField, time: f64) -> Vec<u8> {
    let g = field.grid();
    let mut out = Vec::with_capacity(64 + 8 * g.sample_count());
    out.extend_from_slice(SNAPSHOT_MAGIC);
    out.extend_from_slice(format!("M_s {}\nN {}\ntime {:?}\n", g.samples(), g.modes(), time).as_bytes());
    for v in field.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedFile(msg.into())
}

fn header_value<'a>(data: &mut &'a [u8], key: &str) -> Result<&'a str> {
    let end = data
        .iter()
        .take(MAX_HEADER_LINE)
        .position(|b| *b == b'\n')
        .ok_or_else(|| malformed(format!("missing `{key}` header line")))?;
    let line = std::str::from_utf8(&data[..end]).map_err(|_| malformed("header is not UTF-8"))?;
    *data = &data[end + 1..];
    line.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix(' '))
        .ok_or_else(|| malformed(format!("expected `{key} <value>`, found `{line}`")))
}

fn parse_count(s: &str, key: &str) -> Result<usize> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(malformed(format!("`{key}` is not a decimal integer: `{s}`")));
    }
    s.parse().map_err(|_| malformed(format!("`{key}` out of range: `{s}`")))
}

pub fn decode_snapshot(bytes: &[u8]) -> Result<Snapshot> {
    let mut data = bytes
        .strip_prefix(SNAPSHOT_MAGIC)
        .ok_or_else(|| malformed("missing CHF1 magic"))?;
    let samples = parse_count(header_value(&mut data, "M_s")?, "M_s")?;
    let modes = parse_count(header_value(&mut data, "N")?, "N")?;
    let time_str = header_value(&mut data, "time")?;
    let time: f64 = time_str
        .parse()
        .map_err(|_| malformed(format!("`time` is not a number: `{time_str}`")))?;
    if !time.is_finite() {
        return Err(malformed("`time` is not finite"));
    }
    let grid = GridSpec::new(modes, samples).map_err(|e| malformed(e.to_string()))?;
    let expected = grid.sample_count() * 8;
    if data.len() != expected {
        return Err(malformed(format!(
            "payload has {} bytes, expected {expected}",
            data.len()
        )));
    }
    let values = data
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    let field = RealField::new(grid, values).map_err(|e| malformed(e.to_string()))?;
    Ok(Snapshot { time, field })
}

pub fn write_snapshot_file(path: impl AsRef<Path>, field: &RealField, time: f64) -> Result<()> {
    fs::write(path, encode_snapshot(field, time))?;
    Ok(())
}

pub fn read_snapshot_file(path: impl AsRef<Path>) -> Result<Snapshot> {
    decode_snapshot(&fs::read(path)?)
}

/// Formats with 17 significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_trace_csv(mut w: impl Write, trace: &[TraceRecord]) -> Result<()> {
    writeln!(w, "{TRACE_HEADER}")?;
    for r in trace {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.step,
            fmt_float(r.time),
            fmt_float(r.energy),
            fmt_float(r.mass),
            fmt_float(r.linf),
            fmt_float(r.h1_seminorm)
        )?;
    }
    Ok(())
}

pub fn parse_trace_csv(text: &str) -> Result<Vec<TraceRecord>> {
    let mut lines = text.split('\n');
    if lines.next() != Some(TRACE_HEADER) {
        return Err(malformed("trace CSV header mismatch"));
    }
    let mut out = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(malformed(format!("trace row {} has {} fields", lineno + 1, fields.len())));
        }
        let num = |i: usize| -> Result<f64> {
            fields[i]
                .parse()
                .map_err(|_| malformed(format!("trace row {}: bad number `{}`", lineno + 1, fields[i])))
        };
        out.push(TraceRecord {
            step: fields[0]
                .parse()
                .map_err(|_| malformed(format!("trace row {}: bad step `{}`", lineno + 1, fields[0])))?,
            time: num(1)?,
            energy: num(2)?,
            mass: num(3)?,
            linf: num(4)?,
            h1_seminorm: num(5)?,
        });
    }
    Ok(out)
}

/// `time,E_S=<v1>,...`; rows stop at the shortest trace.
pub fn write_sweep_csv(mut w: impl Write, runs: &[(f64, &[TraceRecord])]) -> Result<()> {
    let mut header = String::from("time");
    for (s, _) in runs {
        header.push_str(&format!(",E_S={s}"));
    }
    writeln!(w, "{header}")?;
    let rows = runs.iter().map(|(_, t)| t.len()).min().unwrap_or(0);
    for i in 0..rows {
        let mut line = fmt_float(runs[0].1[i].time);
        for (_, t) in runs {
            line.push(',');
            line.push_str(&fmt_float(t[i].energy));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// One row of a temporal convergence table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub tau: f64,
    pub l2_rel_err: f64,
    pub linf_rel_err: f64,
    /// Previous row's error divided by this row's; `None` on the first row.
    pub l2_ratio: Option<f64>,
    pub linf_ratio: Option<f64>,
}

pub fn write_convergence_csv(mut w: impl Write, rows: &[ConvergenceRow]) -> Result<()> {
    writeln!(w, "{CONVERGENCE_HEADER}")?;
    let opt = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt_float(r.tau),
            fmt_float(r.l2_rel_err),
            opt(r.l2_ratio),
            fmt_float(r.linf_rel_err),
            opt(r.linf_ratio)
        )?;
    }
    Ok(())
}

/// Gray level of a sample: `round(255 clamp((u + 1) / 2, 0, 1))`.
pub fn gray_level(u: f64) -> u8 {
    (255.0 * ((u + 1.0) / 2.0).clamp(0.0, 1.0)).round() as u8
}

/// Binary PGM; the top image row is the largest `y`.
pub fn encode_pgm(field: &RealField) -> Vec<u8> {
    let m = field.grid().samples();
    let mut out = format!("P5\n{m} {m}\n255\n").into_bytes();
    for row in (0..m).rev() {
        out.extend(field.values()[row * m..(row + 1) * m].iter().map(|v| gray_level(*v)));
    }
    out
}

pub fn write_pgm_file(path: impl AsRef<Path>, field: &RealField) -> Result<()> {
    fs::write(path, encode_pgm(field))?;
    Ok(())
}
