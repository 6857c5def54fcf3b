//! Results CSV: one row per run record.

use std::io::{Read, Write};
use std::path::Path;

use crate::grid::RunRecord;

pub const RESULTS_HEADER: [&str; 8] = [
    "satellite",
    "profile",
    "inertia_mode",
    "estimator",
    "seed",
    "error",
    "cond_number",
    "wall_time_s",
];

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

pub(crate) fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

pub fn write_records<W: Write>(records: &[RunRecord], out: W) -> csv::Result<()> {
    let mut w = writer(out);
    w.write_record(RESULTS_HEADER)?;
    for r in records {
        w.write_record([
            r.satellite.clone(),
            r.profile.clone(),
            r.inertia_mode.clone(),
            r.estimator.clone(),
            r.seed.to_string(),
            opt(r.error),
            opt(r.cond_number),
            opt(r.wall_time),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_records_file(records: &[RunRecord], path: &Path) -> csv::Result<()> {
    let file = std::fs::File::create(path)?;
    write_records(records, std::io::BufWriter::new(file))
}

fn field(row: &csv::StringRecord, i: usize) -> &str {
    row.get(i).unwrap_or("")
}

fn parse_opt(row: &csv::StringRecord, i: usize, line: u64) -> csv::Result<Option<f64>> {
    let s = field(row, i).trim();
    if s.is_empty() {
        return Ok(None);
    }
    s.parse::<f64>().map(Some).map_err(|e| {
        csv::Error::from(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!("line {line}: column {}: {e}", RESULTS_HEADER[i]),
        ))
    })
}

pub fn read_records<R: Read>(input: R) -> csv::Result<Vec<RunRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().ne(RESULTS_HEADER.iter().copied()) {
        return Err(csv::Error::from(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            "unexpected results header",
        )));
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let seed = field(&row, 4).parse::<u64>().map_err(|e| {
            csv::Error::from(std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!("line {line}: seed: {e}"),
            ))
        })?;
        let error = parse_opt(&row, 5, line)?;
        out.push(RunRecord {
            satellite: field(&row, 0).into(),
            profile: field(&row, 1).into(),
            inertia_mode: field(&row, 2).into(),
            estimator: field(&row, 3).into(),
            seed,
            error,
            cond_number: parse_opt(&row, 6, line)?,
            wall_time: parse_opt(&row, 7, line)?,
            failure: error.is_none().then(|| "failed run".to_string()),
        });
    }
    Ok(out)
}

pub fn read_records_file(path: &Path) -> csv::Result<Vec<RunRecord>> {
    read_records(std::fs::File::open(path)?)
}
