//! Reading and writing `x,theta` CSV datasets.

use std::io::{Read, Write};
use std::path::Path;

use crate::circular::Angle;
use crate::error::{Error, Result};
use crate::warp::Sample;

/// The exact header every dataset must start with.
pub const HEADER: [&str; 2] = ["x", "theta"];

/// Parses a dataset; responses are in radians and wrapped on load.
pub fn read_dataset<R: Read>(reader: R) -> Result<Sample> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = match records.next() {
        Some(rec) => rec.map_err(|e| csv_error(e, 1))?,
        None => {
            return Err(Error::InvalidInput(
                "dataset is empty (expected header `x,theta`)".into(),
            ))
        }
    };
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(Error::InvalidInput(format!(
            "line 1: expected header `x,theta`, got `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut xs = Vec::new();
    let mut thetas = Vec::new();
    for (i, rec) in records.enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| csv_error(e, line))?;
        let line = rec.position().map_or(line, |p| p.line() as usize);
        if rec.len() != 2 {
            return Err(Error::InvalidInput(format!(
                "line {line}: expected 2 fields, got {}",
                rec.len()
            )));
        }
        let x = parse_field(&rec[0], "x", line)?;
        let theta = parse_field(&rec[1], "theta", line)?;
        xs.push(x);
        thetas.push(Angle::new(theta)?);
    }
    if xs.is_empty() {
        return Err(Error::InvalidInput("dataset has a header but no observations".into()));
    }
    Sample::new(xs, thetas)
}

pub fn load_dataset(path: &Path) -> Result<Sample> {
    let file = std::fs::File::open(path)?;
    read_dataset(std::io::BufReader::new(file))
}

/// Writes the sample with shortest round-trip float formatting.
pub fn write_dataset<W: Write>(sample: &Sample, mut writer: W) -> Result<()> {
    writeln!(writer, "x,theta")?;
    for (x, theta) in sample.iter() {
        writeln!(writer, "{x},{}", theta.radians())?;
    }
    writer.flush()?;
    Ok(())
}

fn parse_field(raw: &str, name: &str, line: usize) -> Result<f64> {
    let value: f64 = raw
        .parse()
        .map_err(|_| Error::InvalidInput(format!("line {line}: cannot parse {name} value `{raw}`")))?;
    if !value.is_finite() {
        return Err(Error::InvalidInput(format!(
            "line {line}: {name} value `{raw}` is not finite"
        )));
    }
    Ok(value)
}

fn csv_error(err: csv::Error, line: usize) -> Error {
    match err.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io(e),
        other => Error::InvalidInput(format!("line {line}: malformed CSV ({other:?})")),
    }
}
