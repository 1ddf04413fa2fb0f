//! Output sinks: CSV tables with the schema line, or pretty JSON.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use lorenz_acim::io::SCHEMA_LINE;
use lorenz_acim::scalar::format_rational;
use lorenz_acim::Scalar;
use serde::Serialize;

/// Standard output, or the file given by `--out`.
pub fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

/// Schema line, header, then one CSV record per row.
pub fn write_table(out: Option<&Path>, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = sink(out)?;
    writeln!(w, "{SCHEMA_LINE}")?;
    {
        let mut csv = csv::Writer::from_writer(&mut w);
        csv.write_record(header)?;
        for row in rows {
            csv.write_record(row)?;
        }
        csv.flush()?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<S: Serialize>(out: Option<&Path>, value: &S) -> Result<()> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Exact values as `p/q`, floats as shortest round-trip literals.
pub fn show<T: Scalar>(x: &T) -> String {
    match x.to_rational() {
        Some(r) => format_rational(&r),
        None => x.to_f64_lossy().to_string(),
    }
}
