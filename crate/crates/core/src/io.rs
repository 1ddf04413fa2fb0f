//! CSV exchange formats. Every file starts with a schema comment line.

use std::io::{BufRead, BufReader, Read, Write};

use crate::density::{StepDensity, UlamOperator};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const SCHEMA_LINE: &str = "# lorenz-acim v1";

/// Write a step density as `left_endpoint,right_endpoint,value` rows.
/// Numbers are written as shortest round-trip `f64` literals.
pub fn write_density_csv<T: Scalar, W: Write>(mut out: W, h: &StepDensity<T>) -> Result<()> {
    writeln!(out, "{SCHEMA_LINE}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["left_endpoint", "right_endpoint", "value"])?;
    for (lo, hi, v) in h.pieces() {
        w.write_record([
            lo.to_f64_lossy().to_string(),
            hi.to_f64_lossy().to_string(),
            v.to_f64_lossy().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Read a density written by [`write_density_csv`].
pub fn read_density_csv<R: Read>(input: R) -> Result<StepDensity<f64>> {
    let mut reader = BufReader::new(input);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    if first.trim_end() != SCHEMA_LINE {
        return Err(Error::Parse(format!(
            "expected schema line {SCHEMA_LINE:?}, got {:?}",
            first.trim_end()
        )));
    }
    let mut r = csv::Reader::from_reader(reader);
    let headers = r.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["left_endpoint", "right_endpoint", "value"] {
        return Err(Error::Parse(format!("unexpected header {headers:?}")));
    }
    let mut breakpoints = vec![0.0];
    let mut values = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record?;
        let field = |i: usize| -> Result<f64> {
            record
                .get(i)
                .ok_or_else(|| Error::Parse(format!("row {}: missing column {i}", line + 1)))?
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("row {}: {e}", line + 1)))
        };
        let (lo, hi, v) = (field(0)?, field(1)?, field(2)?);
        if lo != *breakpoints.last().expect("nonempty") {
            return Err(Error::Parse(format!(
                "row {}: pieces are not contiguous",
                line + 1
            )));
        }
        breakpoints.push(hi);
        values.push(v);
    }
    StepDensity::new(breakpoints, values)
}

/// Write an Ulam matrix as coordinate-list rows `row,col,value`.
pub fn write_ulam_coo<T: Scalar, W: Write>(mut out: W, u: &UlamOperator<T>) -> Result<()> {
    writeln!(out, "{SCHEMA_LINE}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["row", "col", "value"])?;
    for (i, j, v) in u.triplets() {
        w.write_record([i.to_string(), j.to_string(), v.to_f64_lossy().to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{markov_density, ulam_matrix};
    use crate::map::MapParams;
    use crate::scalar::Rational;

    #[test]
    fn density_round_trip() {
        let g = markov_density(&Rational::from_ratio(3, 2), 2).unwrap();
        let mut buf = Vec::new();
        write_density_csv(&mut buf, &g).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# lorenz-acim v1\nleft_endpoint,right_endpoint,value\n0,"));
        let back = read_density_csv(buf.as_slice()).unwrap();
        assert!((back.integral() - 1.0).abs() < 1e-12);
        assert_eq!(back.len(), g.len());
    }

    #[test]
    fn rejects_missing_schema() {
        let text = "left_endpoint,right_endpoint,value\n0,1,1\n";
        assert!(matches!(
            read_density_csv(text.as_bytes()),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn ulam_coo_rows() {
        let p = MapParams::new(2.0, 2.0, 0.5).unwrap();
        let u = ulam_matrix(&p, 2).unwrap();
        let mut buf = Vec::new();
        write_ulam_coo(&mut buf, &u).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "# lorenz-acim v1\nrow,col,value\n0,0,0.5\n0,1,0.5\n1,0,0.5\n1,1,0.5\n"
        );
    }
}
