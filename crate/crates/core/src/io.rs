//! Plain-text and CSV formats for matrices, vectors, scenes, residual traces
//! and spectra.
//!
//! Matrix text: a header line `rows cols`, then one `re im` pair per line in
//! row-major order. Vector text: a header line with the length, then `re im`
//! lines. Blank lines and lines starting with `#` are ignored.

use std::io::{BufRead, Write};
use std::str::FromStr;

use num_complex::Complex;

use crate::admm::ResidualTrace;
use crate::error::{Error, Result};
use crate::numerics::{CVector, Matrix};
use crate::scalar::Real;
use crate::spectrum::SpectrumResult;

fn content_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    reader
        .lines()
        .enumerate()
        .map(|(i, l)| l.map(|l| (i + 1, l)).map_err(Error::from))
        .filter(|r| match r {
            Ok((_, l)) => {
                let t = l.trim();
                !t.is_empty() && !t.starts_with('#')
            }
            Err(_) => true,
        })
}

fn parse_field<V: FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<V> {
    tok.ok_or_else(|| Error::Parse(format!("line {line}: missing {what}")))?
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: bad {what}")))
}

fn parse_complex<T: Real>(line: usize, text: &str) -> Result<Complex<T>> {
    let mut it = text.split_whitespace();
    let re: f64 = parse_field(it.next(), line, "real part")?;
    let im: f64 = parse_field(it.next(), line, "imaginary part")?;
    if it.next().is_some() {
        return Err(Error::Parse(format!("line {line}: expected two numbers")));
    }
    Ok(Complex::new(T::lit(re), T::lit(im)))
}

fn read_entries<T: Real, R: BufRead>(reader: R, header_fields: usize) -> Result<(Vec<usize>, Vec<Complex<T>>)> {
    let mut lines = content_lines(reader);
    let (hl, header) = lines.next().ok_or_else(|| Error::Parse("empty input".into()))??;
    let mut toks = header.split_whitespace();
    let dims = (0..header_fields)
        .map(|_| parse_field::<usize>(toks.next(), hl, "dimension"))
        .collect::<Result<Vec<_>>>()?;
    if toks.next().is_some() {
        return Err(Error::Parse(format!("line {hl}: header has extra fields")));
    }
    let entries = lines
        .map(|l| l.and_then(|(n, text)| parse_complex(n, &text)))
        .collect::<Result<Vec<_>>>()?;
    let expected: usize = dims.iter().product();
    if entries.len() != expected {
        return Err(Error::Parse(format!("expected {expected} entries, found {}", entries.len())));
    }
    Ok((dims, entries))
}

pub fn read_matrix<T: Real, R: BufRead>(reader: R) -> Result<Matrix<T>> {
    let (dims, entries) = read_entries(reader, 2)?;
    Matrix::from_row_major(dims[0], dims[1], entries)
}

pub fn write_matrix<T: Real, W: Write>(mut w: W, m: &Matrix<T>) -> Result<()> {
    writeln!(w, "{} {}", m.rows(), m.cols())?;
    for v in m.as_slice() {
        writeln!(w, "{} {}", v.re, v.im)?;
    }
    Ok(())
}

pub fn read_vector<T: Real, R: BufRead>(reader: R) -> Result<CVector<T>> {
    Ok(read_entries(reader, 1)?.1)
}

pub fn write_vector<T: Real, W: Write>(mut w: W, v: &[Complex<T>]) -> Result<()> {
    writeln!(w, "{}", v.len())?;
    for x in v {
        writeln!(w, "{} {}", x.re, x.im)?;
    }
    Ok(())
}

/// CSV with header `iter,primal_z,primal_Y,objective`; `iter` counts from 1.
pub fn write_residuals_csv<T: Real, W: Write>(w: W, trace: &ResidualTrace<T>) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["iter", "primal_z", "primal_Y", "objective"])?;
    for i in 0..trace.len() {
        out.write_record([
            (i + 1).to_string(),
            trace.primal_z[i].to_string(),
            trace.primal_y[i].to_string(),
            trace.objective[i].to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// CSV with header `theta_deg,pseudospectrum`, one row per grid angle.
pub fn write_spectrum_csv<T: Real, W: Write>(w: W, spectrum: &SpectrumResult<T>) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["theta_deg", "pseudospectrum"])?;
    for (i, v) in spectrum.values.iter().enumerate() {
        out.write_record([spectrum.grid.angle(i).to_string(), v.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// Reads back a spectrum CSV as `(theta_deg, value)` pairs.
pub fn read_spectrum_csv<R: std::io::Read>(r: R) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::Reader::from_reader(r);
    rdr.deserialize::<(f64, f64)>().map(|row| row.map_err(Error::from)).collect()
}

pub fn to_json_pretty<V: serde::Serialize>(value: &V) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}
