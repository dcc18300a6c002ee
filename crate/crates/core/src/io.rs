//! CSV readers and writers: complex matrices (`a+bi` entries), sampled
//! kernel tables `(t, k)` and trajectories `(t, value...)`.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::SampledKernel;
use crate::linalg::CMatrix;
use crate::time_domain::Trajectory;

/// Parses `a`, `bi`, `a+bi`, `a-bi` (also with `j`), exponents allowed.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Config(format!("cannot parse complex number {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    let num = |x: &str| -> Result<f64> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse::<f64>().map_err(|_| bad()),
        }
    };
    let z = match t.strip_suffix(['i', 'j']) {
        None => Complex64::new(t.parse::<f64>().map_err(|_| bad())?, 0.0),
        Some(body) => {
            let bytes = body.as_bytes();
            let split = (1..bytes.len())
                .rev()
                .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
            match split {
                Some(k) => Complex64::new(body[..k].parse::<f64>().map_err(|_| bad())?, num(&body[k..])?),
                None => Complex64::new(0.0, num(body)?),
            }
        }
    };
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite)
    }
}

pub fn format_complex(z: Complex64) -> String {
    if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Headerless CSV of complex entries; the shape is inferred and rows must agree.
pub fn read_matrix_csv<R: Read>(reader: R) -> Result<CMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let row = rec.iter().map(parse_complex).collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Config(format!(
                    "matrix row {} has {} entries, expected {}",
                    rows.len() + 1,
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() || rows[0].is_empty() {
        return Err(Error::Config("empty matrix file".into()));
    }
    let (r, c) = (rows.len(), rows[0].len());
    Ok(CMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

pub fn read_matrix_file(path: &Path) -> Result<CMatrix> {
    read_matrix_csv(std::fs::File::open(path)?)
}

pub fn write_matrix_csv<W: Write>(m: &CMatrix, writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    for i in 0..m.nrows() {
        w.write_record((0..m.ncols()).map(|j| format_complex(m[(i, j)])))?;
    }
    w.flush()?;
    Ok(())
}

/// Two-column `(t, k)` table with a header row; `t` starts at 0 and increases.
pub fn read_kernel_csv<R: Read>(reader: R, tail_rate: f64) -> Result<SampledKernel> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != 2 {
            return Err(Error::Config(format!(
                "kernel table row {} has {} columns, expected 2",
                line + 2,
                rec.len()
            )));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::Config(format!("kernel table row {}: bad number {s:?}", line + 2)))
        };
        times.push(parse(&rec[0])?);
        values.push(parse(&rec[1])?);
    }
    SampledKernel::new(times, values, tail_rate)
}

pub fn read_kernel_file(path: &Path, tail_rate: f64) -> Result<SampledKernel> {
    read_kernel_csv(std::fs::File::open(path)?, tail_rate)
}

/// Header `t,<prefix>0,<prefix>1,...` (or `t,<prefix>` for scalar trajectories).
pub fn write_trajectory_csv<W: Write>(tr: &Trajectory, prefix: &str, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["t".to_string()];
    if tr.dim() == 1 {
        header.push(prefix.to_string());
    } else {
        header.extend((0..tr.dim()).map(|k| format!("{prefix}{k}")));
    }
    w.write_record(&header)?;
    for i in 0..tr.len() {
        let mut row = vec![format!("{}", tr.time(i))];
        row.extend(tr.sample(i).iter().map(|v| format!("{v:e}")));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a trajectory written by [`write_trajectory_csv`]; the grid must be uniform.
pub fn read_trajectory_csv<R: Read>(reader: R) -> Result<Trajectory> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let dim = rdr.headers()?.len().saturating_sub(1);
    if dim == 0 {
        return Err(Error::Config("trajectory table needs a t column and at least one value column".into()));
    }
    let mut times = Vec::new();
    let mut data = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let vals = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|_| Error::Config(format!("bad number {s:?} in trajectory table"))))
            .collect::<Result<Vec<_>>>()?;
        if vals.len() != dim + 1 {
            return Err(Error::Config("ragged trajectory table".into()));
        }
        times.push(vals[0]);
        data.extend_from_slice(&vals[1..]);
    }
    if times.len() < 2 {
        return Err(Error::Config("trajectory table needs at least two rows".into()));
    }
    let dt = times[1] - times[0];
    for (i, t) in times.iter().enumerate() {
        if (t - times[0] - i as f64 * dt).abs() > 1e-9 * dt.abs().max(1.0) {
            return Err(Error::Config(format!("trajectory grid is not uniform at row {}", i + 2)));
        }
    }
    Trajectory::from_data(times[0], dt, dim, data)
}

pub fn read_trajectory_file(path: &Path) -> Result<Trajectory> {
    read_trajectory_csv(std::fs::File::open(path)?)
}
