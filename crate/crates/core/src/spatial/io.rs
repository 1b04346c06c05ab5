//! Grid-density ingestion and coefficient export.

use std::io::{Read, Write};
use std::path::Path;

use super::{BasisSet, GridDensity, SearchSpace};
use crate::error::{Error, Result};
use crate::metric::CoefficientVector;
use crate::scalar::Scalar;

/// Reads a row-major matrix of non-negative numbers (no header). Row 0 maps
/// to the `y = 0` edge of the search space.
pub fn read_csv_matrix<R: Read>(reader: R) -> Result<(usize, usize, Vec<f64>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut cols = None;
    let mut rows = 0;
    let mut values = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let n = rec.len();
        match cols {
            None => cols = Some(n),
            Some(c) if c != n => {
                return Err(Error::Parse(format!("row {rows} has {n} columns, expected {c}")));
            }
            _ => {}
        }
        for f in rec.iter() {
            values.push(f.parse::<f64>().map_err(|e| Error::Parse(format!("row {rows}: `{f}`: {e}")))?);
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| Error::Parse("empty matrix".into()))?;
    Ok((rows, cols, values))
}

/// Reads a portable graymap (P2 or P5). Row 0 maps to the `y = 0` edge.
pub fn read_pgm(path: &Path) -> Result<(usize, usize, Vec<f64>)> {
    let img = image::ImageReader::open(path)?
        .with_guessed_format()?
        .decode()
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
        .to_luma16();
    let (w, h) = img.dimensions();
    let values = img.pixels().map(|p| f64::from(p.0[0])).collect();
    Ok((h as usize, w as usize, values))
}

/// Loads a 2-D grid density from a `.pgm` or `.csv` file.
pub fn load_grid_density<T: Scalar>(path: &Path, space: &SearchSpace<T>) -> Result<GridDensity<T>> {
    if space.dims() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: space.dims() });
    }
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
    let (rows, cols, values) = match ext.as_str() {
        "pgm" | "pnm" => read_pgm(path)?,
        "csv" | "txt" => read_csv_matrix(std::fs::File::open(path)?)?,
        other => return Err(Error::Parse(format!("unsupported grid density format `{other}`"))),
    };
    GridDensity::new(space, vec![cols, rows], values.into_iter().map(T::lit).collect())
}

/// Reads `(x, y)` rows; a non-numeric first row is treated as a header.
pub fn read_points_csv<R: Read>(reader: R) -> Result<Vec<[f64; 2]>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() < 2 {
            return Err(Error::Parse(format!("row {i}: expected two columns")));
        }
        match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
            (Ok(x), Ok(y)) => out.push([x, y]),
            _ if i == 0 => continue,
            _ => return Err(Error::Parse(format!("row {i}: non-numeric point"))),
        }
    }
    Ok(out)
}

/// Writes `k_1, …, k_d, h, lambda, value` rows.
pub fn write_coefficients_csv<T: Scalar, W: Write>(
    basis: &BasisSet<T>,
    coeffs: &CoefficientVector<T>,
    writer: W,
) -> Result<()> {
    if coeffs.len() != basis.len() {
        return Err(Error::DimensionMismatch { expected: basis.len(), got: coeffs.len() });
    }
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (1..=basis.dims()).map(|i| format!("k{i}")).collect();
    header.extend(["h".into(), "lambda".into(), "value".into()]);
    w.write_record(&header)?;
    for (m, k) in basis.indices().iter().enumerate() {
        let mut row: Vec<String> = k.0.iter().map(|v| v.to_string()).collect();
        row.push(format!("{:e}", basis.normalizers()[m]));
        row.push(format!("{:e}", basis.weights()[m]));
        row.push(format!("{:e}", coeffs.values()[m]));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
