//! File formats: Matrix Market matrices (coordinate and array, general and
//! symmetric) and plain vector files with one number per line.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Parses a Matrix Market `real` matrix. Supports `coordinate` and `array`
/// storage with `general` or `symmetric` symmetry; `pattern` and `complex`
/// fields are rejected.
pub fn parse_matrix_market(text: &str) -> Result<DMatrix<f64>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty Matrix Market file".into()))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() < 4 || !tokens[0].eq_ignore_ascii_case("%%MatrixMarket") {
        return Err(Error::Parse("missing %%MatrixMarket header".into()));
    }
    if !tokens[1].eq_ignore_ascii_case("matrix") {
        return Err(Error::Parse(format!("unsupported object {}", tokens[1])));
    }
    let coordinate = match tokens[2].to_ascii_lowercase().as_str() {
        "coordinate" => true,
        "array" => false,
        other => return Err(Error::Parse(format!("unsupported format {other}"))),
    };
    let field = tokens[3].to_ascii_lowercase();
    if field != "real" && field != "integer" && field != "double" {
        return Err(Error::Parse(format!("unsupported field {field}")));
    }
    let symmetric = match tokens.get(4).map(|s| s.to_ascii_lowercase()) {
        None => false,
        Some(s) if s == "general" => false,
        Some(s) if s == "symmetric" => true,
        Some(s) => return Err(Error::Parse(format!("unsupported symmetry {s}"))),
    };

    let mut data = lines
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('%'));
    let size_line = data
        .next()
        .ok_or_else(|| Error::Parse("missing size line".into()))?;
    let dims: Vec<usize> = size_line
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad size entry {t}"))))
        .collect::<Result<_>>()?;

    if coordinate {
        let [nrows, ncols, nnz] = dims[..] else {
            return Err(Error::Parse("coordinate size line needs 3 entries".into()));
        };
        let mut mat = DMatrix::zeros(nrows, ncols);
        let mut count = 0;
        for line in data {
            let toks: Vec<&str> = line.split_whitespace().collect();
            let [i, j, v] = toks[..] else {
                return Err(Error::Parse(format!("bad coordinate entry: {line}")));
            };
            let i: usize = i
                .parse()
                .map_err(|_| Error::Parse(format!("bad row index {i}")))?;
            let j: usize = j
                .parse()
                .map_err(|_| Error::Parse(format!("bad column index {j}")))?;
            let v: f64 = v
                .parse()
                .map_err(|_| Error::Parse(format!("bad value {v}")))?;
            if i == 0 || j == 0 || i > nrows || j > ncols {
                return Err(Error::Parse(format!("entry ({i}, {j}) out of range")));
            }
            mat[(i - 1, j - 1)] = v;
            if symmetric {
                mat[(j - 1, i - 1)] = v;
            }
            count += 1;
        }
        if count != nnz {
            return Err(Error::Parse(format!(
                "size line promises {nnz} entries, found {count}"
            )));
        }
        Ok(mat)
    } else {
        let [nrows, ncols] = dims[..] else {
            return Err(Error::Parse("array size line needs 2 entries".into()));
        };
        let values: Vec<f64> = data
            .flat_map(|l| l.split_whitespace())
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad value {t}"))))
            .collect::<Result<_>>()?;
        if symmetric {
            // Column-major lower triangle including the diagonal.
            if nrows != ncols {
                return Err(Error::Parse("symmetric array matrix must be square".into()));
            }
            let expected = nrows * (nrows + 1) / 2;
            if values.len() != expected {
                return Err(Error::Parse(format!(
                    "expected {expected} entries, found {}",
                    values.len()
                )));
            }
            let mut mat = DMatrix::zeros(nrows, ncols);
            let mut it = values.into_iter();
            for j in 0..ncols {
                for i in j..nrows {
                    let v = it.next().unwrap();
                    mat[(i, j)] = v;
                    mat[(j, i)] = v;
                }
            }
            Ok(mat)
        } else {
            if values.len() != nrows * ncols {
                return Err(Error::Parse(format!(
                    "expected {} entries, found {}",
                    nrows * ncols,
                    values.len()
                )));
            }
            // Array storage is column-major.
            Ok(DMatrix::from_vec(nrows, ncols, values))
        }
    }
}

/// Writes a dense matrix in Matrix Market array/general format.
pub fn format_matrix_market(mat: &DMatrix<f64>) -> String {
    let mut out = String::from("%%MatrixMarket matrix array real general\n");
    out.push_str(&format!("{} {}\n", mat.nrows(), mat.ncols()));
    for j in 0..mat.ncols() {
        for i in 0..mat.nrows() {
            out.push_str(&format!("{:.17e}\n", mat[(i, j)]));
        }
    }
    out
}

pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    parse_matrix_market(&fs::read_to_string(path)?)
}

pub fn write_matrix(path: &Path, mat: &DMatrix<f64>) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(format_matrix_market(mat).as_bytes())?;
    Ok(())
}

/// Parses a vector file: one ASCII number per line, blank lines and
/// `#` comments ignored.
pub fn parse_vector(text: &str) -> Result<DVector<f64>> {
    let values: Vec<f64> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.parse().map_err(|_| Error::Parse(format!("bad value {l}"))))
        .collect::<Result<_>>()?;
    if values.is_empty() {
        return Err(Error::Parse("empty vector file".into()));
    }
    Ok(DVector::from_vec(values))
}

pub fn format_vector(v: &DVector<f64>) -> String {
    let mut out = String::new();
    for x in v.iter() {
        out.push_str(&format!("{x:.17e}\n"));
    }
    out
}

pub fn read_vector(path: &Path) -> Result<DVector<f64>> {
    parse_vector(&fs::read_to_string(path)?)
}

pub fn write_vector(path: &Path, v: &DVector<f64>) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(format_vector(v).as_bytes())?;
    Ok(())
}
