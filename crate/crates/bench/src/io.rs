//! Matrix ingestion and export.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use spca::SymmetricMatrix;

use crate::error::{parse_err, BenchError, Result};

/// Inputs asymmetric by at most this much (relative) are symmetrized.
pub const LOAD_SYMMETRY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixFormat {
    MatrixMarket,
    Csv,
    /// A samples-by-features table turned into `XᵀX`.
    GramOfRows,
}

impl FromStr for MatrixFormat {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "matrix_market" | "matrix-market" | "mtx" => Ok(Self::MatrixMarket),
            "csv" => Ok(Self::Csv),
            "gram_of_rows" | "gram-of-rows" | "gram" => Ok(Self::GramOfRows),
            other => Err(BenchError::Config(format!(
                "unknown matrix format {other:?}"
            ))),
        }
    }
}

impl MatrixFormat {
    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "mtx" | "mm" => Some(Self::MatrixMarket),
            "csv" => Some(Self::Csv),
            _ => None,
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| BenchError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_matrix(path: &Path, format: MatrixFormat, center: bool) -> Result<SymmetricMatrix> {
    let text = read(path)?;
    match format {
        MatrixFormat::MatrixMarket => parse_matrix_market(&text),
        MatrixFormat::Csv => parse_csv_matrix(&text),
        MatrixFormat::GramOfRows => parse_gram_of_rows(&text, center),
    }
}

fn finish(m: DMatrix<f64>) -> Result<SymmetricMatrix> {
    Ok(SymmetricMatrix::with_tolerance(m, LOAD_SYMMETRY_TOL)?)
}

fn parse_number(tok: &str, line: usize) -> Result<f64> {
    let x: f64 = tok
        .trim()
        .parse()
        .map_err(|_| parse_err(line, format!("not a number: {tok:?}")))?;
    if !x.is_finite() {
        return Err(parse_err(line, format!("non-finite value {tok:?}")));
    }
    Ok(x)
}

/// Matrix Market `coordinate` or `array`, `general` or `symmetric`.
pub fn parse_matrix_market(text: &str) -> Result<SymmetricMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let fields: Vec<String> = header
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if fields.len() < 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(parse_err(1, "missing %%MatrixMarket matrix header"));
    }
    let coordinate = match fields[2].as_str() {
        "coordinate" => true,
        "array" => false,
        other => return Err(parse_err(1, format!("unsupported layout {other}"))),
    };
    let pattern = match fields[3].as_str() {
        "real" | "double" | "integer" => false,
        "pattern" if coordinate => true,
        other => return Err(parse_err(1, format!("unsupported field {other}"))),
    };
    let symmetric = match fields[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(parse_err(1, format!("unsupported symmetry {other}"))),
    };

    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (size_line, size) = body
        .next()
        .ok_or_else(|| parse_err(2, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| parse_err(size_line, format!("bad size {t:?}")))
        })
        .collect::<Result<_>>()?;
    let (rows, cols) = match dims.as_slice() {
        [r, c, ..] => (*r, *c),
        _ => return Err(parse_err(size_line, "size line needs rows and columns")),
    };
    if rows != cols {
        return Err(BenchError::Core(spca::Error::NotSquare { rows, cols }));
    }
    let d = rows;
    let mut m = DMatrix::zeros(d, d);

    if coordinate {
        let nnz = *dims
            .get(2)
            .ok_or_else(|| parse_err(size_line, "coordinate size line needs nnz"))?;
        let mut seen = 0;
        for (line, l) in body {
            let toks: Vec<&str> = l.split_whitespace().collect();
            let need = if pattern { 2 } else { 3 };
            if toks.len() < need {
                return Err(parse_err(line, "short entry line"));
            }
            let idx = |t: &str| -> Result<usize> {
                let i: usize = t
                    .parse()
                    .map_err(|_| parse_err(line, format!("bad index {t:?}")))?;
                if i == 0 || i > d {
                    return Err(parse_err(line, format!("index {i} outside 1..={d}")));
                }
                Ok(i - 1)
            };
            let (i, j) = (idx(toks[0])?, idx(toks[1])?);
            let x = if pattern {
                1.0
            } else {
                parse_number(toks[2], line)?
            };
            m[(i, j)] = x;
            if symmetric {
                m[(j, i)] = x;
            }
            seen += 1;
        }
        if seen != nnz {
            return Err(parse_err(
                size_line,
                format!("expected {nnz} entries, found {seen}"),
            ));
        }
    } else {
        let values: Vec<(usize, f64)> = body
            .flat_map(|(line, l)| {
                l.split_whitespace()
                    .map(move |t| (line, t))
                    .collect::<Vec<_>>()
            })
            .map(|(line, t)| Ok((line, parse_number(t, line)?)))
            .collect::<Result<_>>()?;
        let expected = if symmetric { d * (d + 1) / 2 } else { d * d };
        if values.len() != expected {
            return Err(parse_err(
                size_line,
                format!("expected {expected} values, found {}", values.len()),
            ));
        }
        let mut it = values.into_iter().map(|(_, x)| x);
        for j in 0..d {
            let start = if symmetric { j } else { 0 };
            for i in start..d {
                let x = it.next().expect("count checked");
                m[(i, j)] = x;
                if symmetric {
                    m[(j, i)] = x;
                }
            }
        }
    }
    finish(m)
}

fn csv_rows(text: &str) -> Result<Vec<(usize, Vec<String>)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(i + 1, |p| p.line() as usize);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        rows.push((line, rec.iter().map(str::to_owned).collect()));
    }
    Ok(rows)
}

fn numeric_table(rows: &[(usize, Vec<String>)]) -> Result<DMatrix<f64>> {
    let ncols = rows.first().map_or(0, |r| r.1.len());
    let mut data = Vec::with_capacity(rows.len() * ncols);
    for (line, r) in rows {
        if r.len() != ncols {
            return Err(parse_err(
                *line,
                format!("expected {ncols} fields, found {}", r.len()),
            ));
        }
        for t in r {
            data.push(parse_number(t, *line)?);
        }
    }
    Ok(DMatrix::from_row_slice(rows.len(), ncols, &data))
}

/// Headerless numeric CSV holding a square matrix.
pub fn parse_csv_matrix(text: &str) -> Result<SymmetricMatrix> {
    let rows = csv_rows(text)?;
    if rows.is_empty() {
        return Err(parse_err(1, "empty matrix"));
    }
    let m = numeric_table(&rows)?;
    if m.nrows() != m.ncols() {
        return Err(BenchError::Core(spca::Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        }));
    }
    finish(m)
}

/// Samples-by-features CSV, optionally with a header row, turned into the
/// Gram matrix `XᵀX` (after subtracting column means when `center` is set).
pub fn parse_gram_of_rows(text: &str, center: bool) -> Result<SymmetricMatrix> {
    let mut rows = csv_rows(text)?;
    if let Some((_, first)) = rows.first() {
        if first.iter().any(|t| t.parse::<f64>().is_err()) {
            rows.remove(0);
        }
    }
    if rows.is_empty() {
        return Err(parse_err(1, "no samples"));
    }
    let mut x = numeric_table(&rows)?;
    if center {
        for mut col in x.column_iter_mut() {
            let mean = col.mean();
            col.add_scalar_mut(-mean);
        }
    }
    Ok(SymmetricMatrix::gram(&x)?)
}

/// Writes `m` as a dense symmetric Matrix Market array.
pub fn matrix_market_string(m: &SymmetricMatrix) -> String {
    let d = m.dim();
    let mut out = String::from("%%MatrixMarket matrix array real symmetric\n");
    let _ = writeln!(out, "{d} {d}");
    for j in 0..d {
        for i in j..d {
            let _ = writeln!(out, "{}", m.get(i, j));
        }
    }
    out
}

pub fn write_matrix_market(path: &Path, m: &SymmetricMatrix) -> Result<()> {
    std::fs::write(path, matrix_market_string(m)).map_err(|source| BenchError::Io {
        path: path.display().to_string(),
        source,
    })
}
