//! Plain CSV persistence for data matrices: rows are variables, columns are
//! samples, header row optional.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use faer::Mat;

use crate::error::{Error, Result};

pub fn write_matrix_csv(path: &Path, m: &Mat<f64>) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                w.write_all(b",")?;
            }
            write!(w, "{:?}", m[(i, j)])?;
        }
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a numeric matrix. A non-numeric first row is treated as a header;
/// a non-numeric or ragged later row is a load error naming the row
/// (1-based, counting the header).
pub fn read_matrix_csv(path: &Path) -> Result<Mat<f64>> {
    let display = path.display().to_string();
    let file = File::open(path).map_err(|e| Error::CsvLoad {
        path: display.clone(),
        row: None,
        message: e.to_string(),
    })?;
    let reader = BufReader::new(file);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::CsvLoad {
            path: display.clone(),
            row: Some(idx + 1),
            message: e.to_string(),
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = trimmed
            .split(',')
            .map(|field| field.trim().parse::<f64>())
            .collect();
        match parsed {
            Ok(values) => {
                if let Some(w) = width {
                    if values.len() != w {
                        return Err(Error::CsvLoad {
                            path: display,
                            row: Some(idx + 1),
                            message: format!("ragged row: {} fields, expected {w}", values.len()),
                        });
                    }
                } else {
                    width = Some(values.len());
                }
                rows.push(values);
            }
            Err(e) => {
                if idx == 0 {
                    // header row
                    continue;
                }
                return Err(Error::CsvLoad {
                    path: display,
                    row: Some(idx + 1),
                    message: format!("unparseable field: {e}"),
                });
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::CsvLoad {
            path: display,
            row: None,
            message: "no data rows".into(),
        });
    }
    let (nr, nc) = (rows.len(), rows[0].len());
    Ok(Mat::<f64>::from_fn(nr, nc, |i, j| rows[i][j]))
}
