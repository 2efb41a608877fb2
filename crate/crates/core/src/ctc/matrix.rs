//! Dense row-major matrices and their TSV interchange format.
//!
//! ```text
//! 3\t4
//! 0.1\t0.2\t0.3\t0.4
//! ...
//! ```
//!
//! The header holds `rows` and `cols`; each following line is one row.
//! Values are written in Rust's shortest round-trip float format.

use std::fmt::Write as _;

use thiserror::Error;

use super::NUM_CLASSES;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("shape {rows}x{cols} does not match {len} values")]
    Shape { rows: usize, cols: usize, len: usize },
    #[error("expected {expected} columns, found {found}")]
    Columns { expected: usize, found: usize },
    #[error("matrix needs at least one row and one column")]
    Empty,
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, MatrixError> {
        if data.len() != rows * cols {
            return Err(MatrixError::Shape {
                rows,
                cols,
                len: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// `self * other`.
    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    /// `self^T * other`.
    pub fn t_matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "row counts differ");
        let mut out = Matrix::zeros(self.cols, other.cols);
        for r in 0..self.rows {
            for i in 0..self.cols {
                let a = self.get(r, i);
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(r, j);
                }
            }
        }
        out
    }

    fn check_finite(&self) -> Result<(), MatrixError> {
        match self.data.iter().position(|x| !x.is_finite()) {
            Some(i) => Err(MatrixError::NonFinite {
                row: i / self.cols,
                col: i % self.cols,
            }),
            None => Ok(()),
        }
    }

    pub fn to_tsv(&self) -> String {
        let mut out = format!("{}\t{}\n", self.rows, self.cols);
        for r in 0..self.rows {
            for (c, v) in self.row(r).iter().enumerate() {
                if c > 0 {
                    out.push('\t');
                }
                write!(out, "{v}").expect("write to String");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_tsv(source: &str) -> Result<Self, MatrixError> {
        let mut lines = source.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let parse_err = |line: usize, reason: String| MatrixError::Parse { line: line + 1, reason };
        let (hl, header) = lines.next().ok_or(MatrixError::Empty)?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|d| {
                d.parse()
                    .map_err(|e| parse_err(hl, format!("bad dimension `{d}`: {e}")))
            })
            .collect::<Result<_, _>>()?;
        let [rows, cols] = dims[..] else {
            return Err(parse_err(hl, "header must be `rows<TAB>cols`".into()));
        };
        let mut data = Vec::with_capacity(rows * cols);
        let mut seen = 0;
        for (ln, line) in lines {
            let row: Vec<f64> = line
                .split('\t')
                .map(|v| {
                    v.trim()
                        .parse()
                        .map_err(|e| parse_err(ln, format!("bad value `{v}`: {e}")))
                })
                .collect::<Result<_, _>>()?;
            if row.len() != cols {
                return Err(MatrixError::Columns {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend(row);
            seen += 1;
        }
        if seen != rows {
            return Err(MatrixError::Shape {
                rows,
                cols,
                len: data.len(),
            });
        }
        Matrix::from_vec(rows, cols, data)
    }
}

/// Frame-wise scores over `[blank, b, n, s]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogitMatrix(Matrix);

impl LogitMatrix {
    pub fn new(m: Matrix) -> Result<Self, MatrixError> {
        if m.rows() == 0 {
            return Err(MatrixError::Empty);
        }
        if m.cols() != NUM_CLASSES {
            return Err(MatrixError::Columns {
                expected: NUM_CLASSES,
                found: m.cols(),
            });
        }
        m.check_finite()?;
        Ok(LogitMatrix(m))
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn frames(&self) -> usize {
        self.0.rows()
    }
}

/// Frame-wise tagger input features, `frames x dims`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix(Matrix);

impl FeatureMatrix {
    pub fn new(m: Matrix) -> Result<Self, MatrixError> {
        if m.rows() == 0 || m.cols() == 0 {
            return Err(MatrixError::Empty);
        }
        m.check_finite()?;
        Ok(FeatureMatrix(m))
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn frames(&self) -> usize {
        self.0.rows()
    }

    pub fn dims(&self) -> usize {
        self.0.cols()
    }
}
