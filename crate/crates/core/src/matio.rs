//! Test matrices, Householder reduction to Hessenberg form, Matrix Market
//! input and CSV output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ndarray::{s, Array1, Array2};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixSource {
    RandomGaussianHessenberg { n: usize, seed: u64 },
    IPlusJHessenberg { n: usize },
    MatrixMarketFile(PathBuf),
}

impl MatrixSource {
    /// Loads or generates the matrix, reduced to upper Hessenberg form.
    pub fn load(&self) -> Result<Array2<Complex64>, ParseError> {
        match self {
            MatrixSource::RandomGaussianHessenberg { n, seed } => Ok(gen_random_hessenberg(*n, *seed)),
            MatrixSource::IPlusJHessenberg { n } => Ok(gen_iplusj_hessenberg(*n)),
            MatrixSource::MatrixMarketFile(path) => {
                let m = parse_matrix_market(path)?;
                if m.nrows() != m.ncols() {
                    return Err(ParseError::NotSquare { rows: m.nrows(), cols: m.ncols() });
                }
                Ok(reduce_to_hessenberg(m))
            }
        }
    }
}

/// Dense `n x n` matrix of i.i.d. real standard normal entries.
pub fn gen_gaussian(n: usize, seed: u64) -> Array2<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Array2::from_shape_simple_fn((n, n), || {
        let x: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(x, 0.0)
    })
}

/// Hessenberg form of a Gaussian matrix; a pure function of `(n, seed)`.
pub fn gen_random_hessenberg(n: usize, seed: u64) -> Array2<Complex64> {
    reduce_to_hessenberg(gen_gaussian(n, seed))
}

/// `a_ij = i + j` (1-based) on and above the subdiagonal.
pub fn gen_iplusj_hessenberg(n: usize) -> Array2<Complex64> {
    Array2::from_shape_fn((n, n), |(i, j)| {
        if i <= j + 1 {
            Complex64::new((i + j + 2) as f64, 0.0)
        } else {
            ZERO
        }
    })
}

pub fn reduce_to_hessenberg(m: Array2<Complex64>) -> Array2<Complex64> {
    hessenberg_decomposition(m, false).0
}

/// Householder reduction `Q^H M Q = H`. `Q` is accumulated only on request.
pub fn hessenberg_decomposition(
    mut m: Array2<Complex64>,
    want_q: bool,
) -> (Array2<Complex64>, Option<Array2<Complex64>>) {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "hessenberg reduction needs a square matrix");
    let mut q = want_q.then(|| Array2::<Complex64>::eye(n));
    for k in 0..n.saturating_sub(2) {
        let x = m.slice(s![k + 1.., k]).to_owned();
        let Some((v, alpha)) = householder(&x) else { continue };

        // M <- H M on rows k+1.., H = I - 2 v v^H
        for j in k..n {
            let col = m.slice(s![k + 1.., j]);
            let w = v.iter().zip(col.iter()).map(|(vi, ci)| vi.conj() * ci).sum::<Complex64>() * 2.0;
            let mut col = m.slice_mut(s![k + 1.., j]);
            col.iter_mut().zip(v.iter()).for_each(|(c, vi)| *c -= w * vi);
        }
        // M <- M H on columns k+1..
        for mat in std::iter::once(&mut m).chain(q.as_mut()) {
            for i in 0..n {
                let row = mat.slice(s![i, k + 1..]);
                let w = row.iter().zip(v.iter()).map(|(ri, vi)| ri * vi).sum::<Complex64>() * 2.0;
                let mut row = mat.slice_mut(s![i, k + 1..]);
                row.iter_mut().zip(v.iter()).for_each(|(r, vi)| *r -= w * vi.conj());
            }
        }
        m[[k + 1, k]] = alpha;
        m.slice_mut(s![k + 2.., k]).fill(ZERO);
    }
    (m, q)
}

/// Unit `v` and `alpha` with `(I - 2 v v^H) x = alpha e_1`, or `None` when
/// `x` is already a multiple of `e_1`.
fn householder(x: &Array1<Complex64>) -> Option<(Array1<Complex64>, Complex64)> {
    let tail = x.iter().skip(1).map(|z| z.norm_sqr()).sum::<f64>();
    if tail == 0.0 {
        return None;
    }
    let norm = (x[0].norm_sqr() + tail).sqrt();
    let phase = if x[0] == ZERO { Complex64::new(1.0, 0.0) } else { x[0] / x[0].norm() };
    let alpha = -phase * norm;
    let mut v = x.clone();
    v[0] -= alpha;
    let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.mapv_inplace(|z| z / vn);
    Some((v, alpha))
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: malformed header: {reason}")]
    Header { line: usize, reason: String },
    #[error("line {line}: unsupported qualifier '{value}'")]
    Unsupported { line: usize, value: String },
    #[error("line {line}: malformed size line")]
    Size { line: usize },
    #[error("line {line}: malformed entry")]
    Entry { line: usize },
    #[error("line {line}: index ({row}, {col}) outside {rows}x{cols}")]
    IndexOutOfRange { line: usize, row: usize, col: usize, rows: usize, cols: usize },
    #[error("expected {expected} entries, found {found}")]
    EntryCount { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Complex,
    Integer,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    Hermitian,
    SkewSymmetric,
}

pub fn parse_matrix_market(path: impl AsRef<Path>) -> Result<Array2<Complex64>, ParseError> {
    parse_matrix_market_str(&fs::read_to_string(path)?)
}

pub fn parse_matrix_market_str(text: &str) -> Result<Array2<Complex64>, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (line, banner) = lines.next().ok_or(ParseError::Header { line: 1, reason: "empty input".into() })?;
    let header_err = |reason: &str| ParseError::Header { line, reason: reason.into() };
    let words: Vec<String> = banner.split_whitespace().map(str::to_ascii_lowercase).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" {
        return Err(header_err("expected '%%MatrixMarket matrix <format> <field> <symmetry>'"));
    }
    let unsupported = |value: &str| ParseError::Unsupported { line, value: value.into() };
    if words[1] != "matrix" {
        return Err(unsupported(&words[1]));
    }
    let layout = match words[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(unsupported(other)),
    };
    let field = match words[3].as_str() {
        "real" => Field::Real,
        "complex" => Field::Complex,
        "integer" => Field::Integer,
        "pattern" => Field::Pattern,
        other => return Err(unsupported(other)),
    };
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "hermitian" => Symmetry::Hermitian,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => return Err(unsupported(other)),
    };
    if (layout == Layout::Array && field == Field::Pattern)
        || (symmetry == Symmetry::Hermitian && field != Field::Complex)
    {
        return Err(header_err("incompatible qualifiers"));
    }

    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (size_line, size) = body.next().ok_or(ParseError::Size { line: line + 1 })?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|_| ParseError::Size { line: size_line })?;
    let (rows, cols, expected) = match (layout, dims.as_slice()) {
        (Layout::Coordinate, &[r, c, nnz]) => (r, c, nnz),
        (Layout::Array, &[r, c]) => (r, c, array_count(r, c, symmetry)),
        _ => return Err(ParseError::Size { line: size_line }),
    };
    if symmetry != Symmetry::General && rows != cols {
        return Err(ParseError::NotSquare { rows, cols });
    }

    let mut out = Array2::from_elem((rows, cols), ZERO);
    let mut slots = array_slots(rows, cols, symmetry);
    let mut found = 0;
    for (line, text) in body {
        found += 1;
        if found > expected {
            continue;
        }
        let mut parts = text.split_whitespace();
        let (i, j) = match layout {
            Layout::Coordinate => {
                let mut index = || -> Result<usize, ParseError> {
                    parts.next().and_then(|t| t.parse().ok()).ok_or(ParseError::Entry { line })
                };
                let (i, j) = (index()?, index()?);
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(ParseError::IndexOutOfRange { line, row: i, col: j, rows, cols });
                }
                (i - 1, j - 1)
            }
            Layout::Array => slots.next().expect("slot count matches expected entries"),
        };
        let value = read_value(&mut parts, field, line)?;
        if parts.next().is_some() {
            return Err(ParseError::Entry { line });
        }
        out[[i, j]] = value;
        if i != j {
            match symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => out[[j, i]] = value,
                Symmetry::Hermitian => out[[j, i]] = value.conj(),
                Symmetry::SkewSymmetric => out[[j, i]] = -value,
            }
        }
    }
    if found != expected {
        return Err(ParseError::EntryCount { expected, found });
    }
    Ok(out)
}

fn array_count(rows: usize, cols: usize, symmetry: Symmetry) -> usize {
    match symmetry {
        Symmetry::General => rows * cols,
        Symmetry::SkewSymmetric => rows * (rows.saturating_sub(1)) / 2,
        _ => rows * (rows + 1) / 2,
    }
}

/// Column-major storage order of an array-format body.
fn array_slots(rows: usize, cols: usize, symmetry: Symmetry) -> impl Iterator<Item = (usize, usize)> {
    (0..cols).flat_map(move |j| {
        let first = match symmetry {
            Symmetry::General => 0,
            Symmetry::SkewSymmetric => j + 1,
            _ => j,
        };
        (first..rows).map(move |i| (i, j))
    })
}

fn read_value<'a>(
    parts: &mut impl Iterator<Item = &'a str>,
    field: Field,
    line: usize,
) -> Result<Complex64, ParseError> {
    let mut real = || -> Result<f64, ParseError> {
        parts.next().and_then(|t| t.parse::<f64>().ok()).ok_or(ParseError::Entry { line })
    };
    Ok(match field {
        Field::Pattern => Complex64::new(1.0, 0.0),
        Field::Real => Complex64::new(real()?, 0.0),
        Field::Complex => {
            let re = real()?;
            Complex64::new(re, real()?)
        }
        Field::Integer => {
            let v = parts.next().and_then(|t| t.parse::<i64>().ok()).ok_or(ParseError::Entry { line })?;
            Complex64::new(v as f64, 0.0)
        }
    })
}

/// One line of benchmark output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub name: String,
    pub n: usize,
    pub algo: String,
    pub time_s: f64,
    pub bwe: f64,
    pub iters: f64,
    pub iters_per_n: f64,
    pub status: String,
}

pub const CSV_HEADER: &str = "name,n,algo,time_s,bwe,iters,iters_per_n,status";

pub fn write_csv<W: Write>(rows: &[CsvRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
