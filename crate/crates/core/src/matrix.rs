//! Exact dense matrices, the trusted arithmetic kernel.
//!
//! Everything here is exact: integer matrices carry arbitrary-precision
//! entries, rational matrices carry `BigRational`s, and the trit matrix is a
//! validated view over `{-1, 0, 1}`. Penrose equations (3) and (4) are tested
//! as plain symmetry because every matrix in scope is real.

use std::fmt;
use std::ops::{Add, Mul, Neg, Range, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::error::{shape_err, Error, Result};

/// Row-major dense matrix over an arbitrary entry type.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
}

pub type IntMatrix = Matrix<BigInt>;
pub type RatMatrix = Matrix<BigRational>;

impl<T> Matrix<T> {
    pub fn new(rows: usize, cols: usize, entries: Vec<T>) -> Result<Self> {
        if entries.len() != rows * cols {
            return shape_err(format!(
                "{} entries cannot fill a {}x{} matrix",
                entries.len(),
                rows,
                cols
            ));
        }
        Ok(Matrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        Matrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<T> {
        self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[T]> {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }
}

impl<T: Clone> Matrix<T> {
    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return shape_err(format!("row {} has {} entries, expected {}", i, r.len(), cols));
            }
            entries.extend_from_slice(r);
        }
        Matrix::new(rows.len(), cols, entries)
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    /// Contiguous submatrix.
    pub fn submatrix(&self, rows: Range<usize>, cols: Range<usize>) -> Self {
        let (r0, c0) = (rows.start, cols.start);
        Matrix::from_fn(rows.len(), cols.len(), |r, c| self.get(r0 + r, c0 + c).clone())
    }

    /// Submatrix picked out by arbitrary (ordered) row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Matrix::from_fn(rows.len(), cols.len(), |r, c| self.get(rows[r], cols[c]).clone())
    }
}

impl<T> Matrix<T>
where
    T: Clone + Zero + Add<Output = T>,
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    pub fn mul(&self, rhs: &Matrix<T>) -> Result<Matrix<T>> {
        if self.cols != rhs.rows {
            return shape_err(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            ));
        }
        let mut out = vec![T::zero(); self.rows * rhs.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let slot = &mut out[i * rhs.cols + j];
                    *slot = slot.clone() + a * rhs.get(k, j);
                }
            }
        }
        Matrix::new(self.rows, rhs.cols, out)
    }
}

impl<T: Zero + Clone> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }
}

impl<T: Zero + One + Clone> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |r, c| if r == c { T::one() } else { T::zero() })
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        Matrix::from_fn(rows, cols, |_, _| T::one())
    }
}

impl<T: PartialEq> Matrix<T> {
    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|r| (r + 1..self.cols).all(|c| self.get(r, c) == self.get(c, r)))
    }
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    /// Canonical text format: single spaces between entries, `\n` after
    /// every row, no trailing whitespace.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            for c in 0..self.cols {
                if c > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{}", self.entries[r * self.cols + c])?;
            }
            f.write_str("\n")?;
        }
        Ok(())
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.entries[r * self.cols + c])?;
            }
        }
        write!(f, "]")
    }
}

impl<T: fmt::Display> Serialize for Matrix<T> {
    /// Rows as JSON arrays; big entries are emitted as JSON numbers when
    /// they fit in an `i64`, otherwise as decimal strings.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.rows))?;
        for r in 0..self.rows {
            let row: Vec<serde_json::Value> = (0..self.cols)
                .map(|c| {
                    let text = self.entries[r * self.cols + c].to_string();
                    match text.parse::<i64>() {
                        Ok(v) => serde_json::Value::from(v),
                        Err(_) => serde_json::Value::from(text),
                    }
                })
                .collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

impl IntMatrix {
    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Result<Self> {
        Matrix::new(rows, cols, entries.iter().map(|&v| BigInt::from(v)).collect())
    }

    pub fn from_i64_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let big: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&v| BigInt::from(v)).collect())
            .collect();
        Matrix::from_rows(&big)
    }

    pub fn to_rational(&self) -> RatMatrix {
        self.map(|v| BigRational::from_integer(v.clone()))
    }

    pub fn sub(&self, rhs: &IntMatrix) -> Result<IntMatrix> {
        if self.shape() != rhs.shape() {
            return shape_err("subtraction of differently shaped matrices");
        }
        let entries = self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect();
        Matrix::new(self.rows, self.cols, entries)
    }

    /// Entry values as machine integers, when they all fit.
    pub fn to_i64_vec(&self) -> Option<Vec<i64>> {
        use num_traits::ToPrimitive;
        self.entries.iter().map(|v| v.to_i64()).collect()
    }
}

impl RatMatrix {
    pub fn from_ratios(rows: usize, cols: usize, entries: &[(i64, i64)]) -> Result<Self> {
        let mut out = Vec::with_capacity(entries.len());
        for &(n, d) in entries {
            if d == 0 {
                return Err(Error::Domain("zero denominator".into()));
            }
            out.push(BigRational::new(n.into(), d.into()));
        }
        Matrix::new(rows, cols, out)
    }

    /// Integer matrix when every entry has denominator one.
    pub fn to_integer(&self) -> Option<IntMatrix> {
        let entries: Option<Vec<BigInt>> = self
            .entries
            .iter()
            .map(|v| v.is_integer().then(|| v.to_integer()))
            .collect();
        entries.map(|e| Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: e,
        })
    }
}

/// Matrix with entries restricted to `{-1, 0, 1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TernaryMatrix(Matrix<i8>);

impl TernaryMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<i8>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return shape_err(format!("a ternary matrix needs positive dimensions, got {rows}x{cols}"));
        }
        if let Some(bad) = entries.iter().find(|&&t| !(-1..=1).contains(&t)) {
            return Err(Error::Domain(format!("entry {bad} is not in {{-1, 0, 1}}")));
        }
        Matrix::new(rows, cols, entries).map(TernaryMatrix)
    }

    pub fn from_rows<R: AsRef<[i8]>>(rows: &[R]) -> Result<Self> {
        let m = Matrix::from_rows(rows)?;
        TernaryMatrix::new(m.rows, m.cols, m.entries)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        TernaryMatrix(Matrix::from_fn(rows, cols, |_, _| 0))
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        TernaryMatrix(Matrix::from_fn(rows, cols, |_, _| 1))
    }

    pub fn identity(n: usize) -> Self {
        TernaryMatrix(Matrix::from_fn(n, n, |r, c| i8::from(r == c)))
    }

    /// Wraps a matrix already known to be ternary.
    pub(crate) fn from_matrix_unchecked(m: Matrix<i8>) -> Self {
        debug_assert!(m.entries.iter().all(|t| (-1..=1).contains(t)));
        TernaryMatrix(m)
    }

    pub fn from_int(m: &IntMatrix) -> Option<Self> {
        use num_traits::ToPrimitive;
        let entries: Option<Vec<i8>> = m
            .entries()
            .iter()
            .map(|v| v.to_i8().filter(|t| (-1..=1).contains(t)))
            .collect();
        TernaryMatrix::new(m.rows(), m.cols(), entries?).ok()
    }

    pub fn as_matrix(&self) -> &Matrix<i8> {
        &self.0
    }

    pub fn rows(&self) -> usize {
        self.0.rows
    }

    pub fn cols(&self) -> usize {
        self.0.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn get(&self, r: usize, c: usize) -> i8 {
        *self.0.get(r, c)
    }

    pub fn row(&self, r: usize) -> &[i8] {
        self.0.row(r)
    }

    pub fn column(&self, c: usize) -> Vec<i8> {
        self.0.column(c)
    }

    pub fn entries(&self) -> &[i8] {
        self.0.entries()
    }

    pub fn transpose(&self) -> Self {
        TernaryMatrix(self.0.transpose())
    }

    pub fn is_zero(&self) -> bool {
        self.0.entries.iter().all(|&t| t == 0)
    }

    pub fn is_zero_row(&self, r: usize) -> bool {
        self.row(r).iter().all(|&t| t == 0)
    }

    pub fn is_zero_col(&self, c: usize) -> bool {
        (0..self.rows()).all(|r| self.get(r, c) == 0)
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        TernaryMatrix(self.0.select(rows, cols))
    }

    pub fn to_int(&self) -> IntMatrix {
        self.0.map(|&t| BigInt::from(t))
    }

    pub fn to_i64_vec(&self) -> Vec<i64> {
        self.0.entries.iter().map(|&t| i64::from(t)).collect()
    }

    /// Stacks matrices with equal column counts on top of each other.
    pub fn vstack(blocks: &[TernaryMatrix]) -> Result<Self> {
        let Some(first) = blocks.first() else {
            return shape_err("cannot stack an empty list of blocks");
        };
        let cols = first.cols();
        let mut entries = Vec::new();
        let mut rows = 0;
        for b in blocks {
            if b.cols() != cols {
                return shape_err("stacked blocks must share a column count");
            }
            entries.extend_from_slice(b.entries());
            rows += b.rows();
        }
        TernaryMatrix::new(rows, cols, entries)
    }

    /// Block-diagonal matrix with the given diagonal blocks.
    pub fn block_diagonal(blocks: &[TernaryMatrix]) -> Result<Self> {
        if blocks.is_empty() {
            return shape_err("block diagonal of no blocks");
        }
        let rows: usize = blocks.iter().map(|b| b.rows()).sum();
        let cols: usize = blocks.iter().map(|b| b.cols()).sum();
        let mut out = vec![0i8; rows * cols];
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for r in 0..b.rows() {
                for c in 0..b.cols() {
                    out[(r0 + r) * cols + c0 + c] = b.get(r, c);
                }
            }
            r0 += b.rows();
            c0 += b.cols();
        }
        TernaryMatrix::new(rows, cols, out)
    }

    /// Canonical text serialization.
    pub fn to_text(&self) -> String {
        self.0.to_string()
    }
}

impl fmt::Display for TernaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::Debug for TernaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.0, f)
    }
}

impl Serialize for TernaryMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<&[i8]> = self.0.row_iter().collect();
        rows.serialize(s)
    }
}

impl FromStr for TernaryMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_matrix(s)
    }
}

/// Parses the matrix text format: one row per line, entries separated by
/// whitespace, each `-1`, `0` or `1`. Blank lines and `#` comment lines are
/// skipped.
pub fn parse_matrix(text: &str) -> Result<TernaryMatrix> {
    let mut rows: Vec<Vec<i8>> = Vec::new();
    let mut first_line = 0;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        for (column, token) in tokens(line) {
            let value: i64 = token.parse().map_err(|_| Error::Parse {
                line: line_no,
                column,
                message: format!("`{token}` is not an integer"),
            })?;
            if !(-1..=1).contains(&value) {
                return Err(Error::Parse {
                    line: line_no,
                    column,
                    message: format!("entry {value} is not in {{-1, 0, 1}}"),
                });
            }
            row.push(value as i8);
        }
        if let Some(prev) = rows.first() {
            if prev.len() != row.len() {
                return Err(Error::Parse {
                    line: line_no,
                    column: 1,
                    message: format!(
                        "row has {} entries but line {} has {}",
                        row.len(),
                        first_line,
                        prev.len()
                    ),
                });
            }
        } else {
            first_line = line_no;
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "no matrix rows found".into(),
        });
    }
    TernaryMatrix::from_rows(&rows)
}

/// Parses a stream of matrices separated by blank lines. Comment lines and
/// a trailing `count:` summary line are ignored.
pub fn parse_matrix_stream(text: &str) -> Result<Vec<TernaryMatrix>> {
    let mut out = Vec::new();
    let mut chunk = String::new();
    for line in text.lines().chain(std::iter::once("")) {
        let t = line.trim();
        if t.starts_with("count:") || t.starts_with('#') {
            continue;
        }
        if t.is_empty() {
            if !chunk.is_empty() {
                out.push(parse_matrix(&chunk)?);
                chunk.clear();
            }
        } else {
            chunk.push_str(line);
            chunk.push('\n');
        }
    }
    Ok(out)
}

/// Whitespace-separated tokens with their 1-based character column.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    for (col, (byte, ch)) in line.char_indices().enumerate() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some((byte, col + 1)),
            (true, Some((b, c))) => {
                out.push((c, &line[b..byte]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some((b, c)) = start {
        out.push((c, &line[b..]));
    }
    out.into_iter()
}

/// Contiguous block structure on the rows and columns of a matrix, given by
/// block widths. Zero widths are allowed and denote empty blocks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub struct BlockPartition {
    row_widths: Vec<usize>,
    col_widths: Vec<usize>,
}

impl BlockPartition {
    pub fn new(row_widths: Vec<usize>, col_widths: Vec<usize>) -> Result<Self> {
        if row_widths.is_empty() || col_widths.is_empty() {
            return shape_err("a partition needs at least one row block and one column block");
        }
        Ok(BlockPartition {
            row_widths,
            col_widths,
        })
    }

    /// Partition from strictly increasing interior cut points: rows
    /// `0..cuts[0]`, `cuts[0]..cuts[1]`, ... up to `rows`.
    pub fn from_cuts(rows: usize, row_cuts: &[usize], cols: usize, col_cuts: &[usize]) -> Result<Self> {
        Ok(BlockPartition {
            row_widths: widths_from_cuts(rows, row_cuts)?,
            col_widths: widths_from_cuts(cols, col_cuts)?,
        })
    }

    pub fn single(rows: usize, cols: usize) -> Self {
        BlockPartition {
            row_widths: vec![rows],
            col_widths: vec![cols],
        }
    }

    pub fn row_widths(&self) -> &[usize] {
        &self.row_widths
    }

    pub fn col_widths(&self) -> &[usize] {
        &self.col_widths
    }

    pub fn rows(&self) -> usize {
        self.row_widths.iter().sum()
    }

    pub fn cols(&self) -> usize {
        self.col_widths.iter().sum()
    }

    pub fn row_blocks(&self) -> usize {
        self.row_widths.len()
    }

    pub fn col_blocks(&self) -> usize {
        self.col_widths.len()
    }

    pub fn row_range(&self, j: usize) -> Range<usize> {
        let start: usize = self.row_widths[..j].iter().sum();
        start..start + self.row_widths[j]
    }

    pub fn col_range(&self, i: usize) -> Range<usize> {
        let start: usize = self.col_widths[..i].iter().sum();
        start..start + self.col_widths[i]
    }

    /// Number of cells in block `(row_block, col_block)`.
    pub fn block_size(&self, row_block: usize, col_block: usize) -> usize {
        self.row_widths[row_block] * self.col_widths[col_block]
    }

    pub fn check_shape(&self, rows: usize, cols: usize) -> Result<()> {
        if self.rows() != rows || self.cols() != cols {
            return shape_err(format!(
                "partition covers {}x{} but the matrix is {}x{}",
                self.rows(),
                self.cols(),
                rows,
                cols
            ));
        }
        Ok(())
    }
}

fn widths_from_cuts(total: usize, cuts: &[usize]) -> Result<Vec<usize>> {
    let mut widths = Vec::with_capacity(cuts.len() + 1);
    let mut prev = 0;
    for &c in cuts {
        if c <= prev || c >= total {
            return shape_err(format!("cut {c} is not strictly inside 0..{total} after {prev}"));
        }
        widths.push(c - prev);
        prev = c;
    }
    widths.push(total - prev);
    Ok(widths)
}

/// Which of the four Penrose equations `X` satisfies for `A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub struct PenroseReport {
    pub satisfies_1: bool,
    pub satisfies_2: bool,
    pub satisfies_3: bool,
    pub satisfies_4: bool,
}

impl PenroseReport {
    pub fn is_inner(&self) -> bool {
        self.satisfies_1
    }

    pub fn is_outer(&self) -> bool {
        self.satisfies_2
    }

    pub fn is_reflexive(&self) -> bool {
        self.satisfies_1 && self.satisfies_2
    }
}

fn penrose_generic<T>(a: &Matrix<T>, x: &Matrix<T>) -> Result<PenroseReport>
where
    T: Clone + Zero + Add<Output = T> + PartialEq,
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    if x.rows != a.cols || x.cols != a.rows {
        return shape_err(format!(
            "X must be {}x{} for a {}x{} matrix, got {}x{}",
            a.cols, a.rows, a.rows, a.cols, x.rows, x.cols
        ));
    }
    let ax = a.mul(x)?;
    let xa = x.mul(a)?;
    Ok(PenroseReport {
        satisfies_1: ax.mul(a)? == *a,
        satisfies_2: xa.mul(x)? == *x,
        satisfies_3: ax.is_symmetric(),
        satisfies_4: xa.is_symmetric(),
    })
}

/// Evaluates the four Penrose equations exactly.
pub fn penrose_check(a: &IntMatrix, x: &IntMatrix) -> Result<PenroseReport> {
    penrose_generic(a, x)
}

/// Penrose equations for a rational candidate `X`.
pub fn penrose_check_rational(a: &IntMatrix, x: &RatMatrix) -> Result<PenroseReport> {
    penrose_generic(&a.to_rational(), x)
}

/// Rank over the rationals via fraction-free (Bareiss) elimination.
pub fn exact_rank(a: &IntMatrix) -> usize {
    let (rows, cols) = a.shape();
    let mut m: Vec<Vec<BigInt>> = (0..rows).map(|r| a.row(r).to_vec()).collect();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        for r in rank + 1..rows {
            for c in col + 1..cols {
                let num = &m[r][c] * &m[rank][col] - &m[r][col] * &m[rank][c];
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                m[r][c] = q;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
    }
    rank
}

pub fn ternary_rank(a: &TernaryMatrix) -> usize {
    exact_rank(&a.to_int())
}

/// Sum of all entries.
pub fn entry_sum<T: Clone + Zero + Add<Output = T>>(a: &Matrix<T>) -> T {
    a.entries.iter().cloned().fold(T::zero(), |acc, v| acc + v)
}

/// Entry sums of every block; result is indexed `[row_block][col_block]`.
pub fn block_sums<T: Clone + Zero + Add<Output = T>>(
    x: &Matrix<T>,
    part: &BlockPartition,
) -> Result<Vec<Vec<T>>> {
    part.check_shape(x.rows, x.cols)?;
    let mut out = vec![vec![T::zero(); part.col_blocks()]; part.row_blocks()];
    let row_of: Vec<usize> = (0..part.row_blocks())
        .flat_map(|j| std::iter::repeat_n(j, part.row_widths[j]))
        .collect();
    let col_of: Vec<usize> = (0..part.col_blocks())
        .flat_map(|i| std::iter::repeat_n(i, part.col_widths[i]))
        .collect();
    for r in 0..x.rows {
        for c in 0..x.cols {
            let slot = &mut out[row_of[r]][col_of[c]];
            *slot = slot.clone() + x.get(r, c).clone();
        }
    }
    Ok(out)
}

/// A signed permutation matrix: row `i` holds `signs[i]` in column
/// `perm[i]` and zeros elsewhere.
#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub struct SignedPermutation {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl SignedPermutation {
    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        let k = perm.len();
        if signs.len() != k {
            return shape_err("permutation and sign vector lengths differ");
        }
        let mut seen = vec![false; k];
        for &p in &perm {
            if p >= k || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Domain(format!("{perm:?} is not a permutation")));
            }
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Domain("signs must be +1 or -1".into()));
        }
        Ok(SignedPermutation { perm, signs })
    }

    pub fn identity(k: usize) -> Self {
        SignedPermutation {
            perm: (0..k).collect(),
            signs: vec![1; k],
        }
    }

    pub fn diagonal(signs: Vec<i8>) -> Result<Self> {
        SignedPermutation::new((0..signs.len()).collect(), signs)
    }

    pub fn permutation(perm: Vec<usize>) -> Result<Self> {
        let k = perm.len();
        SignedPermutation::new(perm, vec![1; k])
    }

    /// All `k! * 2^k` signed permutations of size `k`, in a fixed order.
    pub fn all(k: usize) -> Vec<SignedPermutation> {
        let mut perms = Vec::new();
        permutations(&mut (0..k).collect::<Vec<_>>(), 0, &mut perms);
        let mut out = Vec::with_capacity(perms.len() << k);
        for p in perms {
            for mask in 0..(1u32 << k) {
                let signs = (0..k).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
                out.push(SignedPermutation {
                    perm: p.clone(),
                    signs,
                });
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn to_matrix(&self) -> IntMatrix {
        Matrix::from_fn(self.len(), self.len(), |r, c| {
            if self.perm[r] == c {
                BigInt::from(self.signs[r])
            } else {
                BigInt::zero()
            }
        })
    }

    /// Transpose, which is also the inverse.
    pub fn transpose(&self) -> Self {
        let mut perm = vec![0; self.len()];
        let mut signs = vec![1; self.len()];
        for i in 0..self.len() {
            perm[self.perm[i]] = i;
            signs[self.perm[i]] = self.signs[i];
        }
        SignedPermutation { perm, signs }
    }

    /// `self * other`.
    pub fn compose(&self, other: &SignedPermutation) -> Result<Self> {
        if self.len() != other.len() {
            return shape_err("composing signed permutations of different sizes");
        }
        let perm = self.perm.iter().map(|&p| other.perm[p]).collect();
        let signs = (0..self.len())
            .map(|i| self.signs[i] * other.signs[self.perm[i]])
            .collect();
        Ok(SignedPermutation { perm, signs })
    }

    /// `S * M`.
    pub fn apply_left<T: Clone + Neg<Output = T>>(&self, m: &Matrix<T>) -> Result<Matrix<T>> {
        if m.rows != self.len() {
            return shape_err(format!("{0}x{0} signed permutation times {1}x{2}", self.len(), m.rows, m.cols));
        }
        Ok(Matrix::from_fn(m.rows, m.cols, |r, c| {
            signed(self.signs[r], m.get(self.perm[r], c))
        }))
    }

    /// `M * S`.
    pub fn apply_right<T: Clone + Neg<Output = T>>(&self, m: &Matrix<T>) -> Result<Matrix<T>> {
        if m.cols != self.len() {
            return shape_err(format!("{}x{} times {2}x{2} signed permutation", m.rows, m.cols, self.len()));
        }
        let inv = self.transpose();
        Ok(Matrix::from_fn(m.rows, m.cols, |r, c| {
            // (M S)[r][c] = M[r][i] * s_i where perm[i] = c
            signed(inv.signs[c], m.get(r, inv.perm[c]))
        }))
    }

    /// `U * A * V` for a ternary `A`; the result stays ternary.
    pub fn sandwich(u: &SignedPermutation, a: &TernaryMatrix, v: &SignedPermutation) -> Result<TernaryMatrix> {
        let ua = u.apply_left(a.as_matrix())?;
        Ok(TernaryMatrix::from_matrix_unchecked(v.apply_right(&ua)?))
    }
}

fn signed<T: Clone + Neg<Output = T>>(s: i8, v: &T) -> T {
    if s < 0 {
        -v.clone()
    } else {
        v.clone()
    }
}

fn permutations(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, out);
        items.swap(k, i);
    }
}

/// Maps a generalized inverse of `A` to the corresponding one of `U A V`,
/// i.e. returns `V^T X U^T`. Penrose equations (1) and (2) are preserved.
pub fn transform_inverse<T: Clone + Neg<Output = T>>(
    x: &Matrix<T>,
    u: &SignedPermutation,
    v: &SignedPermutation,
) -> Result<Matrix<T>> {
    if x.rows != v.len() || x.cols != u.len() {
        return shape_err(format!(
            "X is {}x{} but U is {}x{} and V is {}x{}",
            x.rows,
            x.cols,
            u.len(),
            u.len(),
            v.len(),
            v.len()
        ));
    }
    let left = v.transpose().apply_left(x)?;
    u.transpose().apply_right(&left)
}

impl<T> Sub for &Matrix<T>
where
    for<'a> &'a T: Sub<&'a T, Output = T>,
{
    type Output = Matrix<T>;

    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in subtraction");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64_rows(rows).unwrap()
    }

    fn tern(rows: &[&[i8]]) -> TernaryMatrix {
        TernaryMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(exact_rank(&int(&[&[1, 1], &[1, 1]])), 1);
        assert_eq!(exact_rank(&int(&[&[1, 1, 0], &[1, 0, 0]])), 2);
        assert_eq!(exact_rank(&IntMatrix::zeros(2, 3)), 0);
        assert_eq!(exact_rank(&int(&[&[0, 0, 1], &[0, 2, 1], &[0, 4, 3]])), 2);
        assert_eq!(exact_rank(&int(&[&[2, 4, 1], &[1, 2, 3], &[3, 6, 4]])), 2);
        assert_eq!(exact_rank(&IntMatrix::identity(4)), 4);
    }

    #[test]
    fn entry_sum_examples() {
        assert_eq!(entry_sum(&int(&[&[1, -1], &[1, 0]])), BigInt::from(1));
        assert_eq!(entry_sum(&IntMatrix::ones(2, 3)), BigInt::from(6));
        assert_eq!(entry_sum(&int(&[&[1, -1], &[-1, 1]])), BigInt::from(0));
    }

    #[test]
    fn block_sum_examples() {
        let x = int(&[&[1, 0], &[0, 1]]);
        let part = BlockPartition::from_cuts(2, &[1], 2, &[1]).unwrap();
        let s = block_sums(&x, &part).unwrap();
        assert_eq!(s, vec![vec![BigInt::from(1), BigInt::from(0)], vec![BigInt::from(0), BigInt::from(1)]]);

        let x = int(&[&[1, -1, 0]]);
        let part = BlockPartition::from_cuts(1, &[], 3, &[2]).unwrap();
        assert_eq!(block_sums(&x, &part).unwrap(), vec![vec![BigInt::from(0), BigInt::from(0)]]);

        let x = int(&[&[1, 1], &[1, -1]]);
        assert_eq!(
            block_sums(&x, &BlockPartition::single(2, 2)).unwrap(),
            vec![vec![BigInt::from(2)]]
        );
    }

    #[test]
    fn block_sums_reject_wrong_partition() {
        let x = int(&[&[1, 1], &[1, -1]]);
        assert!(matches!(
            block_sums(&x, &BlockPartition::single(3, 2)),
            Err(Error::Shape(_))
        ));
        assert!(BlockPartition::from_cuts(2, &[2], 2, &[]).is_err());
        assert!(BlockPartition::from_cuts(3, &[2, 1], 2, &[]).is_err());
    }

    #[test]
    fn penrose_examples() {
        let r = penrose_check(&int(&[&[1]]), &int(&[&[1]])).unwrap();
        assert!(r.satisfies_1 && r.satisfies_2 && r.satisfies_3 && r.satisfies_4);

        let e11 = int(&[&[1, 0], &[0, 0]]);
        let r = penrose_check(&IntMatrix::ones(2, 2), &e11).unwrap();
        assert_eq!(
            r,
            PenroseReport {
                satisfies_1: true,
                satisfies_2: true,
                satisfies_3: false,
                satisfies_4: false
            }
        );

        let r = penrose_check(&IntMatrix::zeros(2, 2), &e11).unwrap();
        assert_eq!(
            r,
            PenroseReport {
                satisfies_1: true,
                satisfies_2: false,
                satisfies_3: true,
                satisfies_4: true
            }
        );
    }

    #[test]
    fn penrose_shape_mismatch() {
        assert!(matches!(
            penrose_check(&IntMatrix::ones(2, 3), &IntMatrix::ones(2, 3)),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn transform_examples() {
        let x = int(&[&[1], &[0]]);
        let id1 = SignedPermutation::identity(1);
        let id2 = SignedPermutation::identity(2);
        assert_eq!(transform_inverse(&x, &id1, &id2).unwrap(), x);

        // A = [1, -1], V = diag(1, -1) gives UAV = [1, 1].
        let a = tern(&[&[1, -1]]);
        let v = SignedPermutation::diagonal(vec![1, -1]).unwrap();
        let uav = SignedPermutation::sandwich(&id1, &a, &v).unwrap();
        assert_eq!(uav, tern(&[&[1, 1]]));
        let y = transform_inverse(&x, &id1, &v).unwrap();
        assert_eq!(y, int(&[&[1], &[0]]));
        assert!(penrose_check(&uav.to_int(), &y).unwrap().satisfies_1);

        let neg = SignedPermutation::diagonal(vec![-1]).unwrap();
        let one = int(&[&[1]]);
        assert_eq!(transform_inverse(&one, &neg, &id1).unwrap(), int(&[&[-1]]));
    }

    #[test]
    fn signed_permutation_matches_matrix_product() {
        let a = int(&[&[1, 2, 3], &[4, 5, 6]]);
        for u in SignedPermutation::all(2) {
            assert_eq!(u.apply_left(&a).unwrap(), u.to_matrix().mul(&a).unwrap());
        }
        for v in SignedPermutation::all(3) {
            assert_eq!(v.apply_right(&a).unwrap(), a.mul(&v.to_matrix()).unwrap());
            assert_eq!(v.transpose().to_matrix(), v.to_matrix().transpose());
        }
        assert_eq!(SignedPermutation::all(3).len(), 48);
    }

    #[test]
    fn compose_matches_product() {
        let all = SignedPermutation::all(3);
        for a in all.iter().step_by(7) {
            for b in all.iter().step_by(5) {
                let ab = a.compose(b).unwrap();
                assert_eq!(ab.to_matrix(), a.to_matrix().mul(&b.to_matrix()).unwrap());
            }
        }
    }

    #[test]
    fn text_format() {
        let m: TernaryMatrix = "# comment\n1 -1  0\n\n0 0 1\n".parse().unwrap();
        assert_eq!(m, tern(&[&[1, -1, 0], &[0, 0, 1]]));
        assert_eq!(m.to_text(), "1 -1 0\n0 0 1\n");

        match parse_matrix("1 0\n1 2\n") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("unexpected {other:?}"),
        }
        match parse_matrix("1 0\n1 x\n") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_matrix("1 0\n1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_matrix("# nothing\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn stream_parsing() {
        let text = "1 0\n0 1\n\n-1 0\n0 0\n\ncount: 2\n";
        let ms = parse_matrix_stream(text).unwrap();
        assert_eq!(ms.len(), 2);
        assert_eq!(ms[1], tern(&[&[-1, 0], &[0, 0]]));
    }

    #[test]
    fn ternary_validation() {
        assert!(TernaryMatrix::new(1, 2, vec![1, 2]).is_err());
        assert!(TernaryMatrix::new(1, 2, vec![1]).is_err());
        assert!(TernaryMatrix::new(0, 2, vec![]).is_err());
        assert!(TernaryMatrix::from_int(&int(&[&[1, 2]])).is_none());
    }

    #[test]
    fn rational_penrose() {
        let a = int(&[&[2]]);
        let x = RatMatrix::from_ratios(1, 1, &[(1, 2)]).unwrap();
        let r = penrose_check_rational(&a, &x).unwrap();
        assert!(r.is_reflexive() && r.satisfies_3 && r.satisfies_4);
    }
}
