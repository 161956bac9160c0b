//! Core design objects and their validity checks.
//!
//! Symbols are always `0..q`; Hadamard entries live in their own `±1` type.
//! Every validated type is constructed through a check, so a
//! [`FrequencyRectangle`], [`OrthogonalArray`], [`HadamardMatrix`] or
//! [`VectorSet`] value is valid by construction.

use serde::Serialize;

use crate::combin::Combinations;
use crate::error::{Axis, Error, FrequencyViolation, OaViolation, Result};
use crate::gf::Field;

/// Largest symbol alphabet representable with `u8` cells.
pub const MAX_SYMBOLS: usize = 256;

/// Raw rectangular grid of symbols, row-major, indexed from 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Grid {
    rows: usize,
    cols: usize,
    cells: Vec<u8>,
}

impl Grid {
    pub fn new(rows: usize, cols: usize, cells: Vec<u8>) -> Result<Self> {
        if cells.len() != rows * cols {
            return Err(Error::shape(format!(
                "{} cells for a {rows}x{cols} grid",
                cells.len()
            )));
        }
        Ok(Grid { rows, cols, cells })
    }

    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut cells = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::shape(format!(
                    "row {i} has {} cells, expected {cols}",
                    r.len()
                )));
            }
            cells.extend_from_slice(r);
        }
        Grid::new(rows.len(), cols, cells)
    }

    /// Parses rows written as digit strings, e.g. `["0011", "1100"]`.
    pub fn from_digit_rows(rows: &[&str]) -> Result<Self> {
        let rows: Vec<Vec<u8>> = rows
            .iter()
            .map(|s| {
                s.chars()
                    .filter(|c| !c.is_whitespace())
                    .map(|c| {
                        c.to_digit(10)
                            .map(|d| d as u8)
                            .ok_or_else(|| Error::shape(format!("non-digit {c:?}")))
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        Grid::from_rows(&rows)
    }

    pub fn filled(rows: usize, cols: usize, value: u8) -> Self {
        Grid {
            rows,
            cols,
            cells: vec![value; rows * cols],
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.cells[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        self.cells[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.cells[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> impl Iterator<Item = u8> + '_ {
        (0..self.rows).map(move |r| self.get(r, c))
    }

    /// Cells in row-major order.
    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn row_vecs(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn max_symbol(&self) -> Option<u8> {
        self.cells.iter().copied().max()
    }

    /// Entrywise `x -> 1 - x`. Fails if any cell is not binary.
    pub fn complement(&self) -> Result<Grid> {
        if let Some(&bad) = self.cells.iter().find(|&&x| x > 1) {
            return Err(Error::domain(format!(
                "complement needs a binary grid, found symbol {bad}"
            )));
        }
        Ok(Grid {
            rows: self.rows,
            cols: self.cols,
            cells: self.cells.iter().map(|&x| 1 - x).collect(),
        })
    }

    /// Places `right` to the right of `self`.
    pub fn hconcat(&self, right: &Grid) -> Result<Grid> {
        if self.rows != right.rows {
            return Err(Error::shape("hconcat needs equal row counts"));
        }
        let mut rows = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            let mut row = self.row(r).to_vec();
            row.extend_from_slice(right.row(r));
            rows.push(row);
        }
        let cols = self.cols + right.cols;
        Grid::new(self.rows, cols, rows.concat())
    }

    /// Places `below` under `self`.
    pub fn vconcat(&self, below: &Grid) -> Result<Grid> {
        if self.cols != below.cols {
            return Err(Error::shape("vconcat needs equal column counts"));
        }
        let mut cells = self.cells.clone();
        cells.extend_from_slice(&below.cells);
        Grid::new(self.rows + below.rows, self.cols, cells)
    }

    /// `[[tl, tr], [bl, br]]`.
    pub fn blocks(tl: &Grid, tr: &Grid, bl: &Grid, br: &Grid) -> Result<Grid> {
        tl.hconcat(tr)?.vconcat(&bl.hconcat(br)?)
    }

    /// Row-major reshape.
    pub fn reshape(&self, rows: usize, cols: usize) -> Result<Grid> {
        Grid::new(rows, cols, self.cells.clone())
    }
}

/// An FR(m, n; q): every symbol appears n/q times per row and m/q times per
/// column.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FrequencyRectangle {
    q: usize,
    grid: Grid,
}

fn check_symbol_range(grid: &Grid, q: usize) -> Result<()> {
    if let Some(&bad) = grid.cells.iter().find(|&&x| x as usize >= q) {
        return Err(Error::SymbolOutOfRange {
            value: bad as u64,
            q: q as u64,
        });
    }
    Ok(())
}

/// First row or column of `grid` breaking the frequency condition.
pub fn frequency_violation(grid: &Grid, q: usize) -> Option<FrequencyViolation> {
    let (m, n) = (grid.rows, grid.cols);
    let mut counts = vec![0usize; q];
    let mut scan = |axis: Axis, lines: usize, len: usize, get: &dyn Fn(usize, usize) -> u8| {
        for line in 0..lines {
            counts.iter_mut().for_each(|c| *c = 0);
            for i in 0..len {
                counts[get(line, i) as usize] += 1;
            }
            let expected = len / q;
            if let Some((symbol, &found)) = counts.iter().enumerate().find(|(_, &c)| c != expected)
            {
                return Some(FrequencyViolation {
                    axis,
                    index: line,
                    symbol: symbol as u8,
                    found,
                    expected,
                });
            }
        }
        None
    };
    scan(Axis::Row, m, n, &|r, c| grid.get(r, c))
        .or_else(|| scan(Axis::Column, n, m, &|c, r| grid.get(r, c)))
}

/// Validates `grid` as an FR(m, n; q).
pub fn validate_fr(grid: Grid, q: usize) -> Result<FrequencyRectangle> {
    if q == 0 || q > MAX_SYMBOLS {
        return Err(Error::domain(format!("symbol count {q} out of range")));
    }
    let (m, n) = (grid.rows, grid.cols);
    if m == 0 || n == 0 || m % q != 0 || n % q != 0 {
        return Err(Error::shape(format!(
            "q = {q} must divide both dimensions of a {m}x{n} rectangle"
        )));
    }
    check_symbol_range(&grid, q)?;
    if let Some(v) = frequency_violation(&grid, q) {
        return Err(v.into());
    }
    Ok(FrequencyRectangle { q, grid })
}

impl FrequencyRectangle {
    pub fn new(grid: Grid, q: usize) -> Result<Self> {
        validate_fr(grid, q)
    }

    pub fn m(&self) -> usize {
        self.grid.rows
    }

    pub fn n(&self) -> usize {
        self.grid.cols
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// (m, n, q).
    pub fn params(&self) -> (usize, usize, usize) {
        (self.m(), self.n(), self.q)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.grid.get(r, c)
    }

    pub fn into_grid(self) -> Grid {
        self.grid
    }

    /// The binary complement, itself a frequency rectangle.
    pub fn complement(&self) -> Result<FrequencyRectangle> {
        if self.q != 2 {
            return Err(Error::domain(format!(
                "complement is defined for q = 2, not q = {}",
                self.q
            )));
        }
        Ok(FrequencyRectangle {
            q: 2,
            grid: self.grid.complement()?,
        })
    }
}

/// First t-subset of columns whose tuple counts are unbalanced.
pub fn oa_violation(grid: &Grid, q: usize, t: usize) -> Option<OaViolation> {
    let (runs, k) = (grid.rows, grid.cols);
    let cells = q.checked_pow(t as u32)?;
    let expected = runs / cells;
    let mut counts = vec![0usize; cells];
    for columns in Combinations::new(k, t) {
        counts.iter_mut().for_each(|c| *c = 0);
        for r in 0..runs {
            let idx = columns
                .iter()
                .fold(0usize, |acc, &c| acc * q + grid.get(r, c) as usize);
            counts[idx] += 1;
        }
        if let Some((idx, &found)) = counts.iter().enumerate().find(|(_, &c)| c != expected) {
            let mut tuple = vec![0u8; t];
            let mut rest = idx;
            for slot in tuple.iter_mut().rev() {
                *slot = (rest % q) as u8;
                rest /= q;
            }
            return Some(OaViolation {
                columns,
                tuple,
                found,
                expected,
            });
        }
    }
    None
}

/// An OA(N, k, q, t).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrthogonalArray {
    q: usize,
    strength: usize,
    grid: Grid,
}

/// Validates `grid` (N runs by k factors) as an orthogonal array of strength `t`.
pub fn validate_oa(grid: Grid, q: usize, t: usize) -> Result<OrthogonalArray> {
    if q == 0 || q > MAX_SYMBOLS {
        return Err(Error::domain(format!("symbol count {q} out of range")));
    }
    let (runs, k) = (grid.rows, grid.cols);
    if t > k {
        return Err(Error::domain(format!("strength {t} exceeds {k} factors")));
    }
    let cells = q
        .checked_pow(t as u32)
        .ok_or_else(|| Error::domain("q^t overflows"))?;
    if runs == 0 || runs % cells != 0 {
        return Err(Error::shape(format!(
            "q^t = {cells} does not divide {runs} runs"
        )));
    }
    check_symbol_range(&grid, q)?;
    if let Some(v) = oa_violation(&grid, q, t) {
        return Err(v.into());
    }
    Ok(OrthogonalArray {
        q,
        strength: t,
        grid,
    })
}

impl OrthogonalArray {
    pub fn new(grid: Grid, q: usize, t: usize) -> Result<Self> {
        validate_oa(grid, q, t)
    }

    pub fn runs(&self) -> usize {
        self.grid.rows
    }

    pub fn factors(&self) -> usize {
        self.grid.cols
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn strength(&self) -> usize {
        self.strength
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn column(&self, c: usize) -> Vec<u8> {
        self.grid.column(c).collect()
    }

    /// The same array declared at a lower strength.
    pub fn with_strength(&self, t: usize) -> Result<OrthogonalArray> {
        validate_oa(self.grid.clone(), self.q, t)
    }
}

/// A Hadamard matrix: ±1 entries with H H^T = n I.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HadamardMatrix {
    order: usize,
    entries: Vec<i8>,
}

/// Checks entries are ±1 and rows are pairwise orthogonal.
pub fn validate_hadamard(order: usize, entries: Vec<i8>) -> Result<HadamardMatrix> {
    if order == 0 || entries.len() != order * order {
        return Err(Error::shape(format!(
            "{} entries for a Hadamard matrix of order {order}",
            entries.len()
        )));
    }
    if let Some(&bad) = entries.iter().find(|&&x| x != 1 && x != -1) {
        return Err(Error::domain(format!("Hadamard entry {bad} is not ±1")));
    }
    let row = |i: usize| &entries[i * order..(i + 1) * order];
    for i in 0..order {
        for j in i + 1..order {
            let dot: i64 = row(i)
                .iter()
                .zip(row(j))
                .map(|(&a, &b)| (a * b) as i64)
                .sum();
            if dot != 0 {
                return Err(Error::NotHadamard(i, j, dot));
            }
        }
    }
    Ok(HadamardMatrix { order, entries })
}

impl HadamardMatrix {
    pub fn new(order: usize, entries: Vec<i8>) -> Result<Self> {
        validate_hadamard(order, entries)
    }

    pub fn from_rows<R: AsRef<[i8]>>(rows: &[R]) -> Result<Self> {
        let entries: Vec<i8> = rows.iter().flat_map(|r| r.as_ref().to_vec()).collect();
        if rows.iter().any(|r| r.as_ref().len() != rows.len()) {
            return Err(Error::shape("Hadamard matrix must be square"));
        }
        validate_hadamard(rows.len(), entries)
    }

    pub(crate) fn from_raw_unchecked(order: usize, entries: Vec<i8>) -> Self {
        HadamardMatrix { order, entries }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, r: usize, c: usize) -> i8 {
        self.entries[r * self.order + c]
    }

    pub fn row(&self, r: usize) -> &[i8] {
        &self.entries[r * self.order..(r + 1) * self.order]
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    pub fn is_normalized(&self) -> bool {
        (0..self.order).all(|i| self.get(0, i) == 1 && self.get(i, 0) == 1)
    }
}

/// Ordered list of distinct length-L vectors over a prime field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VectorSet {
    field: Field,
    len: usize,
    vectors: Vec<Vec<u8>>,
}

impl VectorSet {
    pub fn new(field: Field, len: usize, vectors: Vec<Vec<u8>>) -> Result<Self> {
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != len {
                return Err(Error::shape(format!(
                    "vector {i} has length {}, expected {len}",
                    v.len()
                )));
            }
            for &x in v {
                field.check(x)?;
            }
            if let Some(j) = vectors[..i].iter().position(|w| w == v) {
                return Err(Error::domain(format!("vectors {j} and {i} are equal")));
            }
        }
        Ok(VectorSet {
            field,
            len,
            vectors,
        })
    }

    /// Binary vectors from digit strings like `"1010"`.
    pub fn from_strs(field: Field, vectors: &[&str]) -> Result<Self> {
        let len = vectors.first().map_or(0, |s| s.len());
        let vs = vectors
            .iter()
            .map(|s| {
                s.chars()
                    .map(|c| {
                        c.to_digit(10)
                            .map(|d| d as u8)
                            .ok_or_else(|| Error::domain(format!("non-digit {c:?} in vector")))
                    })
                    .collect::<Result<Vec<u8>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        VectorSet::new(field, len, vs)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn q(&self) -> u8 {
        self.field.order()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Length of each vector.
    pub fn vector_len(&self) -> usize {
        self.len
    }

    pub fn vectors(&self) -> &[Vec<u8>] {
        &self.vectors
    }

    pub fn get(&self, i: usize) -> &[u8] {
        &self.vectors[i]
    }

    /// The first `k` vectors.
    pub fn truncate(&self, k: usize) -> VectorSet {
        VectorSet {
            field: self.field,
            len: self.len,
            vectors: self.vectors[..k.min(self.vectors.len())].to_vec(),
        }
    }

    pub fn to_digit_string(v: &[u8]) -> String {
        v.iter().map(|d| char::from(b'0' + d)).collect()
    }
}

/// q×q superimposition counts `|AB|_(x,y)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PairCountTable {
    q: usize,
    counts: Vec<u64>,
}

impl PairCountTable {
    pub(crate) fn new(q: usize, counts: Vec<u64>) -> Self {
        debug_assert_eq!(counts.len(), q * q);
        PairCountTable { q, counts }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Number of cells holding x in the first grid and y in the second.
    pub fn get(&self, x: usize, y: usize) -> u64 {
        self.counts[x * self.q + y]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn transpose(&self) -> PairCountTable {
        let q = self.q;
        let mut counts = vec![0; q * q];
        for x in 0..q {
            for y in 0..q {
                counts[y * q + x] = self.get(x, y);
            }
        }
        PairCountTable { q, counts }
    }

    /// True when every entry equals `value`.
    pub fn is_constant(&self, value: u64) -> bool {
        self.counts.iter().all(|&c| c == value)
    }

    pub fn as_rows(&self) -> Vec<Vec<u64>> {
        self.counts.chunks(self.q).map(<[u64]>::to_vec).collect()
    }
}
