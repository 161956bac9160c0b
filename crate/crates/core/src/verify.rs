//! Orthogonality, independence and incidence-matrix checks.

use num_bigint::BigInt;
use serde::Serialize;

use crate::combin::Combinations;
use crate::designs::{FrequencyRectangle, Grid, PairCountTable, VectorSet};
use crate::error::{Error, Result};
use crate::gf::{FieldMatrix, IntMatrix};

/// Superimposition counts of two equally sized grids over `q` symbols.
pub fn pair_counts(a: &Grid, b: &Grid, q: usize) -> Result<PairCountTable> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::shape(format!(
            "cannot superimpose {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let mut counts = vec![0u64; q * q];
    for (&x, &y) in a.cells().iter().zip(b.cells()) {
        let (x, y) = (x as usize, y as usize);
        if x >= q || y >= q {
            return Err(Error::SymbolOutOfRange {
                value: x.max(y) as u64,
                q: q as u64,
            });
        }
        counts[x * q + y] += 1;
    }
    Ok(PairCountTable::new(q, counts))
}

fn same_type(set: &[FrequencyRectangle]) -> Result<(usize, usize, usize)> {
    let first = set
        .first()
        .ok_or_else(|| Error::domain("empty rectangle set"))?
        .params();
    if let Some((i, fr)) = set.iter().enumerate().find(|(_, f)| f.params() != first) {
        return Err(Error::shape(format!(
            "member {i} is FR{:?}, member 0 is FR{first:?}",
            fr.params()
        )));
    }
    Ok(first)
}

/// True when every ordered pair appears `mn/q^2` times.
pub fn is_orthogonal_pair(a: &FrequencyRectangle, b: &FrequencyRectangle) -> Result<bool> {
    if a.params() != b.params() {
        return Err(Error::shape(format!(
            "FR{:?} and FR{:?} differ in type",
            a.params(),
            b.params()
        )));
    }
    let (m, n, q) = a.params();
    if (m * n) % (q * q) != 0 {
        return Ok(false);
    }
    let table = pair_counts(a.grid(), b.grid(), q)?;
    Ok(table.is_constant((m * n / (q * q)) as u64))
}

/// Outcome of a t-orthogonality check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum OrthogonalityCheck {
    Orthogonal,
    /// `q^t` does not divide `mn`, so no tuple count can be uniform.
    Divisibility { cells: usize, q: usize, t: usize },
    /// First subset (lexicographic, 0-based) and first tuple (radix order)
    /// whose count is off.
    Unbalanced {
        subset: Vec<usize>,
        tuple: Vec<u8>,
        found: usize,
        expected: usize,
    },
}

impl OrthogonalityCheck {
    pub fn holds(&self) -> bool {
        matches!(self, OrthogonalityCheck::Orthogonal)
    }
}

/// Superimposes every t-subset of `set` and checks each tuple count.
///
/// Requires `1 <= t <= set.len()` and a common type.
pub fn t_orthogonality(set: &[FrequencyRectangle], t: usize) -> Result<OrthogonalityCheck> {
    let (m, n, q) = same_type(set)?;
    if t == 0 || t > set.len() {
        return Err(Error::domain(format!(
            "strength {t} needs 1 <= t <= {}",
            set.len()
        )));
    }
    let cells = m * n;
    let size = q
        .checked_pow(t as u32)
        .filter(|&s| s <= cells)
        .filter(|&s| cells % s == 0);
    let Some(size) = size else {
        return Ok(OrthogonalityCheck::Divisibility { cells, q, t });
    };
    let expected = cells / size;
    let mut counts = vec![0usize; size];
    for subset in Combinations::new(set.len(), t) {
        counts.iter_mut().for_each(|c| *c = 0);
        for cell in 0..cells {
            let idx = subset
                .iter()
                .fold(0, |acc, &s| acc * q + set[s].grid().cells()[cell] as usize);
            counts[idx] += 1;
        }
        if let Some(idx) = counts.iter().position(|&c| c != expected) {
            let mut tuple = vec![0u8; t];
            let mut rest = idx;
            for d in tuple.iter_mut().rev() {
                *d = (rest % q) as u8;
                rest /= q;
            }
            return Ok(OrthogonalityCheck::Unbalanced {
                subset,
                tuple,
                found: counts[idx],
                expected,
            });
        }
    }
    Ok(OrthogonalityCheck::Orthogonal)
}

pub fn is_t_orthogonal(set: &[FrequencyRectangle], t: usize) -> Result<bool> {
    Ok(t_orthogonality(set, t)?.holds())
}

/// First non-orthogonal pair in lexicographic order, with its counts.
pub fn first_non_orthogonal_pair(
    set: &[FrequencyRectangle],
) -> Result<Option<(usize, usize, PairCountTable)>> {
    let (_, _, q) = same_type(set)?;
    for pair in Combinations::new(set.len(), 2) {
        let (i, j) = (pair[0], pair[1]);
        if !is_orthogonal_pair(&set[i], &set[j])? {
            let table = pair_counts(set[i].grid(), set[j].grid(), q)?;
            return Ok(Some((i, j, table)));
        }
    }
    Ok(None)
}

pub fn is_mofr(set: &[FrequencyRectangle]) -> Result<bool> {
    Ok(first_non_orthogonal_pair(set)?.is_none())
}

/// Outcome of a t-independence check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum IndependenceCheck {
    Independent,
    /// A t-subset (0-based indices) of rank below t.
    Dependent { subset: Vec<usize>, rank: usize },
}

impl IndependenceCheck {
    pub fn holds(&self) -> bool {
        matches!(self, IndependenceCheck::Independent)
    }
}

/// Every t-subset must have rank t. Sets smaller than t pass vacuously.
pub fn t_independence(s: &VectorSet, t: usize) -> Result<IndependenceCheck> {
    if t == 0 {
        return Err(Error::domain("independence strength must be at least 1"));
    }
    for subset in Combinations::new(s.len(), t) {
        let rows: Vec<&[u8]> = subset.iter().map(|&i| s.get(i)).collect();
        let rank = FieldMatrix::from_rows(s.field(), &rows)?.rank();
        if rank < t {
            return Ok(IndependenceCheck::Dependent { subset, rank });
        }
    }
    Ok(IndependenceCheck::Independent)
}

pub fn is_t_independent(s: &VectorSet, t: usize) -> Result<bool> {
    Ok(t_independence(s, t)?.holds())
}

/// Largest possible size of a MOFR(m, n; q) set: `(m-1)(n-1)/(q-1)`.
pub fn mofr_upper_bound(m: usize, n: usize, q: usize) -> Result<u64> {
    if q < 2 || m == 0 || n == 0 {
        return Err(Error::domain(format!(
            "bound needs q >= 2 and m, n >= 1, got m={m} n={n} q={q}"
        )));
    }
    Ok(((m as u64 - 1) * (n as u64 - 1)) / (q as u64 - 1))
}

/// Incidence matrices of a rectangle set.
///
/// Block `H_a` is `mn x q` with rows in row-major cell order; entry
/// `((i,j), s)` is 1 iff rectangle `a` holds `s` at `(i,j)`. `M` is the
/// horizontal concatenation of the blocks.
#[derive(Debug, Clone)]
pub struct IncidenceBundle {
    pub blocks: Vec<IntMatrix>,
    pub matrix: IntMatrix,
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub q: usize,
}

pub fn build_incidence(set: &[FrequencyRectangle]) -> Result<IncidenceBundle> {
    let (m, n, q) = same_type(set)?;
    let k = set.len();
    let cells = m * n;
    let mut matrix = IntMatrix::zeros(cells, k * q);
    let mut blocks = Vec::with_capacity(k);
    for (a, fr) in set.iter().enumerate() {
        let mut h = IntMatrix::zeros(cells, q);
        for (cell, &s) in fr.grid().cells().iter().enumerate() {
            h.set(cell, s as usize, BigInt::from(1));
            matrix.set(cell, a * q + s as usize, BigInt::from(1));
        }
        blocks.push(h);
    }
    Ok(IncidenceBundle {
        blocks,
        matrix,
        k,
        m,
        n,
        q,
    })
}

impl IncidenceBundle {
    pub fn gram(&self) -> IntMatrix {
        self.matrix.gram()
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    /// `kq - k + 1`, the rank forced on an orthogonal set.
    pub fn expected_rank(&self) -> usize {
        self.k * self.q - self.k + 1
    }
}

/// Outcome of the Gram-block check on `M^T M`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum GramCheck {
    Holds { diagonal: u64, off_diagonal: u64 },
    NotOrthogonal { pair: (usize, usize) },
    /// `q^2` does not divide `mn`.
    Divisibility { cells: usize, q: usize },
    Mismatch {
        row: usize,
        col: usize,
        found: String,
        expected: u64,
    },
}

impl GramCheck {
    pub fn holds(&self) -> bool {
        matches!(self, GramCheck::Holds { .. })
    }
}

/// Checks `M^T M = blocks((mn/q) I on the diagonal, (mn/q^2) J elsewhere)`.
pub fn gram_check(set: &[FrequencyRectangle]) -> Result<GramCheck> {
    if let Some((i, j, _)) = first_non_orthogonal_pair(set)? {
        return Ok(GramCheck::NotOrthogonal { pair: (i, j) });
    }
    let bundle = build_incidence(set)?;
    let (cells, q) = (bundle.m * bundle.n, bundle.q);
    if cells % (q * q) != 0 {
        return Ok(GramCheck::Divisibility { cells, q });
    }
    let c = (cells / q) as u64;
    let d = (cells / (q * q)) as u64;
    let g = bundle.gram();
    for row in 0..g.rows() {
        for col in 0..g.cols() {
            let expected = match (row / q == col / q, row == col) {
                (true, true) => c,
                (true, false) => 0,
                (false, _) => d,
            };
            if *g.get(row, col) != BigInt::from(expected) {
                return Ok(GramCheck::Mismatch {
                    row,
                    col,
                    found: g.get(row, col).to_string(),
                    expected,
                });
            }
        }
    }
    Ok(GramCheck::Holds {
        diagonal: c,
        off_diagonal: d,
    })
}

pub fn verify_gram(set: &[FrequencyRectangle]) -> Result<bool> {
    Ok(gram_check(set)?.holds())
}

/// Geometric multiplicity of `e` as an eigenvalue of a square matrix.
pub fn eigen_multiplicity(matrix: &IntMatrix, e: i64) -> usize {
    matrix.cols() - matrix.shift_diagonal(&BigInt::from(e)).rank()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Eigenvalue {
    pub value: i64,
    pub claimed: usize,
    pub observed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpectrumReport {
    pub c: i64,
    pub d: i64,
    pub k: usize,
    pub q: usize,
    pub eigenvalues: Vec<Eigenvalue>,
    pub holds: bool,
}

/// Merges coincident values, adding their multiplicities; keeps first-seen order.
fn merge(claims: &[(i64, usize)]) -> Vec<(i64, usize)> {
    let mut out: Vec<(i64, usize)> = Vec::new();
    for &(v, mult) in claims {
        if mult == 0 {
            continue;
        }
        match out.iter_mut().find(|(w, _)| *w == v) {
            Some(slot) => slot.1 += mult,
            None => out.push((v, mult)),
        }
    }
    out
}

fn check_claims(matrix: &IntMatrix, claims: &[(i64, usize)]) -> (Vec<Eigenvalue>, bool) {
    let merged = merge(claims);
    let eigenvalues: Vec<Eigenvalue> = merged
        .iter()
        .map(|&(value, claimed)| Eigenvalue {
            value,
            claimed,
            observed: eigen_multiplicity(matrix, value),
        })
        .collect();
    let total: usize = eigenvalues.iter().map(|e| e.observed).sum();
    let holds = total == matrix.cols() && eigenvalues.iter().all(|e| e.claimed == e.observed);
    (eigenvalues, holds)
}

/// Confirms the eigenvalues of `M^T M`: `c + q(k-1)d` once, `c - qd`
/// with multiplicity `k-1` and `c` with multiplicity `k(q-1)`, where
/// `c = mn/q` and `d = mn/q^2`. Each multiplicity is the exact nullity
/// of `M^T M - eI`; since `M^T M` is symmetric, the observed
/// multiplicities must also sum to `kq`.
pub fn spectrum_report(set: &[FrequencyRectangle]) -> Result<SpectrumReport> {
    let bundle = build_incidence(set)?;
    let (k, q) = (bundle.k, bundle.q);
    let cells = bundle.m * bundle.n;
    let c = (cells / q) as i64;
    let d = (cells / (q * q)) as i64;
    let qi = q as i64;
    let ki = k as i64;
    let claims = [
        (c + qi * (ki - 1) * d, 1),
        (c - qi * d, k - 1),
        (c, k * (q - 1)),
    ];
    let (eigenvalues, holds) = check_claims(&bundle.gram(), &claims);
    Ok(SpectrumReport {
        c,
        d,
        k,
        q,
        eigenvalues,
        holds,
    })
}

pub fn verify_spectrum(set: &[FrequencyRectangle]) -> Result<bool> {
    if first_non_orthogonal_pair(set)?.is_some() {
        return Ok(false);
    }
    Ok(spectrum_report(set)?.holds)
}

/// Eigenvalues of `aI_q + bJ_q`: `a + bq` once and `a` with multiplicity `q-1`.
pub fn identity_plus_ones_spectrum(a: i64, b: i64, q: usize) -> (Vec<Eigenvalue>, bool) {
    let mut entries = Vec::with_capacity(q * q);
    for i in 0..q {
        for j in 0..q {
            entries.push(BigInt::from(b + if i == j { a } else { 0 }));
        }
    }
    let matrix = IntMatrix::new(q, q, entries).expect("square");
    check_claims(&matrix, &[(a + b * q as i64, 1), (a, q.saturating_sub(1))])
}
