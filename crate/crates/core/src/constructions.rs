//! Constructions linking orthogonal arrays, Hadamard matrices and
//! independent vector sets to sets of frequency rectangles.
//!
//! Every function here checks its own output with the verifiers in
//! [`crate::verify`] and returns [`Error::Unverified`] rather than an
//! unchecked object.

use crate::designs::{
    validate_oa, FrequencyRectangle, Grid, HadamardMatrix, OrthogonalArray, VectorSet,
};
use crate::error::{Error, Result};
use crate::hadamard::normalize;
use crate::verify::{first_non_orthogonal_pair, t_independence, t_orthogonality, OrthogonalityCheck};

/// Cell cap for constructed rectangles.
pub const MAX_CELLS: usize = 1 << 22;

fn ensure_mofr(set: Vec<FrequencyRectangle>) -> Result<Vec<FrequencyRectangle>> {
    if let Some((i, j, table)) = first_non_orthogonal_pair(&set)? {
        return Err(Error::Unverified(format!(
            "members {i} and {j} are not orthogonal, counts {:?}",
            table.as_rows()
        )));
    }
    Ok(set)
}

fn ensure_t_orthogonal(set: Vec<FrequencyRectangle>, t: usize) -> Result<Vec<FrequencyRectangle>> {
    let t = t.min(set.len());
    match t_orthogonality(&set, t)? {
        OrthogonalityCheck::Orthogonal => Ok(set),
        other => Err(Error::Unverified(format!("not {t}-orthogonal: {other:?}"))),
    }
}

fn require_binary(oa: &OrthogonalArray) -> Result<()> {
    if oa.q() != 2 {
        return Err(Error::domain(format!("needs a binary array, got q={}", oa.q())));
    }
    Ok(())
}

/// `[[B, B'], [B', B]]` per column, where `B` is the column reshaped to
/// `m x n` and `B'` its complement. Needs `runs = mn` and strength 2.
pub fn oa_to_mofr_double(oa: &OrthogonalArray, m: usize, n: usize) -> Result<Vec<FrequencyRectangle>> {
    require_binary(oa)?;
    if m.checked_mul(n) != Some(oa.runs()) {
        return Err(Error::shape(format!(
            "array has {} runs, {m}x{n} needs {}",
            oa.runs(),
            m.saturating_mul(n)
        )));
    }
    if oa.factors() > 1 && oa.strength() < 2 {
        return Err(Error::domain("needs strength at least 2"));
    }
    let mut set = Vec::with_capacity(oa.factors());
    for c in 0..oa.factors() {
        let b = Grid::new(m, n, oa.column(c))?;
        let bc = b.complement()?;
        let grid = Grid::blocks(&b, &bc, &bc, &b)?;
        set.push(FrequencyRectangle::new(grid, 2)?);
    }
    ensure_mofr(set)
}

/// Rectangle `i` has rows `(c_i, c_i')` for column `c_i` of the array.
pub fn oa_to_mofr2(oa: &OrthogonalArray) -> Result<Vec<FrequencyRectangle>> {
    require_binary(oa)?;
    if oa.factors() > 1 && oa.strength() < 2 {
        return Err(Error::domain("needs strength at least 2"));
    }
    let n = oa.runs();
    let mut set = Vec::with_capacity(oa.factors());
    for c in 0..oa.factors() {
        let col = Grid::new(1, n, oa.column(c))?;
        let grid = col.vconcat(&col.complement()?)?;
        set.push(FrequencyRectangle::new(grid, 2)?);
    }
    ensure_mofr(set)
}

/// Column `i` of the array is the first row of rectangle `i`.
pub fn mofr2_to_oa(set: &[FrequencyRectangle]) -> Result<OrthogonalArray> {
    let first = set.first().ok_or_else(|| Error::domain("empty rectangle set"))?;
    let (m, n, q) = first.params();
    if m != 2 || q != 2 {
        return Err(Error::domain(format!("needs FR(2, 2n; 2), got FR{:?}", first.params())));
    }
    if let Some((i, j, _)) = first_non_orthogonal_pair(set)? {
        return Err(Error::Precondition(format!("members {i} and {j} are not orthogonal")));
    }
    let k = set.len();
    let mut cells = Vec::with_capacity(n * k);
    for r in 0..n {
        cells.extend(set.iter().map(|f| f.get(0, r)));
    }
    validate_oa(Grid::new(n, k, cells)?, 2, k.min(2))
        .map_err(|e| Error::Unverified(e.to_string()))
}

/// `(4a-2)` rectangles `FR(4, 2a; 2)` from a Hadamard matrix of order `4a`.
///
/// The matrix is normalized with -1 mapped to 0, rows are stably sorted so
/// column 1 reads ones then zeros, and each of columns `2..4a` becomes
/// `[B; B']` with `B` the column reshaped to `2 x 2a`.
pub fn hadamard_to_mofr_4(h: &HadamardMatrix) -> Result<Vec<FrequencyRectangle>> {
    let n = h.order();
    if n < 4 || !n.is_multiple_of(4) {
        return Err(Error::domain(format!("order {n} is not a positive multiple of 4")));
    }
    let h = normalize(h);
    let mut rows: Vec<Vec<u8>> = (0..n)
        .map(|r| h.row(r).iter().map(|&x| u8::from(x == 1)).collect())
        .collect();
    rows.sort_by_key(|r| std::cmp::Reverse(r[1]));
    let a = n / 4;
    let mut set = Vec::with_capacity(n - 2);
    for c in 2..n {
        let col: Vec<u8> = rows.iter().map(|r| r[c]).collect();
        let b = Grid::new(2, 2 * a, col)?;
        let grid = b.vconcat(&b.complement()?)?;
        set.push(FrequencyRectangle::new(grid, 2)?);
    }
    ensure_mofr(set)
}

/// Square `F_v` per column `v`, with `F_v(r, i) = v[(r - i) mod N]`, so
/// column `i` is `v` rotated right `i` times. Output is checked at the
/// array's strength (capped at the number of columns).
pub fn oa_cyclic_to_mofr(oa: &OrthogonalArray) -> Result<Vec<FrequencyRectangle>> {
    require_binary(oa)?;
    let n = oa.runs();
    if n.checked_mul(n).is_none_or(|c| c > MAX_CELLS) {
        return Err(Error::domain(format!("{n}x{n} squares exceed the size cap")));
    }
    let mut set = Vec::with_capacity(oa.factors());
    for c in 0..oa.factors() {
        let v = oa.column(c);
        let mut cells = Vec::with_capacity(n * n);
        for r in 0..n {
            for i in 0..n {
                cells.push(v[(r + n - i) % n]);
            }
        }
        let grid = Grid::new(n, n, cells)?;
        let fr = FrequencyRectangle::new(grid, 2).map_err(|e| Error::Unverified(e.to_string()))?;
        set.push(fr);
    }
    ensure_t_orthogonal(set, oa.strength())
}

/// Column `i` is the row-major flattening of rectangle `i`.
pub fn mofr_to_oa(set: &[FrequencyRectangle], t: usize) -> Result<OrthogonalArray> {
    let check = t_orthogonality(set, t)?;
    if !check.holds() {
        return Err(Error::Precondition(format!("set is not {t}-orthogonal: {check:?}")));
    }
    let (m, n, q) = set[0].params();
    let k = set.len();
    let mut cells = Vec::with_capacity(m * n * k);
    for cell in 0..m * n {
        cells.extend(set.iter().map(|f| f.grid().cells()[cell]));
    }
    validate_oa(Grid::new(m * n, k, cells)?, q, t).map_err(|e| Error::Unverified(e.to_string()))
}

/// Base-q digits of `index`, most significant first.
fn digits(mut index: usize, q: usize, len: usize, out: &mut [u8]) {
    for d in out[..len].iter_mut().rev() {
        *d = (index % q) as u8;
        index /= q;
    }
}

/// One `q^M x q^N` rectangle per vector `v`, with cell `(r, c)` equal to
/// `sum v_i x_i` where `x` is the digits of `r` followed by those of `c`.
///
/// Needs a t-independent set whose vectors have a nonzero first-M part and
/// a nonzero last-N part.
pub fn vectors_to_mofr(s: &VectorSet, m: usize, n: usize, t: usize) -> Result<Vec<FrequencyRectangle>> {
    if s.is_empty() {
        return Err(Error::domain("empty vector set"));
    }
    if s.vector_len() != m + n {
        return Err(Error::shape(format!(
            "vectors have length {}, M + N = {}",
            s.vector_len(),
            m + n
        )));
    }
    let q = s.q() as usize;
    let rows = q.checked_pow(m as u32);
    let cols = q.checked_pow(n as u32);
    let (rows, cols) = match (rows, cols) {
        (Some(r), Some(c)) if r.checked_mul(c).is_some_and(|x| x <= MAX_CELLS) => (r, c),
        _ => return Err(Error::domain(format!("{q}^{} cells exceed the size cap", m + n))),
    };
    for (i, v) in s.vectors().iter().enumerate() {
        let name = VectorSet::to_digit_string(v);
        if v[..m].iter().all(|&x| x == 0) {
            return Err(Error::domain(format!("vector {i} ({name}) has a zero row part")));
        }
        if v[m..].iter().all(|&x| x == 0) {
            return Err(Error::domain(format!("vector {i} ({name}) has a zero column part")));
        }
    }
    if let crate::verify::IndependenceCheck::Dependent { subset, .. } = t_independence(s, t)? {
        return Err(Error::Precondition(format!("vectors {subset:?} are dependent")));
    }
    let field = s.field();
    let mut x = vec![0u8; m + n];
    let mut set = Vec::with_capacity(s.len());
    for v in s.vectors() {
        let mut cells = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            digits(r, q, m, &mut x[..m]);
            let row_part = v[..m]
                .iter()
                .zip(&x[..m])
                .fold(0, |acc, (&a, &b)| field.add(acc, field.mul(a, b)));
            for c in 0..cols {
                digits(c, q, n, &mut x[m..]);
                let val = v[m..]
                    .iter()
                    .zip(&x[m..])
                    .fold(row_part, |acc, (&a, &b)| field.add(acc, field.mul(a, b)));
                cells.push(val);
            }
        }
        let fr = FrequencyRectangle::new(Grid::new(rows, cols, cells)?, q)
            .map_err(|e| Error::Unverified(e.to_string()))?;
        set.push(fr);
    }
    ensure_t_orthogonal(set, t)
}

/// `v -> v ++ v ++ 0^(N-M)` for vectors of length `M <= N`.
pub fn pad_vectors(s: &VectorSet, n: usize) -> Result<VectorSet> {
    let m = s.vector_len();
    if n < m {
        return Err(Error::domain(format!("target length {n} is below vector length {m}")));
    }
    if let Some(i) = s.vectors().iter().position(|v| v.iter().all(|&x| x == 0)) {
        return Err(Error::domain(format!("vector {i} is zero")));
    }
    let vectors = s
        .vectors()
        .iter()
        .map(|v| {
            let mut w = Vec::with_capacity(m + n);
            w.extend_from_slice(v);
            w.extend_from_slice(v);
            w.resize(m + n, 0);
            w
        })
        .collect();
    VectorSet::new(s.field(), m + n, vectors)
}

/// All concatenations `u ++ v`, `u` from `s` in the outer loop. The output
/// is checked for 3-independence.
pub fn product_vectors(s: &VectorSet, t: &VectorSet) -> Result<VectorSet> {
    if s.field() != t.field() {
        return Err(Error::domain(format!(
            "fields differ: q={} and q={}",
            s.q(),
            t.q()
        )));
    }
    for (name, set) in [("first", s), ("second", t)] {
        if let crate::verify::IndependenceCheck::Dependent { subset, .. } =
            t_independence(set, 3)?
        {
            return Err(Error::domain(format!(
                "{name} set is not 3-independent: {subset:?}"
            )));
        }
    }
    let len = s.vector_len() + t.vector_len();
    let mut vectors = Vec::with_capacity(s.len() * t.len());
    for u in s.vectors() {
        for v in t.vectors() {
            let mut w = u.clone();
            w.extend_from_slice(v);
            vectors.push(w);
        }
    }
    let out = VectorSet::new(s.field(), len, vectors)?;
    if !t_independence(&out, 3)?.holds() {
        return Err(Error::Unverified("product set is not 3-independent".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::Field;

    #[test]
    fn single_vector_block_pattern() {
        let s = VectorSet::from_strs(Field::binary(), &["1010"]).unwrap();
        let set = vectors_to_mofr(&s, 2, 2, 1).unwrap();
        assert_eq!(
            set[0].grid(),
            &Grid::from_digit_rows(&["0011", "0011", "1100", "1100"]).unwrap()
        );
    }

    #[test]
    fn pad_example() {
        let s = VectorSet::from_strs(Field::binary(), &["100", "010", "001"]).unwrap();
        let p = pad_vectors(&s, 4).unwrap();
        let got: Vec<String> = p.vectors().iter().map(|v| VectorSet::to_digit_string(v)).collect();
        assert_eq!(got, ["1001000", "0100100", "0010010"]);
        assert!(pad_vectors(&s, 2).is_err());
    }

    #[test]
    fn zero_prefix_is_rejected() {
        let s = VectorSet::from_strs(Field::binary(), &["0011"]).unwrap();
        assert!(matches!(vectors_to_mofr(&s, 2, 2, 1), Err(Error::Domain(_))));
    }
}
