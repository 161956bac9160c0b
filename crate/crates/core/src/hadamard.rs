//! Hadamard matrix generators and the derived two-level orthogonal arrays.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::Serialize;

use crate::designs::{validate_oa, Grid, HadamardMatrix, OrthogonalArray};
use crate::error::{Error, Result};
use crate::gf::{is_prime, Field};

/// Largest order `construct` will attempt.
pub const MAX_ORDER: usize = 4096;

/// Sylvester matrix of order `2^k`.
pub fn sylvester(k: u32) -> Result<HadamardMatrix> {
    let order = 1usize
        .checked_shl(k)
        .filter(|&n| n <= MAX_ORDER)
        .ok_or_else(|| Error::domain(format!("2^{k} exceeds the order cap {MAX_ORDER}")))?;
    let h2 = HadamardMatrix::from_raw_unchecked(2, vec![1, 1, 1, -1]);
    let mut h = HadamardMatrix::from_raw_unchecked(1, vec![1]);
    while h.order() < order {
        h = kronecker_raw(&h2, &h);
    }
    Ok(h)
}

/// Paley type I matrix of order `p + 1`, for a prime `p = 3 (mod 4)`.
///
/// `H = I + S` with `S = [[0, 1^T], [-1, Q]]` and `Q_ij = chi(j - i)`.
pub fn paley_i(p: u64) -> Result<HadamardMatrix> {
    if !is_prime(p) {
        return Err(Error::domain(format!("Paley construction needs a prime, got {p}")));
    }
    if p % 4 != 3 {
        return Err(Error::domain(format!("Paley type I needs p = 3 mod 4, got {p}")));
    }
    let order = p as usize + 1;
    if order > MAX_ORDER || p > u64::from(crate::gf::MAX_FIELD_ORDER) {
        return Err(Error::domain(format!("order {order} is beyond the supported range")));
    }
    let field = Field::new(p as u32)?;
    let mut residue = vec![false; p as usize];
    for x in 1..p as u8 {
        residue[field.mul(x, x) as usize] = true;
    }
    let chi = |x: usize| -> i8 {
        if x == 0 {
            0
        } else if residue[x] {
            1
        } else {
            -1
        }
    };
    let n = order;
    let mut e = vec![0i8; n * n];
    for j in 1..n {
        e[j] = 1;
        e[j * n] = -1;
    }
    for i in 1..n {
        for j in 1..n {
            let diff = (j + p as usize - i) % p as usize;
            e[i * n + j] = chi(diff);
        }
    }
    for i in 0..n {
        e[i * n + i] += 1;
    }
    HadamardMatrix::new(n, e)
}

fn kronecker_raw(a: &HadamardMatrix, b: &HadamardMatrix) -> HadamardMatrix {
    let (na, nb) = (a.order(), b.order());
    let n = na * nb;
    let mut e = vec![0i8; n * n];
    for i in 0..na {
        for j in 0..na {
            let s = a.get(i, j);
            for r in 0..nb {
                for c in 0..nb {
                    e[(i * nb + r) * n + j * nb + c] = s * b.get(r, c);
                }
            }
        }
    }
    HadamardMatrix::from_raw_unchecked(n, e)
}

/// `a (x) b`; entry `((i,r),(j,c))` is `a_ij * b_rc`.
pub fn kronecker(a: &HadamardMatrix, b: &HadamardMatrix) -> Result<HadamardMatrix> {
    let n = a.order() * b.order();
    if n > MAX_ORDER {
        return Err(Error::domain(format!("order {n} exceeds the cap {MAX_ORDER}")));
    }
    Ok(kronecker_raw(a, b))
}

/// Negates columns whose first entry is -1, then rows whose first entry is -1.
pub fn normalize(h: &HadamardMatrix) -> HadamardMatrix {
    let n = h.order();
    let mut e = h.entries().to_vec();
    for c in 0..n {
        if e[c] < 0 {
            for r in 0..n {
                e[r * n + c] = -e[r * n + c];
            }
        }
    }
    for r in 0..n {
        if e[r * n] < 0 {
            for c in 0..n {
                e[r * n + c] = -e[r * n + c];
            }
        }
    }
    HadamardMatrix::from_raw_unchecked(n, e)
}

/// OA(n, n-1, 2, 2): normalize, drop column 0, map +1 to 1 and -1 to 0.
pub fn hadamard_to_oa(h: &HadamardMatrix) -> Result<OrthogonalArray> {
    let n = h.order();
    if n < 4 || !n.is_multiple_of(4) {
        return Err(Error::domain(format!(
            "order {n} is not a positive multiple of 4"
        )));
    }
    let h = normalize(h);
    let mut cells = Vec::with_capacity(n * (n - 1));
    for r in 0..n {
        cells.extend(h.row(r)[1..].iter().map(|&x| u8::from(x == 1)));
    }
    validate_oa(Grid::new(n, n - 1, cells)?, 2, 2)
}

/// All `2^k` binary k-tuples in lexicographic order, strength `k`.
///
/// With `parity`, a column holding the XOR of each row is appended; the
/// result is then validated at strength `k`.
pub fn full_factorial_oa(k: usize, parity: bool) -> Result<OrthogonalArray> {
    if k == 0 || k > 20 {
        return Err(Error::domain(format!("factorial size {k} outside 1..=20")));
    }
    let runs = 1usize << k;
    let cols = k + usize::from(parity);
    let mut cells = Vec::with_capacity(runs * cols);
    for r in 0..runs {
        let mut xor = 0;
        for bit in (0..k).rev() {
            let b = ((r >> bit) & 1) as u8;
            xor ^= b;
            cells.push(b);
        }
        if parity {
            cells.push(xor);
        }
    }
    validate_oa(Grid::new(runs, cols, cells)?, 2, k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Auto,
    Sylvester,
    Paley,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Method::Auto),
            "sylvester" => Ok(Method::Sylvester),
            "paley" => Ok(Method::Paley),
            other => Err(Error::domain(format!("unknown Hadamard method {other:?}"))),
        }
    }
}

/// How a given order is reached.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Recipe {
    Sylvester(u32),
    Paley(u64),
    Product(usize, usize),
}

fn direct(order: usize) -> Option<Recipe> {
    if order.is_power_of_two() {
        return Some(Recipe::Sylvester(order.trailing_zeros()));
    }
    let p = order as u64 - 1;
    (p % 4 == 3 && is_prime(p) && p <= u64::from(crate::gf::MAX_FIELD_ORDER))
        .then_some(Recipe::Paley(p))
}

fn plan(order: usize, memo: &mut BTreeMap<usize, Option<Recipe>>) -> Option<Recipe> {
    if let Some(r) = memo.get(&order) {
        return r.clone();
    }
    let mut found = direct(order);
    if found.is_none() {
        let mut a = 2;
        while a * a <= order {
            if order.is_multiple_of(a) {
                let b = order / a;
                if plan(a, memo).is_some() && plan(b, memo).is_some() {
                    found = Some(Recipe::Product(a, b));
                    break;
                }
            }
            a += 1;
        }
    }
    memo.insert(order, found.clone());
    found
}

fn realize(order: usize, memo: &mut BTreeMap<usize, Option<Recipe>>) -> Result<HadamardMatrix> {
    match plan(order, memo) {
        Some(Recipe::Sylvester(k)) => sylvester(k),
        Some(Recipe::Paley(p)) => paley_i(p),
        Some(Recipe::Product(a, b)) => {
            let ha = realize(a, memo)?;
            let hb = realize(b, memo)?;
            kronecker(&ha, &hb)
        }
        None => Err(Error::domain(format!(
            "no construction available for Hadamard order {order}"
        ))),
    }
}

/// Builds a Hadamard matrix of the given order.
///
/// `Auto` tries Sylvester, then Paley type I, then Kronecker products of
/// orders reachable the same way.
pub fn construct(order: usize, method: Method) -> Result<HadamardMatrix> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::domain(format!("order {order} outside 1..={MAX_ORDER}")));
    }
    let h = match method {
        Method::Sylvester => {
            if !order.is_power_of_two() {
                return Err(Error::domain(format!("{order} is not a power of two")));
            }
            sylvester(order.trailing_zeros())?
        }
        Method::Paley => paley_i(order as u64 - 1)?,
        Method::Auto => realize(order, &mut BTreeMap::new())?,
    };
    HadamardMatrix::new(h.order(), h.entries().to_vec())
}
