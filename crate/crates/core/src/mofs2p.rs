//! `p - 1` binary mutually orthogonal frequency squares of order `2p`,
//! for an odd prime `p`.
//!
//! Notation: `Omega = {1, .., p-1}`, `K = {1, .., (p-1)/2}`. `v` is the
//! length-p vector with ones at `0..=(p-1)/2`; `v_i` is `v` rotated right
//! `i` times. `A_a` has row `i` equal to `v_(a*i mod p)`.
//!
//! Each square is
//!
//! ```text
//! F_a = [ A*_a   ~A_a          ]
//!       [ ~A_a   A'_(rho^-1 a) ]
//! ```
//!
//! where `A*` and `A'` are `A` with selected 2x2 sub-arrays complemented
//! and `rho` is a permutation of `Omega`.

use serde::Serialize;

use crate::designs::{FrequencyRectangle, Grid};
use crate::error::{Error, Result};
use crate::gf::is_prime;
use crate::verify::pair_counts;

/// Largest prime accepted; pairwise verification is quartic in `p`.
pub const MAX_P: usize = 101;

fn check_p(p: usize) -> Result<()> {
    if p < 3 || p.is_multiple_of(2) || !is_prime(p as u64) {
        return Err(Error::domain(format!("{p} is not an odd prime")));
    }
    if p > MAX_P {
        return Err(Error::domain(format!("p = {p} exceeds the cap {MAX_P}")));
    }
    Ok(())
}

fn check_omega(p: usize, z: usize) -> Result<()> {
    if z == 0 || z >= p {
        return Err(Error::domain(format!("{z} is outside 1..={}", p - 1)));
    }
    Ok(())
}

fn check_k(p: usize, h: usize) -> Result<()> {
    if h == 0 || h > (p - 1) / 2 {
        return Err(Error::domain(format!("{h} is outside 1..={}", (p - 1) / 2)));
    }
    Ok(())
}

/// `v`: ones at positions `0..=(p-1)/2`, weight `(p+1)/2`.
pub fn base_vector(p: usize) -> Result<Vec<u8>> {
    check_p(p)?;
    Ok((0..p).map(|c| u8::from(c <= (p - 1) / 2)).collect())
}

/// `v` rotated right `j` times: `out[c] = v[(c - j) mod len]`.
pub fn shift(v: &[u8], j: usize) -> Vec<u8> {
    let n = v.len();
    if n == 0 {
        return Vec::new();
    }
    (0..n).map(|c| v[(c + n - j % n) % n]).collect()
}

/// `v_i`.
pub fn shift_vector(p: usize, i: usize) -> Result<Vec<u8>> {
    Ok(shift(&base_vector(p)?, i))
}

/// `A_alpha`: row `i` is `v_(alpha*i mod p)`.
pub fn build_a(p: usize, alpha: usize) -> Result<Grid> {
    check_p(p)?;
    check_omega(p, alpha)?;
    let v = base_vector(p)?;
    let mut cells = Vec::with_capacity(p * p);
    for i in 0..p {
        cells.extend(shift(&v, alpha * i % p));
    }
    Grid::new(p, p, cells)
}

/// Entry `(i, j)` of `A_alpha` by the interval rule on `j - r`, with
/// `r = alpha*i mod p`. Independent of [`build_a`].
pub fn closed_form_entry(p: usize, alpha: usize, i: usize, j: usize) -> u8 {
    let p = p as i64;
    let r = (alpha as i64 * i as i64) % p;
    let d = j as i64 - r;
    let zero = ((1 - p) / 2..=-1).contains(&d) || ((p + 1) / 2..=p - 1).contains(&d);
    u8::from(!zero)
}

/// Cells of `s_(alpha,h)`: rows 0 and 1, columns `h` and `(p-1)/2 + h`,
/// listed as top-left, top-right, bottom-left, bottom-right.
pub fn s_cells(p: usize, h: usize) -> Result<[(usize, usize); 4]> {
    check_k(p, h)?;
    let c2 = (p - 1) / 2 + h;
    Ok([(0, h), (0, c2), (1, h), (1, c2)])
}

/// The 2x2 sub-array `s_(alpha,h)` of `grid`.
pub fn subarray_s(grid: &Grid, p: usize, h: usize) -> Result<Grid> {
    let cells = s_cells(p, h)?;
    Grid::new(2, 2, cells.iter().map(|&(r, c)| grid.get(r, c)).collect())
}

/// `s_(alpha,h)` of `A_alpha`.
pub fn subarray_of_a(p: usize, alpha: usize, h: usize) -> Result<Grid> {
    subarray_s(&build_a(p, alpha)?, p, h)
}

/// Shape of a coincident sub-array under the trichotomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SubarrayShape {
    /// `[[1,0],[1,1]]`, at `alpha = h`.
    Corner,
    /// `[[1,0],[0,1]]`, at `alpha = h + k` for `k` in `K`.
    Diagonal,
    /// `[[1,0],[1,0]]`, everywhere else.
    Column,
}

impl SubarrayShape {
    pub fn grid(self) -> Grid {
        let rows = match self {
            SubarrayShape::Corner => ["10", "11"],
            SubarrayShape::Diagonal => ["10", "01"],
            SubarrayShape::Column => ["10", "10"],
        };
        Grid::from_digit_rows(&rows).expect("literal")
    }

    /// Predicted shape of `s_(alpha,h)`.
    pub fn predicted(p: usize, alpha: usize, h: usize) -> SubarrayShape {
        if alpha == h {
            SubarrayShape::Corner
        } else if alpha > h && alpha - h <= (p - 1) / 2 {
            SubarrayShape::Diagonal
        } else {
            SubarrayShape::Column
        }
    }
}

fn flip(grid: &mut Grid, cells: &[(usize, usize)]) {
    for &(r, c) in cells {
        grid.set(r, c, 1 - grid.get(r, c));
    }
}

/// All `A_alpha` with `s_(h+k,h)` complemented in `A_(h+k)` for `k` in `K`
/// and `h` in `1..=h_max`. Index `alpha - 1` holds `alpha`.
fn repaired(p: usize, h_max: usize) -> Result<Vec<Grid>> {
    check_p(p)?;
    let mut arrays: Vec<Grid> = (1..p).map(|a| build_a(p, a)).collect::<Result<_>>()?;
    let half = (p - 1) / 2;
    for h in 1..=h_max {
        let cells = s_cells(p, h)?;
        for k in 1..=half {
            flip(&mut arrays[h + k - 1], &cells);
        }
    }
    Ok(arrays)
}

/// `A*_alpha` for `alpha` in `Omega`: flips for every `h` in `K`.
pub fn build_a_star(p: usize) -> Result<Vec<Grid>> {
    repaired(p, (p - 1) / 2)
}

/// `A'_alpha` for `alpha` in `Omega`: flips for `h` in `1..=(p-3)/2`.
pub fn build_a_prime(p: usize) -> Result<Vec<Grid>> {
    repaired(p, (p - 3) / 2)
}

/// `rho((p+1)/2) = (p+1)/2`, `rho((p-1)/2) = 1`, otherwise `z + (p+1)/2 mod p`.
pub fn rho(p: usize, z: usize) -> Result<usize> {
    check_p(p)?;
    check_omega(p, z)?;
    let out = if z == p.div_ceil(2) {
        z
    } else if z == (p - 1) / 2 {
        1
    } else {
        (z + p.div_ceil(2)) % p
    };
    if out == 0 {
        return Err(Error::Invariant(format!("rho({z}) reduced to 0 for p={p}")));
    }
    Ok(out)
}

pub fn rho_inverse(p: usize, z: usize) -> Result<usize> {
    check_p(p)?;
    check_omega(p, z)?;
    for y in 1..p {
        if rho(p, y)? == z {
            return Ok(y);
        }
    }
    Err(Error::Invariant(format!("rho is not onto for p={p}")))
}

/// `rho` as a table: entry `z - 1` holds `rho(z)`.
pub fn rho_table(p: usize) -> Result<Vec<usize>> {
    (1..p).map(|z| rho(p, z)).collect()
}

/// A star with the given center; each edge is stored as `[center, leaf]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Star {
    pub center: usize,
    pub edges: Vec<[usize; 2]>,
}

impl Star {
    fn map(&self, g: impl Fn(usize) -> Result<usize>) -> Result<Star> {
        Ok(Star {
            center: g(self.center)?,
            edges: self
                .edges
                .iter()
                .map(|&[a, b]| Ok([g(a)?, g(b)?]))
                .collect::<Result<_>>()?,
        })
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.edges
            .iter()
            .any(|&[x, y]| (x, y) == (a, b) || (x, y) == (b, a))
    }
}

/// Stars partitioning the edges of the complete graph on `Omega`.
///
/// The first `(p-1)/2` stars are `f(S_i)` for `i` in `K`; the remaining
/// `(p-3)/2` are `rho(f(S_i))` for `i` in `1..=(p-3)/2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StarPartition {
    pub p: usize,
    pub stars: Vec<Star>,
}

impl StarPartition {
    /// Number of `f(S_i)` stars at the front of `stars`.
    pub fn relabeled_count(&self) -> usize {
        (self.p - 1) / 2
    }

    /// Index of the star holding edge `{a, b}`.
    pub fn star_of(&self, a: usize, b: usize) -> Option<usize> {
        self.stars.iter().position(|s| s.contains(a, b))
    }

    /// True when the stars cover every edge of the complete graph on
    /// `Omega` exactly once.
    pub fn is_partition(&self) -> bool {
        let n = self.p - 1;
        let mut seen = vec![false; n * n];
        let mut total = 0;
        for star in &self.stars {
            for &[a, b] in &star.edges {
                if a == b || a == 0 || b == 0 || a > n || b > n {
                    return false;
                }
                let (x, y) = (a.min(b) - 1, a.max(b) - 1);
                if seen[x * n + y] {
                    return false;
                }
                seen[x * n + y] = true;
                total += 1;
            }
        }
        total == n * (n - 1) / 2
    }
}

/// Vertex of the complete graph on `{inf} u {0, .., p-3}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Vertex {
    Infinity,
    Finite(usize),
}

/// Relabeling onto `Omega`: `inf -> (p+1)/2`, `0 -> p-1`,
/// `z -> z` on `1..=(p-1)/2`, `z -> z+1` on `(p+1)/2..=p-3`.
fn relabel(p: usize, z: Vertex) -> usize {
    match z {
        Vertex::Infinity => p.div_ceil(2),
        Vertex::Finite(0) => p - 1,
        Vertex::Finite(z) if z <= (p - 1) / 2 => z,
        Vertex::Finite(z) => z + 1,
    }
}

/// `S_i = {{i,inf}, {i,i+1}, .., {i,i+(p-3)/2}}` mod `p-2`, relabeled.
fn relabeled_star(p: usize, i: usize) -> Star {
    let m = p - 2;
    let center = Vertex::Finite(i % m);
    let mut edges = vec![[relabel(p, center), relabel(p, Vertex::Infinity)]];
    for d in 1..=(p - 3) / 2 {
        edges.push([relabel(p, center), relabel(p, Vertex::Finite((i + d) % m))]);
    }
    Star {
        center: relabel(p, center),
        edges,
    }
}

/// Closed form `{{i,i+1}, .., {i,i+(p-1)/2}}` of the relabeled star `i`.
pub fn relabeled_star_closed_form(p: usize, i: usize) -> Star {
    Star {
        center: i,
        edges: (1..=(p - 1) / 2).map(|d| [i, i + d]).collect(),
    }
}

fn same_edges(a: &Star, b: &Star) -> bool {
    a.edges.len() == b.edges.len() && a.edges.iter().all(|&[x, y]| b.contains(x, y))
}

pub fn star_partition(p: usize) -> Result<StarPartition> {
    check_p(p)?;
    let half = (p - 1) / 2;
    let mut stars = Vec::with_capacity(p - 2);
    for i in 1..=half {
        let closed = relabeled_star_closed_form(p, i);
        // For p = 3 the relabeling collapses (0 and inf share an image);
        // the closed form is the single star {{1,2}}.
        if p > 3 {
            let star = relabeled_star(p, i);
            if !same_edges(&star, &closed) {
                return Err(Error::Invariant(format!(
                    "relabeled star {i} is {:?}, closed form {:?}",
                    star.edges, closed.edges
                )));
            }
        }
        stars.push(closed);
    }
    for i in 1..=(p - 3) / 2 {
        let image = stars[i - 1].map(|z| rho(p, z))?;
        if p > 3 && !same_edges(&image, &relabeled_star(p, i + half)) {
            return Err(Error::Invariant(format!(
                "rho image of star {i} differs from relabeled star {}",
                i + half
            )));
        }
        stars.push(image);
    }
    let partition = StarPartition { p, stars };
    if !partition.is_partition() {
        return Err(Error::Invariant(format!("stars do not partition K_{}", p - 1)));
    }
    Ok(partition)
}

/// `[[A, ~A], [~A, A]]` before any repair.
pub fn unrepaired_l(p: usize, alpha: usize) -> Result<Grid> {
    let a = build_a(p, alpha)?;
    let ac = a.complement()?;
    Grid::blocks(&a, &ac, &ac, &a)
}

/// The `p - 1` squares `F_1, .., F_(p-1)`, each checked to be a frequency
/// square and every pair checked to show each ordered pair `p^2` times.
pub fn build_mofs2p(p: usize) -> Result<Vec<FrequencyRectangle>> {
    let star = build_a_star(p)?;
    let prime = build_a_prime(p)?;
    let mut set = Vec::with_capacity(p - 1);
    for alpha in 1..p {
        let ac = build_a(p, alpha)?.complement()?;
        let br = &prime[rho_inverse(p, alpha)? - 1];
        let grid = Grid::blocks(&star[alpha - 1], &ac, &ac, br)?;
        let fr = FrequencyRectangle::new(grid, 2).map_err(|e| Error::Unverified(e.to_string()))?;
        set.push(fr);
    }
    let target = (p * p) as u64;
    for a in 0..set.len() {
        for b in a + 1..set.len() {
            let t = pair_counts(set[a].grid(), set[b].grid(), 2)?;
            if !t.is_constant(target) {
                return Err(Error::Unverified(format!(
                    "F_{} and F_{} superimpose to {:?}",
                    a + 1,
                    b + 1,
                    t.as_rows()
                )));
            }
        }
    }
    Ok(set)
}

/// Every intermediate object of the construction, for inspection.
#[derive(Debug, Clone, Serialize)]
pub struct Intermediates {
    pub p: usize,
    pub base_vector: Vec<u8>,
    pub a: Vec<Vec<Vec<u8>>>,
    pub a_star: Vec<Vec<Vec<u8>>>,
    pub a_prime: Vec<Vec<Vec<u8>>>,
    /// Entry `z - 1` is `rho(z)`.
    pub rho: Vec<usize>,
    pub stars: StarPartition,
}

pub fn intermediates(p: usize) -> Result<Intermediates> {
    let rows = |gs: Vec<Grid>| gs.iter().map(Grid::row_vecs).collect::<Vec<_>>();
    Ok(Intermediates {
        p,
        base_vector: base_vector(p)?,
        a: rows((1..p).map(|a| build_a(p, a)).collect::<Result<_>>()?),
        a_star: rows(build_a_star(p)?),
        a_prime: rows(build_a_prime(p)?),
        rho: rho_table(p)?,
        stars: star_partition(p)?,
    })
}

impl Intermediates {
    /// Plain-text rendering: labeled digit blocks, one section per object.
    pub fn to_text(&self) -> String {
        let digits = |r: &Vec<u8>| r.iter().map(|d| char::from(b'0' + d)).collect::<String>();
        let mut out = format!("p {}\nv {}\n", self.p, digits(&self.base_vector));
        for (name, arrays) in [("A", &self.a), ("A*", &self.a_star), ("A'", &self.a_prime)] {
            for (i, g) in arrays.iter().enumerate() {
                out.push_str(&format!("\n{name}_{}\n", i + 1));
                for r in g {
                    out.push_str(&digits(r));
                    out.push('\n');
                }
            }
        }
        out.push_str("\nrho");
        for (i, r) in self.rho.iter().enumerate() {
            out.push_str(&format!(" {}->{}", i + 1, r));
        }
        out.push('\n');
        out.push_str("\nstars\n");
        for s in &self.stars.stars {
            let edges: Vec<String> = s.edges.iter().map(|[a, b]| format!("{{{a},{b}}}")).collect();
            out.push_str(&format!("{}: {}\n", s.center, edges.join(" ")));
        }
        out
    }
}
