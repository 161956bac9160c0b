//! Maximum t-independent vector sets and closed-form bounds on their size.
//!
//! Vectors of length `N` over `F_q` are encoded as integers whose base-q
//! digits, most significant first, are the coordinates; integer order is
//! lexicographic order.
//!
//! The search is a depth-first branch and bound. For each depth it keeps
//! `cover[j]`, the set of all combinations of at most `j` chosen vectors.
//! A candidate `w` keeps the set t-independent iff `w` is not in
//! `cover[t-1]`. Adding `w` updates
//! `cover'[j] = cover[j] u { x + c w : x in cover[j-1], c != 0 }`.
//!
//! Unconstrained searches with `2 <= t <= N` fix the `N` unit vectors as
//! the first members: a maximum set spans `F_q^N` (a vector outside the
//! span can always be added), and a change of basis maps any `N`
//! independent members to the unit vectors without affecting
//! independence. Candidates are then restricted to vectors whose first
//! nonzero coordinate is 1, since scalar multiples are pairwise dependent.
//! Constrained searches use no symmetry breaking.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::designs::VectorSet;
use crate::error::{Error, Result};
use crate::gf::Field;
use crate::verify::t_independence;

/// Largest `q^N` the search will index.
pub const MAX_SPACE: usize = 1 << 20;

/// Node and wall-clock limits. `None` means unlimited.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    #[serde(serialize_with = "ser_duration")]
    pub max_time: Option<Duration>,
}

fn ser_duration<S: serde::Serializer>(d: &Option<Duration>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match d {
        Some(d) => s.serialize_some(&(d.as_millis() as u64)),
        None => s.serialize_none(),
    }
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn nodes(n: u64) -> Self {
        Budget {
            max_nodes: Some(n),
            max_time: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SearchMode {
    Unconstrained,
    /// Every vector needs a nonzero first-`prefix` part and a nonzero
    /// last-`suffix` part.
    Constrained { prefix: usize, suffix: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchReport {
    pub length: usize,
    pub t: usize,
    pub q: u8,
    pub mode: SearchMode,
    /// Size of the best witness. Below `t` the witness still has no
    /// dependency among any of its members.
    pub best_size: usize,
    #[serde(serialize_with = "ser_witness")]
    pub witness: VectorSet,
    /// False when no t-independent set of size at least `t` was found.
    pub nontrivial: bool,
    /// True when the tree was fully explored, so `best_size` is the maximum.
    pub exhaustive: bool,
    pub nodes_explored: u64,
    pub elapsed_ms: u64,
    pub budget: Budget,
}

fn ser_witness<S: serde::Serializer>(w: &VectorSet, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(w.len()))?;
    for v in w.vectors() {
        seq.serialize_element(&VectorSet::to_digit_string(v))?;
    }
    seq.end()
}

fn decode(mut x: usize, q: usize, len: usize) -> Vec<u8> {
    let mut out = vec![0u8; len];
    for d in out.iter_mut().rev() {
        *d = (x % q) as u8;
        x /= q;
    }
    out
}

/// Digit-wise `x + c*w` on encoded vectors.
struct Space {
    q: usize,
    size: usize,
    pow: Vec<usize>,
}

impl Space {
    fn new(q: usize, len: usize) -> Result<Self> {
        let size = q
            .checked_pow(len as u32)
            .filter(|&s| s <= MAX_SPACE)
            .ok_or_else(|| Error::domain(format!("{q}^{len} vectors exceed the search cap {MAX_SPACE}")))?;
        let pow = (0..len).rev().map(|i| q.pow(i as u32)).collect();
        Ok(Space { q, size, pow })
    }

    fn add_scaled(&self, x: usize, c: usize, w: usize) -> usize {
        if self.q == 2 {
            return x ^ w;
        }
        let mut out = 0;
        for &p in &self.pow {
            let a = (x / p) % self.q;
            let b = (w / p) % self.q;
            out += ((a + c * b) % self.q) * p;
        }
        out
    }
}

#[derive(Clone)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(bits: usize) -> Self {
        BitSet(vec![0; bits.div_ceil(64)])
    }
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }
}

/// `covers[j]` for `j` in `0..t`.
type Covers = Vec<BitSet>;

fn initial_covers(space: &Space, t: usize) -> Covers {
    let mut c = BitSet::new(space.size);
    c.set(0);
    vec![c; t]
}

fn extend_covers(space: &Space, covers: &Covers, w: usize) -> Covers {
    let mut out = covers.clone();
    for j in 1..covers.len() {
        for x in covers[j - 1].ones() {
            for c in 1..space.q {
                out[j].set(space.add_scaled(x, c, w));
            }
        }
    }
    out
}

struct Searcher<'a> {
    space: &'a Space,
    t: usize,
    candidates: Vec<usize>,
    chosen: Vec<usize>,
    best: Vec<usize>,
    /// No search can beat this size.
    cap: usize,
    nodes: u64,
    budget: Budget,
    start: Instant,
    stopped: bool,
}

impl Searcher<'_> {
    fn out_of_budget(&mut self) -> bool {
        if self.stopped {
            return true;
        }
        if self.budget.max_nodes.is_some_and(|n| self.nodes >= n) {
            self.stopped = true;
        }
        if self.nodes.is_multiple_of(256) {
            if let Some(limit) = self.budget.max_time {
                if self.start.elapsed() >= limit {
                    self.stopped = true;
                }
            }
        }
        self.stopped
    }

    fn dfs(&mut self, from: usize, covers: &Covers) {
        if self.out_of_budget() {
            return;
        }
        self.nodes += 1;
        if self.chosen.len() > self.best.len() {
            self.best = self.chosen.clone();
        }
        if self.best.len() >= self.cap {
            return;
        }
        let top = &covers[self.t - 1];
        let allowed: Vec<usize> = (from..self.candidates.len())
            .filter(|&i| !top.get(self.candidates[i]))
            .collect();
        for (pos, &i) in allowed.iter().enumerate() {
            let remaining = allowed.len() - pos;
            if self.chosen.len() + remaining <= self.best.len() {
                return;
            }
            let w = self.candidates[i];
            let next = extend_covers(self.space, covers, w);
            self.chosen.push(w);
            self.dfs(i + 1, &next);
            self.chosen.pop();
            if self.stopped {
                return;
            }
        }
    }
}

fn run(
    field: Field,
    len: usize,
    t: usize,
    mode: SearchMode,
    budget: Budget,
) -> Result<SearchReport> {
    if t == 0 {
        return Err(Error::domain("independence strength must be at least 1"));
    }
    if len == 0 {
        return Err(Error::domain("vector length must be at least 1"));
    }
    let q = field.order() as usize;
    let space = Space::new(q, len)?;
    let start = Instant::now();
    let admissible = |x: usize| -> bool {
        match mode {
            SearchMode::Unconstrained => x != 0,
            SearchMode::Constrained { prefix, .. } => {
                let suffix_size = q.pow((len - prefix) as u32);
                x / suffix_size != 0 && !x.is_multiple_of(suffix_size)
            }
        }
    };
    let normalized = |x: usize| -> bool {
        let digits = decode(x, q, len);
        digits.iter().find(|&&d| d != 0) == Some(&1)
    };
    let mut prefix: Vec<usize> = Vec::new();
    if mode == SearchMode::Unconstrained && t >= 2 && t <= len {
        prefix = (0..len).map(|i| space.pow[i]).collect();
    }
    let candidates: Vec<usize> = (1..space.size)
        .filter(|&x| admissible(x))
        .filter(|&x| t == 1 || normalized(x))
        .filter(|x| !prefix.contains(x))
        .collect();

    let (best, nodes, exhaustive) = if t == 1 {
        // Any set of distinct nonzero vectors qualifies.
        (candidates, 1, true)
    } else {
        let mut covers = initial_covers(&space, t);
        for &w in &prefix {
            covers = extend_covers(&space, &covers, w);
        }
        let mut s = Searcher {
            space: &space,
            t,
            candidates,
            chosen: prefix.clone(),
            best: prefix.clone(),
            // Any len+1 vectors are dependent, so t > len forces full independence.
            cap: if t > len { len } else { usize::MAX },
            nodes: 0,
            budget,
            start,
            stopped: false,
        };
        s.dfs(0, &covers);
        (s.best, s.nodes, !s.stopped)
    };

    let nontrivial = best.len() >= t;
    let vectors: Vec<Vec<u8>> = best.iter().map(|&x| decode(x, q, len)).collect();
    let witness = VectorSet::new(field, len, vectors)?;
    if !t_independence(&witness, t)?.holds() {
        return Err(Error::Invariant("search witness is not t-independent".into()));
    }
    Ok(SearchReport {
        length: len,
        t,
        q: field.order(),
        mode,
        best_size: witness.len(),
        witness,
        nontrivial,
        exhaustive,
        nodes_explored: nodes,
        elapsed_ms: start.elapsed().as_millis() as u64,
        budget,
    })
}

/// Largest t-independent set of length-`n` vectors over `field`.
pub fn max_t_independent(n: usize, t: usize, field: Field, budget: Budget) -> Result<SearchReport> {
    run(field, n, t, SearchMode::Unconstrained, budget)
}

/// As [`max_t_independent`] over length `m + n`, restricted to vectors with
/// a nonzero first-`m` part and a nonzero last-`n` part.
pub fn max_constrained(m: usize, n: usize, t: usize, field: Field, budget: Budget) -> Result<SearchReport> {
    if m == 0 || n == 0 {
        return Err(Error::domain("both parts of the split must be nonempty"));
    }
    run(
        field,
        m + n,
        t,
        SearchMode::Constrained { prefix: m, suffix: n },
        budget,
    )
}

/// Exhaustive maximum for `(M, N, t, q) = (2, 2, 3, 2)`, computed by this
/// crate's search and by enumerating all subsets of the nine admissible
/// vectors.
pub const CONSTRAINED_2_2_3_BINARY: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Exact,
    Lower,
    Upper,
    /// No t-independent set of size at least `t` exists.
    NoneExists,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bound {
    pub kind: BoundKind,
    pub value: u64,
    pub rule: &'static str,
}

fn checked_pow(q: u64, n: usize) -> Option<u64> {
    q.checked_pow(u32::try_from(n).ok()?)
}

/// Every closed-form statement that applies to `Ind_q(N, t)`.
pub fn ind_formula_bounds(n: usize, t: usize, field: Field) -> Vec<Bound> {
    let q = u64::from(field.order());
    let nn = n as u64;
    let tt = t as u64;
    let mut out = Vec::new();
    if t == 0 || n == 0 {
        return out;
    }
    if t > n {
        out.push(Bound {
            kind: BoundKind::NoneExists,
            value: 0,
            rule: "more-vectors-than-dimension",
        });
        return out;
    }
    if t == 1 {
        if let Some(s) = checked_pow(q, n) {
            out.push(Bound { kind: BoundKind::Exact, value: s - 1, rule: "nonzero-vectors" });
        }
    }
    if t == 2 {
        if let Some(s) = checked_pow(q, n) {
            out.push(Bound {
                kind: BoundKind::Exact,
                value: (s - 1) / (q - 1),
                rule: "projective-points",
            });
        }
    }
    if q == 2 && t == 3 && n >= 3 {
        if let Some(s) = checked_pow(2, n - 1) {
            out.push(Bound { kind: BoundKind::Exact, value: s, rule: "binary-strength-three" });
        }
    }
    if q == 2 {
        let r = nn - tt;
        if nn >= 3 * r + 2 {
            out.push(Bound { kind: BoundKind::Exact, value: nn + 1, rule: "binary-near-full-strength" });
        } else if r >= 2 && (nn == 3 * r || nn == 3 * r + 1) {
            out.push(Bound { kind: BoundKind::Exact, value: nn + 2, rule: "binary-third-strength" });
        }
    }
    if t >= 2 {
        // q (N+1) <= (q+1) t  iff  q/(q+1) (N+1) <= t
        if q * (nn + 1) <= (q + 1) * tt {
            out.push(Bound { kind: BoundKind::Exact, value: nn + 1, rule: "high-strength-threshold" });
        } else {
            out.push(Bound { kind: BoundKind::Lower, value: nn + 2, rule: "high-strength-threshold" });
        }
    }
    if t == n && n >= 2 {
        if nn <= q {
            out.push(Bound { kind: BoundKind::Upper, value: q + 1, rule: "full-strength-small-length" });
        }
        if nn <= 2 * q - 2 {
            let even = q % 2 == 0;
            let value = if even && (nn == 3 || nn == q - 1) { q + 2 } else { q + 1 };
            out.push(Bound { kind: BoundKind::Upper, value, rule: "full-strength-moderate-length" });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeMode {
    /// A binary `[n, k, d]` code exists.
    Lower,
    /// `d` is the largest distance of any binary `[n, k]` code.
    Upper,
}

/// Binary bound on `Ind(n - k, .)` from linear-code parameters.
///
/// `Lower`: an `[n, k, d]` code gives `Ind(n-k, d-1) >= n`.
/// `Upper`: if `d` is the largest distance of an `[n, k]` code, then
/// `Ind(n-k, d) <= n - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CodeBound {
    pub length: usize,
    pub t: usize,
    pub kind: BoundKind,
    pub value: u64,
}

pub fn code_to_ind(n: usize, k: usize, d: usize, mode: CodeMode) -> Result<CodeBound> {
    if k == 0 || k >= n {
        return Err(Error::domain(format!("need 0 < k < n, got n={n} k={k}")));
    }
    if d == 0 || d > n - k + 1 {
        return Err(Error::domain(format!(
            "distance {d} violates 1 <= d <= n-k+1 = {}",
            n - k + 1
        )));
    }
    Ok(match mode {
        CodeMode::Lower => {
            if d < 2 {
                return Err(Error::domain("lower mode needs d >= 2"));
            }
            CodeBound { length: n - k, t: d - 1, kind: BoundKind::Lower, value: n as u64 }
        }
        CodeMode::Upper => CodeBound { length: n - k, t: d, kind: BoundKind::Upper, value: n as u64 - 1 },
    })
}

impl From<&CodeBound> for Bound {
    fn from(c: &CodeBound) -> Self {
        let rule = match c.kind {
            BoundKind::Upper => "code-maximum-distance",
            _ => "code-existence",
        };
        Bound { kind: c.kind, value: c.value, rule }
    }
}

/// Tightest interval for `Ind_q(N, t)` implied by a list of bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndEstimate {
    pub length: usize,
    pub t: usize,
    pub q: u8,
    pub lower: Option<u64>,
    pub upper: Option<u64>,
    pub none_exists: bool,
    pub sources: Vec<Bound>,
}

pub fn combine_bounds(n: usize, t: usize, field: Field, sources: Vec<Bound>) -> Result<IndEstimate> {
    let mut lower: Option<u64> = None;
    let mut upper: Option<u64> = None;
    let mut none_exists = false;
    for b in &sources {
        match b.kind {
            BoundKind::Exact => {
                lower = Some(lower.map_or(b.value, |l| l.max(b.value)));
                upper = Some(upper.map_or(b.value, |u| u.min(b.value)));
            }
            BoundKind::Lower => lower = Some(lower.map_or(b.value, |l| l.max(b.value))),
            BoundKind::Upper => upper = Some(upper.map_or(b.value, |u| u.min(b.value))),
            BoundKind::NoneExists => none_exists = true,
        }
    }
    if let (Some(l), Some(u)) = (lower, upper) {
        if l > u {
            return Err(Error::domain(format!(
                "bounds contradict: lower {l} exceeds upper {u}"
            )));
        }
    }
    Ok(IndEstimate { length: n, t, q: field.order(), lower, upper, none_exists, sources })
}

impl std::fmt::Display for IndEstimate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = if self.q == 2 {
            format!("Ind({},{})", self.length, self.t)
        } else {
            format!("Ind_{}({},{})", self.q, self.length, self.t)
        };
        if self.none_exists {
            return write!(f, "{name} does not exist: no {0}-independent set has {0} or more vectors", self.t);
        }
        match (self.lower, self.upper) {
            (Some(l), Some(u)) if l == u => write!(f, "{name} = {l}"),
            (Some(l), Some(u)) => write!(f, "{l} <= {name} <= {u}"),
            (Some(l), None) => write!(f, "{name} >= {l}"),
            (None, Some(u)) => write!(f, "{name} <= {u}"),
            (None, None) => write!(f, "no bound known for {name}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(b: &[Bound]) -> Vec<u64> {
        b.iter().filter(|b| b.kind == BoundKind::Exact).map(|b| b.value).collect()
    }

    #[test]
    fn formula_examples() {
        let f = Field::binary();
        assert!(exact(&ind_formula_bounds(9, 7, f)).contains(&10));
        assert!(exact(&ind_formula_bounds(8, 6, f)).contains(&9));
        assert!(exact(&ind_formula_bounds(10, 7, f)).contains(&12));
        assert_eq!(ind_formula_bounds(2, 3, f)[0].kind, BoundKind::NoneExists);
    }

    #[test]
    fn code_examples() {
        let b = code_to_ind(23, 14, 5, CodeMode::Lower).unwrap();
        assert_eq!((b.length, b.t, b.value), (9, 4, 23));
        let b = code_to_ind(24, 15, 4, CodeMode::Upper).unwrap();
        assert_eq!((b.length, b.t, b.value), (9, 4, 23));
        let b = code_to_ind(12, 4, 6, CodeMode::Lower).unwrap();
        assert_eq!((b.length, b.t, b.value), (8, 5, 12));
    }

    #[test]
    fn combined_code_bounds_pin_a_value() {
        let f = Field::binary();
        let mut b = ind_formula_bounds(9, 4, f);
        b.push(Bound::from(&code_to_ind(23, 14, 5, CodeMode::Lower).unwrap()));
        b.push(Bound::from(&code_to_ind(24, 15, 4, CodeMode::Upper).unwrap()));
        let e = combine_bounds(9, 4, f, b).unwrap();
        assert_eq!(e.to_string(), "Ind(9,4) = 23");
    }

    #[test]
    fn tiny_searches() {
        let f = Field::binary();
        let r = max_t_independent(2, 3, f, Budget::unlimited()).unwrap();
        assert!(!r.nontrivial && r.exhaustive && r.best_size == 2);
        let r = max_constrained(1, 1, 2, f, Budget::unlimited()).unwrap();
        assert_eq!(r.best_size, 1);
        let r = max_t_independent(3, 2, f, Budget::unlimited()).unwrap();
        assert_eq!(r.best_size, 7);
    }

    #[test]
    fn budget_stops_early() {
        let r = max_t_independent(6, 4, Field::binary(), Budget::nodes(3)).unwrap();
        assert!(!r.exhaustive);
        assert!(r.best_size >= 6);
    }
}
