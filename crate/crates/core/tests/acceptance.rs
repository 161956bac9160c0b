//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::time::{Duration, Instant};

use freqrect::constructions::{
    hadamard_to_mofr_4, mofr_to_oa, oa_cyclic_to_mofr, oa_to_mofr_double, vectors_to_mofr,
};
use freqrect::designs::{FrequencyRectangle, Grid, OrthogonalArray, VectorSet};
use freqrect::format::{parse_fr_set, serialize_fr_set};
use freqrect::gf::Field;
use freqrect::hadamard::{construct, full_factorial_oa, hadamard_to_oa, Method};
use freqrect::mofs2p::{
    build_a, build_mofs2p, shift_vector, star_partition, subarray_of_a, unrepaired_l,
    SubarrayShape,
};
use freqrect::search::{max_t_independent, Budget};
use freqrect::verify::{
    build_incidence, is_mofr, is_t_orthogonal, mofr_upper_bound, pair_counts, spectrum_report,
    t_orthogonality, verify_gram, OrthogonalityCheck,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn lib<T>(r: freqrect::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

const W6_MOFR: &str = include_str!("fixtures/w6_mofr.frs");
const MOFS14: &str = include_str!("fixtures/mofs14.frs");
const W: [&str; 8] = ["1010", "1001", "1101", "0101", "1110", "0110", "0001", "0010"];

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let took = start.elapsed();
    ensure!(took < limit, "{what} took {took:?}, limit {limit:?}");
    Ok(())
}

fn c1_golden() -> Outcome {
    let start = Instant::now();
    let set = lib(build_mofs2p(7))?;
    let text = serialize_fr_set(&set);
    within(start, Duration::from_secs(1), "p=7")?;
    ensure!(text == MOFS14, "serialized p=7 set differs from the fixture");
    Ok(format!("6 arrays of 14x14 identical to fixture in {:?}", start.elapsed()))
}

fn c2_scale() -> Outcome {
    let start = Instant::now();
    for p in [3usize, 5, 7, 11, 13, 17, 19] {
        let set = lib(build_mofs2p(p))?;
        ensure!(set.len() == p - 1, "p={p}: {} members", set.len());
        for f in &set {
            ensure!(f.params() == (2 * p, 2 * p, 2), "p={p}: member type {:?}", f.params());
        }
        for a in 0..set.len() {
            for b in a + 1..set.len() {
                let t = lib(pair_counts(set[a].grid(), set[b].grid(), 2))?;
                ensure!(t.is_constant((p * p) as u64), "p={p} pair {a},{b}: {:?}", t.as_rows());
            }
        }
    }
    within(start, Duration::from_secs(10), "p in 3..=19")?;
    Ok(format!("all pair counts p^2 for p in {{3,5,7,11,13,17,19}} in {:?}", start.elapsed()))
}

fn row_grid(v: Vec<u8>) -> Grid {
    let n = v.len();
    Grid::new(1, n, v).expect("row")
}

fn c3_structure() -> Outcome {
    for p in [5usize, 7, 11] {
        let half = (p - 1) / 2;
        let v0 = row_grid(lib(shift_vector(p, 0))?);
        for i in 0..=half {
            let vi = row_grid(lib(shift_vector(p, i))?);
            let t = lib(pair_counts(&v0, &vi, 2))?;
            ensure!(t.get(1, 0) == i as u64 && t.get(0, 1) == i as u64, "p={p} |v0 v{i}| = {:?}", t.as_rows());
            ensure!(t.get(0, 0) == (half - i) as u64, "p={p} |v0 v{i}|(0,0)");
            ensure!(t.get(1, 1) == (half + 1 - i) as u64, "p={p} |v0 v{i}|(1,1)");
        }
        let off = ((p * p - 1) / 4) as u64;
        let zz = ((p - 1) * (p - 1) / 4) as u64;
        let oo = ((p + 1) * (p + 1) / 4) as u64;
        let a: Vec<Grid> = (1..p).map(|al| build_a(p, al)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
        let l: Vec<Grid> = (1..p).map(|al| unrepaired_l(p, al)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
        let sq = (p * p) as u64;
        for x in 0..p - 1 {
            for y in 0..p - 1 {
                if x == y {
                    continue;
                }
                let t = lib(pair_counts(&a[x], &a[y], 2))?;
                ensure!(
                    t.as_rows() == vec![vec![zz, off], vec![off, oo]],
                    "p={p} |A{} A{}| = {:?}",
                    x + 1,
                    y + 1,
                    t.as_rows()
                );
                let t = lib(pair_counts(&l[x], &l[y], 2))?;
                ensure!(
                    t.as_rows() == vec![vec![sq + 1, sq - 1], vec![sq - 1, sq + 1]],
                    "p={p} |L{} L{}| = {:?}",
                    x + 1,
                    y + 1,
                    t.as_rows()
                );
            }
        }
        for alpha in 1..p {
            for h in 1..=half {
                let s = lib(subarray_of_a(p, alpha, h))?;
                let want = SubarrayShape::predicted(p, alpha, h);
                ensure!(s == want.grid(), "p={p} s({alpha},{h}) = {:?}, want {want:?}", s.row_vecs());
            }
        }
        let sp = lib(star_partition(p))?;
        ensure!(sp.is_partition(), "p={p}: stars do not partition the edges");
        ensure!(sp.stars.len() == p - 2, "p={p}: {} stars", sp.stars.len());
    }
    Ok("vector counts, A and L pair tables, sub-array shapes and star partition hold for p in {5,7,11}".into())
}

fn w6_set() -> Result<Vec<FrequencyRectangle>, String> {
    let w = lib(VectorSet::from_strs(Field::binary(), &W[..6]))?;
    lib(vectors_to_mofr(&w, 2, 2, 3))
}

fn c4_example() -> Outcome {
    let set = w6_set()?;
    ensure!(set == lib(parse_fr_set(W6_MOFR))?, "construction differs from the transcribed table");
    ensure!(lib(t_orthogonality(&set, 3))?.holds(), "not 3-orthogonal");
    for subset in freqrect::combin::Combinations::new(6, 3) {
        let mut counts = [0usize; 8];
        for cell in 0..16 {
            let idx = subset.iter().fold(0, |acc, &s| acc * 2 + set[s].grid().cells()[cell] as usize);
            counts[idx] += 1;
        }
        ensure!(counts.iter().all(|&c| c == 2), "triple {subset:?} counts {counts:?}");
    }
    match lib(t_orthogonality(&set, 4))? {
        OrthogonalityCheck::Unbalanced { subset, .. } => {
            ensure!(subset == vec![0, 1, 2, 4], "witness {subset:?}, expected members 1,2,3,5");
        }
        other => return Err(format!("t=4 outcome {other:?}")),
    }
    let mut counts = [0usize; 16];
    for cell in 0..16 {
        let idx = [0, 1, 2, 4].iter().fold(0, |acc, &s| acc * 2 + set[s].grid().cells()[cell] as usize);
        counts[idx] += 1;
    }
    for (tuple, &c) in counts.iter().enumerate() {
        let want = if tuple.count_ones() % 2 == 1 { 0 } else { 2 };
        ensure!(c == want, "tuple {tuple:04b} appears {c} times");
    }
    Ok("3-orthogonal with every triple twice; t=4 witness {1,2,3,5} has no odd-weight tuple".into())
}

fn section2_sets() -> Result<Vec<(String, Vec<FrequencyRectangle>)>, String> {
    let mut out = Vec::new();
    for a in [1usize, 2, 3, 5] {
        let h = lib(construct(4 * a, Method::Auto))?;
        out.push((format!("order {}", 4 * a), lib(hadamard_to_mofr_4(&h))?));
    }
    let oa = lib(hadamard_to_oa(&lib(construct(8, Method::Auto))?))?;
    out.push(("OA(8,7,2,2) doubled".into(), lib(oa_to_mofr_double(&oa, 2, 4))?));
    Ok(out)
}

fn c5_section2() -> Outcome {
    let start = Instant::now();
    let sets = section2_sets()?;
    for (i, a) in [1usize, 2, 3, 5].iter().enumerate() {
        let set = &sets[i].1;
        ensure!(set.len() == 4 * a - 2, "a={a}: {} members", set.len());
        ensure!(set[0].params() == (4, 2 * a, 2), "a={a}: type {:?}", set[0].params());
        ensure!(lib(is_mofr(set))?, "a={a}: not pairwise orthogonal");
    }
    let doubled = &sets[4].1;
    ensure!(doubled.len() == 7 && doubled[0].params() == (4, 8, 2), "doubled set shape");
    ensure!(lib(is_mofr(doubled))?, "doubled set not pairwise orthogonal");
    within(start, Duration::from_secs(1), "constructions")?;
    Ok(format!("sizes 2, 6, 10, 18 and 7-MOFR(4,8;2), all orthogonal, in {:?}", start.elapsed()))
}

fn cyclic_set() -> Result<(OrthogonalArray, Vec<FrequencyRectangle>), String> {
    let oa = lib(full_factorial_oa(3, true))?;
    let set = lib(oa_cyclic_to_mofr(&oa))?;
    Ok((oa, set))
}

fn c6_round_trip() -> Outcome {
    let (oa, set) = cyclic_set()?;
    ensure!((oa.runs(), oa.factors(), oa.strength()) == (8, 4, 3), "input OA shape");
    ensure!(set.len() == 4 && set[0].params() == (8, 8, 2), "set shape");
    ensure!(lib(is_t_orthogonal(&set, 3))?, "not 3-orthogonal");
    let back = lib(mofr_to_oa(&set, 3))?;
    ensure!((back.runs(), back.factors(), back.strength()) == (64, 4, 3), "OA shape");
    Ok("OA(8,4,2,3) -> 3-orthogonal 4-MOFR(8,8;2) -> OA(64,4,2,3)".into())
}

fn c7_search() -> Outcome {
    let mut cases = vec![
        (5, 4, 6u64), (5, 5, 6), (6, 4, 8), (6, 5, 7), (7, 4, 11), (7, 5, 9), (8, 5, 12), (8, 6, 9),
    ];
    for n in 3..=5 {
        cases.push((n, 3, 1 << (n - 1)));
    }
    for n in 2..=4 {
        cases.push((n, 2, (1 << n) - 1));
    }
    let mut slowest = Duration::ZERO;
    for (n, t, want) in cases {
        let start = Instant::now();
        let r = lib(max_t_independent(n, t, Field::binary(), Budget::unlimited()))?;
        within(start, Duration::from_secs(60), &format!("Ind({n},{t})"))?;
        slowest = slowest.max(start.elapsed());
        ensure!(r.exhaustive, "Ind({n},{t}) not exhaustive");
        ensure!(r.best_size as u64 == want, "Ind({n},{t}) = {}, expected {want}", r.best_size);
    }
    Ok(format!("14 exhaustive values match; slowest {slowest:?}"))
}

fn all_sets() -> Result<Vec<(String, Vec<FrequencyRectangle>)>, String> {
    let mut out = Vec::new();
    for p in [3usize, 5, 7, 11, 13, 17, 19] {
        out.push((format!("mofs p={p}"), lib(build_mofs2p(p))?));
    }
    out.push(("6-MOFR(4,4;2)".into(), w6_set()?));
    out.extend(section2_sets()?);
    out.push(("cyclic".into(), cyclic_set()?.1));
    Ok(out)
}

fn c8_incidence() -> Outcome {
    let sets = all_sets()?;
    for (name, set) in &sets {
        ensure!(lib(verify_gram(set))?, "{name}: Gram blocks wrong");
        let bundle = lib(build_incidence(set))?;
        let (k, q) = (bundle.k, bundle.q);
        ensure!(bundle.rank() == k * q - k + 1, "{name}: rank {}", bundle.rank());
        let r = lib(spectrum_report(set))?;
        ensure!(r.holds, "{name}: spectrum {:?}", r.eigenvalues);
        let (c, d) = (r.c, r.d);
        let (ki, qi) = (k as i64, q as i64);
        let want = [(c + qi * (ki - 1) * d, 1), (c - qi * d, k - 1), (c, k * (q - 1))];
        for (value, mult) in want {
            let e = r.eigenvalues.iter().find(|e| e.value == value);
            ensure!(e.is_some_and(|e| e.observed == mult), "{name}: eigenvalue {value}");
        }
    }
    Ok(format!("Gram, rank kq-k+1 and spectrum exact on {} sets", sets.len()))
}

/// Random binary frequency square by permuting rows and columns of a
/// block square.
fn random_square(rng: &mut ChaCha8Rng, n: usize) -> Grid {
    let half = n / 2;
    let mut rows: Vec<usize> = (0..n).collect();
    let mut cols: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        rows.swap(i, rng.gen_range(0..=i));
        cols.swap(i, rng.gen_range(0..=i));
    }
    let base = |r: usize, c: usize| u8::from((r < half) == (c < half));
    let mut cells = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            cells.push(base(rows[r], cols[c]));
        }
    }
    Grid::new(n, n, cells).expect("square")
}

fn is_fs(g: &Grid) -> bool {
    FrequencyRectangle::new(g.clone(), 2).is_ok()
}

fn c9_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut placements = 0;
    let mut by_clause = [0usize; 2];
    while placements < 1000 {
        let n = 2 * rng.gen_range(2..=7);
        let b = random_square(&mut rng, n);
        let (i, i2) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let (j, j2) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i == i2 || j == j2 {
            continue;
        }
        let cells = [(i, j), (i, j2), (i2, j), (i2, j2)];
        if cells.map(|(r, c)| b.get(r, c)) != [1, 0, 0, 1] {
            continue;
        }
        let clause = placements % 2;
        let patch: [u8; 4] = if clause == 0 { [1, 0, 1, 1] } else { [1, 0, 1, 0] };
        let mut a = Grid::new(n, n, (0..n * n).map(|_| rng.gen_range(0..2)).collect()).expect("grid");
        for (k, &(r, c)) in cells.iter().enumerate() {
            a.set(r, c, patch[k]);
        }
        let mut b2 = b.clone();
        for &(r, c) in &cells {
            b2.set(r, c, 1 - b2.get(r, c));
        }
        let before = lib(pair_counts(&a, &b, 2))?;
        let after = lib(pair_counts(&a, &b2, 2))?;
        let after_rev = lib(pair_counts(&b2, &a, 2))?;
        ensure!(after_rev == after.transpose(), "reverse superimposition mismatch");
        for x in 0..2 {
            for y in 0..2 {
                let delta = after.get(x, y) as i64 - before.get(x, y) as i64;
                let want = match (clause, x == y) {
                    (0, true) => -1,
                    (0, false) => 1,
                    _ => 0,
                };
                ensure!(delta == want, "clause {} ({x},{y}) delta {delta}", clause + 1);
            }
        }
        ensure!(is_fs(&b2), "flip broke the frequency square");
        by_clause[clause] += 1;
        placements += 1;
    }

    let set = w6_set()?;
    let holds: Vec<bool> = (1..=6).map(|t| is_t_orthogonal(&set, t)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    for t in 1..=6 {
        for u in 1..t {
            ensure!(!holds[t - 1] || holds[u - 1], "{t}-orthogonal but not {u}-orthogonal");
        }
    }
    ensure!(holds[..3].iter().all(|&h| h) && !holds[3], "6-MOFR(4,4;2) strengths {holds:?}");

    for (name, s) in all_sets()? {
        let (m, n, q) = s[0].params();
        let bound = lib(mofr_upper_bound(m, n, q))?;
        ensure!(s.len() as u64 <= bound, "{name}: {} members exceed {bound}", s.len());
    }
    Ok(format!(
        "1000 trades ({} against [[1,0],[1,1]], {} against [[1,0],[1,0]]); downward closure; size bound",
        by_clause[0], by_clause[1]
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("golden p=7 reproduction", c1_golden),
        ("p-1 MOFS(2p) at scale", c2_scale),
        ("intermediate structure", c3_structure),
        ("strength-3 example set", c4_example),
        ("Hadamard and doubling constructions", c5_section2),
        ("cyclic OA round trip", c6_round_trip),
        ("exhaustive Ind values", c7_search),
        ("incidence Gram, rank and spectrum", c8_incidence),
        ("property suite", c9_properties),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 9 acceptance criteria passed");
}
