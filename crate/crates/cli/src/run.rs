use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;
use std::time::Duration;

use freqrect::constructions::{
    hadamard_to_mofr_4, mofr_to_oa, oa_cyclic_to_mofr, oa_to_mofr2, oa_to_mofr_double,
    pad_vectors, product_vectors, vectors_to_mofr,
};
use freqrect::designs::{FrequencyRectangle, VectorSet};
use freqrect::format::{self, Document};
use freqrect::gf::Field;
use freqrect::hadamard::{self, Method};
use freqrect::mofs2p;
use freqrect::search::{self, Bound, Budget, CodeMode, SearchReport};
use freqrect::verify::{self, IndependenceCheck, OrthogonalityCheck};
use freqrect::Error;
use serde_json::{json, Value};

use crate::{Bounds, Cli, Command, Construct, Convert, Global, Search, Verify};

/// What a command produced. `ok = false` means a verification failed.
struct Output {
    text: String,
    json: Value,
    ok: bool,
}

impl Output {
    fn ok(text: String, json: Value) -> Self {
        Output { text, json, ok: true }
    }

    fn document(doc: &Document) -> Result<Self, Fail> {
        Ok(Output::ok(
            doc.to_text().map_err(Fail::from)?,
            serde_json::from_str(&format::document_to_json(doc)).expect("valid JSON"),
        ))
    }
}

/// A command that could not run. Code 1 for failed checks, 2 otherwise.
struct Fail {
    code: u8,
    message: String,
}

fn is_verification(e: &Error) -> bool {
    matches!(
        e,
        Error::Frequency(_) | Error::OrthogonalArray(_) | Error::NotHadamard(..) | Error::Unverified(_) | Error::Precondition(_)
    )
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail {
            code: if is_verification(&e) { 1 } else { 2 },
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Fail {
    Fail {
        code: 2,
        message: message.into(),
    }
}

/// Reads a document file. JSON documents are converted to the text format
/// so every loader accepts either.
fn read(path: &Path) -> Result<String, Fail> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    if !text.trim_start().starts_with('{') {
        return Ok(text);
    }
    format::document_from_json(&text).and_then(|d| d.to_text()).map_err(|e| {
        let mut f = Fail::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

fn load<T>(path: &Path, parse: impl Fn(&str) -> freqrect::Result<T>) -> Result<T, Fail> {
    let text = read(path)?;
    parse(&text).map_err(|e| {
        let mut f = Fail::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

pub fn main(cli: Cli) -> ExitCode {
    if cli.global.threads == Some(0) {
        eprintln!("error: --threads must be at least 1");
        return ExitCode::from(2);
    }
    match execute(&cli.command) {
        Ok(out) => match emit(&cli.global, &out) {
            Ok(()) => ExitCode::from(if out.ok { 0 } else { 1 }),
            Err(f) => {
                eprintln!("error: {}", f.message);
                ExitCode::from(f.code)
            }
        },
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn emit(global: &Global, out: &Output) -> Result<(), Fail> {
    let body = if global.json {
        let mut s = serde_json::to_string_pretty(&out.json).expect("plain data");
        s.push('\n');
        s
    } else {
        out.text.clone()
    };
    match &global.output {
        Some(path) => std::fs::write(path, body).map_err(|e| usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn execute(cmd: &Command) -> Result<Output, Fail> {
    match cmd {
        Command::Construct(c) => construct(c),
        Command::Verify(v) => verify_cmd(v),
        Command::Search(s) => search_cmd(s),
        Command::Bounds(b) => bounds_cmd(b),
        Command::Convert(c) => convert(c),
    }
}

fn frs(set: Vec<FrequencyRectangle>) -> Result<Output, Fail> {
    Output::document(&Document::FrSet(set))
}

fn construct(c: &Construct) -> Result<Output, Fail> {
    match c {
        Construct::Hadamard { order, method } => {
            let method: Method = method.parse()?;
            Output::document(&Document::Hadamard(hadamard::construct(*order, method)?))
        }
        Construct::Oa {
            factorial,
            parity,
            order,
        } => {
            let oa = match (factorial, order) {
                (Some(k), _) => hadamard::full_factorial_oa(*k, *parity)?,
                (None, Some(n)) => hadamard::hadamard_to_oa(&hadamard::construct(*n, Method::Auto)?)?,
                (None, None) => return Err(usage("give --factorial or --order")),
            };
            Output::document(&Document::Oa(oa))
        }
        Construct::Double { oa, m, n } => {
            let oa = load(oa, format::parse_oa)?;
            frs(oa_to_mofr_double(&oa, *m, *n)?)
        }
        Construct::FourRow { hadamard } => {
            let h = load(hadamard, format::parse_hadamard)?;
            frs(hadamard_to_mofr_4(&h)?)
        }
        Construct::Cyclic { oa } => {
            let oa = load(oa, format::parse_oa)?;
            frs(oa_cyclic_to_mofr(&oa)?)
        }
        Construct::FromVectors { vectors, m, n, t } => {
            let vs = load(vectors, format::parse_vector_set)?;
            frs(vectors_to_mofr(&vs, *m, *n, *t)?)
        }
        Construct::Mofs2p {
            p,
            emit_intermediates,
        } => {
            if *emit_intermediates {
                let im = mofs2p::intermediates(*p)?;
                Ok(Output::ok(im.to_text(), serde_json::to_value(&im).expect("plain data")))
            } else {
                frs(mofs2p::build_mofs2p(*p)?)
            }
        }
        Construct::Product { first, second } => {
            let a = load(first, format::parse_vector_set)?;
            let b = load(second, format::parse_vector_set)?;
            Output::document(&Document::Vectors(product_vectors(&a, &b)?))
        }
        Construct::Pad { vectors, n } => {
            let vs = load(vectors, format::parse_vector_set)?;
            Output::document(&Document::Vectors(pad_vectors(&vs, *n)?))
        }
    }
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|i| i + 1).collect()
}

fn braces(v: &[usize]) -> String {
    let parts: Vec<String> = v.iter().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

fn fr_type(fr: &FrequencyRectangle) -> String {
    let (m, n, q) = fr.params();
    format!("FR({m},{n};{q})")
}

/// Runs a load whose validation failure is a verification result.
fn load_checked<T>(
    path: &Path,
    parse: impl Fn(&str) -> freqrect::Result<T>,
) -> Result<Result<T, Output>, Fail> {
    let text = read(path)?;
    match parse(&text) {
        Ok(x) => Ok(Ok(x)),
        Err(e) if is_verification(&e) => Ok(Err(Output {
            text: format!("invalid: {e}\n"),
            json: json!({ "valid": false, "reason": e.to_string() }),
            ok: false,
        })),
        Err(e) => Err(Fail {
            code: 2,
            message: format!("{}: {e}", path.display()),
        }),
    }
}

fn verify_cmd(v: &Verify) -> Result<Output, Fail> {
    match v {
        Verify::Fr { file } => {
            let set = match load_checked(file, format::parse_fr_set)? {
                Ok(s) => s,
                Err(out) => return Ok(out),
            };
            let mut text = String::new();
            for (i, fr) in set.iter().enumerate() {
                let _ = writeln!(text, "member {}: valid {}", i + 1, fr_type(fr));
            }
            let json = json!({
                "valid": true,
                "members": set.iter().map(|f| json!({"m": f.m(), "n": f.n(), "q": f.q()})).collect::<Vec<_>>(),
            });
            Ok(Output::ok(text, json))
        }
        Verify::Mofr { file, t } => {
            let set = match load_checked(file, format::parse_fr_set)? {
                Ok(s) => s,
                Err(out) => return Ok(out),
            };
            verify_mofr(&set, *t)
        }
        Verify::Oa { file, t } => {
            let oa = match load_checked(file, format::parse_oa)? {
                Ok(s) => s,
                Err(out) => return Ok(out),
            };
            let oa = match t {
                Some(t) => match oa.with_strength(*t) {
                    Ok(o) => o,
                    Err(e) if is_verification(&e) => {
                        return Ok(Output {
                            text: format!("invalid at strength {t}: {e}\n"),
                            json: json!({ "valid": false, "strength": t, "reason": e.to_string() }),
                            ok: false,
                        })
                    }
                    Err(e) => return Err(e.into()),
                },
                None => oa,
            };
            let (n, k, q, s) = (oa.runs(), oa.factors(), oa.q(), oa.strength());
            Ok(Output::ok(
                format!("valid OA({n},{k},{q},{s})\n"),
                json!({ "valid": true, "runs": n, "factors": k, "q": q, "strength": s }),
            ))
        }
        Verify::Hadamard { file } => {
            let h = match load_checked(file, format::parse_hadamard)? {
                Ok(s) => s,
                Err(out) => return Ok(out),
            };
            let norm = h.is_normalized();
            Ok(Output::ok(
                format!(
                    "valid H({}), {}\n",
                    h.order(),
                    if norm { "normalized" } else { "not normalized" }
                ),
                json!({ "valid": true, "order": h.order(), "normalized": norm }),
            ))
        }
        Verify::Vectors { file, t } => {
            let vs = load(file, format::parse_vector_set)?;
            let check = verify::t_independence(&vs, *t)?;
            let (text, json) = match &check {
                IndependenceCheck::Independent => (
                    format!("{} vectors, {t}-independent: yes\n", vs.len()),
                    json!({ "independent": true, "t": t, "count": vs.len() }),
                ),
                IndependenceCheck::Dependent { subset, rank } => (
                    format!(
                        "{} vectors, {t}-independent: no; vectors {} have rank {rank}\n",
                        vs.len(),
                        braces(subset)
                    ),
                    json!({ "independent": false, "t": t, "count": vs.len(),
                            "witness": one_based(subset), "rank": rank }),
                ),
            };
            Ok(Output {
                text,
                json,
                ok: check.holds(),
            })
        }
        Verify::Gram { file } => {
            let set = load(file, format::parse_fr_set)?;
            let check = verify::gram_check(&set)?;
            let bundle = verify::build_incidence(&set)?;
            let rank = bundle.rank();
            let expected = bundle.expected_rank();
            let mut text = String::new();
            match &check {
                verify::GramCheck::Holds {
                    diagonal,
                    off_diagonal,
                } => {
                    let _ = writeln!(
                        text,
                        "M^T M: diagonal blocks {diagonal} I, off-diagonal blocks {off_diagonal} J"
                    );
                }
                verify::GramCheck::NotOrthogonal { pair } => {
                    let _ = writeln!(text, "members {} and {} are not orthogonal", pair.0 + 1, pair.1 + 1);
                }
                verify::GramCheck::Divisibility { cells, q } => {
                    let _ = writeln!(text, "{q}^2 does not divide {cells}");
                }
                verify::GramCheck::Mismatch {
                    row,
                    col,
                    found,
                    expected,
                } => {
                    let _ = writeln!(text, "M^T M entry ({row},{col}) is {found}, expected {expected}");
                }
            }
            let _ = writeln!(text, "rank(M) = {rank}, kq-k+1 = {expected}");
            let ok = check.holds() && rank == expected;
            let mut gram = serde_json::to_value(&check).expect("plain data");
            if let verify::GramCheck::NotOrthogonal { pair } = &check {
                gram["pair"] = json!([pair.0 + 1, pair.1 + 1]);
            }
            Ok(Output {
                text,
                json: json!({ "gram": gram, "rank": rank, "expected_rank": expected, "holds": ok }),
                ok,
            })
        }
        Verify::Spectrum { file } => {
            let set = load(file, format::parse_fr_set)?;
            let pair = verify::first_non_orthogonal_pair(&set)?;
            let report = verify::spectrum_report(&set)?;
            let mut text = format!("c = {}, d = {}, k = {}, q = {}\n", report.c, report.d, report.k, report.q);
            for e in &report.eigenvalues {
                let _ = writeln!(
                    text,
                    "eigenvalue {}: multiplicity {} (expected {})",
                    e.value, e.observed, e.claimed
                );
            }
            if let Some((a, b, _)) = pair {
                let _ = writeln!(text, "members {} and {} are not orthogonal", a + 1, b + 1);
            }
            let ok = pair.is_none() && report.holds;
            let _ = writeln!(text, "spectrum: {}", if ok { "confirmed" } else { "not confirmed" });
            Ok(Output {
                text,
                json: json!({ "report": report, "holds": ok }),
                ok,
            })
        }
    }
}

fn verify_mofr(set: &[FrequencyRectangle], t: usize) -> Result<Output, Fail> {
    let (m, n, q) = set[0].params();
    let k = set.len();
    let mut text = format!("{k} members of type {}\n", fr_type(&set[0]));
    let mut pairs = Vec::new();
    if t == 2 && k >= 2 {
        let labels: Vec<String> = (0..q)
            .flat_map(|x| (0..q).map(move |y| format!("({x},{y})")))
            .collect();
        let _ = writeln!(text, "pair counts {}", labels.join(" "));
        for a in 0..k {
            for b in a + 1..k {
                let table = verify::pair_counts(set[a].grid(), set[b].grid(), q)?;
                let flat: Vec<String> = table.as_rows().concat().iter().map(u64::to_string).collect();
                let _ = writeln!(text, "pair {},{}: {}", a + 1, b + 1, flat.join(" "));
                pairs.push(json!({ "members": [a + 1, b + 1], "counts": table.as_rows() }));
            }
        }
    }
    let check = verify::t_orthogonality(set, t)?;
    let check_json = match &check {
        OrthogonalityCheck::Orthogonal => json!({ "status": "orthogonal" }),
        OrthogonalityCheck::Divisibility { cells, q, t } => {
            json!({ "status": "divisibility", "cells": cells, "q": q, "t": t })
        }
        OrthogonalityCheck::Unbalanced {
            subset,
            tuple,
            found,
            expected,
        } => json!({ "status": "unbalanced", "members": one_based(subset), "tuple": tuple,
                      "found": found, "expected": expected }),
    };
    match &check {
        OrthogonalityCheck::Orthogonal => {
            let _ = writeln!(text, "{t}-orthogonal: yes");
        }
        OrthogonalityCheck::Divisibility { cells, q, t } => {
            let _ = writeln!(text, "{t}-orthogonal: no; {q}^{t} does not divide {cells}");
        }
        OrthogonalityCheck::Unbalanced {
            subset,
            tuple,
            found,
            expected,
        } => {
            let tuple: String = tuple.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",");
            let _ = writeln!(
                text,
                "{t}-orthogonal: no; members {} show ({tuple}) {found} times, expected {expected}",
                braces(subset)
            );
        }
    }
    let bound = verify::mofr_upper_bound(m, n, q)?;
    let _ = writeln!(text, "size bound: {k} <= {bound}: {}", if k as u64 <= bound { "yes" } else { "no" });
    let ok = check.holds() && k as u64 <= bound;
    Ok(Output {
        text,
        json: json!({ "members": k, "m": m, "n": n, "q": q, "t": t, "pairs": pairs,
                      "check": check_json, "bound": bound, "holds": ok }),
        ok,
    })
}

fn field(q: u32) -> Result<Field, Fail> {
    Field::new(q).map_err(Fail::from)
}

fn budget(nodes: Option<u64>, seconds: Option<f64>) -> Result<Budget, Fail> {
    let max_time = match seconds {
        Some(s) if s.is_finite() && s > 0.0 => Some(Duration::from_secs_f64(s)),
        Some(s) => return Err(usage(format!("time limit {s} must be positive"))),
        None => None,
    };
    Ok(Budget {
        max_nodes: nodes,
        max_time,
    })
}

fn witness_text(w: &VectorSet) -> String {
    match format::serialize_vector_set(w) {
        Ok(s) => s,
        Err(_) => w
            .vectors()
            .iter()
            .map(|v| v.iter().map(u8::to_string).collect::<Vec<_>>().join(" ") + "\n")
            .collect(),
    }
}

fn search_output(r: SearchReport, name: String) -> Output {
    let scope = if r.exhaustive {
        format!("exhaustive, {} nodes", r.nodes_explored)
    } else {
        format!("budget exhausted after {} nodes", r.nodes_explored)
    };
    let head = match (r.nontrivial, r.exhaustive) {
        (true, true) => format!("{name} = {} ({scope})", r.best_size),
        (true, false) => format!("{name} >= {} ({scope})", r.best_size),
        (false, true) => format!(
            "{name} does not exist: no {0}-independent set has {0} or more vectors ({scope})",
            r.t
        ),
        (false, false) => format!(
            "no {0}-independent set with {0} or more vectors found ({scope})",
            r.t
        ),
    };
    let mut text = head + "\n";
    if r.nontrivial {
        text.push_str(&witness_text(&r.witness));
    }
    Output::ok(text, serde_json::to_value(&r).expect("plain data"))
}

fn ind_name(q: u32, n: usize, t: usize) -> String {
    if q == 2 {
        format!("Ind({n},{t})")
    } else {
        format!("Ind_{q}({n},{t})")
    }
}

fn search_cmd(s: &Search) -> Result<Output, Fail> {
    match s {
        Search::Ind {
            n,
            t,
            q,
            budget: b,
            time_limit,
        } => {
            let r = search::max_t_independent(*n, *t, field(*q)?, budget(*b, *time_limit)?)?;
            Ok(search_output(r, ind_name(*q, *n, *t)))
        }
        Search::Constrained {
            m,
            n,
            t,
            q,
            budget: b,
            time_limit,
        } => {
            let r = search::max_constrained(*m, *n, *t, field(*q)?, budget(*b, *time_limit)?)?;
            let name = format!("constrained maximum (M={m}, N={n}, t={t}, q={q})");
            Ok(search_output(r, name))
        }
    }
}

fn parse_code(s: &str) -> Result<(usize, usize, usize), Fail> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let nums: Option<Vec<usize>> = parts.iter().map(|p| p.parse().ok()).collect();
    match nums.as_deref() {
        Some(&[n, k, d]) => Ok((n, k, d)),
        _ => Err(usage(format!("code parameters {s:?} are not N,K,D"))),
    }
}

fn mode(s: &str) -> Result<CodeMode, Fail> {
    match s {
        "lower" => Ok(CodeMode::Lower),
        "upper" => Ok(CodeMode::Upper),
        other => Err(usage(format!("mode {other:?} is not lower or upper"))),
    }
}

fn bounds_cmd(b: &Bounds) -> Result<Output, Fail> {
    match b {
        Bounds::Ind {
            n,
            t,
            q,
            code_lower,
            code_upper,
        } => {
            let f = field(*q)?;
            let mut sources = search::ind_formula_bounds(*n, *t, f);
            if (!code_lower.is_empty() || !code_upper.is_empty()) && *q != 2 {
                return Err(usage("code bounds apply to q = 2 only"));
            }
            for arg in code_lower {
                let (cn, ck, cd) = parse_code(arg)?;
                let c = search::code_to_ind(cn, ck, cd, CodeMode::Lower)?;
                if c.length != *n || c.t < *t {
                    return Err(usage(format!(
                        "[{cn},{ck},{cd}] bounds Ind({},{}), which does not bound Ind({n},{t})",
                        c.length, c.t
                    )));
                }
                sources.push(Bound::from(&c));
            }
            for arg in code_upper {
                let (cn, ck, cd) = parse_code(arg)?;
                let c = search::code_to_ind(cn, ck, cd, CodeMode::Upper)?;
                if c.length != *n || c.t > *t {
                    return Err(usage(format!(
                        "[{cn},{ck},{cd}] bounds Ind({},{}), which does not bound Ind({n},{t})",
                        c.length, c.t
                    )));
                }
                sources.push(Bound::from(&c));
            }
            let est = search::combine_bounds(*n, *t, f, sources)?;
            let mut text = format!("{est}\n");
            for s in &est.sources {
                let kind = serde_json::to_value(s.kind).expect("plain data");
                let _ = writeln!(text, "  {} {} ({})", kind.as_str().unwrap_or(""), s.value, s.rule);
            }
            Ok(Output::ok(text, serde_json::to_value(&est).expect("plain data")))
        }
        Bounds::Code { n, k, d, mode: m } => {
            let c = search::code_to_ind(*n, *k, *d, mode(m)?)?;
            let rel = match c.kind {
                search::BoundKind::Upper => "<=",
                _ => ">=",
            };
            Ok(Output::ok(
                format!("Ind({},{}) {rel} {}\n", c.length, c.t, c.value),
                serde_json::to_value(&c).expect("plain data"),
            ))
        }
        Bounds::Mofr { m, n, q } => {
            let bound = verify::mofr_upper_bound(*m, *n, *q)?;
            Ok(Output::ok(
                format!("k <= {bound} for k-MOFR({m},{n};{q})\n"),
                json!({ "m": m, "n": n, "q": q, "bound": bound }),
            ))
        }
    }
}

fn convert(c: &Convert) -> Result<Output, Fail> {
    match c {
        Convert::Fr2oa { file, t } => {
            let set = load(file, format::parse_fr_set)?;
            let t = t.unwrap_or(set.len().min(2));
            Output::document(&Document::Oa(mofr_to_oa(&set, t)?))
        }
        Convert::Oa2fr { file } => {
            let oa = load(file, format::parse_oa)?;
            frs(oa_to_mofr2(&oa)?)
        }
        Convert::Had2oa { file } => {
            let h = load(file, format::parse_hadamard)?;
            Output::document(&Document::Oa(hadamard::hadamard_to_oa(&h)?))
        }
    }
}
