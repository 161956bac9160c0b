//! Canonical text format and its JSON mirror.
//!
//! ```text
//! FR <m> <n> <q>        then m lines of n space-separated symbols
//! OA <N> <k> <q> <t>    then N lines of k symbols
//! HAD <n>               then n lines of n tokens from {+, -}
//! VS <q> <L> <count>    then one vector per line as L contiguous digits
//! ```
//!
//! A set of rectangles is a sequence of FR blocks separated by one blank
//! line. Serialization is canonical: single spaces, LF line endings, a
//! trailing newline after the last row. The parser accepts any run of
//! spaces or tabs between tokens and any number of blank lines between
//! FR blocks. Every parsed object is validated before it is returned.

use serde::{Deserialize, Serialize};

use crate::designs::{
    validate_fr, validate_hadamard, validate_oa, FrequencyRectangle, Grid, HadamardMatrix,
    OrthogonalArray, VectorSet, MAX_SYMBOLS,
};
use crate::error::{Error, ParseError, Result};
use crate::gf::Field;

/// Dimension cap applied while parsing, so a hostile header cannot request
/// an enormous allocation before any rows are read.
pub const MAX_PARSE_CELLS: usize = 1 << 24;

fn write_rows<'a>(out: &mut String, rows: impl Iterator<Item = &'a [u8]>) {
    for row in rows {
        let mut first = true;
        for &x in row {
            if !first {
                out.push(' ');
            }
            first = false;
            out.push_str(&x.to_string());
        }
        out.push('\n');
    }
}

pub fn serialize_fr(fr: &FrequencyRectangle) -> String {
    let mut out = format!("FR {} {} {}\n", fr.m(), fr.n(), fr.q());
    let g = fr.grid();
    write_rows(&mut out, (0..g.rows()).map(|r| g.row(r)));
    out
}

pub fn serialize_fr_set(set: &[FrequencyRectangle]) -> String {
    set.iter()
        .map(serialize_fr)
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn serialize_oa(oa: &OrthogonalArray) -> String {
    let mut out = format!(
        "OA {} {} {} {}\n",
        oa.runs(),
        oa.factors(),
        oa.q(),
        oa.strength()
    );
    let g = oa.grid();
    write_rows(&mut out, (0..g.rows()).map(|r| g.row(r)));
    out
}

pub fn serialize_hadamard(h: &HadamardMatrix) -> String {
    let mut out = format!("HAD {}\n", h.order());
    for r in 0..h.order() {
        let row: Vec<&str> = h
            .row(r)
            .iter()
            .map(|&x| if x == 1 { "+" } else { "-" })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Fails when q > 10, since vectors are written as contiguous digits.
pub fn serialize_vector_set(vs: &VectorSet) -> Result<String> {
    if vs.q() > 10 {
        return Err(Error::domain(format!(
            "vector-set text format needs q <= 10, got {}",
            vs.q()
        )));
    }
    let mut out = format!("VS {} {} {}\n", vs.q(), vs.vector_len(), vs.len());
    for v in vs.vectors() {
        out.push_str(&VectorSet::to_digit_string(v));
        out.push('\n');
    }
    Ok(out)
}

/// Any document the text format can hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Document {
    FrSet(Vec<FrequencyRectangle>),
    Oa(OrthogonalArray),
    Hadamard(HadamardMatrix),
    Vectors(VectorSet),
}

impl Document {
    pub fn to_text(&self) -> Result<String> {
        Ok(match self {
            Document::FrSet(set) => serialize_fr_set(set),
            Document::Oa(oa) => serialize_oa(oa),
            Document::Hadamard(h) => serialize_hadamard(h),
            Document::Vectors(vs) => serialize_vector_set(vs)?,
        })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Document::FrSet(_) => "FR",
            Document::Oa(_) => "OA",
            Document::Hadamard(_) => "HAD",
            Document::Vectors(_) => "VS",
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

struct Reader<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

fn perr(line: usize, column: usize, expected: impl Into<String>, found: impl Into<String>) -> Error {
    Error::Parse(ParseError {
        line,
        column,
        expected: expected.into(),
        found: found.into(),
    })
}

fn tokens(line: &str, line_no: usize) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let bytes = line.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b' ' || bytes[i] == b'\t' {
            i += 1;
            continue;
        }
        let start = i;
        while i < bytes.len() && bytes[i] != b' ' && bytes[i] != b'\t' {
            i += 1;
        }
        out.push(Token {
            text: &line[start..i],
            line: line_no,
            column: start + 1,
        });
    }
    out
}

fn is_blank(line: &str) -> bool {
    line.bytes().all(|b| b == b' ' || b == b'\t')
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        let mut lines: Vec<&str> = text.split('\n').collect();
        if lines.last() == Some(&"") {
            lines.pop();
        }
        Reader { lines, pos: 0 }
    }

    fn line_no(&self) -> usize {
        self.pos + 1
    }

    fn at_end(&self) -> bool {
        self.pos >= self.lines.len()
    }

    fn skip_blank(&mut self) -> usize {
        let start = self.pos;
        while !self.at_end() && is_blank(self.lines[self.pos]) {
            self.pos += 1;
        }
        self.pos - start
    }

    fn next_line(&mut self, expected: &str) -> Result<Vec<Token<'a>>> {
        if self.at_end() {
            return Err(perr(self.line_no(), 1, expected, "end of input"));
        }
        let line = self.lines[self.pos];
        let toks = tokens(line, self.pos + 1);
        self.pos += 1;
        Ok(toks)
    }

    fn peek_keyword(&self) -> Option<&'a str> {
        self.lines
            .get(self.pos)
            .and_then(|l| tokens(l, 0).first().map(|t| t.text))
    }
}

fn parse_count(tok: &Token<'_>, what: &str) -> Result<usize> {
    tok.text
        .parse::<usize>()
        .ok()
        .filter(|_| tok.text.bytes().all(|b| b.is_ascii_digit()))
        .ok_or_else(|| perr(tok.line, tok.column, what, tok.text))
}

fn expect_exact<'a>(
    toks: &[Token<'a>],
    n: usize,
    line: usize,
    what: &str,
) -> Result<()> {
    if toks.len() < n {
        let column = toks.last().map_or(1, |t| t.column + t.text.len());
        return Err(perr(line, column, what, "end of line"));
    }
    if toks.len() > n {
        let t = toks[n];
        return Err(perr(t.line, t.column, "end of line", t.text));
    }
    Ok(())
}

fn header<'a>(r: &mut Reader<'a>, keyword: &str, fields: &[&str]) -> Result<Vec<usize>> {
    let line = r.line_no();
    let toks = r.next_line(keyword)?;
    let Some(first) = toks.first() else {
        return Err(perr(line, 1, format!("{keyword} header"), "blank line"));
    };
    if first.text != keyword {
        return Err(perr(line, first.column, format!("{keyword} header"), first.text));
    }
    expect_exact(&toks, fields.len() + 1, line, fields.last().copied().unwrap_or(""))?;
    toks[1..]
        .iter()
        .zip(fields)
        .map(|(t, what)| parse_count(t, what))
        .collect()
}

fn check_cells(line: usize, rows: usize, cols: usize) -> Result<()> {
    match rows.checked_mul(cols) {
        Some(c) if c <= MAX_PARSE_CELLS => Ok(()),
        _ => Err(perr(
            line,
            1,
            format!("at most {MAX_PARSE_CELLS} cells"),
            format!("{rows}x{cols}"),
        )),
    }
}

fn symbol_rows(r: &mut Reader<'_>, rows: usize, cols: usize, q: usize) -> Result<Grid> {
    let mut cells = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let line = r.line_no();
        let toks = r.next_line("row of symbols")?;
        expect_exact(&toks, cols, line, "symbol")?;
        for t in &toks {
            let v = parse_count(t, "symbol")?;
            if v >= q {
                return Err(perr(t.line, t.column, format!("symbol below {q}"), t.text));
            }
            cells.push(v as u8);
        }
    }
    Grid::new(rows, cols, cells)
}

fn check_q(line: usize, q: usize) -> Result<()> {
    if q == 0 || q > MAX_SYMBOLS {
        return Err(perr(line, 1, format!("q in 1..={MAX_SYMBOLS}"), q.to_string()));
    }
    Ok(())
}

fn parse_fr_block(r: &mut Reader<'_>) -> Result<FrequencyRectangle> {
    let line = r.line_no();
    let h = header(r, "FR", &["row count", "column count", "symbol count"])?;
    let (m, n, q) = (h[0], h[1], h[2]);
    check_q(line, q)?;
    check_cells(line, m, n)?;
    let grid = symbol_rows(r, m, n, q)?;
    validate_fr(grid, q)
}

fn finish(r: &mut Reader<'_>) -> Result<()> {
    r.skip_blank();
    if !r.at_end() {
        let toks = tokens(r.lines[r.pos], r.pos + 1);
        let t = toks[0];
        return Err(perr(t.line, t.column, "end of input", t.text));
    }
    Ok(())
}

/// Parses a single FR block.
pub fn parse_fr(text: &str) -> Result<FrequencyRectangle> {
    let mut r = Reader::new(text);
    let fr = parse_fr_block(&mut r)?;
    finish(&mut r)?;
    Ok(fr)
}

/// Parses one or more FR blocks separated by blank lines.
pub fn parse_fr_set(text: &str) -> Result<Vec<FrequencyRectangle>> {
    let mut r = Reader::new(text);
    let mut out = Vec::new();
    r.skip_blank();
    loop {
        out.push(parse_fr_block(&mut r)?);
        let blanks = r.skip_blank();
        if r.at_end() {
            break;
        }
        if blanks == 0 {
            let toks = tokens(r.lines[r.pos], r.pos + 1);
            let t = toks[0];
            return Err(perr(t.line, t.column, "blank line between blocks", t.text));
        }
    }
    Ok(out)
}

pub fn parse_oa(text: &str) -> Result<OrthogonalArray> {
    let mut r = Reader::new(text);
    r.skip_blank();
    let line = r.line_no();
    let h = header(&mut r, "OA", &["run count", "factor count", "symbol count", "strength"])?;
    let (runs, k, q, t) = (h[0], h[1], h[2], h[3]);
    check_q(line, q)?;
    check_cells(line, runs, k)?;
    let grid = symbol_rows(&mut r, runs, k, q)?;
    finish(&mut r)?;
    validate_oa(grid, q, t)
}

pub fn parse_hadamard(text: &str) -> Result<HadamardMatrix> {
    let mut r = Reader::new(text);
    r.skip_blank();
    let line = r.line_no();
    let n = header(&mut r, "HAD", &["order"])?[0];
    check_cells(line, n, n)?;
    let mut entries = Vec::with_capacity(n * n);
    for _ in 0..n {
        let line = r.line_no();
        let toks = r.next_line("row of +/- tokens")?;
        expect_exact(&toks, n, line, "+ or -")?;
        for t in &toks {
            entries.push(match t.text {
                "+" => 1,
                "-" => -1,
                other => return Err(perr(t.line, t.column, "+ or -", other)),
            });
        }
    }
    finish(&mut r)?;
    validate_hadamard(n, entries)
}

pub fn parse_vector_set(text: &str) -> Result<VectorSet> {
    let mut r = Reader::new(text);
    r.skip_blank();
    let line = r.line_no();
    let h = header(&mut r, "VS", &["field order", "vector length", "vector count"])?;
    let (q, len, count) = (h[0], h[1], h[2]);
    if q > 10 {
        return Err(perr(line, 4, "field order at most 10", q.to_string()));
    }
    let field = Field::new(q as u32)
        .map_err(|_| perr(line, 4, "prime field order", q.to_string()))?;
    check_cells(line, count, len)?;
    let mut vectors = Vec::with_capacity(count);
    for _ in 0..count {
        let line = r.line_no();
        let toks = r.next_line("vector")?;
        expect_exact(&toks, 1, line, "vector")?;
        let t = toks[0];
        if t.text.len() != len {
            return Err(perr(
                t.line,
                t.column,
                format!("{len} digits"),
                format!("{} characters", t.text.len()),
            ));
        }
        let mut v = Vec::with_capacity(len);
        for (i, ch) in t.text.chars().enumerate() {
            match ch.to_digit(10) {
                Some(d) if (d as usize) < q => v.push(d as u8),
                _ => {
                    return Err(perr(
                        t.line,
                        t.column + i,
                        format!("digit below {q}"),
                        ch.to_string(),
                    ))
                }
            }
        }
        vectors.push(v);
    }
    finish(&mut r)?;
    VectorSet::new(field, len, vectors)
}

/// Parses any document, dispatching on the first header keyword.
pub fn parse_document(text: &str) -> Result<Document> {
    let mut r = Reader::new(text);
    r.skip_blank();
    match r.peek_keyword() {
        Some("FR") => parse_fr_set(text).map(Document::FrSet),
        Some("OA") => parse_oa(text).map(Document::Oa),
        Some("HAD") => parse_hadamard(text).map(Document::Hadamard),
        Some("VS") => parse_vector_set(text).map(Document::Vectors),
        Some(other) => Err(perr(r.line_no(), 1, "FR, OA, HAD or VS header", other)),
        None => Err(perr(r.line_no(), 1, "FR, OA, HAD or VS header", "end of input")),
    }
}

// ---------------------------------------------------------------------------
// JSON mirror

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrJson {
    pub m: usize,
    pub n: usize,
    pub q: usize,
    pub rows: Vec<Vec<u8>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum DocumentJson {
    #[serde(rename = "FR_SET")]
    FrSet { members: Vec<FrJson> },
    #[serde(rename = "OA")]
    Oa {
        runs: usize,
        factors: usize,
        q: usize,
        strength: usize,
        rows: Vec<Vec<u8>>,
    },
    #[serde(rename = "HAD")]
    Hadamard { order: usize, rows: Vec<String> },
    #[serde(rename = "VS")]
    Vectors {
        q: u32,
        length: usize,
        vectors: Vec<String>,
    },
}

impl From<&FrequencyRectangle> for FrJson {
    fn from(fr: &FrequencyRectangle) -> Self {
        FrJson {
            m: fr.m(),
            n: fr.n(),
            q: fr.q(),
            rows: fr.grid().row_vecs(),
        }
    }
}

impl FrJson {
    pub fn into_fr(self) -> Result<FrequencyRectangle> {
        if self.rows.len() != self.m {
            return Err(Error::shape(format!(
                "{} rows declared, {} given",
                self.m,
                self.rows.len()
            )));
        }
        let grid = Grid::from_rows(&self.rows)?;
        if grid.cols() != self.n {
            return Err(Error::shape(format!(
                "{} columns declared, {} given",
                self.n,
                grid.cols()
            )));
        }
        validate_fr(grid, self.q)
    }
}

impl From<&Document> for DocumentJson {
    fn from(doc: &Document) -> Self {
        match doc {
            Document::FrSet(set) => DocumentJson::FrSet {
                members: set.iter().map(FrJson::from).collect(),
            },
            Document::Oa(oa) => DocumentJson::Oa {
                runs: oa.runs(),
                factors: oa.factors(),
                q: oa.q(),
                strength: oa.strength(),
                rows: oa.grid().row_vecs(),
            },
            Document::Hadamard(h) => DocumentJson::Hadamard {
                order: h.order(),
                rows: (0..h.order())
                    .map(|r| {
                        h.row(r)
                            .iter()
                            .map(|&x| if x == 1 { '+' } else { '-' })
                            .collect()
                    })
                    .collect(),
            },
            Document::Vectors(vs) => DocumentJson::Vectors {
                q: vs.q() as u32,
                length: vs.vector_len(),
                vectors: vs.vectors().iter().map(|v| VectorSet::to_digit_string(v)).collect(),
            },
        }
    }
}

impl DocumentJson {
    pub fn into_document(self) -> Result<Document> {
        Ok(match self {
            DocumentJson::FrSet { members } => Document::FrSet(
                members
                    .into_iter()
                    .map(FrJson::into_fr)
                    .collect::<Result<_>>()?,
            ),
            DocumentJson::Oa {
                runs,
                factors,
                q,
                strength,
                rows,
            } => {
                let grid = Grid::from_rows(&rows)?;
                if grid.rows() != runs || (runs > 0 && grid.cols() != factors) {
                    return Err(Error::shape("OA dimensions disagree with rows"));
                }
                Document::Oa(validate_oa(grid, q, strength)?)
            }
            DocumentJson::Hadamard { order, rows } => {
                if rows.len() != order || rows.iter().any(|r| r.chars().count() != order) {
                    return Err(Error::shape(format!("HAD {order} needs {order} rows of {order} tokens")));
                }
                let mut entries = Vec::with_capacity(order * order);
                for row in &rows {
                    for ch in row.chars() {
                        entries.push(match ch {
                            '+' => 1,
                            '-' => -1,
                            other => {
                                return Err(Error::domain(format!("Hadamard token {other:?}")))
                            }
                        });
                    }
                }
                Document::Hadamard(validate_hadamard(order, entries)?)
            }
            DocumentJson::Vectors { q, length, vectors } => {
                let field = Field::new(q)?;
                let strs: Vec<&str> = vectors.iter().map(String::as_str).collect();
                let vs = VectorSet::from_strs(field, &strs)?;
                if !vs.is_empty() && vs.vector_len() != length {
                    return Err(Error::shape("vector length disagrees with header"));
                }
                Document::Vectors(VectorSet::new(field, length, vs.vectors().to_vec())?)
            }
        })
    }
}

pub fn document_to_json(doc: &Document) -> String {
    serde_json::to_string_pretty(&DocumentJson::from(doc)).expect("plain data serializes")
}

pub fn document_from_json(text: &str) -> Result<Document> {
    let parsed: DocumentJson =
        serde_json::from_str(text).map_err(|e| perr(e.line(), e.column(), "JSON document", e.to_string()))?;
    parsed.into_document()
}

#[cfg(test)]
mod tests {
    use super::*;

    const FR_TEXT: &str = "FR 4 4 2\n0 0 1 1\n0 0 1 1\n1 1 0 0\n1 1 0 0\n";

    #[test]
    fn fr_round_trip() {
        let fr = parse_fr(FR_TEXT).unwrap();
        assert_eq!(serialize_fr(&fr), FR_TEXT);
    }

    #[test]
    fn hadamard_round_trip() {
        let text = "HAD 2\n+ +\n+ -\n";
        let h = parse_hadamard(text).unwrap();
        assert_eq!(h.get(1, 1), -1);
        assert_eq!(serialize_hadamard(&h), text);
    }

    #[test]
    fn vector_set_round_trip() {
        let text = "VS 2 4 3\n1010\n1001\n1101\n";
        let vs = parse_vector_set(text).unwrap();
        assert_eq!(vs.len(), 3);
        assert_eq!(serialize_vector_set(&vs).unwrap(), text);
    }

    #[test]
    fn oa_round_trip() {
        let text = "OA 4 3 2 2\n0 0 0\n0 1 1\n1 0 1\n1 1 0\n";
        let oa = parse_oa(text).unwrap();
        assert_eq!(serialize_oa(&oa), text);
    }

    #[test]
    fn fr_set_blocks() {
        let two = format!("{FR_TEXT}\n{FR_TEXT}");
        let set = parse_fr_set(&two).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(serialize_fr_set(&set), two);
        let glued = format!("{FR_TEXT}{FR_TEXT}");
        let err = parse_fr_set(&glued).unwrap_err();
        assert!(matches!(err, Error::Parse(ParseError { line: 6, .. })), "{err:?}");
    }

    #[test]
    fn parse_errors_carry_positions() {
        let e = parse_fr("FR 2 2 2\n0 1\n1 x\n").unwrap_err();
        assert_eq!(
            e,
            Error::Parse(ParseError {
                line: 3,
                column: 3,
                expected: "symbol".into(),
                found: "x".into()
            })
        );
        let e = parse_fr("FX 2 2 2\n").unwrap_err();
        assert!(matches!(e, Error::Parse(ParseError { line: 1, column: 1, .. })));
        let e = parse_fr("FR 2 2 2\n0 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse(ParseError { line: 3, .. })));
        let e = parse_fr("FR 2 2 2\n0 1 1\n1 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse(ParseError { line: 2, column: 5, .. })));
        let e = parse_hadamard("HAD 2\n+ +\n+ *\n").unwrap_err();
        assert!(matches!(e, Error::Parse(ParseError { line: 3, column: 3, .. })));
        let e = parse_vector_set("VS 2 3 1\n102\n").unwrap_err();
        assert!(matches!(e, Error::Parse(ParseError { line: 2, column: 3, .. })));
        let e = parse_vector_set("VS 4 3 1\n101\n").unwrap_err();
        assert!(matches!(e, Error::Parse(_)));
    }

    #[test]
    fn parse_validates() {
        let e = parse_fr("FR 2 2 2\n0 0\n1 1\n").unwrap_err();
        assert!(matches!(e, Error::Frequency(_)));
    }

    #[test]
    fn huge_headers_are_rejected_without_allocating() {
        let e = parse_fr("FR 100000 100000 2\n").unwrap_err();
        assert!(matches!(e, Error::Parse(_)));
        let e = parse_fr("FR 99999999999999999999999 2 2\n").unwrap_err();
        assert!(matches!(e, Error::Parse(_)));
    }

    #[test]
    fn document_dispatch_and_json_mirror() {
        for text in [
            FR_TEXT,
            "OA 4 3 2 2\n0 0 0\n0 1 1\n1 0 1\n1 1 0\n",
            "HAD 2\n+ +\n+ -\n",
            "VS 3 2 2\n11\n12\n",
        ] {
            let doc = parse_document(text).unwrap();
            assert_eq!(doc.to_text().unwrap(), text);
            let json = document_to_json(&doc);
            assert_eq!(document_from_json(&json).unwrap(), doc);
        }
        assert!(parse_document("").is_err());
        assert!(parse_document("XYZ 1\n").is_err());
    }
}
