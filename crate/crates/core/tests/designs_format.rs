use freqrect::designs::{validate_fr, validate_oa, FrequencyRectangle, Grid, HadamardMatrix, VectorSet};
use freqrect::error::{Axis, Error};
use freqrect::format::{
    document_from_json, document_to_json, parse_document, parse_fr, parse_fr_set, parse_hadamard,
    parse_oa, parse_vector_set, serialize_fr, serialize_fr_set, serialize_hadamard, serialize_oa,
    serialize_vector_set, Document,
};
use freqrect::gf::Field;
use freqrect::hadamard::{normalize, sylvester};
use proptest::prelude::*;

const W6_MOFR: &str = include_str!("fixtures/w6_mofr.frs");
const MOFS14: &str = include_str!("fixtures/mofs14.frs");

#[test]
fn fr_validation_examples() {
    let set = parse_fr_set(W6_MOFR).unwrap();
    assert_eq!(set[0].params(), (4, 4, 2));

    let zeros = Grid::filled(2, 2, 0);
    match validate_fr(zeros, 2) {
        Err(Error::Frequency(v)) => assert_eq!((v.axis, v.index), (Axis::Row, 0)),
        other => panic!("{other:?}"),
    }

    let latin = Grid::from_rows(&[[0u8, 1, 2], [1, 2, 0], [2, 0, 1]]).unwrap();
    assert!(validate_fr(latin, 3).is_ok());

    // 2x4 binary grid balanced on rows but not on columns.
    let rows_only = Grid::from_rows(&[[0u8, 0, 1, 1], [0, 0, 1, 1]]).unwrap();
    match validate_fr(rows_only, 2) {
        Err(Error::Frequency(v)) => assert_eq!(v.axis, Axis::Column),
        other => panic!("{other:?}"),
    }
    assert!(matches!(validate_fr(Grid::filled(3, 2, 0), 2), Err(Error::Shape(_))));
    assert!(matches!(validate_fr(Grid::filled(2, 2, 2), 2), Err(Error::SymbolOutOfRange { .. })));
}

#[test]
fn complement_examples() {
    let g = Grid::from_rows(&[[0u8, 1], [1, 0]]).unwrap();
    assert_eq!(g.complement().unwrap(), Grid::from_rows(&[[1u8, 0], [0, 1]]).unwrap());
    assert_eq!(Grid::filled(1, 4, 0).complement().unwrap(), Grid::filled(1, 4, 1));
    let a1_row0 = Grid::from_digit_rows(&["1111000"]).unwrap();
    assert_eq!(a1_row0.complement().unwrap(), Grid::from_digit_rows(&["0000111"]).unwrap());
    assert!(Grid::filled(1, 2, 2).complement().is_err());
}

#[test]
fn oa_validation_examples() {
    let mut rows = Vec::new();
    for x in 0..8u8 {
        rows.push([x >> 2 & 1, x >> 1 & 1, x & 1]);
    }
    let oa = validate_oa(Grid::from_rows(&rows).unwrap(), 2, 3).unwrap();
    assert_eq!((oa.runs(), oa.factors(), oa.strength()), (8, 3, 3));

    let h = normalize(&sylvester(2).unwrap());
    let dropped: Vec<Vec<u8>> =
        (0..4).map(|r| (1..4).map(|c| u8::from(h.get(r, c) == 1)).collect()).collect();
    assert!(validate_oa(Grid::from_rows(&dropped).unwrap(), 2, 2).is_ok());

    let twin = Grid::from_rows(&[[0u8, 0], [0, 0], [1, 1], [1, 1]]).unwrap();
    match validate_oa(twin, 2, 2) {
        Err(Error::OrthogonalArray(v)) => {
            assert_eq!(v.columns, vec![0, 1]);
            assert_eq!(v.tuple, vec![0, 0]);
            assert_eq!(v.found, 2);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn text_round_trips() {
    let fr = "FR 4 4 2\n0 0 1 1\n0 0 1 1\n1 1 0 0\n1 1 0 0\n";
    assert_eq!(serialize_fr(&parse_fr(fr).unwrap()), fr);

    let had = "HAD 2\n+ +\n+ -\n";
    assert_eq!(serialize_hadamard(&parse_hadamard(had).unwrap()), had);

    let set = parse_fr_set(MOFS14).unwrap();
    assert_eq!(set.len(), 6);
    assert_eq!(set[0].params(), (14, 14, 2));
    assert_eq!(serialize_fr_set(&set), MOFS14);

    let vs = "VS 3 2 2\n11\n12\n";
    assert_eq!(serialize_vector_set(&parse_vector_set(vs).unwrap()).unwrap(), vs);

    let oa = "OA 4 3 2 2\n0 0 0\n0 1 1\n1 0 1\n1 1 0\n";
    assert_eq!(serialize_oa(&parse_oa(oa).unwrap()), oa);
}

#[test]
fn lenient_whitespace() {
    let messy = "FR  2 2  2\n0\t1\n1   0\n\n\n\nFR 2 2 2\n1 0\n0 1\n";
    let set = parse_fr_set(messy).unwrap();
    assert_eq!(set.len(), 2);
    assert_eq!(serialize_fr_set(&set), "FR 2 2 2\n0 1\n1 0\n\nFR 2 2 2\n1 0\n0 1\n");
}

#[test]
fn parse_errors_carry_positions() {
    let cases = [
        ("FR 2 2 2\n0 1\n1 x\n", 3, 3),
        ("FR 2 2\n", 1, 7),
        ("XX 1\n", 1, 1),
        ("FR 2 2 2\n0 1\n", 3, 1),
        ("FR 2 2 2\n0\n1 0\n", 2, 2),
        ("HAD 2\n+ +\n+ 0\n", 3, 3),
    ];
    for (text, line, column) in cases {
        match parse_document(text) {
            Err(Error::Parse(e)) => assert_eq!((e.line, e.column), (line, column), "{text:?}: {e}"),
            other => panic!("{text:?}: {other:?}"),
        }
    }
    // Well-formed text that is not a valid design fails validation, not parsing.
    assert!(matches!(parse_fr("FR 2 2 2\n0 0\n1 1\n"), Err(Error::Frequency(_))));
    assert!(matches!(parse_hadamard("HAD 2\n+ +\n+ +\n"), Err(Error::NotHadamard(..))));
}

#[test]
fn vector_set_rules() {
    let f = Field::binary();
    assert!(VectorSet::from_strs(f, &["10", "01"]).is_ok());
    assert!(VectorSet::from_strs(f, &["10", "011"]).is_err());
    assert!(VectorSet::from_strs(f, &["12"]).is_err());
    let big = VectorSet::new(Field::new(11).unwrap(), 1, vec![vec![10]]).unwrap();
    assert!(serialize_vector_set(&big).is_err());
}

#[test]
fn json_examples() {
    let doc = parse_document(W6_MOFR).unwrap();
    let json = document_to_json(&doc);
    assert!(json.contains("\"type\": \"FR_SET\""));
    assert_eq!(document_from_json(&json).unwrap(), doc);

    let had = Document::Hadamard(sylvester(3).unwrap());
    assert_eq!(document_from_json(&document_to_json(&had)).unwrap(), had);

    assert!(document_from_json("{\"type\":\"HAD\",\"order\":2,\"rows\":[\"+++\",\"-\"]}").is_err());
    assert!(document_from_json("{\"type\":\"FR_SET\",\"members\":[{\"m\":1,\"n\":2,\"q\":2,\"rows\":[[0,1]]}]}").is_err());
    assert!(matches!(document_from_json("{"), Err(Error::Parse(_))));
}

/// Random q-ary frequency rectangle: a cyclic pattern with rows and
/// columns permuted.
fn arb_fr() -> impl Strategy<Value = FrequencyRectangle> {
    (2usize..=4, 1usize..=3, 1usize..=3)
        .prop_flat_map(|(q, a, b)| {
            let (m, n) = (q * a, q * b);
            (
                Just((q, m, n)),
                Just((0..m).collect::<Vec<_>>()).prop_shuffle(),
                Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
            )
        })
        .prop_map(|((q, m, n), rp, cp)| {
            let mut cells = Vec::with_capacity(m * n);
            for r in 0..m {
                for c in 0..n {
                    cells.push(((rp[r] + cp[c]) % q) as u8);
                }
            }
            FrequencyRectangle::new(Grid::new(m, n, cells).unwrap(), q).unwrap()
        })
}

fn arb_hadamard() -> impl Strategy<Value = HadamardMatrix> {
    (1u32..=4)
        .prop_flat_map(|k| {
            let n = 1usize << k;
            (
                Just(k),
                Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
                prop::collection::vec(any::<bool>(), n),
            )
        })
        .prop_map(|(k, perm, signs)| {
            let h = sylvester(k).unwrap();
            let rows: Vec<Vec<i8>> = perm
                .iter()
                .zip(&signs)
                .map(|(&r, &s)| h.row(r).iter().map(|&x| if s { -x } else { x }).collect())
                .collect();
            HadamardMatrix::from_rows(&rows).unwrap()
        })
}

proptest! {
    #[test]
    fn fr_set_text_and_json_round_trip(set in prop::collection::vec(arb_fr(), 1..4)) {
        let text = serialize_fr_set(&set);
        prop_assert_eq!(&parse_fr_set(&text).unwrap(), &set);
        let doc = Document::FrSet(set);
        prop_assert_eq!(document_from_json(&document_to_json(&doc)).unwrap(), doc);
    }

    #[test]
    fn hadamard_round_trip(h in arb_hadamard()) {
        prop_assert_eq!(&parse_hadamard(&serialize_hadamard(&h)).unwrap(), &h);
        let doc = Document::Hadamard(h);
        prop_assert_eq!(document_from_json(&document_to_json(&doc)).unwrap(), doc);
    }

    #[test]
    fn vector_set_round_trip(q in prop::sample::select(vec![2u32, 3, 5, 7]), len in 1usize..8, raw in prop::collection::vec(prop::collection::vec(0u8..7, 8), 0..10)) {
        let f = Field::new(q).unwrap();
        let mut vecs: Vec<Vec<u8>> = Vec::new();
        for v in raw {
            let v: Vec<u8> = v[..len].iter().map(|x| x % q as u8).collect();
            if !vecs.contains(&v) {
                vecs.push(v);
            }
        }
        let vs = VectorSet::new(f, len, vecs).unwrap();
        let text = serialize_vector_set(&vs).unwrap();
        prop_assert_eq!(&parse_vector_set(&text).unwrap(), &vs);
        let doc = Document::Vectors(vs);
        prop_assert_eq!(document_from_json(&document_to_json(&doc)).unwrap(), doc);
    }

    #[test]
    fn parser_never_panics(text in "\\PC{0,200}") {
        let _ = parse_document(&text);
        let _ = document_from_json(&text);
    }

    #[test]
    fn parser_survives_mutations(idx in 0usize..200, byte in any::<u8>()) {
        let mut bytes = W6_MOFR.as_bytes().to_vec();
        let i = idx % bytes.len();
        bytes[i] = byte;
        if let Ok(text) = String::from_utf8(bytes) {
            if let Ok(doc) = parse_document(&text) {
                let again = doc.to_text().unwrap();
                prop_assert_eq!(parse_document(&again).unwrap(), doc);
            }
        }
    }
}
