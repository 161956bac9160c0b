use freqrect::format::{parse_fr_set, serialize_fr_set};
use freqrect::mofs2p::build_mofs2p;

#[test]
fn p7_matches_fixture() {
    let text = include_str!("fixtures/mofs14.frs");
    let want = parse_fr_set(text).unwrap();
    let got = build_mofs2p(7).unwrap();
    for (i, (g, w)) in got.iter().zip(&want).enumerate() {
        assert_eq!(g, w, "F_{}", i + 1);
    }
    assert_eq!(serialize_fr_set(&got), text);
}
