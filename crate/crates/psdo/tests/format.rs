use std::sync::Arc;

use psdo::format::{load_symbol, LoadedSymbol, SymbolFile};
use psdo_core::scalar::{exact, rational, Exact};
use psdo_core::symbol::{Amplitude, PolySymbol, RationalSymbol};
use tempfile::TempDir;

#[test]
fn files_round_trip_through_disk() {
    let dir = TempDir::new().unwrap();
    let p = PolySymbol::<Exact>::from_terms(
        2,
        [
            (vec![1, 0], vec![0, 2], exact(rational(-3, 7), rational(1, 2))),
            (vec![0, 0], vec![0, 0], exact(rational(5, 1), rational(0, 1))),
        ],
    )
    .unwrap();
    let r = RationalSymbol::new(p.clone(), Arc::new(PolySymbol::one(2).add(&PolySymbol::x(2, 0).pow(2))), 3).unwrap();
    let amp = Amplitude::from_terms(1, [(vec![1], vec![2], vec![1], exact(rational(2, 3), rational(0, 1)))]).unwrap();
    for (name, file) in [
        ("p.json", SymbolFile::from_poly(&p)),
        ("r.json", SymbolFile::from_rational(&r)),
        ("a.json", SymbolFile::from_amplitude(&amp)),
    ] {
        let path = dir.path().join(name);
        file.write(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let (back, sym) = load_symbol(&path).unwrap();
        assert_eq!(back, file);
        assert_eq!(sym.to_file().to_json(), text);
    }
    let LoadedSymbol::Poly(q) = load_symbol(&dir.path().join("p.json")).unwrap().1 else { panic!() };
    assert_eq!(q, p);
}

#[test]
fn invalid_files_are_rejected_with_context() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("x.json");
    std::fs::write(
        &path,
        r#"{"dim": 1, "representation": "poly", "terms": [{"x": [1, 0], "xi": [0], "re": "1", "im": "0"}]}"#,
    )
    .unwrap();
    let e = load_symbol(&path).unwrap_err().to_string();
    assert!(e.contains("x.json") && e.contains("term 0"), "{e}");
    std::fs::write(&path, r#"{"dim": 1, "representation": "poly", "extra": 1}"#).unwrap();
    assert!(load_symbol(&path).unwrap_err().to_string().contains("line 1"));
    assert!(load_symbol(&dir.path().join("missing.json")).is_err());
}
