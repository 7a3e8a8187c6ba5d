use std::fs;
use std::path::PathBuf;

use rgwb_core::manifest::parse_manifest;
use rgwb_core::model::expr::parse_poly;
use rgwb_core::model::parse_model;
use rgwb_core::protocol::parse_protocol;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn files(dir: &str, ext: Option<&str>) -> Vec<(PathBuf, String)> {
    let mut out: Vec<_> = fs::read_dir(root().join(dir))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| ext.is_none_or(|x| p.extension().is_some_and(|e| e == x)))
        .map(|p| {
            let text = fs::read_to_string(&p).unwrap();
            (p, text)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "nothing in {dir}");
    out
}

#[test]
fn experiment_inputs_parse() {
    for (p, t) in files("experiments", Some("model")) {
        parse_model(&t).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
    for (p, t) in files("experiments", Some("protocol")) {
        parse_protocol(&t).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
    for (p, t) in files("experiments", Some("toml")) {
        parse_manifest(&t).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
}

#[test]
fn fuzz_seeds_replay() {
    for (p, t) in files("fuzz/corpus/parse_model", None) {
        parse_model(&t).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
    for (p, t) in files("fuzz/corpus/parse_protocol", None) {
        let proto = parse_protocol(&t).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        assert_eq!(parse_protocol(&proto.to_text()).unwrap(), proto);
    }
    for (p, t) in files("fuzz/corpus/parse_nonlinearity", None) {
        parse_poly(&t, 1, 1, |n| matches!(n, "y" | "ydot" | "mu" | "beta" | "eps"))
            .unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
    for (p, t) in files("fuzz/corpus/parse_manifest", None) {
        let m = parse_manifest(&t).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        assert_eq!(parse_manifest(&m.to_toml()).unwrap(), m);
    }
}

#[test]
fn malformed_inputs_report_positions() {
    let e = parse_model("omega = 2\nparam mu = 0.1\nnonlinearity = mu*y^2 + q\n").unwrap_err();
    assert!(e.to_string().starts_with("3:"), "{e}");
    let e = parse_protocol("loop = mu, omega\nradii = 0.01, x\n").unwrap_err();
    assert!(e.to_string().starts_with("2:"), "{e}");
    for junk in ["", "\0\0", "((((", "y^", "1/0", "mu*", "ydot ydot"] {
        assert!(parse_poly(junk, 1, 1, |n| n == "mu").is_err(), "{junk:?}");
    }
}
