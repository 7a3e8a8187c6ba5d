#![no_main]
use libfuzzer_sys::fuzz_target;
use rgwb_core::manifest::parse_manifest;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(m) = parse_manifest(s) {
        assert_eq!(parse_manifest(&m.to_toml()).expect("emitted manifest must parse"), m);
    }
});
