#![no_main]
use libfuzzer_sys::fuzz_target;
use rgwb_core::protocol::parse_protocol;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_protocol(s) {
        let again = parse_protocol(&p.to_text()).expect("emitted protocol must parse");
        assert_eq!(again, p);
    }
});
