#![no_main]
use libfuzzer_sys::fuzz_target;
use rgwb_core::model::expr::parse_poly;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let _ = parse_poly(s, 1, 1, |name| matches!(name, "y" | "ydot" | "mu" | "beta" | "eps"));
    }
});
