#![no_main]
use dirac_stwp::io::{parse_override, RawConfig, RunConfig};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let mut raw = RawConfig::default();
    for line in data.lines() {
        if let Ok((k, v)) = parse_override(line) {
            raw.set(&k, &v).expect("parsed override names a known key");
        }
    }
    let _ = RunConfig::from_raw(raw);
});
