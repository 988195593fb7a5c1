#![no_main]
use dirac_stwp::io::{RawConfig, RunConfig};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(raw) = RawConfig::parse(data) {
        if let Ok(cfg) = RunConfig::from_raw(raw) {
            let _ = cfg.echo();
        }
    }
});
