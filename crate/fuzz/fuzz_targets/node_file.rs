#![no_main]
use dirac_stwp::io::{parse_nodes, write_nodes};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(set) = parse_nodes(data) {
        let mut out = Vec::new();
        write_nodes(&mut out, &set).expect("accepted node set must be writable");
        let again = parse_nodes(std::str::from_utf8(&out).unwrap()).expect("written node set must parse");
        assert_eq!(again, set);
    }
});
