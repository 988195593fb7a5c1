#![no_main]
use dirac_stwp::io::{parse_curve_table, write_curve_table};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(rows) = parse_curve_table(data) {
        let mut out = Vec::new();
        write_curve_table(&mut out, &rows).unwrap();
        let again = parse_curve_table(std::str::from_utf8(&out).unwrap()).unwrap();
        assert_eq!(again.len(), rows.len());
    }
});
