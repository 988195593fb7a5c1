#![no_main]
use dirac_stwp::io::{parse_grid, write_grid};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(file) = parse_grid(data) {
        let mut out = Vec::new();
        write_grid(&mut out, &file.grid, &file.params).expect("accepted grid must be writable");
        let again = parse_grid(&out).expect("written grid must parse");
        assert_eq!(again, file);
    }
});
