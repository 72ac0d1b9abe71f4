#![no_main]
use grandcgr::cgr::parse_pgm;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(pgm) = parse_pgm(data) {
        let _ = pgm.to_grid();
    }
});
