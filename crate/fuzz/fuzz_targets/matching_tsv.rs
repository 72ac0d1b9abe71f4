#![no_main]
use grandcgr::grand::{read_matching_tsv, write_matching_tsv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = read_matching_tsv(data) {
        let mut out = Vec::new();
        write_matching_tsv(&mut out, &m).unwrap();
        assert_eq!(read_matching_tsv(out.as_slice()).unwrap(), m);
    }
});
