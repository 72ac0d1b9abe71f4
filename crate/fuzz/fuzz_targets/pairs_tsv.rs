#![no_main]
use grandcgr::dataset::{read_pairs_tsv, write_pairs_tsv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(pairs) = read_pairs_tsv(data) {
        let mut out = Vec::new();
        write_pairs_tsv(&mut out, &pairs).unwrap();
        assert_eq!(read_pairs_tsv(out.as_slice()).unwrap(), pairs);
    }
});
