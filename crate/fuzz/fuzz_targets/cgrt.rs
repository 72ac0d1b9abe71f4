#![no_main]
use grandcgr::tensorio::{decode_cgrt, encode_cgrt};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // a file that decodes is canonical: re-encoding gives the same bytes
    if let Ok(file) = decode_cgrt(data) {
        assert_eq!(encode_cgrt(&file).unwrap(), data);
    }
});
