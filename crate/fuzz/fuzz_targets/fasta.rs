#![no_main]
use grandcgr::sequence::{parse_fasta, write_fasta};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(records) = parse_fasta(data) {
        // whatever parses must survive a write/parse cycle unchanged
        let mut out = Vec::new();
        write_fasta(&mut out, &records).unwrap();
        assert_eq!(parse_fasta(out.as_slice()).unwrap(), records);
    }
});
