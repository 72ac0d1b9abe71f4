#![no_main]
use grandcgr::cluster::{read_cluster_tsv, write_cluster_tsv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(clusters) = read_cluster_tsv(data) {
        let mut out = Vec::new();
        write_cluster_tsv(&mut out, &clusters).unwrap();
        assert_eq!(read_cluster_tsv(out.as_slice()).unwrap(), clusters);
    }
});
