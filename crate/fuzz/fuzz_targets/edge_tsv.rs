#![no_main]
use grandcgr::grand::{grand_reduce_topology, read_edge_tsv, DegreeOneOrder};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok((topology, _)) = read_edge_tsv(data) {
        // any graph that parses must reduce to a valid matching
        let m = grand_reduce_topology(&topology, 0, DegreeOneOrder::Random);
        m.validate(&topology).unwrap();
    }
});
