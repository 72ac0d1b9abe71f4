//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Tolerances are fixed here, not configurable.
//!
//! Optional real-data checks run when `GRANDCGR_REFERENCE_DATA` names a
//! directory with `arabidopsis/`, `effectork/` and `hpidb/` subdirectories,
//! each holding `genes.fasta`, `interactions.tsv` and `clusters.clstr`.

mod common;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use grandcgr::audit::{bias_report, WARN_ACCURACY};
use grandcgr::augment::{substitute_with, SubstitutionMode};
use grandcgr::cgr::{cell_to_kmer, encode, kmer_cell};
use grandcgr::cluster::ClusterId;
use grandcgr::dataset::{split_dataset, Fractions, Label, LabeledPair, PairSource, SplitManifest};
use grandcgr::grand::{
    grand_reduce_topology, naive_reduce_topology, DegreeOneOrder, Matching, Topology,
};
use grandcgr::rng::Xoshiro256;
use grandcgr::sequence::{CodonTable, SequenceRecord};
use grandcgr::tensorio::{
    decode_cgrt, encode_cgrt, read_manifest, CgrtFile, CgrtSample, CgrtValues, Dtype,
};

type Outcome = Result<String, String>;

// ---------------------------------------------------------------- graphs

/// G(n, p) on nodes `0..n`.
fn erdos_renyi(rng: &mut Xoshiro256, n: u32, p: f64) -> Vec<(u32, u32)> {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.next_f64() < p {
                edges.push((a, b));
            }
        }
    }
    edges
}

/// Preferential attachment: each new node links to `m` distinct earlier
/// nodes chosen with probability proportional to degree.
fn barabasi_albert(rng: &mut Xoshiro256, n: u32, m: u32) -> Vec<(u32, u32)> {
    let mut edges = Vec::new();
    let mut ends: Vec<u32> = Vec::new();
    let seed = (m + 1).min(n);
    for a in 0..seed {
        for b in a + 1..seed {
            edges.push((a, b));
            ends.extend([a, b]);
        }
    }
    for v in seed..n {
        let mut targets = BTreeSet::new();
        while targets.len() < m as usize {
            targets.insert(ends[rng.index(ends.len())]);
        }
        for t in targets {
            edges.push((t, v));
            ends.extend([t, v]);
        }
    }
    edges
}

/// Matching, subset and degree-exactly-one checks written against the raw
/// edge list, independent of `Matching::validate`.
fn check_matching(n: u32, edges: &[(u32, u32)], m: &Matching) -> Result<(), String> {
    let edge_set: BTreeSet<(u32, u32)> = edges
        .iter()
        .map(|&(a, b)| (a.min(b), a.max(b)))
        .filter(|(a, b)| a != b)
        .collect();
    let mut degree: HashMap<u32, u32> = HashMap::new();
    for &(ClusterId(a), ClusterId(b)) in &m.retained_edges {
        if !edge_set.contains(&(a.min(b), a.max(b))) {
            return Err(format!("retained edge {a}-{b} not in input"));
        }
        *degree.entry(a).or_default() += 1;
        *degree.entry(b).or_default() += 1;
    }
    if let Some((v, d)) = degree.iter().find(|(_, &d)| d != 1) {
        return Err(format!("node {v} has retained degree {d}"));
    }
    let freed: BTreeSet<u32> = m.freed_clusters.iter().map(|c| c.0).collect();
    if freed.len() != m.freed_clusters.len() || freed.iter().any(|v| degree.contains_key(v)) {
        return Err("freed list overlaps itself or the retained nodes".into());
    }
    if freed.len() + degree.len() != n as usize {
        return Err(format!(
            "{} freed + {} retained != {n} nodes",
            freed.len(),
            degree.len()
        ));
    }
    Ok(())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = Xoshiro256::seed_from_u64(1);
    let mut violations = Vec::new();
    for g in 0..1000u64 {
        let n = 2 + rng.index(199) as u32;
        let edges = if g % 2 == 0 {
            let avg_degree = 0.5 + 5.5 * rng.next_f64();
            erdos_renyi(&mut rng, n, (avg_degree / (n - 1) as f64).min(1.0))
        } else {
            let m = 1 + rng.index(3) as u32;
            barabasi_albert(&mut rng, n, m)
        };
        let topo = Topology::from_pairs(n, &edges);
        let runs = [
            (
                "grand/random",
                grand_reduce_topology(&topo, g, DegreeOneOrder::Random),
            ),
            (
                "grand/ascending",
                grand_reduce_topology(&topo, g, DegreeOneOrder::Ascending),
            ),
            ("naive", naive_reduce_topology(&topo, g)),
        ];
        for (name, m) in runs {
            if let Err(e) = check_matching(n, &edges, &m) {
                violations.push(format!("graph {g} {name}: {e}"));
            }
        }
    }
    let t = start.elapsed();
    let msg = format!(
        "1000 graphs x 3 reductions, {} violations, {:.1}s (limit 60s)",
        violations.len(),
        t.as_secs_f64()
    );
    if violations.is_empty() && t < Duration::from_secs(60) {
        Ok(msg)
    } else {
        Err(format!("{msg}; first: {:?}", violations.first()))
    }
}

/// Maximum matching size by dynamic programming over node subsets.
fn max_matching(n: u32, edges: &[(u32, u32)]) -> usize {
    let mut adj = vec![0u32; n as usize];
    for &(a, b) in edges {
        if a != b {
            adj[a as usize] |= 1 << b;
            adj[b as usize] |= 1 << a;
        }
    }
    let full = (1u32 << n) - 1;
    let mut best = vec![0u8; 1 << n];
    for mask in 1..=full {
        let v = mask.trailing_zeros();
        let rest = mask & !(1 << v);
        let mut b = best[rest as usize];
        let mut nb = adj[v as usize] & rest;
        while nb != 0 {
            let u = nb.trailing_zeros();
            nb &= nb - 1;
            b = b.max(1 + best[(rest & !(1 << u)) as usize]);
        }
        best[mask as usize] = b;
    }
    best[full as usize] as usize
}

fn connected(n: u32, edges: &[(u32, u32)]) -> bool {
    let mut seen = 1u32;
    let mut grew = true;
    while grew {
        grew = false;
        for &(a, b) in edges {
            let (ia, ib) = (seen >> a & 1, seen >> b & 1);
            if ia != ib {
                seen |= 1 << a | 1 << b;
                grew = true;
            }
        }
    }
    seen == (1 << n) - 1
}

fn criterion_2() -> Outcome {
    let mut graphs: Vec<(u32, Vec<(u32, u32)>)> = Vec::new();
    for n in 1..=6u32 {
        let all: Vec<(u32, u32)> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect();
        for subset in 0u32..1 << all.len() {
            let edges: Vec<(u32, u32)> = all
                .iter()
                .enumerate()
                .filter(|(i, _)| subset >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            if connected(n, &edges) {
                graphs.push((n, edges));
            }
        }
    }
    let exhaustive = graphs.len();
    let mut rng = Xoshiro256::seed_from_u64(2);
    for _ in 0..500 {
        let n = 2 + rng.index(9) as u32;
        let p = 0.1 + 0.6 * rng.next_f64();
        graphs.push((n, erdos_renyi(&mut rng, n, p)));
    }
    let mut ratio_sum = 0.0;
    let mut counted = 0usize;
    let mut over = Vec::new();
    let mut short = 0usize;
    let mut naive_short = 0usize;
    for (i, (n, edges)) in graphs.iter().enumerate() {
        let opt = max_matching(*n, edges);
        let topo = Topology::from_pairs(*n, edges);
        let random = grand_reduce_topology(&topo, i as u64, DegreeOneOrder::Random).len();
        let ascending = grand_reduce_topology(&topo, i as u64, DegreeOneOrder::Ascending).len();
        if random > opt || ascending > opt {
            over.push(i);
        }
        short += usize::from(random < opt);
        // the oracle must be able to tell: random maximal matchings fall short
        naive_short += usize::from(naive_reduce_topology(&topo, i as u64).len() < opt);
        if opt > 0 {
            ratio_sum += random as f64 / opt as f64;
            counted += 1;
        }
    }
    let ratio = ratio_sum / counted as f64;
    let msg = format!(
        "{exhaustive} connected graphs on <=6 nodes + 500 random on <=10: {} above optimum, {short} below it, mean |GRAND|/max = {ratio:.5} (bar 0.90); naive below optimum on {naive_short}",
        over.len()
    );
    if over.is_empty() && ratio >= 0.9 && naive_short > 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// `(dataset, expected retained pairs)` for the optional real-data check.
const REFERENCE_RETAINED: [(&str, usize); 3] =
    [("arabidopsis", 1106), ("effectork", 183), ("hpidb", 3282)];

fn reference_data() -> Option<PathBuf> {
    std::env::var_os("GRANDCGR_REFERENCE_DATA").map(PathBuf::from)
}

fn run_stage(args: &[&str]) -> Result<(), String> {
    let out = common::run(args, &[]);
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "grandcgr {args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        ))
    }
}

fn reference_dataset(name: &str, out: &Path) -> Result<(), String> {
    let dir = reference_data().unwrap().join(name);
    let s = |p: &Path| p.to_str().unwrap().to_string();
    let (fasta, clstr, ints, o) = (
        s(&dir.join("genes.fasta")),
        s(&dir.join("clusters.clstr")),
        s(&dir.join("interactions.tsv")),
        s(out),
    );
    run_stage(&["cluster", "--fasta", &fasta, "--clstr", &clstr, "--out", &o])?;
    run_stage(&["reduce", "--interactions", &ints, "--out", &o])
}

fn criterion_3() -> Outcome {
    let mut rng = Xoshiro256::seed_from_u64(3);
    let (mut grand_total, mut naive_total) = (0.0, 0.0);
    let mut below = 0;
    for g in 0..20u64 {
        let topo = Topology::from_pairs(200, &barabasi_albert(&mut rng, 200, 2));
        let grand = grand_reduce_topology(&topo, g, DegreeOneOrder::Random).len() as f64;
        let naive = (0..100u64)
            .map(|s| naive_reduce_topology(&topo, 1000 * g + s).len() as f64)
            .sum::<f64>()
            / 100.0;
        if grand < naive {
            below += 1;
        }
        grand_total += grand;
        naive_total += naive;
    }
    let gain = 100.0 * (grand_total - naive_total) / naive_total;
    let mut msg = format!(
        "20 BA(200,2) graphs: mean GRAND {:.2} vs naive {:.2} over 100 seeds, gain {gain:+.2}% ({below} graphs individually below)",
        grand_total / 20.0,
        naive_total / 20.0
    );
    let mut ok = grand_total >= naive_total;
    match reference_data() {
        None => msg.push_str("; real-data retention skipped (GRANDCGR_REFERENCE_DATA unset)"),
        Some(_) => {
            for (name, want) in REFERENCE_RETAINED {
                let tmp = tempfile::tempdir().unwrap();
                let got = reference_dataset(name, tmp.path()).and_then(|()| {
                    let m = read_manifest(&tmp.path().join("reduce.manifest.json"))
                        .map_err(|e| e.to_string())?;
                    Ok(m.counts["retained_pairs"] as usize)
                });
                match got {
                    Ok(n) => {
                        let within = (n as f64 - want as f64).abs() <= 0.02 * want as f64;
                        ok &= within;
                        msg.push_str(&format!("; {name} {n} (target {want} +-2%)"));
                    }
                    Err(e) => {
                        ok = false;
                        msg.push_str(&format!("; {name} failed: {e}"));
                    }
                }
            }
        }
    }
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

// ------------------------------------------------------------------- CGR

fn random_seq(rng: &mut Xoshiro256, alphabet: &[u8], len: usize) -> Vec<u8> {
    (0..len)
        .map(|_| alphabet[rng.index(alphabet.len())])
        .collect()
}

/// Cell of the last point of a chaos game with corners A(0,0) C(0,1)
/// G(1,1) T(1,0), computed in exact dyadic arithmetic.
fn chaos_game_cell(kmer: &[u8]) -> (u32, u32) {
    let k = kmer.len() as u32;
    // positions scaled by 2^k so halving stays integral
    let (mut x, mut y) = (0u64, 0u64);
    for &c in kmer {
        let (cx, cy) = match c {
            b'A' => (0, 0),
            b'C' => (0, 1),
            b'G' => (1, 1),
            _ => (1, 0),
        };
        x = (x + (cx << k)) / 2;
        y = (y + (cy << k)) / 2;
    }
    (x as u32, y as u32)
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut rng = Xoshiro256::seed_from_u64(4);
    let mut mismatches = 0usize;
    for i in 0..100 {
        let len = 50 + rng.index(950);
        let alphabet: &[u8] = if i % 4 == 0 { b"ACGTN" } else { b"ACGT" };
        let seq = random_seq(&mut rng, alphabet, len);
        for k in 1..=7usize {
            let mut dict: HashMap<&[u8], u32> = HashMap::new();
            for w in seq
                .windows(k)
                .filter(|w| w.iter().all(|b| b"ACGT".contains(b)))
            {
                *dict.entry(w).or_default() += 1;
            }
            let side = 1usize << k;
            let mut want = vec![0u32; side * side];
            for (kmer, n) in dict {
                let (x, y) = kmer_cell(kmer).unwrap();
                want[y as usize * side + x as usize] = n;
            }
            if encode(&seq, k).unwrap().counts() != want.as_slice() {
                mismatches += 1;
            }
        }
    }
    let mut bijection_errors = 0usize;
    for k in 1..=7usize {
        let side = 1u32 << k;
        let mut seen = vec![false; (side * side) as usize];
        for code in 0..1u32 << (2 * k) {
            let kmer: Vec<u8> = (0..k)
                .map(|i| b"ACGT"[(code >> (2 * (k - 1 - i)) & 3) as usize])
                .collect();
            let (x, y) = kmer_cell(&kmer).unwrap();
            let slot = &mut seen[(y * side + x) as usize];
            if *slot
                || (x, y) != chaos_game_cell(&kmer)
                || cell_to_kmer(x, y, k).unwrap().as_bytes() != kmer
            {
                bijection_errors += 1;
            }
            *slot = true;
        }
        bijection_errors += seen.iter().filter(|s| !**s).count();
    }
    let t = start.elapsed();
    let msg = format!(
        "700 encodings vs dictionary counter: {mismatches} mismatches; k<=7 cell map vs chaos game and inverse: {bijection_errors} errors; {:.1}s (limit 30s)",
        t.as_secs_f64()
    );
    if mismatches == 0 && bijection_errors == 0 && t < Duration::from_secs(30) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_5() -> Outcome {
    let mut rng = Xoshiro256::seed_from_u64(5);
    let mut violations = 0;
    for _ in 0..1000 {
        let len = 1 + rng.index(500);
        let seq = random_seq(&mut rng, b"ACGTACGTACGTNRYSWKMBDHV", len);
        let k = 1 + rng.index(len.min(12));
        let g = encode(&seq, k).unwrap();
        if g.total() + g.skipped != (len - k + 1) as u64 {
            violations += 1;
        }
    }
    let msg = format!("1000 sequences with ambiguity codes: {violations} violations");
    if violations == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn random_cds(rng: &mut Xoshiro256, codons: usize) -> String {
    let mut s = String::from("ATG");
    for _ in 0..codons {
        s.push_str(std::str::from_utf8(&random_seq(rng, b"ACGT", 3)).unwrap());
    }
    s
}

fn criterion_6() -> Outcome {
    let table = CodonTable::standard();
    let mut rng = Xoshiro256::seed_from_u64(6);
    let mut violations = 0;
    for i in 0..1000 {
        let codons = 1 + rng.index(300);
        let cds = random_cds(&mut rng, codons);
        let mode = if i % 2 == 0 {
            SubstitutionMode::IncludeSelf
        } else {
            SubstitutionMode::ExcludeSelf
        };
        let syn = substitute_with(&cds, &table, &mut rng, mode).unwrap();
        if syn.len() != cds.len()
            || table.translate(&syn).unwrap() != table.translate(&cds).unwrap()
        {
            violations += 1;
        }
    }
    const DRAWS: usize = 100_000;
    let mut worst_z: f64 = 0.0;
    let mut classes = 0;
    for (aa, codons) in table.amino_acids() {
        if codons.len() < 2 {
            continue;
        }
        classes += 1;
        let from = std::str::from_utf8(&codons[0]).unwrap().repeat(DRAWS);
        let out = substitute_with(
            &from,
            &table,
            &mut Xoshiro256::seed_from_u64(u64::from(aa)),
            SubstitutionMode::IncludeSelf,
        )
        .unwrap();
        let mut hist: BTreeMap<&[u8], usize> = BTreeMap::new();
        for c in out.as_bytes().chunks_exact(3) {
            *hist.entry(c).or_default() += 1;
        }
        let p = 1.0 / codons.len() as f64;
        let sd = (DRAWS as f64 * p * (1.0 - p)).sqrt();
        for c in codons {
            let n = hist.get(&c[..]).copied().unwrap_or(0) as f64;
            worst_z = worst_z.max((n - DRAWS as f64 * p).abs() / sd);
        }
    }
    let msg = format!(
        "1000 CDS: {violations} translation changes; {classes} synonym classes x {DRAWS} draws: worst |z| = {worst_z:.2} (bound 4)"
    );
    if violations == 0 && worst_z <= 4.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

// ----------------------------------------------------------------- audit

struct AuditSet {
    pairs: Vec<LabeledPair>,
    records: Vec<SequenceRecord>,
}

impl AuditSet {
    fn push(&mut self, host: usize, pathogen: usize, label: Label) {
        let i = self.pairs.len();
        let (a, b) = (format!("s{i:04}a"), format!("s{i:04}b"));
        self.records
            .push(SequenceRecord::new(&a, "ACGT").with_organism(format!("host{host}")));
        self.records
            .push(SequenceRecord::new(&b, "ACGT").with_organism(format!("pathogen{pathogen}")));
        let source = if label == Label::Positive {
            PairSource::MatchedEdge
        } else {
            PairSource::SampledNegative
        };
        self.pairs.push(LabeledPair::new(a, b, label, source));
    }
}

fn criterion_7() -> Outcome {
    const ORGS: usize = 10;
    // labels decided by organism pair
    let mut rng = Xoshiro256::seed_from_u64(7);
    let mut biased = AuditSet {
        pairs: vec![],
        records: vec![],
    };
    for _ in 0..2000 {
        let (h, p) = (rng.index(ORGS), rng.index(ORGS));
        let label = if (h * 7 + p * 3) % 5 < 2 {
            Label::Positive
        } else {
            Label::Negative
        };
        biased.push(h, p, label);
    }
    let split = split_dataset(&biased.pairs, Fractions::default(), 7).map_err(|e| e.to_string())?;
    let a = bias_report(&biased.pairs, &biased.records, &split, 5).map_err(|e| e.to_string())?;

    // every organism pair has both labels equally often in every split
    let mut matched = AuditSet {
        pairs: vec![],
        records: vec![],
    };
    let mut manifest = SplitManifest {
        seed: 0,
        fractions: Fractions::default(),
        train: vec![],
        validation: vec![],
        test: vec![],
        provenance: BTreeMap::new(),
    };
    for h in 0..ORGS {
        for p in 0..ORGS {
            for j in 0..20 {
                let label = if j % 2 == 0 {
                    Label::Positive
                } else {
                    Label::Negative
                };
                matched.push(h, p, label);
                let id = matched.pairs.last().unwrap().pair_id();
                match j / 2 {
                    0..=5 => manifest.train.push(id),
                    6..=7 => manifest.validation.push(id),
                    _ => manifest.test.push(id),
                }
            }
        }
    }
    for list in [
        &mut manifest.train,
        &mut manifest.validation,
        &mut manifest.test,
    ] {
        list.sort();
    }
    let b =
        bias_report(&matched.pairs, &matched.records, &manifest, 5).map_err(|e| e.to_string())?;

    let msg = format!(
        "organism-determined labels: accuracy {:.4} (>0.95), warn={}; balanced: accuracy {:.4} (0.5+-0.05), warn={} (threshold {WARN_ACCURACY}); {} and {} samples",
        a.accuracy,
        a.warn,
        b.accuracy,
        b.warn,
        biased.pairs.len(),
        matched.pairs.len()
    );
    let mut ok = a.accuracy > 0.95 && a.warn && (b.accuracy - 0.5).abs() <= 0.05 && !b.warn;
    let mut msg = msg;
    if let Some(dir) = reference_data() {
        let tmp = tempfile::tempdir().unwrap();
        let d = dir.join("hpidb");
        let s = |p: PathBuf| p.to_str().unwrap().to_string();
        let o = s(tmp.path().to_path_buf());
        let r = run_stage(&[
            "cluster",
            "--fasta",
            &s(d.join("genes.fasta")),
            "--clstr",
            &s(d.join("clusters.clstr")),
            "--out",
            &o,
        ])
        .and_then(|()| {
            let ints = s(d.join("interactions.tsv"));
            run_stage(&["reduce", "--interactions", &ints, "--out", &o])?;
            run_stage(&["negatives", "--interactions", &ints, "--out", &o])?;
            run_stage(&["split", "--out", &o])?;
            run_stage(&["audit", "--out", &o])
        })
        .and_then(|()| fs::read(tmp.path().join("bias_report.json")).map_err(|e| e.to_string()));
        match r {
            Ok(bytes) => {
                let v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
                msg.push_str(&format!(
                    "; hpidb masked accuracy {} (reported 0.8767, not asserted)",
                    v["accuracy"]
                ));
            }
            Err(e) => {
                ok = false;
                msg.push_str(&format!("; hpidb audit failed: {e}"));
            }
        }
    }
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

// ---------------------------------------------------------------- tensor

fn layout_size(k: u8, channels: u8, ids: &[&str]) -> usize {
    let per = 4 * channels as usize * (1usize << (2 * k as usize));
    20 + ids.iter().map(|id| 1 + 2 + id.len() + per).sum::<usize>()
}

fn criterion_8() -> Outcome {
    let mut rng = Xoshiro256::seed_from_u64(8);
    let mut failures = Vec::new();
    let mut combos = 0;
    for dtype in [Dtype::Counts, Dtype::Normalized] {
        for k in 1..=12u8 {
            for channels in [1u8, 2] {
                combos += 1;
                let n_values = channels as usize * (1usize << (2 * k as usize));
                let n_samples = if k <= 8 { 3 } else { 1 };
                let mut file = CgrtFile::new(dtype, k, channels);
                let mut ids = Vec::new();
                for s in 0..n_samples {
                    let id = format!("pair{s}|k{k}");
                    let values = match dtype {
                        Dtype::Counts => CgrtValues::Counts(
                            (0..n_values).map(|_| rng.next_u64() as u32).collect(),
                        ),
                        Dtype::Normalized => CgrtValues::Normalized(
                            (0..n_values).map(|_| rng.next_f64() as f32).collect(),
                        ),
                    };
                    let label = if s % 2 == 0 {
                        Label::Positive
                    } else {
                        Label::Negative
                    };
                    file.samples.push(CgrtSample {
                        label,
                        id: id.clone(),
                        values,
                    });
                    ids.push(id);
                }
                let bytes = encode_cgrt(&file).map_err(|e| e.to_string())?;
                let ids: Vec<&str> = ids.iter().map(String::as_str).collect();
                if bytes.len() != layout_size(k, channels, &ids) {
                    failures.push(format!(
                        "{dtype:?} k={k} c={channels}: size {}",
                        bytes.len()
                    ));
                }
                match decode_cgrt(&bytes) {
                    Ok(back) if back == file => {}
                    _ => failures.push(format!("{dtype:?} k={k} c={channels}: round trip")),
                }
            }
        }
    }
    let golden_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/golden");
    let mut golden = 0;
    for entry in fs::read_dir(&golden_dir).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        let bytes = fs::read(&path).map_err(|e| e.to_string())?;
        match decode_cgrt(&bytes).and_then(|f| encode_cgrt(&f)) {
            Ok(again) if again == bytes => golden += 1,
            _ => failures.push(format!(
                "golden {} does not re-encode identically",
                path.display()
            )),
        }
    }
    let msg = format!("{combos} dtype/k/channel combinations round-tripped and sized; {golden} golden files re-encode byte-identically; {} failures", failures.len());
    if failures.is_empty() && golden > 0 {
        Ok(msg)
    } else {
        Err(format!("{msg}: {failures:?}"))
    }
}

// -------------------------------------------------------------- pipeline

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect()
}

/// Compare two output directories: manifests without their timestamps,
/// everything else byte for byte. `only` restricts the comparison.
fn compare_dirs(a: &Path, b: &Path, only: Option<&BTreeSet<String>>) -> Vec<String> {
    let (fa, fb) = (files(a), files(b));
    let mut diffs = Vec::new();
    for (name, bytes) in &fa {
        if only.is_some_and(|o| !o.contains(name)) {
            continue;
        }
        let Some(other) = fb.get(name) else {
            diffs.push(format!("{name} missing"));
            continue;
        };
        let same = if name.ends_with("manifest.json") {
            let parse = |p: &Path| read_manifest(p).unwrap().without_timestamp();
            parse(&a.join(name)) == parse(&b.join(name))
        } else {
            bytes == other
        };
        if !same {
            diffs.push(name.clone());
        }
    }
    diffs
}

fn criterion_9() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let demo = common::demo_dir();
    let fasta = demo.join("genes.fasta");
    let ints = demo.join("interactions.tsv");
    let (fasta, ints) = (fasta.to_str().unwrap(), ints.to_str().unwrap());
    let dirs: Vec<PathBuf> = ["run1", "run2", "staged"]
        .iter()
        .map(|d| tmp.path().join(d))
        .collect();
    let o: Vec<&str> = dirs.iter().map(|d| d.to_str().unwrap()).collect();
    for out in &o[..2] {
        run_stage(&[
            "pipeline",
            "--fasta",
            fasta,
            "--interactions",
            ints,
            "--seed",
            "11",
            "--out",
            out,
        ])?;
    }
    let staged: [&[&str]; 8] = [
        &["cluster", "--fasta", fasta],
        &["reduce", "--interactions", ints],
        &["negatives", "--interactions", ints],
        &["split"],
        &["augment"],
        &["encode"],
        &["audit"],
        &["stats"],
    ];
    for args in staged {
        let mut full = args.to_vec();
        full.extend(["--seed", "11", "--out", o[2]]);
        run_stage(&full)?;
    }
    let twice = compare_dirs(&dirs[0], &dirs[1], None);
    let mut stage_files: BTreeSet<String> = files(&dirs[2]).into_keys().collect();
    stage_files.remove("manifest.json");
    let composed = compare_dirs(&dirs[0], &dirs[2], Some(&stage_files));
    let n_files = files(&dirs[0]).len();
    let cgrt = files(&dirs[0])
        .keys()
        .filter(|k| k.ends_with(".cgrt"))
        .count();
    let msg = format!(
        "two pipeline runs: {n_files} files ({cgrt} CGRT), {} differ; pipeline vs 8 separate subcommands: {} of {} files differ",
        twice.len(),
        composed.len(),
        stage_files.len()
    );
    if twice.is_empty() && composed.is_empty() && cgrt == 3 {
        Ok(msg)
    } else {
        Err(format!("{msg}: {twice:?} {composed:?}"))
    }
}

type Criterion = (u32, &'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "GRAND matching validity", criterion_1),
        (2, "maximum-matching oracle", criterion_2),
        (3, "retention dominance", criterion_3),
        (4, "CGR oracle equivalence", criterion_4),
        (5, "count conservation", criterion_5),
        (6, "synonymous substitution", criterion_6),
        (7, "bias audit calibration", criterion_7),
        (8, "tensor format", criterion_8),
        (9, "pipeline determinism", criterion_9),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (n, name, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|x| x == &n.to_string()) {
            continue;
        }
        match f() {
            Ok(m) => println!("PASS criterion {n} ({name}): {m}"),
            Err(m) => {
                failed += 1;
                println!("FAIL criterion {n} ({name}): {m}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
