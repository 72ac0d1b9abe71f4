//! Shared helpers for the CLI test targets: a synthetic host/pathogen data
//! set and a runner for the built binary.
#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use grandcgr::rng::Xoshiro256;
use grandcgr::sequence::{
    write_fasta, write_interactions, InteractionRecord, Role, SequenceRecord,
};

pub const BIN: &str = env!("CARGO_BIN_EXE_grandcgr");

/// Repository copy of the demo inputs.
pub fn demo_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/demo")
}

struct Organism {
    name: &'static str,
    role: Role,
    prefix: &'static str,
    families: usize,
    /// Relative weights of A, C, G, T.
    weights: [u32; 4],
}

const ORGANISMS: [Organism; 3] = [
    Organism {
        name: "Homo sapiens",
        role: Role::Host,
        prefix: "HS",
        families: 80,
        weights: [25, 25, 25, 25],
    },
    Organism {
        name: "Ebolavirus",
        role: Role::Pathogen,
        prefix: "EV",
        families: 25,
        weights: [35, 15, 15, 35],
    },
    Organism {
        name: "Herpesvirus",
        role: Role::Pathogen,
        prefix: "HV",
        families: 25,
        weights: [15, 35, 35, 15],
    },
];

fn draw_base(rng: &mut Xoshiro256, w: &[u32; 4]) -> u8 {
    let total: u32 = w.iter().sum();
    let mut r = rng.below(total as u64) as u32;
    for (i, &x) in w.iter().enumerate() {
        if r < x {
            return b"ACGT"[i];
        }
        r -= x;
    }
    unreachable!()
}

fn sense_codon(rng: &mut Xoshiro256, w: &[u32; 4]) -> [u8; 3] {
    loop {
        let c = [draw_base(rng, w), draw_base(rng, w), draw_base(rng, w)];
        if !matches!(&c, b"TAA" | b"TAG" | b"TGA") {
            return c;
        }
    }
}

fn random_cds(rng: &mut Xoshiro256, w: &[u32; 4], codons: usize) -> Vec<u8> {
    let mut s = b"ATG".to_vec();
    for _ in 0..codons {
        s.extend(sense_codon(rng, w));
    }
    s.extend(b"TAA");
    s
}

/// Replace roughly one codon in twenty, keeping start and stop.
fn variant(rng: &mut Xoshiro256, w: &[u32; 4], cds: &[u8]) -> Vec<u8> {
    let mut s = cds.to_vec();
    let n = s.len() / 3;
    for i in 1..n - 1 {
        if rng.below(20) == 0 {
            s[3 * i..3 * i + 3].copy_from_slice(&sense_codon(rng, w));
        }
    }
    s
}

pub struct Demo {
    pub records: Vec<SequenceRecord>,
    pub interactions: Vec<InteractionRecord>,
}

/// Gene families of one to three near-identical members per organism, and
/// interactions from a subset of pathogen families to host families, with
/// several member-level interactions per family pair.
pub fn demo(seed: u64) -> Demo {
    let mut rng = Xoshiro256::seed_from_u64(seed);
    let mut records = Vec::new();
    let mut families: Vec<Vec<Vec<String>>> = Vec::new();
    for org in &ORGANISMS {
        let mut fams = Vec::new();
        for f in 0..org.families {
            let codons = 80 + rng.index(120);
            let base = random_cds(&mut rng, &org.weights, codons);
            let members = 1 + rng.index(3);
            let mut ids = Vec::new();
            for m in 0..members {
                let id = format!("{}{:03}.{}", org.prefix, f + 1, m + 1);
                let cds = if m == 0 {
                    base.clone()
                } else {
                    variant(&mut rng, &org.weights, &base)
                };
                records.push(
                    SequenceRecord::new(&id, String::from_utf8(cds).unwrap())
                        .with_organism(org.name)
                        .with_role(org.role),
                );
                ids.push(id);
            }
            fams.push(ids);
        }
        families.push(fams);
    }

    let mut interactions = Vec::new();
    let host = &families[0];
    for fams in &families[1..] {
        for pf in fams.iter().take(12) {
            for _ in 0..1 + rng.index(3) {
                let hf = &host[rng.index(40)];
                for _ in 0..1 + rng.index(2) {
                    let a = hf[rng.index(hf.len())].clone();
                    let b = pf[rng.index(pf.len())].clone();
                    let mut rec = InteractionRecord::new(a, b);
                    rec.evidence = "demo".into();
                    interactions.push(rec);
                }
            }
        }
    }
    // a paralog pair inside one family and a gene with no sequence
    if let Some(f) = host.iter().find(|f| f.len() > 1) {
        interactions.push(InteractionRecord::new(f[0].clone(), f[1].clone()));
    }
    interactions.push(InteractionRecord::new("HS001.1", "XX999.1"));
    Demo {
        records,
        interactions,
    }
}

pub fn write_demo(dir: &Path, seed: u64) -> (PathBuf, PathBuf) {
    fs::create_dir_all(dir).unwrap();
    let d = demo(seed);
    let fasta = dir.join("genes.fasta");
    let ints = dir.join("interactions.tsv");
    let mut buf = Vec::new();
    write_fasta(&mut buf, &d.records).unwrap();
    fs::write(&fasta, buf).unwrap();
    let mut buf = b"#gene_a\tgene_b\tevidence\n".to_vec();
    write_interactions(&mut buf, &d.interactions).unwrap();
    fs::write(&ints, buf).unwrap();
    (fasta, ints)
}

pub fn run(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args);
    for (k, _) in std::env::vars().filter(|(k, _)| k.starts_with("GRANDCGR_")) {
        cmd.env_remove(k);
    }
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

pub fn run_ok(args: &[&str]) -> Output {
    let out = run(args, &[("SOURCE_DATE_EPOCH", "0")]);
    assert!(
        out.status.success(),
        "grandcgr {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}
