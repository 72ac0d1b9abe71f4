//! Synthetic training pairs by synonymous codon substitution.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dataset::{Label, LabeledPair, PairSource};
use crate::rng::{derive_seed, fnv1a, Xoshiro256};
use crate::sequence::{index_by_id, CodonTable, SequenceRecord, TranslateError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubstitutionMode {
    /// Draw from the full synonym set, the original codon included.
    #[default]
    IncludeSelf,
    /// Draw from the synonyms other than the original codon; codons with no
    /// synonym stay unchanged.
    ExcludeSelf,
}

/// Replace every codon by a uniform draw from its synonyms. Output is upper
/// case and translates to the same protein as the input.
pub fn substitute_with(
    cds: &str,
    table: &CodonTable,
    rng: &mut Xoshiro256,
    mode: SubstitutionMode,
) -> Result<String, TranslateError> {
    let bytes = cds.as_bytes();
    if !bytes.len().is_multiple_of(3) {
        return Err(TranslateError::Length(bytes.len()));
    }
    let mut out = Vec::with_capacity(bytes.len());
    for (i, codon) in bytes.chunks_exact(3).enumerate() {
        let syn = table
            .synonyms(codon)
            .ok_or_else(|| TranslateError::AmbiguousCodon {
                codon: String::from_utf8_lossy(codon).into_owned(),
                position: 3 * i + 1,
            })?;
        let pick = match mode {
            SubstitutionMode::IncludeSelf => syn[rng.index(syn.len())],
            SubstitutionMode::ExcludeSelf => {
                let upper = codon.to_ascii_uppercase();
                let own = syn
                    .iter()
                    .position(|c| c[..] == upper[..])
                    .expect("codon is its own synonym");
                if syn.len() == 1 {
                    syn[0]
                } else {
                    // draw among the others by skipping over our own slot
                    let j = rng.index(syn.len() - 1);
                    syn[if j >= own { j + 1 } else { j }]
                }
            }
        };
        out.extend_from_slice(&pick);
    }
    Ok(String::from_utf8(out).expect("codons are ASCII"))
}

/// [`substitute_with`] seeded directly, original codons included in the draw.
pub fn synonymous_substitute(
    cds: &str,
    table: &CodonTable,
    seed: u64,
) -> Result<String, TranslateError> {
    substitute_with(
        cds,
        table,
        &mut Xoshiro256::seed_from_u64(seed),
        SubstitutionMode::IncludeSelf,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AugmentOptions {
    pub n_per_pair: u32,
    pub seed: u64,
    pub mode: SubstitutionMode,
}

impl Default for AugmentOptions {
    fn default() -> Self {
        Self {
            n_per_pair: 10,
            seed: 0,
            mode: SubstitutionMode::IncludeSelf,
        }
    }
}

/// One synthetic replicate of a real pair. The records carry the parents'
/// metadata with new ids `<parent pair id>#<replicate>/a` and `/b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentedPair {
    pub parent: String,
    pub replicate: u32,
    pub label: Label,
    pub record_a: SequenceRecord,
    pub record_b: SequenceRecord,
}

impl AugmentedPair {
    pub fn to_labeled(&self) -> LabeledPair {
        LabeledPair {
            gene_a: self.record_a.id.clone(),
            gene_b: self.record_b.id.clone(),
            label: self.label,
            source: PairSource::Augmented,
            parent: Some(self.parent.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedPair {
    pub pair_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AugmentReport {
    pub pairs: Vec<AugmentedPair>,
    pub skipped: Vec<SkippedPair>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AugmentError {
    #[error("replicates per pair must be at least 1")]
    ZeroReplicates,
}

/// Seed of replicate `r` of the pair `pair_id`.
pub fn replicate_seed(seed: u64, pair_id: &str, r: u32) -> u64 {
    derive_seed(seed, &[fnv1a(pair_id.as_bytes()), r as u64])
}

/// `n_per_pair` replicates of every eligible pair, in input order.
///
/// Pairs are skipped, with a reason, when a gene has no record, when a CDS
/// is empty, not a whole number of codons or contains non-ACGT bases, or
/// when the pair is itself synthetic.
pub fn augment_pairs(
    pairs: &[LabeledPair],
    records: &[SequenceRecord],
    table: &CodonTable,
    opts: &AugmentOptions,
) -> Result<AugmentReport, AugmentError> {
    if opts.n_per_pair == 0 {
        return Err(AugmentError::ZeroReplicates);
    }
    let by_id = index_by_id(records);
    let per_pair: Vec<Result<Vec<AugmentedPair>, SkippedPair>> = pairs
        .par_iter()
        .map(|pair| {
            let pair_id = pair.pair_id();
            let skip = |reason: String| SkippedPair {
                pair_id: pair_id.clone(),
                reason,
            };
            if pair.source == PairSource::Augmented {
                return Err(skip("pair is already synthetic".into()));
            }
            let mut parents = Vec::with_capacity(2);
            for gene in [&pair.gene_a, &pair.gene_b] {
                let rec = by_id
                    .get(gene.as_str())
                    .ok_or_else(|| skip(format!("no sequence for gene {gene:?}")))?;
                if rec.cds.is_empty() {
                    return Err(skip(format!("gene {gene:?} has an empty CDS")));
                }
                let protein = table
                    .translate(&rec.cds)
                    .map_err(|e| skip(format!("gene {gene:?}: {e}")))?
                    .protein;
                parents.push((*rec, protein));
            }
            let replicates = (0..opts.n_per_pair)
                .map(|r| {
                    let mut rng = Xoshiro256::seed_from_u64(replicate_seed(opts.seed, &pair_id, r));
                    let mut synth = parents
                        .iter()
                        .zip(['a', 'b'])
                        .map(|((rec, protein), side)| {
                            let cds = substitute_with(&rec.cds, table, &mut rng, opts.mode)
                                .expect("parent CDS validated");
                            let back = table.translate(&cds).expect("synthetic CDS is well formed");
                            assert_eq!(
                                &back.protein, protein,
                                "synonymous substitution changed the protein of {}",
                                rec.id
                            );
                            SequenceRecord {
                                id: format!("{pair_id}#{r}/{side}"),
                                cds,
                                ..(*rec).clone()
                            }
                        });
                    let record_a = synth.next().expect("two channels");
                    let record_b = synth.next().expect("two channels");
                    AugmentedPair {
                        parent: pair_id.clone(),
                        replicate: r,
                        label: pair.label,
                        record_a,
                        record_b,
                    }
                })
                .collect();
            Ok(replicates)
        })
        .collect();

    let mut report = AugmentReport::default();
    for item in per_pair {
        match item {
            Ok(reps) => report.pairs.extend(reps),
            Err(s) => report.skipped.push(s),
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn singleton_codons_never_change() {
        let t = CodonTable::standard();
        for seed in 0..100 {
            assert_eq!(synonymous_substitute("ATGTGG", &t, seed).unwrap(), "ATGTGG");
        }
    }

    #[test]
    fn leucine_draws_all_six() {
        let t = CodonTable::standard();
        let seen: BTreeSet<String> = (0..500)
            .map(|s| synonymous_substitute("TTA", &t, s).unwrap())
            .collect();
        let want: BTreeSet<String> = ["TTA", "TTG", "CTT", "CTC", "CTA", "CTG"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(seen, want);
    }

    #[test]
    fn exclude_self_changes_degenerate_codons() {
        let t = CodonTable::standard();
        let mut rng = Xoshiro256::seed_from_u64(3);
        for _ in 0..200 {
            let out =
                substitute_with("TTAGGGTAA", &t, &mut rng, SubstitutionMode::ExcludeSelf).unwrap();
            assert_ne!(&out[0..3], "TTA");
            assert_ne!(&out[3..6], "GGG");
            assert_ne!(&out[6..9], "TAA");
            assert_eq!(t.translate(&out).unwrap().protein, "LG*");
        }
        let mut rng = Xoshiro256::seed_from_u64(3);
        assert_eq!(
            substitute_with("ATG", &t, &mut rng, SubstitutionMode::ExcludeSelf).unwrap(),
            "ATG"
        );
    }

    #[test]
    fn preconditions() {
        let t = CodonTable::standard();
        assert_eq!(
            synonymous_substitute("ATGA", &t, 0),
            Err(TranslateError::Length(4))
        );
        assert!(matches!(
            synonymous_substitute("ATGNNN", &t, 0),
            Err(TranslateError::AmbiguousCodon { position: 4, .. })
        ));
        assert_eq!(synonymous_substitute("atgtta", &t, 1).unwrap().len(), 6);
    }

    fn fixture() -> (Vec<LabeledPair>, Vec<SequenceRecord>) {
        let recs = vec![
            SequenceRecord::new("a", "ATGTTACTGGGA").with_organism("host sp"),
            SequenceRecord::new("b", "ATGCCCAAATAA"),
            SequenceRecord::new("c", "ATGTTAC"),
            SequenceRecord::new("d", "ATGGGGTGA"),
            SequenceRecord::new("e", "ATGAGATAA"),
        ];
        let pairs = vec![
            LabeledPair::new("a", "b", Label::Positive, PairSource::MatchedEdge),
            LabeledPair::new("c", "d", Label::Positive, PairSource::MatchedEdge),
            LabeledPair::new("d", "e", Label::Negative, PairSource::SampledNegative),
            LabeledPair::new("a", "zz", Label::Negative, PairSource::SampledNegative),
        ];
        (pairs, recs)
    }

    #[test]
    fn replicate_counts_and_skips() {
        let (pairs, recs) = fixture();
        let rep = augment_pairs(
            &pairs,
            &recs,
            &CodonTable::standard(),
            &AugmentOptions::default(),
        )
        .unwrap();
        assert_eq!(rep.pairs.len(), 20);
        let skipped: Vec<&str> = rep.skipped.iter().map(|s| s.pair_id.as_str()).collect();
        assert_eq!(skipped, vec!["c|d", "a|zz"]);
        let first = &rep.pairs[0];
        assert_eq!(first.record_a.id, "a|b#0/a");
        assert_eq!(first.record_a.organism.as_deref(), Some("host sp"));
        let l = first.to_labeled();
        assert_eq!(
            (l.source, l.parent.as_deref(), l.label),
            (PairSource::Augmented, Some("a|b"), Label::Positive)
        );
        assert_eq!(rep.pairs[10].label, Label::Negative);
    }

    #[test]
    fn same_seed_same_replicates() {
        let (pairs, recs) = fixture();
        let t = CodonTable::standard();
        let o = AugmentOptions {
            n_per_pair: 4,
            seed: 11,
            mode: SubstitutionMode::IncludeSelf,
        };
        assert_eq!(
            augment_pairs(&pairs, &recs, &t, &o).unwrap(),
            augment_pairs(&pairs, &recs, &t, &o).unwrap()
        );
        // a replicate depends only on (parent, seed, r)
        let alone = augment_pairs(&pairs[2..3], &recs, &t, &o).unwrap();
        let all = augment_pairs(&pairs, &recs, &t, &o).unwrap();
        assert_eq!(alone.pairs[..], all.pairs[4..8]);
        let zero = AugmentOptions { n_per_pair: 0, ..o };
        assert_eq!(
            augment_pairs(&pairs, &recs, &t, &zero),
            Err(AugmentError::ZeroReplicates)
        );
    }
}
