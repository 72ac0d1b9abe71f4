//! Species-bias probe: replace every gene by a one-hot code of its organism
//! and see how well nearest neighbours predict the labels from that alone.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{Label, LabeledPair, PairSource, SplitManifest};
use crate::sequence::{index_by_id, SequenceRecord};

/// Masked accuracy above this raises the warning flag.
pub const WARN_ACCURACY: f64 = 0.6;
pub const DEFAULT_NEIGHBORS: usize = 5;

/// Fixed-length bit vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn one_hot(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index);
        v
    }

    pub fn set(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn hamming(&self, other: &Self) -> u32 {
        assert_eq!(self.len, other.len, "bit vectors differ in length");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones())
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskedSample {
    pub onehot_a: BitVector,
    pub onehot_b: BitVector,
    pub label: Label,
}

impl MaskedSample {
    /// Hamming distance over the concatenated vectors.
    pub fn distance(&self, other: &Self) -> u32 {
        self.onehot_a.hamming(&other.onehot_a) + self.onehot_b.hamming(&other.onehot_b)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AuditError {
    #[error("organism unknown for genes: {}", .0.join(", "))]
    UnknownOrganism(Vec<String>),
    #[error("training set is empty")]
    EmptyTrain,
    #[error("test set is empty")]
    EmptyTest,
    #[error("k_neighbors must be in 1..={n_train}, got {k}")]
    BadNeighbors { k: usize, n_train: usize },
}

/// Sorted organism vocabulary and one masked sample per pair.
pub fn mask_species(
    pairs: &[LabeledPair],
    records: &[SequenceRecord],
) -> Result<(Vec<MaskedSample>, Vec<String>), AuditError> {
    let by_id = index_by_id(records);
    let organism = |g: &str| by_id.get(g).and_then(|r| r.organism.as_deref());
    let mut missing = BTreeSet::new();
    for p in pairs {
        for g in [&p.gene_a, &p.gene_b] {
            if organism(g).is_none() {
                missing.insert(g.clone());
            }
        }
    }
    if !missing.is_empty() {
        return Err(AuditError::UnknownOrganism(missing.into_iter().collect()));
    }
    let vocab: Vec<String> = pairs
        .iter()
        .flat_map(|p| [organism(&p.gene_a), organism(&p.gene_b)])
        .map(|o| o.expect("checked above").to_string())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let pos = |g: &str| {
        vocab
            .binary_search_by(|v| v.as_str().cmp(organism(g).expect("checked")))
            .expect("in vocab")
    };
    let samples = pairs
        .iter()
        .map(|p| MaskedSample {
            onehot_a: BitVector::one_hot(vocab.len(), pos(&p.gene_a)),
            onehot_b: BitVector::one_hot(vocab.len(), pos(&p.gene_b)),
            label: p.label,
        })
        .collect();
    Ok((samples, vocab))
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnnResult {
    pub predictions: Vec<Label>,
    pub accuracy: f64,
}

/// k-nearest-neighbour vote by Hamming distance. Equal distances go to the
/// lower training index; a tied vote predicts positive.
pub fn knn_predict(
    train: &[MaskedSample],
    test: &[MaskedSample],
    k: usize,
) -> Result<KnnResult, AuditError> {
    if train.is_empty() {
        return Err(AuditError::EmptyTrain);
    }
    if test.is_empty() {
        return Err(AuditError::EmptyTest);
    }
    if k == 0 || k > train.len() {
        return Err(AuditError::BadNeighbors {
            k,
            n_train: train.len(),
        });
    }
    let predictions: Vec<Label> = test
        .par_iter()
        .map(|t| {
            let mut keyed: Vec<(u32, usize)> = train
                .iter()
                .enumerate()
                .map(|(i, s)| (s.distance(t), i))
                .collect();
            if k < keyed.len() {
                keyed.select_nth_unstable(k - 1);
            }
            let positives = keyed[..k]
                .iter()
                .filter(|(_, i)| train[*i].label == Label::Positive)
                .count();
            if 2 * positives >= k {
                Label::Positive
            } else {
                Label::Negative
            }
        })
        .collect();
    let correct = predictions
        .iter()
        .zip(test)
        .filter(|(p, t)| **p == t.label)
        .count();
    Ok(KnnResult {
        accuracy: correct as f64 / test.len() as f64,
        predictions,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContingencyRow {
    pub organism_a: String,
    pub organism_b: String,
    pub positive: usize,
    pub negative: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasReport {
    pub accuracy: f64,
    pub k: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub vocabulary_size: usize,
    pub vocabulary: Vec<String>,
    pub contingency: Vec<ContingencyRow>,
    pub warn_threshold: f64,
    pub warn: bool,
}

/// Masked kNN trained on train and validation pairs, scored on test pairs.
/// Synthetic pairs are left out: masking makes them copies of their parents.
pub fn bias_report(
    pairs: &[LabeledPair],
    records: &[SequenceRecord],
    split: &SplitManifest,
    k: usize,
) -> Result<BiasReport, AuditError> {
    let real: Vec<&LabeledPair> = pairs
        .iter()
        .filter(|p| p.source != PairSource::Augmented)
        .collect();
    let test_ids: HashSet<&str> = split.test.iter().map(String::as_str).collect();
    let fit_ids: HashSet<&str> = split
        .train
        .iter()
        .chain(&split.validation)
        .map(String::as_str)
        .collect();
    let pick = |ids: &HashSet<&str>| -> Vec<LabeledPair> {
        real.iter()
            .filter(|p| ids.contains(p.pair_id().as_str()))
            .map(|p| (*p).clone())
            .collect()
    };
    let (fit, test) = (pick(&fit_ids), pick(&test_ids));
    let all: Vec<LabeledPair> = real.iter().map(|p| (*p).clone()).collect();
    let (_, vocab) = mask_species(&all, records)?;

    let by_id = index_by_id(records);
    let organism = |g: &str| by_id[g].organism.clone().expect("checked by mask_species");
    let mut table: BTreeMap<(String, String), (usize, usize)> = BTreeMap::new();
    for p in &all {
        let cell = table
            .entry((organism(&p.gene_a), organism(&p.gene_b)))
            .or_default();
        match p.label {
            Label::Positive => cell.0 += 1,
            Label::Negative => cell.1 += 1,
        }
    }

    // one shared vocabulary so train and test vectors line up
    let encode = |ps: &[LabeledPair]| -> Vec<MaskedSample> {
        let pos = |g: &str| vocab.binary_search(&organism(g)).expect("in vocab");
        ps.iter()
            .map(|p| MaskedSample {
                onehot_a: BitVector::one_hot(vocab.len(), pos(&p.gene_a)),
                onehot_b: BitVector::one_hot(vocab.len(), pos(&p.gene_b)),
                label: p.label,
            })
            .collect()
    };
    let result = knn_predict(&encode(&fit), &encode(&test), k)?;
    Ok(BiasReport {
        accuracy: result.accuracy,
        k,
        n_train: fit.len(),
        n_test: test.len(),
        vocabulary_size: vocab.len(),
        vocabulary: vocab,
        contingency: table
            .into_iter()
            .map(
                |((organism_a, organism_b), (positive, negative))| ContingencyRow {
                    organism_a,
                    organism_b,
                    positive,
                    negative,
                },
            )
            .collect(),
        warn_threshold: WARN_ACCURACY,
        warn: result.accuracy > WARN_ACCURACY,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{split_dataset, Fractions};

    fn sample(a: usize, b: usize, width: usize, label: Label) -> MaskedSample {
        MaskedSample {
            onehot_a: BitVector::one_hot(width, a),
            onehot_b: BitVector::one_hot(width, b),
            label,
        }
    }

    #[test]
    fn bit_vectors() {
        let a = BitVector::one_hot(130, 129);
        let b = BitVector::one_hot(130, 3);
        assert_eq!(a.hamming(&b), 2);
        assert_eq!(a.hamming(&a), 0);
        assert!(a.get(129) && !a.get(3) && !a.get(500));
        assert_eq!(a.count_ones(), 1);
    }

    #[test]
    fn masking_two_organisms() {
        let recs = vec![
            SequenceRecord::new("h", "A").with_organism("O1"),
            SequenceRecord::new("p", "A").with_organism("O2"),
        ];
        let pairs = vec![LabeledPair::new(
            "h",
            "p",
            Label::Positive,
            PairSource::MatchedEdge,
        )];
        let (s, vocab) = mask_species(&pairs, &recs).unwrap();
        assert_eq!(vocab, vec!["O1", "O2"]);
        assert!(s[0].onehot_a.get(0) && s[0].onehot_b.get(1));
        let bad = vec![LabeledPair::new(
            "h",
            "q",
            Label::Positive,
            PairSource::MatchedEdge,
        )];
        assert_eq!(
            mask_species(&bad, &recs),
            Err(AuditError::UnknownOrganism(vec!["q".into()]))
        );
    }

    #[test]
    fn unanimous_neighbors() {
        let train: Vec<MaskedSample> = (0..3)
            .map(|_| sample(0, 1, 3, Label::Positive))
            .chain([sample(2, 2, 3, Label::Negative)])
            .collect();
        let test = vec![sample(0, 1, 3, Label::Positive)];
        assert_eq!(
            knn_predict(&train, &test, 3).unwrap().predictions,
            vec![Label::Positive]
        );
        assert_eq!(
            knn_predict(&train, &test, 5),
            Err(AuditError::BadNeighbors { k: 5, n_train: 4 })
        );
        assert_eq!(knn_predict(&[], &test, 1), Err(AuditError::EmptyTrain));
    }

    #[test]
    fn vote_tie_is_positive() {
        let train = vec![
            sample(0, 0, 2, Label::Negative),
            sample(0, 0, 2, Label::Positive),
        ];
        let r = knn_predict(&train, &[sample(0, 0, 2, Label::Negative)], 2).unwrap();
        assert_eq!(r.predictions, vec![Label::Positive]);
    }

    #[test]
    fn distance_ties_take_lower_index() {
        let train = vec![
            sample(1, 1, 3, Label::Negative),
            sample(0, 1, 3, Label::Negative),
            sample(1, 0, 3, Label::Positive),
        ];
        // both 1 and 2 are at distance 2; index 1 wins
        let r = knn_predict(&train, &[sample(0, 0, 3, Label::Positive)], 1).unwrap();
        assert_eq!(r.predictions, vec![Label::Negative]);
    }

    #[test]
    fn distinct_samples_memorized_with_k1() {
        let s: Vec<MaskedSample> = (0..4)
            .flat_map(|a| {
                (0..4).map(move |b| {
                    sample(
                        a,
                        b,
                        4,
                        if (a + b) % 3 == 0 {
                            Label::Positive
                        } else {
                            Label::Negative
                        },
                    )
                })
            })
            .collect();
        assert_eq!(knn_predict(&s, &s, 1).unwrap().accuracy, 1.0);
    }

    #[test]
    fn report_flags_one_sided_data() {
        let mut recs = Vec::new();
        let mut pairs = Vec::new();
        for i in 0..40 {
            let (h, p) = (format!("h{i}"), format!("p{i}"));
            let positive = i % 2 == 0;
            recs.push(SequenceRecord::new(&h, "A").with_organism(if positive {
                "Hs"
            } else {
                "Mm"
            }));
            recs.push(SequenceRecord::new(&p, "A").with_organism(if positive {
                "Pa"
            } else {
                "Pb"
            }));
            let (label, source) = if positive {
                (Label::Positive, PairSource::MatchedEdge)
            } else {
                (Label::Negative, PairSource::SampledNegative)
            };
            pairs.push(LabeledPair::new(h, p, label, source));
        }
        let split = split_dataset(&pairs, Fractions::default(), 1).unwrap();
        let r = bias_report(&pairs, &recs, &split, DEFAULT_NEIGHBORS).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert!(r.warn);
        assert_eq!(r.n_train + r.n_test, 40);
        assert_eq!(r.contingency.len(), 2);
        assert_eq!(r.contingency[0].positive, 20);
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<BiasReport>(&json).unwrap(), r);
    }
}
