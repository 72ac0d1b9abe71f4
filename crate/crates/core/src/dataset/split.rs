use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{DatasetError, Label, LabeledPair, PairSource};
use crate::rng::Xoshiro256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fractions {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
}

impl Default for Fractions {
    fn default() -> Self {
        Self {
            train: 0.6,
            validation: 0.2,
            test: 0.2,
        }
    }
}

impl Fractions {
    pub fn as_array(&self) -> [f64; 3] {
        [self.train, self.validation, self.test]
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        let a = self.as_array();
        let ok = a.iter().all(|f| f.is_finite() && *f >= 0.0)
            && (a.iter().sum::<f64>() - 1.0).abs() <= 1e-9;
        if ok {
            Ok(())
        } else {
            Err(DatasetError::BadFractions(a))
        }
    }
}

impl FromStr for Fractions {
    type Err = String;

    /// `train,validation,test`, e.g. `0.6,0.2,0.2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|e| format!("bad fraction {p:?}: {e}"))
            })
            .collect::<Result<_, _>>()?;
        let [train, validation, test] = parts[..] else {
            return Err(format!(
                "expected three comma-separated fractions, got {s:?}"
            ));
        };
        Ok(Self {
            train,
            validation,
            test,
        })
    }
}

impl fmt::Display for Fractions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.train, self.validation, self.test)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Validation, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub seed: u64,
    pub fractions: Fractions,
    /// Pair ids per split, ascending.
    pub train: Vec<String>,
    pub validation: Vec<String>,
    pub test: Vec<String>,
    #[serde(default)]
    pub provenance: BTreeMap<String, String>,
}

impl SplitManifest {
    pub fn ids(&self, split: Split) -> &[String] {
        match split {
            Split::Train => &self.train,
            Split::Validation => &self.validation,
            Split::Test => &self.test,
        }
    }

    pub fn split_of(&self, pair_id: &str) -> Option<Split> {
        Split::ALL.into_iter().find(|&s| {
            self.ids(s)
                .binary_search_by(|x| x.as_str().cmp(pair_id))
                .is_ok()
        })
    }

    pub fn len(&self) -> usize {
        self.train.len() + self.validation.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Seeded split stratified by label.
///
/// Pairs are grouped by label (positives first) and each group sorted by pair
/// id, then shuffled with one generator seeded from `seed`. From each
/// shuffled group the first `floor(n * test)` go to test, the next
/// `floor(n * validation)` to validation and the rest to train.
pub fn split_dataset(
    pairs: &[LabeledPair],
    fractions: Fractions,
    seed: u64,
) -> Result<SplitManifest, DatasetError> {
    fractions.validate()?;
    let non_empty = fractions.as_array().iter().filter(|f| **f > 0.0).count();
    if pairs.len() < non_empty {
        return Err(DatasetError::TooFewPairs {
            pairs: pairs.len(),
            splits: non_empty,
        });
    }
    let mut seen = HashSet::new();
    for p in pairs {
        if p.source == PairSource::Augmented {
            return Err(DatasetError::AugmentedInSplit(p.pair_id()));
        }
        if !seen.insert(p.pair_id()) {
            return Err(DatasetError::DuplicatePair(p.pair_id()));
        }
    }

    let mut rng = Xoshiro256::seed_from_u64(seed);
    let mut manifest = SplitManifest {
        seed,
        fractions,
        train: Vec::new(),
        validation: Vec::new(),
        test: Vec::new(),
        provenance: BTreeMap::new(),
    };
    for label in [Label::Positive, Label::Negative] {
        let mut group: Vec<String> = pairs
            .iter()
            .filter(|p| p.label == label)
            .map(LabeledPair::pair_id)
            .collect();
        group.sort_unstable();
        rng.shuffle(&mut group);
        let n = group.len() as f64;
        let n_test = (n * fractions.test + 1e-9).floor() as usize;
        let n_val = (n * fractions.validation + 1e-9).floor() as usize;
        let mut it = group.into_iter();
        manifest.test.extend(it.by_ref().take(n_test));
        manifest.validation.extend(it.by_ref().take(n_val));
        manifest.train.extend(it);
    }
    for list in [
        &mut manifest.train,
        &mut manifest.validation,
        &mut manifest.test,
    ] {
        list.sort_unstable();
    }
    Ok(manifest)
}
