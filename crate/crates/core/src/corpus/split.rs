//! Deterministic train/dev/test partitioning of quotation records.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Corpus, CorpusError};

/// Partition fractions. Constructed only through [`SplitRatios::new`], which
/// enforces positivity and unit sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitRatios {
    train: f64,
    dev: f64,
    test: f64,
}

impl SplitRatios {
    const SUM_TOLERANCE: f64 = 1e-9;

    pub fn new(train: f64, dev: f64, test: f64) -> Result<Self, CorpusError> {
        let sum = train + dev + test;
        if train <= 0.0 || dev <= 0.0 || test <= 0.0 || (sum - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(CorpusError::SplitRatio { sum });
        }
        Ok(SplitRatios { train, dev, test })
    }

    pub fn train(&self) -> f64 {
        self.train
    }

    pub fn dev(&self) -> f64 {
        self.dev
    }

    pub fn test(&self) -> f64 {
        self.test
    }
}

impl Default for SplitRatios {
    /// 8 : 1 : 1.
    fn default() -> Self {
        SplitRatios::new(0.8, 0.1, 0.1).expect("default ratios are valid")
    }
}

/// The three disjoint sub-corpora produced by [`split_corpus`].
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSplit {
    pub train: Corpus,
    pub dev: Corpus,
    pub test: Corpus,
}

/// Split the corpus by quotation record.
///
/// Record ids are sorted, shuffled with a seeded generator, and cut into
/// dev and test blocks of `floor(n * ratio)` records; the remainder is
/// train. The same seed and corpus always produce the same split. Each
/// sub-corpus keeps the full novel and roster tables.
pub fn split_corpus(
    corpus: &Corpus,
    ratios: &SplitRatios,
    seed: u64,
) -> Result<CorpusSplit, CorpusError> {
    if corpus.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    let mut ids: Vec<&str> = corpus.quotations().iter().map(|q| q.id.as_str()).collect();
    ids.sort_unstable();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ids.shuffle(&mut rng);

    let n = ids.len();
    let n_dev = (n as f64 * ratios.dev).floor() as usize;
    let n_test = (n as f64 * ratios.test).floor() as usize;
    let n_train = n - n_dev - n_test;

    let id_set = |slice: &[&str]| -> BTreeSet<String> {
        slice.iter().map(|s| s.to_string()).collect()
    };
    Ok(CorpusSplit {
        train: corpus.filtered(&id_set(&ids[..n_train])),
        dev: corpus.filtered(&id_set(&ids[n_train..n_train + n_dev])),
        test: corpus.filtered(&id_set(&ids[n_train + n_dev..])),
    })
}
