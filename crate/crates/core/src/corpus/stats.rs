//! Per-element occurrence statistics over a corpus.

use serde::{Deserialize, Serialize};

use super::{Corpus, CorpusError};

/// How many records carry an element, and the fraction that do.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElementCount {
    pub present: usize,
    /// `present / total`, in [0, 1].
    pub rate: f64,
}

/// Occurrence statistics for the four annotated elements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElementStats {
    pub total: usize,
    pub speaker: ElementCount,
    pub addressee: ElementCount,
    pub cue: ElementCount,
    pub mode: ElementCount,
}

/// Count element occurrence rates. Errors on an empty corpus, where rates
/// are undefined.
pub fn corpus_stats(corpus: &Corpus) -> Result<ElementStats, CorpusError> {
    let total = corpus.len();
    if total == 0 {
        return Err(CorpusError::EmptyCorpus);
    }
    let count = |present: usize| ElementCount {
        present,
        rate: present as f64 / total as f64,
    };
    let quotations = corpus.quotations();
    // The model makes a speaker span mandatory, so its rate is always 1;
    // it is still counted rather than hard-coded so the report stays honest
    // if the model ever loosens.
    let speaker = quotations.len();
    let addressee = quotations.iter().filter(|q| !q.addressees.is_empty()).count();
    let cue = quotations.iter().filter(|q| q.cue.is_some()).count();
    let mode = quotations.iter().filter(|q| q.mode.is_some()).count();
    Ok(ElementStats {
        total,
        speaker: count(speaker),
        addressee: count(addressee),
        cue: count(cue),
        mode: count(mode),
    })
}
