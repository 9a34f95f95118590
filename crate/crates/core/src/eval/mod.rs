//! Scoring predictions against gold annotations.
//!
//! A predicted name counts as correct when it matches the gold mention's
//! surface form, or the canonical name or any alias of the gold character.
//! English comparison ignores case; Chinese comparison is exact. Addressee
//! lists are scored under one of two policies: the default lenient policy
//! accepts any non-empty prediction that names only gold addressees, the
//! strict policy requires the full gold set.

mod agreement;
mod diff;

pub use agreement::{cohens_kappa, pairwise_f1, AgreementError};
pub use diff::{diff_report, render_diff, DiffEntry};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backend::Prediction;
use crate::corpus::{CharacterEntity, Mention, Segment};
use crate::text::Lang;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("duplicate prediction for segment '{segment_id}'")]
    DuplicatePrediction { segment_id: String },

    #[error("prediction for unknown segment '{segment_id}'")]
    UnknownSegment { segment_id: String },
}

/// How a predicted addressee list is compared to the gold set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AddresseePolicy {
    /// Correct when non-empty and every predicted name is a gold addressee.
    #[default]
    Lenient,
    /// Correct only when the prediction covers the gold set exactly.
    Strict,
}

/// Correctness counts over a set of segments.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub total: usize,
    pub speaker_correct: usize,
    pub addressee_correct: usize,
    pub both_correct: usize,
}

impl Tally {
    fn add(&mut self, speaker: bool, addressee: bool) {
        self.total += 1;
        self.speaker_correct += usize::from(speaker);
        self.addressee_correct += usize::from(addressee);
        self.both_correct += usize::from(speaker && addressee);
    }

    fn fraction(&self, count: usize) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            count as f64 / self.total as f64
        }
    }

    pub fn speaker_accuracy(&self) -> f64 {
        self.fraction(self.speaker_correct)
    }

    pub fn addressee_accuracy(&self) -> f64 {
        self.fraction(self.addressee_correct)
    }

    pub fn both_accuracy(&self) -> f64 {
        self.fraction(self.both_correct)
    }

    /// Accuracies as percentages rounded to two decimals.
    pub fn summary(&self) -> String {
        format!(
            "speaker {:.2} / addressee {:.2} / both {:.2} (n={})",
            percent(self.speaker_accuracy()),
            percent(self.addressee_accuracy()),
            percent(self.both_accuracy()),
            self.total
        )
    }
}

/// A fraction in `[0, 1]` as a percentage rounded to two decimals.
pub fn percent(fraction: f64) -> f64 {
    (fraction * 10_000.0).round() / 100.0
}

/// Per-segment scoring outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentScore {
    pub segment_id: String,
    pub novel_id: String,
    pub speaker_correct: bool,
    pub addressee_correct: bool,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct EvalReport {
    pub overall: Tally,
    pub per_novel: BTreeMap<String, Tally>,
    pub scores: Vec<SegmentScore>,
}

fn normalized_eq(a: &str, b: &str, lang: Lang) -> bool {
    let a = a.trim();
    let b = b.trim();
    match lang {
        Lang::En => a
            .chars()
            .flat_map(char::to_lowercase)
            .eq(b.chars().flat_map(char::to_lowercase)),
        Lang::Zh => a == b,
    }
}

/// Whether a predicted name refers to the gold mention, by surface form or
/// by any name of the mentioned character.
fn matches_mention(
    predicted: &str,
    mention: &Mention,
    candidates: &[CharacterEntity],
    lang: Lang,
) -> bool {
    if normalized_eq(predicted, &mention.surface, lang) {
        return true;
    }
    if let Some(id) = &mention.character_id {
        if let Some(entity) = candidates.iter().find(|c| &c.id == id) {
            return entity
                .aliases
                .iter()
                .any(|alias| normalized_eq(predicted, alias, lang));
        }
    }
    false
}

fn speaker_correct(segment: &Segment, prediction: &Prediction) -> bool {
    prediction.speaker.as_deref().is_some_and(|name| {
        matches_mention(name, &segment.quotation.speaker, &segment.candidates, segment.lang)
    })
}

fn addressee_correct(
    segment: &Segment,
    prediction: &Prediction,
    policy: AddresseePolicy,
) -> bool {
    let gold = &segment.quotation.addressees;
    if gold.is_empty() {
        return prediction.addressees.is_empty();
    }
    if prediction.addressees.is_empty() {
        return false;
    }
    let mut covered = vec![false; gold.len()];
    for name in &prediction.addressees {
        let mut hit = false;
        for (i, mention) in gold.iter().enumerate() {
            if matches_mention(name, mention, &segment.candidates, segment.lang) {
                covered[i] = true;
                hit = true;
            }
        }
        if !hit {
            return false;
        }
    }
    match policy {
        AddresseePolicy::Lenient => true,
        AddresseePolicy::Strict => covered.iter().all(|&c| c),
    }
}

/// Score predictions against the gold annotations carried by the segments.
///
/// Segments without a prediction score as wrong on both fields; a prediction
/// whose id matches no segment, or a second prediction for the same segment,
/// is an error.
pub fn score(
    segments: &[Segment],
    predictions: &[Prediction],
    policy: AddresseePolicy,
) -> Result<EvalReport, EvalError> {
    let mut by_id: BTreeMap<&str, &Prediction> = BTreeMap::new();
    for prediction in predictions {
        if by_id.insert(&prediction.segment_id, prediction).is_some() {
            return Err(EvalError::DuplicatePrediction {
                segment_id: prediction.segment_id.clone(),
            });
        }
    }
    for id in by_id.keys() {
        if !segments.iter().any(|s| s.id() == *id) {
            return Err(EvalError::UnknownSegment {
                segment_id: (*id).to_string(),
            });
        }
    }

    let mut report = EvalReport::default();
    for segment in segments {
        let (speaker, addressee) = match by_id.get(segment.id()) {
            Some(prediction) => (
                speaker_correct(segment, prediction),
                addressee_correct(segment, prediction, policy),
            ),
            None => (false, false),
        };
        report.overall.add(speaker, addressee);
        report
            .per_novel
            .entry(segment.quotation.novel_id.clone())
            .or_default()
            .add(speaker, addressee);
        report.scores.push(SegmentScore {
            segment_id: segment.id().to_string(),
            novel_id: segment.quotation.novel_id.clone(),
            speaker_correct: speaker,
            addressee_correct: addressee,
        });
    }
    Ok(report)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use crate::corpus::{CharacterEntity, Corpus, Mention, Novel, QuotationRecord, Span, Stance};
    use crate::text::Lang;

    /// A corpus of `n` copies of the same exchange, one quotation each:
    /// 陆庄主 addressing 黄蓉. Useful when a test needs a controllable
    /// number of records.
    pub fn repeated_zh(n: usize) -> Corpus {
        let block = "陆庄主对黄蓉道：“有客到。”";
        let stride = block.chars().count();
        let text: String = block.repeat(n);
        let novel = Novel {
            id: "novel1".into(),
            title: "测试".into(),
            author: "佚名".into(),
            lang: Lang::Zh,
            text: text.as_str().into(),
        };
        let roster = vec![
            CharacterEntity::new("huangrong", "黄蓉")
                .with_aliases(["蓉儿"])
                .with_stance(Stance::Protagonist),
            CharacterEntity::new("luzhuangzhu", "陆庄主"),
        ];
        let quotations: Vec<QuotationRecord> = (0..n)
            .map(|i| {
                let base = i * stride;
                QuotationRecord {
                    id: format!("q{}", i + 1),
                    novel_id: "novel1".into(),
                    quote: Span::new("有客到。", base + 9, base + 13),
                    speaker: Mention::new("陆庄主", base, base + 3).with_character("luzhuangzhu"),
                    addressees: vec![
                        Mention::new("黄蓉", base + 4, base + 6).with_character("huangrong")
                    ],
                    cue: Some(Span::new("道", base + 6, base + 7)),
                    mode: None,
                    monologue: false,
                }
            })
            .collect();
        Corpus::new(vec![novel], roster, quotations).expect("fixture is well formed")
    }
}
