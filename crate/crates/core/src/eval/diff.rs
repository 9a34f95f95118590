//! Disagreement listings for error analysis.

use serde::{Deserialize, Serialize};

use crate::backend::Prediction;
use crate::corpus::Segment;

use super::{score, AddresseePolicy, EvalError};

/// One segment where the prediction missed the gold annotation on at least
/// one field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffEntry {
    pub segment_id: String,
    pub quotation: String,
    pub gold_speaker: String,
    pub predicted_speaker: Option<String>,
    pub gold_addressees: Vec<String>,
    pub predicted_addressees: Vec<String>,
    pub speaker_correct: bool,
    pub addressee_correct: bool,
}

/// List every segment the predictions got wrong, with both sides of the
/// disagreement spelled out in canonical names.
pub fn diff_report(
    segments: &[Segment],
    predictions: &[Prediction],
    policy: AddresseePolicy,
) -> Result<Vec<DiffEntry>, EvalError> {
    let report = score(segments, predictions, policy)?;
    let entries = report
        .scores
        .iter()
        .zip(segments)
        .filter(|(outcome, _)| !outcome.speaker_correct || !outcome.addressee_correct)
        .map(|(outcome, segment)| {
            let prediction = predictions
                .iter()
                .find(|p| p.segment_id == outcome.segment_id);
            DiffEntry {
                segment_id: outcome.segment_id.clone(),
                quotation: segment.quotation.quote.surface.clone(),
                gold_speaker: segment.gold_speaker_name().to_string(),
                predicted_speaker: prediction.and_then(|p| p.speaker.clone()),
                gold_addressees: segment
                    .gold_addressee_names()
                    .into_iter()
                    .map(str::to_string)
                    .collect(),
                predicted_addressees: prediction.map_or_else(Vec::new, |p| p.addressees.clone()),
                speaker_correct: outcome.speaker_correct,
                addressee_correct: outcome.addressee_correct,
            }
        })
        .collect();
    Ok(entries)
}

/// Render diff entries as a readable block per disagreement.
pub fn render_diff(entries: &[DiffEntry]) -> String {
    let mut out = String::new();
    for entry in entries {
        out.push_str(&format!("{}  {:?}\n", entry.segment_id, entry.quotation));
        let speaker_mark = if entry.speaker_correct { " " } else { "!" };
        out.push_str(&format!(
            "{}  speaker: gold {} / predicted {}\n",
            speaker_mark,
            entry.gold_speaker,
            entry.predicted_speaker.as_deref().unwrap_or("(none)")
        ));
        let addressee_mark = if entry.addressee_correct { " " } else { "!" };
        out.push_str(&format!(
            "{}  addressee: gold {} / predicted {}\n\n",
            addressee_mark,
            if entry.gold_addressees.is_empty() {
                "(none)".to_string()
            } else {
                entry.gold_addressees.join(", ")
            },
            if entry.predicted_addressees.is_empty() {
                "(none)".to_string()
            } else {
                entry.predicted_addressees.join(", ")
            }
        ));
    }
    out
}
