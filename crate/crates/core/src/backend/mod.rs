//! Identification backends: a shared trait over segments plus three
//! implementations with very different cost profiles. The lexicon baseline
//! in [`rule`] needs no model at all; [`llm`] talks to a chat-completion
//! endpoint; [`seq2seq`] wraps locally hosted generative models.

pub mod llm;
pub mod rule;
pub mod seq2seq;

pub use llm::{LlmBackend, LlmClient, LlmClientConfig, LlmError};
pub use rule::{CueLexicon, RuleBackend};
pub use seq2seq::{
    seq2seq_predict, training_pairs, write_training_jsonl, CommandModel, ReplayModel,
    Seq2SeqBackend, Seq2SeqError, Seq2SeqModel, Seq2SeqOutput, TrainConfig, TrainingPair,
};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::Segment;
use crate::prompt::{AnswerParseError, Exemplar, PromptError, PromptTemplate};
use crate::text::Lang;

/// Prompting regime for backends that build prompts. The rule baseline
/// ignores it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mode {
    ZeroShot,
    FewShot(Vec<Exemplar>),
}

/// One backend's answer for one segment. `speaker` is `None` when the
/// backend produced no usable speaker; both cases score as wrong.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub segment_id: String,
    pub speaker: Option<String>,
    #[serde(default)]
    pub addressees: Vec<String>,
}

#[derive(Debug)]
pub struct BackendError {
    pub segment_id: String,
    pub kind: BackendErrorKind,
}

#[derive(Debug)]
pub enum BackendErrorKind {
    Prompt(PromptError),
    Answer(AnswerParseError),
    Transport(LlmError),
    Model(Seq2SeqError),
}

impl fmt::Display for BackendError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            BackendErrorKind::Prompt(e) => write!(f, "segment {}: {e}", self.segment_id),
            BackendErrorKind::Answer(e) => write!(f, "segment {}: {e}", self.segment_id),
            BackendErrorKind::Transport(e) => write!(f, "segment {}: {e}", self.segment_id),
            BackendErrorKind::Model(e) => write!(f, "segment {}: {e}", self.segment_id),
        }
    }
}

impl std::error::Error for BackendError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match &self.kind {
            BackendErrorKind::Prompt(e) => Some(e),
            BackendErrorKind::Answer(e) => Some(e),
            BackendErrorKind::Transport(e) => Some(e),
            BackendErrorKind::Model(e) => Some(e),
        }
    }
}

impl BackendError {
    pub fn new(segment_id: impl Into<String>, kind: BackendErrorKind) -> Self {
        BackendError {
            segment_id: segment_id.into(),
            kind,
        }
    }
}

/// A speaker/addressee identifier over segments.
///
/// `identify_batch` runs sequentially by default; backends with latency to
/// hide (the LLM client) override it.
pub trait Backend: Sync {
    fn name(&self) -> &str;

    fn identify(&self, segment: &Segment, mode: &Mode) -> Result<Prediction, BackendError>;

    fn identify_batch(
        &self,
        segments: &[Segment],
        mode: &Mode,
    ) -> Vec<Result<Prediction, BackendError>> {
        segments.iter().map(|s| self.identify(s, mode)).collect()
    }
}

/// One prompt template per language, chosen by each segment's novel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateSet {
    pub zh: PromptTemplate,
    pub en: PromptTemplate,
}

impl Default for TemplateSet {
    fn default() -> Self {
        TemplateSet {
            zh: PromptTemplate::default_zh(),
            en: PromptTemplate::default_en(),
        }
    }
}

impl TemplateSet {
    pub fn get(&self, lang: Lang) -> &PromptTemplate {
        match lang {
            Lang::Zh => &self.zh,
            Lang::En => &self.en,
        }
    }
}

/// Turn a gold-annotated segment into a few-shot exemplar.
pub fn exemplar_from_segment(segment: &Segment) -> Exemplar {
    Exemplar {
        context: segment.context_text(),
        quotation: segment.quotation.quote.surface.clone(),
        speaker: segment.gold_speaker_name().to_string(),
        addressees: segment
            .gold_addressee_names()
            .into_iter()
            .map(str::to_string)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_segments, WindowSpec};

    #[test]
    fn exemplar_uses_canonical_names_and_full_context() {
        let corpus = crate::corpus::fixtures::two_party_zh();
        let segments = build_segments(&corpus, &WindowSpec::SENTENCE_DEFAULT).unwrap();
        let ex = exemplar_from_segment(&segments[1]);
        assert_eq!(ex.speaker, "黄蓉");
        assert_eq!(ex.addressees, vec!["陆庄主"]);
        assert_eq!(ex.quotation, "咦，你怎么知道？");
        assert!(ex.context.contains(&ex.quotation));
    }
}
