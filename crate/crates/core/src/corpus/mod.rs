//! Canonical data model for quotation corpora: character roster, mention
//! spans, quotation records, novels, and the segments fed to identification
//! backends.
//!
//! A [`Corpus`] is immutable after construction and validates its own
//! integrity: every span's surface must equal the novel-text slice at its
//! offsets, and every character reference must resolve to the roster.

mod io;
mod search;
mod segment;
mod split;
mod stats;
mod validate;

pub use io::{load_corpus, save_canonical, Dialect, ImportOptions};
pub use search::alias_occurrences;
pub use segment::{build_segment, build_segments, Segment, WindowSpec};
pub use split::{split_corpus, CorpusSplit, SplitRatios};
pub use stats::{corpus_stats, ElementCount, ElementStats};
pub use validate::{validate_guidelines, RuleId, Violation};

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::{CharText, Lang, WindowError};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: malformed record: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("record {record_id}: character id '{character_id}' not in roster")]
    Reference {
        record_id: String,
        character_id: String,
    },

    #[error("record {record_id}: novel id '{novel_id}' unknown")]
    UnknownNovel {
        record_id: String,
        novel_id: String,
    },

    #[error("record {record_id}: {message}")]
    Integrity { record_id: String, message: String },

    #[error("duplicate record id '{record_id}'")]
    DuplicateRecordId { record_id: String },

    #[error("duplicate character id '{character_id}' in roster")]
    DuplicateCharacterId { character_id: String },

    #[error("roster entry '{character_id}' has an empty canonical name")]
    EmptyCanonicalName { character_id: String },

    #[error("operation requires a non-empty corpus")]
    EmptyCorpus,

    #[error("split ratios must be positive and sum to 1 (sum was {sum})")]
    SplitRatio { sum: f64 },

    #[error(transparent)]
    Window(#[from] WindowError),
}

/// A character's stance within the novel, used for network node coloring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stance {
    Protagonist,
    Villain,
    #[default]
    Unknown,
}

/// A character entity from the corpus roster.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterEntity {
    pub id: String,
    pub canonical_name: String,
    /// Every surface form that names this character. Always contains
    /// `canonical_name`.
    #[serde(default)]
    pub aliases: BTreeSet<String>,
    #[serde(default)]
    pub stance: Stance,
}

impl CharacterEntity {
    pub fn new(id: impl Into<String>, canonical_name: impl Into<String>) -> Self {
        let canonical_name = canonical_name.into();
        let mut aliases = BTreeSet::new();
        aliases.insert(canonical_name.clone());
        CharacterEntity {
            id: id.into(),
            canonical_name,
            aliases,
            stance: Stance::Unknown,
        }
    }

    pub fn with_aliases<I, S>(mut self, aliases: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.aliases.extend(aliases.into_iter().map(Into::into));
        self
    }

    pub fn with_stance(mut self, stance: Stance) -> Self {
        self.stance = stance;
        self
    }
}

/// A plain text span: surface string plus character offsets into the novel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub surface: String,
    /// Character offset, 0-based inclusive.
    pub start: usize,
    /// Character offset, exclusive.
    pub end: usize,
}

impl Span {
    pub fn new(surface: impl Into<String>, start: usize, end: usize) -> Self {
        Span {
            surface: surface.into(),
            start,
            end,
        }
    }

    pub fn char_range(&self) -> Range<usize> {
        self.start..self.end
    }
}

/// A surface occurrence of a character in text, optionally grounded to a
/// roster entity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mention {
    pub surface: String,
    pub start: usize,
    pub end: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub character_id: Option<String>,
}

impl Mention {
    pub fn new(surface: impl Into<String>, start: usize, end: usize) -> Self {
        Mention {
            surface: surface.into(),
            start,
            end,
            character_id: None,
        }
    }

    pub fn with_character(mut self, id: impl Into<String>) -> Self {
        self.character_id = Some(id.into());
        self
    }

    pub fn char_range(&self) -> Range<usize> {
        self.start..self.end
    }
}

/// One annotated quotation with its element spans.
///
/// `addressees` may legitimately contain duplicates or be empty in raw
/// imported data; the guideline validator reports those as violations
/// rather than the loader rejecting them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotationRecord {
    pub id: String,
    pub novel_id: String,
    pub quote: Span,
    pub speaker: Mention,
    #[serde(default)]
    pub addressees: Vec<Mention>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cue: Option<Span>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Span>,
    /// Internal monologue or self-talk; such records carry no addressee by
    /// design and are exempt from the missing-addressee guideline check.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub monologue: bool,
}

/// One novel's text and metadata.
#[derive(Debug, Clone)]
pub struct Novel {
    pub id: String,
    pub title: String,
    pub author: String,
    pub lang: Lang,
    pub text: CharText,
}

impl PartialEq for Novel {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
            && self.title == other.title
            && self.author == other.author
            && self.lang == other.lang
            && self.text.as_str() == other.text.as_str()
    }
}

/// An immutable, integrity-checked quotation corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    novels: BTreeMap<String, Novel>,
    roster: Vec<CharacterEntity>,
    quotations: Vec<QuotationRecord>,
}

impl Corpus {
    /// Build a corpus, enforcing all structural invariants.
    ///
    /// Canonical names are inserted into their alias sets. Errors name the
    /// offending record.
    pub fn new(
        novels: impl IntoIterator<Item = Novel>,
        roster: impl IntoIterator<Item = CharacterEntity>,
        quotations: impl IntoIterator<Item = QuotationRecord>,
    ) -> Result<Self, CorpusError> {
        let novels: BTreeMap<String, Novel> =
            novels.into_iter().map(|n| (n.id.clone(), n)).collect();

        let mut seen_chars = BTreeSet::new();
        let mut roster: Vec<CharacterEntity> = roster.into_iter().collect();
        for entity in &mut roster {
            if entity.canonical_name.is_empty() {
                return Err(CorpusError::EmptyCanonicalName {
                    character_id: entity.id.clone(),
                });
            }
            if !seen_chars.insert(entity.id.clone()) {
                return Err(CorpusError::DuplicateCharacterId {
                    character_id: entity.id.clone(),
                });
            }
            entity.aliases.insert(entity.canonical_name.clone());
        }

        let quotations: Vec<QuotationRecord> = quotations.into_iter().collect();
        let corpus = Corpus {
            novels,
            roster,
            quotations,
        };
        corpus.verify_integrity()?;
        Ok(corpus)
    }

    pub fn novels(&self) -> impl Iterator<Item = &Novel> {
        self.novels.values()
    }

    pub fn novel(&self, id: &str) -> Option<&Novel> {
        self.novels.get(id)
    }

    pub fn roster(&self) -> &[CharacterEntity] {
        &self.roster
    }

    pub fn character(&self, id: &str) -> Option<&CharacterEntity> {
        self.roster.iter().find(|c| c.id == id)
    }

    pub fn quotations(&self) -> &[QuotationRecord] {
        &self.quotations
    }

    pub fn quotation(&self, id: &str) -> Option<&QuotationRecord> {
        self.quotations.iter().find(|q| q.id == id)
    }

    pub fn len(&self) -> usize {
        self.quotations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotations.is_empty()
    }

    /// Re-check every structural invariant: record ids unique, references
    /// resolved, spans in bounds, surfaces equal to their text slices, and
    /// quotation/speaker spans disjoint.
    pub fn verify_integrity(&self) -> Result<(), CorpusError> {
        let mut seen = BTreeSet::new();
        for q in &self.quotations {
            if !seen.insert(q.id.clone()) {
                return Err(CorpusError::DuplicateRecordId {
                    record_id: q.id.clone(),
                });
            }
            let novel = self
                .novels
                .get(&q.novel_id)
                .ok_or_else(|| CorpusError::UnknownNovel {
                    record_id: q.id.clone(),
                    novel_id: q.novel_id.clone(),
                })?;

            self.check_span(&q.id, "quote", &q.quote.surface, q.quote.char_range(), novel)?;
            self.check_mention(&q.id, "speaker", &q.speaker, novel)?;
            for (i, a) in q.addressees.iter().enumerate() {
                self.check_mention(&q.id, &format!("addressee[{i}]"), a, novel)?;
            }
            if let Some(cue) = &q.cue {
                self.check_span(&q.id, "cue", &cue.surface, cue.char_range(), novel)?;
            }
            if let Some(mode) = &q.mode {
                self.check_span(&q.id, "mode", &mode.surface, mode.char_range(), novel)?;
            }

            let (qs, qe) = (q.quote.start, q.quote.end);
            let (ss, se) = (q.speaker.start, q.speaker.end);
            if qs < se && ss < qe {
                return Err(CorpusError::Integrity {
                    record_id: q.id.clone(),
                    message: format!(
                        "speaker span {ss}..{se} overlaps quotation span {qs}..{qe}"
                    ),
                });
            }
        }
        Ok(())
    }

    fn check_span(
        &self,
        record_id: &str,
        field: &str,
        surface: &str,
        range: Range<usize>,
        novel: &Novel,
    ) -> Result<(), CorpusError> {
        if range.start >= range.end {
            return Err(CorpusError::Integrity {
                record_id: record_id.to_string(),
                message: format!("{field} span {}..{} is empty or inverted", range.start, range.end),
            });
        }
        let slice = novel
            .text
            .slice(range.clone())
            .ok_or_else(|| CorpusError::Integrity {
                record_id: record_id.to_string(),
                message: format!(
                    "{field} span {}..{} out of bounds for novel '{}' ({} chars)",
                    range.start,
                    range.end,
                    novel.id,
                    novel.text.len_chars()
                ),
            })?;
        if slice != surface {
            return Err(CorpusError::Integrity {
                record_id: record_id.to_string(),
                message: format!(
                    "{field} surface {surface:?} does not match novel slice {slice:?} at {}..{}",
                    range.start, range.end
                ),
            });
        }
        Ok(())
    }

    fn check_mention(
        &self,
        record_id: &str,
        field: &str,
        mention: &Mention,
        novel: &Novel,
    ) -> Result<(), CorpusError> {
        self.check_span(record_id, field, &mention.surface, mention.char_range(), novel)?;
        if let Some(cid) = &mention.character_id {
            if self.character(cid).is_none() {
                return Err(CorpusError::Reference {
                    record_id: record_id.to_string(),
                    character_id: cid.clone(),
                });
            }
        }
        Ok(())
    }

    /// The corpus with only the given quotation ids kept, preserving order.
    /// Novels and roster are carried over unchanged.
    pub fn filtered(&self, keep: &BTreeSet<String>) -> Corpus {
        Corpus {
            novels: self.novels.clone(),
            roster: self.roster.clone(),
            quotations: self
                .quotations
                .iter()
                .filter(|q| keep.contains(&q.id))
                .cloned()
                .collect(),
        }
    }
}
