//! Lexicon-and-position baseline.
//!
//! Attribution in novels is strongly local: the speaker is usually named in
//! a reporting clause touching the quotation, and the addressee is usually
//! the other participant of the exchange. The baseline operationalizes
//! that: it looks for a cue verb next to a candidate mention in the clauses
//! adjacent to the quotation, falls back to the nearest candidate mention,
//! and picks the addressee from the next turn, the attribution clause, or
//! a vocative inside the quotation, skipping the chosen speaker.

use std::collections::BTreeSet;

use crate::corpus::{alias_occurrences, CharacterEntity, Segment};
use crate::text::{Lang, SentenceSpan, SentenceSplitter};

use super::{Backend, BackendError, Mode, Prediction};

/// Reporting verbs that signal an attribution clause.
#[derive(Debug, Clone)]
pub struct CueLexicon {
    verbs: BTreeSet<String>,
}

impl CueLexicon {
    pub fn default_zh() -> Self {
        CueLexicon {
            verbs: ["道", "说", "问", "叫", "喝"]
                .into_iter()
                .map(str::to_string)
                .collect(),
        }
    }

    pub fn default_en() -> Self {
        CueLexicon {
            verbs: ["said", "asked", "cried", "replied"]
                .into_iter()
                .map(str::to_string)
                .collect(),
        }
    }

    pub fn with_verbs<I, S>(verbs: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        CueLexicon {
            verbs: verbs.into_iter().map(Into::into).collect(),
        }
    }

    pub fn verbs(&self) -> impl Iterator<Item = &str> {
        self.verbs.iter().map(String::as_str)
    }
}

/// A candidate alias occurrence, with offsets local to one context side.
#[derive(Debug, Clone, Copy)]
struct Hit {
    candidate: usize,
    start: usize,
    end: usize,
}

struct Side {
    text: String,
    clauses: Vec<SentenceSpan>,
    hits: Vec<Hit>,
}

impl Side {
    fn build(text: String, lang: Lang, candidates: &[CharacterEntity]) -> Self {
        let clauses = SentenceSplitter::clause_level(lang).split(&text);
        let mut hits = Vec::new();
        for (i, entity) in candidates.iter().enumerate() {
            for alias in &entity.aliases {
                for (start, end) in alias_occurrences(&text, alias, lang) {
                    hits.push(Hit {
                        candidate: i,
                        start,
                        end,
                    });
                }
            }
        }
        hits.sort_by_key(|h| (h.start, h.candidate));
        // Overlapping aliases of one entity (name and contained nickname)
        // produce nested hits; keep the earliest one per position.
        hits.dedup_by(|cur, prev| cur.candidate == prev.candidate && cur.start < prev.end);
        Side { text, clauses, hits }
    }

    fn clause_range(&self, clause: &SentenceSpan) -> std::ops::Range<usize> {
        clause.start..clause.end
    }

    fn hits_in(&self, range: std::ops::Range<usize>) -> impl Iterator<Item = &Hit> {
        self.hits
            .iter()
            .filter(move |h| h.start >= range.start && h.end <= range.end)
    }

    fn has_cue_in(&self, range: std::ops::Range<usize>, lexicon: &CueLexicon, lang: Lang) -> bool {
        let clause: String = self
            .text
            .chars()
            .skip(range.start)
            .take(range.len())
            .collect();
        lexicon
            .verbs()
            .any(|v| !alias_occurrences(&clause, v, lang).is_empty())
    }
}

/// How many clauses on each side of the quotation count as the attribution
/// zone.
const ATTRIBUTION_CLAUSES: usize = 2;

/// The no-model baseline. Per segment it resolves the speaker first, then
/// the addressee relative to that speaker; both come from the segment's
/// candidate list, and the prediction uses canonical names.
#[derive(Debug, Clone)]
pub struct RuleBackend {
    zh: CueLexicon,
    en: CueLexicon,
}

impl Default for RuleBackend {
    fn default() -> Self {
        RuleBackend {
            zh: CueLexicon::default_zh(),
            en: CueLexicon::default_en(),
        }
    }
}

impl RuleBackend {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_lexicon(mut self, lang: Lang, lexicon: CueLexicon) -> Self {
        match lang {
            Lang::Zh => self.zh = lexicon,
            Lang::En => self.en = lexicon,
        }
        self
    }

    fn lexicon(&self, lang: Lang) -> &CueLexicon {
        match lang {
            Lang::Zh => &self.zh,
            Lang::En => &self.en,
        }
    }

    fn pick_speaker(&self, segment: &Segment, pre: &Side, post: &Side) -> Option<usize> {
        let lexicon = self.lexicon(segment.lang);

        // Attribution clause right before the quotation: cue verb and
        // candidate mention in the same clause, nearest clause first,
        // nearest mention to the quotation.
        for clause in pre.clauses.iter().rev().take(ATTRIBUTION_CLAUSES) {
            let range = pre.clause_range(clause);
            if !pre.has_cue_in(range.clone(), lexicon, segment.lang) {
                continue;
            }
            if let Some(hit) = pre.hits_in(range).max_by_key(|h| h.start) {
                return Some(hit.candidate);
            }
        }
        // Then an attribution clause right after it.
        for clause in post.clauses.iter().take(ATTRIBUTION_CLAUSES) {
            let range = post.clause_range(clause);
            if !post.has_cue_in(range.clone(), lexicon, segment.lang) {
                continue;
            }
            if let Some(hit) = post.hits_in(range).min_by_key(|h| h.start) {
                return Some(hit.candidate);
            }
        }
        // No attribution clause: nearest mention, preceding side preferred.
        if let Some(hit) = pre.hits.iter().max_by_key(|h| h.start) {
            return Some(hit.candidate);
        }
        if let Some(hit) = post.hits.iter().min_by_key(|h| h.start) {
            return Some(hit.candidate);
        }
        // Nothing mentioned at all: the first candidate, if any.
        if segment.candidates.is_empty() {
            None
        } else {
            Some(0)
        }
    }

    fn pick_addressee(
        &self,
        segment: &Segment,
        pre: &Side,
        post: &Side,
        speaker: Option<usize>,
    ) -> Option<usize> {
        let not_speaker = |h: &&Hit| Some(h.candidate) != speaker;

        // Next turn: the clause immediately after the quotation usually
        // names whoever answers, and the answerer was being addressed.
        if let Some(clause) = post.clauses.first() {
            let range = post.clause_range(clause);
            if let Some(hit) = post.hits_in(range).filter(not_speaker).min_by_key(|h| h.start)
            {
                return Some(hit.candidate);
            }
        }
        // A non-speaker named in the attribution clauses before the quote.
        for clause in pre.clauses.iter().rev().take(ATTRIBUTION_CLAUSES) {
            let range = pre.clause_range(clause);
            if let Some(hit) = pre.hits_in(range).filter(not_speaker).max_by_key(|h| h.start)
            {
                return Some(hit.candidate);
            }
        }
        // Nearest non-speaker mention anywhere in the context.
        if let Some(hit) = pre.hits.iter().filter(not_speaker).max_by_key(|h| h.start) {
            return Some(hit.candidate);
        }
        if let Some(hit) = post.hits.iter().filter(not_speaker).min_by_key(|h| h.start) {
            return Some(hit.candidate);
        }
        // Vocative inside the quotation itself.
        let quote_side = Side::build(
            segment.quotation.quote.surface.clone(),
            segment.lang,
            &segment.candidates,
        );
        if let Some(hit) = quote_side.hits.iter().filter(not_speaker).min_by_key(|h| h.start) {
            return Some(hit.candidate);
        }
        // A single-candidate scene addresses itself (self-talk).
        if segment.candidates.len() == 1 {
            return Some(0);
        }
        None
    }
}

impl Backend for RuleBackend {
    fn name(&self) -> &str {
        "rule-baseline"
    }

    fn identify(&self, segment: &Segment, _mode: &Mode) -> Result<Prediction, BackendError> {
        let pre_text: String = segment.pre_context.iter().map(|s| s.text.as_str()).collect();
        let post_text: String = segment
            .post_context
            .iter()
            .map(|s| s.text.as_str())
            .collect();
        let pre = Side::build(pre_text, segment.lang, &segment.candidates);
        let post = Side::build(post_text, segment.lang, &segment.candidates);

        let speaker = self.pick_speaker(segment, &pre, &post);
        let addressee = self.pick_addressee(segment, &pre, &post, speaker);

        let name = |i: usize| segment.candidates[i].canonical_name.clone();
        Ok(Prediction {
            segment_id: segment.id().to_string(),
            speaker: speaker.map(name),
            addressees: addressee.map(name).into_iter().collect(),
        })
    }
}
