//! Segment construction: one quotation plus its bounded context and the
//! candidate characters detectable in that context.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::text::{
    default_splitter, sentence_context, token_range_for_span, token_window, tokenize, CharText,
    Lang, Passage, SentenceSpan, Token,
};

use super::search::alias_occurrences;
use super::{CharacterEntity, Corpus, CorpusError, QuotationRecord};

/// Context window shape around a quotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowSpec {
    /// `before`/`after` sentences around the quotation. The quotation itself
    /// is never split, however much punctuation it contains.
    Sentence { before: usize, after: usize },
    /// `before`/`after` surface tokens around the quotation, clamped at the
    /// document bounds.
    Token { before: usize, after: usize },
}

impl WindowSpec {
    /// Five sentences on each side.
    pub const SENTENCE_DEFAULT: WindowSpec = WindowSpec::Sentence {
        before: 5,
        after: 5,
    };

    /// 150 tokens before, 30 after.
    pub const TOKEN_DEFAULT: WindowSpec = WindowSpec::Token {
        before: 150,
        after: 30,
    };
}

/// One quotation packaged for identification: the record, its surrounding
/// context, and the characters a backend may choose from.
///
/// `pre_context`, the quotation span, and `post_context` tile a contiguous
/// slice of the novel, so [`Segment::context_text`] reproduces the original
/// passage exactly.
#[derive(Debug, Clone)]
pub struct Segment {
    pub quotation: QuotationRecord,
    pub lang: Lang,
    pub pre_context: Vec<SentenceSpan>,
    pub post_context: Vec<SentenceSpan>,
    /// Candidate characters, in roster order. Contains every roster entity
    /// with an alias occurrence in the passage, plus the gold speaker and
    /// addressee entities.
    pub candidates: Vec<CharacterEntity>,
}

impl Segment {
    pub fn id(&self) -> &str {
        &self.quotation.id
    }

    /// The contiguous passage text: pre-context, quotation, post-context.
    pub fn context_text(&self) -> String {
        let mut out = String::new();
        for s in &self.pre_context {
            out.push_str(&s.text);
        }
        out.push_str(&self.quotation.quote.surface);
        for s in &self.post_context {
            out.push_str(&s.text);
        }
        out
    }

    /// The gold speaker's display name: the canonical roster name when the
    /// mention is grounded, otherwise the annotated surface.
    pub fn gold_speaker_name(&self) -> &str {
        self.display_name(&self.quotation.speaker)
    }

    /// Gold addressee display names, in annotation order.
    pub fn gold_addressee_names(&self) -> Vec<&str> {
        self.quotation
            .addressees
            .iter()
            .map(|a| self.display_name(a))
            .collect()
    }

    fn display_name<'a>(&'a self, mention: &'a super::Mention) -> &'a str {
        mention
            .character_id
            .as_deref()
            .and_then(|id| self.candidates.iter().find(|c| c.id == id))
            .map_or(mention.surface.as_str(), |c| c.canonical_name.as_str())
    }

    /// The passage with the quotation located inside it.
    pub fn passage(&self) -> Passage {
        let quote = &self.quotation.quote;
        let start = self.pre_context.first().map_or(quote.start, |s| s.start);
        let end = self.post_context.last().map_or(quote.end, |s| s.end);
        Passage {
            text: self.context_text(),
            quote_char_range: (quote.start - start)..(quote.end - start),
            source_char_range: start..end,
        }
    }
}

/// Roster indices of every entity with an alias occurrence in `text`.
pub(crate) fn detect_candidate_indices(
    roster: &[CharacterEntity],
    text: &str,
    lang: Lang,
) -> BTreeSet<usize> {
    let mut found = BTreeSet::new();
    for (i, entity) in roster.iter().enumerate() {
        let hit = entity
            .aliases
            .iter()
            .any(|a| !alias_occurrences(text, a, lang).is_empty());
        if hit {
            found.insert(i);
        }
    }
    found
}

fn roster_index(corpus: &Corpus, character_id: &str) -> Option<usize> {
    corpus.roster().iter().position(|c| c.id == character_id)
}

fn build_one(
    corpus: &Corpus,
    record: &QuotationRecord,
    window: &WindowSpec,
    tokens: Option<&[Token]>,
) -> Result<Segment, CorpusError> {
    let novel = corpus
        .novel(&record.novel_id)
        .ok_or_else(|| CorpusError::UnknownNovel {
            record_id: record.id.clone(),
            novel_id: record.novel_id.clone(),
        })?;
    let doc: &CharText = &novel.text;
    let quote = record.quote.char_range();

    let (pre_context, post_context) = match *window {
        WindowSpec::Sentence { before, after } => {
            let splitter = default_splitter(novel.lang);
            let ctx = sentence_context(&splitter, doc, &quote, before, after)?;
            (ctx.pre, ctx.post)
        }
        WindowSpec::Token { before, after } => {
            let owned;
            let tokens = match tokens {
                Some(t) => t,
                None => {
                    owned = tokenize(doc.as_str(), novel.lang);
                    &owned
                }
            };
            let token_range =
                token_range_for_span(tokens, &quote).ok_or_else(|| CorpusError::Integrity {
                    record_id: record.id.clone(),
                    message: "quotation span overlaps no tokens".into(),
                })?;
            let passage = token_window(doc, tokens, &token_range, before, after)?;
            // Token boundaries may overshoot the annotated quote span by a
            // fraction of a token; tile around the annotated span so that
            // pre + quote + post always reconstructs the passage.
            let start = passage.source_char_range.start.min(quote.start);
            let end = passage.source_char_range.end.max(quote.end);
            let mut pre = Vec::new();
            if start < quote.start {
                pre.push(SentenceSpan {
                    text: doc.slice(start..quote.start).unwrap().to_string(),
                    start,
                    end: quote.start,
                });
            }
            let mut post = Vec::new();
            if quote.end < end {
                post.push(SentenceSpan {
                    text: doc.slice(quote.end..end).unwrap().to_string(),
                    start: quote.end,
                    end,
                });
            }
            (pre, post)
        }
    };

    let start = pre_context.first().map_or(quote.start, |s| s.start);
    let end = post_context.last().map_or(quote.end, |s| s.end);
    let passage_text = doc.slice(start..end).expect("window within document");

    let mut indices = detect_candidate_indices(corpus.roster(), passage_text, novel.lang);
    if let Some(id) = &record.speaker.character_id {
        indices.extend(roster_index(corpus, id));
    }
    for a in &record.addressees {
        if let Some(id) = &a.character_id {
            indices.extend(roster_index(corpus, id));
        }
    }
    let candidates = indices
        .into_iter()
        .map(|i| corpus.roster()[i].clone())
        .collect();

    Ok(Segment {
        quotation: record.clone(),
        lang: novel.lang,
        pre_context,
        post_context,
        candidates,
    })
}

/// Build the segment for one quotation record.
pub fn build_segment(
    corpus: &Corpus,
    record: &QuotationRecord,
    window: &WindowSpec,
) -> Result<Segment, CorpusError> {
    build_one(corpus, record, window, None)
}

/// Build segments for every quotation in the corpus, in corpus order.
/// Tokenization is done once per novel.
pub fn build_segments(corpus: &Corpus, window: &WindowSpec) -> Result<Vec<Segment>, CorpusError> {
    let token_cache: BTreeMap<String, Vec<Token>> = match window {
        WindowSpec::Token { .. } => corpus
            .novels()
            .map(|n| (n.id.clone(), tokenize(n.text.as_str(), n.lang)))
            .collect(),
        WindowSpec::Sentence { .. } => BTreeMap::new(),
    };
    corpus
        .quotations()
        .iter()
        .map(|q| {
            build_one(
                corpus,
                q,
                window,
                token_cache.get(&q.novel_id).map(Vec::as_slice),
            )
        })
        .collect()
}
