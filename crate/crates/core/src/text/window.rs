//! Token and sentence windows around a quotation.
//!
//! Both window kinds clamp at document edges instead of erroring, never
//! cross document boundaries, and always return a contiguous slice of the
//! source. Enlarging `before` or `after` never shrinks a window.

use std::ops::Range;

use super::sentence::{SentenceSpan, SentenceSplitter};
use super::token::Token;
use super::{CharText, Lang, Passage, WindowError};

/// The sentences on either side of a quotation, in document order.
/// Offsets are character offsets into the source document; the pre spans
/// tile `[pre[0].start, quote.start)` and the post spans tile
/// `[quote.end, post.last().end)`.
#[derive(Debug, Clone)]
pub struct SentenceContext {
    pub pre: Vec<SentenceSpan>,
    pub post: Vec<SentenceSpan>,
}

/// Map a character span to the range of tokens overlapping it.
/// `None` when no token overlaps the span.
pub fn token_range_for_span(tokens: &[Token], span: &Range<usize>) -> Option<Range<usize>> {
    let mut first = None;
    let mut last = None;
    for (i, t) in tokens.iter().enumerate() {
        if t.start < span.end && span.start < t.end {
            if first.is_none() {
                first = Some(i);
            }
            last = Some(i);
        }
    }
    match (first, last) {
        (Some(f), Some(l)) => Some(f..l + 1),
        _ => None,
    }
}

/// Cut a passage of up to `before` tokens preceding and `after` tokens
/// following the quotation token range, clamped at document edges.
pub fn token_window(
    doc: &CharText,
    tokens: &[Token],
    quote_token_range: &Range<usize>,
    before: usize,
    after: usize,
) -> Result<Passage, WindowError> {
    if quote_token_range.start >= quote_token_range.end || quote_token_range.end > tokens.len() {
        return Err(WindowError::TokenRangeInvalid {
            start: quote_token_range.start,
            end: quote_token_range.end,
            len: tokens.len(),
        });
    }
    let lo = quote_token_range.start.saturating_sub(before);
    let hi = (quote_token_range.end + after).min(tokens.len());

    let src_start = tokens[lo].start;
    let src_end = tokens[hi - 1].end;
    let quote_src_start = tokens[quote_token_range.start].start;
    let quote_src_end = tokens[quote_token_range.end - 1].end;

    let text = doc
        .slice(src_start..src_end)
        .ok_or(WindowError::SpanOutOfBounds {
            start: src_start,
            end: src_end,
            len: doc.len_chars(),
        })?
        .to_string();

    Ok(Passage {
        text,
        quote_char_range: quote_src_start - src_start..quote_src_end - src_start,
        source_char_range: src_start..src_end,
    })
}

/// Split the text on either side of the quotation into sentences and keep
/// the `before` nearest preceding and `after` nearest following ones.
///
/// The quotation span is atomic: the split never sees its interior, so
/// punctuation inside the quotation cannot break the context sentences.
pub fn sentence_context(
    splitter: &SentenceSplitter,
    doc: &CharText,
    quote_span: &Range<usize>,
    before: usize,
    after: usize,
) -> Result<SentenceContext, WindowError> {
    let len = doc.len_chars();
    if quote_span.start > quote_span.end || quote_span.end > len {
        return Err(WindowError::SpanOutOfBounds {
            start: quote_span.start,
            end: quote_span.end,
            len,
        });
    }

    let pre_text = doc.slice(0..quote_span.start).expect("validated");
    let mut pre = splitter.split(pre_text);
    if pre.len() > before {
        pre.drain(..pre.len() - before);
    }

    let post_text = doc.slice(quote_span.end..len).expect("validated");
    let mut post = splitter.split(post_text);
    post.truncate(after);
    for s in &mut post {
        s.start += quote_span.end;
        s.end += quote_span.end;
    }

    Ok(SentenceContext { pre, post })
}

/// Cut a passage of up to `before` sentences preceding and `after`
/// sentences following the quotation span, clamped at document edges.
pub fn sentence_window_with(
    splitter: &SentenceSplitter,
    doc: &CharText,
    quote_span: &Range<usize>,
    before: usize,
    after: usize,
) -> Result<Passage, WindowError> {
    let ctx = sentence_context(splitter, doc, quote_span, before, after)?;
    let src_start = ctx.pre.first().map_or(quote_span.start, |s| s.start);
    let src_end = ctx.post.last().map_or(quote_span.end, |s| s.end);
    let text = doc.slice(src_start..src_end).expect("validated").to_string();
    Ok(Passage {
        text,
        quote_char_range: quote_span.start - src_start..quote_span.end - src_start,
        source_char_range: src_start..src_end,
    })
}

/// Sentence window with the default segmentation for `lang`: short-clause
/// segmentation for Chinese (the corpus annotation style), terminal
/// punctuation only for English.
pub fn sentence_window(
    doc: &CharText,
    quote_span: &Range<usize>,
    before: usize,
    after: usize,
    lang: Lang,
) -> Result<Passage, WindowError> {
    sentence_window_with(&default_splitter(lang), doc, quote_span, before, after)
}

/// The splitter [`sentence_window`] uses for `lang`.
pub fn default_splitter(lang: Lang) -> SentenceSplitter {
    match lang {
        Lang::Zh => SentenceSplitter::clause_level(Lang::Zh),
        Lang::En => SentenceSplitter::new(Lang::En),
    }
}
