//! Context windowing around quotations: sentence segmentation, surface
//! tokenization, and bounded token/sentence windows.
//!
//! All offsets in this module are character (code point) offsets, never byte
//! offsets. Chinese text makes byte offsets ambiguous across encodings, so
//! the whole crate standardizes on code points; [`CharText`] does the
//! byte/char bookkeeping once per document.

mod sentence;
mod token;
mod window;

pub use sentence::{split_sentences, SentenceSpan, SentenceSplitter};
pub use token::{tokenize, Token};
pub use window::{
    default_splitter, sentence_context, sentence_window, sentence_window_with,
    token_range_for_span, token_window, SentenceContext,
};

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Document language. Selects sentence delimiters, tokenization, and
/// prompt/answer conventions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lang {
    /// Chinese: sentence enders 。！？；…, single code-point tokens.
    Zh,
    /// English: .!? enders with an abbreviation stop-list, word tokens.
    En,
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lang::Zh => write!(f, "zh"),
            Lang::En => write!(f, "en"),
        }
    }
}

impl std::str::FromStr for Lang {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zh" => Ok(Lang::Zh),
            "en" => Ok(Lang::En),
            other => Err(format!("unknown language '{other}' (expected zh or en)")),
        }
    }
}

/// Errors from window construction.
#[derive(Debug, Error)]
pub enum WindowError {
    #[error("quote span {start}..{end} out of bounds for document of {len} chars")]
    SpanOutOfBounds { start: usize, end: usize, len: usize },
    #[error("quote token range {start}..{end} invalid for document of {len} tokens")]
    TokenRangeInvalid { start: usize, end: usize, len: usize },
}

/// A document with O(1) slicing by character offsets.
///
/// Built once per novel; `char_starts[i]` is the byte offset of character
/// `i`, with a trailing sentinel equal to the byte length.
#[derive(Debug, Clone)]
pub struct CharText {
    text: String,
    char_starts: Vec<usize>,
}

impl CharText {
    pub fn new(text: impl Into<String>) -> Self {
        let text = text.into();
        let mut char_starts: Vec<usize> = text.char_indices().map(|(b, _)| b).collect();
        char_starts.push(text.len());
        CharText { text, char_starts }
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    /// Number of characters (code points), not bytes.
    pub fn len_chars(&self) -> usize {
        self.char_starts.len() - 1
    }

    /// Slice by character range. `None` when the range is out of bounds or
    /// inverted.
    pub fn slice(&self, range: Range<usize>) -> Option<&str> {
        if range.start > range.end || range.end > self.len_chars() {
            return None;
        }
        Some(&self.text[self.char_starts[range.start]..self.char_starts[range.end]])
    }
}

impl From<&str> for CharText {
    fn from(s: &str) -> Self {
        CharText::new(s)
    }
}

/// A bounded context passage around one quotation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Passage {
    /// The passage text, a contiguous slice of the source document.
    pub text: String,
    /// Character range of the quotation within `text`.
    pub quote_char_range: Range<usize>,
    /// Character range of `text` within the source document.
    pub source_char_range: Range<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn char_text_slices_by_code_points() {
        let t = CharText::new("郭靖道：你好。");
        assert_eq!(t.len_chars(), 7);
        assert_eq!(t.slice(0..2), Some("郭靖"));
        assert_eq!(t.slice(4..7), Some("你好。"));
        assert_eq!(t.slice(0..8), None);
        assert_eq!(t.slice(0..0), Some(""));
    }

    #[test]
    fn char_text_mixed_width() {
        let t = CharText::new("a黄b蓉c");
        assert_eq!(t.len_chars(), 5);
        assert_eq!(t.slice(1..4), Some("黄b蓉"));
    }

    #[test]
    fn lang_round_trips_through_str() {
        assert_eq!("zh".parse::<Lang>().unwrap(), Lang::Zh);
        assert_eq!("en".parse::<Lang>().unwrap(), Lang::En);
        assert!("fr".parse::<Lang>().is_err());
        assert_eq!(Lang::Zh.to_string(), "zh");
    }
}
