//! Rule-based sentence segmentation for Chinese and English.
//!
//! The splitter is a partition: every character belongs to exactly one
//! sentence, so concatenating the sentences reproduces the input byte for
//! byte. Trailing whitespace after a sentence ender attaches to the sentence
//! it follows; closing quote marks and brackets immediately after an ender
//! attach to the preceding sentence as well.

use super::Lang;

/// One sentence with its character offsets into the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceSpan {
    pub text: String,
    /// Character offset of the first character (inclusive).
    pub start: usize,
    /// Character offset one past the last character (exclusive).
    pub end: usize,
}

/// English abbreviations whose trailing period does not end a sentence.
const EN_ABBREVIATIONS: &[&str] = &[
    "Mr", "Mrs", "Ms", "Dr", "St", "Prof", "Sr", "Jr", "Rev", "Hon", "Capt", "Col", "Gen", "Lt",
    "Sgt", "vs", "etc", "No", "Fig", "al",
];

/// Characters that close a quotation or bracket and bind to the sentence
/// they terminate.
const CLOSERS: &[char] = &[
    '”', '’', '」', '』', '）', '】', '》', '"', '\'', ')', ']',
];

const ZH_ENDERS: &[char] = &['。', '！', '？', '；', '…'];
const ZH_CLAUSE_ENDERS: &[char] = &['，', '：'];
const EN_ENDERS: &[char] = &['.', '!', '?'];
const EN_CLAUSE_ENDERS: &[char] = &[',', ';', ':'];

/// Configurable sentence splitter.
///
/// The default splits on terminal punctuation only. [`SentenceSplitter::clause_level`]
/// additionally breaks on clause punctuation (， ： for Chinese; , ; : for
/// English), which matches the short-sentence segmentation style used for
/// Chinese context windows.
#[derive(Debug, Clone)]
pub struct SentenceSplitter {
    lang: Lang,
    clause_level: bool,
}

impl SentenceSplitter {
    pub fn new(lang: Lang) -> Self {
        SentenceSplitter {
            lang,
            clause_level: false,
        }
    }

    /// A splitter that also breaks at clause punctuation ("short sentences").
    pub fn clause_level(lang: Lang) -> Self {
        SentenceSplitter {
            lang,
            clause_level: true,
        }
    }

    pub fn lang(&self) -> Lang {
        self.lang
    }

    fn is_ender(&self, c: char) -> bool {
        let (enders, clause) = match self.lang {
            Lang::Zh => (ZH_ENDERS, ZH_CLAUSE_ENDERS),
            Lang::En => (EN_ENDERS, EN_CLAUSE_ENDERS),
        };
        enders.contains(&c) || (self.clause_level && clause.contains(&c))
    }

    /// Split `text` into sentences. Offsets are character offsets into
    /// `text`; the spans tile the input exactly.
    pub fn split(&self, text: &str) -> Vec<SentenceSpan> {
        let chars: Vec<char> = text.chars().collect();
        let n = chars.len();
        let mut sentences = Vec::new();
        let mut start = 0usize;
        let mut i = 0usize;

        while i < n {
            let c = chars[i];
            if self.is_ender(c) && !self.suppress_break(&chars, i) {
                // Consume any run of further enders (e.g. ?! or ……).
                let mut j = i + 1;
                while j < n && self.is_ender(chars[j]) {
                    j += 1;
                }
                // Closing quotes/brackets directly after the ender bind left.
                while j < n && CLOSERS.contains(&chars[j]) {
                    j += 1;
                }
                // Trailing whitespace attaches to the sentence it follows.
                while j < n && chars[j].is_whitespace() {
                    j += 1;
                }
                sentences.push(span_of(&chars, start, j));
                start = j;
                i = j;
            } else {
                i += 1;
            }
        }
        if start < n {
            sentences.push(span_of(&chars, start, n));
        }
        sentences
    }

    /// True when the ender at position `i` must not break a sentence.
    fn suppress_break(&self, chars: &[char], i: usize) -> bool {
        if self.lang != Lang::En {
            return false;
        }
        let c = chars[i];
        if c == '.' {
            // A period inside a number ("3.14") or not followed by space,
            // closer, or end of text does not terminate.
            let mut j = i + 1;
            while j < chars.len() && (EN_ENDERS.contains(&chars[j]) || CLOSERS.contains(&chars[j]))
            {
                j += 1;
            }
            if j < chars.len() && !chars[j].is_whitespace() {
                return true;
            }
            // Abbreviation stop-list and single-letter initials ("J. Smith").
            let word = preceding_word(chars, i);
            if word.len() == 1 && word.chars().next().is_some_and(|w| w.is_uppercase()) {
                return true;
            }
            if EN_ABBREVIATIONS
                .iter()
                .any(|a| a.eq_ignore_ascii_case(&word))
            {
                return true;
            }
        }
        false
    }
}

fn preceding_word(chars: &[char], i: usize) -> String {
    let mut start = i;
    while start > 0 && chars[start - 1].is_alphabetic() {
        start -= 1;
    }
    chars[start..i].iter().collect()
}

fn span_of(chars: &[char], start: usize, end: usize) -> SentenceSpan {
    SentenceSpan {
        text: chars[start..end].iter().collect(),
        start,
        end,
    }
}

/// Split `text` into sentences at terminal punctuation.
pub fn split_sentences(text: &str, lang: Lang) -> Vec<SentenceSpan> {
    SentenceSplitter::new(lang).split(text)
}
