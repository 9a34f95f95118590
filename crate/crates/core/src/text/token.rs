//! Deterministic surface tokenization.
//!
//! English: runs of word characters (letters, digits, internal apostrophes
//! and hyphens) are tokens; every other non-whitespace character is a token
//! of its own. Chinese: every non-whitespace code point is a token. This is
//! intentionally the simplest reproducible rule; subword tokenization belongs
//! to model backends, not the window builder.

use super::Lang;

/// A surface token with character offsets into the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub start: usize,
    pub end: usize,
}

fn is_en_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

fn is_en_word_joiner(c: char) -> bool {
    c == '\'' || c == '’' || c == '-'
}

/// Tokenize `text`. Offsets are character offsets; tokens never overlap and
/// appear in source order. Whitespace is not part of any token.
pub fn tokenize(text: &str, lang: Lang) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0usize;

    match lang {
        Lang::Zh => {
            while i < chars.len() {
                if !chars[i].is_whitespace() {
                    tokens.push(Token {
                        text: chars[i].to_string(),
                        start: i,
                        end: i + 1,
                    });
                }
                i += 1;
            }
        }
        Lang::En => {
            while i < chars.len() {
                let c = chars[i];
                if c.is_whitespace() {
                    i += 1;
                } else if is_en_word_char(c) {
                    let start = i;
                    i += 1;
                    while i < chars.len()
                        && (is_en_word_char(chars[i])
                            || (is_en_word_joiner(chars[i])
                                && i + 1 < chars.len()
                                && is_en_word_char(chars[i + 1])))
                    {
                        i += 1;
                    }
                    tokens.push(Token {
                        text: chars[start..i].iter().collect(),
                        start,
                        end: i,
                    });
                } else {
                    tokens.push(Token {
                        text: c.to_string(),
                        start: i,
                        end: i + 1,
                    });
                    i += 1;
                }
            }
        }
    }
    tokens
}
