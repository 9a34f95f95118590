//! Parsing of free-text model answers.
//!
//! Models rarely reproduce the requested answer format exactly; the parser
//! tolerates field reordering, English and Chinese labels in the same
//! answer, full-width or half-width colons, wrapping quotes, and trailing
//! punctuation. It fails only when no recognizable field label occurs at
//! all, and the error keeps the raw answer for diagnosis.

use thiserror::Error;

use crate::text::Lang;

/// The answer text carried no recognizable speaker or addressee label.
#[derive(Debug, Clone, Error)]
#[error("no speaker or addressee field in model answer: {raw_response:?}")]
pub struct AnswerParseError {
    pub raw_response: String,
}

/// A structured reading of one model answer. A missing field is simply
/// absent, which downstream scoring counts as wrong; only a fully
/// unrecognizable answer is a parse error.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParsedAnswer {
    pub speaker: Option<String>,
    pub addressees: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum FieldKind {
    Speaker,
    Addressee,
}

const SPEAKER_LABELS: &[&str] = &["speaker", "说话人", "说话者"];
const ADDRESSEE_LABELS: &[&str] = &["addressees", "addressee", "听话人", "听话者", "受话人"];

struct Occurrence {
    kind: FieldKind,
    /// Character position where the label starts.
    label_start: usize,
    /// Character position where the field value starts (past the colon).
    value_start: usize,
}

fn match_label(chars: &[char], at: usize, label: &str) -> Option<usize> {
    let label_chars: Vec<char> = label.chars().collect();
    let end = at + label_chars.len();
    if end > chars.len() {
        return None;
    }
    let matches = chars[at..end]
        .iter()
        .zip(&label_chars)
        .all(|(a, b)| a.eq_ignore_ascii_case(b));
    if !matches {
        return None;
    }
    // A label counts only when a colon follows, optionally after spaces.
    let mut i = end;
    while i < chars.len() && (chars[i] == ' ' || chars[i] == '\t') {
        i += 1;
    }
    if i < chars.len() && (chars[i] == ':' || chars[i] == '：') {
        Some(i + 1)
    } else {
        None
    }
}

fn find_occurrences(chars: &[char]) -> Vec<Occurrence> {
    let mut out: Vec<Occurrence> = Vec::new();
    for at in 0..chars.len() {
        let candidates = SPEAKER_LABELS
            .iter()
            .map(|l| (FieldKind::Speaker, *l))
            .chain(ADDRESSEE_LABELS.iter().map(|l| (FieldKind::Addressee, *l)));
        for (kind, label) in candidates {
            if let Some(value_start) = match_label(chars, at, label) {
                out.push(Occurrence {
                    kind,
                    label_start: at,
                    value_start,
                });
                break;
            }
        }
    }
    out
}

const QUOTE_PAIRS: &[(char, char)] = &[
    ('"', '"'),
    ('“', '”'),
    ('”', '“'),
    ('\'', '\''),
    ('‘', '’'),
    ('「', '」'),
    ('『', '』'),
];

const TRAILING_PUNCT: &[char] = &[
    '。', '．', '.', '，', ',', ';', '；', '、', '!', '！', '?', '？', '）', ')',
];

fn clean_value(raw: &str) -> String {
    let mut value = raw.trim();
    loop {
        let mut chars = value.chars();
        let (first, last) = (chars.next(), chars.next_back());
        if let (Some(f), Some(l)) = (first, last) {
            if value.chars().count() >= 2 && QUOTE_PAIRS.contains(&(f, l)) {
                value = &value[f.len_utf8()..value.len() - l.len_utf8()];
                value = value.trim();
                continue;
            }
            if TRAILING_PUNCT.contains(&l) {
                value = &value[..value.len() - l.len_utf8()];
                value = value.trim();
                continue;
            }
        }
        break;
    }
    value.to_string()
}

fn is_quote_char(c: char) -> bool {
    QUOTE_PAIRS.iter().any(|&(a, b)| c == a || c == b)
}

/// Strip punctuation and a quote pair wrapping a whole addressee list, as
/// in `Addressee: "A, B"`. A wrap is only removed when the interior holds
/// no further quote characters, so per-item quoting (`"A", "B"`) survives
/// for the per-item cleanup.
fn strip_list_wrap(value: &str) -> &str {
    let mut v = value.trim();
    loop {
        if let Some(l) = v.chars().next_back() {
            if TRAILING_PUNCT.contains(&l) {
                v = v[..v.len() - l.len_utf8()].trim_end();
                continue;
            }
        }
        let mut cs = v.chars();
        if let (Some(f), Some(l)) = (cs.next(), cs.next_back()) {
            if v.chars().count() >= 2 && QUOTE_PAIRS.contains(&(f, l)) {
                let inner = v[f.len_utf8()..v.len() - l.len_utf8()].trim();
                if !inner.chars().any(is_quote_char) {
                    v = inner;
                    continue;
                }
            }
        }
        break;
    }
    v
}

fn split_addressees(value: &str, lang: Lang) -> Vec<String> {
    let value = strip_list_wrap(value);
    let pieces: Vec<String> = match lang {
        Lang::Zh => value
            .split(['、', '，', ',', '和'])
            .map(str::to_string)
            .collect(),
        Lang::En => value
            .split(['、', '，', ','])
            .flat_map(|piece| piece.split(" and "))
            .map(str::to_string)
            .collect(),
    };
    let mut out: Vec<String> = Vec::new();
    for piece in pieces {
        let cleaned = clean_value(&piece);
        if !cleaned.is_empty() && !out.contains(&cleaned) {
            out.push(cleaned);
        }
    }
    out
}

/// Parse a model's answer text. `lang` selects the addressee list
/// delimiters; labels from both languages are recognized regardless.
pub fn parse_answer(raw: &str, lang: Lang) -> Result<ParsedAnswer, AnswerParseError> {
    let chars: Vec<char> = raw.chars().collect();
    let occurrences = find_occurrences(&chars);
    if occurrences.is_empty() {
        return Err(AnswerParseError {
            raw_response: raw.to_string(),
        });
    }

    let mut answer = ParsedAnswer::default();
    for (i, occ) in occurrences.iter().enumerate() {
        let value_end = occurrences
            .get(i + 1)
            .map_or(chars.len(), |next| next.label_start);
        let value: String = chars[occ.value_start..value_end].iter().collect();
        match occ.kind {
            FieldKind::Speaker => {
                if answer.speaker.is_none() {
                    let cleaned = clean_value(&value);
                    if !cleaned.is_empty() {
                        answer.speaker = Some(cleaned);
                    }
                }
            }
            FieldKind::Addressee => {
                if answer.addressees.is_empty() {
                    answer.addressees = split_addressees(&value, lang);
                }
            }
        }
    }
    Ok(answer)
}
