//! Surface search for character aliases inside passage text.

use crate::text::Lang;

/// Find every occurrence of `alias` in `haystack`, returning character
/// offset ranges.
///
/// Chinese aliases match as plain substrings. English aliases match
/// case-insensitively and only at word boundaries, so "Ann" does not match
/// inside "Anna".
pub fn alias_occurrences(haystack: &str, alias: &str, lang: Lang) -> Vec<(usize, usize)> {
    let hay: Vec<char> = haystack.chars().collect();
    let needle: Vec<char> = alias.chars().collect();
    if needle.is_empty() || needle.len() > hay.len() {
        return Vec::new();
    }

    let mut out = Vec::new();
    for start in 0..=(hay.len() - needle.len()) {
        let end = start + needle.len();
        if !chars_match(&hay[start..end], &needle, lang) {
            continue;
        }
        if lang == Lang::En && !at_word_boundary(&hay, start, end) {
            continue;
        }
        out.push((start, end));
    }
    out
}

fn chars_match(window: &[char], needle: &[char], lang: Lang) -> bool {
    match lang {
        Lang::Zh => window == needle,
        Lang::En => window
            .iter()
            .zip(needle)
            .all(|(a, b)| a.to_lowercase().eq(b.to_lowercase())),
    }
}

fn at_word_boundary(hay: &[char], start: usize, end: usize) -> bool {
    let before_ok = start == 0 || !hay[start - 1].is_alphanumeric();
    let after_ok = end == hay.len() || !hay[end].is_alphanumeric();
    before_ok && after_ok
}
