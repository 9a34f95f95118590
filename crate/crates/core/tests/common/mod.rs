//! Shared fixtures for the integration suites.
//!
//! Corpora here are built by locating annotation spans with a substring
//! search instead of hand-counted offsets, so a fixture edit cannot
//! silently desynchronize text and annotations.

#![allow(dead_code)]

pub mod stub;
pub mod traces;

use colloquy_core::corpus::{CharacterEntity, Corpus, Mention, Novel, QuotationRecord, Span};
use colloquy_core::text::{CharText, Lang};

/// Character offsets of the `nth` (0-based) occurrence of `needle`.
pub fn char_offsets(text: &str, needle: &str, nth: usize) -> (usize, usize) {
    let chars: Vec<char> = text.chars().collect();
    let pattern: Vec<char> = needle.chars().collect();
    assert!(!pattern.is_empty(), "needle must be non-empty");
    let mut seen = 0usize;
    if chars.len() >= pattern.len() {
        for start in 0..=chars.len() - pattern.len() {
            if chars[start..start + pattern.len()] == pattern[..] {
                if seen == nth {
                    return (start, start + pattern.len());
                }
                seen += 1;
            }
        }
    }
    panic!("occurrence {nth} of {needle:?} not found in fixture text");
}

pub fn span_of(text: &str, needle: &str, nth: usize) -> Span {
    let (start, end) = char_offsets(text, needle, nth);
    Span::new(needle, start, end)
}

pub fn mention_of(text: &str, needle: &str, nth: usize, character: Option<&str>) -> Mention {
    let (start, end) = char_offsets(text, needle, nth);
    let mention = Mention::new(needle, start, end);
    match character {
        Some(id) => mention.with_character(id),
        None => mention,
    }
}

pub fn zh_novel(id: &str, text: &str) -> Novel {
    Novel {
        id: id.into(),
        title: format!("《{id}》"),
        author: "佚名".into(),
        lang: Lang::Zh,
        text: CharText::new(text),
    }
}

/// `n` copies of the same exchange, one quotation per copy: 甲 addressing
/// 乙 with a cue verb. Record `q{i:04}` has gold speaker 甲 and gold
/// addressee 乙; the roster grounds both, and 乙 carries the alias 小乙.
pub fn paired_exchange(n: usize) -> Corpus {
    let mut text = String::new();
    let mut quotations = Vec::with_capacity(n);
    let mut cursor = 0usize;
    for i in 0..n {
        let line = format!("第{i}句。");
        let line_len = line.chars().count();
        let block = format!("甲对乙道：“{line}”");
        quotations.push(QuotationRecord {
            id: format!("q{i:04}"),
            novel_id: "paired".into(),
            quote: Span::new(line, cursor + 6, cursor + 6 + line_len),
            speaker: Mention::new("甲", cursor, cursor + 1).with_character("jia"),
            addressees: vec![Mention::new("乙", cursor + 2, cursor + 3).with_character("yi")],
            cue: Some(Span::new("道", cursor + 3, cursor + 4)),
            mode: None,
            monologue: false,
        });
        cursor += block.chars().count();
        text.push_str(&block);
    }
    let roster = [
        CharacterEntity::new("jia", "甲"),
        CharacterEntity::new("yi", "乙").with_aliases(["小乙"]),
    ];
    Corpus::new([zh_novel("paired", &text)], roster, quotations).expect("fixture is consistent")
}

/// Four records with deliberately uneven element coverage: cues on three,
/// a mode on one, an addressee on three.
pub fn mixed_elements() -> Corpus {
    let text = "甲怒道：“站住。”乙停了下来。甲又道：“走吧。”乙说：“好。”甲点头。“嗯。”";
    let record = |id: &str,
                  quote: &str,
                  speaker: (usize, &str, &str),
                  addressee: Option<(usize, &str, &str)>,
                  cue: Option<(usize, &str)>,
                  mode: Option<&str>| {
        QuotationRecord {
            id: id.into(),
            novel_id: "mixed".into(),
            quote: span_of(text, quote, 0),
            speaker: mention_of(text, speaker.1, speaker.0, Some(speaker.2)),
            addressees: addressee
                .map(|(nth, surface, id)| mention_of(text, surface, nth, Some(id)))
                .into_iter()
                .collect(),
            cue: cue.map(|(nth, surface)| span_of(text, surface, nth)),
            mode: mode.map(|surface| span_of(text, surface, 0)),
            monologue: false,
        }
    };
    let quotations = [
        record(
            "m1",
            "站住。",
            (0, "甲", "jia"),
            Some((0, "乙", "yi")),
            Some((0, "道")),
            Some("怒"),
        ),
        record(
            "m2",
            "走吧。",
            (1, "甲", "jia"),
            Some((1, "乙", "yi")),
            Some((1, "道")),
            None,
        ),
        record(
            "m3",
            "好。",
            (1, "乙", "yi"),
            Some((2, "甲", "jia")),
            Some((0, "说")),
            None,
        ),
        record("m4", "嗯。", (2, "甲", "jia"), None, None, None),
    ];
    let roster = [
        CharacterEntity::new("jia", "甲"),
        CharacterEntity::new("yi", "乙"),
    ];
    Corpus::new([zh_novel("mixed", text)], roster, quotations).expect("fixture is consistent")
}

/// A three-turn alternating two-party exchange. The middle turn is the
/// interesting one: its speaker is named before the quotation and its
/// addressee is the other party, named in the reply turn.
pub fn alternating_exchange() -> Corpus {
    let text = "陆庄主道：“这次来的是那个小王爷的师父，本事可比他大得多，因此我担了心。”黄蓉道：“咦，你怎么知道？”陆庄主道：“听脚步声。”";
    // The second quotation contains 知道, so the cue occurrence index is
    // given explicitly rather than derived from the record number.
    let record = |id: &str,
                  quote: &str,
                  speaker: (usize, &str, &str),
                  addr: (usize, &str, &str),
                  cue_nth: usize| {
        QuotationRecord {
            id: id.into(),
            novel_id: "manor".into(),
            quote: span_of(text, quote, 0),
            speaker: mention_of(text, speaker.1, speaker.0, Some(speaker.2)),
            addressees: vec![mention_of(text, addr.1, addr.0, Some(addr.2))],
            cue: Some(span_of(text, "道", cue_nth)),
            mode: None,
            monologue: false,
        }
    };
    let quotations = [
        record(
            "q1",
            "这次来的是那个小王爷的师父，本事可比他大得多，因此我担了心。",
            (0, "陆庄主", "luzhuangzhu"),
            (0, "黄蓉", "huangrong"),
            0,
        ),
        record("q2", "咦，你怎么知道？", (0, "黄蓉", "huangrong"), (1, "陆庄主", "luzhuangzhu"), 1),
        record("q3", "听脚步声。", (1, "陆庄主", "luzhuangzhu"), (0, "黄蓉", "huangrong"), 3),
    ];
    let roster = [
        CharacterEntity::new("huangrong", "黄蓉").with_aliases(["蓉儿"]),
        CharacterEntity::new("luzhuangzhu", "陆庄主"),
    ];
    Corpus::new([zh_novel("manor", text)], roster, quotations).expect("fixture is consistent")
}
