//! Attribution scenarios for the rule baseline, one per annotation
//! guideline. Each scenario pins the full prediction, so together they
//! freeze the baseline's priority order: attribution clause, next turn,
//! preceding context before following, quotation-internal vocatives last.

use colloquy_core::backend::{Backend, Mode, Prediction, RuleBackend};
use colloquy_core::corpus::{
    build_segments, CharacterEntity, Corpus, Mention, QuotationRecord, WindowSpec,
};

use super::{mention_of, span_of, zh_novel};

pub struct Expect {
    pub record_id: &'static str,
    pub speaker: Option<&'static str>,
    pub addressees: &'static [&'static str],
}

pub struct Trace {
    pub label: &'static str,
    pub corpus: Corpus,
    pub expect: Vec<Expect>,
}

/// Run the rule baseline over the trace corpus and check every expected
/// prediction, including that repeating a call changes nothing. Returns
/// the predictions for scenario-specific follow-up assertions.
pub fn run_trace(trace: &Trace) -> Vec<Prediction> {
    let segments = build_segments(&trace.corpus, &WindowSpec::SENTENCE_DEFAULT)
        .expect("trace corpus builds segments");
    let backend = RuleBackend::new();
    let mut predictions = Vec::new();
    for expect in &trace.expect {
        let segment = segments
            .iter()
            .find(|s| s.id() == expect.record_id)
            .unwrap_or_else(|| panic!("{}: no segment {}", trace.label, expect.record_id));
        let prediction = backend
            .identify(segment, &Mode::ZeroShot)
            .unwrap_or_else(|e| panic!("{}: {e}", trace.label));
        let repeat = backend
            .identify(segment, &Mode::ZeroShot)
            .unwrap_or_else(|e| panic!("{}: {e}", trace.label));
        assert_eq!(
            prediction, repeat,
            "{}: identical input must give identical output",
            trace.label
        );
        assert_eq!(
            prediction.speaker.as_deref(),
            expect.speaker,
            "{}: speaker for {}",
            trace.label,
            expect.record_id
        );
        let got: Vec<&str> = prediction.addressees.iter().map(String::as_str).collect();
        assert_eq!(
            got, expect.addressees,
            "{}: addressees for {}",
            trace.label, expect.record_id
        );
        predictions.push(prediction);
    }
    predictions
}

pub fn all() -> Vec<Trace> {
    vec![
        roster_only_candidates(),
        preceding_context_preferred(),
        immediate_next_turn_addressee(),
        quote_internal_vocative_last_resort(),
        one_entry_per_character(),
        group_scene_members(),
        silent_scenes_get_no_addressee(),
    ]
}

/// Names outside the candidate roster are invisible to the baseline: the
/// unnamed bystander 路人甲 sits right next to the cue verb, yet both
/// prediction slots go to rostered characters.
pub fn roster_only_candidates() -> Trace {
    let text = "郭靖和黄蓉站在门口。路人甲道：“动手吧。”";
    let quotations = [QuotationRecord {
        id: "q1".into(),
        novel_id: "gate".into(),
        quote: span_of(text, "动手吧。", 0),
        speaker: mention_of(text, "路人甲", 0, None),
        addressees: vec![
            mention_of(text, "郭靖", 0, Some("guojing")),
            mention_of(text, "黄蓉", 0, Some("huangrong")),
        ],
        cue: Some(span_of(text, "道", 0)),
        mode: None,
        monologue: false,
    }];
    let roster = [
        CharacterEntity::new("guojing", "郭靖"),
        CharacterEntity::new("huangrong", "黄蓉"),
    ];
    Trace {
        label: "roster-only candidates",
        corpus: Corpus::new([zh_novel("gate", text)], roster, quotations)
            .expect("fixture is consistent"),
        expect: vec![Expect {
            record_id: "q1",
            speaker: Some("黄蓉"),
            addressees: &["郭靖"],
        }],
    }
}

/// With no addressee in the next turn, a candidate in the preceding
/// context beats one further into the following context.
pub fn preceding_context_preferred() -> Trace {
    let text = "郭靖在旁。陆庄主道：“请进。”众人进屋。朱聪跟上。";
    let quotations = [QuotationRecord {
        id: "q1".into(),
        novel_id: "hall".into(),
        quote: span_of(text, "请进。", 0),
        speaker: mention_of(text, "陆庄主", 0, Some("luzhuangzhu")),
        addressees: vec![mention_of(text, "郭靖", 0, Some("guojing"))],
        cue: Some(span_of(text, "道", 0)),
        mode: None,
        monologue: false,
    }];
    let roster = [
        CharacterEntity::new("guojing", "郭靖"),
        CharacterEntity::new("luzhuangzhu", "陆庄主"),
        CharacterEntity::new("zhucong", "朱聪"),
    ];
    Trace {
        label: "preceding context preferred",
        corpus: Corpus::new([zh_novel("hall", text)], roster, quotations)
            .expect("fixture is consistent"),
        expect: vec![Expect {
            record_id: "q1",
            speaker: Some("陆庄主"),
            addressees: &["郭靖"],
        }],
    }
}

/// A candidate named in the turn immediately after the quotation is taken
/// as the addressee outright, ahead of nearer preceding mentions.
pub fn immediate_next_turn_addressee() -> Trace {
    let text = "郭靖立在一旁。陆庄主道：“里面请。”黄蓉便随他进去。";
    let quotations = [QuotationRecord {
        id: "q1".into(),
        novel_id: "door".into(),
        quote: span_of(text, "里面请。", 0),
        speaker: mention_of(text, "陆庄主", 0, Some("luzhuangzhu")),
        addressees: vec![mention_of(text, "黄蓉", 0, Some("huangrong"))],
        cue: Some(span_of(text, "道", 0)),
        mode: None,
        monologue: false,
    }];
    let roster = [
        CharacterEntity::new("guojing", "郭靖"),
        CharacterEntity::new("luzhuangzhu", "陆庄主"),
        CharacterEntity::new("huangrong", "黄蓉"),
    ];
    Trace {
        label: "immediate next-turn addressee",
        corpus: Corpus::new([zh_novel("door", text)], roster, quotations)
            .expect("fixture is consistent"),
        expect: vec![Expect {
            record_id: "q1",
            speaker: Some("陆庄主"),
            addressees: &["黄蓉"],
        }],
    }
}

/// A vocative inside the quotation loses to any candidate in the outer
/// context, and wins only when the context names nobody else.
pub fn quote_internal_vocative_last_resort() -> Trace {
    let crowded = "黄蓉在旁。梅超风喝道：“裘千仞，你敢！”";
    let bare = "梅超风喝道：“裘千仞，你敢！”";
    let record = |id: &str, novel: &str, text: &str, addressee: Mention| QuotationRecord {
        id: id.into(),
        novel_id: novel.into(),
        quote: span_of(text, "裘千仞，你敢！", 0),
        speaker: mention_of(text, "梅超风", 0, Some("meichaofeng")),
        addressees: vec![addressee],
        cue: Some(span_of(text, "喝", 0)),
        mode: None,
        monologue: false,
    };
    let quotations = [
        record(
            "q1",
            "crowded",
            crowded,
            mention_of(crowded, "黄蓉", 0, Some("huangrong")),
        ),
        record(
            "q2",
            "bare",
            bare,
            mention_of(bare, "裘千仞", 0, Some("qiuqianren")),
        ),
    ];
    let roster = [
        CharacterEntity::new("huangrong", "黄蓉"),
        CharacterEntity::new("meichaofeng", "梅超风"),
        CharacterEntity::new("qiuqianren", "裘千仞"),
    ];
    Trace {
        label: "quote-internal vocative last resort",
        corpus: Corpus::new(
            [zh_novel("crowded", crowded), zh_novel("bare", bare)],
            roster,
            quotations,
        )
        .expect("fixture is consistent"),
        expect: vec![
            Expect {
                record_id: "q1",
                speaker: Some("梅超风"),
                addressees: &["黄蓉"],
            },
            Expect {
                record_id: "q2",
                speaker: Some("梅超风"),
                addressees: &["裘千仞"],
            },
        ],
    }
}

/// A character reached through two different aliases still produces a
/// single entry, under the canonical name.
pub fn one_entry_per_character() -> Trace {
    let text = "黄蓉笑了笑，蓉儿上前。陆庄主道：“请。”";
    let quotations = [QuotationRecord {
        id: "q1".into(),
        novel_id: "smile".into(),
        quote: span_of(text, "请。", 0),
        speaker: mention_of(text, "陆庄主", 0, Some("luzhuangzhu")),
        addressees: vec![mention_of(text, "黄蓉", 0, Some("huangrong"))],
        cue: Some(span_of(text, "道", 0)),
        mode: None,
        monologue: false,
    }];
    let roster = [
        CharacterEntity::new("huangrong", "黄蓉").with_aliases(["蓉儿"]),
        CharacterEntity::new("luzhuangzhu", "陆庄主"),
    ];
    Trace {
        label: "one entry per character",
        corpus: Corpus::new([zh_novel("smile", text)], roster, quotations)
            .expect("fixture is consistent"),
        expect: vec![Expect {
            record_id: "q1",
            speaker: Some("陆庄主"),
            addressees: &["黄蓉"],
        }],
    }
}

/// Group scene: the gold annotation lists every member present, and the
/// baseline's single pick stays inside that group.
pub fn group_scene_members() -> Trace {
    let text = "朱聪、郭靖围在厅中。黄蓉道：“大家请坐。”朱聪先坐了。";
    let quotations = [QuotationRecord {
        id: "q1".into(),
        novel_id: "parlor".into(),
        quote: span_of(text, "大家请坐。", 0),
        speaker: mention_of(text, "黄蓉", 0, Some("huangrong")),
        addressees: vec![
            mention_of(text, "朱聪", 0, Some("zhucong")),
            mention_of(text, "郭靖", 0, Some("guojing")),
        ],
        cue: Some(span_of(text, "道", 0)),
        mode: None,
        monologue: false,
    }];
    let roster = [
        CharacterEntity::new("zhucong", "朱聪"),
        CharacterEntity::new("guojing", "郭靖"),
        CharacterEntity::new("huangrong", "黄蓉"),
    ];
    Trace {
        label: "group scene members",
        corpus: Corpus::new([zh_novel("parlor", text)], roster, quotations)
            .expect("fixture is consistent"),
        expect: vec![Expect {
            record_id: "q1",
            speaker: Some("黄蓉"),
            addressees: &["朱聪"],
        }],
    }
}

/// No-addressee situations: an anonymous line with no rostered character
/// in reach predicts nothing, and self-talk collapses to the speaker only
/// because the scene has a single candidate.
pub fn silent_scenes_get_no_addressee() -> Trace {
    let anonymous = "有人低声道：“天黑了。”";
    let monologue = "黄蓉心道：“糟了。”";
    let quotations = [
        QuotationRecord {
            id: "q1".into(),
            novel_id: "dusk".into(),
            quote: span_of(anonymous, "天黑了。", 0),
            speaker: mention_of(anonymous, "有人", 0, None),
            addressees: vec![],
            cue: Some(span_of(anonymous, "道", 0)),
            mode: None,
            monologue: false,
        },
        QuotationRecord {
            id: "q2".into(),
            novel_id: "alone".into(),
            quote: span_of(monologue, "糟了。", 0),
            speaker: mention_of(monologue, "黄蓉", 0, Some("huangrong")),
            addressees: vec![],
            cue: Some(span_of(monologue, "道", 0)),
            mode: None,
            monologue: true,
        },
    ];
    let roster = [CharacterEntity::new("huangrong", "黄蓉")];
    Trace {
        label: "silent scenes get no addressee",
        corpus: Corpus::new(
            [zh_novel("dusk", anonymous), zh_novel("alone", monologue)],
            roster,
            quotations,
        )
        .expect("fixture is consistent"),
        expect: vec![
            Expect {
                record_id: "q1",
                speaker: None,
                addressees: &[],
            },
            Expect {
                record_id: "q2",
                speaker: Some("黄蓉"),
                addressees: &["黄蓉"],
            },
        ],
    }
}
