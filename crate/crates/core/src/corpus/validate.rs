//! Annotation-guideline checks. These catch annotations that are
//! structurally well-formed but break the labeling rules: addressees must
//! be pickable from characters visible in the context window, appear once,
//! sit outside the quotation unless the whole mention set is internal, and
//! be present on every dialogue record.

use std::collections::BTreeMap;
use std::fmt;

use crate::text::sentence_context;
use crate::text::default_splitter;

use super::segment::detect_candidate_indices;
use super::{Corpus, QuotationRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleId {
    /// Addressee's character has no alias occurrence in the context window.
    AddresseeNotCandidate,
    /// The same character is listed as addressee more than once.
    DuplicateAddressee,
    /// Addressee mentions both inside and outside the quotation span.
    QuoteInternalAddressee,
    /// Dialogue record with an empty addressee list.
    MissingAddressee,
}

impl RuleId {
    pub fn as_str(&self) -> &'static str {
        match self {
            RuleId::AddresseeNotCandidate => "addressee-not-candidate",
            RuleId::DuplicateAddressee => "duplicate-addressee",
            RuleId::QuoteInternalAddressee => "quote-internal-addressee",
            RuleId::MissingAddressee => "missing-addressee",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub record_id: String,
    pub rule: RuleId,
    pub message: String,
}

/// Check every record against the annotation guidelines. Returns all
/// violations in corpus order; an empty result means the corpus is clean.
///
/// Candidate visibility (rule `addressee-not-candidate`) is judged inside
/// the default five-sentence window on each side of the quotation, and only
/// for addressees grounded to a roster character; surface-only mentions
/// cannot be matched against the roster and are skipped.
pub fn validate_guidelines(corpus: &Corpus) -> Vec<Violation> {
    let mut violations = Vec::new();
    for record in corpus.quotations() {
        check_candidates(corpus, record, &mut violations);
        check_duplicates(record, &mut violations);
        check_quote_internal(record, &mut violations);
        check_missing(record, &mut violations);
    }
    violations
}

fn check_candidates(corpus: &Corpus, record: &QuotationRecord, out: &mut Vec<Violation>) {
    if record.addressees.iter().all(|a| a.character_id.is_none()) {
        return;
    }
    let novel = corpus.novel(&record.novel_id).expect("corpus is validated");
    let splitter = default_splitter(novel.lang);
    let ctx = sentence_context(&splitter, &novel.text, &record.quote.char_range(), 5, 5)
        .expect("corpus spans are in bounds");
    let start = ctx.pre.first().map_or(record.quote.start, |s| s.start);
    let end = ctx.post.last().map_or(record.quote.end, |s| s.end);
    let passage = novel.text.slice(start..end).expect("window within document");
    let visible = detect_candidate_indices(corpus.roster(), passage, novel.lang);

    for addressee in &record.addressees {
        let Some(cid) = &addressee.character_id else {
            continue;
        };
        let index = corpus
            .roster()
            .iter()
            .position(|c| &c.id == cid)
            .expect("corpus is validated");
        if !visible.contains(&index) {
            out.push(Violation {
                record_id: record.id.clone(),
                rule: RuleId::AddresseeNotCandidate,
                message: format!(
                    "addressee '{cid}' has no alias occurrence in the context window"
                ),
            });
        }
    }
}

fn check_duplicates(record: &QuotationRecord, out: &mut Vec<Violation>) {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for a in &record.addressees {
        let key = a
            .character_id
            .clone()
            .unwrap_or_else(|| format!("surface:{}", a.surface));
        *counts.entry(key).or_insert(0) += 1;
    }
    for (key, n) in counts {
        if n > 1 {
            out.push(Violation {
                record_id: record.id.clone(),
                rule: RuleId::DuplicateAddressee,
                message: format!("addressee '{key}' listed {n} times"),
            });
        }
    }
}

fn check_quote_internal(record: &QuotationRecord, out: &mut Vec<Violation>) {
    let q = record.quote.char_range();
    let inside = |s: usize, e: usize| s >= q.start && e <= q.end;
    let n_inside = record
        .addressees
        .iter()
        .filter(|a| inside(a.start, a.end))
        .count();
    if n_inside > 0 && n_inside < record.addressees.len() {
        out.push(Violation {
            record_id: record.id.clone(),
            rule: RuleId::QuoteInternalAddressee,
            message: format!(
                "{n_inside} of {} addressee mentions fall inside the quotation",
                record.addressees.len()
            ),
        });
    }
}

fn check_missing(record: &QuotationRecord, out: &mut Vec<Violation>) {
    if record.addressees.is_empty() && !record.monologue {
        out.push(Violation {
            record_id: record.id.clone(),
            rule: RuleId::MissingAddressee,
            message: "dialogue record has no addressee".into(),
        });
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::two_party_zh;
    use super::*;
    use crate::corpus::{CharacterEntity, Mention, Novel, Span};
    use crate::text::{CharText, Lang};

    #[test]
    fn clean_corpus_has_no_violations() {
        assert!(validate_guidelines(&two_party_zh()).is_empty());
    }

    fn rules_for(corpus: &Corpus, record_id: &str) -> Vec<RuleId> {
        validate_guidelines(corpus)
            .into_iter()
            .filter(|v| v.record_id == record_id)
            .map(|v| v.rule)
            .collect()
    }

    #[test]
    fn flags_addressee_missing_from_window() {
        // The addressee mention is a pronoun grounded to a character whose
        // name never appears in the passage.
        let text = "他说：“走。”大家都走了。";
        // 他0 说1 ：2 “3 走4 。5 ”6 大7 家8 都9 走10 了11 。12
        let novel = Novel {
            id: "n".into(),
            title: "t".into(),
            author: "a".into(),
            lang: Lang::Zh,
            text: CharText::new(text),
        };
        let roster = vec![
            CharacterEntity::new("ouyangfeng", "欧阳锋"),
            CharacterEntity::new("guojing", "郭靖"),
        ];
        let record = QuotationRecord {
            id: "q".into(),
            novel_id: "n".into(),
            quote: Span::new("走。", 4, 6),
            speaker: Mention::new("他", 0, 1).with_character("guojing"),
            addressees: vec![Mention::new("大家", 7, 9).with_character("ouyangfeng")],
            cue: Some(Span::new("说", 1, 2)),
            mode: None,
            monologue: false,
        };
        let corpus = Corpus::new([novel], roster, [record]).unwrap();
        assert_eq!(rules_for(&corpus, "q"), vec![RuleId::AddresseeNotCandidate]);
    }

    #[test]
    fn flags_duplicate_addressees() {
        let mut corpus = two_party_zh();
        let mut q = corpus.quotations()[0].clone();
        q.id = "dup".into();
        let again = q.addressees[0].clone();
        q.addressees.push(again);
        let novels: Vec<Novel> = corpus.novels().cloned().collect();
        let roster = corpus.roster().to_vec();
        let mut quotations = corpus.quotations().to_vec();
        quotations.push(q);
        corpus = Corpus::new(novels, roster, quotations).unwrap();
        assert_eq!(rules_for(&corpus, "dup"), vec![RuleId::DuplicateAddressee]);
    }

    #[test]
    fn flags_mixed_quote_internal_addressees() {
        let text = "甲对乙道:“丙丁，你们听乙的。”";
        // 甲0 对1 乙2 道3 :4 “5 丙6 丁7 ，8 你9 们10 听11 乙12 的13 。14 ”15
        let novel = Novel {
            id: "n".into(),
            title: "t".into(),
            author: "a".into(),
            lang: Lang::Zh,
            text: CharText::new(text),
        };
        let record = QuotationRecord {
            id: "q".into(),
            novel_id: "n".into(),
            quote: Span::new("丙丁，你们听乙的。", 6, 15),
            speaker: Mention::new("甲", 0, 1),
            addressees: vec![
                Mention::new("乙", 2, 3),
                Mention::new("丙", 6, 7),
                Mention::new("丁", 7, 8),
            ],
            cue: Some(Span::new("道", 3, 4)),
            mode: None,
            monologue: false,
        };
        let corpus = Corpus::new([novel], [], [record]).unwrap();
        assert_eq!(
            rules_for(&corpus, "q"),
            vec![RuleId::QuoteInternalAddressee]
        );
    }

    #[test]
    fn flags_missing_addressee_on_dialogue_only() {
        let text = "甲道：“谁？”甲想：“罢了。”";
        // 甲0 道1 ：2 “3 谁4 ？5 ”6 甲7 想8 ：9 “10 罢11 了12 。13 ”14
        let novel = Novel {
            id: "n".into(),
            title: "t".into(),
            author: "a".into(),
            lang: Lang::Zh,
            text: CharText::new(text),
        };
        let dialogue = QuotationRecord {
            id: "d".into(),
            novel_id: "n".into(),
            quote: Span::new("谁？", 4, 6),
            speaker: Mention::new("甲", 0, 1),
            addressees: vec![],
            cue: Some(Span::new("道", 1, 2)),
            mode: None,
            monologue: false,
        };
        let monologue = QuotationRecord {
            id: "m".into(),
            novel_id: "n".into(),
            quote: Span::new("罢了。", 11, 14),
            speaker: Mention::new("甲", 7, 8),
            addressees: vec![],
            cue: Some(Span::new("想", 8, 9)),
            mode: None,
            monologue: true,
        };
        let corpus = Corpus::new([novel], [], [dialogue, monologue]).unwrap();
        assert_eq!(rules_for(&corpus, "d"), vec![RuleId::MissingAddressee]);
        assert!(rules_for(&corpus, "m").is_empty());
    }
}
