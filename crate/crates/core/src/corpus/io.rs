//! Corpus persistence: the canonical JSONL layout plus import adapters for
//! the two raw annotation layouts this crate consumes.
//!
//! A corpus directory holds up to three files:
//!
//! * `novels.jsonl`: `{novel_id, title, author, lang?, text}` per line.
//! * `roster.jsonl` (optional): `{id, canonical_name, aliases?, stance?}`.
//! * a quotations file whose name and schema depend on the [`Dialect`].
//!
//! Every import re-derives or re-checks span surfaces against the novel
//! text, so a corpus that loads successfully is offset-consistent.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::text::{CharText, Lang};

use super::{CharacterEntity, Corpus, CorpusError, Mention, Novel, QuotationRecord, Span};

/// On-disk layout of the quotations file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dialect {
    /// `quotations.jsonl`, records in this crate's own schema.
    Canonical,
    /// `riqua_quotes.jsonl`: English-style annotations with `text`/`begin`/
    /// `end` span fields, optional speaker, no character ids.
    Riqua,
    /// `jyq_quotes.jsonl`: Chinese-style annotations with `[start, end]`
    /// span arrays and roster character ids; surfaces are derived from the
    /// novel text.
    Jyq,
}

impl Dialect {
    fn quotes_file(self) -> &'static str {
        match self {
            Dialect::Canonical => "quotations.jsonl",
            Dialect::Riqua => "riqua_quotes.jsonl",
            Dialect::Jyq => "jyq_quotes.jsonl",
        }
    }

    fn default_lang(self) -> Lang {
        match self {
            Dialect::Riqua => Lang::En,
            Dialect::Canonical | Dialect::Jyq => Lang::Zh,
        }
    }
}

/// Filtering applied while loading.
#[derive(Debug, Clone, Copy, Default)]
pub struct ImportOptions {
    /// Strip cue spans from every record.
    pub drop_cues: bool,
    /// Keep imported records that lack any addressee annotation instead of
    /// dropping them. Such records are dialogue with an empty addressee
    /// list, which the guideline validator reports. Canonical corpora are
    /// never filtered by this option.
    pub keep_missing_addressees: bool,
}

#[derive(Serialize, Deserialize)]
struct NovelRecord {
    novel_id: String,
    title: String,
    author: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lang: Option<Lang>,
    text: String,
}

#[derive(Deserialize)]
struct RiquaSpan {
    text: String,
    begin: usize,
    end: usize,
}

#[derive(Deserialize)]
struct RiquaRecord {
    id: String,
    novel: String,
    quote: RiquaSpan,
    #[serde(default)]
    speaker: Option<RiquaSpan>,
    #[serde(default)]
    addressee: Vec<RiquaSpan>,
    #[serde(default)]
    cue: Option<RiquaSpan>,
}

#[derive(Deserialize)]
struct JyqMention {
    span: [usize; 2],
    #[serde(default, rename = "char")]
    character: Option<String>,
}

#[derive(Deserialize)]
struct JyqRecord {
    qid: String,
    book: String,
    quote: [usize; 2],
    speaker: JyqMention,
    #[serde(default)]
    addressees: Vec<JyqMention>,
    #[serde(default)]
    cue: Option<[usize; 2]>,
    #[serde(default)]
    mode: Option<[usize; 2]>,
    #[serde(default)]
    monologue: bool,
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CorpusError> {
    let file = fs::File::open(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| CorpusError::Parse {
            path: path.display().to_string(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(record);
    }
    Ok(out)
}

fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<(), CorpusError> {
    let as_io = |source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut file = fs::File::create(path).map_err(as_io)?;
    for record in records {
        let line = serde_json::to_string(record).expect("corpus records serialize to JSON");
        writeln!(file, "{line}").map_err(as_io)?;
    }
    Ok(())
}

/// Load a corpus directory, converting dialect records to the canonical
/// model and verifying every span against the novel text.
pub fn load_corpus(
    dir: &Path,
    dialect: Dialect,
    options: &ImportOptions,
) -> Result<Corpus, CorpusError> {
    let novel_records: Vec<NovelRecord> = read_jsonl(&dir.join("novels.jsonl"))?;
    let novels: Vec<Novel> = novel_records
        .into_iter()
        .map(|r| Novel {
            id: r.novel_id,
            title: r.title,
            author: r.author,
            lang: r.lang.unwrap_or_else(|| dialect.default_lang()),
            text: CharText::new(r.text),
        })
        .collect();

    let roster_path = dir.join("roster.jsonl");
    let roster: Vec<CharacterEntity> = if roster_path.exists() {
        read_jsonl(&roster_path)?
    } else {
        Vec::new()
    };

    let quotes_path = dir.join(dialect.quotes_file());
    let mut quotations = match dialect {
        Dialect::Canonical => read_jsonl::<QuotationRecord>(&quotes_path)?,
        Dialect::Riqua => {
            let raw: Vec<RiquaRecord> = read_jsonl(&quotes_path)?;
            raw.into_iter()
                .filter_map(|r| convert_riqua(r, options))
                .collect()
        }
        Dialect::Jyq => {
            let raw: Vec<JyqRecord> = read_jsonl(&quotes_path)?;
            raw.into_iter()
                .map(|r| convert_jyq(r, &novels))
                .collect::<Result<_, _>>()?
        }
    };

    if options.drop_cues {
        for q in &mut quotations {
            q.cue = None;
        }
    }

    Corpus::new(novels, roster, quotations)
}

fn convert_riqua(record: RiquaRecord, options: &ImportOptions) -> Option<QuotationRecord> {
    // Records without a speaker tag cannot supply a training pair and are
    // dropped, mirroring how the raw data is filtered before use.
    let speaker = record.speaker?;
    if record.addressee.is_empty() && !options.keep_missing_addressees {
        return None;
    }
    let to_span = |s: &RiquaSpan| Span::new(s.text.clone(), s.begin, s.end);
    Some(QuotationRecord {
        id: record.id,
        novel_id: record.novel,
        quote: to_span(&record.quote),
        speaker: Mention::new(speaker.text, speaker.begin, speaker.end),
        addressees: record
            .addressee
            .iter()
            .map(|a| Mention::new(a.text.clone(), a.begin, a.end))
            .collect(),
        cue: record.cue.as_ref().map(to_span),
        mode: None,
        monologue: false,
    })
}

fn convert_jyq(record: JyqRecord, novels: &[Novel]) -> Result<QuotationRecord, CorpusError> {
    let novel = novels
        .iter()
        .find(|n| n.id == record.book)
        .ok_or_else(|| CorpusError::UnknownNovel {
            record_id: record.qid.clone(),
            novel_id: record.book.clone(),
        })?;
    let slice = |range: [usize; 2]| -> Result<Span, CorpusError> {
        let surface =
            novel
                .text
                .slice(range[0]..range[1])
                .ok_or_else(|| CorpusError::Integrity {
                    record_id: record.qid.clone(),
                    message: format!(
                        "span {}..{} out of bounds for novel '{}'",
                        range[0], range[1], novel.id
                    ),
                })?;
        Ok(Span::new(surface, range[0], range[1]))
    };
    let mention = |m: &JyqMention| -> Result<Mention, CorpusError> {
        let span = slice(m.span)?;
        let mut out = Mention::new(span.surface, span.start, span.end);
        if let Some(c) = &m.character {
            out = out.with_character(c.clone());
        }
        Ok(out)
    };

    let quote = slice(record.quote)?;
    let speaker = mention(&record.speaker)?;
    let addressees = record
        .addressees
        .iter()
        .map(mention)
        .collect::<Result<_, _>>()?;
    let cue = record.cue.map(&slice).transpose()?;
    let mode = record.mode.map(&slice).transpose()?;
    Ok(QuotationRecord {
        id: record.qid,
        novel_id: record.book,
        quote,
        speaker,
        addressees,
        cue,
        mode,
        monologue: record.monologue,
    })
}

/// Write a corpus to `dir` in the canonical layout. The directory is
/// created if needed; existing files are overwritten.
pub fn save_canonical(corpus: &Corpus, dir: &Path) -> Result<(), CorpusError> {
    fs::create_dir_all(dir).map_err(|source| CorpusError::Io {
        path: dir.display().to_string(),
        source,
    })?;

    let novels: Vec<NovelRecord> = corpus
        .novels()
        .map(|n| NovelRecord {
            novel_id: n.id.clone(),
            title: n.title.clone(),
            author: n.author.clone(),
            lang: Some(n.lang),
            text: n.text.as_str().to_string(),
        })
        .collect();
    write_jsonl(&dir.join("novels.jsonl"), &novels)?;
    write_jsonl(&dir.join("roster.jsonl"), corpus.roster())?;
    write_jsonl(&dir.join("quotations.jsonl"), corpus.quotations())
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::two_party_zh;
    use super::*;

    #[test]
    fn canonical_round_trip_preserves_corpus() {
        let corpus = two_party_zh();
        let dir = tempfile::tempdir().unwrap();
        save_canonical(&corpus, dir.path()).unwrap();
        let loaded =
            load_corpus(dir.path(), Dialect::Canonical, &ImportOptions::default()).unwrap();
        assert_eq!(loaded, corpus);
    }

    #[test]
    fn malformed_line_names_file_and_line() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(
            dir.path().join("novels.jsonl"),
            "{\"novel_id\":\"n\",\"title\":\"t\",\"author\":\"a\",\"text\":\"x\"}\nnot json\n",
        )
        .unwrap();
        fs::write(dir.path().join("quotations.jsonl"), "").unwrap();
        let err =
            load_corpus(dir.path(), Dialect::Canonical, &ImportOptions::default()).unwrap_err();
        match err {
            CorpusError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn riqua_import_drops_untagged_records() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(
            dir.path().join("novels.jsonl"),
            concat!(
                "{\"novel_id\":\"steppe\",\"title\":\"The Steppe\",\"author\":\"Chekhov\",",
                "\"text\":\"\\\"Stop!\\\" he said to Kuzmitchov. \\\"Well.\\\"\"}\n",
            ),
        )
        .unwrap();
        // One full record, one with no speaker, one with no addressee.
        fs::write(
            dir.path().join("riqua_quotes.jsonl"),
            concat!(
                "{\"id\":\"r1\",\"novel\":\"steppe\",",
                "\"quote\":{\"text\":\"\\\"Stop!\\\"\",\"begin\":0,\"end\":7},",
                "\"speaker\":{\"text\":\"he\",\"begin\":8,\"end\":10},",
                "\"addressee\":[{\"text\":\"Kuzmitchov\",\"begin\":19,\"end\":29}],",
                "\"cue\":{\"text\":\"said\",\"begin\":11,\"end\":15}}\n",
                "{\"id\":\"r2\",\"novel\":\"steppe\",",
                "\"quote\":{\"text\":\"\\\"Well.\\\"\",\"begin\":31,\"end\":38},",
                "\"addressee\":[{\"text\":\"he\",\"begin\":8,\"end\":10}]}\n",
                "{\"id\":\"r3\",\"novel\":\"steppe\",",
                "\"quote\":{\"text\":\"\\\"Well.\\\"\",\"begin\":31,\"end\":38},",
                "\"speaker\":{\"text\":\"he\",\"begin\":8,\"end\":10}}\n",
            ),
        )
        .unwrap();

        let corpus = load_corpus(dir.path(), Dialect::Riqua, &ImportOptions::default()).unwrap();
        assert_eq!(corpus.len(), 1);
        assert_eq!(corpus.quotations()[0].id, "r1");
        assert_eq!(corpus.novel("steppe").unwrap().lang, Lang::En);

        let keep = ImportOptions {
            keep_missing_addressees: true,
            ..Default::default()
        };
        let corpus = load_corpus(dir.path(), Dialect::Riqua, &keep).unwrap();
        assert_eq!(corpus.len(), 2, "speakerless record stays dropped");

        let drop_cues = ImportOptions {
            drop_cues: true,
            ..Default::default()
        };
        let corpus = load_corpus(dir.path(), Dialect::Riqua, &drop_cues).unwrap();
        assert!(corpus.quotations()[0].cue.is_none());
    }

    #[test]
    fn jyq_import_derives_surfaces_from_text() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(
            dir.path().join("novels.jsonl"),
            "{\"novel_id\":\"n1\",\"title\":\"书\",\"author\":\"某\",\"text\":\"黄蓉道：“你好。”\"}\n",
        )
        .unwrap();
        fs::write(
            dir.path().join("roster.jsonl"),
            "{\"id\":\"huangrong\",\"canonical_name\":\"黄蓉\"}\n",
        )
        .unwrap();
        fs::write(
            dir.path().join("jyq_quotes.jsonl"),
            concat!(
                "{\"qid\":\"j1\",\"book\":\"n1\",\"quote\":[5,8],",
                "\"speaker\":{\"span\":[0,2],\"char\":\"huangrong\"},",
                "\"addressees\":[],\"cue\":[2,3],\"monologue\":true}\n",
            ),
        )
        .unwrap();

        let corpus = load_corpus(dir.path(), Dialect::Jyq, &ImportOptions::default()).unwrap();
        let q = &corpus.quotations()[0];
        assert_eq!(q.quote.surface, "你好。");
        assert_eq!(q.speaker.surface, "黄蓉");
        assert_eq!(q.speaker.character_id.as_deref(), Some("huangrong"));
        assert_eq!(q.cue.as_ref().unwrap().surface, "道");
        assert!(q.monologue);
        assert_eq!(corpus.novel("n1").unwrap().lang, Lang::Zh);
    }

    #[test]
    fn offset_surface_mismatch_fails_on_load() {
        let dir = tempfile::tempdir().unwrap();
        let corpus = two_party_zh();
        save_canonical(&corpus, dir.path()).unwrap();
        // Corrupt one surface in the saved quotations file.
        let path = dir.path().join("quotations.jsonl");
        let contents = fs::read_to_string(&path).unwrap();
        fs::write(&path, contents.replace("有客到。", "有客來。")).unwrap();
        let err =
            load_corpus(dir.path(), Dialect::Canonical, &ImportOptions::default()).unwrap_err();
        assert!(matches!(err, CorpusError::Integrity { .. }), "{err}");
    }
}
