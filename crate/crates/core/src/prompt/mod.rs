//! Prompt construction for chat-style identification models, and parsing of
//! their free-text answers back into structured predictions.
//!
//! Templates are plain strings with `{name}` placeholders. Rendering walks
//! the template once and substitutes from a fixed map, so text inserted for
//! one placeholder is never re-scanned for others.

mod parse;

pub use parse::{parse_answer, AnswerParseError, ParsedAnswer};

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::Lang;

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("template field '{field}' must contain the {placeholder} placeholder")]
    MissingPlaceholder {
        field: &'static str,
        placeholder: &'static str,
    },

    #[error("no value for placeholder {{{placeholder}}}")]
    UnresolvedPlaceholder { placeholder: String },

    #[error("failed to read template {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("template is not valid TOML: {0}")]
    Toml(#[from] toml::de::Error),
}

/// A worked example included in a few-shot prompt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exemplar {
    pub context: String,
    pub quotation: String,
    pub speaker: String,
    pub addressees: Vec<String>,
}

/// Prompt template for one language.
///
/// `question_pattern` must use `{context}` and `{quotation}`;
/// `exemplar_pattern` additionally uses `{speaker}` and `{addressee}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptTemplate {
    pub lang: Lang,
    pub instruction: String,
    pub question_pattern: String,
    pub exemplar_pattern: String,
    pub answer_format: String,
}

impl PromptTemplate {
    pub fn default_zh() -> Self {
        PromptTemplate {
            lang: Lang::Zh,
            instruction: "阅读下面的小说段落，找出引语的说话人和听话人。\
                          只能从段落中出现的人物里选择。"
                .into(),
            question_pattern: "段落：{context}\n引语：{quotation}\n\
                               这句引语的说话人和听话人分别是谁？"
                .into(),
            exemplar_pattern: "段落：{context}\n引语：{quotation}\n\
                               说话人：{speaker}；听话人：{addressee}"
                .into(),
            answer_format: "请按如下格式回答：说话人：某人；听话人：某人。\
                            多个听话人用、分隔。"
                .into(),
        }
    }

    pub fn default_en() -> Self {
        PromptTemplate {
            lang: Lang::En,
            instruction: "Read the passage from a novel and identify who speaks \
                          the quotation and to whom it is addressed. Choose only \
                          characters that appear in the passage."
                .into(),
            question_pattern: "Passage: {context}\nQuotation: {quotation}\n\
                               Who speaks this quotation, and to whom is it addressed?"
                .into(),
            exemplar_pattern: "Passage: {context}\nQuotation: {quotation}\n\
                               Speaker: \"{speaker}\"; Addressee: \"{addressee}\""
                .into(),
            answer_format: "Answer in the form: Speaker: \"name\"; \
                            Addressee: \"name, name\"."
                .into(),
        }
    }

    pub fn for_lang(lang: Lang) -> Self {
        match lang {
            Lang::Zh => Self::default_zh(),
            Lang::En => Self::default_en(),
        }
    }

    /// Parse a template from TOML and check its placeholders.
    pub fn from_toml_str(s: &str) -> Result<Self, PromptError> {
        let template: PromptTemplate = toml::from_str(s)?;
        template.check_placeholders()?;
        Ok(template)
    }

    pub fn load(path: &Path) -> Result<Self, PromptError> {
        let s = fs::read_to_string(path).map_err(|source| PromptError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&s)
    }

    fn check_placeholders(&self) -> Result<(), PromptError> {
        let require = |field: &'static str,
                       text: &str,
                       placeholder: &'static str|
         -> Result<(), PromptError> {
            let token = format!("{{{placeholder}}}");
            if text.contains(&token) {
                Ok(())
            } else {
                Err(PromptError::MissingPlaceholder { field, placeholder })
            }
        };
        require("question_pattern", &self.question_pattern, "context")?;
        require("question_pattern", &self.question_pattern, "quotation")?;
        require("exemplar_pattern", &self.exemplar_pattern, "context")?;
        require("exemplar_pattern", &self.exemplar_pattern, "quotation")?;
        require("exemplar_pattern", &self.exemplar_pattern, "speaker")?;
        require("exemplar_pattern", &self.exemplar_pattern, "addressee")?;
        Ok(())
    }

    fn addressee_joiner(&self) -> &'static str {
        match self.lang {
            Lang::Zh => "、",
            Lang::En => ", ",
        }
    }
}

/// Substitute `{name}` placeholders in `pattern` from `values`. A `{` that
/// does not open a well-formed placeholder is literal text. Placeholders
/// absent from `values` are an error.
fn fill(pattern: &str, values: &[(&str, &str)]) -> Result<String, PromptError> {
    let mut out = String::with_capacity(pattern.len());
    let mut rest = pattern;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let tail = &rest[open + 1..];
        let close = tail.find('}');
        let name = close.map(|c| &tail[..c]);
        match name {
            Some(name)
                if !name.is_empty()
                    && name.chars().all(|c| c.is_ascii_lowercase() || c == '_') =>
            {
                let value = values
                    .iter()
                    .find(|(k, _)| *k == name)
                    .map(|(_, v)| *v)
                    .ok_or_else(|| PromptError::UnresolvedPlaceholder {
                        placeholder: name.to_string(),
                    })?;
                out.push_str(value);
                rest = &tail[close.unwrap() + 1..];
            }
            _ => {
                out.push('{');
                rest = tail;
            }
        }
    }
    out.push_str(rest);
    Ok(out)
}

/// Render a prompt with no worked examples.
pub fn render_zero_shot(
    template: &PromptTemplate,
    context: &str,
    quotation: &str,
) -> Result<String, PromptError> {
    let question = fill(
        &template.question_pattern,
        &[("context", context), ("quotation", quotation)],
    )?;
    Ok(format!(
        "{}\n\n{}\n{}",
        template.instruction, question, template.answer_format
    ))
}

/// Render a prompt that leads with worked examples.
pub fn render_few_shot(
    template: &PromptTemplate,
    exemplars: &[Exemplar],
    context: &str,
    quotation: &str,
) -> Result<String, PromptError> {
    let mut body = String::new();
    for exemplar in exemplars {
        let joined = exemplar.addressees.join(template.addressee_joiner());
        let filled = fill(
            &template.exemplar_pattern,
            &[
                ("context", &exemplar.context),
                ("quotation", &exemplar.quotation),
                ("speaker", &exemplar.speaker),
                ("addressee", &joined),
            ],
        )?;
        write!(body, "{filled}\n\n").expect("writing to String");
    }
    let question = fill(
        &template.question_pattern,
        &[("context", context), ("quotation", quotation)],
    )?;
    Ok(format!(
        "{}\n\n{}{}\n{}",
        template.instruction, body, question, template.answer_format
    ))
}

/// The canonical answer line a model is asked to produce.
pub fn format_answer(lang: Lang, speaker: &str, addressees: &[String]) -> String {
    match lang {
        Lang::Zh => format!("说话人：{speaker}；听话人：{}", addressees.join("、")),
        Lang::En => format!(
            "Speaker: \"{speaker}\"; Addressee: \"{}\"",
            addressees.join(", ")
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_shot_contains_context_and_quotation() {
        let t = PromptTemplate::default_zh();
        let p = render_zero_shot(&t, "黄蓉道：“走。”", "走。").unwrap();
        assert!(p.contains("黄蓉道：“走。”"));
        assert!(p.contains("引语：走。"));
        assert!(p.starts_with(&t.instruction));
        assert!(p.ends_with(&t.answer_format));
    }

    #[test]
    fn few_shot_renders_each_exemplar_with_answer() {
        let t = PromptTemplate::default_en();
        let exemplars = vec![Exemplar {
            context: "\"Go,\" said Tom to Ann and Bob.".into(),
            quotation: "\"Go,\"".into(),
            speaker: "Tom".into(),
            addressees: vec!["Ann".into(), "Bob".into()],
        }];
        let p = render_few_shot(&t, &exemplars, "\"Why?\" asked Ann.", "\"Why?\"").unwrap();
        assert!(p.contains("Speaker: \"Tom\"; Addressee: \"Ann, Bob\""));
        assert!(p.contains("Quotation: \"Why?\""));
        let exemplar_pos = p.find("Tom").unwrap();
        let question_pos = p.find("Why?").unwrap();
        assert!(exemplar_pos < question_pos);
    }

    #[test]
    fn placeholder_values_are_not_rescanned() {
        let t = PromptTemplate::default_en();
        let p = render_zero_shot(&t, "context with {quotation} inside", "q").unwrap();
        assert!(p.contains("context with {quotation} inside"));
    }

    #[test]
    fn literal_braces_pass_through() {
        let filled = fill("a {not a placeholder} b {x}", &[("x", "X")]).unwrap();
        assert_eq!(filled, "a {not a placeholder} b X");
    }

    #[test]
    fn unknown_placeholder_is_an_error() {
        let err = fill("{context} {missing}", &[("context", "c")]).unwrap_err();
        assert!(matches!(
            err,
            PromptError::UnresolvedPlaceholder { placeholder } if placeholder == "missing"
        ));
    }

    #[test]
    fn toml_template_round_trip_and_validation() {
        let toml_src = r#"
lang = "en"
instruction = "Identify the participants."
question_pattern = "Text: {context}\nQuote: {quotation}\nWho to whom?"
exemplar_pattern = "Text: {context}\nQuote: {quotation}\nSpeaker: {speaker}\nAddressee: {addressee}"
answer_format = "Speaker: X; Addressee: Y"
"#;
        let t = PromptTemplate::from_toml_str(toml_src).unwrap();
        assert_eq!(t.lang, Lang::En);

        let bad = toml_src.replace("{quotation}", "");
        let err = PromptTemplate::from_toml_str(&bad).unwrap_err();
        assert!(matches!(
            err,
            PromptError::MissingPlaceholder {
                field: "question_pattern",
                placeholder: "quotation"
            }
        ));
    }

    #[test]
    fn format_answer_canonical_forms() {
        assert_eq!(
            format_answer(Lang::Zh, "黄蓉", &["陆庄主".into(), "郭靖".into()]),
            "说话人：黄蓉；听话人：陆庄主、郭靖"
        );
        assert_eq!(
            format_answer(Lang::En, "he", &["Kuzmitchov".into()]),
            "Speaker: \"he\"; Addressee: \"Kuzmitchov\""
        );
    }
}
