//! Boundary to locally hosted sequence-to-sequence models.
//!
//! Fine-tuning and inference for such models happen outside this crate; the
//! crate's side of the boundary is a text-in/text-out trait plus two
//! implementations: a replay table for recorded outputs (offline
//! evaluation, tests) and a subprocess bridge for live models. Generation
//! is treated as greedy and deterministic: one input, one output.

use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, BufReader, Write as _};
use std::path::Path;
use std::process::{Command, Stdio};
use std::thread;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Segment;
use crate::prompt::{format_answer, parse_answer, render_few_shot, render_zero_shot, PromptError};
use crate::text::{tokenize, Lang};

use super::{Backend, BackendError, BackendErrorKind, Mode, Prediction, TemplateSet};

#[derive(Debug, Error)]
pub enum Seq2SeqError {
    #[error("model artifact {path}: {source}")]
    Artifact {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("model artifact {path}:{line}: {message}")]
    ArtifactFormat {
        path: String,
        line: usize,
        message: String,
    },

    #[error("replay model '{model}' has no output recorded for input starting {preview:?}")]
    UnknownInput { model: String, preview: String },

    #[error("model command '{program}' failed: {message}")]
    Command { program: String, message: String },
}

/// A text-to-text generative model under greedy decoding.
pub trait Seq2SeqModel {
    fn name(&self) -> &str;

    fn generate(&self, input: &str) -> Result<String, Seq2SeqError>;
}

/// Generation output; `truncated` records whether the input was cut to the
/// length limit before the model saw it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Seq2SeqOutput {
    pub text: String,
    pub truncated: bool,
}

/// Generate with input truncation at `max_text_length` surface tokens
/// (0 disables the limit). Truncation cuts at a token boundary.
pub fn seq2seq_predict(
    model: &dyn Seq2SeqModel,
    input: &str,
    max_text_length: usize,
    lang: Lang,
) -> Result<Seq2SeqOutput, Seq2SeqError> {
    let (effective, truncated) = if max_text_length == 0 {
        (input.to_string(), false)
    } else {
        let tokens = tokenize(input, lang);
        if tokens.len() <= max_text_length {
            (input.to_string(), false)
        } else {
            let cut = tokens[max_text_length - 1].end;
            (input.chars().take(cut).collect(), true)
        }
    };
    let text = model.generate(&effective)?;
    Ok(Seq2SeqOutput { text, truncated })
}

fn preview(input: &str) -> String {
    let mut p: String = input.chars().take(60).collect();
    if input.chars().count() > 60 {
        p.push('…');
    }
    p
}

#[derive(Deserialize)]
struct ReplayRecord {
    #[serde(alias = "prompt")]
    input: String,
    #[serde(alias = "target")]
    output: String,
}

/// A model realized as a lookup table of recorded generations.
#[derive(Debug, Clone, Default)]
pub struct ReplayModel {
    name: String,
    outputs: HashMap<String, String>,
}

impl ReplayModel {
    pub fn from_pairs<I, A, B>(name: impl Into<String>, pairs: I) -> Self
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        ReplayModel {
            name: name.into(),
            outputs: pairs
                .into_iter()
                .map(|(a, b)| (a.into(), b.into()))
                .collect(),
        }
    }

    /// Load recorded generations from a JSONL file of
    /// `{"input": ..., "output": ...}` lines. Exported training pairs
    /// (`prompt`/`target`) are accepted under the same keys, so a pairs
    /// file can be replayed directly. The file name becomes the model
    /// name.
    pub fn from_jsonl(path: &Path) -> Result<Self, Seq2SeqError> {
        let file = fs::File::open(path).map_err(|source| Seq2SeqError::Artifact {
            path: path.display().to_string(),
            source,
        })?;
        let mut outputs = HashMap::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|source| Seq2SeqError::Artifact {
                path: path.display().to_string(),
                source,
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let record: ReplayRecord =
                serde_json::from_str(&line).map_err(|e| Seq2SeqError::ArtifactFormat {
                    path: path.display().to_string(),
                    line: i + 1,
                    message: e.to_string(),
                })?;
            outputs.insert(record.input, record.output);
        }
        Ok(ReplayModel {
            name: path
                .file_stem()
                .map_or_else(|| "replay".to_string(), |s| s.to_string_lossy().into_owned()),
            outputs,
        })
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }
}

impl Seq2SeqModel for ReplayModel {
    fn name(&self) -> &str {
        &self.name
    }

    fn generate(&self, input: &str) -> Result<String, Seq2SeqError> {
        self.outputs
            .get(input)
            .cloned()
            .ok_or_else(|| Seq2SeqError::UnknownInput {
                model: self.name.clone(),
                preview: preview(input),
            })
    }
}

/// A model reached through a subprocess: the input goes to stdin, the
/// generation comes back on stdout.
#[derive(Debug, Clone)]
pub struct CommandModel {
    name: String,
    program: String,
    args: Vec<String>,
}

impl CommandModel {
    pub fn new(program: impl Into<String>, args: Vec<String>) -> Self {
        let program = program.into();
        CommandModel {
            name: format!("command:{program}"),
            program,
            args,
        }
    }
}

impl Seq2SeqModel for CommandModel {
    fn name(&self) -> &str {
        &self.name
    }

    fn generate(&self, input: &str) -> Result<String, Seq2SeqError> {
        let command_err = |message: String| Seq2SeqError::Command {
            program: self.program.clone(),
            message,
        };

        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| command_err(e.to_string()))?;
        let mut stdin = child.stdin.take().expect("stdin was piped");
        // Writing from a separate thread keeps large inputs from
        // deadlocking against a child that writes before reading.
        let write_result = thread::scope(|scope| {
            let writer = scope.spawn(move || stdin.write_all(input.as_bytes()));
            let output = child.wait_with_output();
            (writer.join(), output)
        });
        let (write, output) = write_result;
        write
            .map_err(|_| command_err("stdin writer panicked".into()))?
            .map_err(|e| command_err(format!("writing stdin: {e}")))?;
        let output = output.map_err(|e| command_err(e.to_string()))?;
        if !output.status.success() {
            return Err(command_err(format!(
                "exit status {}: {}",
                output.status,
                String::from_utf8_lossy(&output.stderr).trim()
            )));
        }
        let text = String::from_utf8_lossy(&output.stdout);
        Ok(text.trim_end_matches('\n').to_string())
    }
}

/// Fine-tuning hyperparameters handed to the external training harness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub model_name: String,
    pub batch_size: usize,
    pub epochs: u32,
    pub learning_rate: f64,
    pub max_text_length: usize,
}

impl TrainConfig {
    /// Settings used for the English corpus with a T5 model.
    pub fn riqua_t5() -> Self {
        TrainConfig {
            model_name: "t5-base".into(),
            batch_size: 2,
            epochs: 32,
            learning_rate: 7e-5,
            max_text_length: 512,
        }
    }

    /// Settings used for the Chinese corpus with a PromptCLUE model.
    pub fn jyq_promptclue() -> Self {
        TrainConfig {
            model_name: "promptclue-base".into(),
            batch_size: 4,
            epochs: 12,
            learning_rate: 8e-5,
            max_text_length: 512,
        }
    }
}

/// One supervised example for fine-tuning: the rendered prompt and the
/// canonical answer line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingPair {
    pub prompt: String,
    pub target: String,
}

/// Render every segment into a training pair using the zero-shot prompt
/// and gold labels.
pub fn training_pairs(
    segments: &[Segment],
    templates: &TemplateSet,
) -> Result<Vec<TrainingPair>, PromptError> {
    segments
        .iter()
        .map(|segment| {
            let template = templates.get(segment.lang);
            let prompt = render_zero_shot(
                template,
                &segment.context_text(),
                &segment.quotation.quote.surface,
            )?;
            let addressees: Vec<String> = segment
                .gold_addressee_names()
                .into_iter()
                .map(str::to_string)
                .collect();
            let target = format_answer(segment.lang, segment.gold_speaker_name(), &addressees);
            Ok(TrainingPair { prompt, target })
        })
        .collect()
}

/// Write training pairs as JSONL.
pub fn write_training_jsonl(path: &Path, pairs: &[TrainingPair]) -> Result<(), Seq2SeqError> {
    let as_artifact_err = |source: std::io::Error| Seq2SeqError::Artifact {
        path: path.display().to_string(),
        source,
    };
    let mut file = fs::File::create(path).map_err(as_artifact_err)?;
    for pair in pairs {
        let line = serde_json::to_string(pair).expect("training pair serializes");
        writeln!(file, "{line}").map_err(as_artifact_err)?;
    }
    Ok(())
}

/// Identification through a [`Seq2SeqModel`].
pub struct Seq2SeqBackend<M> {
    model: M,
    templates: TemplateSet,
    max_text_length: usize,
    display_name: String,
}

impl<M: Seq2SeqModel> Seq2SeqBackend<M> {
    pub fn new(model: M) -> Self {
        let display_name = format!("seq2seq:{}", model.name());
        Seq2SeqBackend {
            model,
            templates: TemplateSet::default(),
            max_text_length: 512,
            display_name,
        }
    }

    pub fn with_templates(mut self, templates: TemplateSet) -> Self {
        self.templates = templates;
        self
    }

    pub fn with_max_text_length(mut self, max_text_length: usize) -> Self {
        self.max_text_length = max_text_length;
        self
    }
}

impl<M: Seq2SeqModel + Sync> Backend for Seq2SeqBackend<M> {
    fn name(&self) -> &str {
        &self.display_name
    }

    fn identify(&self, segment: &Segment, mode: &Mode) -> Result<Prediction, BackendError> {
        let template = self.templates.get(segment.lang);
        let context = segment.context_text();
        let quotation = &segment.quotation.quote.surface;
        let prompt = match mode {
            Mode::ZeroShot => render_zero_shot(template, &context, quotation),
            Mode::FewShot(exemplars) => render_few_shot(template, exemplars, &context, quotation),
        }
        .map_err(|e| BackendError::new(segment.id(), BackendErrorKind::Prompt(e)))?;

        let output = seq2seq_predict(&self.model, &prompt, self.max_text_length, segment.lang)
            .map_err(|e| BackendError::new(segment.id(), BackendErrorKind::Model(e)))?;
        let parsed = parse_answer(&output.text, segment.lang)
            .map_err(|e| BackendError::new(segment.id(), BackendErrorKind::Answer(e)))?;
        Ok(Prediction {
            segment_id: segment.id().to_string(),
            speaker: parsed.speaker,
            addressees: parsed.addressees,
        })
    }
}
