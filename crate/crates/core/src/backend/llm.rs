//! Chat-completion client and the backend built on it.
//!
//! The client keeps experiments reproducible on flaky, metered APIs:
//! deterministic exponential backoff (no jitter) on retryable failures, a
//! bounded worker pool for batches, and a content-addressed response cache
//! so a finished run can be replayed offline or resumed after a crash
//! without repeating paid calls.

use std::fs;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::Segment;
use crate::prompt::{parse_answer, render_few_shot, render_zero_shot};

use super::{Backend, BackendError, BackendErrorKind, Mode, Prediction, TemplateSet};

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("http status {status}: {body}")]
    Http { status: u16, body: String },

    #[error("transport failure: {0}")]
    Transport(String),

    #[error("api key environment variable '{env}' is not set")]
    MissingApiKey { env: String },

    #[error("response cache {path}: {source}")]
    Cache {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed completion response: {0}")]
    MalformedResponse(String),
}

impl LlmError {
    /// Rate limits, server errors, and transport failures are worth
    /// retrying; anything else is a caller bug or permanent condition.
    fn is_retryable(&self) -> bool {
        match self {
            LlmError::Http { status, .. } => *status == 429 || (500..=599).contains(status),
            LlmError::Transport(_) => true,
            _ => false,
        }
    }
}

/// Connection and behavior settings for [`LlmClient`]. All fields have
/// serviceable defaults except `endpoint`, which must point at a
/// chat-completion API.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct LlmClientConfig {
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    /// Additional attempts after the first failure.
    pub max_retries: u32,
    /// First retry delay; attempt `k` waits `backoff_base_ms * 2^k`.
    pub backoff_base_ms: u64,
    pub timeout_ms: u64,
    /// Concurrent in-flight requests for batch identification.
    pub parallelism: usize,
    /// Environment variable holding the bearer token, if the endpoint
    /// needs one.
    pub api_key_env: Option<String>,
    /// Directory for the response cache; `None` disables caching.
    pub cache_dir: Option<PathBuf>,
}

impl Default for LlmClientConfig {
    fn default() -> Self {
        LlmClientConfig {
            endpoint: String::new(),
            model: "gpt-3.5-turbo".into(),
            temperature: 0.0,
            max_retries: 3,
            backoff_base_ms: 500,
            timeout_ms: 30_000,
            parallelism: 4,
            api_key_env: None,
            cache_dir: None,
        }
    }
}

/// The cache file name for a (model, prompt) pair: SHA-256 over both,
/// NUL-separated so concatenation cannot collide.
pub fn cache_key(model: &str, prompt: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(model.as_bytes());
    hasher.update([0u8]);
    hasher.update(prompt.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    model: String,
    prompt: String,
    response: String,
}

#[derive(Deserialize)]
struct ChatMessage {
    content: String,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatMessage,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

pub struct LlmClient {
    config: LlmClientConfig,
    agent: ureq::Agent,
}

impl LlmClient {
    pub fn new(config: LlmClientConfig) -> Self {
        let agent_config = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_millis(config.timeout_ms)))
            .http_status_as_error(false)
            .build();
        LlmClient {
            config,
            agent: ureq::Agent::new_with_config(agent_config),
        }
    }

    pub fn config(&self) -> &LlmClientConfig {
        &self.config
    }

    fn cache_path(&self, key: &str) -> Option<PathBuf> {
        self.config
            .cache_dir
            .as_ref()
            .map(|dir| dir.join(format!("{key}.json")))
    }

    fn cache_lookup(&self, key: &str) -> Result<Option<String>, LlmError> {
        let Some(path) = self.cache_path(key) else {
            return Ok(None);
        };
        if !path.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(&path).map_err(|source| LlmError::Cache {
            path: path.display().to_string(),
            source,
        })?;
        let entry: CacheEntry = serde_json::from_str(&text).map_err(|e| LlmError::Cache {
            path: path.display().to_string(),
            source: std::io::Error::new(std::io::ErrorKind::InvalidData, e),
        })?;
        Ok(Some(entry.response))
    }

    fn cache_store(&self, key: &str, prompt: &str, response: &str) -> Result<(), LlmError> {
        let Some(path) = self.cache_path(key) else {
            return Ok(());
        };
        let as_cache_err = |source: std::io::Error| LlmError::Cache {
            path: path.display().to_string(),
            source,
        };
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(as_cache_err)?;
        }
        let entry = CacheEntry {
            model: self.config.model.clone(),
            prompt: prompt.to_string(),
            response: response.to_string(),
        };
        let text = serde_json::to_string(&entry).expect("cache entry serializes");
        fs::write(&path, text).map_err(as_cache_err)
    }

    fn request_once(&self, prompt: &str) -> Result<String, LlmError> {
        let payload = serde_json::json!({
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.config.temperature,
        });

        let mut request = self.agent.post(&self.config.endpoint);
        if let Some(env) = &self.config.api_key_env {
            let key = std::env::var(env)
                .map_err(|_| LlmError::MissingApiKey { env: env.clone() })?;
            request = request.header("authorization", &format!("Bearer {key}"));
        }

        let mut response = request
            .send_json(&payload)
            .map_err(|e| LlmError::Transport(e.to_string()))?;

        let status = response.status().as_u16();
        let body = response
            .body_mut()
            .read_to_string()
            .map_err(|e| LlmError::Transport(e.to_string()))?;
        if !(200..300).contains(&status) {
            return Err(LlmError::Http { status, body });
        }

        let parsed: ChatResponse = serde_json::from_str(&body)
            .map_err(|_| LlmError::MalformedResponse(body.clone()))?;
        let content = parsed
            .choices
            .into_iter()
            .next()
            .map(|c| c.message.content)
            .ok_or(LlmError::MalformedResponse(body))?;
        Ok(content)
    }

    /// Complete one prompt, consulting the cache first. A cache hit makes
    /// no network request at all; a fresh completion is stored before it is
    /// returned.
    pub fn complete(&self, prompt: &str) -> Result<String, LlmError> {
        let key = cache_key(&self.config.model, prompt);
        if let Some(response) = self.cache_lookup(&key)? {
            return Ok(response);
        }

        let mut attempt = 0u32;
        let response = loop {
            match self.request_once(prompt) {
                Ok(response) => break response,
                Err(e) if e.is_retryable() && attempt < self.config.max_retries => {
                    let factor = 1u64.checked_shl(attempt).unwrap_or(u64::MAX);
                    let delay = self.config.backoff_base_ms.saturating_mul(factor);
                    thread::sleep(Duration::from_millis(delay));
                    attempt += 1;
                }
                Err(e) => return Err(e),
            }
        };

        self.cache_store(&key, prompt, &response)?;
        Ok(response)
    }
}

/// Identification through a chat-completion API.
pub struct LlmBackend {
    client: LlmClient,
    templates: TemplateSet,
    display_name: String,
}

impl LlmBackend {
    pub fn new(config: LlmClientConfig) -> Self {
        let display_name = format!("llm:{}", config.model);
        LlmBackend {
            client: LlmClient::new(config),
            templates: TemplateSet::default(),
            display_name,
        }
    }

    pub fn with_templates(mut self, templates: TemplateSet) -> Self {
        self.templates = templates;
        self
    }

    pub fn client(&self) -> &LlmClient {
        &self.client
    }

    fn prompt_for(&self, segment: &Segment, mode: &Mode) -> Result<String, BackendError> {
        let template = self.templates.get(segment.lang);
        let context = segment.context_text();
        let quotation = &segment.quotation.quote.surface;
        let rendered = match mode {
            Mode::ZeroShot => render_zero_shot(template, &context, quotation),
            Mode::FewShot(exemplars) => render_few_shot(template, exemplars, &context, quotation),
        };
        rendered.map_err(|e| BackendError::new(segment.id(), BackendErrorKind::Prompt(e)))
    }
}

impl Backend for LlmBackend {
    fn name(&self) -> &str {
        &self.display_name
    }

    fn identify(&self, segment: &Segment, mode: &Mode) -> Result<Prediction, BackendError> {
        let prompt = self.prompt_for(segment, mode)?;
        let raw = self
            .client
            .complete(&prompt)
            .map_err(|e| BackendError::new(segment.id(), BackendErrorKind::Transport(e)))?;
        let parsed = parse_answer(&raw, segment.lang)
            .map_err(|e| BackendError::new(segment.id(), BackendErrorKind::Answer(e)))?;
        Ok(Prediction {
            segment_id: segment.id().to_string(),
            speaker: parsed.speaker,
            addressees: parsed.addressees,
        })
    }

    /// Run segments through a fixed-size worker pool. Results keep the
    /// input order, and one segment's failure never aborts the others.
    fn identify_batch(
        &self,
        segments: &[Segment],
        mode: &Mode,
    ) -> Vec<Result<Prediction, BackendError>> {
        let workers = self.client.config.parallelism.max(1).min(segments.len().max(1));
        if workers <= 1 {
            return segments.iter().map(|s| self.identify(s, mode)).collect();
        }

        let next = AtomicUsize::new(0);
        let results: Mutex<Vec<Option<Result<Prediction, BackendError>>>> =
            Mutex::new((0..segments.len()).map(|_| None).collect());
        thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= segments.len() {
                        break;
                    }
                    let result = self.identify(&segments[i], mode);
                    results.lock().expect("result slot lock")[i] = Some(result);
                });
            }
        });
        results
            .into_inner()
            .expect("threads joined")
            .into_iter()
            .map(|r| r.expect("every index visited"))
            .collect()
    }
}
