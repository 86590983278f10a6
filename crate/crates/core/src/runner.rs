//! Prompt assembly and batch execution against a chat-completions endpoint.
//!
//! Prompts are instantiated from templates stored verbatim in the repo
//! (`src/templates/`). Responses are persisted raw as [`RunRecord`]s — no
//! scoring happens here. Built-in responders (`gold`, `empty`, `corrupt`)
//! substitute for the network so the whole pipeline runs offline.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::io::sample::{EvalSample, SampleMode};
use crate::similarity::API_KEY_ENV;
use crate::verbalize::Lexicon;

pub const STANDARD_TEMPLATE: &str = include_str!("templates/standard.txt");
pub const INCOMPLETE_TEMPLATE: &str = include_str!("templates/incomplete.txt");
pub const RULES_BLOCK: &str = include_str!("templates/rules.txt");
pub const EXAMPLE_SIMP: &str = include_str!("templates/example_simp.txt");
pub const EXAMPLE_DETAIL: &str = include_str!("templates/example_detail.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExampleMode {
    Simp,
    Detail,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Standard,
    Incomplete,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptConfig {
    pub include_rules: bool,
    pub example_mode: ExampleMode,
    pub task: Task,
    /// Defaults to 5000; natural-language samples default to 10000.
    pub max_tokens: Option<u32>,
    pub temperature: f64,
}

impl Default for PromptConfig {
    fn default() -> Self {
        PromptConfig {
            include_rules: false,
            example_mode: ExampleMode::None,
            task: Task::Standard,
            max_tokens: None,
            temperature: 0.0,
        }
    }
}

impl PromptConfig {
    pub fn effective_max_tokens(&self, mode: SampleMode) -> u32 {
        self.max_tokens.unwrap_or(match mode {
            SampleMode::NaturalLanguage => 10_000,
            _ => 5_000,
        })
    }

    /// Stable identity string used to match records on resume.
    pub fn fingerprint(&self) -> String {
        format!(
            "task={:?};rules={};example={:?};max_tokens={:?};temperature={}",
            self.task, self.include_rules, self.example_mode, self.max_tokens, self.temperature
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("sample mode {mode} is incompatible with task {task:?}")]
pub struct IncompatibleMode {
    pub mode: SampleMode,
    pub task: Task,
}

fn uses_nl(sample: &EvalSample, task: Task) -> bool {
    task == Task::Incomplete || sample.mode == SampleMode::NaturalLanguage
}

fn axiom_lines(sample: &EvalSample, task: Task) -> String {
    let nl = uses_nl(sample, task);
    let mut out = String::new();
    for axiom in &sample.axioms {
        let text = if nl { &axiom.nl } else { &axiom.dl };
        out.push_str(&format!("({}) {}\n", axiom.idx, text));
    }
    if sample.mode == SampleMode::Naming {
        out.push_str(&naming_lines(sample));
    }
    out.pop();
    out
}

/// `NAME: <identifier> = <label>` lines, one per signature symbol.
fn naming_lines(sample: &EvalSample) -> String {
    let lexicon = Lexicon::new();
    let mut concepts = BTreeSet::new();
    let mut roles = BTreeSet::new();
    for axiom in &sample.axioms {
        if let Ok(parsed) = crate::io::dl::parse_dl_axiom(&axiom.dl) {
            parsed.signature_into(&mut concepts, &mut roles);
        }
    }
    let mut out = String::new();
    for name in concepts.iter().chain(roles.iter()) {
        let label = lexicon.label(name).unwrap_or_else(|_| name.clone());
        out.push_str(&format!("NAME: {name} = {label}\n"));
    }
    out
}

fn necessity_note(sample: &EvalSample) -> String {
    if sample.mode == SampleMode::JustOnly {
        return "Note that all of the given axioms are necessary for the derivation.".into();
    }
    let (_, n) = sample.ratio;
    if n == 1 {
        "Note that only half of the given axioms are necessary for the derivation.".into()
    } else {
        format!(
            "Note that only about 1 in {} of the given axioms are necessary for the derivation.",
            n + 1
        )
    }
}

/// Instantiates the task template for one sample. Byte-deterministic in
/// `(sample, cfg)`.
pub fn build_prompt(sample: &EvalSample, cfg: &PromptConfig) -> Result<String, IncompatibleMode> {
    let compatible = match cfg.task {
        Task::Standard => !sample.mode.is_incomplete(),
        Task::Incomplete => sample.mode.is_incomplete(),
    };
    if !compatible {
        return Err(IncompatibleMode { mode: sample.mode, task: cfg.task });
    }

    let conclusion = if uses_nl(sample, cfg.task) {
        sample.conclusion.nl.clone()
    } else {
        sample.conclusion.dl.clone()
    };

    let prompt = match cfg.task {
        Task::Standard => {
            let rules = if cfg.include_rules { RULES_BLOCK.trim_end() } else { "" };
            let example = match cfg.example_mode {
                ExampleMode::Simp => EXAMPLE_SIMP.trim_end(),
                ExampleMode::Detail => EXAMPLE_DETAIL.trim_end(),
                ExampleMode::None => "",
            };
            STANDARD_TEMPLATE
                .replace("(Inference rules here if applied)", rules)
                .replace("(An example here if applied)", example)
                .replace("{axiom lines}", &axiom_lines(sample, cfg.task))
                .replace("{conclusion}", &conclusion)
                .replace("{necessity note}", &necessity_note(sample))
        }
        Task::Incomplete => INCOMPLETE_TEMPLATE
            .replace("{axiom lines}", &axiom_lines(sample, cfg.task))
            .replace("{conclusion}", &conclusion),
    };
    // Collapse the blank slots left by omitted rule/example blocks.
    let mut cleaned = prompt.replace("\n\n\n\n", "\n\n").replace("\n\n\n", "\n\n");
    if !cleaned.ends_with('\n') {
        cleaned.push('\n');
    }
    Ok(cleaned)
}

#[derive(Debug, Error)]
pub enum ChatError {
    #[error("authentication rejected by endpoint")]
    Auth,
    #[error("endpoint error: HTTP {0}")]
    Endpoint(u16),
    #[error("request timed out")]
    Timeout,
    #[error("transport error: {0}")]
    Transport(String),
    #[error("malformed completion response: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TokenUsage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

#[derive(Debug, Clone)]
pub struct ChatOutcome {
    pub content: String,
    pub finish_reason: String,
    pub usage: TokenUsage,
    pub attempts: u32,
}

/// Blocking chat-completions client with retry on transient failures.
#[derive(Debug, Clone)]
pub struct ChatClient {
    pub endpoint: String,
    pub timeout: Duration,
    /// Base backoff delay; doubles per retry. Tests shrink this.
    pub backoff_ms: u64,
}

impl ChatClient {
    pub fn new(endpoint: impl Into<String>) -> Self {
        ChatClient { endpoint: endpoint.into(), timeout: Duration::from_secs(300), backoff_ms: 250 }
    }
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: Vec<ChatMessage<'a>>,
    temperature: f64,
    max_tokens: u32,
}

#[derive(Serialize)]
struct ChatMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
    #[serde(default)]
    usage: Option<UsageBody>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatChoiceMessage,
    #[serde(default)]
    finish_reason: Option<String>,
}

#[derive(Deserialize)]
struct ChatChoiceMessage {
    content: String,
}

#[derive(Deserialize)]
struct UsageBody {
    #[serde(default)]
    prompt_tokens: u64,
    #[serde(default)]
    completion_tokens: u64,
}

/// Sends one prompt; retries HTTP 429/5xx with exponential backoff, at most
/// five attempts. Length-truncated responses are returned as-is — they fail
/// the format check downstream, which is the intended signal.
pub fn chat(
    client: &ChatClient,
    model: &str,
    prompt: &str,
    cfg: &PromptConfig,
    max_tokens: u32,
) -> Result<ChatOutcome, ChatError> {
    let url = format!("{}/v1/chat/completions", client.endpoint.trim_end_matches('/'));
    let key = std::env::var(API_KEY_ENV).unwrap_or_default();
    let http = reqwest::blocking::Client::builder()
        .timeout(client.timeout)
        .build()
        .map_err(|e| ChatError::Transport(e.to_string()))?;

    let body = ChatRequest {
        model,
        messages: vec![ChatMessage { role: "user", content: prompt }],
        temperature: cfg.temperature,
        max_tokens,
    };

    let max_attempts = 5;
    let mut last_transient = ChatError::Endpoint(0);
    for attempt in 1..=max_attempts {
        let sent = http.post(&url).bearer_auth(&key).json(&body).send();
        match sent {
            Ok(response) => {
                let status = response.status().as_u16();
                match status {
                    200..=299 => {
                        let parsed: ChatResponse = response
                            .json()
                            .map_err(|e| ChatError::Malformed(e.to_string()))?;
                        let choice = parsed
                            .choices
                            .into_iter()
                            .next()
                            .ok_or_else(|| ChatError::Malformed("no choices".into()))?;
                        let usage = parsed
                            .usage
                            .map(|u| TokenUsage {
                                prompt_tokens: u.prompt_tokens,
                                completion_tokens: u.completion_tokens,
                            })
                            .unwrap_or_default();
                        return Ok(ChatOutcome {
                            content: choice.message.content,
                            finish_reason: choice.finish_reason.unwrap_or_else(|| "stop".into()),
                            usage,
                            attempts: attempt,
                        });
                    }
                    401 | 403 => return Err(ChatError::Auth),
                    429 | 500..=599 => last_transient = ChatError::Endpoint(status),
                    other => return Err(ChatError::Endpoint(other)),
                }
            }
            Err(e) if e.is_timeout() => return Err(ChatError::Timeout),
            Err(e) => last_transient = ChatError::Transport(e.to_string()),
        }
        if attempt < max_attempts {
            std::thread::sleep(Duration::from_millis(client.backoff_ms << (attempt - 1)));
        }
    }
    Err(last_transient)
}

/// Response source for a batch run.
pub enum Responder {
    Endpoint(ChatClient),
    /// Emits the stored gold answer; the offline pipeline self-test.
    Gold,
    /// Always returns an empty response.
    Empty,
    /// Returns prose that violates the response format.
    Corrupt,
}

/// The correct response for a sample, in the required format.
pub fn gold_response(sample: &EvalSample, task: Task) -> String {
    match task {
        Task::Incomplete => {
            let missing = sample.mode == SampleMode::IncompleteNegative;
            let useful: Vec<String> =
                sample.gold_justification.iter().map(u32::to_string).collect();
            let suspected = if missing {
                format!("{} axiom(s) from the justification are absent", sample.removed.len())
            } else {
                "NONE".to_string()
            };
            format!(
                "MISSING: {}\nAXIOMS_USEFUL: [{}]\nSUSPECTED_MISSING_PARTS: {}\n",
                if missing { "YES" } else { "NO" },
                useful.join(", "),
                suspected
            )
        }
        Task::Standard => {
            let used: Vec<String> = sample.gold_justification.iter().map(u32::to_string).collect();
            let mut out = format!("AXIOMS_USED: {}\n\nSIMPLIFY:\n", used.join(","));
            for idx in &sample.gold_justification {
                if let Some(axiom) = sample.axiom_by_idx(*idx) {
                    out.push_str(&format!("[{}] {} -> {}\n", idx, axiom.dl, axiom.dl));
                }
            }
            out.push_str("\nDERIVE:\n");
            out.push_str(&format!(
                "STEP1: [{}] |- {}\n",
                used.join(","),
                sample.conclusion.dl
            ));
            out.push_str("EXPLANATION: the listed axioms entail the conclusion directly\n");
            out
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub sample_id: String,
    pub model: String,
    pub config_fingerprint: String,
    pub timestamp: u64,
    pub response: String,
    pub finish_reason: String,
    pub usage: TokenUsage,
    pub attempts: u32,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RunManifest {
    pub model: String,
    pub config_fingerprint: String,
    pub requested: usize,
    pub skipped_existing: usize,
    pub completed: usize,
    pub failed: std::collections::BTreeMap<String, usize>,
}

fn now_epoch() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn read_run_records(text: &str) -> Vec<RunRecord> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .filter_map(|l| serde_json::from_str(l).ok())
        .collect()
}

fn respond(
    responder: &Responder,
    sample: &EvalSample,
    cfg: &PromptConfig,
    model: &str,
) -> Result<ChatOutcome, String> {
    let prompt = build_prompt(sample, cfg).map_err(|e| e.to_string())?;
    let synthetic = |content: String| ChatOutcome {
        content,
        finish_reason: "stop".into(),
        usage: TokenUsage::default(),
        attempts: 1,
    };
    match responder {
        Responder::Gold => Ok(synthetic(gold_response(sample, cfg.task))),
        Responder::Empty => Ok(synthetic(String::new())),
        Responder::Corrupt => Ok(synthetic(
            "I believe the conclusion is true because the axioms look related.".into(),
        )),
        Responder::Endpoint(client) => {
            let max_tokens = cfg.effective_max_tokens(sample.mode);
            chat(client, model, &prompt, cfg, max_tokens).map_err(|e| e.to_string())
        }
    }
}

/// Runs a batch with bounded parallel in-flight requests, appending one
/// record per sample to `out_path`. Samples already recorded for the same
/// `(model, config)` are skipped, so interrupted runs resume.
pub fn run_batch(
    samples: &[EvalSample],
    cfg: &PromptConfig,
    responder: &Responder,
    model: &str,
    out_path: &Path,
    parallelism: usize,
) -> std::io::Result<RunManifest> {
    let fingerprint = cfg.fingerprint();
    let existing: BTreeSet<String> = match std::fs::read_to_string(out_path) {
        Ok(text) => read_run_records(&text)
            .into_iter()
            .filter(|r| r.model == model && r.config_fingerprint == fingerprint && r.error.is_none())
            .map(|r| r.sample_id)
            .collect(),
        Err(_) => BTreeSet::new(),
    };

    let todo: Vec<&EvalSample> =
        samples.iter().filter(|s| !existing.contains(&s.id)).collect();
    let mut manifest = RunManifest {
        model: model.to_string(),
        config_fingerprint: fingerprint.clone(),
        requested: samples.len(),
        skipped_existing: samples.len() - todo.len(),
        ..RunManifest::default()
    };

    let results: Vec<Mutex<Option<RunRecord>>> =
        todo.iter().map(|_| Mutex::new(None)).collect();
    let cursor = AtomicUsize::new(0);
    let workers = parallelism.max(1).min(todo.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let at = cursor.fetch_add(1, Ordering::SeqCst);
                if at >= todo.len() {
                    break;
                }
                let sample = todo[at];
                let record = match respond(responder, sample, cfg, model) {
                    Ok(outcome) => RunRecord {
                        sample_id: sample.id.clone(),
                        model: model.to_string(),
                        config_fingerprint: fingerprint.clone(),
                        timestamp: now_epoch(),
                        response: outcome.content,
                        finish_reason: outcome.finish_reason,
                        usage: outcome.usage,
                        attempts: outcome.attempts,
                        error: None,
                    },
                    Err(message) => RunRecord {
                        sample_id: sample.id.clone(),
                        model: model.to_string(),
                        config_fingerprint: fingerprint.clone(),
                        timestamp: now_epoch(),
                        response: String::new(),
                        finish_reason: String::new(),
                        usage: TokenUsage::default(),
                        attempts: 0,
                        error: Some(message),
                    },
                };
                *results[at].lock().unwrap() = Some(record);
            });
        }
    });

    // Single writer, input order.
    if let Some(parent) = out_path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut file = std::fs::OpenOptions::new().create(true).append(true).open(out_path)?;
    for slot in results {
        let record = slot.into_inner().unwrap().expect("worker filled every slot");
        match &record.error {
            None => manifest.completed += 1,
            Some(message) => {
                let reason = message.split(':').next().unwrap_or("error").to_string();
                *manifest.failed.entry(reason).or_insert(0) += 1;
            }
        }
        writeln!(file, "{}", serde_json::to_string(&record)?)?;
    }
    Ok(manifest)
}
