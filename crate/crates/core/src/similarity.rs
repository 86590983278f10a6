//! Sentence similarity for noise ranking: a deterministic TF-IDF cosine
//! built-in, and a remote embedding provider speaking the `/v1/embeddings`
//! protocol for setups with a served embedding model.

use std::collections::BTreeMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Environment variable holding the API key for remote providers.
pub const API_KEY_ENV: &str = "LLMOWLR_API_KEY";

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("embedding endpoint error after {attempts} attempt(s): {message}")]
    Remote { attempts: u32, message: String },
    #[error("embedding response malformed: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemoteEmbeddingConfig {
    pub endpoint: String,
    pub model: String,
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
}

fn default_batch_size() -> usize {
    64
}

/// Similarity backend choice.
#[derive(Debug, Clone)]
pub enum SimilarityProvider {
    /// Deterministic offline default.
    TfIdfCosine,
    /// Reproduces the sentence-embedding setup against a served model.
    RemoteEmbedding(RemoteEmbeddingConfig),
}

impl SimilarityProvider {
    /// Scores `query` against every sentence; results align positionally.
    pub fn scores(&self, query: &str, sentences: &[String]) -> Result<Vec<f64>, ProviderError> {
        match self {
            SimilarityProvider::TfIdfCosine => {
                let model = TfIdfModel::fit(sentences.iter().map(String::as_str));
                let query_vec = model.vector(query);
                Ok(sentences.iter().map(|s| cosine(&query_vec, &model.vector(s))).collect())
            }
            SimilarityProvider::RemoteEmbedding(cfg) => remote_scores(cfg, query, sentences),
        }
    }
}

fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect()
}

/// TF-IDF over lowercase word tokens with a fixed, sorted vocabulary.
pub struct TfIdfModel {
    idf: BTreeMap<String, f64>,
    documents: f64,
}

impl TfIdfModel {
    pub fn fit<'a>(corpus: impl Iterator<Item = &'a str>) -> Self {
        let mut doc_freq: BTreeMap<String, u64> = BTreeMap::new();
        let mut documents = 0u64;
        for doc in corpus {
            documents += 1;
            let mut seen = std::collections::BTreeSet::new();
            for token in tokenize(doc) {
                if seen.insert(token.clone()) {
                    *doc_freq.entry(token).or_insert(0) += 1;
                }
            }
        }
        let documents = documents.max(1) as f64;
        let idf = doc_freq
            .into_iter()
            .map(|(token, df)| (token, (documents / (df as f64 + 1.0)).ln() + 1.0))
            .collect();
        TfIdfModel { idf, documents }
    }

    /// Sparse TF-IDF vector keyed by vocabulary token. Unknown tokens get the
    /// maximal IDF so query-only terms still separate candidates.
    pub fn vector(&self, text: &str) -> BTreeMap<String, f64> {
        let tokens = tokenize(text);
        if tokens.is_empty() {
            return BTreeMap::new();
        }
        let total = tokens.len() as f64;
        let mut counts: BTreeMap<String, f64> = BTreeMap::new();
        for token in tokens {
            *counts.entry(token).or_insert(0.0) += 1.0;
        }
        let default_idf = (self.documents / 1.0).ln() + 1.0;
        counts
            .into_iter()
            .map(|(token, count)| {
                let idf = self.idf.get(&token).copied().unwrap_or(default_idf);
                (token, (count / total) * idf)
            })
            .collect()
    }
}

pub fn cosine(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> f64 {
    let dot: f64 = a
        .iter()
        .filter_map(|(token, &va)| b.get(token).map(|&vb| va * vb))
        .sum();
    let norm_a: f64 = a.values().map(|v| v * v).sum::<f64>().sqrt();
    let norm_b: f64 = b.values().map(|v| v * v).sum::<f64>().sqrt();
    if norm_a == 0.0 || norm_b == 0.0 {
        0.0
    } else {
        dot / (norm_a * norm_b)
    }
}

#[derive(Serialize)]
struct EmbeddingRequest<'a> {
    model: &'a str,
    input: &'a [String],
}

#[derive(Deserialize)]
struct EmbeddingResponse {
    data: Vec<EmbeddingDatum>,
}

#[derive(Deserialize)]
struct EmbeddingDatum {
    embedding: Vec<f64>,
}

fn remote_scores(
    cfg: &RemoteEmbeddingConfig,
    query: &str,
    sentences: &[String],
) -> Result<Vec<f64>, ProviderError> {
    let mut inputs: Vec<String> = Vec::with_capacity(sentences.len() + 1);
    inputs.push(query.to_string());
    inputs.extend(sentences.iter().cloned());

    let mut embeddings: Vec<Vec<f64>> = Vec::with_capacity(inputs.len());
    for chunk in inputs.chunks(cfg.batch_size.max(1)) {
        embeddings.extend(embed_batch(cfg, chunk)?);
    }
    if embeddings.len() != inputs.len() {
        return Err(ProviderError::Malformed(format!(
            "expected {} embeddings, got {}",
            inputs.len(),
            embeddings.len()
        )));
    }
    let query_vec = &embeddings[0];
    Ok(embeddings[1..].iter().map(|v| dense_cosine(query_vec, v)).collect())
}

fn dense_cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

fn embed_batch(cfg: &RemoteEmbeddingConfig, batch: &[String]) -> Result<Vec<Vec<f64>>, ProviderError> {
    let url = format!("{}/v1/embeddings", cfg.endpoint.trim_end_matches('/'));
    let client = reqwest::blocking::Client::builder()
        .timeout(Duration::from_secs(120))
        .build()
        .map_err(|e| ProviderError::Remote { attempts: 0, message: e.to_string() })?;
    let key = std::env::var(API_KEY_ENV).unwrap_or_default();

    let max_attempts = 5;
    let mut last_error = String::new();
    for attempt in 1..=max_attempts {
        let request = client
            .post(&url)
            .bearer_auth(&key)
            .json(&EmbeddingRequest { model: &cfg.model, input: batch });
        match request.send() {
            Ok(response) => {
                let status = response.status();
                if status.is_success() {
                    let parsed: EmbeddingResponse = response
                        .json()
                        .map_err(|e| ProviderError::Malformed(e.to_string()))?;
                    return Ok(parsed.data.into_iter().map(|d| d.embedding).collect());
                }
                last_error = format!("HTTP {status}");
                if !(status.as_u16() == 429 || status.is_server_error()) {
                    return Err(ProviderError::Remote { attempts: attempt, message: last_error });
                }
            }
            Err(e) => last_error = e.to_string(),
        }
        std::thread::sleep(Duration::from_millis(100 * (1 << attempt.min(6))));
    }
    Err(ProviderError::Remote { attempts: max_attempts, message: last_error })
}
