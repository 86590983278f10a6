//! Optional TOML configuration file mirroring the build and prompt settings.
//! Command-line flags override file values.

use serde::{Deserialize, Serialize};

use owlproofs_core::dataset::BuildConfig;
use owlproofs_core::runner::PromptConfig;
use owlproofs_core::similarity::{RemoteEmbeddingConfig, SimilarityProvider};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct FileConfig {
    pub build: BuildConfig,
    pub prompt: PromptConfig,
    pub similarity: SimilarityChoice,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "provider")]
pub enum SimilarityChoice {
    #[default]
    Tfidf,
    Remote {
        endpoint: String,
        model: String,
        batch_size: Option<usize>,
    },
}

impl SimilarityChoice {
    pub fn provider(&self) -> SimilarityProvider {
        match self {
            SimilarityChoice::Tfidf => SimilarityProvider::TfIdfCosine,
            SimilarityChoice::Remote { endpoint, model, batch_size } => {
                SimilarityProvider::RemoteEmbedding(RemoteEmbeddingConfig {
                    endpoint: endpoint.clone(),
                    model: model.clone(),
                    batch_size: batch_size.unwrap_or(64),
                })
            }
        }
    }
}

pub fn load(path: Option<&std::path::Path>) -> Result<FileConfig, String> {
    match path {
        None => Ok(FileConfig::default()),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
        }
    }
}
