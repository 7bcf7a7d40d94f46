//! External service boundary: image embeddings and candidate selection.
//!
//! Both capabilities are traits so the pipeline can run fully offline
//! against deterministic stubs, or against HTTP endpoints with retry,
//! timeout, and a request-hash response cache.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use base64::Engine;
use scenesmith_core::Xoshiro256StarStar;
use serde::{Deserialize, Serialize};

use crate::config::ServiceConfig;
use crate::error::{Error, Result};
use crate::pipeline::sha256_hex;

pub trait EmbeddingProvider {
    fn dim(&self) -> usize;
    fn embed(&self, bytes: &[u8]) -> Result<Vec<f64>>;
}

/// One candidate offered to the selection oracle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Candidate {
    pub id: String,
    /// Embedding of the candidate's preview, used by the stub oracle.
    pub embedding: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionRequest {
    pub prompt: String,
    /// Embedding of the query crop.
    pub query: Vec<f64>,
    pub candidates: Vec<Candidate>,
}

pub trait SelectionOracle {
    /// Returns the id of the chosen candidate. The returned id is not
    /// guaranteed to be valid; callers must fall back when it is not.
    fn select(&self, req: &SelectionRequest) -> Result<String>;
}

// ---------------------------------------------------------------------------
// Deterministic stubs
// ---------------------------------------------------------------------------

/// Hash-seeded gaussian embeddings: identical bytes embed identically on
/// every platform, and distinct bytes land nearly orthogonal.
pub struct StubEmbedding {
    pub dim: usize,
    pub seed: u64,
}

impl EmbeddingProvider for StubEmbedding {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, bytes: &[u8]) -> Result<Vec<f64>> {
        let digest = sha256_hex(bytes);
        let mut word = [0u8; 8];
        for (i, b) in digest.as_bytes()[..16].chunks(2).enumerate() {
            word[i] = u8::from_str_radix(std::str::from_utf8(b).unwrap(), 16).unwrap();
        }
        let mut rng = Xoshiro256StarStar::seed_from_u64(u64::from_le_bytes(word) ^ self.seed);
        let mut v: Vec<f64> = (0..self.dim).map(|_| rng.next_gaussian()).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            for x in &mut v {
                *x /= norm;
            }
        }
        Ok(v)
    }
}

/// Picks the candidate whose embedding is closest to the query; ties break
/// toward the smaller id.
pub struct StubOracle;

impl SelectionOracle for StubOracle {
    fn select(&self, req: &SelectionRequest) -> Result<String> {
        req.candidates
            .iter()
            .map(|c| {
                let d: f64 = c
                    .embedding
                    .iter()
                    .zip(&req.query)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                (d, &c.id)
            })
            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then_with(|| a.1.cmp(b.1)))
            .map(|(_, id)| id.clone())
            .ok_or_else(|| Error::Protocol { endpoint: "oracle".into(), message: "called with no candidates".into() })
    }
}

// ---------------------------------------------------------------------------
// HTTP providers
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct EmbedRequest<'a> {
    image_b64: &'a str,
    dim: usize,
}

#[derive(Deserialize)]
struct EmbedResponse {
    embedding: Vec<f64>,
}

#[derive(Deserialize)]
struct SelectResponse {
    choice: String,
}

pub struct HttpClient {
    client: reqwest::blocking::Client,
    endpoint: String,
    attempts: u32,
    base_delay: Duration,
    cache: Option<PathBuf>,
    offline: bool,
}

impl HttpClient {
    pub fn new(endpoint: &str, cfg: &ServiceConfig, cache: Option<PathBuf>, offline: bool) -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs_f64(cfg.timeout_secs))
            .build()
            .map_err(|e| Error::Service {
                endpoint: endpoint.to_string(),
                attempts: 0,
                message: e.to_string(),
            })?;
        Ok(HttpClient {
            client,
            endpoint: endpoint.to_string(),
            attempts: cfg.retry_attempts.max(1),
            base_delay: Duration::from_secs_f64(cfg.retry_base_secs),
            cache,
            offline,
        })
    }

    fn cache_path(&self, body: &str) -> Option<PathBuf> {
        self.cache.as_ref().map(|dir| {
            dir.join(format!("{}.json", sha256_hex(format!("{}\n{}", self.endpoint, body).as_bytes())))
        })
    }

    /// POST with exponential-backoff retry and response caching keyed by the
    /// request hash. In offline mode only cache hits are served.
    pub fn post_json(&self, body: &str) -> Result<String> {
        let cache_path = self.cache_path(body);
        if let Some(p) = &cache_path {
            if let Ok(s) = std::fs::read_to_string(p) {
                return Ok(s);
            }
        }
        if self.offline {
            return Err(Error::Service {
                endpoint: self.endpoint.clone(),
                attempts: 0,
                message: "offline and response not cached".to_string(),
            });
        }
        let mut last = String::new();
        for attempt in 0..self.attempts {
            if attempt > 0 {
                std::thread::sleep(self.base_delay * (1 << (attempt - 1)));
            }
            match self
                .client
                .post(&self.endpoint)
                .header("content-type", "application/json")
                .body(body.to_string())
                .send()
            {
                Ok(resp) if resp.status().is_success() => {
                    let text = resp.text().map_err(|e| Error::Protocol { endpoint: self.endpoint.clone(), message: e.to_string() })?;
                    if let Some(p) = &cache_path {
                        let _ = std::fs::create_dir_all(p.parent().unwrap());
                        if let Ok(mut f) = std::fs::File::create(p) {
                            let _ = f.write_all(text.as_bytes());
                        }
                    }
                    return Ok(text);
                }
                Ok(resp) => last = format!("http status {}", resp.status()),
                Err(e) => last = e.to_string(),
            }
        }
        Err(Error::Service {
            endpoint: self.endpoint.clone(),
            attempts: self.attempts,
            message: last,
        })
    }
}

pub struct HttpEmbedding {
    pub client: HttpClient,
    pub dim: usize,
}

impl EmbeddingProvider for HttpEmbedding {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, bytes: &[u8]) -> Result<Vec<f64>> {
        let b64 = base64::engine::general_purpose::STANDARD.encode(bytes);
        let body = serde_json::to_string(&EmbedRequest {
            image_b64: &b64,
            dim: self.dim,
        })?;
        let text = self.client.post_json(&body)?;
        let resp: EmbedResponse = serde_json::from_str(&text).map_err(|e| Error::Protocol {
            endpoint: self.client.endpoint.clone(),
            message: e.to_string(),
        })?;
        if resp.embedding.len() != self.dim {
            return Err(Error::Protocol {
                endpoint: self.client.endpoint.clone(),
                message: format!(
                    "embedding has {} dims, expected {}",
                    resp.embedding.len(),
                    self.dim
                ),
            });
        }
        Ok(resp.embedding)
    }
}

pub struct HttpOracle {
    pub client: HttpClient,
}

impl SelectionOracle for HttpOracle {
    fn select(&self, req: &SelectionRequest) -> Result<String> {
        let body = serde_json::to_string(req)?;
        let text = self.client.post_json(&body)?;
        let resp: SelectResponse = serde_json::from_str(&text).map_err(|e| Error::Protocol {
            endpoint: self.client.endpoint.clone(),
            message: e.to_string(),
        })?;
        Ok(resp.choice)
    }
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

pub struct Services {
    pub embedder: Box<dyn EmbeddingProvider>,
    pub oracle: Box<dyn SelectionOracle>,
}

pub fn build_services(
    cfg: &ServiceConfig,
    embed_dim: usize,
    stub_seed: u64,
    cache: Option<&Path>,
    offline: bool,
) -> Result<Services> {
    let embedder: Box<dyn EmbeddingProvider> = if cfg.provider == "stub" {
        Box::new(StubEmbedding {
            dim: embed_dim,
            seed: stub_seed,
        })
    } else {
        Box::new(HttpEmbedding {
            client: HttpClient::new(&cfg.provider, cfg, cache.map(Path::to_path_buf), offline)?,
            dim: embed_dim,
        })
    };
    let oracle: Box<dyn SelectionOracle> = if cfg.oracle == "stub" {
        Box::new(StubOracle)
    } else {
        Box::new(HttpOracle {
            client: HttpClient::new(&cfg.oracle, cfg, cache.map(Path::to_path_buf), offline)?,
        })
    };
    Ok(Services { embedder, oracle })
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}
