//! Provider-agnostic chat client: HTTP chat-completion backends with image
//! attachments, a strict replay mode, and an oracle-backed mock for offline
//! testing. Responses are cached on disk under a content hash so completed
//! experiments can be resumed without spending.

use crate::bench::Task;
use crate::error::{Error, Result};
use crate::prompts::{Role, Segment};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

/// Flat per-image token charge used by the mock's accounting.
pub const MOCK_IMAGE_TOKENS: u64 = 256;
/// Characters per token in the mock's accounting.
pub const MOCK_CHARS_PER_TOKEN: u64 = 4;

/// Ground truth attached to a request so the oracle-mock backend can answer
/// without parsing prompt text. HTTP backends ignore it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSidecar {
    pub task: Task,
    pub truth_value: u64,
    pub truth_witness: Vec<u64>,
    pub node_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub temperature: f64,
    pub segments: Vec<Segment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSidecar>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatResponse {
    pub text: String,
    pub input_tokens: u64,
    pub output_tokens: u64,
    pub latency_ms: u64,
    /// Whether this response was served from the on-disk cache.
    #[serde(default)]
    pub cached: bool,
}

impl ChatResponse {
    pub fn total_tokens(&self) -> u64 {
        self.input_tokens + self.output_tokens
    }
}

/// Wire dialects for HTTP providers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProviderKind {
    #[serde(rename = "openai-chat")]
    OpenAiChat,
    #[serde(rename = "anthropic-messages")]
    AnthropicMessages,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HttpProviderConfig {
    pub endpoint: String,
    pub provider: ProviderKind,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    #[serde(default = "default_backoff_ms")]
    pub backoff_ms: u64,
    #[serde(default = "default_timeout_s")]
    pub timeout_s: u64,
}

fn default_retries() -> u32 {
    3
}
fn default_backoff_ms() -> u64 {
    500
}
fn default_timeout_s() -> u64 {
    120
}

/// Where answers come from.
#[derive(Debug, Clone, PartialEq)]
pub enum Backend {
    Http(HttpProviderConfig),
    /// Serves exclusively from the cache written by a previous run; a miss
    /// is a hard error.
    ReplayCache { fingerprint: String },
    /// Derives answers from the ground-truth sidecar, corrupting each
    /// witness element independently with the given probability.
    OracleMock { corruption_rate: f64, seed: u64 },
}

impl Backend {
    /// Identity mixed into cache keys so runs with different backends (or
    /// different mock settings) never collide.
    pub fn fingerprint(&self) -> String {
        match self {
            Backend::Http(cfg) => format!("http:{}", cfg.endpoint),
            Backend::ReplayCache { fingerprint } => fingerprint.clone(),
            Backend::OracleMock { corruption_rate, seed } => {
                format!("mock:{corruption_rate}:{seed}")
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Backend::Http(_) => "http",
            Backend::ReplayCache { .. } => "replay",
            Backend::OracleMock { .. } => "oracle-mock",
        }
    }
}

#[derive(Debug, Default)]
pub struct ClientStats {
    pub live_calls: AtomicU64,
    pub cache_hits: AtomicU64,
}

/// Chat client with disk-backed response caching. Safe to share across
/// worker threads; the cache directory is the only mutable state.
pub struct LlmClient {
    backend: Backend,
    cache_dir: PathBuf,
    stats: ClientStats,
    http: Option<reqwest::blocking::Client>,
}

impl LlmClient {
    pub fn new(backend: Backend, cache_dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(cache_dir).map_err(|e| Error::file(cache_dir, e))?;
        let http = match &backend {
            Backend::Http(cfg) => Some(
                reqwest::blocking::Client::builder()
                    .timeout(Duration::from_secs(cfg.timeout_s))
                    .build()
                    .map_err(|e| Error::Backend(format!("http client: {e}")))?,
            ),
            _ => None,
        };
        Ok(LlmClient {
            backend,
            cache_dir: cache_dir.to_path_buf(),
            stats: ClientStats::default(),
            http,
        })
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn live_calls(&self) -> u64 {
        self.stats.live_calls.load(Ordering::Relaxed)
    }

    pub fn cache_hits(&self) -> u64 {
        self.stats.cache_hits.load(Ordering::Relaxed)
    }

    /// Sends a request, serving from the cache when possible. HTTP sends
    /// retry transient failures with exponential backoff.
    pub fn send(&self, req: &ChatRequest) -> Result<ChatResponse> {
        let key = cache_key(&self.backend.fingerprint(), req);
        if let Some(mut hit) = self.cache_lookup(&key)? {
            self.stats.cache_hits.fetch_add(1, Ordering::Relaxed);
            hit.cached = true;
            return Ok(hit);
        }
        let response = match &self.backend {
            Backend::ReplayCache { .. } => {
                return Err(Error::ReplayMiss { digest: key });
            }
            Backend::OracleMock { corruption_rate, seed } => {
                self.stats.live_calls.fetch_add(1, Ordering::Relaxed);
                mock_response(req, *corruption_rate, *seed)?
            }
            Backend::Http(cfg) => {
                self.stats.live_calls.fetch_add(1, Ordering::Relaxed);
                self.http_send(cfg, req)?
            }
        };
        self.cache_store(&key, &response)?;
        Ok(response)
    }

    fn cache_path(&self, key: &str) -> PathBuf {
        self.cache_dir.join(&key[..2]).join(format!("{key}.json"))
    }

    fn cache_lookup(&self, key: &str) -> Result<Option<ChatResponse>> {
        let path = self.cache_path(key);
        if !path.exists() {
            return Ok(None);
        }
        let text = std::fs::read_to_string(&path).map_err(|e| Error::file(&path, e))?;
        let entry: CacheEntry = serde_json::from_str(&text)?;
        Ok(Some(entry.response))
    }

    fn cache_store(&self, key: &str, response: &ChatResponse) -> Result<()> {
        let path = self.cache_path(key);
        let dir = path.parent().expect("cache entries have a parent dir");
        std::fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;
        let entry = CacheEntry {
            digest: key.to_string(),
            response: ChatResponse {
                cached: false,
                ..response.clone()
            },
        };
        // Write-then-rename keeps concurrent workers from reading torn files.
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        std::fs::write(&tmp, serde_json::to_vec_pretty(&entry)?).map_err(|e| Error::file(&tmp, e))?;
        std::fs::rename(&tmp, &path).map_err(|e| Error::file(&path, e))?;
        Ok(())
    }

    fn http_send(&self, cfg: &HttpProviderConfig, req: &ChatRequest) -> Result<ChatResponse> {
        let api_key = std::env::var(&cfg.api_key_env).map_err(|_| {
            Error::AuthFailure(format!("environment variable {} is not set", cfg.api_key_env))
        })?;
        let body = match cfg.provider {
            ProviderKind::OpenAiChat => openai_body(req),
            ProviderKind::AnthropicMessages => anthropic_body(req),
        };
        let client = self.http.as_ref().expect("http backend has a client");
        let mut attempt = 0u32;
        loop {
            let started = Instant::now();
            let mut builder = client.post(&cfg.endpoint).json(&body);
            builder = match cfg.provider {
                ProviderKind::OpenAiChat => builder.bearer_auth(&api_key),
                ProviderKind::AnthropicMessages => builder
                    .header("x-api-key", &api_key)
                    .header("anthropic-version", "2023-06-01"),
            };
            let outcome = builder.send();
            let latency_ms = started.elapsed().as_millis() as u64;
            match outcome {
                Ok(resp) => {
                    let status = resp.status();
                    if status.as_u16() == 401 || status.as_u16() == 403 {
                        return Err(Error::AuthFailure(format!("provider returned {status}")));
                    }
                    if status.is_success() {
                        let json: serde_json::Value = resp
                            .json()
                            .map_err(|e| Error::Backend(format!("response body: {e}")))?;
                        return parse_provider_response(cfg.provider, &json, latency_ms);
                    }
                    let transient = status.as_u16() == 429 || status.is_server_error();
                    if !transient || attempt >= cfg.max_retries {
                        if status.as_u16() == 429 {
                            return Err(Error::RateLimitExhausted { retries: attempt });
                        }
                        return Err(Error::Backend(format!("provider returned {status}")));
                    }
                }
                Err(e) => {
                    if attempt >= cfg.max_retries {
                        return Err(Error::Backend(format!("request failed: {e}")));
                    }
                }
            }
            let backoff = cfg.backoff_ms.saturating_mul(1u64 << attempt.min(8));
            std::thread::sleep(Duration::from_millis(backoff));
            attempt += 1;
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    digest: String,
    response: ChatResponse,
}

/// Content hash over the canonical request plus the backend fingerprint.
pub fn cache_key(fingerprint: &str, req: &ChatRequest) -> String {
    let mut hasher = Sha256::new();
    hasher.update(fingerprint.as_bytes());
    hasher.update([0]);
    hasher.update(content_digest(req));
    hex(&hasher.finalize())
}

fn content_digest(req: &ChatRequest) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(req.model.as_bytes());
    hasher.update([0]);
    hasher.update(req.temperature.to_le_bytes());
    for segment in &req.segments {
        match segment {
            Segment::Text { role, text } => {
                hasher.update(match role {
                    Role::System => [1],
                    Role::User => [2],
                });
                hasher.update((text.len() as u64).to_le_bytes());
                hasher.update(text.as_bytes());
            }
            Segment::ImagePng { png } => {
                hasher.update([3]);
                hasher.update((png.len() as u64).to_le_bytes());
                hasher.update(png);
            }
        }
    }
    hasher.finalize().into()
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

// ---------------------------------------------------------------------------
// Oracle mock
// ---------------------------------------------------------------------------

/// Token accounting used by the mock: text length over four, plus a flat
/// charge per image.
pub fn mock_input_tokens(segments: &[Segment]) -> u64 {
    let mut chars = 0u64;
    let mut images = 0u64;
    for segment in segments {
        match segment {
            Segment::Text { text, .. } => chars += text.chars().count() as u64,
            Segment::ImagePng { .. } => images += 1,
        }
    }
    chars.div_ceil(MOCK_CHARS_PER_TOKEN) + images * MOCK_IMAGE_TOKENS
}

fn mock_response(req: &ChatRequest, corruption_rate: f64, seed: u64) -> Result<ChatResponse> {
    let oracle = req.oracle.as_ref().ok_or_else(|| {
        Error::Backend("oracle-mock requires a ground-truth sidecar on the request".into())
    })?;
    // Deterministic per (request content, seed).
    let digest = content_digest(req);
    let mut rng_seed = [0u8; 32];
    rng_seed.copy_from_slice(&digest);
    for (i, b) in seed.to_le_bytes().iter().enumerate() {
        rng_seed[i] ^= b;
    }
    let mut rng = ChaCha8Rng::from_seed(rng_seed);
    let mut witness = oracle.truth_witness.clone();
    if oracle.node_count > 1 {
        for item in &mut witness {
            if rng.gen::<f64>() < corruption_rate {
                // Hallucinate: swap in a different node id.
                let mut replacement = rng.gen_range(0..oracle.node_count as u64);
                while replacement == *item {
                    replacement = rng.gen_range(0..oracle.node_count as u64);
                }
                *item = replacement;
            }
        }
    }
    let nodes: Vec<String> = witness.iter().map(|v| v.to_string()).collect();
    let text = format!(
        "Inspecting the graph for the {} task gives the result below.\nANSWER value={} nodes=[{}]",
        oracle.task,
        oracle.truth_value,
        nodes.join(",")
    );
    let output_tokens = (text.chars().count() as u64).div_ceil(MOCK_CHARS_PER_TOKEN);
    Ok(ChatResponse {
        input_tokens: mock_input_tokens(&req.segments),
        output_tokens,
        latency_ms: 15 + output_tokens / 4,
        text,
        cached: false,
    })
}

// ---------------------------------------------------------------------------
// Provider wire formats
// ---------------------------------------------------------------------------

fn base64_png(png: &[u8]) -> String {
    // Standard alphabet with padding.
    const TABLE: &[u8; 64] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    let mut out = String::with_capacity(png.len().div_ceil(3) * 4);
    for chunk in png.chunks(3) {
        let b = [chunk[0], *chunk.get(1).unwrap_or(&0), *chunk.get(2).unwrap_or(&0)];
        let n = ((b[0] as u32) << 16) | ((b[1] as u32) << 8) | b[2] as u32;
        let chars = [
            TABLE[(n >> 18) as usize & 63],
            TABLE[(n >> 12) as usize & 63],
            TABLE[(n >> 6) as usize & 63],
            TABLE[n as usize & 63],
        ];
        let keep = chunk.len() + 1;
        for (i, &c) in chars.iter().enumerate() {
            out.push(if i < keep { c as char } else { '=' });
        }
    }
    out
}

fn openai_body(req: &ChatRequest) -> serde_json::Value {
    let mut messages = Vec::new();
    let mut user_content = Vec::new();
    for segment in &req.segments {
        match segment {
            Segment::Text { role: Role::System, text } => {
                messages.push(serde_json::json!({"role": "system", "content": text}));
            }
            Segment::Text { role: Role::User, text } => {
                user_content.push(serde_json::json!({"type": "text", "text": text}));
            }
            Segment::ImagePng { png } => {
                user_content.push(serde_json::json!({
                    "type": "image_url",
                    "image_url": {"url": format!("data:image/png;base64,{}", base64_png(png))}
                }));
            }
        }
    }
    messages.push(serde_json::json!({"role": "user", "content": user_content}));
    serde_json::json!({
        "model": req.model,
        "temperature": req.temperature,
        "messages": messages,
    })
}

fn anthropic_body(req: &ChatRequest) -> serde_json::Value {
    let mut system = String::new();
    let mut user_content = Vec::new();
    for segment in &req.segments {
        match segment {
            Segment::Text { role: Role::System, text } => {
                if !system.is_empty() {
                    system.push('\n');
                }
                system.push_str(text);
            }
            Segment::Text { role: Role::User, text } => {
                user_content.push(serde_json::json!({"type": "text", "text": text}));
            }
            Segment::ImagePng { png } => {
                user_content.push(serde_json::json!({
                    "type": "image",
                    "source": {"type": "base64", "media_type": "image/png", "data": base64_png(png)}
                }));
            }
        }
    }
    serde_json::json!({
        "model": req.model,
        "max_tokens": 4096,
        "temperature": req.temperature,
        "system": system,
        "messages": [{"role": "user", "content": user_content}],
    })
}

fn parse_provider_response(
    provider: ProviderKind,
    json: &serde_json::Value,
    latency_ms: u64,
) -> Result<ChatResponse> {
    let bad = |what: &str| Error::Backend(format!("malformed provider response: missing {what}"));
    match provider {
        ProviderKind::OpenAiChat => {
            let text = json["choices"][0]["message"]["content"]
                .as_str()
                .ok_or_else(|| bad("choices[0].message.content"))?
                .to_string();
            let usage = &json["usage"];
            Ok(ChatResponse {
                text,
                input_tokens: usage["prompt_tokens"].as_u64().unwrap_or(0),
                output_tokens: usage["completion_tokens"].as_u64().unwrap_or(0),
                latency_ms,
                cached: false,
            })
        }
        ProviderKind::AnthropicMessages => {
            let content = json["content"].as_array().ok_or_else(|| bad("content"))?;
            let mut text = String::new();
            for block in content {
                if block["type"].as_str() == Some("text") {
                    text.push_str(block["text"].as_str().unwrap_or(""));
                }
            }
            let usage = &json["usage"];
            Ok(ChatResponse {
                text,
                input_tokens: usage["input_tokens"].as_u64().unwrap_or(0),
                output_tokens: usage["output_tokens"].as_u64().unwrap_or(0),
                latency_ms,
                cached: false,
            })
        }
    }
}
