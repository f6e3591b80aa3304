//! Natural-language front end: turns free-text scene descriptions into
//! validated scene documents via an OpenAI-compatible chat endpoint.
//!
//! The client is strictly optional. With no `base_url` configured the
//! parser reports [`LlmError::Offline`] without touching the network, so
//! every other pipeline stage stays usable offline. Model output is
//! validated with the same schema walker as hand-written scenes; on
//! validation failure the error text is fed back to the model for a
//! bounded number of repair rounds.

use crate::semantics::{validate_scene_with, SemanticScene, ValidationMode};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::time::Duration;
use thiserror::Error;

/// Environment variable consulted for the endpoint credential.
pub const API_KEY_ENV: &str = "STCM_LLM_API_KEY";

/// Instruction block sent as the system message. Golden-tested; change the
/// copy under `tests/golden/` in the same commit.
pub const SYSTEM_PROMPT: &str = "\
You translate natural-language descriptions of integrated sensing scenes
into one JSON object and nothing else: no prose, no code fences, no
comments.

The object follows this schema exactly:
- \"scene_id\": short unique string.
- \"scenario_class\": one of \"urban_street\", \"highway\", \"indoor\",
  \"open_field\", \"other\".
- \"horizon_s\": optional positive number, seconds of scene validity.
- \"targets\": non-empty array of sensed objects, each with:
  - \"id\": unique string.
  - \"class\": \"vehicle\" or \"uav\". Use only these classes.
  - \"components\": array of {\"part\": string, \"count\": integer >= 0,
    \"rate_hz\": number >= 0}. Rotating parts (\"wheel\", \"rotor\",
    \"propeller\", \"blade\") drive micro-Doppler; give them realistic
    rates.
  - \"position\": [x, y, z] meters, z up.
  - \"velocity\": [vx, vy, vz] meters per second.
  - \"heading_rad\": optional heading angle, defaults to 0.
- \"background\": array of static scene objects, each with:
  - \"id\": unique string.
  - \"kind\": one of \"building\", \"vegetation\", \"roadside\", \"other\".
  - \"box_min\", \"box_max\": opposite corners [x, y, z] in meters,
    componentwise box_min < box_max.
  - \"material\": one of \"concrete\", \"glass\", \"metal\", \"foliage\",
    \"other\".
  - \"occluder\": optional boolean; buildings default to true, other
    kinds to false.
- \"relations\": array of {\"subject\": id, \"predicate\": one of
  \"blocks\", \"adjacent_to\", \"approaches\", \"other\", \"object\": id}.
- \"events\": array of {\"type\": one of \"crossing\", \"converging\",
  \"loitering\", \"other\", \"participants\": [ids], \"start_s\": number,
  \"end_s\": number} with 0 <= start_s <= end_s <= horizon_s.

Counts must be integers, not floats. Every id referenced by relations or
events must belong to a declared target or background object. When the
description leaves a value open, pick something physically plausible for
the scenario instead of omitting the field.
";

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("no endpoint configured; set base_url to enable text parsing")]
    Offline,
    #[error(transparent)]
    Transport(#[from] reqwest::Error),
    #[error("endpoint returned status {status}: {body}")]
    Endpoint { status: u16, body: String },
    #[error("malformed endpoint response: {0}")]
    MalformedResponse(String),
    #[error("model output unusable after {attempts} attempt(s): {message}")]
    Exhausted { attempts: usize, message: String },
}

/// Connection settings for an OpenAI-compatible chat-completions endpoint.
#[derive(Clone, Serialize, Deserialize)]
pub struct LlmEndpointConfig {
    /// Server root, e.g. `http://localhost:8000`. Empty means offline.
    pub base_url: String,
    pub model: String,
    /// Bearer credential; never serialized.
    #[serde(skip_serializing, default)]
    pub api_key: Option<String>,
    pub timeout_s: u64,
    /// Repair rounds after the first attempt.
    pub max_retries: usize,
}

impl Default for LlmEndpointConfig {
    fn default() -> Self {
        LlmEndpointConfig {
            base_url: String::new(),
            model: "default".into(),
            api_key: None,
            timeout_s: 60,
            max_retries: 2,
        }
    }
}

// Hand-written so the credential cannot leak through logs.
impl fmt::Debug for LlmEndpointConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LlmEndpointConfig")
            .field("base_url", &self.base_url)
            .field("model", &self.model)
            .field("api_key", &self.api_key.as_ref().map(|_| "<redacted>"))
            .field("timeout_s", &self.timeout_s)
            .field("max_retries", &self.max_retries)
            .finish()
    }
}

/// Reads the endpoint credential from [`API_KEY_ENV`].
pub fn api_key_from_env() -> Option<String> {
    std::env::var(API_KEY_ENV).ok().filter(|s| !s.is_empty())
}

/// A successfully parsed description.
#[derive(Debug, Clone)]
pub struct ParsedScene {
    pub scene: SemanticScene,
    pub warnings: Vec<String>,
    /// Attempts consumed, including the successful one.
    pub attempts: usize,
}

/// First balanced JSON object in `text`, tolerating prose or code fences
/// around it. Braces inside string literals do not count.
pub fn extract_json(text: &str) -> Option<&str> {
    let bytes = text.as_bytes();
    let start = text.find('{')?;
    let mut depth = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    for (i, &b) in bytes.iter().enumerate().skip(start) {
        if in_string {
            if escaped {
                escaped = false;
            } else if b == b'\\' {
                escaped = true;
            } else if b == b'"' {
                in_string = false;
            }
            continue;
        }
        match b {
            b'"' => in_string = true,
            b'{' => depth += 1,
            b'}' => {
                depth -= 1;
                if depth == 0 {
                    return Some(&text[start..=i]);
                }
            }
            _ => {}
        }
    }
    None
}

#[derive(Serialize)]
struct ChatMessage {
    role: &'static str,
    content: String,
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    temperature: f64,
    messages: Vec<ChatMessage>,
}

#[derive(Deserialize)]
struct ChatChoiceMessage {
    content: String,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatChoiceMessage,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

/// Parses a free-text description into a validated scene.
///
/// Transport and endpoint errors surface immediately; schema violations
/// trigger up to `max_retries` repair rounds where the validation error is
/// quoted back to the model. Validation runs in strict mode so repairs are
/// forced to drop unknown fields rather than smuggle them through.
pub fn parse_text(
    cfg: &LlmEndpointConfig,
    description: &str,
) -> Result<ParsedScene, LlmError> {
    if cfg.base_url.trim().is_empty() {
        return Err(LlmError::Offline);
    }
    let client = reqwest::blocking::Client::builder()
        .timeout(Duration::from_secs(cfg.timeout_s.max(1)))
        .build()?;
    let url = format!(
        "{}/v1/chat/completions",
        cfg.base_url.trim_end_matches('/')
    );

    let mut user_message = description.to_string();
    let mut last_problem = String::new();
    let attempts_allowed = cfg.max_retries + 1;

    for attempt in 1..=attempts_allowed {
        let body = ChatRequest {
            model: &cfg.model,
            temperature: 0.0,
            messages: vec![
                ChatMessage {
                    role: "system",
                    content: SYSTEM_PROMPT.to_string(),
                },
                ChatMessage {
                    role: "user",
                    content: user_message.clone(),
                },
            ],
        };
        let mut request = client.post(&url).json(&body);
        if let Some(key) = &cfg.api_key {
            request = request.bearer_auth(key);
        }
        let response = request.send()?;
        let status = response.status();
        if !status.is_success() {
            let mut text = response.text().unwrap_or_default();
            text.truncate(500);
            return Err(LlmError::Endpoint {
                status: status.as_u16(),
                body: text,
            });
        }
        let parsed: ChatResponse = response
            .json()
            .map_err(|e| LlmError::MalformedResponse(e.to_string()))?;
        let content = &parsed
            .choices
            .first()
            .ok_or_else(|| LlmError::MalformedResponse("response has no choices".into()))?
            .message
            .content;

        last_problem = match extract_json(content) {
            None => "the reply contained no JSON object".to_string(),
            Some(json) => match validate_scene_with(json, ValidationMode::Strict) {
                Ok((scene, warnings)) => {
                    return Ok(ParsedScene {
                        scene,
                        warnings,
                        attempts: attempt,
                    })
                }
                Err(e) => e.to_string(),
            },
        };
        user_message = format!(
            "{description}\n\nYour previous reply was rejected: {last_problem}. \
             Reply with a corrected JSON object and nothing else."
        );
    }
    Err(LlmError::Exhausted {
        attempts: attempts_allowed,
        message: last_problem,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extract_json_finds_plain_and_embedded_objects() {
        assert_eq!(extract_json(r#"{"a": 1}"#), Some(r#"{"a": 1}"#));
        assert_eq!(
            extract_json("Sure! Here you go:\n```json\n{\"a\": {\"b\": 2}}\n```"),
            Some(r#"{"a": {"b": 2}}"#)
        );
    }

    #[test]
    fn extract_json_ignores_braces_inside_strings() {
        let text = r#"{"note": "closing } brace and \" quote", "x": 1} tail"#;
        assert_eq!(
            extract_json(text),
            Some(r#"{"note": "closing } brace and \" quote", "x": 1}"#)
        );
    }

    #[test]
    fn extract_json_rejects_unbalanced_or_missing() {
        assert_eq!(extract_json("no json here"), None);
        assert_eq!(extract_json(r#"{"a": 1"#), None);
    }

    #[test]
    fn debug_never_prints_the_credential() {
        let cfg = LlmEndpointConfig {
            api_key: Some("sk-super-secret".into()),
            ..LlmEndpointConfig::default()
        };
        let shown = format!("{cfg:?}");
        assert!(!shown.contains("super-secret"));
        assert!(shown.contains("<redacted>"));
    }

    #[test]
    fn serialization_never_carries_the_credential() {
        let cfg = LlmEndpointConfig {
            api_key: Some("sk-super-secret".into()),
            ..LlmEndpointConfig::default()
        };
        let json = serde_json::to_string(&cfg).unwrap();
        assert!(!json.contains("super-secret"));
        assert!(!json.contains("api_key"));
    }

    #[test]
    fn empty_base_url_means_offline() {
        let cfg = LlmEndpointConfig::default();
        assert!(matches!(parse_text(&cfg, "a car"), Err(LlmError::Offline)));
    }

    #[test]
    fn api_key_env_round_trip() {
        std::env::set_var(API_KEY_ENV, "k-123");
        assert_eq!(api_key_from_env().as_deref(), Some("k-123"));
        std::env::set_var(API_KEY_ENV, "");
        assert_eq!(api_key_from_env(), None);
        std::env::remove_var(API_KEY_ENV);
        assert_eq!(api_key_from_env(), None);
    }

    #[test]
    fn prompt_names_the_scenario_vocabulary() {
        for token in [
            "scenario_class",
            "urban_street",
            "components",
            "box_min",
            "participants",
        ] {
            assert!(SYSTEM_PROMPT.contains(token), "prompt must mention {token}");
        }
    }
}
