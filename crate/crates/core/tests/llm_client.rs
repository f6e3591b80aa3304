//! End-to-end tests of the text-parsing client against a local mock
//! chat-completions server.

use std::io::{Read, Write};
use std::net::TcpListener;
use std::thread;

use stcm_core::llm::{parse_text, LlmEndpointConfig, LlmError, SYSTEM_PROMPT};

#[test]
fn system_prompt_matches_golden_copy() {
    assert_eq!(SYSTEM_PROMPT, include_str!("golden/system_prompt.txt"));
}

fn valid_scene_doc() -> String {
    serde_json::json!({
        "scene_id": "mock-1",
        "scenario_class": "highway",
        "horizon_s": 10.0,
        "targets": [{
            "id": "car1",
            "class": "vehicle",
            "components": [{"part": "wheel", "count": 4, "rate_hz": 11.0}],
            "position": [30.0, 0.0, 0.5],
            "velocity": [-25.0, 0.0, 0.0],
            "heading_rad": 3.14159
        }],
        "background": [],
        "relations": [],
        "events": []
    })
    .to_string()
}

fn chat_reply(content: &str) -> String {
    serde_json::json!({
        "id": "cmpl-1",
        "choices": [{"index": 0, "message": {"role": "assistant", "content": content}}]
    })
    .to_string()
}

fn find_subslice(haystack: &[u8], needle: &[u8]) -> Option<usize> {
    haystack.windows(needle.len()).position(|w| w == needle)
}

/// Serves the given (status, body) responses one connection each, then
/// returns the request bodies it saw.
fn serve(responses: Vec<(u16, String)>) -> (String, thread::JoinHandle<Vec<String>>) {
    let listener = TcpListener::bind("127.0.0.1:0").expect("bind loopback");
    let addr = listener.local_addr().unwrap();
    let handle = thread::spawn(move || {
        let mut seen = Vec::new();
        for (status, body) in responses {
            let (mut stream, _) = listener.accept().expect("accept");
            let mut buf = Vec::new();
            let mut tmp = [0u8; 4096];
            let (head_end, content_len) = loop {
                let n = stream.read(&mut tmp).expect("read head");
                assert!(n > 0, "client closed before sending a full request");
                buf.extend_from_slice(&tmp[..n]);
                if let Some(pos) = find_subslice(&buf, b"\r\n\r\n") {
                    let head = String::from_utf8_lossy(&buf[..pos]).to_string();
                    let len = head
                        .lines()
                        .find_map(|l| {
                            let lower = l.to_ascii_lowercase();
                            lower
                                .strip_prefix("content-length:")
                                .map(|v| v.trim().parse::<usize>().unwrap())
                        })
                        .unwrap_or(0);
                    break (pos + 4, len);
                }
            };
            while buf.len() < head_end + content_len {
                let n = stream.read(&mut tmp).expect("read body");
                assert!(n > 0, "client closed mid-body");
                buf.extend_from_slice(&tmp[..n]);
            }
            seen.push(String::from_utf8_lossy(&buf[head_end..head_end + content_len]).to_string());
            let reason = if status == 200 { "OK" } else { "Error" };
            let response = format!(
                "HTTP/1.1 {status} {reason}\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                body.len()
            );
            stream.write_all(response.as_bytes()).expect("write response");
        }
        seen
    });
    (format!("http://{addr}"), handle)
}

fn config(base_url: String, max_retries: usize) -> LlmEndpointConfig {
    LlmEndpointConfig {
        base_url,
        model: "mock-model".into(),
        api_key: Some("k-test".into()),
        timeout_s: 10,
        max_retries,
    }
}

#[test]
fn parses_a_valid_reply_on_the_first_attempt() {
    let content = format!("Here is the scene:\n```json\n{}\n```", valid_scene_doc());
    let (url, server) = serve(vec![(200, chat_reply(&content))]);
    let parsed = parse_text(&config(url, 0), "a car on a highway").expect("parse");
    assert_eq!(parsed.scene.scene_id, "mock-1");
    assert_eq!(parsed.attempts, 1);
    assert_eq!(parsed.scene.targets.len(), 1);

    let requests = server.join().unwrap();
    assert_eq!(requests.len(), 1);
    // The request must carry the instruction block and the description.
    assert!(requests[0].contains("scenario_class"));
    assert!(requests[0].contains("a car on a highway"));
    assert!(requests[0].contains("mock-model"));
}

#[test]
fn feeds_validation_errors_back_and_recovers() {
    // First reply: schema violation (fractional count). Second: valid.
    let bad = valid_scene_doc().replace("\"count\":4", "\"count\":4.5");
    assert_ne!(bad, valid_scene_doc(), "replacement must hit");
    let (url, server) = serve(vec![
        (200, chat_reply(&bad)),
        (200, chat_reply(&valid_scene_doc())),
    ]);
    let parsed = parse_text(&config(url, 2), "a car").expect("parse after repair");
    assert_eq!(parsed.attempts, 2);

    let requests = server.join().unwrap();
    assert_eq!(requests.len(), 2);
    assert!(
        requests[1].contains("rejected"),
        "repair round must quote the failure back"
    );
}

#[test]
fn gives_up_after_the_retry_budget() {
    let (url, server) = serve(vec![
        (200, chat_reply("no json at all")),
        (200, chat_reply("still no json")),
    ]);
    let err = parse_text(&config(url, 1), "a car").unwrap_err();
    match err {
        LlmError::Exhausted { attempts, message } => {
            assert_eq!(attempts, 2);
            assert!(message.contains("no JSON object"));
        }
        other => panic!("expected exhaustion, got {other:?}"),
    }
    assert_eq!(server.join().unwrap().len(), 2);
}

#[test]
fn endpoint_failures_are_not_retried() {
    let (url, server) = serve(vec![(500, "{\"error\": \"boom\"}".into())]);
    let err = parse_text(&config(url, 3), "a car").unwrap_err();
    match err {
        LlmError::Endpoint { status, body } => {
            assert_eq!(status, 500);
            assert!(body.contains("boom"));
        }
        other => panic!("expected endpoint error, got {other:?}"),
    }
    assert_eq!(server.join().unwrap().len(), 1);
}
