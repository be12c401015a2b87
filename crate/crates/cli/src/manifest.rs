use std::path::PathBuf;
use std::time::Duration;

use serde_json::json;
use sha2::{Digest, Sha256};

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Run manifest as pretty JSON. Only `elapsed_ms` varies between identical runs.
pub fn build(args: &[String], inputs: &[PathBuf], seed: Option<u64>, elapsed: Duration, result: &str) -> String {
    let inputs: Vec<_> = inputs
        .iter()
        .map(|p| {
            let sha256 = std::fs::read(p).map(|b| digest(&b)).unwrap_or_default();
            json!({ "path": p.display().to_string(), "sha256": sha256 })
        })
        .collect();
    let value = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "arguments": args,
        "inputs": inputs,
        "seed": seed,
        "elapsed_ms": elapsed.as_millis() as u64,
        "result_sha256": digest(result.as_bytes()),
    });
    let mut text = serde_json::to_string_pretty(&value).expect("serializable");
    text.push('\n');
    text
}
