use sha2::{Digest, Sha256};
use unicode_normalization::UnicodeNormalization;

use super::ChatRequest;

/// NFC-normalizes, trims, and collapses every whitespace run to one space.
pub fn normalize_text(text: &str) -> String {
    let nfc: String = text.nfc().collect();
    nfc.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Lowercase hex SHA-256 over the normalized system prompt and messages.
///
/// Normalized text never contains a newline, so newline-separated
/// `role:text` records are unambiguous. Sampling settings are not part of
/// the digest.
pub fn request_digest(request: &ChatRequest) -> String {
    let mut hasher = Sha256::new();
    hasher.update(b"system:");
    hasher.update(normalize_text(&request.system_prompt).as_bytes());
    for message in &request.messages {
        hasher.update(b"\n");
        hasher.update(message.role.as_str().as_bytes());
        hasher.update(b":");
        hasher.update(normalize_text(&message.content).as_bytes());
    }
    hex::encode(hasher.finalize())
}
