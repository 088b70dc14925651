use crate::error::{Error, Result};

/// Lowercases, trims and collapses runs of whitespace into single spaces.
pub fn normalize(raw: &str) -> String {
    raw.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Like [`normalize`] but rejects labels that end up empty.
pub fn normalize_non_empty(raw: &str) -> Result<String> {
    let label = normalize(raw);
    if label.is_empty() {
        Err(Error::EmptyLabel)
    } else {
        Ok(label)
    }
}
