use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::attack::{AttackReport, Dictionary};
use crate::protocol::Password;

use super::{SimError, Transcript};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SimError + '_ {
    move |source| SimError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Parses newline-separated passwords. Blank lines and lines starting with
/// `#` are skipped; `origin` labels errors.
pub fn parse_dictionary(text: &str, origin: &str) -> Result<Dictionary, SimError> {
    let mut seen = HashSet::new();
    let mut words = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !seen.insert(line) {
            return Err(SimError::Format {
                path: origin.to_owned(),
                reason: format!("line {}: duplicate entry {line:?}", n + 1),
            });
        }
        words.push(Password::new(line));
    }
    if words.is_empty() {
        return Err(SimError::EmptyDictionary(origin.to_owned()));
    }
    Dictionary::new(words).map_err(|e| SimError::Format {
        path: origin.to_owned(),
        reason: e.to_string(),
    })
}

pub fn load_dictionary(path: impl AsRef<Path>) -> Result<Dictionary, SimError> {
    let path = path.as_ref();
    let raw = fs::read(path).map_err(io_err(path))?;
    let text = String::from_utf8(raw).map_err(|_| SimError::Format {
        path: path.display().to_string(),
        reason: "not valid UTF-8".into(),
    })?;
    parse_dictionary(&text, &path.display().to_string())
}

/// Pretty JSON with sorted object keys and a trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    // serde_json's Map is ordered by key unless `preserve_order` is enabled.
    let value = serde_json::to_value(value).expect("serializable value");
    let mut out = serde_json::to_string_pretty(&value).expect("serializable value");
    out.push('\n');
    out
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), SimError> {
    fs::write(path, to_canonical_json(value)).map_err(io_err(path))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, SimError> {
    let raw = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&raw).map_err(|e| SimError::Format {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

pub fn write_report(report: &AttackReport, path: impl AsRef<Path>) -> Result<(), SimError> {
    write_json(report, path.as_ref())
}

pub fn read_report(path: impl AsRef<Path>) -> Result<AttackReport, SimError> {
    read_json(path.as_ref())
}

pub fn write_transcript(transcript: &Transcript, path: impl AsRef<Path>) -> Result<(), SimError> {
    write_json(transcript, path.as_ref())
}

pub fn read_transcript(path: impl AsRef<Path>) -> Result<Transcript, SimError> {
    read_json(path.as_ref())
}
