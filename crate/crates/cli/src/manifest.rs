//! The plain-text run manifest: one `key = value` per line.
//!
//! ```text
//! artifact_version = 1
//! config_hash = 3f1c…
//! module thresholdlab = 0.1.0
//! data summary.json = 9a0b…
//! ```

use std::fmt::Write as _;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RunManifest {
    pub artifact_version: u32,
    /// SHA-256 of the canonical configuration.
    pub config_hash: String,
    pub config_file: String,
    pub subcommand: String,
    pub status: String,
    pub started: String,
    pub finished: String,
    /// `(crate, version)` of every module involved.
    pub modules: Vec<(String, String)>,
    /// `(file name, SHA-256)` of every data file, in write order.
    pub data_files: Vec<(String, String)>,
}

const HEADER: &str = "# thresholdlab run manifest";
const MAX_ENTRIES: usize = 64;

fn is_hash(s: &str) -> bool {
    s.len() == 64 && s.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f'))
}

/// Data and config files must be plain names inside the run directory.
fn is_plain_name(s: &str) -> bool {
    !s.is_empty() && s != "." && s != ".." && !s.contains(['/', '\\']) && !s.contains(char::is_whitespace)
}

impl RunManifest {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{HEADER}");
        let _ = writeln!(out, "artifact_version = {}", self.artifact_version);
        let _ = writeln!(out, "config_hash = {}", self.config_hash);
        let _ = writeln!(out, "config_file = {}", self.config_file);
        let _ = writeln!(out, "subcommand = {}", self.subcommand);
        let _ = writeln!(out, "status = {}", self.status);
        let _ = writeln!(out, "started = {}", self.started);
        let _ = writeln!(out, "finished = {}", self.finished);
        for (name, version) in &self.modules {
            let _ = writeln!(out, "module {name} = {version}");
        }
        for (name, hash) in &self.data_files {
            let _ = writeln!(out, "data {name} = {hash}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = |line: usize, msg: &str| CliError::ManifestInvalid(format!("line {line}: {msg}"));
        let mut m = RunManifest::default();
        let mut seen_version = false;
        let mut entries = 0;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            entries += 1;
            if entries > MAX_ENTRIES {
                return Err(bad(line_no, "too many entries"));
            }
            let (key, value) = line.split_once(" = ").ok_or_else(|| bad(line_no, "expected `key = value`"))?;
            let value = value.trim().to_string();
            if let Some(name) = key.strip_prefix("module ") {
                m.modules.push((name.trim().to_string(), value));
                continue;
            }
            if let Some(name) = key.strip_prefix("data ") {
                let name = name.trim();
                if !is_plain_name(name) || !is_hash(&value) {
                    return Err(bad(line_no, "data entries need a file name and a SHA-256"));
                }
                m.data_files.push((name.to_string(), value));
                continue;
            }
            match key {
                "artifact_version" => {
                    m.artifact_version = value.parse().map_err(|_| bad(line_no, "bad artifact_version"))?;
                    seen_version = true;
                }
                "config_hash" if is_hash(&value) => m.config_hash = value,
                "config_hash" => return Err(bad(line_no, "config_hash is not a SHA-256")),
                "config_file" if is_plain_name(&value) => m.config_file = value,
                "config_file" => return Err(bad(line_no, "config_file must be a plain file name")),
                "subcommand" => m.subcommand = value,
                "status" => m.status = value,
                "started" => m.started = value,
                "finished" => m.finished = value,
                other => return Err(bad(line_no, &format!("unknown key {other:?}"))),
            }
        }
        if !seen_version || m.config_hash.is_empty() || m.config_file.is_empty() {
            return Err(CliError::ManifestInvalid(
                "artifact_version, config_hash and config_file are required".into(),
            ));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunManifest {
        RunManifest {
            artifact_version: 1,
            config_hash: "a".repeat(64),
            config_file: "config.json".into(),
            subcommand: "threshold".into(),
            status: "pass".into(),
            started: "2026-01-01T00:00:00Z".into(),
            finished: "2026-01-01T00:00:01Z".into(),
            modules: vec![("thresholdlab".into(), "0.1.0".into())],
            data_files: vec![("summary.json".into(), "0".repeat(64))],
        }
    }

    #[test]
    fn round_trip() {
        let m = sample();
        assert_eq!(RunManifest::parse(&m.render()).unwrap(), m);
    }

    #[test]
    fn rejects_bad_input() {
        let text = sample().render();
        for broken in [
            text.replace("config_hash = aaaa", "config_hash = zzzz"),
            text.replace("summary.json", "../summary.json"),
            text.replace("artifact_version = 1", "artifact_version = one"),
            text.replace("status = pass", "colour = blue"),
            text.replace("status = pass", "status pass"),
            String::new(),
        ] {
            assert!(RunManifest::parse(&broken).is_err(), "{broken}");
        }
    }
}
