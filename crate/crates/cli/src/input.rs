//! Reading instance files.

use std::io::Read;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::Failure;

/// Reads a JSON document from a path, or stdin for `None` and `-`.
pub fn read_json(path: Option<&Path>) -> Result<Value, Failure> {
    let (text, name) = match path {
        Some(p) if p != Path::new("-") => (
            std::fs::read_to_string(p)
                .map_err(|e| Failure::usage(format!("cannot read {}: {e}", p.display())))?,
            p.display().to_string(),
        ),
        _ => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Failure::usage(format!("cannot read stdin: {e}")))?;
            (s, "<stdin>".to_string())
        }
    };
    parse_json(&text).map_err(|(offset, msg)| {
        Failure::usage(format!("{name}: invalid JSON at byte {offset}: {msg}"))
    })
}

pub fn read_json_path(path: &PathBuf) -> Result<Value, Failure> {
    read_json(Some(path.as_path()))
}

/// Parses `text`, turning serde's line and column into a byte offset.
pub fn parse_json(text: &str) -> Result<Value, (usize, String)> {
    serde_json::from_str(text).map_err(|e| {
        if e.is_eof() {
            return (text.len(), e.to_string());
        }
        let line = e.line().max(1);
        let offset: usize = text
            .split_inclusive('\n')
            .take(line - 1)
            .map(str::len)
            .sum::<usize>()
            + e.column().saturating_sub(1);
        (offset.min(text.len()), e.to_string())
    })
}

pub fn split_list(s: &str) -> Vec<String> {
    s.split(',')
        .map(|t| t.trim().to_string())
        .filter(|t| !t.is_empty())
        .collect()
}
