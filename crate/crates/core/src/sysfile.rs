//! Reading and writing system-definition files.
//!
//! The format is UTF-8 text with one `<n><TAB><numeral>` entry per line.
//! Anything from `#` to the end of a line is a comment; blank lines are
//! skipped. A file must define exactly the keys 1..=99. The writer emits
//! entries in ascending order, so files are byte-stable for a given system.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use thiserror::Error;

use crate::numeral::{tokenize, Numeral, NumeralError, NumeralSystem, SystemSource};

#[derive(Debug, Error)]
pub enum SysFileError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected <number><TAB><numeral>")]
    MissingTab { line: usize },
    #[error("line {line}: invalid number {text:?}")]
    BadNumber { line: usize, text: String },
    #[error("line {line}: {source}")]
    BadNumeral {
        line: usize,
        #[source]
        source: NumeralError,
    },
    #[error("line {line}: duplicate entry for {number}")]
    DuplicateEntry { line: usize, number: u32 },
    #[error("missing entries for: {0}")]
    MissingEntries(String),
}

/// Parses the definition text. `name` becomes the system's name; readers
/// loading from disk use the file stem.
pub fn parse_system(name: &str, text: &str) -> Result<NumeralSystem, SysFileError> {
    let mut numerals: BTreeMap<u32, Numeral> = BTreeMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        let (num_text, form_text) = content
            .split_once('\t')
            .ok_or(SysFileError::MissingTab { line })?;
        let number: u32 = num_text
            .trim()
            .parse()
            .map_err(|_| SysFileError::BadNumber {
                line,
                text: num_text.trim().to_string(),
            })?;
        let numeral =
            tokenize(form_text.trim()).map_err(|source| SysFileError::BadNumeral { line, source })?;
        if numerals.insert(number, numeral).is_some() {
            return Err(SysFileError::DuplicateEntry { line, number });
        }
    }
    let missing: Vec<String> = (1..=99u32)
        .filter(|n| !numerals.contains_key(n))
        .map(|n| n.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(SysFileError::MissingEntries(missing.join(", ")));
    }
    Ok(NumeralSystem::new(name, numerals, SystemSource::Ingested))
}

pub fn read_system(path: &Path) -> Result<NumeralSystem, SysFileError> {
    let text = fs::read_to_string(path).map_err(|source| SysFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "unnamed".to_string());
    parse_system(&name, &text)
}

/// Renders a system in the definition format (ascending keys).
pub fn render_system(system: &NumeralSystem) -> String {
    let mut out = String::new();
    out.push_str(&format!("# {}\n", system.name()));
    for (n, numeral) in system.numerals() {
        out.push_str(&format!("{n}\t{numeral}\n"));
    }
    out
}

pub fn write_system(system: &NumeralSystem, path: &Path) -> Result<(), SysFileError> {
    let mut file = fs::File::create(path).map_err(|source| SysFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    file.write_all(render_system(system).as_bytes())
        .map_err(|source| SysFileError::Io {
            path: path.display().to_string(),
            source,
        })
}

/// Loads every `*.tsv` / `*.txt` system file in a directory, sorted by name.
pub fn read_systems_dir(dir: &Path) -> Result<Vec<NumeralSystem>, SysFileError> {
    let mut paths: Vec<_> = fs::read_dir(dir)
        .map_err(|source| SysFileError::Io {
            path: dir.display().to_string(),
            source,
        })?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            matches!(
                p.extension().and_then(|e| e.to_str()),
                Some("tsv") | Some("txt")
            )
        })
        .collect();
    paths.sort();
    paths.iter().map(|p| read_system(p)).collect()
}
