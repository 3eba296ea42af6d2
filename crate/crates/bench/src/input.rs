//! Reading partitions from text files.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use fastsearch_core::{validate_partition, Error as CoreError, Real, SortedPartition};

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: cannot parse `{text}` as a number")]
    Parse { line: usize, text: String },
    #[error("invalid partition: {0}")]
    Invalid(#[from] CoreError),
}

/// One value per line; blank lines are skipped. The values must form a valid partition.
pub fn parse_partition<T: Real + FromStr>(text: &str) -> Result<SortedPartition<T>, InputError> {
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let s = raw.trim();
        if s.is_empty() {
            continue;
        }
        let v = s.parse::<T>().map_err(|_| InputError::Parse { line: i + 1, text: s.to_string() })?;
        values.push(v);
    }
    Ok(validate_partition(values)?)
}

pub fn read_partition<T: Real + FromStr>(path: impl AsRef<Path>) -> Result<SortedPartition<T>, InputError> {
    parse_partition(&fs::read_to_string(path)?)
}
