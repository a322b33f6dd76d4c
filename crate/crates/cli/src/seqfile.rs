//! JSON files of log intrinsic volumes.
//!
//! ```json
//! {"n_max": 2, "log_mu": [[0.0, 0.69], [0.0, 1.38, "-inf"]]}
//! ```
//!
//! Row `n` holds `log mu_n(0..=n)`. Finite entries are plain numbers and
//! `log 0` is the string `"-inf"`; no other strings are accepted. Numbers are
//! written in shortest round-trip form, so a write/read cycle is bit-exact.

use std::fs;
use std::io::Write;
use std::path::Path;

use ehcap_core::subconv::IntrinsicVolumeSequence;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

const NEG_INF: &str = "-inf";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum Entry {
    Number(f64),
    Text(String),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceFile {
    n_max: usize,
    log_mu: Vec<Vec<Entry>>,
}

fn decode(entry: Entry, n: usize, j: usize) -> CliResult<f64> {
    match entry {
        Entry::Number(x) => Ok(x),
        Entry::Text(s) if s == NEG_INF => Ok(f64::NEG_INFINITY),
        Entry::Text(s) => Err(CliError::Validation(format!(
            "log_mu[{n}][{j}] = {s:?}; only numbers and \"-inf\" are allowed"
        ))),
    }
}

fn encode(x: f64) -> Entry {
    if x == f64::NEG_INFINITY {
        Entry::Text(NEG_INF.to_owned())
    } else {
        Entry::Number(x)
    }
}

pub fn parse_sequence(text: &str) -> CliResult<IntrinsicVolumeSequence> {
    let file: SequenceFile = serde_json::from_str(text)?;
    if file.n_max != file.log_mu.len() {
        return Err(CliError::Validation(format!(
            "n_max is {} but log_mu has {} rows",
            file.n_max,
            file.log_mu.len()
        )));
    }
    let rows = file
        .log_mu
        .into_iter()
        .enumerate()
        .map(|(k, row)| {
            row.into_iter()
                .enumerate()
                .map(|(j, e)| decode(e, k + 1, j))
                .collect::<CliResult<Vec<f64>>>()
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(IntrinsicVolumeSequence::new(rows)?)
}

pub fn sequence_to_json(seq: &IntrinsicVolumeSequence) -> CliResult<String> {
    let file = SequenceFile {
        n_max: seq.n_max(),
        log_mu: seq
            .rows()
            .iter()
            .map(|row| row.iter().map(|&x| encode(x)).collect())
            .collect(),
    };
    Ok(serde_json::to_string(&file)?)
}

pub fn read_sequence(path: &Path) -> CliResult<IntrinsicVolumeSequence> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_sequence(&text)
}

pub fn write_sequence(path: &Path, seq: &IntrinsicVolumeSequence) -> CliResult<()> {
    let io_err = |source| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut f = fs::File::create(path).map_err(io_err)?;
    f.write_all(sequence_to_json(seq)?.as_bytes())
        .map_err(io_err)
}
