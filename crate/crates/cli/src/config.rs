//! Option merging (`--config` file under command-line flags), artifact
//! headers and config digests.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::args::{Command, Common, DecomposeArgs, EntailArgs, EvalArgs, IngestArgs, OracleArgs, RetrieveArgs};
use crate::UsageError;

/// Fills every unset field of `self` from `file`.
pub trait Merge {
    fn merge(self, file: Self) -> Self;
}

macro_rules! merge_options {
    ($ty:ty { $($field:ident),* $(,)? }) => {
        impl Merge for $ty {
            // `..self` carries fields that never come from the file, like `config`.
            #[allow(clippy::needless_update)]
            fn merge(self, file: Self) -> Self {
                Self { $($field: self.$field.or(file.$field),)* ..self }
            }
        }
    };
}

merge_options!(Common { input, evidence, out, backend, endpoint, model, cache, replay, chunk_tokens, k, threshold, seed, jobs });
merge_options!(IngestArgs { format, annotations, workers, split });
merge_options!(DecomposeArgs { template, record, claims_out });
merge_options!(EntailArgs { strategy, level, aggregate, unit });
merge_options!(RetrieveArgs { method, context_tokens, unit, dev_input, dev_evidence });
merge_options!(OracleArgs { unit, score_out });

impl Merge for EvalArgs {
    fn merge(self, file: Self) -> Self {
        Self {
            verdicts: self.verdicts.or(file.verdicts),
            compare: if self.compare.is_empty() { file.compare } else { self.compare },
            retrieval: self.retrieval.or(file.retrieval),
            n_resamples: self.n_resamples.or(file.n_resamples),
        }
    }
}

const SECTIONS: [&str; 7] = ["ingest", "decompose", "entail", "retrieve", "rtp", "oracle", "eval"];

/// A parsed `--config` file: shared options at the top level and
/// subcommand options under the subcommand's name.
#[derive(Debug, Default)]
pub struct ConfigFile {
    pub common: Common,
    sections: Map<String, Value>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let Value::Object(mut top) = serde_json::from_str(&text).map_err(|e| UsageError(format!("config {}: {e}", path.display())))?
        else {
            return Err(UsageError(format!("config {}: expected a JSON object", path.display())).into());
        };
        let mut sections = Map::new();
        for name in SECTIONS {
            if let Some(v) = top.remove(name) {
                sections.insert(name.to_string(), v);
            }
        }
        let common = serde_json::from_value(Value::Object(top))
            .map_err(|e| UsageError(format!("config {}: {e}", path.display())))?;
        Ok(Self { common, sections })
    }

    pub fn section<T: DeserializeOwned + Default>(&self, name: &str) -> Result<T> {
        match self.sections.get(name) {
            Some(v) => Ok(serde_json::from_value(v.clone()).map_err(|e| UsageError(format!("config section {name}: {e}")))?),
            None => Ok(T::default()),
        }
    }
}

/// Applies the config file to the parsed command line.
pub fn resolve(command: Command, common: Common) -> Result<(Command, Common)> {
    let Some(path) = common.config.clone() else {
        return Ok((command, common));
    };
    let file = ConfigFile::load(&path)?;
    let command = match command {
        Command::Ingest(a) => Command::Ingest(a.merge(file.section("ingest")?)),
        Command::Decompose(a) => Command::Decompose(a.merge(file.section("decompose")?)),
        Command::Entail(a) => Command::Entail(a.merge(file.section("entail")?)),
        Command::Retrieve(a) => Command::Retrieve(a.merge(file.section("retrieve")?)),
        Command::Rtp(a) => Command::Rtp(a.merge(file.section("rtp")?)),
        Command::Oracle(a) => Command::Oracle(a.merge(file.section("oracle")?)),
        Command::Eval(a) => Command::Eval(a.merge(file.section("eval")?)),
        other => other,
    };
    let common = common.merge(file.common.clone());
    Ok((command, common))
}

/// First line of every artifact file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Effective settings, defaults filled in. Output path and thread count
    /// are left out since they do not affect the content.
    pub config: Value,
    /// SHA-256 of each input file's bytes.
    pub inputs: BTreeMap<String, String>,
    /// SHA-256 of the canonical JSON of `config` and `inputs`.
    pub config_digest: String,
}

#[derive(Serialize, Deserialize)]
struct HeaderLine {
    header: Header,
}

impl Header {
    pub fn new(command: &str, config: Value, input_paths: &[&Path]) -> Result<Self> {
        let mut inputs = BTreeMap::new();
        for path in input_paths {
            inputs.insert(path.display().to_string(), file_digest(path)?);
        }
        let canonical = serde_json::to_string(&(&config, &inputs))?;
        Ok(Self {
            tool: "claimcheck".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config,
            inputs,
            config_digest: hex::encode(Sha256::digest(canonical.as_bytes())),
        })
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(&HeaderLine { header: self.clone() }).expect("header serializes")
    }

    /// Parses `line` if it is a header line.
    pub fn parse(line: &str) -> Option<Self> {
        serde_json::from_str::<HeaderLine>(line).ok().map(|h| h.header)
    }
}

pub fn file_digest(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Path for the manifest written next to a plain corpus file.
pub fn manifest_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    path.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::LevelArg;

    #[test]
    fn flags_win_over_file() {
        let flags = Common {
            seed: Some(1),
            ..Default::default()
        };
        let file = Common {
            seed: Some(2),
            k: Some(3),
            ..Default::default()
        };
        let merged = flags.merge(file);
        assert_eq!(merged.seed, Some(1));
        assert_eq!(merged.k, Some(3));
    }

    #[test]
    fn config_file_sections() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        fs::write(&path, r#"{"seed": 5, "entail": {"level": "sentence"}}"#).unwrap();
        let file = ConfigFile::load(&path).unwrap();
        assert_eq!(file.common.seed, Some(5));
        let entail: EntailArgs = file.section("entail").unwrap();
        assert_eq!(entail.level, Some(LevelArg::Sentence));
        fs::write(&path, r#"{"sead": 5}"#).unwrap();
        assert!(ConfigFile::load(&path).is_err());
    }

    #[test]
    fn header_round_trip_and_digest() {
        let a = Header::new("stats", serde_json::json!({"k": 7}), &[]).unwrap();
        let b = Header::new("stats", serde_json::json!({"k": 7}), &[]).unwrap();
        let c = Header::new("stats", serde_json::json!({"k": 8}), &[]).unwrap();
        assert_eq!(a.config_digest, b.config_digest);
        assert_ne!(a.config_digest, c.config_digest);
        assert_eq!(Header::parse(&a.to_line()), Some(a));
        assert_eq!(Header::parse(r#"{"claim_id": "x"}"#), None);
    }
}
