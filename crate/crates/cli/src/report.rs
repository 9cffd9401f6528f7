//! Merges the verdicts of several run manifests into one summary.

use crate::error::CliError;
use crate::output::{RunManifest, TOOL, VERSION};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Source {
    pub path: String,
    pub command: String,
    pub config_hash: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub tool: String,
    pub version: String,
    pub sources: Vec<Source>,
    pub verdicts: BTreeMap<String, Value>,
}

/// `manifests` pairs each manifest with the name it was loaded from.
pub fn merge(manifests: &[(String, RunManifest)]) -> Result<Summary, CliError> {
    let mut verdicts: BTreeMap<String, Value> = BTreeMap::new();
    let mut origin: BTreeMap<String, &str> = BTreeMap::new();
    let mut sources = Vec::new();
    for (path, m) in manifests {
        if m.tool != TOOL || m.version != VERSION {
            return Err(CliError::Report(format!(
                "{path} was written by {} {}, this is {TOOL} {VERSION}",
                m.tool, m.version
            )));
        }
        for (k, v) in &m.verdicts {
            match verdicts.get(k) {
                Some(old) if old != v => {
                    return Err(CliError::Report(format!(
                        "conflicting values for `{k}`: {old} in {} and {v} in {path}",
                        origin[k]
                    )));
                }
                Some(_) => {}
                None => {
                    verdicts.insert(k.clone(), v.clone());
                    origin.insert(k.clone(), path);
                }
            }
        }
        sources.push(Source { path: path.clone(), command: m.command.clone(), config_hash: m.config_hash.clone() });
    }
    Ok(Summary { tool: TOOL.into(), version: VERSION.into(), sources, verdicts })
}
