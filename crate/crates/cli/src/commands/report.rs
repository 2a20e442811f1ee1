//! `dioph report` — aggregate previously produced artifacts: list each one
//! with its kind, version, digest and size, and say whether all inputs came
//! from the same parameter set.

use std::path::PathBuf;

use dioph::{Error, Result};
use serde::Serialize;
use serde_json::Value;

use super::{emit, json_bytes, path_display, Ctx, ARTIFACT_VERSION};

#[derive(Serialize)]
struct InputSummary {
    path: String,
    kind: String,
    artifact_version: Option<String>,
    params_digest: Option<String>,
    /// Data rows for CSV inputs, result entries for JSON inputs.
    entries: usize,
}

#[derive(Serialize)]
struct ReportArtifact<'a> {
    artifact_version: &'a str,
    /// The shared digest when all inputs agree, otherwise null.
    params_digest: Option<String>,
    command: &'a str,
    inputs: Vec<InputSummary>,
    distinct_digests: Vec<String>,
    digests_consistent: bool,
}

pub fn run(ctx: &Ctx, files: &[PathBuf]) -> Result<()> {
    let mut inputs = Vec::with_capacity(files.len());
    for path in files {
        inputs.push(summarize(path)?);
    }

    let mut digests: Vec<String> = inputs
        .iter()
        .filter_map(|i| i.params_digest.clone())
        .collect();
    digests.sort();
    digests.dedup();
    let consistent = digests.len() <= 1;

    let artifact = ReportArtifact {
        artifact_version: ARTIFACT_VERSION,
        params_digest: if consistent {
            digests.first().cloned()
        } else {
            None
        },
        command: "report",
        inputs,
        distinct_digests: digests,
        digests_consistent: consistent,
    };
    let bytes = json_bytes(&artifact)?;
    emit(ctx, "report.json", &bytes)?;
    Ok(())
}

fn summarize(path: &PathBuf) -> Result<InputSummary> {
    let bytes = std::fs::read(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let text_start = bytes.iter().position(|b| !b.is_ascii_whitespace());
    match text_start.map(|i| bytes[i]) {
        Some(b'{') => summarize_json(path, &bytes),
        Some(_) => summarize_csv(path, &bytes),
        None => Err(Error::Config(format!("{} is empty", path.display()))),
    }
}

fn summarize_json(path: &PathBuf, bytes: &[u8]) -> Result<InputSummary> {
    let v: Value = serde_json::from_slice(bytes)
        .map_err(|e| Error::Config(format!("{} is not valid JSON: {e}", path.display())))?;
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Config(format!("{}: expected a JSON object", path.display())))?;
    let get_str = |k: &str| obj.get(k).and_then(Value::as_str).map(str::to_string);
    let kind = get_str("command").unwrap_or_else(|| {
        if obj.contains_key("results") {
            "arcs".into()
        } else if obj.contains_key("checks") {
            "verify".into()
        } else {
            "json".into()
        }
    });
    let entries = ["results", "checks", "inputs"]
        .iter()
        .find_map(|k| obj.get(*k).and_then(Value::as_array).map(Vec::len))
        .unwrap_or(0);
    Ok(InputSummary {
        path: path_display(path),
        kind,
        artifact_version: get_str("artifact_version"),
        params_digest: get_str("params_digest"),
        entries,
    })
}

fn summarize_csv(path: &PathBuf, bytes: &[u8]) -> Result<InputSummary> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(bytes);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Config(format!("{}: bad CSV header: {e}", path.display())))?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (dig_col, ver_col) = (col("params_digest"), col("artifact_version"));
    if dig_col.is_none() || ver_col.is_none() {
        return Err(Error::Config(format!(
            "{}: not a recognized artifact (missing params_digest/artifact_version columns)",
            path.display()
        )));
    }
    let kind = if col("p1").is_some() {
        "solve"
    } else if col("normalized_mass").is_some() {
        "scan"
    } else if col("alpha").is_some() {
        "sums"
    } else {
        "csv"
    };

    let mut entries = 0usize;
    let mut digest = None;
    let mut version = None;
    let mut digests_seen: Vec<String> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Config(format!("{}: bad CSV row: {e}", path.display())))?;
        entries += 1;
        if let Some(d) = dig_col.and_then(|i| rec.get(i)) {
            if !digests_seen.iter().any(|s| s == d) {
                digests_seen.push(d.to_string());
            }
            digest.get_or_insert_with(|| d.to_string());
        }
        if version.is_none() {
            version = ver_col.and_then(|i| rec.get(i)).map(str::to_string);
        }
    }
    if digests_seen.len() > 1 {
        return Err(Error::Config(format!(
            "{}: rows carry {} different parameter digests",
            path.display(),
            digests_seen.len()
        )));
    }
    Ok(InputSummary {
        path: path_display(path),
        kind: kind.to_string(),
        artifact_version: version,
        params_digest: digest,
        entries,
    })
}
