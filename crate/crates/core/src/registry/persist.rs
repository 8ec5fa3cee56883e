//! The registry document: one UTF-8 JSON object with `schema_version`,
//! `tools`, `retired`, `change_requests` and `audit`. Classifications are
//! stored as canonical descriptor strings.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use serde_path_to_error::Segment;
use thiserror::Error;

use super::model::{AuditEntry, ChangeRequest, ToolRecord};
use super::workflow::Registry;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error("schema error at `{path}`: {reason}")]
    Schema { path: String, reason: String },
    #[error("record `{record_id}` has an unparsable classification `{text}`: {reason}")]
    Classification {
        record_id: String,
        text: String,
        reason: String,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    schema_version: u32,
    #[serde(default)]
    tools: Vec<ToolRecord>,
    #[serde(default)]
    retired: Vec<ToolRecord>,
    #[serde(default)]
    change_requests: Vec<ChangeRequest>,
    #[serde(default)]
    audit: Vec<AuditEntry>,
}

pub fn load_registry(document: &str) -> Result<Registry, LoadError> {
    let value: Value = serde_json::from_str(document).map_err(|e| LoadError::Schema {
        path: String::new(),
        reason: e.to_string(),
    })?;
    let doc: Document =
        serde_path_to_error::deserialize(&value).map_err(|e| classify_error(&value, e))?;

    if doc.schema_version != SCHEMA_VERSION {
        return Err(LoadError::Schema {
            path: "schema_version".into(),
            reason: format!(
                "unsupported version {}, expected {SCHEMA_VERSION}",
                doc.schema_version
            ),
        });
    }

    let mut tools = BTreeMap::new();
    for (i, record) in doc.tools.into_iter().enumerate() {
        if tools.contains_key(&record.id) {
            return Err(LoadError::Schema {
                path: format!("tools[{i}].id"),
                reason: format!("duplicate tool id `{}`", record.id),
            });
        }
        tools.insert(record.id.clone(), record);
    }

    let mut seen = HashSet::new();
    for (i, cr) in doc.change_requests.iter().enumerate() {
        if !seen.insert(cr.id.as_str()) {
            return Err(LoadError::Schema {
                path: format!("change_requests[{i}].id"),
                reason: format!("duplicate change request id `{}`", cr.id),
            });
        }
    }

    Ok(Registry {
        tools,
        retired: doc.retired,
        change_requests: doc.change_requests,
        audit: doc.audit,
    })
}

/// Turns a deserialization failure into a schema error, or a classification
/// error when it was a descriptor string that failed to parse.
fn classify_error(root: &Value, err: serde_path_to_error::Error<serde_json::Error>) -> LoadError {
    let path = err.path().to_string();
    let reason = err.inner().to_string();
    let segments: Vec<&Segment> = err.path().iter().collect();

    if let Some(Segment::Map { key }) = segments.last() {
        if key == "classification" {
            let mut node = root;
            let mut record = None;
            let mut parent_key = "";
            for seg in &segments {
                node = match seg {
                    Segment::Seq { index } => &node[*index],
                    Segment::Map { key } => &node[key.as_str()],
                    _ => &Value::Null,
                };
                match seg {
                    Segment::Seq { .. } if parent_key == "tools" || parent_key == "retired" => {
                        record = Some(node)
                    }
                    Segment::Map { key } if key == "payload" => record = Some(node),
                    _ => {}
                }
                parent_key = match seg {
                    Segment::Map { key } => key.as_str(),
                    _ => "",
                };
            }
            if let Value::String(text) = node {
                let record_id = record
                    .and_then(|r| r.get("id"))
                    .and_then(Value::as_str)
                    .unwrap_or_default()
                    .to_owned();
                return LoadError::Classification {
                    record_id,
                    text: text.clone(),
                    reason,
                };
            }
        }
    }
    LoadError::Schema { path, reason }
}

/// Canonical document text: sorted keys, two-space indentation, trailing
/// newline. Equal registries always produce identical bytes.
pub fn save_registry(registry: &Registry) -> String {
    let doc = Document {
        schema_version: SCHEMA_VERSION,
        tools: registry.tools.values().cloned().collect(),
        retired: registry.retired.clone(),
        change_requests: registry.change_requests.clone(),
        audit: registry.audit.clone(),
    };
    // Going through Value sorts object keys.
    let value = serde_json::to_value(&doc).expect("registry documents always serialize");
    let mut text = serde_json::to_string_pretty(&value).expect("values always serialize");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document() {
        let reg = load_registry(r#"{"schema_version": 1, "tools": [], "retired": [], "change_requests": [], "audit": []}"#).unwrap();
        assert!(reg.is_empty());
        assert_eq!(load_registry(r#"{"schema_version": 1}"#).unwrap(), reg);
    }

    #[test]
    fn canonical_empty_save() {
        assert_eq!(
            save_registry(&Registry::new()),
            "{\n  \"audit\": [],\n  \"change_requests\": [],\n  \"retired\": [],\n  \"schema_version\": 1,\n  \"tools\": []\n}\n"
        );
    }

    #[test]
    fn duplicate_ids_rejected() {
        let doc = r#"{"schema_version": 1, "tools": [
            {"id": "x", "name": "A", "purpose": "p", "cj_stages": [1]},
            {"id": "x", "name": "B", "purpose": "p", "cj_stages": [2]}
        ]}"#;
        assert_eq!(
            load_registry(doc),
            Err(LoadError::Schema {
                path: "tools[1].id".into(),
                reason: "duplicate tool id `x`".into()
            })
        );
    }

    #[test]
    fn bad_classification_names_the_record() {
        let doc = r#"{"schema_version": 1, "tools": [
            {"id": "ok", "name": "A", "purpose": "p", "cj_stages": [1]},
            {"id": "broken", "name": "B", "purpose": "p", "cj_stages": [2],
             "capabilities": [{"classification": "Analysis (text ->", "description": ""}]}
        ]}"#;
        match load_registry(doc) {
            Err(LoadError::Classification {
                record_id, text, ..
            }) => {
                assert_eq!(record_id, "broken");
                assert_eq!(text, "Analysis (text ->");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn schema_errors_carry_a_path() {
        let doc = r#"{"schema_version": 1, "tools": [
            {"id": "a", "name": "A", "purpose": "p", "development_type": "government"}
        ]}"#;
        match load_registry(doc) {
            Err(LoadError::Schema { path, .. }) => assert_eq!(path, "tools[0].development_type"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(load_registry("{"), Err(LoadError::Schema { .. })));
        assert!(
            matches!(load_registry(r#"{"schema_version": 2}"#), Err(LoadError::Schema { path, .. }) if path == "schema_version")
        );
        assert!(matches!(
            load_registry(r#"{"schema_version": 1, "extra": 1}"#),
            Err(LoadError::Schema { .. })
        ));
        assert!(matches!(
            load_registry(r#"{"tools": []}"#),
            Err(LoadError::Schema { .. })
        ));
    }

    #[test]
    fn save_is_canonical_across_input_spellings() {
        let doc = r#"{"tools": [{"purpose": "p", "name": "A", "id": "a", "cj_stages": [3, 1],
            "capabilities": [{"classification": "analysis(audio→text)"}]}], "schema_version": 1}"#;
        let reg = load_registry(doc).unwrap();
        let saved = save_registry(&reg);
        assert!(saved.contains("\"classification\": \"Analysis (audio -> text)\""));
        assert_eq!(load_registry(&saved).unwrap(), reg);
        assert_eq!(save_registry(&load_registry(&saved).unwrap()), saved);
    }
}
