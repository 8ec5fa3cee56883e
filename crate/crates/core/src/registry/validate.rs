use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use super::model::{is_valid_stage, ToolRecord};
use crate::taxonomy::validate_structure;

/// List nesting beyond this depth draws a warning.
pub const MAX_QUIET_DEPTH: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub severity: Severity,
    pub field: String,
    pub message: String,
}

impl Issue {
    fn error(field: impl Into<String>, message: impl Into<String>) -> Self {
        Issue {
            severity: Severity::Error,
            field: field.into(),
            message: message.into(),
        }
    }

    fn warning(field: impl Into<String>, message: impl Into<String>) -> Self {
        Issue {
            severity: Severity::Warning,
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{level}: {}: {}", self.field, self.message)
    }
}

pub fn is_slug(id: &str) -> bool {
    !id.is_empty()
        && id
            .bytes()
            .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'-')
}

/// Record-level checks. Registry-wide checks (id uniqueness) live with the
/// registry itself.
pub fn validate_record(r: &ToolRecord) -> Vec<Issue> {
    let mut issues = Vec::new();

    if !is_slug(&r.id) {
        issues.push(Issue::error("id", "must be non-empty and match [a-z0-9-]+"));
    }
    if r.name.trim().is_empty() {
        issues.push(Issue::error("name", "must not be empty"));
    }
    if r.purpose.trim().is_empty() {
        issues.push(Issue::error("purpose", "must not be empty"));
    }

    if r.cj_stages.is_empty() {
        issues.push(Issue::error(
            "cj_stages",
            "at least one CJ stage is required",
        ));
    }
    for stage in r.cj_stages.iter().filter(|s| !is_valid_stage(**s)) {
        issues.push(Issue::error(
            "cj_stages",
            format!("stage {stage} is outside 1..8"),
        ));
    }

    if r.users.is_empty() {
        issues.push(Issue::warning(
            "users",
            "no known users; deployment stage will be unknown",
        ));
    }
    let mut seen = HashSet::new();
    for (i, user) in r.users.iter().enumerate() {
        let org = user.organization.trim();
        if org.is_empty() {
            issues.push(Issue::error(
                format!("users[{i}].organization"),
                "must not be empty",
            ));
        } else if !seen.insert(org.to_owned()) {
            issues.push(Issue::error(
                format!("users[{i}].organization"),
                format!("duplicate organization `{org}`"),
            ));
        }
    }

    if r.capabilities.is_empty() {
        issues.push(Issue::warning(
            "capabilities",
            "no classification descriptors",
        ));
    }
    for (i, cap) in r.capabilities.iter().enumerate() {
        let field = format!("capabilities[{i}].classification");
        if let Err(e) = validate_structure(&cap.classification) {
            issues.push(Issue::error(field, e.to_string()));
            continue;
        }
        let depth = cap.classification.depth();
        if depth > MAX_QUIET_DEPTH {
            issues.push(Issue::warning(
                field,
                format!("list nesting depth {depth} exceeds {MAX_QUIET_DEPTH}"),
            ));
        }
    }

    for (i, resource) in r.resources.iter().enumerate() {
        if url::Url::parse(resource).is_err() {
            issues.push(Issue::error(
                format!("resources[{i}]"),
                format!("`{resource}` is not an absolute URL"),
            ));
        }
    }

    issues
}

pub fn has_errors(issues: &[Issue]) -> bool {
    issues.iter().any(Issue::is_error)
}
