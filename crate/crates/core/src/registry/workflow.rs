use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use serde::Deserialize;
use thiserror::Error;

use super::model::{AuditEntry, ChangeKind, ChangeRequest, ChangeStatus, ToolRecord};
use super::validate::{has_errors, validate_record, Issue};

/// The registry: live tools keyed by id, retired tools, moderation queue and
/// audit log.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Registry {
    pub(crate) tools: BTreeMap<String, ToolRecord>,
    pub(crate) retired: Vec<ToolRecord>,
    pub(crate) change_requests: Vec<ChangeRequest>,
    pub(crate) audit: Vec<AuditEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChangeError {
    #[error("record has validation errors")]
    Invalid(Vec<Issue>),
    #[error("{0:?} requests need a target_id")]
    MissingTarget(ChangeKind),
    #[error("add requests must not carry a target_id")]
    UnexpectedTarget,
    #[error("{0:?} requests need a payload record")]
    MissingPayload(ChangeKind),
    #[error("retire requests must not carry a payload")]
    UnexpectedPayload,
    #[error("payload id `{payload}` does not match target `{target}`")]
    TargetMismatch { target: String, payload: String },
    #[error("no change request with id `{0}`")]
    UnknownChangeRequest(String),
    #[error("change request `{id}` is already {status}")]
    NotPending { id: String, status: ChangeStatus },
    #[error("a tool with id `{0}` already exists")]
    CollisionOnApprove(String),
    #[error("no tool with id `{0}`")]
    UnknownTarget(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Approve,
    Reject,
}

/// A change request as submitted, before it gets an id and status.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewChangeRequest {
    pub kind: ChangeKind,
    #[serde(default)]
    pub target_id: Option<String>,
    #[serde(default)]
    pub payload: Option<ToolRecord>,
    #[serde(default)]
    pub rationale: String,
    #[serde(default)]
    pub submitter: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("duplicate tool id `{0}`")]
pub struct DuplicateId(pub String);

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Live tools in id order.
    pub fn tools(&self) -> impl Iterator<Item = &ToolRecord> + '_ {
        self.tools.values()
    }

    pub fn tool(&self, id: &str) -> Option<&ToolRecord> {
        self.tools.get(id)
    }

    pub fn len(&self) -> usize {
        self.tools.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tools.is_empty()
    }

    pub fn retired(&self) -> &[ToolRecord] {
        &self.retired
    }

    pub fn change_requests(&self) -> &[ChangeRequest] {
        &self.change_requests
    }

    pub fn change_request(&self, id: &str) -> Option<&ChangeRequest> {
        self.change_requests.iter().find(|cr| cr.id == id)
    }

    pub fn audit(&self) -> &[AuditEntry] {
        &self.audit
    }

    /// Inserts a record directly, bypassing moderation. Used for seeding.
    pub fn insert(&mut self, record: ToolRecord) -> Result<(), DuplicateId> {
        if self.tools.contains_key(&record.id) {
            return Err(DuplicateId(record.id));
        }
        self.tools.insert(record.id.clone(), record);
        Ok(())
    }

    fn is_known_id(&self, id: &str) -> bool {
        self.tools.contains_key(id) || self.retired.iter().any(|r| r.id == id)
    }

    fn next_change_request_id(&self) -> String {
        let mut n = self.change_requests.len() + 1;
        loop {
            let id = format!("cr-{n:04}");
            if self.change_request(&id).is_none() {
                return id;
            }
            n += 1;
        }
    }

    /// Queues a change request as pending and returns its id. Add and update
    /// payloads must pass [`validate_record`] without errors; update and
    /// retire targets must name a live or retired record.
    pub fn submit_change_request(
        &mut self,
        request: NewChangeRequest,
        now: DateTime<Utc>,
    ) -> Result<String, ChangeError> {
        let NewChangeRequest {
            kind,
            target_id,
            payload,
            rationale,
            submitter,
        } = request;

        match (kind, &target_id, &payload) {
            (ChangeKind::Add, Some(_), _) => return Err(ChangeError::UnexpectedTarget),
            (ChangeKind::Update | ChangeKind::Retire, None, _) => {
                return Err(ChangeError::MissingTarget(kind))
            }
            (ChangeKind::Add | ChangeKind::Update, _, None) => {
                return Err(ChangeError::MissingPayload(kind))
            }
            (ChangeKind::Retire, _, Some(_)) => return Err(ChangeError::UnexpectedPayload),
            _ => {}
        }
        if let Some(record) = &payload {
            let issues = validate_record(record);
            if has_errors(&issues) {
                return Err(ChangeError::Invalid(issues));
            }
        }
        if let Some(target) = &target_id {
            if !self.is_known_id(target) {
                return Err(ChangeError::UnknownTarget(target.clone()));
            }
            if let Some(record) = &payload {
                if &record.id != target {
                    return Err(ChangeError::TargetMismatch {
                        target: target.clone(),
                        payload: record.id.clone(),
                    });
                }
            }
        }

        let id = self.next_change_request_id();
        self.change_requests.push(ChangeRequest {
            id: id.clone(),
            kind,
            target_id,
            payload,
            rationale,
            submitter,
            submitted_at: now,
            status: ChangeStatus::Pending,
            reviewer_note: String::new(),
        });
        Ok(id)
    }

    /// Approves or rejects a pending request. Approval applies the change,
    /// marks the request and appends one audit entry, or fails without
    /// touching anything.
    pub fn review_change_request(
        &mut self,
        id: &str,
        decision: Decision,
        reviewer: &str,
        note: &str,
        now: DateTime<Utc>,
    ) -> Result<ChangeRequest, ChangeError> {
        let index = self
            .change_requests
            .iter()
            .position(|cr| cr.id == id)
            .ok_or_else(|| ChangeError::UnknownChangeRequest(id.to_owned()))?;
        let request = &self.change_requests[index];
        if request.status != ChangeStatus::Pending {
            return Err(ChangeError::NotPending {
                id: id.to_owned(),
                status: request.status,
            });
        }

        let action = match decision {
            Decision::Reject => "reject".to_owned(),
            Decision::Approve => {
                self.apply(index)?;
                format!("approve {}", kind_name(self.change_requests[index].kind))
            }
        };

        let request = &mut self.change_requests[index];
        request.status = match decision {
            Decision::Approve => ChangeStatus::Approved,
            Decision::Reject => ChangeStatus::Rejected,
        };
        request.reviewer_note = note.to_owned();
        self.audit.push(AuditEntry {
            timestamp: now,
            actor: reviewer.to_owned(),
            action,
            change_request_id: id.to_owned(),
        });
        Ok(self.change_requests[index].clone())
    }

    /// Applies the payload of request `index`. Every precondition is checked
    /// before the first write.
    fn apply(&mut self, index: usize) -> Result<(), ChangeError> {
        let request = &self.change_requests[index];
        match request.kind {
            ChangeKind::Add => {
                let record = request
                    .payload
                    .clone()
                    .ok_or(ChangeError::MissingPayload(ChangeKind::Add))?;
                if self.tools.contains_key(&record.id) {
                    return Err(ChangeError::CollisionOnApprove(record.id));
                }
                self.tools.insert(record.id.clone(), record);
            }
            ChangeKind::Update => {
                let target = request
                    .target_id
                    .clone()
                    .ok_or(ChangeError::MissingTarget(ChangeKind::Update))?;
                let record = request
                    .payload
                    .clone()
                    .ok_or(ChangeError::MissingPayload(ChangeKind::Update))?;
                match self.tools.get_mut(&target) {
                    Some(slot) => *slot = record,
                    None => return Err(ChangeError::UnknownTarget(target)),
                }
            }
            ChangeKind::Retire => {
                let target = request
                    .target_id
                    .clone()
                    .ok_or(ChangeError::MissingTarget(ChangeKind::Retire))?;
                match self.tools.remove(&target) {
                    Some(record) => self.retired.push(record),
                    None => return Err(ChangeError::UnknownTarget(target)),
                }
            }
        }
        Ok(())
    }
}

fn kind_name(kind: ChangeKind) -> &'static str {
    match kind {
        ChangeKind::Add => "add",
        ChangeKind::Update => "update",
        ChangeKind::Retire => "retire",
    }
}
