use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::taxonomy::{parse_classification, Classification};

/// Stage names for CJ stages 1 through 8.
pub const CJ_STAGES: [&str; 8] = [
    "Community Policing and Offender Management",
    "Intelligence",
    "Investigation",
    "Charging Decision or Alternative Disposal",
    "Trial or Guilty Plea",
    "Sentencing",
    "Prison and Parole",
    "Probation",
];

pub fn is_valid_stage(stage: u8) -> bool {
    (1..=8).contains(&stage)
}

/// How far a tool has progressed with one user. Ordered by advancement:
/// `StageUnknown < Experimental < Trialled < Deployed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeploymentStage {
    Deployed,
    Trialled,
    Experimental,
    StageUnknown,
}

impl DeploymentStage {
    /// Table order: most advanced first.
    pub const ALL: [DeploymentStage; 4] = [
        DeploymentStage::Deployed,
        DeploymentStage::Trialled,
        DeploymentStage::Experimental,
        DeploymentStage::StageUnknown,
    ];

    fn advancement(self) -> u8 {
        match self {
            DeploymentStage::StageUnknown => 0,
            DeploymentStage::Experimental => 1,
            DeploymentStage::Trialled => 2,
            DeploymentStage::Deployed => 3,
        }
    }

    pub fn slug(self) -> &'static str {
        match self {
            DeploymentStage::Deployed => "deployed",
            DeploymentStage::Trialled => "trialled",
            DeploymentStage::Experimental => "experimental",
            DeploymentStage::StageUnknown => "stage_unknown",
        }
    }

    pub fn from_slug(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|d| d.slug() == s)
    }

    pub fn label(self) -> &'static str {
        match self {
            DeploymentStage::Deployed => "Deployed",
            DeploymentStage::Trialled => "Trialled",
            DeploymentStage::Experimental => "Experimental",
            DeploymentStage::StageUnknown => "Stage Unknown",
        }
    }
}

impl Ord for DeploymentStage {
    fn cmp(&self, other: &Self) -> Ordering {
        self.advancement().cmp(&other.advancement())
    }
}

impl PartialOrd for DeploymentStage {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DeploymentStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum DevelopmentType {
    ThirdParty,
    InHouse,
    Academic,
    #[default]
    Unknown,
}

impl DevelopmentType {
    pub const ALL: [DevelopmentType; 4] = [
        DevelopmentType::ThirdParty,
        DevelopmentType::InHouse,
        DevelopmentType::Academic,
        DevelopmentType::Unknown,
    ];

    pub fn slug(self) -> &'static str {
        match self {
            DevelopmentType::ThirdParty => "third_party",
            DevelopmentType::InHouse => "in_house",
            DevelopmentType::Academic => "academic",
            DevelopmentType::Unknown => "unknown",
        }
    }

    pub fn from_slug(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|d| d.slug() == s)
    }
}

impl fmt::Display for DevelopmentType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserDeployment {
    pub organization: String,
    pub stage: DeploymentStage,
}

/// One descriptor attached to a tool, with what it does in that mode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Capability {
    #[serde(with = "classification_text")]
    pub classification: Classification,
    #[serde(default)]
    pub description: String,
}

impl Capability {
    pub fn new(classification: Classification, description: impl Into<String>) -> Self {
        Capability {
            classification,
            description: description.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToolRecord {
    pub id: String,
    pub name: String,
    pub purpose: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub users: Vec<UserDeployment>,
    #[serde(default)]
    pub development_type: DevelopmentType,
    #[serde(default)]
    pub developers: Vec<String>,
    #[serde(default)]
    pub cj_stages: BTreeSet<u8>,
    #[serde(default)]
    pub capabilities: Vec<Capability>,
    #[serde(default)]
    pub resources: Vec<String>,
}

impl ToolRecord {
    /// A record with only the required fields filled in.
    pub fn new(id: &str, name: &str, purpose: &str) -> Self {
        ToolRecord {
            id: id.to_owned(),
            name: name.to_owned(),
            purpose: purpose.to_owned(),
            description: String::new(),
            users: Vec::new(),
            development_type: DevelopmentType::Unknown,
            developers: Vec::new(),
            cj_stages: BTreeSet::new(),
            capabilities: Vec::new(),
            resources: Vec::new(),
        }
    }

    /// Most advanced stage over all users; `StageUnknown` when there are none.
    pub fn overall_deployment(&self) -> DeploymentStage {
        overall_deployment(self)
    }

    pub fn uses_inference(&self, mode: crate::taxonomy::InferenceMode) -> bool {
        self.capabilities
            .iter()
            .any(|c| c.classification.inference == mode)
    }
}

pub fn overall_deployment(record: &ToolRecord) -> DeploymentStage {
    record
        .users
        .iter()
        .map(|u| u.stage)
        .max()
        .unwrap_or(DeploymentStage::StageUnknown)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChangeKind {
    Add,
    Update,
    Retire,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChangeStatus {
    Pending,
    Approved,
    Rejected,
}

impl ChangeStatus {
    pub fn from_slug(s: &str) -> Option<Self> {
        match s {
            "pending" => Some(ChangeStatus::Pending),
            "approved" => Some(ChangeStatus::Approved),
            "rejected" => Some(ChangeStatus::Rejected),
            _ => None,
        }
    }
}

impl fmt::Display for ChangeStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChangeStatus::Pending => "pending",
            ChangeStatus::Approved => "approved",
            ChangeStatus::Rejected => "rejected",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChangeRequest {
    pub id: String,
    pub kind: ChangeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload: Option<ToolRecord>,
    pub rationale: String,
    pub submitter: String,
    #[serde(with = "rfc3339")]
    pub submitted_at: DateTime<Utc>,
    pub status: ChangeStatus,
    #[serde(default)]
    pub reviewer_note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditEntry {
    #[serde(with = "rfc3339")]
    pub timestamp: DateTime<Utc>,
    pub actor: String,
    pub action: String,
    pub change_request_id: String,
}

pub(crate) mod classification_text {
    use super::*;

    pub fn serialize<S: Serializer>(c: &Classification, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(c)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Classification, D::Error> {
        let text = String::deserialize(d)?;
        parse_classification(&text).map_err(serde::de::Error::custom)
    }
}

/// RFC 3339 in UTC with a `Z` suffix and only as many fractional digits as needed.
pub(crate) mod rfc3339 {
    use chrono::SecondsFormat;

    use super::*;

    pub fn serialize<S: Serializer>(t: &DateTime<Utc>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&t.to_rfc3339_opts(SecondsFormat::AutoSi, true))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DateTime<Utc>, D::Error> {
        let text = String::deserialize(d)?;
        DateTime::parse_from_rfc3339(&text)
            .map(|t| t.with_timezone(&Utc))
            .map_err(serde::de::Error::custom)
    }
}
