//! Tool records, their validation and persistence, and the moderated
//! change-request workflow.

mod model;
mod persist;
mod store;
mod validate;
mod workflow;

pub use model::{
    is_valid_stage, overall_deployment, AuditEntry, Capability, ChangeKind, ChangeRequest,
    ChangeStatus, DeploymentStage, DevelopmentType, ToolRecord, UserDeployment, CJ_STAGES,
};
pub use persist::{load_registry, save_registry, LoadError, SCHEMA_VERSION};
pub use store::{MutateError, RegistryStore, StoreError};
pub use validate::{has_errors, is_slug, validate_record, Issue, Severity, MAX_QUIET_DEPTH};
pub use workflow::{ChangeError, Decision, DuplicateId, NewChangeRequest, Registry};
