use std::collections::BTreeSet;

use atlas_core::registry::{is_valid_stage, DeploymentStage, DevelopmentType, ToolRecord};
use atlas_core::taxonomy::InferenceMode;
use thiserror::Error;

/// Conjunctive query over tool records. `None` means "no constraint"; an
/// empty filter matches every tool.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ToolFilter {
    pub stages: Option<BTreeSet<u8>>,
    pub inference: Option<BTreeSet<InferenceMode>>,
    pub deployment: Option<BTreeSet<DeploymentStage>>,
    pub development: Option<BTreeSet<DevelopmentType>>,
    pub query: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FilterError {
    #[error("unknown query parameter `{0}`")]
    UnknownParam(String),
    #[error("invalid value `{value}` for `{param}`")]
    InvalidValue { param: String, value: String },
    #[error("`query` given more than once")]
    RepeatedQuery,
}

impl FilterError {
    pub fn param(&self) -> &str {
        match self {
            FilterError::UnknownParam(p) => p,
            FilterError::InvalidValue { param, .. } => param,
            FilterError::RepeatedQuery => "query",
        }
    }
}

impl ToolFilter {
    /// Parses a URL query string. Set-valued parameters take comma-separated
    /// values and may be repeated; values are case-insensitive.
    pub fn from_query(query: &str) -> Result<Self, FilterError> {
        let mut filter = ToolFilter::default();
        for (key, value) in url::form_urlencoded::parse(query.as_bytes()) {
            let key = key.as_ref();
            match key {
                "stages" => extend(&mut filter.stages, key, &value, |v| {
                    v.parse::<u8>().ok().filter(|s| is_valid_stage(*s))
                })?,
                "inference" => extend(
                    &mut filter.inference,
                    key,
                    &value,
                    InferenceMode::from_keyword,
                )?,
                "deployment" => extend(&mut filter.deployment, key, &value, |v| {
                    DeploymentStage::from_slug(&v.to_ascii_lowercase())
                })?,
                "development" => extend(&mut filter.development, key, &value, |v| {
                    DevelopmentType::from_slug(&v.to_ascii_lowercase())
                })?,
                "query" => {
                    if filter.query.is_some() {
                        return Err(FilterError::RepeatedQuery);
                    }
                    let q = value.trim();
                    if !q.is_empty() {
                        filter.query = Some(q.to_lowercase());
                    }
                }
                _ => return Err(FilterError::UnknownParam(key.to_owned())),
            }
        }
        Ok(filter)
    }

    pub fn matches(&self, tool: &ToolRecord) -> bool {
        if let Some(stages) = &self.stages {
            if !stages.iter().any(|s| tool.cj_stages.contains(s)) {
                return false;
            }
        }
        if let Some(modes) = &self.inference {
            if !modes.iter().any(|m| tool.uses_inference(*m)) {
                return false;
            }
        }
        if let Some(deployments) = &self.deployment {
            if !deployments.contains(&tool.overall_deployment()) {
                return false;
            }
        }
        if let Some(types) = &self.development {
            if !types.contains(&tool.development_type) {
                return false;
            }
        }
        if let Some(q) = &self.query {
            let hit = [&tool.name, &tool.purpose, &tool.description]
                .iter()
                .any(|field| field.to_lowercase().contains(q.as_str()));
            if !hit {
                return false;
            }
        }
        true
    }
}

fn extend<T: Ord>(
    slot: &mut Option<BTreeSet<T>>,
    param: &str,
    raw: &str,
    parse: impl Fn(&str) -> Option<T>,
) -> Result<(), FilterError> {
    let set = slot.get_or_insert_with(BTreeSet::new);
    for part in raw.split(',') {
        let part = part.trim();
        let value = parse(part).ok_or_else(|| FilterError::InvalidValue {
            param: param.to_owned(),
            value: part.to_owned(),
        })?;
        set.insert(value);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_query_is_empty_filter() {
        assert_eq!(ToolFilter::from_query("").unwrap(), ToolFilter::default());
    }

    #[test]
    fn comma_and_repeat_accumulate() {
        let f = ToolFilter::from_query("stages=1,3&stages=8&inference=Generation").unwrap();
        assert_eq!(f.stages.unwrap().into_iter().collect::<Vec<_>>(), [1, 3, 8]);
        assert_eq!(
            f.inference.unwrap().into_iter().collect::<Vec<_>>(),
            [InferenceMode::Generation]
        );
    }

    #[test]
    fn rejects_bad_input() {
        for q in [
            "stages=9",
            "stages=0",
            "stages=",
            "inference=guess",
            "deployment=live",
            "colour=red",
            "query=a&query=b",
        ] {
            assert!(ToolFilter::from_query(q).is_err(), "{q}");
        }
    }

    #[test]
    fn query_is_case_insensitive() {
        let f = ToolFilter::from_query("query=FACE%20search").unwrap();
        let mut t = ToolRecord::new("x", "Face Search", "p");
        assert!(f.matches(&t));
        t.name = "Other".into();
        assert!(!f.matches(&t));
    }
}
