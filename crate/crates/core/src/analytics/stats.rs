use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::AnalyticsError;
use crate::registry::{DeploymentStage, DevelopmentType, Registry, ToolRecord};
use crate::taxonomy::InferenceMode;

/// `100 * count / total` rounded to the nearest integer, halves away from zero.
pub fn percentage(count: u64, total: u64) -> Result<u32, AnalyticsError> {
    if total == 0 {
        return Err(AnalyticsError::ZeroTotal);
    }
    if count > total {
        return Err(AnalyticsError::CountExceedsTotal { count, total });
    }
    // floor(100c/t + 1/2) in integers; count <= total keeps the result <= 100.
    Ok(((200 * count + total) / (2 * total)) as u32)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InferenceCounts {
    pub analysis: u32,
    pub synthesis: u32,
    pub generation: u32,
}

impl InferenceCounts {
    pub fn get(&self, mode: InferenceMode) -> u32 {
        match mode {
            InferenceMode::Analysis => self.analysis,
            InferenceMode::Synthesis => self.synthesis,
            InferenceMode::Generation => self.generation,
        }
    }

    fn bump(&mut self, mode: InferenceMode) {
        match mode {
            InferenceMode::Analysis => self.analysis += 1,
            InferenceMode::Synthesis => self.synthesis += 1,
            InferenceMode::Generation => self.generation += 1,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeploymentCounts {
    pub deployed: u32,
    pub trialled: u32,
    pub experimental: u32,
    pub stage_unknown: u32,
}

impl DeploymentCounts {
    pub fn get(&self, stage: DeploymentStage) -> u32 {
        match stage {
            DeploymentStage::Deployed => self.deployed,
            DeploymentStage::Trialled => self.trialled,
            DeploymentStage::Experimental => self.experimental,
            DeploymentStage::StageUnknown => self.stage_unknown,
        }
    }

    fn bump(&mut self, stage: DeploymentStage) {
        match stage {
            DeploymentStage::Deployed => self.deployed += 1,
            DeploymentStage::Trialled => self.trialled += 1,
            DeploymentStage::Experimental => self.experimental += 1,
            DeploymentStage::StageUnknown => self.stage_unknown += 1,
        }
    }

    pub fn sum(&self) -> u32 {
        self.deployed + self.trialled + self.experimental + self.stage_unknown
    }
}

/// One column of the per-stage table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageBreakdown {
    pub stage: u8,
    pub total: u32,
    pub by_inference: InferenceCounts,
    pub by_deployment: DeploymentCounts,
}

impl StageBreakdown {
    fn empty(stage: u8) -> Self {
        StageBreakdown {
            stage,
            total: 0,
            by_inference: InferenceCounts::default(),
            by_deployment: DeploymentCounts::default(),
        }
    }
}

/// Per-stage totals for stages 1..=8. A tool counts once per stage it is used
/// in, once per inference mode it carries in that stage, and once under its
/// overall deployment stage.
pub fn stage_table(registry: &Registry) -> Vec<StageBreakdown> {
    let mut rows: Vec<StageBreakdown> = (1..=8).map(StageBreakdown::empty).collect();
    for tool in registry.tools() {
        let deployment = tool.overall_deployment();
        let modes = inference_modes(tool);
        for &stage in tool.cj_stages.iter().filter(|s| (1..=8).contains(*s)) {
            let row = &mut rows[usize::from(stage - 1)];
            row.total += 1;
            row.by_deployment.bump(deployment);
            for &mode in &modes {
                row.by_inference.bump(mode);
            }
        }
    }
    rows
}

fn inference_modes(tool: &ToolRecord) -> Vec<InferenceMode> {
    InferenceMode::ALL
        .into_iter()
        .filter(|m| tool.uses_inference(*m))
        .collect()
}

pub const STAGE_TABLE_CSV_HEADER: &str =
    "stage,total,analysis,synthesis,generation,deployed,trialled,experimental,stage_unknown";

pub fn stage_table_csv(rows: &[StageBreakdown]) -> String {
    let mut out = String::from(STAGE_TABLE_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.stage,
            r.total,
            r.by_inference.analysis,
            r.by_inference.synthesis,
            r.by_inference.generation,
            r.by_deployment.deployed,
            r.by_deployment.trialled,
            r.by_deployment.experimental,
            r.by_deployment.stage_unknown,
        );
    }
    out
}

/// Stages as columns, categories as rows.
pub fn stage_table_text(rows: &[StageBreakdown]) -> String {
    let mut out = String::new();
    let _ = write!(out, "{:<14}", "");
    for r in rows {
        let _ = write!(out, "{:>9}", format!("Stage {}", r.stage));
    }
    out.push('\n');

    let mut line = |label: &str, value: &dyn Fn(&StageBreakdown) -> u32| {
        let _ = write!(out, "{label:<14}");
        for r in rows {
            let _ = write!(out, "{:>9}", value(r));
        }
        out.push('\n');
    };
    line("Total Number", &|r| r.total);
    for mode in InferenceMode::ALL {
        line(mode.keyword(), &|r| r.by_inference.get(mode));
    }
    for stage in DeploymentStage::ALL {
        line(stage.label(), &|r| r.by_deployment.get(stage));
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub tool_count: u32,
    pub development_shares: BTreeMap<DevelopmentType, u32>,
    pub deployment_shares: BTreeMap<DeploymentStage, u32>,
    /// Tools may use several modes, so these can add up to more than 100.
    pub inference_shares: BTreeMap<InferenceMode, u32>,
}

/// Integer percent shares over the live tools. Every category is present,
/// including those with zero tools.
pub fn summary(registry: &Registry) -> Result<SummaryReport, AnalyticsError> {
    let total = registry.len() as u64;
    if total == 0 {
        return Err(AnalyticsError::ZeroTotal);
    }
    let count =
        |pred: &dyn Fn(&ToolRecord) -> bool| registry.tools().filter(|t| pred(t)).count() as u64;

    let mut report = SummaryReport {
        tool_count: total as u32,
        ..SummaryReport::default()
    };
    for dev in DevelopmentType::ALL {
        let n = count(&|t| t.development_type == dev);
        report.development_shares.insert(dev, percentage(n, total)?);
    }
    for stage in DeploymentStage::ALL {
        let n = count(&|t| t.overall_deployment() == stage);
        report
            .deployment_shares
            .insert(stage, percentage(n, total)?);
    }
    for mode in InferenceMode::ALL {
        let n = count(&|t| t.uses_inference(mode));
        report.inference_shares.insert(mode, percentage(n, total)?);
    }
    Ok(report)
}
