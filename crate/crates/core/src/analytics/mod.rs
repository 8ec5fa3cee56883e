//! Quantitative views over a registry snapshot.

mod map;
mod stats;

use thiserror::Error;

pub use map::{
    deployment_color, map_matrix, render_map, MapCell, MapMatrix, COLUMNS, SHADE_COLOR,
    SHADE_OPACITY,
};
pub use stats::{
    percentage, stage_table, stage_table_csv, stage_table_text, summary, DeploymentCounts,
    InferenceCounts, StageBreakdown, SummaryReport, STAGE_TABLE_CSV_HEADER,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum AnalyticsError {
    #[error("cannot compute a share of zero tools")]
    ZeroTotal,
    #[error("count {count} exceeds total {total}")]
    CountExceedsTotal { count: u64, total: u64 },
    #[error("CJ stage must be between 1 and 8, got {0}")]
    InvalidStage(u8),
}
