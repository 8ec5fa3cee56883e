use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::AnalyticsError;
use crate::registry::{is_valid_stage, DeploymentStage, Registry, CJ_STAGES};

pub const COLUMNS: usize = 5;

/// Box fill for each deployment stage.
pub fn deployment_color(stage: DeploymentStage) -> &'static str {
    match stage {
        DeploymentStage::Deployed => "#2e7d32",
        DeploymentStage::Trialled => "#f9a825",
        DeploymentStage::Experimental => "#ec407a",
        DeploymentStage::StageUnknown => "#9e9e9e",
    }
}

pub const SHADE_COLOR: &str = "#424242";
pub const SHADE_OPACITY: &str = "0.4";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapCell {
    pub tool_id: String,
    pub name: String,
    pub purpose: String,
    pub deployment: DeploymentStage,
    pub descriptors: Vec<String>,
    pub in_stage: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapMatrix {
    pub stage: u8,
    pub cells: Vec<MapCell>,
}

/// Every live tool as one cell; tools used in `stage` first, then by name.
pub fn map_matrix(registry: &Registry, stage: u8) -> Result<MapMatrix, AnalyticsError> {
    if !is_valid_stage(stage) {
        return Err(AnalyticsError::InvalidStage(stage));
    }
    let mut cells: Vec<MapCell> = registry
        .tools()
        .map(|t| MapCell {
            tool_id: t.id.clone(),
            name: t.name.clone(),
            purpose: t.purpose.clone(),
            deployment: t.overall_deployment(),
            descriptors: t
                .capabilities
                .iter()
                .map(|c| c.classification.to_string())
                .collect(),
            in_stage: t.cj_stages.contains(&stage),
        })
        .collect();
    cells.sort_by(|a, b| {
        b.in_stage
            .cmp(&a.in_stage)
            .then_with(|| a.name.cmp(&b.name))
            .then_with(|| a.tool_id.cmp(&b.tool_id))
    });
    Ok(MapMatrix { stage, cells })
}

const RIBBON_WIDTH: usize = 70;
const MARGIN: usize = 12;
const CELL_WIDTH: usize = 230;
const CELL_HEIGHT: usize = 160;
const GAP: usize = 10;
const LINE_CHARS: usize = 34;

/// Renders the matrix as an SVG grid, five boxes per row, with the stage
/// ribbon down the left edge.
pub fn render_map(matrix: &MapMatrix) -> String {
    let rows = matrix.cells.len().div_ceil(COLUMNS).max(1);
    let grid_height = rows * CELL_HEIGHT + (rows - 1) * GAP;
    let ribbon_height = 8 * 44;
    let height = 2 * MARGIN + grid_height.max(ribbon_height);
    let width = 2 * MARGIN + RIBBON_WIDTH + GAP + COLUMNS * CELL_WIDTH + (COLUMNS - 1) * GAP;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(
        svg,
        r#"<title>CJ stage {}: {}</title>"#,
        matrix.stage,
        escape(stage_name(matrix.stage))
    );
    render_ribbon(&mut svg, matrix.stage);

    let grid_x = MARGIN + RIBBON_WIDTH + GAP;
    for (i, cell) in matrix.cells.iter().enumerate() {
        let x = grid_x + (i % COLUMNS) * (CELL_WIDTH + GAP);
        let y = MARGIN + (i / COLUMNS) * (CELL_HEIGHT + GAP);
        render_cell(&mut svg, cell, x, y);
    }
    svg.push_str("</svg>\n");
    svg
}

fn stage_name(stage: u8) -> &'static str {
    CJ_STAGES
        .get(usize::from(stage).wrapping_sub(1))
        .copied()
        .unwrap_or("")
}

fn render_ribbon(svg: &mut String, active: u8) {
    svg.push_str("<g class=\"ribbon\">\n");
    for stage in 1..=8u8 {
        let y = MARGIN + usize::from(stage - 1) * 44;
        let name = escape(stage_name(stage));
        if stage == active {
            let _ = writeln!(
                svg,
                r##"<g class="ribbon-stage active" data-stage="{stage}"><title>{name}</title><rect x="{x}" y="{y}" width="{w}" height="40" fill="#ffffff" stroke="#212121" stroke-width="2"/><text x="{tx}" y="{ty}" font-size="14" font-weight="bold" text-anchor="middle">{stage}</text></g>"##,
                x = MARGIN,
                w = RIBBON_WIDTH,
                tx = MARGIN + RIBBON_WIDTH / 2,
                ty = y + 25,
            );
        } else {
            let _ = writeln!(
                svg,
                r##"<g class="ribbon-stage" data-stage="{stage}"><title>{name}</title><rect x="{x}" y="{ry}" width="{w}" height="32" fill="#bdbdbd"/><text x="{tx}" y="{ty}" font-size="12" text-anchor="middle">{stage}</text></g>"##,
                x = MARGIN + 8,
                ry = y + 4,
                w = RIBBON_WIDTH - 16,
                tx = MARGIN + RIBBON_WIDTH / 2,
                ty = y + 25,
            );
        }
    }
    svg.push_str("</g>\n");
}

fn render_cell(svg: &mut String, cell: &MapCell, x: usize, y: usize) {
    let _ = writeln!(
        svg,
        r#"<g class="cell" data-tool-id="{}" data-deployment="{}" data-in-stage="{}">"#,
        escape(&cell.tool_id),
        cell.deployment.slug(),
        cell.in_stage
    );
    let _ = writeln!(
        svg,
        r##"<rect class="box" x="{x}" y="{y}" width="{CELL_WIDTH}" height="{CELL_HEIGHT}" rx="4" fill="{}" stroke="#616161"/>"##,
        deployment_color(cell.deployment)
    );

    let text_x = x + 8;
    let mut line_y = y + 20;
    let _ = writeln!(
        svg,
        r#"<text class="name" x="{text_x}" y="{line_y}" font-size="13" font-weight="bold">{}</text>"#,
        escape(&truncate(&cell.name, LINE_CHARS - 4))
    );
    line_y += 18;
    for line in wrap(&cell.purpose, LINE_CHARS, 3) {
        let _ = writeln!(
            svg,
            r#"<text class="purpose" x="{text_x}" y="{line_y}" font-size="11">{}</text>"#,
            escape(&line)
        );
        line_y += 14;
    }

    let shown = cell.descriptors.len().min(3);
    let mut desc_y = y + CELL_HEIGHT - 10 - (shown.max(1) - 1) * 13;
    for d in &cell.descriptors[..shown] {
        let _ = writeln!(
            svg,
            r#"<text class="descriptor" x="{text_x}" y="{desc_y}" font-size="10" font-family="monospace">{}</text>"#,
            escape(&truncate(d, LINE_CHARS + 2))
        );
        desc_y += 13;
    }
    if cell.descriptors.len() > shown {
        let _ = writeln!(
            svg,
            r#"<text class="descriptor-more" x="{}" y="{}" font-size="10" text-anchor="end">+{} more</text>"#,
            x + CELL_WIDTH - 6,
            y + 20,
            cell.descriptors.len() - shown
        );
    }

    if !cell.in_stage {
        let _ = writeln!(
            svg,
            r#"<rect class="shade" x="{x}" y="{y}" width="{CELL_WIDTH}" height="{CELL_HEIGHT}" rx="4" fill="{SHADE_COLOR}" fill-opacity="{SHADE_OPACITY}"/>"#
        );
    }
    svg.push_str("</g>\n");
}

fn truncate(text: &str, max: usize) -> String {
    if text.chars().count() <= max {
        text.to_owned()
    } else {
        let mut out: String = text.chars().take(max.saturating_sub(1)).collect();
        out.push('…');
        out
    }
}

fn wrap(text: &str, width: usize, max_lines: usize) -> Vec<String> {
    let mut lines: Vec<String> = Vec::new();
    let mut current = String::new();
    for word in text.split_whitespace() {
        if !current.is_empty() && current.chars().count() + 1 + word.chars().count() > width {
            lines.push(std::mem::take(&mut current));
        }
        if !current.is_empty() {
            current.push(' ');
        }
        current.push_str(word);
    }
    if !current.is_empty() {
        lines.push(current);
    }
    if lines.len() > max_lines {
        lines.truncate(max_lines);
        let last = lines.last_mut().expect("max_lines > 0");
        *last = truncate(&format!("{last} …"), width);
    }
    lines.into_iter().map(|l| truncate(&l, width)).collect()
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            // Not allowed in XML 1.0 documents.
            c if (c as u32) < 0x20 && !matches!(c, '\t' | '\n' | '\r') => out.push('\u{fffd}'),
            c => out.push(c),
        }
    }
    out
}
