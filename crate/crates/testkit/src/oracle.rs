//! Brute-force reference computations. None of these call into the library's
//! normalizer, matcher or analytics.

use atlas_core::registry::{DeploymentStage, DevelopmentType, Registry, ToolRecord};
use atlas_core::taxonomy::{
    Classification, InferenceMode, Mode, ModeProduct, PrimitiveKind, ProductElement, RepeatCount,
};

/// Oracle view of one expanded product element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Leaf {
    Prim(PrimitiveKind),
    Alias(String),
    List(Vec<Leaf>),
    /// `mode^n`; only at the top level of inputs.
    Many(Box<Leaf>),
    Any,
}

/// Expands literal exponents by copying, recursively.
pub fn expand(product: &ModeProduct) -> Vec<Leaf> {
    let mut out = Vec::new();
    for element in product.elements() {
        match element {
            ProductElement::Single(m) => out.push(leaf(m)),
            ProductElement::Repeat(m, RepeatCount::Literal(k)) => {
                for _ in 0..*k {
                    out.push(leaf(m));
                }
            }
            ProductElement::Repeat(m, RepeatCount::Symbolic(_)) => {
                out.push(Leaf::Many(Box::new(leaf(m))))
            }
            ProductElement::Wildcard => out.push(Leaf::Any),
        }
    }
    out
}

fn leaf(mode: &Mode) -> Leaf {
    match mode {
        Mode::Primitive(k) => Leaf::Prim(*k),
        Mode::EnumAlias(a) => Leaf::Alias(a.to_lowercase()),
        Mode::ListOf(p) => Leaf::List(expand(p)),
    }
}

/// Can a produced `value` fill a slot declared as `slot`?
pub fn fits(value: &Leaf, slot: &Leaf) -> bool {
    match slot {
        Leaf::Any => true,
        Leaf::Many(inner) => fits(value, inner),
        Leaf::Prim(PrimitiveKind::Enum) => {
            matches!(value, Leaf::Prim(PrimitiveKind::Enum) | Leaf::Alias(_))
        }
        Leaf::Prim(k) => *value == Leaf::Prim(*k),
        Leaf::Alias(a) => matches!(value, Leaf::Alias(b) if a == b),
        Leaf::List(slots) => match value {
            Leaf::List(values) => {
                values.len() == slots.len() && values.iter().zip(slots).all(|(v, s)| fits(v, s))
            }
            _ => false,
        },
    }
}

pub fn mode_fits(producer: &Mode, consumer: &Mode) -> bool {
    fits(&leaf(producer), &leaf(consumer))
}

/// Tries every map from producer outputs to consumer inputs and reports
/// whether one is valid: each output fits its slot and no plain slot is used
/// twice (`mode^n` and `...` slots take any number).
pub fn exists_assignment(producer: &Classification, consumer: &Classification) -> bool {
    let outputs = expand(&producer.outputs);
    let slots = expand(&consumer.inputs);
    let mut choice = vec![0usize; outputs.len()];
    if outputs.is_empty() {
        return true;
    }
    if slots.is_empty() {
        return false;
    }
    loop {
        let mut used = vec![false; slots.len()];
        let valid = outputs.iter().zip(&choice).all(|(o, &j)| {
            let shared = matches!(slots[j], Leaf::Many(_) | Leaf::Any);
            let ok = fits(o, &slots[j]) && (shared || !used[j]);
            used[j] = true;
            ok
        });
        if valid {
            return true;
        }
        // Next assignment in base-|slots| counting order.
        let mut pos = 0;
        loop {
            if pos == choice.len() {
                return false;
            }
            choice[pos] += 1;
            if choice[pos] < slots.len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

fn deployment(tool: &ToolRecord) -> DeploymentStage {
    // Most advanced stage present, checked in order.
    for stage in [
        DeploymentStage::Deployed,
        DeploymentStage::Trialled,
        DeploymentStage::Experimental,
    ] {
        if tool.users.iter().any(|u| u.stage == stage) {
            return stage;
        }
    }
    DeploymentStage::StageUnknown
}

fn uses(tool: &ToolRecord, mode: InferenceMode) -> bool {
    tool.capabilities
        .iter()
        .any(|c| c.classification.inference == mode)
}

/// `[total, analysis, synthesis, generation, deployed, trialled, experimental, stage_unknown]`
/// for each stage 1..=8.
pub fn recount_stage_table(registry: &Registry) -> Vec<[u32; 8]> {
    let mut rows = Vec::new();
    for stage in 1..=8u8 {
        let mut row = [0u32; 8];
        for tool in registry.tools() {
            if !tool.cj_stages.contains(&stage) {
                continue;
            }
            row[0] += 1;
            for (k, mode) in InferenceMode::ALL.iter().enumerate() {
                if uses(tool, *mode) {
                    row[1 + k] += 1;
                }
            }
            let d = deployment(tool);
            for (k, stage) in DeploymentStage::ALL.iter().enumerate() {
                if d == *stage {
                    row[4 + k] += 1;
                }
            }
        }
        rows.push(row);
    }
    rows
}

/// Reference rounding through floating point.
pub fn percent(count: usize, total: usize) -> u32 {
    (100.0 * count as f64 / total as f64 + 0.5).floor() as u32
}

/// (development, deployment, inference) shares in the categories' `ALL` order.
pub fn recount_shares(registry: &Registry) -> (Vec<u32>, Vec<u32>, Vec<u32>) {
    let tools: Vec<&ToolRecord> = registry.tools().collect();
    let n = tools.len();
    let dev = DevelopmentType::ALL
        .iter()
        .map(|d| percent(tools.iter().filter(|t| t.development_type == *d).count(), n))
        .collect();
    let dep = DeploymentStage::ALL
        .iter()
        .map(|d| percent(tools.iter().filter(|t| deployment(t) == *d).count(), n))
        .collect();
    let inf = InferenceMode::ALL
        .iter()
        .map(|m| percent(tools.iter().filter(|t| uses(t, *m)).count(), n))
        .collect();
    (dev, dep, inf)
}

/// The only count in `0..=total` whose share rounds to `percent_value`, if unique.
pub fn unique_count_for(percent_value: u32, total: usize) -> Option<usize> {
    let hits: Vec<usize> = (0..=total)
        .filter(|c| percent(*c, total) == percent_value)
        .collect();
    match hits.as_slice() {
        [one] => Some(*one),
        _ => None,
    }
}
