use atlas_core::registry::{
    Capability, ChangeKind, Decision, DeploymentStage, DevelopmentType, NewChangeRequest, Registry,
    ToolRecord, UserDeployment,
};
use atlas_core::taxonomy::{
    validate_structure, Classification, InferenceMode, Mode, ModeProduct, PrimitiveKind,
    ProductElement, RepeatCount,
};
use chrono::{DateTime, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::TestRng;

const ALIASES: [&str; 6] = ["bool", "emotion", "name", "index", "speaker", "x_1"];
const SYMBOLS: [&str; 3] = ["n", "m", "k"];

/// Limits for random descriptors.
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    /// Maximum list nesting.
    pub max_depth: usize,
    /// Maximum elements per product, before literal repeats are expanded.
    pub max_width: usize,
    /// Largest literal exponent; below 2 disables repeats.
    pub max_repeat: u32,
    pub symbolic: bool,
    pub wildcard: bool,
    /// Draw leaves from a small pool so that random pairs often line up.
    pub narrow: bool,
}

impl Shape {
    /// Everything the grammar allows, up to depth 3 and width 5.
    pub const FULL: Shape = Shape {
        max_depth: 3,
        max_width: 5,
        max_repeat: 4,
        symbolic: true,
        wildcard: true,
        narrow: false,
    };

    /// Small descriptors for sequencing checks: depth 2, width 6.
    pub const SEQUENCING: Shape = Shape {
        max_depth: 2,
        max_width: 6,
        max_repeat: 2,
        symbolic: true,
        wildcard: true,
        narrow: true,
    };
}

/// A random descriptor that passes structural validation, including the
/// expanded-size limit.
pub fn classification(rng: &mut TestRng, shape: &Shape) -> Classification {
    loop {
        let inference = *InferenceMode::ALL.choose(rng).unwrap();
        let c = Classification::new(
            inference,
            product(rng, shape, 0, true),
            product(rng, shape, 0, false),
        );
        if validate_structure(&c).is_ok() {
            return c;
        }
    }
}

/// A producer/consumer pair whose normalized products have at most
/// `shape.max_width` elements each.
pub fn sequencing_pair(rng: &mut TestRng, shape: &Shape) -> (Classification, Classification) {
    loop {
        let a = classification(rng, shape);
        let b = classification(rng, shape);
        let wide = |p: &ModeProduct| crate::oracle::expand(p).len() > shape.max_width;
        if !wide(&a.outputs) && !wide(&b.inputs) {
            return (a, b);
        }
    }
}

fn product(rng: &mut TestRng, shape: &Shape, depth: usize, inputs: bool) -> ModeProduct {
    let width = rng.gen_range(1..=shape.max_width);
    let top_level_inputs = inputs && depth == 0;
    let mut elements = Vec::with_capacity(width);
    for i in 0..width {
        let last = i + 1 == width;
        if last && top_level_inputs && shape.wildcard && rng.gen_bool(0.2) {
            elements.push(ProductElement::Wildcard);
            break;
        }
        let m = mode(rng, shape, depth);
        let roll: f64 = rng.gen();
        let element = if top_level_inputs && shape.symbolic && roll < 0.12 {
            let sym = SYMBOLS.choose(rng).unwrap();
            ProductElement::Repeat(m, RepeatCount::Symbolic((*sym).to_owned()))
        } else if shape.max_repeat >= 2 && roll > 0.88 {
            ProductElement::Repeat(m, RepeatCount::Literal(rng.gen_range(2..=shape.max_repeat)))
        } else {
            ProductElement::Single(m)
        };
        elements.push(element);
    }
    ModeProduct::new(elements)
}

fn mode(rng: &mut TestRng, shape: &Shape, depth: usize) -> Mode {
    if depth < shape.max_depth && rng.gen_bool(0.2) {
        let inner = Shape {
            max_width: shape.max_width.min(3),
            ..*shape
        };
        return Mode::ListOf(product(rng, &inner, depth + 1, false));
    }
    if shape.narrow {
        let pool = [
            Mode::Primitive(PrimitiveKind::Text),
            Mode::Primitive(PrimitiveKind::Enum),
            Mode::Primitive(PrimitiveKind::Prompt),
            Mode::alias("bool"),
            Mode::alias("index"),
        ];
        return pool.choose(rng).unwrap().clone();
    }
    if rng.gen_bool(0.75) {
        Mode::Primitive(*PrimitiveKind::ALL.choose(rng).unwrap())
    } else {
        Mode::alias(ALIASES.choose(rng).unwrap())
    }
}

/// A registry of up to `max_tools` tools with valid records. With
/// `with_history`, also fills the moderation queue, retired list and audit log.
pub fn registry(rng: &mut TestRng, max_tools: usize, with_history: bool) -> Registry {
    let count = rng.gen_range(0..=max_tools);
    let mut reg = Registry::new();
    for i in 0..count {
        reg.insert(tool(rng, &format!("tool-{i}")))
            .expect("ids are unique");
    }
    if !with_history {
        return reg;
    }

    // History is built through the public workflow so it stays consistent.
    let mut clock = timestamp(rng);
    for j in 0..rng.gen_range(0..6) {
        let id = format!("extra-{j}");
        let request = NewChangeRequest {
            kind: ChangeKind::Add,
            target_id: None,
            payload: Some(tool(rng, &id)),
            rationale: text(rng, 30),
            submitter: text(rng, 10),
        };
        let cr = reg
            .submit_change_request(request, clock)
            .expect("valid payload");
        clock += chrono::Duration::milliseconds(rng.gen_range(1..100_000));
        match rng.gen_range(0..3) {
            0 => {}
            1 => {
                reg.review_change_request(&cr, Decision::Approve, "mod", &text(rng, 12), clock)
                    .expect("fresh id");
            }
            _ => {
                reg.review_change_request(&cr, Decision::Reject, "mod", &text(rng, 12), clock)
                    .expect("pending");
            }
        }
    }
    let live: Vec<String> = reg.tools().map(|t| t.id.clone()).collect();
    if let Some(target) = live.choose(rng) {
        let request = NewChangeRequest {
            kind: ChangeKind::Retire,
            target_id: Some(target.clone()),
            payload: None,
            rationale: String::new(),
            submitter: "curator".into(),
        };
        let cr = reg
            .submit_change_request(request, clock)
            .expect("live target");
        if rng.gen_bool(0.5) {
            reg.review_change_request(&cr, Decision::Approve, "mod", "", clock)
                .expect("pending");
        }
    }
    reg
}

pub fn tool(rng: &mut TestRng, id: &str) -> ToolRecord {
    let mut t = ToolRecord::new(id, &format!("{} {}", text(rng, 12), id), &text(rng, 60));
    t.description = text(rng, 80);
    while t.cj_stages.is_empty() {
        for stage in 1..=8u8 {
            if rng.gen_bool(0.3) {
                t.cj_stages.insert(stage);
            }
        }
    }
    for k in 0..rng.gen_range(0..4) {
        t.users.push(UserDeployment {
            organization: format!("Org {k}"),
            stage: *DeploymentStage::ALL.choose(rng).unwrap(),
        });
    }
    t.development_type = *DevelopmentType::ALL.choose(rng).unwrap();
    for _ in 0..rng.gen_range(0..3) {
        t.developers.push(text(rng, 15));
    }
    for _ in 0..rng.gen_range(0..4) {
        let shape = Shape {
            max_depth: 2,
            ..Shape::FULL
        };
        t.capabilities
            .push(Capability::new(classification(rng, &shape), text(rng, 40)));
    }
    if rng.gen_bool(0.5) {
        t.resources.push(format!("https://example.org/{id}"));
    }
    t
}

fn text(rng: &mut TestRng, max: usize) -> String {
    const WORDS: [&str; 12] = [
        "risk",
        "face",
        "match",
        "call",
        "triage",
        "\"quoted\"",
        "<tag>",
        "a&b",
        "Welsh",
        "café",
        "hot-spot",
        "summary",
    ];
    let n = rng.gen_range(1..=max.div_ceil(6).max(1));
    (0..n)
        .map(|_| *WORDS.choose(rng).unwrap())
        .collect::<Vec<_>>()
        .join(" ")
}

fn timestamp(rng: &mut TestRng) -> DateTime<Utc> {
    let secs = rng.gen_range(1_600_000_000..1_800_000_000);
    let millis = if rng.gen_bool(0.5) {
        0
    } else {
        rng.gen_range(0..1000)
    };
    Utc.timestamp_opt(secs, millis * 1_000_000).unwrap()
}
