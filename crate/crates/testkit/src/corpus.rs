/// Every descriptor in the taxonomy examples table, in table order, with the
/// Unicode arrow as written there.
pub const TAXONOMY_EXAMPLES: [&str; 16] = [
    "Analysis (audio → text)",
    "Analysis (audio, audio → enum)",
    "Analysis (audio, [audio] → enum)",
    "Analysis (audio → [audio])",
    "Analysis (audio, [audio] → [audio, enum])",
    "Analysis (audio, [audio, enum] → [audio, enum])",
    "Analysis (image → enum)",
    "Analysis (text → text)",
    "Analysis (image, image → image)",
    "Synthesis (text → enum)",
    "Synthesis (enum, enum → enum)",
    "Generation (prompt, text → text)",
    "Generation (prompt, text → text)",
    "Generation (prompt, text → [text])",
    "Generation (prompt, text → image)",
    "Generation (prompt, name → text, [index])",
];

/// Canonical spelling of [`TAXONOMY_EXAMPLES`], written out by hand.
pub const TAXONOMY_EXAMPLES_CANONICAL: [&str; 16] = [
    "Analysis (audio -> text)",
    "Analysis (audio, audio -> enum)",
    "Analysis (audio, [audio] -> enum)",
    "Analysis (audio -> [audio])",
    "Analysis (audio, [audio] -> [audio, enum])",
    "Analysis (audio, [audio, enum] -> [audio, enum])",
    "Analysis (image -> enum)",
    "Analysis (text -> text)",
    "Analysis (image, image -> image)",
    "Synthesis (text -> enum)",
    "Synthesis (enum, enum -> enum)",
    "Generation (prompt, text -> text)",
    "Generation (prompt, text -> text)",
    "Generation (prompt, text -> [text])",
    "Generation (prompt, text -> image)",
    "Generation (prompt, name -> text, [index])",
];

/// Descriptors quoted for a single multi-capability tool record.
pub const RECORD_DESCRIPTORS: [&str; 3] = [
    "Analysis (audio → text)",
    "Analysis (text → text)",
    "Synthesis (enum^n → enum)",
];

/// (sequence name, first tool, second tool, expected residual)
pub const SEQUENCING_EXAMPLES: [(&str, &str, &str, &[&str]); 3] = [
    (
        "Transcribe, then translate",
        "Analysis (audio → text)",
        "Analysis (text → text)",
        &[],
    ),
    (
        "Transcribe, then summarize",
        "Analysis (audio → text)",
        "Generation (prompt, text → text)",
        &["prompt"],
    ),
    (
        "Extract hate speech topics, then use in synthesis of offender profiles",
        "Analysis (text → enum)",
        "Synthesis (enum, ... → enum)",
        &["..."],
    ),
];
