//! Sequencing: can the outputs of one classification feed the inputs of the
//! next, and which inputs still have to be supplied from outside?

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::taxonomy::{
    mode_assignable, normalize, validate_structure, Classification, Mode, ModeProduct,
    ProductElement, StructureError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComposeError {
    #[error("classification {index} is not well-formed: {source}")]
    Normalization {
        index: usize,
        #[source]
        source: StructureError,
    },
    #[error("a pipeline needs at least one classification")]
    EmptyChain,
}

/// Kind of consumer input slot an output was bound to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotKind {
    Exact,
    Widening,
    Symbolic,
    Wildcard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundPair {
    /// Position in the producer's normalized outputs.
    pub producer: usize,
    /// Position in the consumer's normalized inputs.
    pub consumer: usize,
    pub kind: SlotKind,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Binding {
    /// One entry per producer output, in producer order.
    pub pairs: Vec<BoundPair>,
    /// Consumer position of each bound symbolic slot -> outputs it absorbed.
    pub symbolic_fills: BTreeMap<usize, usize>,
    pub wildcard_absorbed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SequenceReport {
    pub compatible: bool,
    pub binding: Option<Binding>,
    /// Consumer inputs left for an external source, in consumer order.
    #[serde(serialize_with = "elements_as_text")]
    pub residual: Vec<ProductElement>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PipelineReport {
    pub compatible: bool,
    pub stage_reports: Vec<SequenceReport>,
    #[serde(serialize_with = "elements_as_text")]
    pub external_inputs: Vec<ProductElement>,
    #[serde(serialize_with = "product_as_text")]
    pub overall_outputs: ModeProduct,
}

impl PipelineReport {
    /// Index `i` of the first incompatible boundary `i -> i + 1`.
    pub fn first_incompatible(&self) -> Option<usize> {
        self.stage_reports.iter().position(|r| !r.compatible)
    }
}

fn elements_as_text<S: Serializer>(elements: &[ProductElement], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(elements.iter().map(ToString::to_string))
}

fn product_as_text<S: Serializer>(product: &ModeProduct, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(product.iter().map(ToString::to_string))
}

enum Slot<'a> {
    Concrete(&'a Mode),
    Symbolic(&'a Mode),
    Wildcard,
}

impl Slot<'_> {
    fn accepts(&self, output: &Mode) -> bool {
        match self {
            Slot::Concrete(m) | Slot::Symbolic(m) => mode_assignable(output, m),
            Slot::Wildcard => true,
        }
    }

    fn unlimited(&self) -> bool {
        !matches!(self, Slot::Concrete(_))
    }
}

/// Checks whether `producer`'s outputs can all be consumed by `consumer`.
///
/// Both sides are normalized first. Every output must land in a distinct
/// concrete slot, a symbolic `mode^n` slot (which takes one or more), or the
/// trailing `...`. Outputs are bound left to right; for each one the
/// candidate slots are tried exact match first, then alias widening, then
/// symbolic, then wildcard, and the first candidate from which the remaining
/// outputs can still be placed is taken. This yields the same binding as a
/// full backtracking search while the feasibility test keeps it polynomial.
pub fn check_sequence(
    producer: &Classification,
    consumer: &Classification,
) -> Result<SequenceReport, ComposeError> {
    validate_structure(producer)
        .map_err(|source| ComposeError::Normalization { index: 0, source })?;
    validate_structure(consumer)
        .map_err(|source| ComposeError::Normalization { index: 1, source })?;
    Ok(match_normalized(&normalize(producer), &normalize(consumer)))
}

fn match_normalized(producer: &Classification, consumer: &Classification) -> SequenceReport {
    // Outputs of a valid, normalized classification are all Single.
    let outputs: Vec<&Mode> = producer
        .outputs
        .iter()
        .filter_map(ProductElement::mode)
        .collect();
    let slots: Vec<Slot> = consumer
        .inputs
        .iter()
        .map(|e| match e {
            ProductElement::Single(m) => Slot::Concrete(m),
            ProductElement::Repeat(m, _) => Slot::Symbolic(m),
            ProductElement::Wildcard => Slot::Wildcard,
        })
        .collect();
    let accepts: Vec<Vec<bool>> = outputs
        .iter()
        .map(|o| slots.iter().map(|s| s.accepts(o)).collect())
        .collect();

    // Outputs that no symbolic slot or wildcard can take must each get their
    // own concrete slot. `matcher` keeps a matching of all such outputs not
    // yet bound into the concrete slots not yet taken.
    let needy: Vec<bool> = accepts
        .iter()
        .map(|row| !row.iter().zip(&slots).any(|(ok, s)| *ok && s.unlimited()))
        .collect();
    let mut matcher = Matcher {
        accepts: &accepts,
        slots: &slots,
        taken: vec![false; slots.len()],
        owner: vec![None; slots.len()],
    };
    for i in (0..outputs.len()).filter(|i| needy[*i]) {
        if !matcher.augment(i, &mut vec![false; slots.len()]) {
            return SequenceReport {
                compatible: false,
                binding: None,
                residual: residual(consumer, &[]),
            };
        }
    }

    let mut pairs = Vec::with_capacity(outputs.len());
    for (i, output) in outputs.iter().enumerate() {
        if let Some(own) = matcher.owner.iter().position(|o| *o == Some(i)) {
            matcher.owner[own] = None;
        }
        let chosen = candidates(output, &slots, &accepts[i])
            .into_iter()
            .find(|(slot, _)| matcher.try_take(*slot));
        match chosen {
            Some((slot, kind)) => pairs.push(BoundPair {
                producer: i,
                consumer: slot,
                kind,
            }),
            // Unreachable once the initial matching exists: the slot just
            // released, or an unlimited slot, is always available.
            None => {
                return SequenceReport {
                    compatible: false,
                    binding: None,
                    residual: residual(consumer, &[]),
                }
            }
        }
    }

    let mut binding = Binding {
        pairs,
        ..Binding::default()
    };
    for pair in &binding.pairs {
        match pair.kind {
            SlotKind::Symbolic => *binding.symbolic_fills.entry(pair.consumer).or_default() += 1,
            SlotKind::Wildcard => binding.wildcard_absorbed += 1,
            SlotKind::Exact | SlotKind::Widening => {}
        }
    }
    let bound: Vec<usize> = binding
        .pairs
        .iter()
        .filter(|p| p.kind != SlotKind::Wildcard)
        .map(|p| p.consumer)
        .collect();
    SequenceReport {
        compatible: true,
        residual: residual(consumer, &bound),
        binding: Some(binding),
    }
}

/// Candidate slots for one output in preference order.
fn candidates(output: &Mode, slots: &[Slot], accepts: &[bool]) -> Vec<(usize, SlotKind)> {
    let mut exact = Vec::new();
    let mut widening = Vec::new();
    let mut symbolic = Vec::new();
    let mut wildcard = Vec::new();
    for (j, slot) in slots.iter().enumerate() {
        if !accepts[j] {
            continue;
        }
        match slot {
            Slot::Concrete(m) if *m == output => exact.push((j, SlotKind::Exact)),
            Slot::Concrete(_) => widening.push((j, SlotKind::Widening)),
            Slot::Symbolic(_) => symbolic.push((j, SlotKind::Symbolic)),
            Slot::Wildcard => wildcard.push((j, SlotKind::Wildcard)),
        }
    }
    exact.extend(widening);
    exact.extend(symbolic);
    exact.extend(wildcard);
    exact
}

/// Bipartite matching of outputs into free concrete slots, updated by
/// augmenting paths.
struct Matcher<'a> {
    accepts: &'a [Vec<bool>],
    slots: &'a [Slot<'a>],
    /// Concrete slots bound for good.
    taken: Vec<bool>,
    /// Which pending output each concrete slot is matched to.
    owner: Vec<Option<usize>>,
}

impl Matcher<'_> {
    fn augment(&mut self, u: usize, seen: &mut [bool]) -> bool {
        for v in 0..self.slots.len() {
            if seen[v] || self.taken[v] || self.slots[v].unlimited() || !self.accepts[u][v] {
                continue;
            }
            seen[v] = true;
            if self.owner[v].is_none_or(|w| self.augment(w, seen)) {
                self.owner[v] = Some(u);
                return true;
            }
        }
        false
    }

    /// Binds `slot` if every pending output stays placeable afterwards.
    fn try_take(&mut self, slot: usize) -> bool {
        if self.slots[slot].unlimited() {
            return true;
        }
        if self.taken[slot] {
            return false;
        }
        if let Some(w) = self.owner[slot] {
            // Re-seat the output currently holding the slot elsewhere.
            let mut seen = vec![false; self.slots.len()];
            seen[slot] = true;
            if !self.augment(w, &mut seen) {
                return false;
            }
        }
        self.owner[slot] = None;
        self.taken[slot] = true;
        true
    }
}

fn residual(consumer: &Classification, bound: &[usize]) -> Vec<ProductElement> {
    consumer
        .inputs
        .iter()
        .enumerate()
        .filter(|(j, e)| matches!(e, ProductElement::Wildcard) || !bound.contains(j))
        .map(|(_, e)| e.clone())
        .collect()
}

/// Folds [`check_sequence`] over adjacent pairs of `chain`.
pub fn check_pipeline(chain: &[Classification]) -> Result<PipelineReport, ComposeError> {
    let (first, last) = match (chain.first(), chain.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(ComposeError::EmptyChain),
    };
    for (index, c) in chain.iter().enumerate() {
        validate_structure(c).map_err(|source| ComposeError::Normalization { index, source })?;
    }
    let normalized: Vec<Classification> = chain.iter().map(normalize).collect();

    let stage_reports: Vec<SequenceReport> = normalized
        .windows(2)
        .map(|w| match_normalized(&w[0], &w[1]))
        .collect();
    let mut external_inputs = normalize(first).inputs.0;
    for report in &stage_reports {
        external_inputs.extend(report.residual.iter().cloned());
    }
    Ok(PipelineReport {
        compatible: stage_reports.iter().all(|r| r.compatible),
        stage_reports,
        external_inputs,
        overall_outputs: normalize(last).outputs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taxonomy::{parse_classification, PrimitiveKind};

    fn c(s: &str) -> Classification {
        parse_classification(s).unwrap()
    }

    fn residual_text(r: &SequenceReport) -> Vec<String> {
        r.residual.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn transcribe_then_translate() {
        let r = check_sequence(
            &c("Analysis (audio -> text)"),
            &c("Analysis (text -> text)"),
        )
        .unwrap();
        assert!(r.compatible);
        assert!(r.residual.is_empty());
        assert_eq!(
            r.binding.unwrap().pairs,
            vec![BoundPair {
                producer: 0,
                consumer: 0,
                kind: SlotKind::Exact
            }]
        );
    }

    #[test]
    fn transcribe_then_summarize_leaves_prompt() {
        let r = check_sequence(
            &c("Analysis (audio -> text)"),
            &c("Generation (prompt, text -> text)"),
        )
        .unwrap();
        assert!(r.compatible);
        assert_eq!(
            r.residual,
            vec![ProductElement::from(PrimitiveKind::Prompt)]
        );
    }

    #[test]
    fn topics_into_synthesis_binds_concrete_first() {
        let r = check_sequence(
            &c("Analysis (text -> enum)"),
            &c("Synthesis (enum, ... -> enum)"),
        )
        .unwrap();
        assert!(r.compatible);
        assert_eq!(r.residual, vec![ProductElement::Wildcard]);
        let b = r.binding.unwrap();
        assert_eq!(b.pairs[0].consumer, 0);
        assert_eq!(b.wildcard_absorbed, 0);
    }

    #[test]
    fn disjoint_modes_are_incompatible() {
        let r = check_sequence(
            &c("Analysis (image -> enum)"),
            &c("Analysis (audio -> text)"),
        )
        .unwrap();
        assert!(!r.compatible);
        assert!(r.binding.is_none());
    }

    #[test]
    fn extra_outputs_must_be_consumed() {
        let r = check_sequence(
            &c("Analysis (audio -> text, enum)"),
            &c("Analysis (text -> text)"),
        )
        .unwrap();
        assert!(!r.compatible);
        let r = check_sequence(
            &c("Analysis (audio -> text, enum)"),
            &c("Analysis (text, ... -> text)"),
        )
        .unwrap();
        assert!(r.compatible);
        assert_eq!(r.binding.unwrap().wildcard_absorbed, 1);
    }

    #[test]
    fn symbolic_slot_absorbs_many_or_stays_residual() {
        let consumer = c("Synthesis (enum^n -> enum)");
        let r = check_sequence(&c("Analysis (text -> bool, emotion, enum)"), &consumer).unwrap();
        assert!(r.compatible);
        assert!(r.residual.is_empty());
        assert_eq!(r.binding.unwrap().symbolic_fills.get(&0), Some(&3));

        let r = check_sequence(
            &c("Analysis (text -> text)"),
            &c("Synthesis (text, enum^n -> enum)"),
        )
        .unwrap();
        assert!(r.compatible);
        assert_eq!(residual_text(&r), vec!["enum^n"]);
    }

    #[test]
    fn greedy_would_fail_where_search_succeeds() {
        // Taking the first `enum` slot for `bool` blocks the plain `enum` output;
        // here both orders work only if `bool` takes the alias slot.
        let r = check_sequence(
            &c("Analysis (text -> bool, enum)"),
            &c("Synthesis (enum, bool -> enum)"),
        )
        .unwrap();
        assert!(r.compatible);
        let pairs = r.binding.unwrap().pairs;
        assert_eq!((pairs[0].consumer, pairs[0].kind), (1, SlotKind::Exact));
        assert_eq!((pairs[1].consumer, pairs[1].kind), (0, SlotKind::Exact));

        let r = check_sequence(
            &c("Analysis (text -> bool, enum)"),
            &c("Synthesis (enum, enum -> enum)"),
        )
        .unwrap();
        assert!(r.compatible);
        assert_eq!(r.binding.unwrap().pairs[0].kind, SlotKind::Widening);
    }

    #[test]
    fn literal_repeats_are_expanded_before_matching() {
        let r = check_sequence(
            &c("Analysis (text -> enum^2)"),
            &c("Synthesis (enum, enum -> enum)"),
        )
        .unwrap();
        assert!(r.compatible);
        let r = check_sequence(
            &c("Analysis (text -> enum^3)"),
            &c("Synthesis (enum^2 -> enum)"),
        )
        .unwrap();
        assert!(!r.compatible);
    }

    #[test]
    fn invalid_ast_is_a_normalization_error() {
        let mut bad = c("Analysis (text -> text)");
        bad.outputs.0.push(ProductElement::Wildcard);
        assert!(matches!(
            check_sequence(&bad, &c("Analysis (text -> text)")),
            Err(ComposeError::Normalization { index: 0, .. })
        ));
    }

    #[test]
    fn pipeline_external_inputs() {
        let chain = [
            c("Analysis (audio -> text)"),
            c("Analysis (text -> text)"),
            c("Generation (prompt, text -> text)"),
        ];
        let report = check_pipeline(&chain).unwrap();
        assert!(report.compatible);
        let ext: Vec<String> = report
            .external_inputs
            .iter()
            .map(ToString::to_string)
            .collect();
        assert_eq!(ext, vec!["audio", "prompt"]);
        assert_eq!(report.overall_outputs.to_string(), "text");
    }

    #[test]
    fn pipeline_single_and_broken() {
        let single = check_pipeline(&[c("Analysis (audio -> text)")]).unwrap();
        assert!(single.compatible);
        assert!(single.stage_reports.is_empty());
        assert_eq!(single.external_inputs.len(), 1);

        let broken =
            check_pipeline(&[c("Analysis (image -> enum)"), c("Analysis (audio -> text)")])
                .unwrap();
        assert!(!broken.compatible);
        assert_eq!(broken.first_incompatible(), Some(0));

        assert_eq!(check_pipeline(&[]), Err(ComposeError::EmptyChain));
    }

    #[test]
    fn report_json_uses_dsl_fragments() {
        let r = check_sequence(
            &c("Analysis (audio -> text)"),
            &c("Generation (prompt, text -> text)"),
        )
        .unwrap();
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["residual"], serde_json::json!(["prompt"]));
        assert_eq!(json["binding"]["pairs"][0]["consumer"], 1);
    }

    #[test]
    fn large_products_stay_fast() {
        // 40 identical outputs into 39 identical slots: a naive search would
        // enumerate permutations before giving up.
        let p = c("Analysis (audio -> text^40)");
        let q = c("Analysis (text^39 -> text)");
        assert!(!check_sequence(&p, &q).unwrap().compatible);
    }
}
