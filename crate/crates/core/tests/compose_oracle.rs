use atlas_core::compose::{check_pipeline, check_sequence, SlotKind};
use atlas_core::taxonomy::{parse_classification, Classification, ProductElement};
use atlas_testkit::gen::{self, Shape};
use atlas_testkit::oracle;
use atlas_testkit::rand::Rng;
use proptest::prelude::*;

fn c(s: &str) -> Classification {
    parse_classification(s).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn matcher_agrees_with_exhaustive_assignment(seed in any::<u64>()) {
        let (a, b) = gen::sequencing_pair(&mut atlas_testkit::rng(seed), &Shape::SEQUENCING);
        let report = check_sequence(&a, &b).unwrap();
        prop_assert_eq!(report.compatible, oracle::exists_assignment(&a, &b), "{} | {}", a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn binding_is_consistent(seed in any::<u64>()) {
        let (a, b) = gen::sequencing_pair(&mut atlas_testkit::rng(seed), &Shape::SEQUENCING);
        let report = check_sequence(&a, &b).unwrap();
        let consumer = oracle::expand(&b.inputs);
        prop_assert!(report.residual.len() <= consumer.len());
        if let Some(binding) = &report.binding {
            let outputs = oracle::expand(&a.outputs);
            prop_assert_eq!(binding.pairs.len(), outputs.len());
            let mut concrete = std::collections::HashSet::new();
            for (i, pair) in binding.pairs.iter().enumerate() {
                prop_assert_eq!(pair.producer, i);
                prop_assert!(oracle::fits(&outputs[i], &consumer[pair.consumer]));
                if matches!(pair.kind, SlotKind::Exact | SlotKind::Widening) {
                    prop_assert!(concrete.insert(pair.consumer), "slot reused");
                }
            }
            // Residual is exactly the unbound slots plus any wildcard.
            prop_assert_eq!(
                report.residual.len() + concrete.len() + binding.symbolic_fills.len(),
                consumer.len()
            );
        } else {
            prop_assert!(!report.compatible);
        }
    }

    #[test]
    fn deterministic(seed in any::<u64>()) {
        let (a, b) = gen::sequencing_pair(&mut atlas_testkit::rng(seed), &Shape::SEQUENCING);
        prop_assert_eq!(check_sequence(&a, &b).unwrap(), check_sequence(&a, &b).unwrap());
    }

    #[test]
    fn extra_consumer_slot_keeps_compatibility(seed in any::<u64>()) {
        let mut rng = atlas_testkit::rng(seed);
        let (a, b) = gen::sequencing_pair(&mut rng, &Shape::SEQUENCING);
        if !check_sequence(&a, &b).unwrap().compatible {
            return Ok(());
        }
        let extra = gen::classification(&mut rng, &Shape::SEQUENCING).outputs.elements()[0].clone();
        let mut wider = b.clone();
        let limit = if wider.inputs.has_wildcard() { wider.inputs.len() - 1 } else { wider.inputs.len() };
        let at = rng.gen_range(0..=limit);
        wider.inputs.0.insert(at, extra);
        prop_assert!(check_sequence(&a, &wider).unwrap().compatible, "{} | {}", a, wider);
    }

    #[test]
    fn same_mode_self_composition(seed in any::<u64>()) {
        let mut rng = atlas_testkit::rng(seed);
        let m = gen::classification(&mut rng, &Shape { wildcard: false, symbolic: false, max_repeat: 0, ..Shape::SEQUENCING })
            .inputs.elements()[0].clone();
        let text = format!("Analysis ({m} -> {m})");
        let d = c(&text);
        let report = check_sequence(&d, &d).unwrap();
        prop_assert!(report.compatible, "{}", text);
        prop_assert!(report.residual.is_empty());
    }
}

#[test]
fn sequencing_pairs_are_often_compatible() {
    // Guard against a generator that makes the oracle comparison vacuous.
    let mut rng = atlas_testkit::rng(7);
    let total = 2000;
    let compatible = (0..total)
        .filter(|_| {
            let (a, b) = gen::sequencing_pair(&mut rng, &Shape::SEQUENCING);
            oracle::exists_assignment(&a, &b)
        })
        .count();
    assert!(
        compatible * 10 > total,
        "only {compatible} of {total} compatible"
    );
    assert!(compatible * 10 < total * 9);
}

#[test]
fn pipeline_agrees_with_pairwise_oracle() {
    let chain = [
        c("Analysis (audio -> text)"),
        c("Analysis (text -> text)"),
        c("Generation (prompt, text -> text)"),
    ];
    let report = check_pipeline(&chain).unwrap();
    for (i, w) in chain.windows(2).enumerate() {
        assert_eq!(
            report.stage_reports[i].compatible,
            oracle::exists_assignment(&w[0], &w[1])
        );
    }
    assert_eq!(
        report
            .external_inputs
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>(),
        ["audio", "prompt"]
    );
}

#[test]
fn wildcard_residual_is_reported_once() {
    let r = check_sequence(
        &c("Analysis (text -> enum, text)"),
        &c("Synthesis (enum, ... -> enum)"),
    )
    .unwrap();
    assert!(r.compatible);
    assert_eq!(r.residual, vec![ProductElement::Wildcard]);
    assert_eq!(r.binding.unwrap().wildcard_absorbed, 1);
}
