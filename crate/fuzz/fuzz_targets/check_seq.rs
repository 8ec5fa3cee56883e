#![no_main]

use atlas_core::compose::check_sequence;
use atlas_core::taxonomy::parse_classification;
use libfuzzer_sys::fuzz_target;

// Two descriptors separated by a newline.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Some((a, b)) = text.split_once('\n') else {
        return;
    };
    let (Ok(a), Ok(b)) = (parse_classification(a), parse_classification(b)) else {
        return;
    };
    let report = check_sequence(&a, &b).expect("parsed descriptors are valid");
    assert_eq!(report.compatible, report.binding.is_some());
});
