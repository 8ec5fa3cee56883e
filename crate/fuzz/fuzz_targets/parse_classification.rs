#![no_main]

use atlas_core::taxonomy::{normalize, parse_classification, print_classification};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(ast) = parse_classification(text) else {
        return;
    };
    let printed = print_classification(&ast);
    let reparsed = parse_classification(&printed).expect("canonical output parses");
    assert_eq!(reparsed, ast);
    assert_eq!(print_classification(&reparsed), printed);
    let once = normalize(&ast);
    assert_eq!(normalize(&once), once);
});
