#![no_main]

use atlas_core::registry::{load_registry, save_registry};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(registry) = load_registry(text) else {
        return;
    };
    let saved = save_registry(&registry);
    let again = load_registry(&saved).expect("saved documents load");
    assert_eq!(again, registry);
    assert_eq!(save_registry(&again), saved);
});
