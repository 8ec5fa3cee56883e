#![no_main]

use atlas_core::registry::ToolRecord;
use atlas_service::ToolFilter;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(query) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(filter) = ToolFilter::from_query(query) {
        let mut tool = ToolRecord::new("probe", "Probe", "fuzzing");
        tool.cj_stages.insert(1);
        let _ = filter.matches(&tool);
    }
});
