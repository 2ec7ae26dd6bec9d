#![no_main]

use libfuzzer_sys::fuzz_target;
use psc_core::load_scenario;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    match load_scenario(text) {
        Ok(scenario) => {
            let again = load_scenario(&scenario.to_json()).expect("serialized scenario reloads");
            assert_eq!(again, scenario);
        }
        Err(diags) => {
            assert!(!diags.is_empty());
            for d in diags {
                assert!(d.span.map_or(true, |s| s.offset <= text.len()));
            }
        }
    }
});
