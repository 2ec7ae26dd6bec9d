#![no_main]

use libfuzzer_sys::fuzz_target;
use psc_core::Manifest;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = Manifest::parse(text) {
        let printed = m.to_string();
        assert_eq!(Manifest::parse(&printed).unwrap(), m);
    }
});
