#![no_main]

use libfuzzer_sys::fuzz_target;
use psc_core::Automaton;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(a) = Automaton::from_dump(text) {
        let dump = a.to_dump();
        assert_eq!(Automaton::from_dump(&dump).unwrap(), a);
        let _ = a.enabled(a.initial);
        let _ = a.check_invariants();
        let _ = a.to_dot();
    }
});
